//! First-order Taylor remainders.
//!
//! `R_act(x) = y(x) - y(x0) - y'(x0)(x - x0)` is the actual remainder and
//! `R_xi(x) = y''(xi)(x - x0)^2 / 2` its Lagrange form for a given xi.

use crate::bundle::DerivativeBundle;
use crate::error::Result;

/// Derivatives of y at `x0`, cached for repeated remainder evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentRemainder {
    x0: f64,
    /// `at_x0[k] = y⁽ᵏ⁾(x0)` for k = 0..=max_order.
    at_x0: Vec<f64>,
}

impl TangentRemainder {
    pub fn new(bundle: &DerivativeBundle, x0: f64) -> Result<Self> {
        let at_x0 = (0..=bundle.max_order())
            .map(|k| bundle.eval(k, x0))
            .collect::<Result<_>>()?;
        Ok(TangentRemainder { x0, at_x0 })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// y⁽ᵏ⁾(x0).
    pub fn derivative_at_x0(&self, k: usize) -> f64 {
        self.at_x0[k]
    }

    /// y(x) − T₁(x).
    ///
    /// Close to `x0` the direct difference cancels catastrophically, so when
    /// the Taylor tail `Σ_{k≥2} y⁽ᵏ⁾(x0) dᵏ/k!` has already converged to
    /// rounding level it is summed instead. Elsewhere the direct difference
    /// is used.
    pub fn actual(&self, bundle: &DerivativeBundle, x: f64) -> Result<f64> {
        let d = x - self.x0;
        if d == 0.0 {
            return Ok(0.0);
        }
        if let Some(tail) = self.converged_tail(d) {
            return Ok(tail);
        }
        Ok(bundle.y(x)? - self.at_x0[0] - self.at_x0[1] * d)
    }

    fn converged_tail(&self, d: f64) -> Option<f64> {
        let top = self.at_x0.len() - 1;
        let mut scale = d;
        let mut terms = Vec::with_capacity(top);
        for k in 2..=top {
            scale *= d / k as f64;
            terms.push(self.at_x0[k] * scale);
        }
        let sum: f64 = terms.iter().rev().sum();
        let last_two = terms[terms.len() - 2].abs() + terms[terms.len() - 1].abs();
        (sum != 0.0 && last_two <= f64::EPSILON * sum.abs()).then_some(sum)
    }
}

/// One-off [`TangentRemainder::actual`].
pub fn actual_remainder(bundle: &DerivativeBundle, x0: f64, x: f64) -> Result<f64> {
    if x == x0 {
        return Ok(0.0);
    }
    TangentRemainder::new(bundle, x0)?.actual(bundle, x)
}

/// y(x) − y(x0) − y'(x0)(x − x0) evaluated term by term.
pub fn direct_remainder(bundle: &DerivativeBundle, x0: f64, x: f64) -> Result<f64> {
    Ok(bundle.y(x)? - bundle.y(x0)? - bundle.eval(1, x0)? * (x - x0))
}

/// y''(xi)(x − x0)²/2.
pub fn lagrange_remainder(bundle: &DerivativeBundle, x0: f64, x: f64, xi: f64) -> Result<f64> {
    let d = x - x0;
    Ok(0.5 * bundle.eval(2, xi)? * d * d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_matches_log_series_near_origin() {
        let b = DerivativeBundle::from_text("ln(1+x)", 8).unwrap();
        let d = 1e-5_f64;
        // ln(1+d) - d via a long alternating series
        let mut want = 0.0;
        for k in (2..30).rev() {
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            want += sign * d.powi(k) / k as f64;
        }
        let got = actual_remainder(&b, 0.0, d).unwrap();
        assert!((got - want).abs() <= 1e-15 * want.abs(), "{got} vs {want}");
    }

    #[test]
    fn falls_back_to_direct_far_away() {
        let b = DerivativeBundle::from_text("exp(x/5)*sin(x)", 6).unwrap();
        let got = actual_remainder(&b, 1.0, 10.0).unwrap();
        let want = direct_remainder(&b, 1.0, 10.0).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn cubic_is_exact() {
        let b = DerivativeBundle::from_text("x^3", 6).unwrap();
        assert_eq!(actual_remainder(&b, 0.0, 0.5).unwrap(), 0.125);
        assert_eq!(actual_remainder(&b, 2.0, 2.0).unwrap(), 0.0);
    }
}

//! Natural cubic splines and the h⁴ error bound used for the remainder fit.

use crate::bundle::DerivativeBundle;
use crate::error::{Error, Result};

/// Piecewise cubic with zero second derivative at both end knots.
///
/// On `[knots[i], knots[i+1]]` the spline is
/// `a[i] + b[i] t + c[i] t^2 + d[i] t^3` with `t = x - knots[i]`, i.e.
/// value, first derivative, second derivative / 2 and third derivative / 6
/// at the left knot.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineModel {
    knots: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
}

/// Solves a tridiagonal system by forward elimination and back
/// substitution without pivoting. `sub[0]` and `sup[n-1]` are ignored.
/// Intended for diagonally dominant systems.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if sub.len() != n || sup.len() != n || rhs.len() != n {
        return Err(Error::InvalidArgument(
            "tridiagonal bands have different lengths".into(),
        ));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 {
        return Err(Error::InvalidArgument(
            "zero pivot in tridiagonal solve".into(),
        ));
    }
    cp[0] = sup[0] / pivot;
    dp[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - sub[i] * cp[i - 1];
        if pivot == 0.0 {
            return Err(Error::InvalidArgument(
                "zero pivot in tridiagonal solve".into(),
            ));
        }
        cp[i] = sup[i] / pivot;
        dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / pivot;
    }
    let mut x = dp;
    for i in (0..n - 1).rev() {
        x[i] -= cp[i] * x[i + 1];
    }
    Ok(x)
}

/// Builds the natural cubic interpolant through `(xs[i], ys[i])`.
pub fn build_natural_spline(xs: &[f64], ys: &[f64]) -> Result<SplineModel> {
    let n = xs.len();
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: n });
    }
    if ys.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} knots but {} values",
            n,
            ys.len()
        )));
    }
    if let Some(i) = xs.windows(2).position(|w| !(w[0] < w[1])) {
        return Err(Error::NonIncreasingKnots { index: i + 1 });
    }

    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let slope: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

    // Interior second derivatives m[1..n-1]; m[0] = m[n-1] = 0.
    let m_int = n - 2;
    let mut sub = vec![0.0; m_int];
    let mut diag = vec![0.0; m_int];
    let mut sup = vec![0.0; m_int];
    let mut rhs = vec![0.0; m_int];
    for j in 0..m_int {
        let i = j + 1;
        sub[j] = h[i - 1];
        diag[j] = 2.0 * (h[i - 1] + h[i]);
        sup[j] = h[i];
        rhs[j] = 6.0 * (slope[i] - slope[i - 1]);
    }
    let interior = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;
    let mut m = Vec::with_capacity(n);
    m.push(0.0);
    m.extend(interior);
    m.push(0.0);

    let mut a = Vec::with_capacity(n - 1);
    let mut b = Vec::with_capacity(n - 1);
    let mut c = Vec::with_capacity(n - 1);
    let mut d = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        a.push(ys[i]);
        b.push(slope[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0);
        c.push(0.5 * m[i]);
        d.push((m[i + 1] - m[i]) / (6.0 * h[i]));
    }
    Ok(SplineModel {
        knots: xs.to_vec(),
        a,
        b,
        c,
        d,
    })
}

impl SplineModel {
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    fn locate(&self, x: f64) -> Result<usize> {
        let (lo, hi) = self.domain();
        if !(lo <= x && x <= hi) {
            return Err(Error::OutOfRange { x, lo, hi });
        }
        // right-open intervals, except that the last knot belongs to the last one
        let i = self.knots.partition_point(|&k| k <= x);
        Ok(i.saturating_sub(1).min(self.knots.len() - 2))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let i = self.locate(x)?;
        let t = x - self.knots[i];
        Ok(self.a[i] + t * (self.b[i] + t * (self.c[i] + t * self.d[i])))
    }

    /// Derivative of order 0..=3 at `x`.
    pub fn eval_derivative(&self, order: usize, x: f64) -> Result<f64> {
        let i = self.locate(x)?;
        let t = x - self.knots[i];
        let (b, c, d) = (self.b[i], self.c[i], self.d[i]);
        Ok(match order {
            0 => self.a[i] + t * (b + t * (c + t * d)),
            1 => b + t * (2.0 * c + 3.0 * t * d),
            2 => 2.0 * c + 6.0 * t * d,
            3 => 6.0 * d,
            _ => 0.0,
        })
    }

    /// One-sided derivative at interior knot `k` taken from interval `k-1`.
    pub fn left_derivative(&self, order: usize, k: usize) -> f64 {
        let i = k - 1;
        let t = self.knots[k] - self.knots[i];
        let (b, c, d) = (self.b[i], self.c[i], self.d[i]);
        match order {
            0 => self.a[i] + t * (b + t * (c + t * d)),
            1 => b + t * (2.0 * c + 3.0 * t * d),
            2 => 2.0 * c + 6.0 * t * d,
            _ => 6.0 * d,
        }
    }

    /// Second derivative at the first and last knot.
    pub fn end_second_derivatives(&self) -> (f64, f64) {
        let last = self.knots.len() - 1;
        (2.0 * self.c[0], self.left_derivative(2, last))
    }
}

/// Constants of the derivative-error recursion for mesh ratio M = 1:
/// the leading `3M(1+M)^2` factor followed by the per-level factors 3, 2, 1.
pub const BOUND_RECURSION: [f64; 4] = [12.0, 3.0, 2.0, 1.0];

/// Product of [`BOUND_RECURSION`], i.e. 72.
pub fn bound_constant() -> f64 {
    BOUND_RECURSION.iter().product()
}

/// Leading factor `3M(1+M)^2` for mesh ratio `m`.
pub fn mesh_factor(m: f64) -> f64 {
    3.0 * m * (1.0 + m) * (1.0 + m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub h: f64,
    pub max_y6: f64,
    pub argmax: f64,
    pub b_u: f64,
}

/// `B_U = 72 h^4 max |y⁽⁶⁾|` over `interval`, the maximum taken on a uniform
/// probe grid and refined by golden-section search near the best probe.
pub fn bound_bu(
    bundle: &DerivativeBundle,
    interval: (f64, f64),
    h: f64,
    probe_points: usize,
) -> Result<BoundReport> {
    if probe_points < 1000 {
        return Err(Error::InvalidArgument(format!(
            "probe_points must be at least 1000, got {probe_points}"
        )));
    }
    let (lo, hi) = interval;
    if !(lo < hi) || !(h > 0.0) {
        return Err(Error::InvalidArgument(
            "bad interval or step for the bound".into(),
        ));
    }
    let f = |x: f64| bundle.eval(6, x).map(f64::abs);
    let step = (hi - lo) / (probe_points - 1) as f64;
    let mut best = (lo, f(lo)?);
    let mut best_i = 0;
    for i in 1..probe_points {
        let x = if i + 1 == probe_points {
            hi
        } else {
            lo + i as f64 * step
        };
        let v = f(x)?;
        if v > best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    let a = lo + best_i.saturating_sub(1) as f64 * step;
    let b = (lo + (best_i + 1) as f64 * step).min(hi);
    let refined = golden_max(&f, a, b)?;
    if refined.1 > best.1 {
        best = refined;
    }
    let b_u = bound_constant() * h.powi(4) * best.1;
    Ok(BoundReport {
        h,
        max_y6: best.1,
        argmax: best.0,
        b_u,
    })
}

fn golden_max(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..100 {
        if (b - a).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x)?;
    Ok([(c, fc), (d, fd), (x, fx)]
        .into_iter()
        .fold((x, fx), |best, p| if p.1 > best.1 { p } else { best }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_straight_line() {
        let xs: Vec<f64> = (0..5).map(|i| i as f64 * 0.75 - 1.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let s = build_natural_spline(&xs, &ys).unwrap();
        for k in 0..50 {
            let x = -1.0 + 3.0 * (k as f64 + 0.37) / 50.0;
            assert!((s.eval(x).unwrap() - (2.0 * x + 1.0)).abs() <= 1e-13);
        }
        let mid = 0.5 * (xs[1] + xs[2]);
        assert!((s.eval(mid).unwrap() - (2.0 * mid + 1.0)).abs() <= 1e-15);
    }

    #[test]
    fn interpolates_knots_and_has_natural_ends() {
        let xs: Vec<f64> = (0..20).map(|i| (i as f64).powf(1.3)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x * 0.4).sin() * 3.0).collect();
        let s = build_natural_spline(&xs, &ys).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((s.eval(*x).unwrap() - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
        let (l, r) = s.end_second_derivatives();
        assert!(l.abs() <= 1e-9 && r.abs() <= 1e-9, "{l} {r}");
        for (k, &xk) in xs.iter().enumerate().take(xs.len() - 1).skip(1) {
            for order in 1..=2 {
                let left = s.left_derivative(order, k);
                let right = s.eval_derivative(order, xk).unwrap();
                assert!((left - right).abs() <= 1e-9 * 3.0, "order {order} knot {k}");
            }
        }
    }

    #[test]
    fn sine_error_within_fourth_derivative_bound() {
        let n = 101;
        let h = std::f64::consts::PI / 100.0;
        let xs: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let s = build_natural_spline(&xs, &ys).unwrap();
        let bound = 72.0 * h.powi(4);
        let mut worst = 0.0_f64;
        for k in 0..=1000 {
            let x = std::f64::consts::PI * k as f64 / 1000.0;
            worst = worst.max((s.eval(x).unwrap() - x.sin()).abs());
        }
        assert!(worst <= bound, "{worst} > {bound}");
    }

    #[test]
    fn errors() {
        assert_eq!(
            build_natural_spline(&[0.0, 1.0], &[0.0, 1.0]),
            Err(Error::TooFewPoints { needed: 3, got: 2 })
        );
        assert_eq!(
            build_natural_spline(&[0.0, 1.0, 1.0], &[0.0, 1.0, 2.0]),
            Err(Error::NonIncreasingKnots { index: 2 })
        );
        assert!(build_natural_spline(&[0.0, 1.0, 2.0], &[0.0, 1.0]).is_err());
        let s = build_natural_spline(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]).unwrap();
        assert!(matches!(s.eval(2.0 + 1e-9), Err(Error::OutOfRange { .. })));
        assert!(matches!(s.eval(-1e-9), Err(Error::OutOfRange { .. })));
        assert_eq!(s.eval(2.0).unwrap(), 0.0);
    }

    #[test]
    fn tridiagonal_residual() {
        let n = 50;
        let sub: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * i as f64).collect();
        let sup: Vec<f64> = (0..n).map(|i| 0.5 - 0.003 * i as f64).collect();
        let diag: Vec<f64> = (0..n).map(|i| 4.0 + (i as f64).sin()).collect();
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
        let x = solve_tridiagonal(&sub, &diag, &sup, &rhs).unwrap();
        for i in 0..n {
            let mut r = diag[i] * x[i] - rhs[i];
            if i > 0 {
                r += sub[i] * x[i - 1];
            }
            if i + 1 < n {
                r += sup[i] * x[i + 1];
            }
            assert!(r.abs() <= 1e-12);
        }
    }

    #[test]
    fn recursion_constants_give_72() {
        assert_eq!(mesh_factor(1.0), BOUND_RECURSION[0]);
        // |y'' - P| <= 6 |y5 - P'''| h^3 from the 3, 2, 1 levels
        assert_eq!(BOUND_RECURSION[1..].iter().product::<f64>(), 6.0);
        assert_eq!(bound_constant(), 72.0);
    }

    #[test]
    fn log_bound_matches_closed_form() {
        let b = DerivativeBundle::from_text("ln(1+x)", 6).unwrap();
        let r = bound_bu(&b, (0.0, 10.0), 1e-3, 1000).unwrap();
        assert_eq!(r.max_y6, 120.0);
        assert!((r.b_u - 8.64e-9).abs() <= 1e-12 * 8.64e-9 * 1e3);
    }

    #[test]
    fn cubic_bound_is_zero() {
        let b = DerivativeBundle::from_text("x^3", 6).unwrap();
        assert_eq!(bound_bu(&b, (0.0, 1.0), 0.01, 1000).unwrap().b_u, 0.0);
    }
}

//! Taylor polynomials and the spline-enhanced approximant `T1 + P_R`.

use crate::bundle::DerivativeBundle;
use crate::error::{Error, Result};
use crate::lagrange::LagrangeTrajectory;
use crate::remainder::{lagrange_remainder, TangentRemainder};
use crate::spline::{build_natural_spline, SplineModel};

pub const DEFAULT_PROBE_POINTS: usize = 100_001;

/// Knot spacings excluded at each end for [`MetricsRow::delta_cs_interior`].
/// Natural end conditions perturb the fit by a factor that decays like
/// (2 - √3)^k with distance k in knots.
pub const BOUNDARY_LAYER_KNOTS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorPolynomial {
    pub x0: f64,
    /// `coefficients[k] = y⁽ᵏ⁾(x0) / k!`
    pub coefficients: Vec<f64>,
}

impl TaylorPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Horner evaluation in `x - x0`.
    pub fn eval(&self, x: f64) -> f64 {
        let t = x - self.x0;
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c)
    }

    /// k-th derivative at x0.
    pub fn derivative_at_center(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.coefficients.get(k).map_or(0.0, |c| c * fact)
    }
}

pub fn taylor_poly(bundle: &DerivativeBundle, x0: f64, degree: usize) -> Result<TaylorPolynomial> {
    if degree > bundle.max_order() {
        return Err(Error::InvalidArgument(format!(
            "degree {degree} exceeds bundle order {}",
            bundle.max_order()
        )));
    }
    let mut fact = 1.0;
    let mut coefficients = Vec::with_capacity(degree + 1);
    for k in 0..=degree {
        if k > 1 {
            fact *= k as f64;
        }
        coefficients.push(bundle.eval(k, x0)? / fact);
    }
    Ok(TaylorPolynomial { x0, coefficients })
}

/// How the spline represents the remainder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompositionMode {
    /// Spline `y''(ξ(x))/2`, then multiply by `(x - x0)^2`.
    #[default]
    Factored,
    /// Spline `R_ξ(x)` itself.
    Direct,
}

impl CompositionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CompositionMode::Factored => "factored",
            CompositionMode::Direct => "direct",
        }
    }
}

impl std::str::FromStr for CompositionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "factored" => Ok(CompositionMode::Factored),
            "direct" => Ok(CompositionMode::Direct),
            other => Err(Error::InvalidArgument(format!(
                "unknown composition mode `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnhancedApproximant {
    pub t1: TaylorPolynomial,
    pub spline: SplineModel,
    pub mode: CompositionMode,
    pub x0: f64,
    /// First spline knot.
    pub x_z: f64,
    pub x_end: f64,
}

impl EnhancedApproximant {
    /// The remainder model P_R(x) on `[x0, x_end]`.
    pub fn remainder(&self, x: f64) -> Result<f64> {
        if !(self.x0 <= x && x <= self.x_end) {
            return Err(Error::OutOfRange {
                x,
                lo: self.x0,
                hi: self.x_end,
            });
        }
        let t = x - self.x0;
        if x < self.x_z {
            let first = self.spline.eval(self.x_z)?;
            return Ok(match self.mode {
                CompositionMode::Factored => first * t * t,
                CompositionMode::Direct => first * t / (self.x_z - self.x0),
            });
        }
        let s = self.spline.eval(x)?;
        Ok(match self.mode {
            CompositionMode::Factored => s * t * t,
            CompositionMode::Direct => s,
        })
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.t1.eval(x) + self.remainder(x)?)
    }

    /// The quantity the spline was fitted to, evaluated from the true
    /// function: `R_act/(x-x0)^2` (factored) or `R_act` (direct).
    pub fn spline_target(
        &self,
        tangent: &TangentRemainder,
        bundle: &DerivativeBundle,
        x: f64,
    ) -> Result<f64> {
        let r = tangent.actual(bundle, x)?;
        Ok(match self.mode {
            CompositionMode::Factored => {
                let t = x - self.x0;
                r / (t * t)
            }
            CompositionMode::Direct => r,
        })
    }
}

/// Fits the remainder along `traj` with a natural cubic spline.
pub fn build_enhanced(
    t1: &TaylorPolynomial,
    traj: &LagrangeTrajectory,
    bundle: &DerivativeBundle,
    mode: CompositionMode,
) -> Result<EnhancedApproximant> {
    if t1.degree() != 1 {
        return Err(Error::InvalidArgument(
            "enhancement expects the degree-1 Taylor polynomial".into(),
        ));
    }
    if t1.x0 != traj.x0 {
        return Err(Error::InvalidArgument(
            "Taylor centre and trajectory x0 differ".into(),
        ));
    }
    let x0 = traj.x0;
    let data: Vec<f64> = traj
        .nodes()
        .iter()
        .zip(traj.values())
        .map(|(&x, &xi)| match mode {
            CompositionMode::Factored => Ok(0.5 * bundle.eval(2, xi)?),
            CompositionMode::Direct => lagrange_remainder(bundle, x0, x, xi),
        })
        .collect::<Result<_>>()?;
    let spline = build_natural_spline(traj.nodes(), &data)?;
    let nodes = traj.nodes();
    Ok(EnhancedApproximant {
        t1: t1.clone(),
        spline,
        mode,
        x0,
        x_z: nodes[0],
        x_end: nodes[nodes.len() - 1],
    })
}

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub label: String,
    pub interval: (f64, f64),
    /// max |y - T5| over the interval.
    pub delta_t: f64,
    /// max |y - (T1 + P_R)| over the probe range.
    pub delta_cs: f64,
    pub b_u: f64,
    /// Δ_CS restricted to the spline knots.
    pub delta_cs_nodes: f64,
    /// Δ_CS over probes at least [`BOUNDARY_LAYER_KNOTS`] knots from either end.
    pub delta_cs_interior: f64,
    /// max |y - (T1 + P_R)| on [x0, x_z), where P_R is extrapolated.
    pub delta_cs_near: f64,
    /// max |target - spline| for the splined quantity itself.
    pub spline_error: f64,
    /// Abscissa of the largest enhanced-approximant error.
    pub delta_cs_argmax: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsOptions {
    pub probe_points: usize,
    /// Also probe [x0, x_z) when computing Δ_CS.
    pub include_near: bool,
}

impl Default for MetricsOptions {
    fn default() -> Self {
        MetricsOptions {
            probe_points: DEFAULT_PROBE_POINTS,
            include_near: false,
        }
    }
}

fn uniform(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + i as f64 * step })
}

pub fn metrics(
    label: impl Into<String>,
    bundle: &DerivativeBundle,
    enhanced: &EnhancedApproximant,
    t5: &TaylorPolynomial,
    interval: (f64, f64),
    b_u: f64,
    opts: MetricsOptions,
) -> Result<MetricsRow> {
    if opts.probe_points < 2 {
        return Err(Error::InvalidArgument(
            "need at least two probe points".into(),
        ));
    }
    let (lo, hi) = interval;
    let mut delta_t = 0.0_f64;
    for x in uniform(lo, hi, opts.probe_points) {
        delta_t = delta_t.max((bundle.y(x)? - t5.eval(x)).abs());
    }

    let tangent = TangentRemainder::new(bundle, enhanced.x0)?;
    let cs_err = |x: f64| -> Result<f64> { Ok((bundle.y(x)? - enhanced.eval(x)?).abs()) };

    let cs_lo = if opts.include_near {
        enhanced.x0
    } else {
        enhanced.x_z
    };
    let mut delta_cs = 0.0_f64;
    let mut delta_cs_argmax = cs_lo;
    let mut spline_error = 0.0_f64;
    let knots = enhanced.spline.knots();
    let (inner_lo, inner_hi) = if knots.len() > 2 * BOUNDARY_LAYER_KNOTS + 1 {
        (
            knots[BOUNDARY_LAYER_KNOTS],
            knots[knots.len() - 1 - BOUNDARY_LAYER_KNOTS],
        )
    } else {
        (f64::INFINITY, f64::NEG_INFINITY)
    };
    let mut delta_cs_interior = 0.0_f64;
    for x in uniform(cs_lo, enhanced.x_end, opts.probe_points) {
        let e = cs_err(x)?;
        if e > delta_cs {
            delta_cs = e;
            delta_cs_argmax = x;
        }
        if inner_lo <= x && x <= inner_hi {
            delta_cs_interior = delta_cs_interior.max(e);
        }
        if x >= enhanced.x_z {
            let s = enhanced.spline.eval(x)?;
            spline_error =
                spline_error.max((enhanced.spline_target(&tangent, bundle, x)? - s).abs());
        }
    }

    let mut delta_cs_nodes = 0.0_f64;
    for &x in enhanced.spline.knots() {
        delta_cs_nodes = delta_cs_nodes.max(cs_err(x)?);
    }

    let mut delta_cs_near = 0.0_f64;
    if enhanced.x_z > enhanced.x0 {
        for x in uniform(enhanced.x0, enhanced.x_z, 101).take(100) {
            delta_cs_near = delta_cs_near.max(cs_err(x)?);
        }
    }

    Ok(MetricsRow {
        label: label.into(),
        interval,
        delta_t,
        delta_cs,
        b_u,
        delta_cs_nodes,
        delta_cs_interior,
        delta_cs_near,
        spline_error,
        delta_cs_argmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrange::solve_lagrange;

    #[test]
    fn log_taylor_coefficients() {
        let b = DerivativeBundle::from_text("ln(1+x)", 6).unwrap();
        let t5 = taylor_poly(&b, 0.0, 5).unwrap();
        let want = [0.0, 1.0, -0.5, 1.0 / 3.0, -0.25, 0.2];
        for (c, w) in t5.coefficients.iter().zip(want) {
            assert!((c - w).abs() <= 1e-15, "{c} vs {w}");
        }
        assert!((t5.derivative_at_center(5) - 24.0).abs() <= 1e-12 * 24.0);
    }

    #[test]
    fn degree_zero_is_constant() {
        let b = DerivativeBundle::from_text("exp(x/5)*sin(x)", 6).unwrap();
        let t0 = taylor_poly(&b, 1.0, 0).unwrap();
        assert_eq!(t0.eval(1.0), b.y(1.0).unwrap());
        assert_eq!(t0.eval(7.0), b.y(1.0).unwrap());
    }

    #[test]
    fn first_example_tangent_line() {
        let b = DerivativeBundle::from_text("exp(x/5)*sin(x)", 6).unwrap();
        let t1 = taylor_poly(&b, 1.0, 1).unwrap();
        let e = 0.2_f64.exp();
        let c0 = e * 1f64.sin();
        let c1 = e * (1f64.sin() / 5.0 + 1f64.cos());
        assert!((t1.coefficients[0] - c0).abs() <= 1e-15);
        assert!((t1.coefficients[1] - c1).abs() <= 1e-15);
        assert_eq!(t1.eval(1.0), t1.coefficients[0]);
    }

    #[test]
    fn cubic_enhancement_is_exact() {
        let b = DerivativeBundle::from_text("x^3", 6).unwrap();
        let xz = 0.0005;
        let traj = solve_lagrange(&b, 0.0, (xz, xz / 3.0), 9.0, 10_000, "b1").unwrap();
        let t1 = taylor_poly(&b, 0.0, 1).unwrap();
        let enh = build_enhanced(&t1, &traj, &b, CompositionMode::Factored).unwrap();
        for k in 0..=2000 {
            let x = xz + (9.0 - xz) * k as f64 / 2000.0;
            let err = (enh.eval(x).unwrap() - x * x * x).abs();
            assert!(err <= 1e-9 * (x * x * x).max(1.0), "x={x} err={err}");
        }
        let t5 = taylor_poly(&b, 0.0, 5).unwrap();
        let row = metrics(
            "cubic",
            &b,
            &enh,
            &t5,
            (0.0, 9.0),
            0.0,
            MetricsOptions {
                probe_points: 10_001,
                include_near: true,
            },
        )
        .unwrap();
        assert!(row.delta_cs <= 1e-9, "{}", row.delta_cs);
        assert!(row.delta_t <= 1e-9);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!(
            "direct".parse::<CompositionMode>().unwrap(),
            CompositionMode::Direct
        );
        assert!("other".parse::<CompositionMode>().is_err());
    }

    #[test]
    fn remainder_outside_range_is_error() {
        let b = DerivativeBundle::from_text("x^3", 6).unwrap();
        let traj = solve_lagrange(&b, 0.0, (0.5, 0.5 / 3.0), 2.0, 100, "b").unwrap();
        let t1 = taylor_poly(&b, 0.0, 1).unwrap();
        let enh = build_enhanced(&t1, &traj, &b, CompositionMode::Direct).unwrap();
        assert!(enh.remainder(-0.1).is_err());
        assert!(enh.remainder(2.1).is_err());
        assert_eq!(enh.remainder(0.0).unwrap(), 0.0);
    }
}

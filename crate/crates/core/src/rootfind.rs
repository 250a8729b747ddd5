//! Initial values for the Lagrange function.
//!
//! Given a point `x_z` close to `x0`, the seed `xi_z` solves
//!
//! ```text
//! y(x_z) = y(x0) + y'(x0)(x_z - x0) + y''(xi_z)(x_z - x0)^2 / 2
//! ```
//!
//! The equation usually has several solutions; each one starts a separate
//! branch of the Lagrange function. Roots are located by a sign-change scan
//! on a uniform grid followed by bisection.

use crate::bundle::DerivativeBundle;
use crate::error::{Error, Result};
use crate::remainder::actual_remainder;

pub const DEFAULT_XZ_OFFSET: f64 = 0.0005;
pub const DEFAULT_SCAN_POINTS: usize = 20_001;

/// Brackets whose residual slope falls below this are treated as noise.
pub const MIN_RESIDUAL_SLOPE: f64 = 1e-13;

const BISECTION_RTOL: f64 = 1e-14;

/// Roots of the near-`x0` remainder identity.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialValueSeed {
    pub x0: f64,
    pub x_z: f64,
    /// Ascending.
    pub roots: Vec<f64>,
    pub residual_tolerance: f64,
}

/// Residual of the remainder identity at `xi`; zero exactly when `xi`
/// reproduces y(x_z).
pub fn xi_z_residual(bundle: &DerivativeBundle, x0: f64, x_z: f64, xi: f64) -> Result<f64> {
    let d = x_z - x0;
    if d == 0.0 {
        return Ok(0.0);
    }
    Ok(actual_remainder(bundle, x0, x_z)? - 0.5 * bundle.eval(2, xi)? * d * d)
}

/// Finds every sign-change-bracketed root of [`xi_z_residual`] on a uniform
/// grid of `scan_points` points over `[search_lo, search_hi]`.
pub fn find_xi_z(
    bundle: &DerivativeBundle,
    x0: f64,
    x_z: f64,
    search_lo: f64,
    search_hi: f64,
    scan_points: usize,
) -> Result<InitialValueSeed> {
    if x_z == x0 {
        return Err(Error::InvalidArgument("x_z must differ from x0".into()));
    }
    if !(search_lo < search_hi) {
        return Err(Error::InvalidArgument(format!(
            "empty search interval [{search_lo}, {search_hi}]"
        )));
    }
    if scan_points < 100 {
        return Err(Error::InvalidArgument(format!(
            "scan_points must be at least 100, got {scan_points}"
        )));
    }

    let d = x_z - x0;
    let target = actual_remainder(bundle, x0, x_z)?;
    let half_d2 = 0.5 * d * d;
    let residual = |xi: f64| -> Result<f64> { Ok(target - bundle.eval(2, xi)? * half_d2) };

    let step = (search_hi - search_lo) / (scan_points - 1) as f64;
    let grid = |i: usize| {
        if i + 1 == scan_points {
            search_hi
        } else {
            search_lo + i as f64 * step
        }
    };

    let mut roots = Vec::new();
    let mut a = grid(0);
    let mut fa = residual(a)?;
    if fa == 0.0 {
        roots.push(a);
    }
    for i in 1..scan_points {
        let b = grid(i);
        let fb = residual(b)?;
        if fb == 0.0 {
            roots.push(b);
        } else if fa != 0.0 && (fa < 0.0) != (fb < 0.0) {
            let slope = (fb - fa).abs() / (b - a);
            if slope >= MIN_RESIDUAL_SLOPE {
                roots.push(bisect(&residual, a, fa, b)?);
            }
        }
        a = b;
        fa = fb;
    }

    if roots.is_empty() {
        return Err(Error::NoRootFound {
            lo: search_lo,
            hi: search_hi,
        });
    }

    let scale = [bundle.y(x_z)?, bundle.y(x0)?, 1.0]
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(InitialValueSeed {
        x0,
        x_z,
        roots,
        residual_tolerance: 1e-12 * scale,
    })
}

fn bisect(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut fa: f64, mut b: f64) -> Result<f64> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a <= BISECTION_RTOL * m.abs().max(1.0) || m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> DerivativeBundle {
        DerivativeBundle::from_text("x^3", 6).unwrap()
    }

    #[test]
    fn cubic_residual_vanishes_at_one_third() {
        let xz = 0.0005;
        let r = xi_z_residual(&cubic(), 0.0, xz, xz / 3.0).unwrap();
        assert!(r.abs() <= 1e-18, "{r}");
    }

    #[test]
    fn residual_is_zero_when_xz_equals_x0() {
        let b = DerivativeBundle::from_text("exp(x/5)*sin(x)", 6).unwrap();
        assert_eq!(xi_z_residual(&b, 1.0, 1.0, 7.3).unwrap(), 0.0);
    }

    #[test]
    fn first_example_published_root_has_small_residual() {
        let b = DerivativeBundle::from_text("exp(x/5)*sin(x)", 8).unwrap();
        let r = xi_z_residual(&b, 1.0, 1.0005, 1.000167).unwrap();
        assert!(r.abs() <= 1e-12, "{r}");
    }

    #[test]
    fn cubic_has_exactly_one_root() {
        let s = find_xi_z(&cubic(), 0.0, 0.0005, 0.0, 1.0, 20_001).unwrap();
        assert_eq!(s.roots.len(), 1);
        let want = 0.0005 / 3.0;
        assert!((s.roots[0] - want).abs() <= 1e-15, "{}", s.roots[0]);
    }

    #[test]
    fn no_sign_change_is_reported() {
        // y'' of x^3 is 6 xi, positive on [1, 2] while the target is tiny
        let err = find_xi_z(&cubic(), 0.0, 0.0005, 1.0, 2.0, 1000).unwrap_err();
        assert_eq!(err, Error::NoRootFound { lo: 1.0, hi: 2.0 });
    }

    #[test]
    fn argument_checks() {
        let b = cubic();
        assert!(find_xi_z(&b, 0.0, 0.0, 0.0, 1.0, 1000).is_err());
        assert!(find_xi_z(&b, 0.0, 0.1, 1.0, 0.0, 1000).is_err());
        assert!(find_xi_z(&b, 0.0, 0.1, 0.0, 1.0, 99).is_err());
    }
}

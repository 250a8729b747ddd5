//! Analytic oracles that a correct build must reproduce.

use lagrem::{build_natural_spline, find_xi_z, integrate, solve_lagrange, DerivativeBundle};

use crate::runner::BUNDLE_ORDER;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    /// Human-readable acceptance condition.
    pub target: String,
    pub pass: bool,
}

fn check(name: &'static str, value: f64, target: String, pass: bool) -> Check {
    Check {
        name,
        value,
        target,
        pass,
    }
}

fn failed(name: &'static str, err: impl std::fmt::Display) -> Check {
    check(name, f64::NAN, format!("error: {err}"), false)
}

/// Largest |xi(x) - exact(x)| along the trajectory of `function` from x0 = 0.
fn trajectory_error(
    function: &str,
    x_end: f64,
    exact: impl Fn(f64) -> f64,
) -> Result<f64, lagrem::Error> {
    let b = DerivativeBundle::from_text(function, BUNDLE_ORDER)?;
    let x_z = 0.0005;
    let seed = find_xi_z(&b, 0.0, x_z, 0.0, 1.0, 20_001)?;
    let traj = solve_lagrange(&b, 0.0, (x_z, seed.roots[0]), x_end, 10_000, "branch1")?;
    Ok(traj
        .nodes()
        .iter()
        .zip(traj.values())
        .map(|(&x, xi)| (xi - exact(x)).abs())
        .fold(0.0, f64::max))
}

pub fn cubic_oracle() -> Check {
    const TOL: f64 = 1e-10;
    match trajectory_error("x^3", 9.0, |x| x / 3.0) {
        Ok(e) => check("x^3 trajectory vs x/3", e, format!("<= {TOL:e}"), e <= TOL),
        Err(err) => failed("x^3 trajectory vs x/3", err),
    }
}

pub fn exponential_oracle() -> Check {
    const TOL: f64 = 1e-9;
    let exact = |x: f64| (2.0 * (x.exp_m1() - x) / (x * x)).ln();
    match trajectory_error("exp(x)", 5.0, exact) {
        Ok(e) => check(
            "exp(x) trajectory vs closed form",
            e,
            format!("<= {TOL:e}"),
            e <= TOL,
        ),
        Err(err) => failed("exp(x) trajectory vs closed form", err),
    }
}

/// Least-squares slope of log2(error) against log2(n) for y' = y on [0, 1].
/// Step counts are small enough that truncation, not rounding, dominates.
pub fn rk_order_slope() -> Result<f64, lagrem::Error> {
    let ns = [4usize, 8, 16];
    let mut pts = Vec::new();
    for n in ns {
        let sol = integrate(|_, y| Ok(y), 0.0, 1.0, 1.0, n)?;
        pts.push(((n as f64).log2(), (sol.values[n] - 1f64.exp()).abs().log2()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(-sxy / sxx)
}

pub fn order_check() -> Check {
    match rk_order_slope() {
        Ok(s) => check(
            "RK convergence order on y' = y",
            s,
            "7 +- 0.3".into(),
            (s - 7.0).abs() <= 0.3,
        ),
        Err(err) => failed("RK convergence order on y' = y", err),
    }
}

pub fn spline_linear_check() -> Check {
    const TOL: f64 = 1e-13;
    let xs: Vec<f64> = (0..=50)
        .map(|i| i as f64 * 0.2 + 0.01 * (i % 3) as f64)
        .collect();
    let ys: Vec<f64> = xs.iter().map(|x| 0.75 - 0.5 * x).collect();
    match build_natural_spline(&xs, &ys) {
        Ok(s) => {
            let err = (0..=1000)
                .map(|i| xs[0] + (xs[50] - xs[0]) * i as f64 / 1000.0)
                .map(|x| (s.eval(x).unwrap_or(f64::INFINITY) - (0.75 - 0.5 * x)).abs())
                .fold(0.0, f64::max);
            check(
                "natural spline reproduces linear data",
                err,
                format!("<= {TOL:e}"),
                err <= TOL,
            )
        }
        Err(err) => failed("natural spline reproduces linear data", err),
    }
}

pub fn spline_end_check() -> Check {
    const TOL: f64 = 1e-9;
    let xs: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
    let ys: Vec<f64> = xs.iter().map(|x| (3.0 * x).sin() + x * x).collect();
    match build_natural_spline(&xs, &ys) {
        Ok(s) => {
            let (l, r) = s.end_second_derivatives();
            let v = l.abs().max(r.abs());
            check(
                "natural spline end second derivatives",
                v,
                format!("<= {TOL:e}"),
                v <= TOL,
            )
        }
        Err(err) => failed("natural spline end second derivatives", err),
    }
}

/// (xi_z - x0)/(x_z - x0) for the root nearest x0 at a small offset.
pub fn limit_ratio(function: &str, x0: f64, offset: f64) -> Result<f64, lagrem::Error> {
    let b = DerivativeBundle::from_text(function, BUNDLE_ORDER)?;
    let seed = find_xi_z(
        &b,
        x0,
        x0 + offset,
        x0 - 10.0 * offset,
        x0 + 10.0 * offset,
        20_001,
    )?;
    let root = seed
        .roots
        .iter()
        .copied()
        .min_by(|a, c| (a - x0).abs().total_cmp(&(c - x0).abs()));
    Ok((root.unwrap_or(f64::NAN) - x0) / offset)
}

pub fn limit_ratio_check() -> Check {
    let worst = [("exp(x/5)*sin(x)", 1.0), ("ln(1+x)", 0.0)]
        .iter()
        .map(|&(f, x0)| limit_ratio(f, x0, 1e-5).map(|r| (r * 3.0 - 1.0).abs()))
        .collect::<Result<Vec<_>, _>>();
    match worst {
        Ok(devs) => {
            let v = devs.into_iter().fold(0.0, f64::max);
            check(
                "seed ratio -> 1/3 at offset 1e-5",
                v,
                "relative deviation <= 1%".into(),
                v <= 0.01,
            )
        }
        Err(err) => failed("seed ratio -> 1/3 at offset 1e-5", err),
    }
}

pub fn run_all() -> Vec<Check> {
    let checks: [fn() -> Check; 6] = [
        cubic_oracle,
        exponential_oracle,
        order_check,
        spline_linear_check,
        spline_end_check,
        limit_ratio_check,
    ];
    checks.iter().map(|f| f()).collect()
}

pub fn render(checks: &[Check]) -> String {
    checks
        .iter()
        .map(|c| {
            format!(
                "{} {:<40} {:>12.4e}  ({})\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.target
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_checks_pass() {
        for c in [order_check(), spline_linear_check(), spline_end_check()] {
            assert!(c.pass, "{c:?}");
        }
    }
}

//! Workloads shared by the criterion benches.

use lagrem::{
    bound_bu, build_enhanced, build_natural_spline, find_xi_z, metrics, solve_lagrange,
    taylor_poly, CompositionMode, DerivativeBundle, LagrangeTrajectory, MetricsOptions, MetricsRow,
    SplineModel,
};

pub const FUNCTION: &str = "exp(x/5)*sin(x)";
pub const X0: f64 = 1.0;
pub const X_Z: f64 = 1.0005;
pub const X_END: f64 = 10.0;

pub fn bundle() -> DerivativeBundle {
    DerivativeBundle::from_text(FUNCTION, 8).expect("bench function parses")
}

pub fn roots(b: &DerivativeBundle, scan_points: usize) -> Vec<f64> {
    find_xi_z(b, X0, X_Z, X0, X_END, scan_points)
        .expect("roots exist")
        .roots
}

pub fn trajectory(b: &DerivativeBundle, n_steps: usize) -> LagrangeTrajectory {
    let xi_z = roots(b, 2001)[0];
    solve_lagrange(b, X0, (X_Z, xi_z), X_END, n_steps, "branch1").expect("trajectory integrates")
}

pub fn spline(n: usize) -> SplineModel {
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 * 10.0 / n as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
    build_natural_spline(&xs, &ys).expect("valid knots")
}

/// Root search, one branch, spline fit, bound and metrics.
pub fn pipeline(n_steps: usize, probe_points: usize) -> MetricsRow {
    let b = bundle();
    let traj = trajectory(&b, n_steps);
    let t1 = taylor_poly(&b, X0, 1).expect("degree 1");
    let t5 = taylor_poly(&b, X0, 5).expect("degree 5");
    let enh = build_enhanced(&t1, &traj, &b, CompositionMode::Factored).expect("spline fit");
    let bound = bound_bu(&b, (X0, X_END), traj.grid.h, 2001).expect("bound");
    let opts = MetricsOptions {
        probe_points,
        include_near: false,
    };
    metrics(FUNCTION, &b, &enh, &t5, (X0, X_END), bound.b_u, opts).expect("metrics")
}

#[cfg(test)]
mod tests {
    #[test]
    fn small_pipeline_runs() {
        let row = super::pipeline(200, 2001);
        assert!(row.delta_t > 500.0 && row.delta_t < 700.0);
    }
}

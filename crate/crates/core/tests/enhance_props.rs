use lagrem::{
    build_enhanced, find_xi_z, metrics, solve_lagrange, splice, taylor_poly, CompositionMode,
    DerivativeBundle, EnhancedApproximant, LagrangeTrajectory, MetricsOptions, MetricsRow,
};

struct Case {
    bundle: DerivativeBundle,
    x0: f64,
    interval: (f64, f64),
    traj: LagrangeTrajectory,
}

fn first_example() -> Case {
    let bundle = DerivativeBundle::from_text("exp(x/5)*sin(x)", 8).unwrap();
    let (x0, x_z) = (1.0, 1.0005);
    let seed = find_xi_z(&bundle, x0, x_z, 1.0, 10.0, 20_001).unwrap();
    let branches: Vec<_> = seed.roots[..2]
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            solve_lagrange(
                &bundle,
                x0,
                (x_z, r),
                10.0,
                10_000,
                format!("branch{}", k + 1),
            )
            .unwrap()
        })
        .collect();
    let traj = splice(&branches, &[4.0]).unwrap();
    Case {
        bundle,
        x0,
        interval: (1.0, 10.0),
        traj,
    }
}

fn second_example() -> Case {
    let bundle = DerivativeBundle::from_text("ln(1+x)", 8).unwrap();
    let seed = find_xi_z(&bundle, 0.0, 0.0005, 0.0, 10.0, 20_001).unwrap();
    let traj = solve_lagrange(
        &bundle,
        0.0,
        (0.0005, seed.roots[0]),
        10.0,
        10_000,
        "branch1",
    )
    .unwrap();
    Case {
        bundle,
        x0: 0.0,
        interval: (0.0, 10.0),
        traj,
    }
}

fn enhance(case: &Case, mode: CompositionMode) -> EnhancedApproximant {
    let t1 = taylor_poly(&case.bundle, case.x0, 1).unwrap();
    build_enhanced(&t1, &case.traj, &case.bundle, mode).unwrap()
}

fn row(case: &Case, mode: CompositionMode) -> MetricsRow {
    let t5 = taylor_poly(&case.bundle, case.x0, 5).unwrap();
    let opts = MetricsOptions {
        probe_points: 20_001,
        include_near: false,
    };
    metrics(
        "case",
        &case.bundle,
        &enhance(case, mode),
        &t5,
        case.interval,
        0.0,
        opts,
    )
    .unwrap()
}

#[test]
fn composition_modes_agree_within_a_factor_of_ten() {
    for case in [first_example(), second_example()] {
        let f = row(&case, CompositionMode::Factored).delta_cs;
        let d = row(&case, CompositionMode::Direct).delta_cs;
        assert!(f.max(d) <= 10.0 * f.min(d), "factored {f:e} direct {d:e}");
    }
}

#[test]
fn spliced_trajectory_respects_the_mean_value_bounds() {
    let case = first_example();
    assert!(case.traj.all_within_bounds());
}

#[test]
fn factored_enhancement_is_quintic_on_each_interval() {
    for case in [first_example(), second_example()] {
        let enh = enhance(&case, CompositionMode::Factored);
        let knots = enh.spline.knots();
        for k in [0, 17, knots.len() / 2, knots.len() - 2] {
            let (a, b) = (knots[k], knots[k + 1]);
            let xs: Vec<f64> = (0..7)
                .map(|i| a + (b - a) * (0.05 + 0.9 * i as f64 / 6.0))
                .collect();
            // P_R is enhanced minus T1 by construction
            let vals: Vec<f64> = xs.iter().map(|&x| enh.remainder(x).unwrap()).collect();
            let binom = [1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0];
            let diff: f64 = binom.iter().zip(&vals).map(|(c, v)| c * v).sum();
            let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(
                diff.abs() <= 1e-9 * scale,
                "interval {k}: {diff:e} vs scale {scale:e}"
            );
        }
    }
}

#[test]
fn taylor_error_is_large_outside_the_log_convergence_radius() {
    let case = second_example();
    let t5 = taylor_poly(&case.bundle, 0.0, 5).unwrap();
    let at = |x: f64| (case.bundle.y(x).unwrap() - t5.eval(x)).abs();
    assert!(at(10.0) > 1.7e4 && at(10.0) < 1.9e4);
    assert!(at(2.0) < at(5.0) && at(5.0) < at(10.0));
    let r = row(&case, CompositionMode::Factored);
    assert_eq!(r.delta_t, at(10.0));
}

#[test]
fn spline_nodes_reproduce_the_function() {
    for case in [first_example(), second_example()] {
        let r = row(&case, CompositionMode::Factored);
        assert!(r.delta_cs_nodes <= 1e-11, "{:e}", r.delta_cs_nodes);
        assert!(r.delta_cs_interior <= 1e-11, "{:e}", r.delta_cs_interior);
    }
}

#[test]
fn direct_mode_vanishes_at_the_centre() {
    let case = second_example();
    let enh = enhance(&case, CompositionMode::Direct);
    assert_eq!(enh.remainder(0.0).unwrap(), 0.0);
    let enh = enhance(&case, CompositionMode::Factored);
    assert_eq!(enh.remainder(0.0).unwrap(), 0.0);
}

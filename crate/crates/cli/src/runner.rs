//! End-to-end experiment: parse, differentiate, seed, integrate, splice,
//! spline, enhance, measure, write artifacts.

use std::path::Path;
use std::time::{Duration, Instant};

use lagrem::{
    auto_switch_points, bound_bu, build_enhanced, find_xi_z, metrics, remainder_samples,
    solve_lagrange, splice, taylor_poly, BoundReport, DerivativeBundle, EnhancedApproximant,
    LagrangeTrajectory, MetricsOptions, MetricsRow, RemainderSamples,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, SwitchPoints};
use crate::error::AppError;
use crate::output::{write_atomic, Csv};
use crate::svg::{LinePlot, Series};

/// Derivative order kept in the bundle; the near-x0 remainder uses the
/// Taylor tail up to this order.
pub const BUNDLE_ORDER: usize = 8;
/// Points on which the function and its derivatives are checked up front.
pub const DOMAIN_SAMPLES: usize = 1001;
/// Probe grid for max |y⁽⁶⁾| in the spline error bound.
pub const BOUND_PROBE_POINTS: usize = 20_001;

pub const REPORT_FILE: &str = "report.json";

/// One integrated trajectory with its remainder samples.
#[derive(Debug, Clone)]
pub struct Branch {
    pub traj: LagrangeTrajectory,
    pub samples: RemainderSamples,
}

impl Branch {
    fn new(
        traj: LagrangeTrajectory,
        bundle: &DerivativeBundle,
        x0: f64,
        stage: &str,
    ) -> Result<Self, AppError> {
        let samples = remainder_samples(&traj, bundle, x0).map_err(AppError::numerical(stage))?;
        Ok(Branch { traj, samples })
    }

    pub fn violations(&self) -> usize {
        self.traj.flags.iter().filter(|ok| !**ok).count()
    }

    /// Trajectory table with columns x, xi, r_xi, r_act, delta_r, constraint_ok.
    pub fn csv(&self) -> Csv {
        let mut csv = Csv::new(["x", "xi", "r_xi", "r_act", "delta_r", "constraint_ok"]);
        let s = &self.samples;
        for i in 0..s.nodes.len() {
            let mut row: Vec<String> = [
                s.nodes[i],
                self.traj.values()[i],
                s.r_xi[i],
                s.r_act[i],
                s.delta_r[i],
            ]
            .iter()
            .map(|&v| crate::output::fmt17(v))
            .collect();
            row.push(self.traj.flags[i].to_string());
            csv.push(row);
        }
        csv
    }
}

#[derive(Debug, Clone)]
pub struct Spliced {
    /// 1-based branch numbers in splice order.
    pub branches: Vec<usize>,
    pub switch_points: Vec<f64>,
    pub branch: Branch,
}

/// In-memory result of an experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub bundle: DerivativeBundle,
    pub roots: Vec<f64>,
    pub branches: Vec<Branch>,
    pub spliced: Option<Spliced>,
    pub enhanced: EnhancedApproximant,
    pub bound: BoundReport,
    pub metrics: MetricsRow,
    pub warnings: Vec<String>,
}

impl Experiment {
    /// The trajectory the spline was fitted to.
    pub fn enhanced_branch(&self) -> &Branch {
        self.spliced
            .as_ref()
            .map_or(&self.branches[0], |s| &s.branch)
    }
}

pub fn compute(config: &ExperimentConfig) -> Result<Experiment, AppError> {
    config.validate()?;
    let (x0, x_z, hi) = (config.x0, config.x_z(), config.hi);

    let function = lagrem::parse(&config.function)
        .map_err(|e| AppError::Config(format!("`function`: {e}")))?;
    let bundle = DerivativeBundle::new(function, BUNDLE_ORDER)
        .and_then(|b| b.with_domain(config.lo, hi, DOMAIN_SAMPLES))
        .map_err(AppError::numerical("derivatives"))?;

    let roots = match &config.seeds {
        Some(seeds) => seeds.clone(),
        None => {
            find_xi_z(
                &bundle,
                x0,
                x_z,
                config.search_lo,
                config.search_hi,
                config.scan_points,
            )
            .map_err(AppError::numerical("root search"))?
            .roots
        }
    };

    let branches = roots
        .par_iter()
        .enumerate()
        .map(|(k, &xi_z)| {
            let label = format!("branch{}", k + 1);
            let traj = solve_lagrange(&bundle, x0, (x_z, xi_z), hi, config.n_steps, label.clone())
                .map_err(AppError::numerical(format!("integration of {label}")))?;
            Branch::new(traj, &bundle, x0, &format!("remainder of {label}"))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut warnings = vec![format!("x_z taken as x0 + xz_offset = {x_z}")];
    for b in &branches {
        let bad = b.violations();
        if bad > 0 {
            let crossings: Vec<String> = b
                .traj
                .crossings
                .iter()
                .map(|c| {
                    format!(
                        "{} at x = {:.6}",
                        if c.entering { "enters" } else { "leaves" },
                        c.x
                    )
                })
                .collect();
            warnings.push(format!(
                "{}: x0 < xi < x violated at {bad} of {} nodes; {}",
                b.traj.label,
                b.traj.grid.len(),
                if crossings.is_empty() {
                    "never satisfied".to_string()
                } else {
                    crossings.join(", ")
                }
            ));
        }
    }

    let spliced = splice_branches(config, &branches, &bundle)?;
    if spliced.is_none() && branches.len() > 1 {
        warnings.push(format!(
            "{} branches found and no switch points given; enhancing branch1",
            branches.len()
        ));
    }
    if let Some(s) = &spliced {
        let unused = branches.len() - s.branches.len();
        if unused > 0 {
            warnings.push(format!("{unused} branch(es) integrated but not spliced"));
        }
    }

    let chosen = spliced.as_ref().map_or(&branches[0], |s| &s.branch);
    if !chosen.traj.all_within_bounds() {
        warnings.push(format!(
            "enhanced trajectory {} violates x0 < xi < x",
            chosen.traj.label
        ));
    }

    let t1 = taylor_poly(&bundle, x0, 1).map_err(AppError::numerical("taylor polynomial"))?;
    let t5 = taylor_poly(&bundle, x0, 5).map_err(AppError::numerical("taylor polynomial"))?;
    let enhanced = build_enhanced(&t1, &chosen.traj, &bundle, config.mode)
        .map_err(AppError::numerical("spline fit"))?;
    let bound = bound_bu(
        &bundle,
        (config.lo, hi),
        chosen.traj.grid.h,
        BOUND_PROBE_POINTS,
    )
    .map_err(AppError::numerical("error bound"))?;
    let opts = MetricsOptions {
        probe_points: config.probe_points,
        include_near: config.include_near,
    };
    let metrics = metrics(
        config.function.clone(),
        &bundle,
        &enhanced,
        &t5,
        (config.lo, hi),
        bound.b_u,
        opts,
    )
    .map_err(AppError::numerical("metrics"))?;

    Ok(Experiment {
        config: config.clone(),
        bundle,
        roots,
        branches,
        spliced,
        enhanced,
        bound,
        metrics,
        warnings,
    })
}

fn splice_branches(
    config: &ExperimentConfig,
    branches: &[Branch],
    bundle: &DerivativeBundle,
) -> Result<Option<Spliced>, AppError> {
    let picks: Vec<usize> = match (&config.switch_points, &config.splice_branches) {
        (SwitchPoints::None, _) => return Ok(None),
        (_, Some(list)) => list.clone(),
        (SwitchPoints::At(points), None) => (1..=points.len() + 1).collect(),
        (SwitchPoints::Auto, None) => (1..=branches.len()).collect(),
    };
    if let Some(&missing) = picks.iter().find(|&&k| k > branches.len()) {
        return Err(AppError::Config(format!(
            "splice branch {missing} requested but only {} found",
            branches.len()
        )));
    }
    if picks.len() < 2 {
        return Err(AppError::Config(format!(
            "splicing needs at least two branches, {} found",
            branches.len()
        )));
    }
    let trajs: Vec<LagrangeTrajectory> = picks
        .iter()
        .map(|&k| branches[k - 1].traj.clone())
        .collect();
    let switch_points = match &config.switch_points {
        SwitchPoints::At(points) => points.clone(),
        _ => auto_switch_points(&trajs).map_err(AppError::numerical("switch point selection"))?,
    };
    let traj = splice(&trajs, &switch_points).map_err(AppError::numerical("splice"))?;
    let branch = Branch::new(traj, bundle, config.x0, "remainder of spliced trajectory")?;
    Ok(Some(Spliced {
        branches: picks,
        switch_points,
        branch,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub x: f64,
    pub entering: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    pub label: String,
    pub xi_z: f64,
    pub max_abs_delta_r: f64,
    pub constraint_violations: usize,
    pub all_within_bounds: bool,
    pub crossings: Vec<CrossingReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplicedReport {
    pub label: String,
    pub branches: Vec<usize>,
    pub switch_points: Vec<f64>,
    pub max_abs_delta_r: f64,
    pub all_within_bounds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mode: String,
    pub lo: f64,
    pub hi: f64,
    pub probe_points: usize,
    pub delta_t: f64,
    pub delta_cs: f64,
    pub b_u: f64,
    pub delta_cs_argmax: f64,
    pub delta_cs_nodes: f64,
    pub delta_cs_interior: f64,
    pub delta_cs_near: f64,
    pub spline_error: f64,
    pub h: f64,
    pub max_abs_y6: f64,
    pub max_abs_y6_at: f64,
}

/// Run facts that legitimately differ between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub duration_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub x_z: f64,
    pub roots: Vec<f64>,
    pub branches: Vec<BranchReport>,
    pub spliced: Option<SplicedReport>,
    pub metrics: MetricsReport,
    pub warnings: Vec<String>,
    pub files: Vec<String>,
    pub metadata: Metadata,
}

impl ExperimentReport {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

impl Experiment {
    pub fn report(&self, files: Vec<String>, duration: Duration) -> ExperimentReport {
        let m = &self.metrics;
        ExperimentReport {
            config: self.config.clone(),
            x_z: self.config.x_z(),
            roots: self.roots.clone(),
            branches: self
                .branches
                .iter()
                .map(|b| BranchReport {
                    label: b.traj.label.clone(),
                    xi_z: b.traj.xi_z,
                    max_abs_delta_r: b.samples.max_abs_delta_r,
                    constraint_violations: b.violations(),
                    all_within_bounds: b.traj.all_within_bounds(),
                    crossings: b
                        .traj
                        .crossings
                        .iter()
                        .map(|c| CrossingReport {
                            x: c.x,
                            entering: c.entering,
                        })
                        .collect(),
                })
                .collect(),
            spliced: self.spliced.as_ref().map(|s| SplicedReport {
                label: s.branch.traj.label.clone(),
                branches: s.branches.clone(),
                switch_points: s.switch_points.clone(),
                max_abs_delta_r: s.branch.samples.max_abs_delta_r,
                all_within_bounds: s.branch.traj.all_within_bounds(),
            }),
            metrics: MetricsReport {
                mode: self.enhanced.mode.as_str().to_string(),
                lo: m.interval.0,
                hi: m.interval.1,
                probe_points: self.config.probe_points,
                delta_t: m.delta_t,
                delta_cs: m.delta_cs,
                b_u: m.b_u,
                delta_cs_argmax: m.delta_cs_argmax,
                delta_cs_nodes: m.delta_cs_nodes,
                delta_cs_interior: m.delta_cs_interior,
                delta_cs_near: m.delta_cs_near,
                spline_error: m.spline_error,
                h: self.bound.h,
                max_abs_y6: self.bound.max_y6,
                max_abs_y6_at: self.bound.argmax,
            },
            warnings: self.warnings.clone(),
            files,
            metadata: Metadata {
                version: env!("CARGO_PKG_VERSION").to_string(),
                duration_seconds: duration.as_secs_f64(),
            },
        }
    }

    fn xi_plot(&self) -> LinePlot {
        let x0 = self.config.x0;
        let nodes = &self.branches[0].samples.nodes;
        let mut series: Vec<Series> = self
            .branches
            .iter()
            .map(|b| Series {
                name: format!("xi {}", b.traj.label),
                points: nodes
                    .iter()
                    .copied()
                    .zip(b.traj.values().iter().copied())
                    .collect(),
                dashed: false,
            })
            .collect();
        series.push(Series {
            name: "x0".into(),
            points: vec![(nodes[0], x0), (*nodes.last().unwrap(), x0)],
            dashed: true,
        });
        series.push(Series {
            name: "y = x".into(),
            points: vec![
                (nodes[0], nodes[0]),
                (*nodes.last().unwrap(), *nodes.last().unwrap()),
            ],
            dashed: true,
        });
        LinePlot {
            title: format!("Lagrange function of {}", self.config.function),
            x_label: "x".into(),
            y_label: "xi".into(),
            series,
        }
    }

    fn delta_r_plot(&self) -> LinePlot {
        let series = self
            .branches
            .iter()
            .map(|b| Series {
                name: format!("delta R {}", b.traj.label),
                points: b
                    .samples
                    .nodes
                    .iter()
                    .copied()
                    .zip(b.samples.delta_r.iter().copied())
                    .collect(),
                dashed: false,
            })
            .collect();
        LinePlot {
            title: "R_act - R_xi".into(),
            x_label: "x".into(),
            y_label: "delta R".into(),
            series,
        }
    }

    /// Writes trajectory tables, plots and the report into `dir`.
    pub fn write_artifacts(
        &self,
        dir: &Path,
        duration: Duration,
    ) -> Result<ExperimentReport, AppError> {
        let mut outputs: Vec<(String, Vec<u8>)> = Vec::new();
        for b in &self.branches {
            outputs.push((
                format!("trajectory_{}.csv", b.traj.label),
                b.csv().render().into_bytes(),
            ));
        }
        if let Some(s) = &self.spliced {
            outputs.push((
                "trajectory_spliced.csv".into(),
                s.branch.csv().render().into_bytes(),
            ));
        }
        outputs.push(("plot_xi.svg".into(), self.xi_plot().render().into_bytes()));
        outputs.push((
            "plot_delta_r.svg".into(),
            self.delta_r_plot().render().into_bytes(),
        ));
        outputs
            .par_iter()
            .try_for_each(|(name, bytes)| write_atomic(&dir.join(name), bytes))?;

        let mut files: Vec<String> = outputs.into_iter().map(|(name, _)| name).collect();
        files.push(REPORT_FILE.into());
        let report = self.report(files, duration);
        write_atomic(&dir.join(REPORT_FILE), report.to_json().as_bytes())?;
        Ok(report)
    }
}

/// Computes the experiment and writes its artifacts to `config.output_dir`.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport, AppError> {
    let start = Instant::now();
    let exp = compute(config)?;
    exp.write_artifacts(&config.output_dir, start.elapsed())
}

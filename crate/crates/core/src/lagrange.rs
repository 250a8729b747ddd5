//! The Lagrange function ξ(x) of the first-order Taylor remainder.
//!
//! Differentiating `y(x) - T1(x) = y''(ξ)(x - x0)^2 / 2` gives
//!
//! ```text
//! dξ/dx = 2 (y'(x) - y'(x0) - y''(ξ)(x - x0)) / (y'''(ξ)(x - x0)^2)
//! ```
//!
//! which is singular at `x = x0`, so integration starts from a seed at a
//! nearby `x_z` (see [`crate::rootfind`]).

use crate::bundle::DerivativeBundle;
use crate::error::{Error, Result};
use crate::remainder::{lagrange_remainder, TangentRemainder};
use crate::rk::{integrate, GridSolution};

/// Below this |y'''(ξ)| the right-hand side is declared singular.
pub const MIN_THIRD_DERIVATIVE: f64 = 1e-300;

/// Right-hand side of the Lagrange-function ODE for a fixed `x0`.
#[derive(Debug, Clone, Copy)]
pub struct LagrangeRhs<'a> {
    bundle: &'a DerivativeBundle,
    x0: f64,
    dy_x0: f64,
}

impl<'a> LagrangeRhs<'a> {
    pub fn new(bundle: &'a DerivativeBundle, x0: f64) -> Result<Self> {
        if bundle.max_order() < 3 {
            return Err(Error::InvalidArgument(
                "bundle needs derivatives through order 3".into(),
            ));
        }
        Ok(LagrangeRhs {
            bundle,
            x0,
            dy_x0: bundle.eval(1, x0)?,
        })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn eval(&self, x: f64, xi: f64) -> Result<f64> {
        let t = x - self.x0;
        if t == 0.0 {
            return Err(Error::Singularity {
                x,
                xi,
                reason: "x equals x0",
            });
        }
        let y3 = self.bundle.eval(3, xi)?;
        if y3.abs() < MIN_THIRD_DERIVATIVE {
            return Err(Error::Singularity {
                x,
                xi,
                reason: "y''' vanishes at xi",
            });
        }
        let num = 2.0 * (self.bundle.eval(1, x)? - self.dy_x0 - self.bundle.eval(2, xi)? * t);
        Ok(num / (y3 * t * t))
    }
}

pub fn make_rhs(bundle: &DerivativeBundle, x0: f64) -> Result<LagrangeRhs<'_>> {
    LagrangeRhs::new(bundle, x0)
}

/// Where a constraint flag changes between two adjacent nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub x: f64,
    /// Flag value on the right of the crossing.
    pub entering: bool,
}

/// One branch of the Lagrange function.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangeTrajectory {
    pub x0: f64,
    pub x_z: f64,
    pub xi_z: f64,
    pub label: String,
    pub grid: GridSolution,
    /// `flags[i]` is true when x0 < ξ(xᵢ) < xᵢ.
    pub flags: Vec<bool>,
    pub crossings: Vec<Crossing>,
}

impl LagrangeTrajectory {
    /// Builds a trajectory from an existing grid, computing constraint
    /// flags and crossings.
    pub fn from_grid(x0: f64, label: impl Into<String>, grid: GridSolution) -> Self {
        let flags = constraint_flags(x0, &grid.nodes, &grid.values);
        let crossings = locate_crossings(x0, &grid.nodes, &grid.values, &flags);
        LagrangeTrajectory {
            x0,
            x_z: grid.nodes[0],
            xi_z: grid.values[0],
            label: label.into(),
            grid,
            flags,
            crossings,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.grid.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.grid.values
    }

    pub fn all_within_bounds(&self) -> bool {
        self.flags.iter().all(|f| *f)
    }
}

pub fn constraint_flags(x0: f64, nodes: &[f64], values: &[f64]) -> Vec<bool> {
    nodes
        .iter()
        .zip(values)
        .map(|(&x, &xi)| x0 < xi && xi < x)
        .collect()
}

fn locate_crossings(x0: f64, nodes: &[f64], values: &[f64], flags: &[bool]) -> Vec<Crossing> {
    let mut out = Vec::new();
    for i in 1..flags.len() {
        if flags[i] == flags[i - 1] {
            continue;
        }
        // Interpolate the zero of whichever bound gap changed sign.
        let lower = |j: usize| values[j] - x0;
        let upper = |j: usize| nodes[j] - values[j];
        let (g0, g1) = if (lower(i - 1) > 0.0) != (lower(i) > 0.0) {
            (lower(i - 1), lower(i))
        } else {
            (upper(i - 1), upper(i))
        };
        let t = if g1 != g0 { g0 / (g0 - g1) } else { 0.5 };
        let x = nodes[i - 1] + t.clamp(0.0, 1.0) * (nodes[i] - nodes[i - 1]);
        out.push(Crossing {
            x,
            entering: flags[i],
        });
    }
    out
}

/// Integrates the Lagrange-function ODE from the seed `(x_z, xi_z)` to
/// `x_end` in `n_steps` uniform steps.
pub fn solve_lagrange(
    bundle: &DerivativeBundle,
    x0: f64,
    seed: (f64, f64),
    x_end: f64,
    n_steps: usize,
    label: impl Into<String>,
) -> Result<LagrangeTrajectory> {
    let (x_z, xi_z) = seed;
    if !(x0 < x_z && x_z < x_end) {
        return Err(Error::InvalidArgument(format!(
            "need x0 < x_z < x_end, got {x0}, {x_z}, {x_end}"
        )));
    }
    let rhs = make_rhs(bundle, x0)?;
    let grid = integrate(|x, xi| rhs.eval(x, xi), x_z, xi_z, x_end, n_steps)?;
    Ok(LagrangeTrajectory::from_grid(x0, label, grid))
}

/// Remainders along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct RemainderSamples {
    pub nodes: Vec<f64>,
    pub r_xi: Vec<f64>,
    pub r_act: Vec<f64>,
    pub delta_r: Vec<f64>,
    pub max_abs_delta_r: f64,
}

pub fn remainder_samples(
    traj: &LagrangeTrajectory,
    bundle: &DerivativeBundle,
    x0: f64,
) -> Result<RemainderSamples> {
    let n = traj.grid.len();
    let tangent = TangentRemainder::new(bundle, x0)?;
    let mut r_xi = Vec::with_capacity(n);
    let mut r_act = Vec::with_capacity(n);
    let mut delta_r = Vec::with_capacity(n);
    for (&x, &xi) in traj.nodes().iter().zip(traj.values()) {
        let rx = lagrange_remainder(bundle, x0, x, xi)?;
        let ra = tangent.actual(bundle, x)?;
        r_xi.push(rx);
        r_act.push(ra);
        delta_r.push(ra - rx);
    }
    let max_abs_delta_r = delta_r.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    Ok(RemainderSamples {
        nodes: traj.nodes().to_vec(),
        r_xi,
        r_act,
        delta_r,
        max_abs_delta_r,
    })
}

/// Composes trajectories segment by segment. Segment 0 takes nodes with
/// `x <= switch_points[0]`, segment k nodes in `(switch_points[k-1],
/// switch_points[k]]`, and the last segment everything after the last
/// switch point.
pub fn splice(
    trajectories: &[LagrangeTrajectory],
    switch_points: &[f64],
) -> Result<LagrangeTrajectory> {
    let Some(first) = trajectories.first() else {
        return Err(Error::InvalidArgument("nothing to splice".into()));
    };
    if switch_points.len() + 1 != trajectories.len() {
        return Err(Error::SegmentUncovered {
            segment: switch_points.len().min(trajectories.len()),
        });
    }
    if trajectories.len() == 1 {
        return Ok(first.clone());
    }
    for t in &trajectories[1..] {
        if t.grid.nodes != first.grid.nodes || t.x0 != first.x0 {
            return Err(Error::MismatchedGrid);
        }
    }
    if switch_points.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument(
            "switch points must be strictly increasing".into(),
        ));
    }

    let nodes = &first.grid.nodes;
    let mut values = Vec::with_capacity(nodes.len());
    let mut segment = 0;
    let mut counts = vec![0usize; trajectories.len()];
    for (i, &x) in nodes.iter().enumerate() {
        while segment < switch_points.len() && x > switch_points[segment] {
            segment += 1;
        }
        counts[segment] += 1;
        values.push(trajectories[segment].grid.values[i]);
    }
    if let Some(empty) = counts.iter().position(|&c| c == 0) {
        return Err(Error::SegmentUncovered { segment: empty });
    }

    let label = trajectories
        .iter()
        .map(|t| t.label.as_str())
        .collect::<Vec<_>>()
        .join("+");
    let grid = GridSolution {
        nodes: nodes.clone(),
        values,
        h: first.grid.h,
    };
    Ok(LagrangeTrajectory::from_grid(first.x0, label, grid))
}

/// Picks switch points so that each trajectory only contributes nodes where
/// it satisfies x0 < ξ < x. Trajectories are used in the given order and
/// each switch sits in the middle of the feasible overlap.
pub fn auto_switch_points(trajectories: &[LagrangeTrajectory]) -> Result<Vec<f64>> {
    let Some(first) = trajectories.first() else {
        return Err(Error::InvalidArgument("no trajectories".into()));
    };
    for t in &trajectories[1..] {
        if t.grid.nodes != first.grid.nodes {
            return Err(Error::MismatchedGrid);
        }
    }
    let nodes = &first.grid.nodes;
    let n = nodes.len();
    let mut start = 0;
    let mut switches = Vec::new();
    for pair in trajectories.windows(2) {
        let (cur, next) = (&pair[0].flags, &pair[1].flags);
        // current branch is usable on [start, run_end)
        let run_end = (start..n).find(|&i| !cur[i]).unwrap_or(n);
        if run_end == start {
            return Err(Error::NoFeasibleSwitch);
        }
        // next branch must hold from the switch onwards until run_end
        let last_bad = (start..run_end).rev().find(|&i| !next[i]);
        let lo = last_bad.unwrap_or(start);
        let hi = run_end - 1;
        if lo > hi || lo + 1 >= n {
            return Err(Error::NoFeasibleSwitch);
        }
        let mid = lo + (hi - lo) / 2;
        switches.push(nodes[mid]);
        start = mid + 1;
    }
    let last = &trajectories[trajectories.len() - 1].flags;
    if last[start.min(n)..].iter().any(|f| !f) {
        return Err(Error::NoFeasibleSwitch);
    }
    Ok(switches)
}

//! Table 1: Taylor versus spline-enhanced errors for the bundled examples.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::{ExperimentConfig, Overrides};
use crate::error::AppError;
use crate::output::{fmt17, Csv};
use crate::runner::{compute, Experiment};

/// Reference values a row is compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub config: &'static str,
    pub delta_t: f64,
    pub delta_cs: f64,
    pub b_u: f64,
}

pub const REFERENCE: [Reference; 2] = [
    Reference {
        config: "example1.cfg",
        delta_t: 5.8e2,
        delta_cs: 5.4e-13,
        b_u: 5.1e-10,
    },
    Reference {
        config: "example2.cfg",
        delta_t: 1.8e4,
        delta_cs: 1.4e-13,
        b_u: 8.6e-9,
    },
];

/// Relative half-width of the accepted Δ_T band.
pub const DELTA_T_BAND: f64 = 0.10;
pub const DELTA_CS_MAX: f64 = 1e-10;
pub const IMPROVEMENT_MAX: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub function: String,
    pub interval: (f64, f64),
    pub delta_t: f64,
    pub delta_cs: f64,
    pub b_u: f64,
    pub delta_cs_nodes: f64,
    pub spline_error: f64,
    pub reference: Reference,
    pub delta_t_ok: bool,
    pub delta_cs_ok: bool,
    pub b_u_ok: bool,
    /// Measured spline error within B_U.
    pub bound_holds: bool,
}

/// Same value when both are rounded to `digits` significant figures.
pub fn same_sig_figs(a: f64, b: f64, digits: usize) -> bool {
    let p = digits.saturating_sub(1);
    format!("{a:.p$e}") == format!("{b:.p$e}")
}

impl Row {
    pub fn new(exp: &Experiment, reference: Reference) -> Row {
        let m = &exp.metrics;
        let band =
            |r: f64| (1.0 - DELTA_T_BAND) * r <= m.delta_t && m.delta_t <= (1.0 + DELTA_T_BAND) * r;
        Row {
            function: exp.config.function.clone(),
            interval: m.interval,
            delta_t: m.delta_t,
            delta_cs: m.delta_cs,
            b_u: m.b_u,
            delta_cs_nodes: m.delta_cs_nodes,
            spline_error: m.spline_error,
            reference,
            delta_t_ok: band(reference.delta_t),
            delta_cs_ok: m.delta_cs <= DELTA_CS_MAX && m.delta_cs / m.delta_t <= IMPROVEMENT_MAX,
            b_u_ok: same_sig_figs(m.b_u, reference.b_u, 2),
            bound_holds: m.spline_error <= m.b_u,
        }
    }
}

pub fn table1_rows(overrides: &Overrides) -> Result<Vec<Row>, AppError> {
    let configs = REFERENCE
        .iter()
        .map(|r| ExperimentConfig::bundled(r.config)?.with_overrides(overrides))
        .collect::<Result<Vec<_>, _>>()?;
    let (a, b) = rayon::join(|| compute(&configs[0]), || compute(&configs[1]));
    Ok(vec![
        Row::new(&a?, REFERENCE[0]),
        Row::new(&b?, REFERENCE[1]),
    ])
}

pub fn csv(rows: &[Row]) -> Csv {
    let mut csv = Csv::new([
        "function",
        "lo",
        "hi",
        "delta_t",
        "delta_cs",
        "b_u",
        "reference_delta_t",
        "reference_delta_cs",
        "reference_b_u",
        "delta_t_ok",
        "delta_cs_ok",
        "b_u_ok",
        "bound_holds",
        "delta_cs_nodes",
        "spline_error",
    ]);
    for r in rows {
        let mut cells = vec![r.function.clone()];
        cells.extend(
            [r.interval.0, r.interval.1, r.delta_t, r.delta_cs, r.b_u]
                .into_iter()
                .chain([r.reference.delta_t, r.reference.delta_cs, r.reference.b_u])
                .map(fmt17),
        );
        cells.extend([r.delta_t_ok, r.delta_cs_ok, r.b_u_ok, r.bound_holds].map(|b| b.to_string()));
        cells.extend([r.delta_cs_nodes, r.spline_error].map(fmt17));
        csv.push(cells);
    }
    csv
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn render(rows: &[Row]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<18} {:<9} {:>9} {:>9} {:>4}  {:>9} {:>9} {:>4}  {:>9} {:>9} {:>4}  {:>9} {:>4}",
        "function", "I", "dT", "ref", "", "dCS", "ref", "", "B_U", "ref", "", "spl.err", "<=B_U"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<18} [{:>2},{:>2}]   {:>9.2e} {:>9.1e} {:>4}  {:>9.2e} {:>9.1e} {:>4}  {:>9.2e} {:>9.1e} {:>4}  {:>9.2e} {:>4}",
            r.function,
            r.interval.0,
            r.interval.1,
            r.delta_t,
            r.reference.delta_t,
            mark(r.delta_t_ok),
            r.delta_cs,
            r.reference.delta_cs,
            mark(r.delta_cs_ok),
            r.b_u,
            r.reference.b_u,
            mark(r.b_u_ok),
            r.spline_error,
            mark(r.bound_holds),
        );
    }
    out
}

/// Computes both rows, writes `table1.csv` into `dir`, returns the rows.
pub fn table1(overrides: &Overrides, dir: &Path) -> Result<Vec<Row>, AppError> {
    let rows = table1_rows(overrides)?;
    csv(&rows).write(&dir.join("table1.csv"))?;
    Ok(rows)
}

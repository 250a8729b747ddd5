//! Data and plots for the six figures of the two bundled examples.
//!
//! Figures 1 to 3 show example 1 (two branches), figures 4 to 6 example 2:
//! the Lagrange function with the bounds x0 and y = x, the remainders
//! R_xi and R_act, and their difference.

use std::path::{Path, PathBuf};

use crate::config::{ExperimentConfig, Overrides};
use crate::error::AppError;
use crate::output::Csv;
use crate::runner::{compute, Experiment};
use crate::svg::{LinePlot, Series};

/// Columns of a figure, the first being x.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub number: u32,
    pub title: String,
    pub y_label: String,
    pub columns: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureFiles {
    pub csv: PathBuf,
    pub svg: PathBuf,
}

#[derive(Clone, Copy)]
enum Kind {
    Xi,
    Remainders,
    DeltaR,
}

fn layout(n: u32) -> Result<(&'static str, usize, Kind), AppError> {
    Ok(match n {
        1 => ("example1.cfg", 2, Kind::Xi),
        2 => ("example1.cfg", 2, Kind::Remainders),
        3 => ("example1.cfg", 2, Kind::DeltaR),
        4 => ("example2.cfg", 1, Kind::Xi),
        5 => ("example2.cfg", 1, Kind::Remainders),
        6 => ("example2.cfg", 1, Kind::DeltaR),
        other => return Err(AppError::InvalidFigure(other)),
    })
}

/// Bundled config behind figure `n`.
pub fn figure_config(n: u32, overrides: &Overrides) -> Result<ExperimentConfig, AppError> {
    let (name, _, _) = layout(n)?;
    ExperimentConfig::bundled(name)?.with_overrides(overrides)
}

pub fn figure_data(n: u32, overrides: &Overrides) -> Result<FigureData, AppError> {
    let exp = compute(&figure_config(n, overrides)?)?;
    figure_from(n, &exp)
}

/// Extracts figure `n` from an already computed experiment.
pub fn figure_from(n: u32, exp: &Experiment) -> Result<FigureData, AppError> {
    let (_, wanted, kind) = layout(n)?;
    if exp.branches.len() < wanted {
        return Err(AppError::Config(format!(
            "figure {n} needs {wanted} branches, found {}",
            exp.branches.len()
        )));
    }
    let branches = &exp.branches[..wanted];
    let x = &branches[0].samples.nodes;
    let x0 = exp.config.x0;
    let mut columns = vec!["x".to_string()];
    let mut cols: Vec<Vec<f64>> = vec![x.clone()];
    let (title, y_label) = match kind {
        Kind::Xi => {
            for b in branches {
                columns.push(format!("xi_{}", b.traj.label));
                cols.push(b.traj.values().to_vec());
            }
            columns.push("x0_line".into());
            cols.push(vec![x0; x.len()]);
            columns.push("identity_line".into());
            cols.push(x.clone());
            (format!("xi(x) for {}", exp.config.function), "xi")
        }
        Kind::Remainders => {
            columns.push("r_act".into());
            cols.push(branches[0].samples.r_act.clone());
            for b in branches {
                columns.push(format!("r_xi_{}", b.traj.label));
                cols.push(b.samples.r_xi.clone());
            }
            (
                format!("R_xi and R_act for {}", exp.config.function),
                "remainder",
            )
        }
        Kind::DeltaR => {
            for b in branches {
                columns.push(format!("delta_r_{}", b.traj.label));
                cols.push(b.samples.delta_r.clone());
            }
            (
                format!("R_act - R_xi for {}", exp.config.function),
                "delta R",
            )
        }
    };
    let data = (0..x.len())
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect();
    Ok(FigureData {
        number: n,
        title,
        y_label: y_label.into(),
        columns,
        data,
    })
}

impl FigureData {
    pub fn csv(&self) -> Csv {
        let mut csv = Csv::new(self.columns.clone());
        for row in &self.data {
            csv.push_numbers(row);
        }
        csv
    }

    pub fn plot(&self) -> LinePlot {
        let series = (1..self.columns.len())
            .map(|j| {
                let name = &self.columns[j];
                Series {
                    name: name.clone(),
                    points: self.data.iter().map(|r| (r[0], r[j])).collect(),
                    dashed: name.ends_with("_line"),
                }
            })
            .collect();
        LinePlot {
            title: format!("Figure {}: {}", self.number, self.title),
            x_label: "x".into(),
            y_label: self.y_label.clone(),
            series,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<FigureFiles, AppError> {
        let files = FigureFiles {
            csv: dir.join(format!("figure{}.csv", self.number)),
            svg: dir.join(format!("figure{}.svg", self.number)),
        };
        self.csv().write(&files.csv)?;
        crate::output::write_atomic(&files.svg, self.plot().render().as_bytes())?;
        Ok(files)
    }
}

/// Computes figure `n` and writes `figure<n>.csv` and `figure<n>.svg`.
pub fn figure(n: u32, overrides: &Overrides, dir: &Path) -> Result<FigureFiles, AppError> {
    figure_data(n, overrides)?.write(dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_figures_are_rejected() {
        for n in [0, 7, 42] {
            let err = figure_data(n, &Overrides::default()).unwrap_err();
            assert!(matches!(err, AppError::InvalidFigure(m) if m == n));
            assert_eq!(err.exit_code(), 2);
        }
    }

    #[test]
    fn figure_four_columns() {
        let o = Overrides {
            n_steps: Some(200),
            ..Overrides::default()
        };
        let fig = figure_data(4, &o).unwrap();
        assert_eq!(fig.columns, ["x", "xi_branch1", "x0_line", "identity_line"]);
        assert_eq!(fig.data.len(), 201);
        assert!(fig.data.iter().all(|r| r[2] == 0.0 && r[3] == r[0]));
    }
}

//! Command-line front end for `lagrem`: runs configured experiments
//! and regenerates the comparison table and figure data for the bundled
//! examples as CSV, JSON and SVG.

// `!(a < b)` comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod runner;
pub mod selfcheck;
pub mod svg;
pub mod table;

pub use config::{ExperimentConfig, Overrides, SwitchPoints};
pub use error::AppError;
pub use runner::{compute, run, Experiment, ExperimentReport};

//! Argument parsing and command dispatch for the `lagrem` binary.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use lagrem::CompositionMode;

use crate::config::{ExperimentConfig, Overrides};
use crate::error::AppError;
use crate::{figures, run, selfcheck, table};

#[derive(Parser)]
#[command(
    name = "lagrem",
    version,
    about = "Lagrange-function remainder experiments"
)]
struct Cli {
    /// Directory for artifacts (overrides the config's output_dir)
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Number of integration steps (overrides the config)
    #[arg(long, global = true)]
    n_steps: Option<usize>,
    /// Remainder composition: factored or direct (overrides the config)
    #[arg(long, global = true)]
    mode: Option<CompositionMode>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file
    Run { config: PathBuf },
    /// Reproduce the Taylor vs spline comparison table for both examples
    Table1,
    /// Write the data and plot of figure N (1 to 6)
    Figure { n: u32 },
    /// Run the analytic oracle checks
    Selfcheck,
}

fn default_dir(o: &Overrides) -> PathBuf {
    o.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn execute(cli: Cli) -> Result<bool, AppError> {
    let overrides = Overrides {
        output_dir: cli.output_dir,
        n_steps: cli.n_steps,
        mode: cli.mode,
    };
    match cli.command {
        Command::Run { config } => {
            let config = ExperimentConfig::load(&config)?.with_overrides(&overrides)?;
            let report = run(&config)?;
            println!("roots: {:?}", report.roots);
            for b in &report.branches {
                println!(
                    "{}: xi_z = {:.10}, max |dR| = {:.3e}, violations = {}",
                    b.label, b.xi_z, b.max_abs_delta_r, b.constraint_violations
                );
            }
            if let Some(s) = &report.spliced {
                println!(
                    "{}: switch at {:?}, within bounds = {}",
                    s.label, s.switch_points, s.all_within_bounds
                );
            }
            let m = &report.metrics;
            println!(
                "delta_T = {:.4e}  delta_CS = {:.4e}  B_U = {:.4e}",
                m.delta_t, m.delta_cs, m.b_u
            );
            for w in &report.warnings {
                println!("note: {w}");
            }
            println!(
                "wrote {} files to {}",
                report.files.len(),
                config.output_dir.display()
            );
            Ok(true)
        }
        Command::Table1 => {
            let dir = default_dir(&overrides);
            let rows = table::table1(&overrides, &dir)?;
            print!("{}", table::render(&rows));
            println!("wrote {}", dir.join("table1.csv").display());
            Ok(true)
        }
        Command::Figure { n } => {
            let files = figures::figure(n, &overrides, &default_dir(&overrides))?;
            println!("wrote {} and {}", files.csv.display(), files.svg.display());
            Ok(true)
        }
        Command::Selfcheck => {
            let checks = selfcheck::run_all();
            print!("{}", selfcheck::render(&checks));
            Ok(checks.iter().all(|c| c.pass))
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return err.exit_code();
        }
    };
    match execute(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

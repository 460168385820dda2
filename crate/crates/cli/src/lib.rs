//! Experiment harness for Chebyshev inertial iteration.
//!
//! The `cheby` binary runs one experiment per invocation, prints a digest to
//! stdout and, with `--out`, writes `config.txt`, `summary.csv` and one
//! `trace_<solver>.csv` per solver. Exit codes: 0 success (divergent runs
//! included, reported on stderr), 1 numerical failure, 2 I/O failure,
//! 64 usage error, 65 invalid configuration.

// `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod pgm;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use config::{Experiment, ExperimentConfig, Overrides, RangePolicy};
pub use error::{CliError, Result};
pub use experiments::{run_experiment, write_outputs, ExperimentReport, RunRecord};

/// Parses the command line into a resolved configuration.
pub fn resolve_command(command: &cli::Command) -> Result<ExperimentConfig> {
    let (experiment, common) = command.split();
    let from_file = match &common.config {
        Some(path) => Overrides::parse_file(path)?,
        None => Overrides::default(),
    };
    from_file.merged_with(common.overrides()?).resolve(experiment)
}

fn execute(command: &cli::Command) -> Result<()> {
    let config = resolve_command(command)?;
    let report = run_experiment(&config)?;
    let mut stdout = std::io::stdout().lock();
    let text = if config.experiment == Experiment::Bounds {
        report.render_bounds_csv()
    } else {
        report.digest()
    };
    let _ = stdout.write_all(text.as_bytes());
    let diverged = report.diverged_count();
    if diverged > 0 {
        eprintln!("warning: {diverged} run(s) diverged");
    }
    if let Some(dir) = &config.output_dir {
        write_outputs(&report, dir)?;
    }
    Ok(())
}

/// Runs the binary's logic and returns its exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match cli::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { error::EXIT_USAGE } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

//! Experiment runner behind the `nvholo` command.

pub mod error;
pub mod experiments;
pub mod output;
pub mod spec;
pub mod units;

use std::time::Instant;

use error::CliResult;
use experiments::run;
use output::{choose_format, render, write_output};
use spec::{ExperimentSpec, Format};

/// Runs `spec` and writes the rendered artifact to `target`.
pub fn execute(
    spec: &ExperimentSpec,
    target: &str,
    format: Option<Format>,
    record_timing: bool,
) -> CliResult<()> {
    let start = Instant::now();
    let artifact = run(spec)?;
    let wall = record_timing.then(|| start.elapsed().as_secs_f64());
    let format = choose_format(format.or(spec.format), target, &artifact);
    write_output(target, &render(&artifact, format, wall)?)
}

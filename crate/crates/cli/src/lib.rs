//! Batch driver for the point-interaction Laplacian experiments.
//!
//! A run reads one JSON [`config::RunConfig`], executes the named experiment
//! and writes `report.json` plus any CSV or field files into the output
//! directory. Exit status `0` means every check passed, `1` that at least one
//! failed, and `2` that the configuration was rejected.

pub mod config;
pub mod experiments;
pub mod report;

use std::path::Path;

pub use config::{ConfigError, Experiment, RunConfig};
pub use report::Report;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Executes `cfg`, writes `report.json` into `out` and returns the report
/// with its exit status.
pub fn run(cfg: &RunConfig, out: &Path) -> std::io::Result<(Report, i32)> {
    std::fs::create_dir_all(out)?;
    let report = experiments::run_experiment(cfg, out);
    report::write_text(&out.join("report.json"), &report.to_json(cfg))?;
    let code = if report.passed() { EXIT_PASS } else { EXIT_FAIL };
    Ok((report, code))
}

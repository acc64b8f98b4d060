//! Experiment runner for `acca-core`: configuration files, scenario
//! drivers and reproducible output directories.

pub mod config;
pub mod output;
pub mod scenarios;

use std::time::Instant;

use anyhow::Result;

pub use config::{ExperimentConfig, Scenario};
pub use output::{FileEntry, OutputDir};
pub use scenarios::Summary;

/// Runs `cfg` into `cfg.output_dir` and writes the manifest.
pub fn execute(cfg: &ExperimentConfig) -> Result<(Summary, Vec<FileEntry>)> {
    let started = Instant::now();
    let mut out = OutputDir::create(&cfg.output_dir)?;
    let summary = scenarios::run_scenario(cfg, &mut out)?;
    let files = out.finish(cfg, started.elapsed().as_secs_f64())?;
    Ok((summary, files))
}

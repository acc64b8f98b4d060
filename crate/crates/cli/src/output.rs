//! Output directory bookkeeping and the run manifest.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use acca_core::{write_csv, CsvRecord};
use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub schema_version: u32,
    pub scenario: &'static str,
    pub seed: u64,
    pub config: &'a ExperimentConfig,
    pub versions: Versions,
    pub wall_time_seconds: f64,
    pub files: &'a [FileEntry],
}

#[derive(Debug, Serialize)]
pub struct Versions {
    pub acca_core: &'static str,
    pub acca_cli: &'static str,
}

impl Versions {
    pub fn current() -> Self {
        Versions {
            acca_core: acca_core::VERSION,
            acca_cli: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// Writes data files under one directory and remembers their hashes.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    fn record(&mut self, name: &str) -> Result<()> {
        let path = self.root.join(name);
        let data = fs::read(&path).with_context(|| format!("reading back {}", path.display()))?;
        self.files.push(FileEntry {
            path: name.to_string(),
            bytes: data.len() as u64,
            sha256: hex::encode(Sha256::digest(&data)),
        });
        Ok(())
    }

    pub fn csv<'a, R, I>(&mut self, name: &str, rows: I) -> Result<()>
    where
        R: CsvRecord + 'a,
        I: IntoIterator<Item = &'a R>,
    {
        let path = self.root.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        write_csv(BufWriter::new(file), rows)
            .with_context(|| format!("writing {}", path.display()))?;
        self.record(name)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.root.join(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.record(name)
    }

    /// Writes `manifest.json`; it is not listed in itself.
    pub fn finish(
        self,
        config: &ExperimentConfig,
        wall_time_seconds: f64,
    ) -> Result<Vec<FileEntry>> {
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION,
            scenario: config.scenario.name(),
            seed: config.seed,
            config,
            versions: Versions::current(),
            wall_time_seconds,
            files: &self.files,
        };
        let path = self.root.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(self.files)
    }
}

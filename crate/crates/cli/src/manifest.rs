//! Run manifests: what ran, with what configuration and seeds, and which
//! files it produced. Written last, after verifying every listed output
//! exists.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;

#[derive(Serialize)]
pub struct RunManifest {
    pub experiment: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub code_version: String,
    pub outputs: Vec<String>,
    pub duration_seconds: f64,
}

/// Collects output paths as they are written and finalises the manifest.
pub struct ManifestBuilder {
    experiment: String,
    config: serde_json::Value,
    seeds: Vec<u64>,
    outputs: Vec<PathBuf>,
    started: Instant,
}

impl ManifestBuilder {
    pub fn new(experiment: &str, config: serde_json::Value, seeds: Vec<u64>) -> Self {
        Self {
            experiment: experiment.to_string(),
            config,
            seeds,
            outputs: Vec::new(),
            started: Instant::now(),
        }
    }

    /// Writes a file and records it as an output.
    pub fn write_output(&mut self, path: &Path, contents: impl AsRef<[u8]>) -> anyhow::Result<()> {
        std::fs::write(path, contents.as_ref())
            .with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(path.to_path_buf());
        Ok(())
    }

    /// Verifies all outputs exist, then writes `manifest.json` last.
    pub fn finalise(self, dir: &Path) -> anyhow::Result<()> {
        for output in &self.outputs {
            anyhow::ensure!(
                output.exists(),
                "declared output {} is missing",
                output.display()
            );
        }
        let manifest = RunManifest {
            experiment: self.experiment,
            config: self.config,
            seeds: self.seeds,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: self
                .outputs
                .iter()
                .map(|p| p.display().to_string())
                .collect(),
            duration_seconds: self.started.elapsed().as_secs_f64(),
        };
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest)?;
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

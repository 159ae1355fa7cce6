//! Run manifests: resolved parameters plus per-stage wall-clock timings,
//! written next to every output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::CliResult;

pub const ARTIFACT_VERSION: &str = "1";

#[derive(Debug, serde::Serialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub command: String,
    pub parameters: serde_json::Value,
    pub seeds: Vec<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub timings_ms: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: serde_json::Value, seeds: Vec<u64>) -> Self {
        Self {
            artifact_version: ARTIFACT_VERSION.to_string(),
            command: command.to_string(),
            parameters,
            seeds,
            inputs: Vec::new(),
            outputs: Vec::new(),
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.to_path_buf());
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    /// Times one pipeline stage and records it.
    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings_ms
            .insert(name.to_string(), start.elapsed().as_secs_f64() * 1e3);
        out
    }

    /// Writes manifest.json into the output directory.
    pub fn write(mut self, out_dir: &Path) -> CliResult<()> {
        let path = out_dir.join("manifest.json");
        self.outputs.push(path.clone());
        let body = serde_json::to_string_pretty(&self)
            .map_err(|e| crate::CliError::Input(e.to_string()))?;
        std::fs::write(&path, body)?;
        Ok(())
    }
}

/// Creates the output directory (parents included).
pub fn ensure_out_dir(path: &Path) -> CliResult<()> {
    std::fs::create_dir_all(path)?;
    Ok(())
}

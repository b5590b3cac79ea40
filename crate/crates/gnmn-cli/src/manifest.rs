//! Run manifest: enough to re-run and to verify outputs.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde_json::json;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub struct ManifestBuilder {
    config_hash: String,
    seed: u64,
    outputs: Vec<PathBuf>,
}

impl ManifestBuilder {
    /// `config_json` must be the configuration as actually run (after any
    /// seed override).
    pub fn new(config_json: &str, seed: u64) -> Self {
        Self {
            config_hash: sha256_hex(config_json.as_bytes()),
            seed,
            outputs: Vec::new(),
        }
    }

    pub fn add_output(&mut self, path: PathBuf) {
        self.outputs.push(path);
    }

    /// Checksum every listed output and write `run_manifest.json`.
    pub fn write(self, dir: &Path, wall_clock_seconds: f64) -> anyhow::Result<PathBuf> {
        let mut files = Vec::new();
        for path in &self.outputs {
            let bytes = fs::read(path)
                .with_context(|| format!("manifest output missing: {}", path.display()))?;
            files.push(json!({
                "file": path
                    .file_name()
                    .map(|f| f.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string()),
                "sha256": sha256_hex(&bytes),
                "bytes": bytes.len(),
            }));
        }
        let manifest = json!({
            "config_hash": self.config_hash,
            "seed": self.seed,
            "version": env!("CARGO_PKG_VERSION"),
            "outputs": files,
            "wall_clock_seconds": wall_clock_seconds,
        });
        let path = dir.join("run_manifest.json");
        fs::write(&path, serde_json::to_string_pretty(&manifest)?)
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }
}

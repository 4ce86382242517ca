use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(FileDigest {
            path: path.display().to_string(),
            sha256: hex(&Sha256::digest(&bytes)),
        })
    }
}

/// Everything that determines a run's outputs. No timestamps or host data,
/// so equal manifests mean equal outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub config_digest: String,
    pub precision_bits: u32,
    pub strategy: String,
    pub versions: BTreeMap<&'static str, &'static str>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl RunManifest {
    pub fn new(command: &str, arguments: Vec<String>, precision_bits: u32, strategy: &str) -> Self {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        for a in &arguments {
            h.update([0]);
            h.update(a.as_bytes());
        }
        h.update(precision_bits.to_le_bytes());
        h.update(strategy.as_bytes());
        let versions = BTreeMap::from([
            ("transfinite", transfinite::VERSION),
            ("transfinite-cli", env!("CARGO_PKG_VERSION")),
        ]);
        RunManifest {
            command: command.to_string(),
            arguments,
            config_digest: hex(&h.finalize()),
            precision_bits,
            strategy: strategy.to_string(),
            versions,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Writes `<output>.manifest.json` next to the first output.
    pub fn write(&self) -> Result<Option<PathBuf>> {
        let Some(first) = self.outputs.first() else {
            return Ok(None);
        };
        let path = PathBuf::from(format!("{}.manifest.json", first.path));
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(Some(path))
    }
}

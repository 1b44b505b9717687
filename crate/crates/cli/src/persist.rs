//! Run directories, content hashes and the manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ParamMap;
use crate::{CliError, Result};

pub const MANIFEST: &str = "manifest.json";

/// Number formatting for CSV: 17 significant digits, round-trip exact.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Pretty JSON with a trailing newline.
pub fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

/// Short hash of the command and its resolved parameters.
pub fn config_hash(command: &str, echo: &ParamMap) -> String {
    let mut text = format!("{command}\n");
    for (k, v) in echo {
        text.push_str(&format!("{k}={v}\n"));
    }
    sha256_hex(text.as_bytes())[..8].to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputEntry {
    /// Relative to the run directory for files inside it, as given otherwise.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Error { code: i32, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_echo: ParamMap,
    pub artifact_version: String,
    pub started: DateTime<Utc>,
    pub finished: DateTime<Utc>,
    pub outputs: Vec<OutputEntry>,
    pub status: RunStatus,
    /// Scheme facts worth keeping with the run (Courant number and limit).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, serde_json::Value>,
}

/// A run directory being filled; the manifest goes in last.
#[derive(Debug)]
pub struct RunDir {
    pub path: PathBuf,
    command: String,
    started: DateTime<Utc>,
    outputs: Vec<OutputEntry>,
    pub details: BTreeMap<String, serde_json::Value>,
}

impl RunDir {
    pub fn create(root: &Path, command: &str, echo: &ParamMap) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        let started = Utc::now();
        let base = format!(
            "{}-{}",
            started.format("%Y%m%dT%H%M%S%.3fZ"),
            config_hash(command, echo)
        );
        let mut attempt = 0;
        loop {
            let name = if attempt == 0 {
                base.clone()
            } else {
                format!("{base}-{attempt}")
            };
            let path = root.join(name);
            match std::fs::create_dir(&path) {
                Ok(()) => {
                    return Ok(RunDir {
                        path,
                        command: command.to_string(),
                        started,
                        outputs: Vec::new(),
                        details: BTreeMap::new(),
                    })
                }
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => attempt += 1,
                Err(e) => return Err(CliError::io(path, e)),
            }
        }
    }

    /// Writes a file into the run directory and records its hash.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.path.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.outputs.push(OutputEntry {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(path)
    }

    /// Writes a file outside the run directory and records it too.
    pub fn write_external(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))?;
        self.outputs.push(OutputEntry {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    /// Writes `manifest.json` through a temporary file and rename.
    pub fn finish(self, echo: ParamMap, status: RunStatus) -> Result<RunManifest> {
        let manifest = RunManifest {
            command: self.command,
            config_echo: echo,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            started: self.started,
            finished: Utc::now(),
            outputs: self.outputs,
            status,
            details: self.details,
        };
        let tmp = self.path.join(format!("{MANIFEST}.partial"));
        std::fs::write(&tmp, json_bytes(&manifest)?).map_err(|e| CliError::io(&tmp, e))?;
        let dest = self.path.join(MANIFEST);
        std::fs::rename(&tmp, &dest).map_err(|e| CliError::io(&dest, e))?;
        Ok(manifest)
    }
}

pub fn read_manifest(run: &Path) -> Result<RunManifest> {
    let path = run.join(MANIFEST);
    let text = std::fs::read(&path).map_err(|_| {
        CliError::MissingOutput(format!(
            "{} (run incomplete or not a run directory)",
            path.display()
        ))
    })?;
    Ok(serde_json::from_slice(&text)?)
}

/// Checks every listed output exists and matches its recorded hash.
pub fn verify_outputs(run: &Path, manifest: &RunManifest) -> Result<()> {
    for out in &manifest.outputs {
        let p = Path::new(&out.path);
        let path = if p.is_absolute() || !run.join(p).exists() {
            p.to_path_buf()
        } else {
            run.join(p)
        };
        let bytes = std::fs::read(&path)
            .map_err(|_| CliError::MissingOutput(path.display().to_string()))?;
        if sha256_hex(&bytes) != out.sha256 {
            return Err(CliError::Data(format!(
                "{} does not match its recorded hash",
                path.display()
            )));
        }
    }
    Ok(())
}

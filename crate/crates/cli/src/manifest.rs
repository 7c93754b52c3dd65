//! Run manifests. CSV outputs get a `<out>.manifest.json` sidecar; JSON
//! outputs carry the manifest under a `manifest` key. Manifests hold no
//! timestamps or host details, so a rerun reproduces them byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use kg_bohm_core::Tolerances;
use serde::Serialize;
use serde_json::Value;

use crate::config::WaveConfig;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigRecord {
    /// Path as given on the command line, or the builtin name.
    pub source: String,
    /// The parsed wave function, so the manifest stands on its own.
    pub wave: WaveConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ToleranceRecord {
    pub class_tol: f64,
    pub ortho_tol: f64,
    pub node_tol: f64,
}

impl From<Tolerances> for ToleranceRecord {
    fn from(t: Tolerances) -> Self {
        ToleranceRecord {
            class_tol: t.class_tol,
            ortho_tol: t.ortho_tol,
            node_tol: t.node_tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: Option<ConfigRecord>,
    pub tolerances: ToleranceRecord,
    pub seed: Option<u64>,
    /// Command-specific inputs (region, resolution, step, ...).
    pub parameters: Value,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, tols: Tolerances, parameters: Value) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: None,
            tolerances: tols.into(),
            seed: None,
            parameters,
            outputs: Vec::new(),
        }
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("manifest fields are plain data")
    }
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes `value` as pretty JSON with a trailing newline.
pub fn write_json(path: &Path, value: &Value) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::Json)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::Io(path.display().to_string(), e))
}

pub fn write_sidecar(out: &Path, manifest: &RunManifest) -> Result<PathBuf, Error> {
    let path = sidecar_path(out);
    write_json(&path, &manifest.to_value())?;
    Ok(path)
}

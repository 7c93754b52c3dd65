//! Wave-function configuration files.
//!
//! ```json
//! { "mass": 1.0, "modes": [ { "k": [k0, k1, k2, k3], "c": [re, im] }, ... ] }
//! ```

use std::fs;
use std::path::Path;

use kg_bohm_core::{Complex64, FourVector, PlaneWaveMode, Superposition};
use serde::{Deserialize, Serialize};

use crate::Error;

/// Name accepted in place of a config path for the three-mode counterexample at m = 1.
pub const BUILTIN_COUNTEREXAMPLE: &str = "paper-counterexample";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub k: [f64; 4],
    pub c: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveConfig {
    pub mass: f64,
    pub modes: Vec<ModeConfig>,
}

impl WaveConfig {
    pub fn from_superposition(w: &Superposition) -> Self {
        WaveConfig {
            mass: w.mass(),
            modes: w
                .modes()
                .iter()
                .map(|m| ModeConfig {
                    k: m.k.components(),
                    c: [m.c.re, m.c.im],
                })
                .collect(),
        }
    }

    /// Checks the on-shell, positive-energy and nonzero-amplitude invariants.
    pub fn build(&self) -> Result<Superposition, Error> {
        let modes = self
            .modes
            .iter()
            .map(|m| {
                let [k0, k1, k2, k3] = m.k;
                PlaneWaveMode::new(
                    FourVector::new(k0, k1, k2, k3),
                    Complex64::new(m.c[0], m.c[1]),
                )
            })
            .collect();
        Superposition::new(self.mass, modes).map_err(Error::InvalidConfig)
    }
}

pub fn parse_config(text: &str) -> Result<Superposition, Error> {
    let cfg: WaveConfig = serde_json::from_str(text).map_err(Error::ConfigSyntax)?;
    cfg.build()
}

/// Loads a config file, or the builtin counterexample by name.
pub fn load(source: &str) -> Result<Superposition, Error> {
    if source == BUILTIN_COUNTEREXAMPLE {
        return Superposition::paper_counterexample(1.0).map_err(Error::InvalidConfig);
    }
    let path = Path::new(source);
    let text = fs::read_to_string(path).map_err(|e| Error::Io(path.display().to_string(), e))?;
    parse_config(&text)
}

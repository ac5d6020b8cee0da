//! Run configuration, read from JSON.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "dim": 2,
//!   "j": "auto",
//!   "n_max": 3,
//!   "l": null,
//!   "q_s": 2.0,
//!   "profile": { "name": "log_critical", "beta": 1.0 },
//!   "depth": 2,
//!   "out": "out",
//!   "mode": "strict",
//!   "seed": 0,
//!   "chains": 25,
//!   "suites": null,
//!   "gradcheck": { "curves": 20, "segments": 4096, "grid_nodes": 65, "pairs": 2000 }
//! }
//! ```
//!
//! Every field is optional. `j` is either `"auto"` (the smallest admissible
//! strict sequence of length `n_max + 1`) or an explicit list. `l` overrides
//! the derived inner exponents. `depth` is the level of the deepest probe;
//! chains are built one level further.

use std::path::{Path, PathBuf};

use lipsharp::cubetree::{auto_j, Mode, ParamSequence};
use lipsharp::lorentz::RadialProfile;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoKeyword {
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JSpec {
    Auto(AutoKeyword),
    List(Vec<u64>),
}

impl Default for JSpec {
    fn default() -> Self {
        JSpec::Auto(AutoKeyword::Auto)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    LogCritical {
        #[serde(default = "one")]
        beta: f64,
    },
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig::LogCritical { beta: 1.0 }
    }
}

impl ProfileConfig {
    pub fn build(&self, dim: u32) -> RadialProfile {
        match *self {
            ProfileConfig::LogCritical { beta } => RadialProfile::LogCritical { dim, beta },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GradConfig {
    pub curves: usize,
    pub segments: usize,
    pub grid_nodes: usize,
    pub pairs: usize,
}

impl Default for GradConfig {
    fn default() -> Self {
        GradConfig { curves: 20, segments: 4096, grid_nodes: 65, pairs: 2000 }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub dim: u32,
    pub j: JSpec,
    pub n_max: usize,
    pub l: Option<Vec<u64>>,
    pub q_s: f64,
    pub profile: ProfileConfig,
    pub depth: usize,
    pub out: PathBuf,
    pub mode: Mode,
    pub seed: u64,
    pub chains: usize,
    pub suites: Option<Vec<String>>,
    pub gradcheck: GradConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            dim: 2,
            j: JSpec::default(),
            n_max: 3,
            l: None,
            q_s: 2.0,
            profile: ProfileConfig::default(),
            depth: 2,
            out: PathBuf::from("out"),
            mode: Mode::Strict,
            seed: 0,
            chains: 25,
            suites: None,
            gradcheck: GradConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn j_sequence(&self) -> Vec<u64> {
        match &self.j {
            JSpec::Auto(_) => auto_j(self.n_max),
            JSpec::List(j) => j.clone(),
        }
    }

    /// Parameters as configured. Rule violations are left to the caller;
    /// only sequences that cannot be built at all are errors here.
    pub fn params(&self) -> Result<ParamSequence, CliError> {
        if self.dim == 0 || self.dim > 8 {
            return Err(CliError::Config(format!("dim = {} (supported: 1..=8)", self.dim)));
        }
        if !(self.q_s > 1.0 && self.q_s <= self.dim as f64) {
            return Err(CliError::Config(format!("q_s = {} must lie in (1, N]", self.q_s)));
        }
        let j = self.j_sequence();
        let bad = |e: lipsharp::cubetree::CubeError| CliError::Config(e.to_string());
        match self.mode {
            Mode::Strict => {
                let p = ParamSequence::strict(self.dim, j).map_err(bad)?;
                match &self.l {
                    Some(l) => p.with_l(l.clone()).map_err(bad),
                    None => Ok(p),
                }
            }
            Mode::Relaxed => ParamSequence::relaxed(self.dim, j, self.l.clone()).map_err(bad),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_give_strict_sequence() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg.j_sequence(), vec![0, 9, 90, 819]);
        assert_eq!(cfg.params().unwrap().l, vec![4, 37, 334]);
    }

    #[test]
    fn explicit_and_malformed_j() {
        let cfg = RunConfig::from_json(r#"{"j": [0, 4, 9], "mode": "relaxed"}"#).unwrap();
        assert_eq!(cfg.params().unwrap().mode, Mode::Relaxed);
        assert!(RunConfig::from_json(r#"{"j": "sometimes"}"#).is_err());
        assert!(RunConfig::from_json(r#"{"j": [0, -1]}"#).is_err());
        assert!(RunConfig::from_json(r#"{"schema_version": 7}"#).is_err());
        assert!(RunConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }
}

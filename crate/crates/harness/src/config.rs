//! Scenario parameters.
//!
//! Values are resolved in three layers: the registry defaults of the scenario,
//! then an optional TOML file, then command-line flags. Each layer is a
//! [`ConfigPatch`] whose `Some` fields override the previous layer.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::registry;

pub const MAX_P: u64 = 7;
pub const MAX_N: u32 = 4;
pub const MAX_R: usize = 4;
pub const MAX_CAP: u32 = 60;
pub const MAX_SAMPLES: usize = 100_000;

/// Deliberate sign errors used to show the checks are not vacuous.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// `{u, v} = -1` on the center ring.
    FlipPairing,
    /// `[y, x] = -1` in the algebra.
    FlipRelation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub p: u64,
    pub n: u32,
    pub r: usize,
    /// Degree bound for sampled elements.
    pub degree: u32,
    /// Degree cap for truncated center and ideal computations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<u32>,
    pub seed: u64,
    pub samples: usize,
    /// Monomial ideal generators in the center ring, e.g. `["u^2"]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witt_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation: Option<Mutation>,
}

/// A partial configuration; the shape of config files.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigPatch {
    pub scenario: Option<String>,
    pub p: Option<u64>,
    pub n: Option<u32>,
    pub r: Option<usize>,
    pub degree: Option<u32>,
    pub cap: Option<u32>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub ideal: Option<Vec<String>>,
    pub witt_length: Option<usize>,
    pub mutation: Option<Mutation>,
}

impl ConfigPatch {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_toml(&text)
    }
}

impl ScenarioConfig {
    /// Registry defaults for `scenario`.
    pub fn for_scenario(scenario: &str) -> Result<Self, HarnessError> {
        let entry = registry::lookup(scenario)?;
        Ok(ScenarioConfig {
            scenario: entry.name.to_string(),
            p: 3,
            n: 2,
            r: 1,
            degree: entry.defaults.degree,
            cap: entry.defaults.cap,
            seed: 1,
            samples: entry.defaults.samples,
            ideal: entry.defaults.ideal.map(|g| g.iter().map(|s| s.to_string()).collect()),
            witt_length: None,
            mutation: None,
        })
    }

    /// Defaults for the patch's scenario, then the patch.
    pub fn from_patch(patch: &ConfigPatch) -> Result<Self, HarnessError> {
        let name = patch
            .scenario
            .as_deref()
            .ok_or_else(|| HarnessError::Config("no scenario given".into()))?;
        let mut cfg = Self::for_scenario(name)?;
        cfg.apply(patch)?;
        Ok(cfg)
    }

    pub fn apply(&mut self, patch: &ConfigPatch) -> Result<(), HarnessError> {
        if let Some(s) = &patch.scenario {
            if s != &self.scenario {
                *self = Self::for_scenario(s)?;
            }
        }
        macro_rules! take {
            ($($f:ident),*) => {$(
                if let Some(v) = &patch.$f {
                    self.$f = v.clone();
                }
            )*};
        }
        take!(p, n, r, degree, seed, samples);
        macro_rules! take_opt {
            ($($f:ident),*) => {$(
                if patch.$f.is_some() {
                    self.$f = patch.$f.clone();
                }
            )*};
        }
        take_opt!(cap, ideal, witt_length, mutation);
        Ok(())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        registry::lookup(&self.scenario)?;
        let bad = |what: &str, detail: String| Err(HarnessError::Guard(format!("{what}: {detail}")));
        if !matches!(self.p, 3 | 5 | 7) || self.p > MAX_P {
            return bad("p", format!("{} is not an odd prime ≤ {MAX_P}", self.p));
        }
        if self.n == 0 || self.n > MAX_N {
            return bad("n", format!("{} not in 1..={MAX_N}", self.n));
        }
        if self.r == 0 || self.r > MAX_R {
            return bad("r", format!("{} not in 1..={MAX_R}", self.r));
        }
        if self.degree > MAX_CAP {
            return bad("degree", format!("{} exceeds {MAX_CAP}", self.degree));
        }
        if let Some(c) = self.cap {
            if c > MAX_CAP {
                return bad("cap", format!("{c} exceeds {MAX_CAP}"));
            }
        }
        if self.samples > MAX_SAMPLES {
            return bad("samples", format!("{} exceeds {MAX_SAMPLES}", self.samples));
        }
        if let Some(m) = self.witt_length {
            if m == 0 || m > MAX_N as usize {
                return bad("witt_length", format!("{m} not in 1..={MAX_N}"));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

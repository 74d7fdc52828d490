//! Shipped data tables: experimental bounds on the collapse rate and
//! interference experiments. Both are TOML documents; the built-in copies
//! are compiled in and alternative files can be loaded at run time.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

const BUILTIN_BOUNDS: &str = include_str!("../data/bounds.toml");
const BUILTIN_EXPERIMENTS: &str = include_str!("../data/experiments.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundCategory {
    Laboratory,
    Cosmological,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundEntry {
    pub name: String,
    /// s^-1
    pub lambda_max: f64,
    /// m
    pub r_c_assumed: f64,
    pub category: BoundCategory,
    #[serde(default)]
    pub note: String,
    #[serde(default)]
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceValue {
    pub name: String,
    /// s^-1
    pub lambda: f64,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundCatalog {
    pub schema_version: u32,
    #[serde(default, rename = "reference")]
    pub references: Vec<ReferenceValue>,
    #[serde(rename = "bound")]
    pub bounds: Vec<BoundEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentEntry {
    pub name: String,
    pub nucleon_count: u64,
    /// s
    pub superposition_time: f64,
    /// True when the time was back-computed rather than measured.
    #[serde(default)]
    pub time_inferred: bool,
    /// Bound quoted for the experiment, s^-1.
    #[serde(default)]
    pub quoted_bound: Option<f64>,
    #[serde(default)]
    pub r_c_regime: String,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentCatalog {
    pub schema_version: u32,
    #[serde(rename = "experiment")]
    pub experiments: Vec<ExperimentEntry>,
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))
}

fn check_version(v: u32, origin: &str) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "{origin}: unsupported schema_version {v} (expected {SCHEMA_VERSION})"
        )));
    }
    Ok(())
}

impl BoundCatalog {
    pub fn builtin() -> Self {
        Self::from_toml_str(BUILTIN_BOUNDS, "built-in bounds").expect("built-in bound catalog is valid")
    }

    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        let cat: Self = parse(text, origin)?;
        check_version(cat.schema_version, origin)?;
        if cat.bounds.is_empty() {
            return Err(Error::Config(format!("{origin}: catalog has no bounds")));
        }
        for b in &cat.bounds {
            if !(b.lambda_max > 0.0 && b.lambda_max.is_finite()) {
                return Err(Error::Config(format!("{origin}: bound '{}' has lambda_max {}", b.name, b.lambda_max)));
            }
            if !(b.r_c_assumed > 0.0) {
                return Err(Error::Config(format!("{origin}: bound '{}' has r_c_assumed {}", b.name, b.r_c_assumed)));
            }
        }
        for r in &cat.references {
            if !(r.lambda > 0.0 && r.lambda.is_finite()) {
                return Err(Error::Config(format!("{origin}: reference '{}' has lambda {}", r.name, r.lambda)));
            }
        }
        Ok(cat)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    pub fn reference(&self, name: &str) -> Option<&ReferenceValue> {
        self.references.iter().find(|r| r.name == name)
    }
}

impl ExperimentCatalog {
    pub fn builtin() -> Self {
        Self::from_toml_str(BUILTIN_EXPERIMENTS, "built-in experiments").expect("built-in experiment catalog is valid")
    }

    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        let cat: Self = parse(text, origin)?;
        check_version(cat.schema_version, origin)?;
        for e in &cat.experiments {
            if e.nucleon_count == 0 || !(e.superposition_time > 0.0) {
                return Err(Error::Config(format!("{origin}: experiment '{}' needs positive n and t", e.name)));
            }
        }
        Ok(cat)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text, &path.display().to_string())
    }
}

//! Experiment configuration.
//!
//! ```toml
//! system = "builtin:goldstein-kac-1d"
//! profile = "both"
//! norms = [{ p = 2, q = 1 }, { p = "inf", q = 1 }]
//!
//! [grid]
//! n = 8192
//! half_width = 400.0
//!
//! [initial]
//! kind = "gaussian"
//! sigma = 0.5
//!
//! [cutoff]
//! eps = "max"
//!
//! [schedule]
//! t_min = 5.0
//! t_max = 80.0
//! count = 12
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use super::HarnessError;
use crate::spectral::InitialKind;

/// `p` in `[1, ∞]`; written as a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpExponent {
    Finite(f64),
    Infinity,
}

impl LpExponent {
    pub fn value(self) -> f64 {
        match self {
            Self::Finite(p) => p,
            Self::Infinity => f64::INFINITY,
        }
    }

    /// `1/p`, zero at infinity.
    pub fn reciprocal(self) -> f64 {
        1.0 / self.value()
    }

    pub fn label(self) -> String {
        match self {
            Self::Infinity => "Linf".into(),
            Self::Finite(p) => format!("L{p}"),
        }
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(p) => write!(f, "{p}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for LpExponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Finite(p) => s.serialize_f64(*p),
            Self::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for LpExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = LpExponent;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number ≥ 1 or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<LpExponent, E> {
                if v.is_infinite() && v > 0.0 {
                    Ok(LpExponent::Infinity)
                } else if v >= 1.0 {
                    Ok(LpExponent::Finite(v))
                } else {
                    Err(E::custom(format!("exponent {v} is below 1")))
                }
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<LpExponent, E> {
                self.visit_f64(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<LpExponent, E> {
                self.visit_f64(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<LpExponent, E> {
                match v {
                    "inf" | "infinity" => Ok(LpExponent::Infinity),
                    other => Err(E::custom(format!("unknown exponent {other:?}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormPair {
    pub p: LpExponent,
    pub q: LpExponent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Phi,
    Psi,
    Both,
}

impl Profile {
    pub fn phi(self) -> bool {
        matches!(self, Self::Phi | Self::Both)
    }

    pub fn psi(self) -> bool {
        matches!(self, Self::Psi | Self::Both)
    }
}

/// `"auto"`, `"max"` or an explicit radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RadiusChoice {
    Value(f64),
    Named(NamedRadius),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedRadius {
    Auto,
    Max,
}

impl Default for RadiusChoice {
    fn default() -> Self {
        Self::Named(NamedRadius::Auto)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub half_width: f64,
}

/// Unknown keys are rejected by the tagged `kind` variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialConfig {
    #[serde(flatten)]
    pub kind: InitialKind,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffConfig {
    #[serde(default)]
    pub eps: RadiusChoice,
    #[serde(default)]
    pub rho: RadiusChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub t_min: f64,
    pub t_max: f64,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_true")]
    pub log_spaced: bool,
}

fn default_count() -> usize {
    12
}

fn default_true() -> bool {
    true
}

fn default_norms() -> Vec<NormPair> {
    vec![NormPair {
        p: LpExponent::Finite(2.0),
        q: LpExponent::Finite(1.0),
    }]
}

fn default_profile() -> Profile {
    Profile::Both
}

fn default_tolerance() -> f64 {
    0.15
}

fn default_min_r2() -> f64 {
    0.98
}

impl Schedule {
    pub fn times(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.t_min],
            c => (0..c)
                .map(|i| {
                    let s = i as f64 / (c - 1) as f64;
                    if self.log_spaced {
                        self.t_min * (self.t_max / self.t_min).powf(s)
                    } else {
                        self.t_min + (self.t_max - self.t_min) * s
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `builtin:<name>` or a system file path relative to the config file.
    pub system: String,
    pub grid: GridConfig,
    pub initial: InitialConfig,
    #[serde(default)]
    pub cutoff: CutoffConfig,
    pub schedule: Schedule,
    #[serde(default = "default_norms")]
    pub norms: Vec<NormPair>,
    #[serde(default = "default_profile")]
    pub profile: Profile,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_min_r2")]
    pub remainder_min_r2: f64,
    #[serde(default)]
    pub snapshots: bool,
    /// Directory used to resolve relative paths; set by [`load_config`].
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let s = &self.schedule;
        if !(s.t_min > 0.0 && s.t_max >= s.t_min && s.t_max.is_finite()) {
            return Err(HarnessError::Config(format!(
                "schedule [{}, {}] is not increasing",
                s.t_min, s.t_max
            )));
        }
        if s.count > 0 && s.t_min < 1.0 {
            return Err(HarnessError::Config(
                "t_min must be at least 1 for rate fitting".into(),
            ));
        }
        for pair in &self.norms {
            if pair.q.value() > pair.p.value() {
                return Err(HarnessError::Config(format!(
                    "norm pair needs q ≤ p, got p = {}, q = {}",
                    pair.p, pair.q
                )));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(HarnessError::Config("tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn output_dir(&self) -> Option<PathBuf> {
        self.output.as_ref().map(|o| match &self.base_dir {
            Some(b) if o.is_relative() => b.join(o),
            _ => o.clone(),
        })
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let cfg: ExperimentConfig =
        toml::from_str(text).map_err(|e| HarnessError::Config(e.message().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = parse_config(&text)?;
    cfg.base_dir = path.parent().map(Path::to_path_buf);
    Ok(cfg)
}

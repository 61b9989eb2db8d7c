//! Run configuration: JSON documents and flag overrides sharing one schema.
//! Inner caps accept either absolute integers or `n`-suffixed fractions like
//! "0.07n" (rounded to the nearest integer, at least 1).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use vmprox_core::{Algorithm, InnerLengthRule, Scheme, SolverConfig};

/// Inner-loop cap: absolute, or a fraction of the sample count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerCap {
    Absolute(usize),
    FractionOfN(f64),
}

impl InnerCap {
    pub fn resolve(&self, n: usize) -> usize {
        match *self {
            InnerCap::Absolute(m) => m.max(1),
            InnerCap::FractionOfN(f) => ((f * n as f64).round() as usize).max(1),
        }
    }
}

impl FromStr for InnerCap {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(frac) = s.strip_suffix(['n', 'N']) {
            let f: f64 = frac
                .trim()
                .parse()
                .map_err(|_| format!("bad fraction in inner cap '{s}'"))?;
            if !(f > 0.0 && f.is_finite()) {
                return Err(format!("inner cap fraction must be positive, got '{s}'"));
            }
            Ok(InnerCap::FractionOfN(f))
        } else {
            let m: usize = s
                .parse()
                .map_err(|_| format!("bad inner cap '{s}', expected integer or '<frac>n'"))?;
            if m == 0 {
                return Err("inner cap must be at least 1".to_string());
            }
            Ok(InnerCap::Absolute(m))
        }
    }
}

impl fmt::Display for InnerCap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InnerCap::Absolute(m) => write!(f, "{m}"),
            InnerCap::FractionOfN(x) => write!(f, "{x}n"),
        }
    }
}

impl Serialize for InnerCap {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            InnerCap::Absolute(m) => serializer.serialize_u64(*m as u64),
            InnerCap::FractionOfN(_) => serializer.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for InnerCap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CapVisitor;
        impl Visitor<'_> for CapVisitor {
            type Value = InnerCap;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a string like \"0.07n\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<InnerCap, E> {
                if v == 0 {
                    return Err(E::custom("inner cap must be at least 1"));
                }
                Ok(InnerCap::Absolute(v as usize))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<InnerCap, E> {
                if v <= 0 {
                    return Err(E::custom("inner cap must be positive"));
                }
                Ok(InnerCap::Absolute(v as usize))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<InnerCap, E> {
                v.parse().map_err(E::custom)
            }
        }
        deserializer.deserialize_any(CapVisitor)
    }
}

fn default_eta0() -> f64 {
    0.1
}

fn default_omega() -> f64 {
    1.0
}

fn default_reference_tol() -> f64 {
    1e-13
}

/// One run's full specification. JSON documents use exactly these field
/// names; command-line flags override file values.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub dataset: PathBuf,
    pub algorithm: String,
    #[serde(default)]
    pub lambda1: f64,
    #[serde(default)]
    pub lambda2: f64,
    pub m: InnerCap,
    pub b: usize,
    pub k: usize,
    #[serde(default = "default_eta0")]
    pub eta0: f64,
    #[serde(default = "default_omega")]
    pub omega: f64,
    #[serde(default)]
    pub sampling: SamplingChoice,
    #[serde(default)]
    pub inner_rule: Option<InnerRuleChoice>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_reference_tol")]
    pub reference_tol: f64,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// When set, wall-clock seconds are recorded per epoch. Off by default
    /// so identical specs produce byte-identical CSVs.
    #[serde(default)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SamplingChoice {
    #[default]
    Uniform,
    Importance,
}

impl SamplingChoice {
    pub fn to_scheme(self) -> Scheme {
        match self {
            SamplingChoice::Uniform => Scheme::Uniform,
            SamplingChoice::Importance => Scheme::Importance,
        }
    }
}

impl FromStr for SamplingChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(SamplingChoice::Uniform),
            "importance" => Ok(SamplingChoice::Importance),
            other => Err(format!("unknown sampling scheme '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum InnerRuleChoice {
    Random,
    Fixed,
}

impl InnerRuleChoice {
    pub fn to_rule(self) -> InnerLengthRule {
        match self {
            InnerRuleChoice::Random => InnerLengthRule::RandomUniform,
            InnerRuleChoice::Fixed => InnerLengthRule::Fixed,
        }
    }
}

impl FromStr for InnerRuleChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(InnerRuleChoice::Random),
            "fixed" => Ok(InnerRuleChoice::Fixed),
            other => Err(format!("unknown inner-length rule '{other}'")),
        }
    }
}

impl RunSpec {
    /// Parses the algorithm tag.
    pub fn algorithm(&self) -> Result<Algorithm, String> {
        Algorithm::from_name(&self.algorithm)
            .ok_or_else(|| format!("unknown algorithm '{}'", self.algorithm))
    }

    /// Validates and lowers the spec into a solver config for a dataset of
    /// `n` samples.
    pub fn to_solver_config(&self, n: usize) -> Result<SolverConfig, String> {
        let algorithm = self.algorithm()?;
        if self.lambda1 < 0.0 || self.lambda2 < 0.0 {
            return Err("regularization weights must be nonnegative".to_string());
        }
        let mut config = SolverConfig::new(algorithm, self.m.resolve(n), self.b, self.k, self.eta0);
        config.omega = self.omega;
        config.scheme = self.sampling.to_scheme();
        config.seed = self.seed;
        if let Some(rule) = self.inner_rule {
            config.inner_rule = rule.to_rule();
        }
        if self.reference_tol <= 0.0 {
            return Err("reference tolerance must be positive".to_string());
        }
        config.validate(n).map_err(|e| e.to_string())?;
        Ok(config)
    }

    /// The regularizer of the experimental split: the l1 term (ridge lives
    /// in the smooth part).
    pub fn regularizer(&self) -> vmprox_core::Regularizer {
        if self.lambda1 > 0.0 {
            vmprox_core::Regularizer::L1(self.lambda1)
        } else {
            vmprox_core::Regularizer::Zero
        }
    }
}

/// Loads one or more specs from a JSON file holding either a single object
/// or an array of objects.
pub fn load_specs(path: &std::path::Path) -> Result<Vec<RunSpec>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    if let Ok(single) = serde_json::from_str::<RunSpec>(&text) {
        return Ok(vec![single]);
    }
    serde_json::from_str::<Vec<RunSpec>>(&text)
        .map_err(|e| format!("cannot parse config {}: {e}", path.display()))
}

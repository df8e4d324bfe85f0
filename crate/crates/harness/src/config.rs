use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use vinolab_core::Caps;

use crate::HarnessError;

pub const CAP_ENV: &str = "VINOLAB_CAP";

/// One experiment. Rationals are kept as the `p/q` strings they were given in
/// and parsed on use, so a config file round-trips unchanged.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub command: String,
    pub sets: Vec<PathBuf>,
    pub s: usize,
    pub k: usize,
    pub l_list: Vec<usize>,
    pub u: Option<usize>,
    pub epsilon: String,
    pub delta: Option<String>,
    /// Diameter exponent to test `X_A <= |A|^m` against; recorded, never enforced.
    pub m: Option<String>,
    pub seed: u64,
    /// Uniform resource cap; `None` keeps the library defaults.
    pub cap: Option<u64>,
    pub outputs: Vec<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            command: "verify".into(),
            sets: Vec::new(),
            s: 3,
            k: 2,
            l_list: vec![2],
            u: None,
            epsilon: "1/10".into(),
            delta: None,
            m: None,
            seed: 42,
            cap: None,
            outputs: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.k == 0 || self.s == 0 {
            return Err(HarnessError::Config("s and k must be >= 1".into()));
        }
        if self.l_list.contains(&0) {
            return Err(HarnessError::Config("every l must be >= 1".into()));
        }
        self.epsilon()?;
        self.delta()?;
        self.m()?;
        if self.cap == Some(0) {
            return Err(HarnessError::Config("cap must be positive".into()));
        }
        Ok(())
    }

    pub fn epsilon(&self) -> Result<BigRational, HarnessError> {
        parse_positive_rational(&self.epsilon)
    }

    pub fn delta(&self) -> Result<Option<BigRational>, HarnessError> {
        self.delta.as_deref().map(parse_positive_rational).transpose()
    }

    pub fn m(&self) -> Result<Option<BigRational>, HarnessError> {
        self.m.as_deref().map(parse_positive_rational).transpose()
    }

    pub fn caps(&self) -> Caps {
        self.cap.map(Caps::uniform).unwrap_or_default()
    }
}

/// Parses `p/q` or a bare integer.
pub fn parse_rational(text: &str) -> Result<BigRational, HarnessError> {
    let bad = || HarnessError::Config(format!("not a rational p/q: {text:?}"));
    let text = text.trim();
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

pub fn parse_positive_rational(text: &str) -> Result<BigRational, HarnessError> {
    let r = parse_rational(text)?;
    if !r.is_positive() {
        return Err(HarnessError::Config(format!("{text:?} must be positive")));
    }
    Ok(r)
}

/// Accepts `100000000`, `1e8` or `2.5e6`; the value must be a positive integer.
pub fn parse_cap(text: &str) -> Result<u64, HarnessError> {
    let bad = || HarnessError::Config(format!("not a positive integer cap: {text:?}"));
    let text = text.trim().replace('_', "");
    if let Ok(v) = text.parse::<u64>() {
        return if v == 0 { Err(bad()) } else { Ok(v) };
    }
    let v: f64 = text.parse().map_err(|_| bad())?;
    if !v.is_finite() || v < 1.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
        return Err(bad());
    }
    Ok(v as u64)
}

/// A `--cap` flag wins over the environment, which wins over the defaults.
pub fn resolve_cap(flag: Option<&str>, env: Option<&str>) -> Result<Option<u64>, HarnessError> {
    match (flag, env) {
        (Some(f), _) => parse_cap(f).map(Some),
        (None, Some(e)) if !e.trim().is_empty() => parse_cap(e).map(Some),
        _ => Ok(None),
    }
}

//! Ground sets of distinct integers, their moment-curve embedding and the
//! deterministic set generators used by experiments.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::key::PowerSumKey;

/// A finite set of distinct integers, stored in increasing order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroundSet {
    elements: Vec<BigInt>,
}

impl GroundSet {
    /// Sorts `raw` and rejects repeats rather than silently deduplicating them.
    pub fn new(raw: Vec<BigInt>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut elements = raw;
        elements.sort();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateElement(w[0].to_string()));
        }
        Ok(GroundSet { elements })
    }

    pub fn from_i64s(raw: &[i64]) -> Result<Self> {
        Self::new(raw.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// `{lo, lo+1, ..., hi}`.
    pub fn interval(lo: i64, hi: i64) -> Result<Self> {
        Self::new((lo..=hi).map(BigInt::from).collect())
    }

    pub fn elements(&self) -> &[BigInt] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn min(&self) -> &BigInt {
        &self.elements[0]
    }

    pub fn max(&self) -> &BigInt {
        self.elements.last().unwrap()
    }

    /// `X_A = max A - min A`.
    pub fn diameter(&self) -> BigInt {
        self.max() - self.min()
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&BigInt::zero())
    }

    pub fn all_positive(&self) -> bool {
        self.min().is_positive()
    }

    pub fn subset(&self, indices: impl IntoIterator<Item = usize>) -> Result<GroundSet> {
        GroundSet::new(indices.into_iter().map(|i| self.elements[i].clone()).collect())
    }

    /// `|A ∩ (j, j+1]| <= 1` for every integer `j` in `[min - 1, max]`.
    ///
    /// Distinct integers always pass; each interval `(j, j+1]` holds at most the
    /// single integer `j + 1`.
    pub fn is_well_spaced(&self) -> bool {
        self.elements.windows(2).all(|w| w[1] > w[0])
    }

    /// The same predicate evaluated by walking every `j` in `[min - 1, max]`.
    /// Returns `None` when the diameter exceeds `max_steps`.
    pub fn is_well_spaced_literal(&self, max_steps: u64) -> Option<bool> {
        let span = self.diameter().to_u64()?;
        if span > max_steps {
            return None;
        }
        let mut idx = 0;
        let mut j = self.min() - 1;
        while &j <= self.max() {
            let upper = &j + 1;
            let mut hits = 0;
            while idx < self.elements.len() && self.elements[idx] <= upper {
                if self.elements[idx] > j {
                    hits += 1;
                }
                idx += 1;
            }
            if hits > 1 {
                return Some(false);
            }
            j += 1;
        }
        Some(true)
    }

    /// `log X_A / log N`, the smallest `m` with `X_A <= N^m`. `None` when
    /// `N < 2` or `X_A = 0`.
    pub fn diameter_exponent(&self) -> Option<f64> {
        if self.len() < 2 {
            return None;
        }
        let x = crate::power::log10_bigint(&self.diameter());
        Some(x / (self.len() as f64).log10())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.elements.iter().map(|e| e.to_string()).collect()
    }

    /// Parses the set file format `{"elements": ["<decimal>", ...]}`.
    pub fn from_json(text: &str) -> std::result::Result<Self, SetFileError> {
        let file: SetFile = serde_json::from_str(text).map_err(|e| SetFileError::Parse(e.to_string()))?;
        let parsed = file
            .elements
            .iter()
            .map(|s| s.trim().parse::<BigInt>().map_err(|_| SetFileError::Parse(format!("not an integer: {s:?}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        GroundSet::new(parsed).map_err(SetFileError::Invalid)
    }

    pub fn to_json(&self) -> String {
        let file = SetFile { elements: self.to_strings() };
        serde_json::to_string(&file).expect("set file serializes")
    }
}

impl fmt::Debug for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_strings().join(","))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetFile {
    elements: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SetFileError {
    #[error("malformed set file: {0}")]
    Parse(String),
    #[error("invalid set: {0}")]
    Invalid(Error),
}

/// A point `(a, a², …, aᵏ)` of the moment curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentPoint {
    pub source: BigInt,
    pub coords: PowerSumKey,
}

/// The lift of a ground set to the degree-`k` moment curve, in ground order.
#[derive(Clone, Debug)]
pub struct MomentEmbedding {
    ground: GroundSet,
    degree: usize,
    points: Vec<MomentPoint>,
}

pub fn power_vector(a: &BigInt, k: usize) -> PowerSumKey {
    let mut comps = Vec::with_capacity(k);
    let mut p = BigInt::one();
    for _ in 0..k {
        p *= a;
        comps.push(p.clone());
    }
    PowerSumKey::from_bigints(comps)
}

pub fn moment_embed(ground: &GroundSet, k: usize) -> Result<MomentEmbedding> {
    if k == 0 {
        return Err(Error::InvalidParams("degree k must be >= 1".into()));
    }
    let points = ground
        .elements()
        .iter()
        .map(|a| MomentPoint {
            source: a.clone(),
            coords: power_vector(a, k),
        })
        .collect();
    Ok(MomentEmbedding {
        ground: ground.clone(),
        degree: k,
        points,
    })
}

impl MomentEmbedding {
    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> &[MomentPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn coords(&self) -> Vec<PowerSumKey> {
        self.points.iter().map(|p| p.coords.clone()).collect()
    }
}

/// Experiment input families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilySpec {
    Arithmetic { start: BigInt, step: BigInt, n: usize },
    Geometric { start: BigInt, ratio: BigInt, n: usize },
    /// Uniform sample without replacement from `[lo, hi]`.
    RandomSubset { lo: i64, hi: i64, n: usize, seed: u64 },
    Explicit { elements: Vec<BigInt> },
}

pub fn generate(spec: &FamilySpec) -> Result<GroundSet> {
    let invalid = |m: &str| Err(Error::InvalidSpec(m.to_string()));
    match spec {
        FamilySpec::Arithmetic { start, step, n } => {
            if *n == 0 {
                return invalid("n must be >= 1");
            }
            if step.is_zero() && *n > 1 {
                return invalid("step must be non-zero");
            }
            GroundSet::new((0..*n).map(|i| start + step * BigInt::from(i)).collect())
        }
        FamilySpec::Geometric { start, ratio, n } => {
            if *n == 0 {
                return invalid("n must be >= 1");
            }
            if *n > 1 && (start.is_zero() || ratio.is_zero() || ratio.abs().is_one()) {
                return invalid("geometric family needs start != 0 and |ratio| >= 2");
            }
            let mut out = Vec::with_capacity(*n);
            let mut term = start.clone();
            for _ in 0..*n {
                out.push(term.clone());
                term *= ratio;
            }
            GroundSet::new(out)
        }
        FamilySpec::RandomSubset { lo, hi, n, seed } => {
            if lo > hi {
                return invalid("empty range");
            }
            let size = (*hi as i128 - *lo as i128 + 1) as u128;
            if *n == 0 || *n as u128 > size {
                return invalid("cardinality exceeds range size");
            }
            let size = usize::try_from(size).map_err(|_| Error::InvalidSpec("range too large".into()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let picks = rand::seq::index::sample(&mut rng, size, *n);
            GroundSet::new(picks.into_iter().map(|i| BigInt::from(*lo) + BigInt::from(i)).collect())
        }
        FamilySpec::Explicit { elements } => GroundSet::new(elements.clone()),
    }
}

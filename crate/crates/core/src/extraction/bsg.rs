//! Energy splitting and certified small-doubling extraction.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::caps::Caps;
use crate::check::{rational_string, sig12, CheckRecord, Kind, Relation};
use crate::counting::additive_energy;
use crate::error::{Error, Result};
use crate::key::PowerSumKey;
use crate::power::{rat, rat_int, PowerExpr, GUARD_BAND};
use crate::sumsets::VectorSet;

/// Size of the pivot list tried by the popular-path search.
pub const PIVOTS: usize = 8;
/// Largest `|Z₁|` for which the exhaustive fallback runs.
pub const EXHAUSTIVE_MAX: usize = 20;

/// Constants of the Balog form of the extraction theorem, with natural logs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BsgConstants {
    #[serde(serialize_with = "ser_rational")]
    pub alpha: BigRational,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    pub log: &'static str,
}

fn ser_rational<S: serde::Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(v))
}

impl BsgConstants {
    pub fn new(alpha: &BigRational) -> Self {
        let a = alpha.to_f64().unwrap_or(f64::NAN);
        let l = (32.0 / a).ln();
        BsgConstants {
            alpha: alpha.clone(),
            c1: sig12(3.0 / 2f64.powi(19) * a.powi(3) / l),
            c2: sig12(2f64.powi(45) / 3.0 * l / a.powi(7)),
            log: "natural",
        }
    }
}

fn energy(a: &VectorSet, b: &VectorSet) -> BigUint {
    additive_energy(a.members(), b.members()).expect("operands share a dimension")
}

#[derive(Clone, Debug)]
pub struct PreBsg {
    /// `V`, the smaller side.
    pub z1: VectorSet,
    /// The energy-maximizing block of `U`, padded when it is the short last block.
    pub z2: VectorSet,
    pub blocks: usize,
    /// 0-based index of the chosen block.
    pub block: usize,
    pub padded: bool,
    pub block_energies: Vec<BigUint>,
    pub energy: BigUint,
    /// `Σ_{n ∈ Σ(G₁)} r(U, V; n)`.
    pub cross_mass: BigUint,
    pub records: Vec<CheckRecord>,
}

/// Splits `U` into blocks of size `|V|` and keeps the block with the largest
/// energy against `V`, certifying the Cauchy–Schwarz step
/// `r²·|Σ(G₁)|·max_i E(U_i, V) >= (Σ_{n ∈ Σ(G₁)} r(U, V; n))²`.
pub fn prebsg_split(u: &VectorSet, v: &VectorSet, sigma_g1: &VectorSet) -> Result<PreBsg> {
    if u.is_empty() || v.is_empty() {
        return Err(Error::EmptyInput);
    }
    if u.len() < v.len() {
        return Err(Error::InvalidParams(format!(
            "split needs |U| >= |V|, got {} < {}",
            u.len(),
            v.len()
        )));
    }
    let width = v.len();
    let chunks: Vec<VectorSet> = u
        .members()
        .chunks(width)
        .map(|c| VectorSet::from_sorted(u.dim(), c.to_vec()))
        .collect();
    let block_energies: Vec<BigUint> = chunks.iter().map(|c| energy(c, v)).collect();
    let mut block = 0;
    for (i, e) in block_energies.iter().enumerate() {
        if *e > block_energies[block] {
            block = i;
        }
    }
    let max_e = block_energies[block].clone();
    let padded = chunks[block].len() < width;
    let z2 = if padded {
        let need = width - chunks[block].len();
        let start = block * width;
        let extra = u.members()[..start].iter().take(need).cloned();
        VectorSet::new(u.dim(), chunks[block].members().iter().cloned().chain(extra))?
    } else {
        chunks[block].clone()
    };
    let e = energy(v, &z2);

    let mut cross = 0u64;
    for a in u.members() {
        for b in v.members() {
            if sigma_g1.contains(&a.add(b)) {
                cross += 1;
            }
        }
    }
    let cross_mass = BigUint::from(cross);
    let r = BigUint::from(chunks.len());
    let lhs = &r * &r * BigUint::from(sigma_g1.len()) * &max_e;
    let rhs = &cross_mass * &cross_mass;
    let records = vec![
        CheckRecord::ints(
            "prebsg",
            "r^2 |Σ(G₁)| max_i E(U_i,V) >= (Σ_{n∈Σ(G₁)} r(U,V;n))^2",
            Kind::Unconditional,
            BigInt::from(lhs),
            Relation::Ge,
            BigInt::from(rhs),
        )
        .with("r", chunks.len())
        .with("block", block)
        .with("padded", padded),
        CheckRecord::ints(
            "prebsg",
            "E(Z₁,Z₂) >= max_i E(U_i,V)",
            Kind::Unconditional,
            BigInt::from(e.clone()),
            Relation::Ge,
            BigInt::from(max_e),
        ),
    ];
    Ok(PreBsg {
        z1: v.clone(),
        z2,
        blocks: chunks.len(),
        block,
        padded,
        block_energies,
        energy: e,
        cross_mass,
        records,
    })
}

/// Certification level of a candidate: how many of `|S₂| >= |Z₁|^{1-ε/5}` and
/// `|S₂+S₂| <= |S₂|^{1+ε/2}` hold, then the smaller log10 margin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BsgScore {
    pub level: u8,
    pub margin: f64,
}

impl BsgScore {
    pub fn better_than(&self, other: &BsgScore) -> bool {
        (self.level, self.margin) > (other.level, other.margin)
    }
}

fn size_exponent(eps: &BigRational) -> BigRational {
    BigRational::one() - eps / rat_int(5)
}

fn doubling_exponent(eps: &BigRational) -> BigRational {
    BigRational::one() + eps / rat_int(2)
}

/// Scores a candidate of size `size` with `|S₂+S₂| = doubling`.
pub fn score(z1_len: usize, size: usize, doubling: usize, eps: &BigRational) -> (BsgScore, bool, bool) {
    let lower = PowerExpr::int_pow(z1_len, size_exponent(eps));
    let upper = PowerExpr::int_pow(size, doubling_exponent(eps));
    let size_ok = PowerExpr::int(size).compare(&lower).is_ge();
    let doubling_ok = PowerExpr::int(doubling).compare(&upper).is_le();
    let m1 = (size as f64).log10() - lower.log10();
    let m2 = upper.log10() - (doubling as f64).log10();
    let score = BsgScore {
        level: size_ok as u8 + doubling_ok as u8,
        margin: sig12(m1.min(m2)),
    };
    (score, size_ok, doubling_ok)
}

#[derive(Clone, Debug)]
pub struct BsgOutcome {
    pub s2: VectorSet,
    /// `|S₂+S₂|`.
    pub doubling: usize,
    pub score: BsgScore,
    pub size_ok: bool,
    pub doubling_ok: bool,
    /// `|S₂| >= C₁(α)|Z₁|` and `|S₂+S₂| <= C₂(α)|Z₁|`.
    pub theorem_size_ok: bool,
    pub theorem_doubling_ok: bool,
    pub constants: BsgConstants,
    /// Which candidate won: `whole`, `high-degree`, `pivot:<t>` or `exhaustive`.
    pub source: String,
    pub candidates: usize,
    pub exhaustive: bool,
    pub records: Vec<CheckRecord>,
}

impl BsgOutcome {
    pub fn certified(&self) -> bool {
        self.size_ok && self.doubling_ok
    }
}

fn doubling_of(s: &VectorSet) -> usize {
    let mut sums: Vec<PowerSumKey> = Vec::with_capacity(s.len() * (s.len() + 1) / 2);
    let m = s.members();
    for i in 0..m.len() {
        for j in i..m.len() {
            sums.push(m[i].add(&m[j]));
        }
    }
    sums.sort_unstable();
    sums.dedup();
    sums.len()
}

fn log_ge(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs - GUARD_BAND * rhs.abs().max(1.0)
}

/// Extracts `S₂ ⊆ Z₁` with small doubling from a pair with large energy.
///
/// Candidates are `Z₁` itself, the set of `z` with at least half the average
/// number of popular partners, and for each of the most represented sums `t`
/// the high-degree `z` that represent `t`. The best scoring candidate wins; if
/// none certifies and `|Z₁| <= 20`, subsets are searched exhaustively by
/// decreasing size.
pub fn bsg_extract(
    z1: &VectorSet,
    z2: &VectorSet,
    alpha: &BigRational,
    eps: &BigRational,
    caps: &Caps,
) -> Result<BsgOutcome> {
    if z1.is_empty() || z2.is_empty() {
        return Err(Error::EmptyInput);
    }
    if z1.len() != z2.len() {
        return Err(Error::InvalidParams(format!("|Z₁| = {} but |Z₂| = {}", z1.len(), z2.len())));
    }
    if *eps <= BigRational::zero() {
        return Err(Error::InvalidParams("epsilon must be positive".into()));
    }
    if *alpha <= BigRational::zero() {
        return Err(Error::DegenerateAlpha(rational_string(alpha)));
    }
    let n = z1.len();
    let e = energy(z1, z2);
    let needed = alpha * rat_int(BigInt::from(n).pow(3));
    if BigRational::from_integer(BigInt::from(e.clone())) < needed {
        return Err(Error::HypothesisViolated(format!(
            "E(Z₁,Z₂) = {} < α|Z₁|³ = {}",
            e,
            rational_string(&needed)
        )));
    }
    let work = BigUint::from(n) * BigUint::from(n);
    if work > BigUint::from(caps.iterations) {
        return Err(Error::limit("energy pairs", work, caps.iterations));
    }

    // r(t) for t ∈ Z₁ + Z₂, and z + w indexed by (i, j).
    let mut reps: HashMap<PowerSumKey, u64> = HashMap::new();
    for a in z1.members() {
        for b in z2.members() {
            *reps.entry(a.add(b)).or_insert(0) += 1;
        }
    }
    // Popular: r(t) >= r̄/2 with r̄ = E/(|Z₁||Z₂|), i.e. 2 r(t) n² >= E.
    let popular = |t: &PowerSumKey| BigUint::from(2 * reps[t]) * BigUint::from(n * n) >= e;
    let degrees: Vec<usize> = z1
        .members()
        .iter()
        .map(|a| z2.members().iter().filter(|b| popular(&a.add(b))).count())
        .collect();
    let total_deg: usize = degrees.iter().sum();
    // deg(z) >= avg/2  <=>  2 n deg(z) >= Σ deg.
    let high: Vec<bool> = degrees.iter().map(|&d| 2 * n * d >= total_deg).collect();

    let mut ranked: Vec<(&PowerSumKey, u64)> = reps.iter().map(|(k, &c)| (k, c)).collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let mut candidates: Vec<(String, VectorSet)> = vec![("whole".into(), z1.clone())];
    let high_set: Vec<PowerSumKey> = z1
        .members()
        .iter()
        .zip(&high)
        .filter(|(_, &h)| h)
        .map(|(a, _)| a.clone())
        .collect();
    candidates.push(("high-degree".into(), VectorSet::from_sorted(z1.dim(), high_set)));
    for (t, _) in ranked.iter().take(PIVOTS) {
        let members: Vec<PowerSumKey> = z1
            .members()
            .iter()
            .zip(&high)
            .filter(|(a, &h)| h && z2.contains(&t.sub(a)))
            .map(|(a, _)| a.clone())
            .collect();
        candidates.push((format!("pivot:{}", t), VectorSet::from_sorted(z1.dim(), members)));
    }
    candidates.retain(|(_, c)| !c.is_empty());
    let mut seen = std::collections::HashSet::new();
    candidates.retain(|(_, c)| seen.insert(c.clone()));

    let mut best: Option<(String, VectorSet, usize, BsgScore, bool, bool)> = None;
    for (label, cand) in &candidates {
        let d = doubling_of(cand);
        let (sc, a, b) = score(n, cand.len(), d, eps);
        if best.as_ref().is_none_or(|x| sc.better_than(&x.3)) {
            best = Some((label.clone(), cand.clone(), d, sc, a, b));
        }
    }
    let mut best = best.expect("Z₁ itself is always a candidate");
    let mut exhaustive = false;
    if best.3.level < 2 && n <= EXHAUSTIVE_MAX {
        exhaustive = true;
        if let Some(found) = exhaustive_search(z1, eps, caps)? {
            let d = doubling_of(&found);
            let (sc, a, b) = score(n, found.len(), d, eps);
            best = ("exhaustive".into(), found, d, sc, a, b);
        }
    }
    let (source, s2, doubling, sc, size_ok, doubling_ok) = best;

    let constants = BsgConstants::new(alpha);
    let log_n = (n as f64).log10();
    let theorem_size_ok = log_ge((s2.len() as f64).log10(), constants.c1.log10() + log_n);
    let theorem_doubling_ok = log_ge(constants.c2.log10() + log_n, (doubling as f64).log10());

    let size = PowerExpr::int(s2.len());
    let dbl = PowerExpr::int(doubling);
    let float_record = |name: &str, lhs: f64, rel: Relation, rhs: f64, ok: bool| {
        let mut r = CheckRecord::predicate("bsg", name, Kind::Conditional, rel, ok);
        r.lhs = Some(crate::check::Quantity::Power { log10: sig12(lhs) });
        r.rhs = Some(crate::check::Quantity::Power { log10: sig12(rhs) });
        r
    };
    let records = vec![
        float_record(
            "|S₂| >= C₁(α)|Z₁|",
            (s2.len() as f64).log10(),
            Relation::Ge,
            constants.c1.log10() + log_n,
            theorem_size_ok,
        )
        .with("C1", constants.c1)
        .with("log", constants.log),
        float_record(
            "|S₂+S₂| <= C₂(α)|Z₁|",
            (doubling as f64).log10(),
            Relation::Le,
            constants.c2.log10() + log_n,
            theorem_doubling_ok,
        )
        .with("C2", constants.c2)
        .with("log", constants.log),
        CheckRecord::compare(
            "bsg",
            "|S₂| >= |Z₁|^{1-ε/5}",
            Kind::Conditional,
            &size,
            Relation::Ge,
            &PowerExpr::int_pow(n, size_exponent(eps)),
        ),
        CheckRecord::compare(
            "bsg",
            "|S₂+S₂| <= |S₂|^{1+ε/2}",
            Kind::Conditional,
            &dbl,
            Relation::Le,
            &PowerExpr::int_pow(s2.len(), doubling_exponent(eps)),
        ),
        CheckRecord::witness("bsg", "selected candidate")
            .with("source", &source)
            .with("candidates", candidates.len())
            .with("exhaustive", exhaustive)
            .with("level", sc.level)
            .with("margin", sc.margin)
            .with("alpha", rational_string(alpha))
            .with("energy", &e),
    ];
    Ok(BsgOutcome {
        s2,
        doubling,
        score: sc,
        size_ok,
        doubling_ok,
        theorem_size_ok,
        theorem_doubling_ok,
        constants,
        source,
        candidates: candidates.len(),
        exhaustive,
        records,
    })
}

/// `floor(x)` for a power expression.
fn floor_int(x: &PowerExpr) -> BigInt {
    let c = x.ceil_int();
    if PowerExpr::int(c.clone()).compare(x).is_eq() {
        c
    } else {
        c - 1
    }
}

/// First subset in (decreasing size, lexicographic) order meeting both
/// pipeline conditions.
fn exhaustive_search(z1: &VectorSet, eps: &BigRational, caps: &Caps) -> Result<Option<VectorSet>> {
    let n = z1.len();
    let m = z1.members();
    let mut ids: HashMap<PowerSumKey, usize> = HashMap::new();
    let mut pair = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in i..n {
            let next = ids.len();
            let id = *ids.entry(m[i].add(&m[j])).or_insert(next);
            pair[i][j] = id;
            pair[j][i] = id;
        }
    }
    let words = ids.len().div_ceil(64);
    let min_size = PowerExpr::int_pow(n, size_exponent(eps)).ceil_int().to_usize().unwrap_or(n).max(1);
    let mut spent: u64 = 0;
    for size in (min_size..=n).rev() {
        let bound = floor_int(&PowerExpr::int_pow(size, doubling_exponent(eps)));
        let bound = bound.to_usize().unwrap_or(usize::MAX);
        let cost = crate::counting::binomial(n as u64, size as u64) * BigUint::from(size * size);
        spent = spent.saturating_add(cost.to_u64().unwrap_or(u64::MAX));
        if spent > caps.iterations {
            return Err(Error::limit("exhaustive subset search", spent, caps.iterations));
        }
        let mut marks = vec![0u64; words];
        for combo in (0..n).combinations(size) {
            marks.iter_mut().for_each(|w| *w = 0);
            for (ai, &a) in combo.iter().enumerate() {
                for &b in &combo[ai..] {
                    let id = pair[a][b];
                    marks[id / 64] |= 1 << (id % 64);
                }
            }
            let count: usize = marks.iter().map(|w| w.count_ones() as usize).sum();
            if count <= bound {
                let members = combo.iter().map(|&i| m[i].clone()).collect();
                return Ok(Some(VectorSet::from_sorted(z1.dim(), members)));
            }
        }
    }
    Ok(None)
}

/// `ε·k(k+1)/43200`, the slope of the admissible `log α⁻¹` in `log N`.
pub fn hypothesis_slope(eps: &BigRational, k: usize) -> BigRational {
    eps * rat_int(BigInt::from(k * (k + 1))) / rat(43200, 1)
}

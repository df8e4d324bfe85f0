//! Exact Vinogradov counts, representation tables and energies.
//!
//! `J_{s,k}(A)` is computed from the `s`-fold representation table of the
//! moment curve, built by convolving the `(s-1)`-table with the 1-table, so
//! the cost is `N · |table|` per step rather than `N^{2s}` overall. The literal
//! `2s`-tuple enumeration is kept as an independent oracle.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::caps::Caps;
use crate::check::{rational_string, sig12};
use crate::error::{Error, Result};
use crate::exactset::{moment_embed, GroundSet, MomentEmbedding};
use crate::key::PowerSumKey;
use crate::power::{log10_biguint, rat_int, PowerExpr};

pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    (0..r).fold(BigUint::one(), |acc, i| acc * BigUint::from(n - i) / BigUint::from(i + 1))
}

pub fn pow_u(n: usize, e: usize) -> BigUint {
    num_traits::pow(BigUint::from(n), e)
}

/// `r(𝒜ˢ; n⃗)` for every realized `n⃗`, in increasing key order.
#[derive(Clone, Debug)]
pub struct RepTable {
    degree: usize,
    arity: usize,
    entries: Vec<(PowerSumKey, u128)>,
}

impl RepTable {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn entries(&self) -> &[(PowerSumKey, u128)] {
        &self.entries
    }

    /// `|s𝒜|`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &PowerSumKey) -> u128 {
        self.entries
            .binary_search_by(|(k, _)| k.cmp(key))
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    pub fn total(&self) -> BigUint {
        self.entries.iter().map(|(_, c)| BigUint::from(*c)).sum()
    }

    /// `Σ r²`, which equals `J_{s,k}`.
    pub fn sum_squares(&self) -> BigUint {
        self.entries.iter().map(|(_, c)| BigUint::from(*c) * BigUint::from(*c)).sum()
    }

    pub fn max_count(&self) -> u128 {
        self.entries.iter().map(|(_, c)| *c).max().unwrap_or(0)
    }
}

/// Representation table of `s`-fold sums of `points` (a multiset is allowed).
pub fn rep_table_of_points(points: &[PowerSumKey], s: usize, caps: &Caps) -> Result<RepTable> {
    if s == 0 {
        return Err(Error::InvalidParams("s must be >= 1".into()));
    }
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let dim = points[0].dim();
    if let Some(p) = points.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch(dim, p.dim()));
    }
    let n = points.len();
    if pow_u(n, s) >= BigUint::one() << 127u32 {
        return Err(Error::limit("representation counts", pow_u(n, s), caps.table_entries));
    }
    let mut table: HashMap<PowerSumKey, u128> = HashMap::new();
    for p in points {
        *table.entry(p.clone()).or_insert(0) += 1;
    }
    for step in 2..=s {
        let bound = binomial((n + step - 1) as u64, step as u64).min(BigUint::from(table.len()) * BigUint::from(n));
        if bound > BigUint::from(caps.table_entries) {
            return Err(Error::limit("representation table", bound, caps.table_entries));
        }
        if BigUint::from(table.len()) * BigUint::from(n) > BigUint::from(caps.iterations) {
            return Err(Error::limit("convolution steps", table.len() * n, caps.iterations));
        }
        let mut next: HashMap<PowerSumKey, u128> = HashMap::with_capacity(table.len() * 2);
        for (key, count) in &table {
            for p in points {
                *next.entry(key.add(p)).or_insert(0) += count;
            }
        }
        table = next;
    }
    let mut entries: Vec<_> = table.into_iter().collect();
    entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    Ok(RepTable {
        degree: dim,
        arity: s,
        entries,
    })
}

pub fn rep_table(emb: &MomentEmbedding, s: usize, caps: &Caps) -> Result<RepTable> {
    rep_table_of_points(&emb.coords(), s, caps)
}

/// Number of diagonal solutions: `Σ (s!/Π mᵢ!)²` over multisets of size `s`
/// drawn from `n` symbols, i.e. `(s!)² [xˢ] (Σ_{m<=s} xᵐ/(m!)²)ⁿ`.
pub fn diagonal_count(n: usize, s: usize) -> BigUint {
    let fact = |m: usize| (1..=m).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
    let base: Vec<BigRational> = (0..=s)
        .map(|m| BigRational::new(BigInt::one(), fact(m) * fact(m)))
        .collect();
    let mul = |a: &[BigRational], b: &[BigRational]| {
        let mut out = vec![BigRational::zero(); s + 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(s + 1 - i) {
                out[i + j] += x * y;
            }
        }
        out
    };
    let mut result = vec![BigRational::zero(); s + 1];
    result[0] = BigRational::one();
    let mut power = base;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = mul(&result, &power);
        }
        e >>= 1;
        if e > 0 {
            power = mul(&power, &power);
        }
    }
    let sf = fact(s);
    let v = &result[s] * BigRational::from_integer(&sf * &sf);
    debug_assert!(v.is_integer());
    v.to_integer().to_biguint().expect("diagonal count is non-negative")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VinogradovStats {
    #[serde(skip)]
    pub n: usize,
    #[serde(skip)]
    pub s: usize,
    #[serde(skip)]
    pub k: usize,
    #[serde(rename = "J", serialize_with = "ser_decimal")]
    pub j: BigUint,
    #[serde(serialize_with = "ser_alpha", skip_serializing_if = "Option::is_none")]
    pub alpha: Option<BigRational>,
    #[serde(serialize_with = "ser_decimal")]
    pub rep_sup: BigUint,
    #[serde(serialize_with = "ser_decimal")]
    pub diag: BigUint,
    #[serde(serialize_with = "ser_float")]
    pub lambda_emp: f64,
    #[serde(skip)]
    pub sumset_size: usize,
}

fn ser_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_float<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(sig12(*v))
}

fn ser_alpha<S: serde::Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let a = v.as_ref().expect("skipped when absent");
    let mut m = s.serialize_map(Some(2))?;
    m.serialize_entry("num", &a.numer().to_string())?;
    m.serialize_entry("den", &a.denom().to_string())?;
    m.end()
}

/// `2s - k(k+1)/2`, the critical exponent of `J_{s,k}`.
pub fn critical_exponent(s: usize, k: usize) -> i64 {
    2 * s as i64 - (k * (k + 1) / 2) as i64
}

/// `J / N^{2s - k(k+1)/2}` as an exact rational, for `2s >= k(k+1)`.
pub fn alpha_of(j: &BigUint, n: usize, s: usize, k: usize) -> Option<BigRational> {
    let e = critical_exponent(s, k);
    if 2 * s < k * (k + 1) || e < 0 {
        return None;
    }
    Some(BigRational::new(BigInt::from(j.clone()), BigInt::from(pow_u(n, e as usize))))
}

/// `max(0, log J / log N - (2s - k(k+1)/2))`; zero when `N < 2`.
pub fn excess_exponent(j: &BigUint, n: usize, s: usize, k: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let v = log10_biguint(j) / (n as f64).log10() - critical_exponent(s, k) as f64;
    v.max(0.0)
}

pub fn stats_from_table(table: &RepTable, n: usize) -> VinogradovStats {
    let (s, k) = (table.arity(), table.degree());
    let j = table.sum_squares();
    VinogradovStats {
        n,
        s,
        k,
        alpha: alpha_of(&j, n, s, k),
        rep_sup: BigUint::from(table.max_count()),
        diag: diagonal_count(n, s),
        lambda_emp: excess_exponent(&j, n, s, k),
        sumset_size: table.len(),
        j,
    }
}

pub fn vinogradov_count(a: &GroundSet, s: usize, k: usize, caps: &Caps) -> Result<VinogradovStats> {
    let emb = moment_embed(a, k)?;
    let table = rep_table(&emb, s, caps)?;
    Ok(stats_from_table(&table, a.len()))
}

/// Literal count of `2s`-tuples satisfying all `k` power-sum equations.
pub fn vinogradov_count_naive(a: &GroundSet, s: usize, k: usize, caps: &Caps) -> Result<BigUint> {
    if s == 0 || k == 0 {
        return Err(Error::InvalidParams("s and k must be >= 1".into()));
    }
    let n = a.len();
    let total = pow_u(n, 2 * s);
    if total > BigUint::from(caps.iterations) {
        return Err(Error::limit("naive enumeration", total, caps.iterations));
    }
    let total = total.to_u64().unwrap();
    let powers: Vec<Vec<BigInt>> = a
        .elements()
        .iter()
        .map(|x| (1..=k).map(|j| num_traits::pow(x.clone(), j)).collect())
        .collect();
    let max_abs = powers.iter().flatten().map(|p| p.magnitude().clone()).max().unwrap();
    let fits = max_abs * BigUint::from(2 * s) < (BigUint::one() << 126u32);
    let mut digits = vec![0usize; 2 * s];
    let mut count: u64 = 0;
    if fits {
        let small: Vec<Vec<i128>> = powers
            .iter()
            .map(|row| row.iter().map(|p| p.to_i128().unwrap()).collect())
            .collect();
        for _ in 0..total {
            let solves = (0..k).all(|j| {
                let lhs: i128 = digits[..s].iter().map(|&d| small[d][j]).sum();
                let rhs: i128 = digits[s..].iter().map(|&d| small[d][j]).sum();
                lhs == rhs
            });
            count += solves as u64;
            advance(&mut digits, n);
        }
    } else {
        for _ in 0..total {
            let solves = (0..k).all(|j| {
                let lhs: BigInt = digits[..s].iter().map(|&d| &powers[d][j]).sum();
                let rhs: BigInt = digits[s..].iter().map(|&d| &powers[d][j]).sum();
                lhs == rhs
            });
            count += solves as u64;
            advance(&mut digits, n);
        }
    }
    Ok(BigUint::from(count))
}

fn advance(digits: &mut [usize], base: usize) {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return;
        }
        *d = 0;
    }
}

/// `E(X, Y)`: solutions of `x₁ + y₁ = x₂ + y₂` with `xᵢ ∈ X`, `yᵢ ∈ Y`.
pub fn additive_energy(xs: &[PowerSumKey], ys: &[PowerSumKey]) -> Result<BigUint> {
    let dim = xs.first().or(ys.first()).map(|v| v.dim()).unwrap_or(0);
    if let Some(v) = xs.iter().chain(ys).find(|v| v.dim() != dim) {
        return Err(Error::DimensionMismatch(dim, v.dim()));
    }
    let mut reps: HashMap<PowerSumKey, u64> = HashMap::new();
    for x in xs {
        for y in ys {
            *reps.entry(x.add(y)).or_insert(0) += 1;
        }
    }
    Ok(reps.values().map(|&c| BigUint::from(c) * BigUint::from(c)).sum())
}

/// Quotient multiplicities `d(x) = |{(a₁, a₂) : x = a₁/a₂}|`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientStats {
    pub d: BTreeMap<BigRational, u64>,
    /// Multiplicative energy `M(A) = Σ d(x)²`.
    pub m: BigUint,
    pub n: usize,
}

impl QuotientStats {
    /// `|A/A|`.
    pub fn support(&self) -> usize {
        self.d.len()
    }

    pub fn d_of(&self, x: &BigRational) -> u64 {
        self.d.get(x).copied().unwrap_or(0)
    }
}

pub fn quotient_counts(a: &GroundSet) -> Result<QuotientStats> {
    if a.contains_zero() {
        return Err(Error::ZeroElement);
    }
    let mut d = BTreeMap::new();
    for a1 in a.elements() {
        for a2 in a.elements() {
            *d.entry(BigRational::new(a1.clone(), a2.clone())).or_insert(0u64) += 1;
        }
    }
    let m = d.values().map(|&c| BigUint::from(c) * BigUint::from(c)).sum();
    Ok(QuotientStats { d, m, n: a.len() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundReport {
    #[serde(rename = "J")]
    pub j: String,
    pub n_pow_s: String,
    pub sumset_size: usize,
    /// `ceil(N^{2s} / |s𝒜|)`.
    pub cs_bound: String,
    pub diagonal_ok: bool,
    pub cauchy_schwarz_ok: bool,
    pub pass: bool,
}

/// Constant-free forms of the lower bound: `J >= N^s` and `J·|s𝒜| >= N^{2s}`.
pub fn lower_bound_check(a: &GroundSet, s: usize, k: usize, caps: &Caps) -> Result<LowerBoundReport> {
    let stats = vinogradov_count(a, s, k, caps)?;
    Ok(lower_bound_from_stats(&stats))
}

pub fn lower_bound_from_stats(stats: &VinogradovStats) -> LowerBoundReport {
    let n = stats.n;
    let ns = pow_u(n, stats.s);
    let n2s = pow_u(n, 2 * stats.s);
    let size = BigUint::from(stats.sumset_size);
    let cs_bound = (&n2s + &size - BigUint::one()) / &size;
    let diagonal_ok = stats.j >= ns;
    let cauchy_schwarz_ok = &stats.j * &size >= n2s;
    LowerBoundReport {
        j: stats.j.to_string(),
        n_pow_s: ns.to_string(),
        sumset_size: stats.sumset_size,
        cs_bound: cs_bound.to_string(),
        diagonal_ok,
        cauchy_schwarz_ok,
        pass: diagonal_ok && cauchy_schwarz_ok,
    }
}

/// Numeric comparison of an exact count with the decoupling upper bound
/// `X_A^ε (N^s + N^{2s - k(k+1)/2})` and with the conjectured
/// `N^{2s - k(k+1)/2 + ε}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UpperBoundOracle {
    pub eps: f64,
    pub log10_j: f64,
    pub log10_bound: f64,
    /// `false` would contradict the decoupling theorem; flagged as remarkable.
    pub holds: bool,
    /// Least `ε >= 0` for which the decoupling bound holds on this instance.
    pub eps_min: f64,
    /// Least `ε >= 0` for which the conjectured bound holds (only when
    /// `2s >= k(k+1)`).
    pub conjecture_eps_min: Option<f64>,
    /// `log X_A / log N`.
    pub m_emp: Option<f64>,
}

pub fn upper_bound_oracle(a: &GroundSet, stats: &VinogradovStats, eps: f64) -> UpperBoundOracle {
    let (n, s, k) = (stats.n, stats.s, stats.k);
    let x = a.diameter().max(BigInt::one());
    let e = critical_exponent(s, k);
    let base = PowerExpr::int(BigInt::from(pow_u(n, s)))
        .times(PowerExpr::rational(BigRational::one()))
        .log10();
    let second = PowerExpr::int_pow(n, rat_int(e)).log10();
    // log10(N^s + N^e) computed stably.
    let (hi, lo) = if base >= second { (base, second) } else { (second, base) };
    let log_sum = hi + (1.0 + 10f64.powf(lo - hi)).log10();
    let log_x = crate::power::log10_bigint(&x);
    let log_j = log10_biguint(&stats.j);
    let log_bound = eps * log_x + log_sum;
    let eps_min = if log_x > 0.0 { ((log_j - log_sum) / log_x).max(0.0) } else { 0.0 };
    let conjecture_eps_min = (2 * s >= k * (k + 1)).then(|| excess_exponent(&stats.j, n, s, k));
    UpperBoundOracle {
        eps,
        log10_j: sig12(log_j),
        log10_bound: sig12(log_bound),
        holds: log_j <= log_bound + crate::power::GUARD_BAND,
        eps_min: sig12(eps_min),
        conjecture_eps_min: conjecture_eps_min.map(sig12),
        m_emp: a.diameter_exponent().map(sig12),
    }
}

pub fn alpha_string(alpha: &BigRational) -> String {
    rational_string(alpha)
}

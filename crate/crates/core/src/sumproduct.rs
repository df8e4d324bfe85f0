//! Sum-product reports: dyadic levels of quotient multiplicities, line
//! families through the origin, the exact lemmas about their sumsets, and
//! dashboards for the sum-product inequalities.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::caps::Caps;
use crate::check::{rational_string, sig12, CheckRecord, Kind, Relation};
use crate::counting::{excess_exponent, pow_u, quotient_counts, vinogradov_count, QuotientStats};
use crate::error::{Error, Result};
use crate::exactset::{moment_embed, power_vector, GroundSet};
use crate::key::PowerSumKey;
use crate::power::{log10_biguint, rat, rat_int, PowerExpr};
use crate::sumsets::{product_set, quotient_set, VectorSet};

/// The larger of the positive and negative parts of `a` (ties go to the
/// positives).
pub fn sign_split(a: &GroundSet) -> Result<GroundSet> {
    if a.contains_zero() {
        return Err(Error::ZeroElement);
    }
    let (pos, neg): (Vec<BigInt>, Vec<BigInt>) = a.elements().iter().cloned().partition(|x| x.is_positive());
    GroundSet::new(if pos.len() >= neg.len() { pos } else { neg })
}

/// The dyadic level `2^I <= d(x) < 2^{I+1}` carrying the most quotient mass.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSelection {
    #[serde(rename = "I")]
    pub level: u32,
    /// The quotients at the level, increasing.
    #[serde(serialize_with = "ser_fracs")]
    pub quotients: Vec<BigRational>,
    pub n: usize,
    /// `L = Σ d(x)²` over the level.
    #[serde(rename = "L", serialize_with = "ser_big")]
    pub mass: BigUint,
    /// Number of levels, `⌈log₂ N⌉ + 1`.
    pub levels: u32,
    #[serde(rename = "M", serialize_with = "ser_big")]
    pub m: BigUint,
    /// `(#levels) · L >= M`.
    pub pigeonhole: bool,
    /// `L <= n 2^{2I+2}`.
    pub dyadic_cap: bool,
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_fracs<S: serde::Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(rational_string).collect::<Vec<_>>().serialize(s)
}

/// `⌈log₂ n⌉` for `n >= 1`.
fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

pub fn dyadic_level_select(q: &QuotientStats) -> LevelSelection {
    let levels = ceil_log2(q.n.max(1)) + 1;
    let mut mass = vec![BigUint::zero(); levels as usize];
    for &d in q.d.values() {
        let i = (u64::BITS - 1 - d.leading_zeros()) as usize;
        mass[i] += BigUint::from(d) * BigUint::from(d);
    }
    let mut level = 0;
    for (i, m) in mass.iter().enumerate() {
        if *m > mass[level] {
            level = i;
        }
    }
    let quotients: Vec<BigRational> = q
        .d
        .iter()
        .filter(|(_, &d)| (u64::BITS - 1 - d.leading_zeros()) as usize == level)
        .map(|(x, _)| x.clone())
        .collect();
    let n = quotients.len();
    let l = mass[level].clone();
    let pigeonhole = BigUint::from(levels) * &l >= q.m;
    let dyadic_cap = l <= BigUint::from(n) << (2 * level + 2);
    LevelSelection {
        level: level as u32,
        quotients,
        n,
        mass: l,
        levels,
        m: q.m.clone(),
        pigeonhole,
        dyadic_cap,
    }
}

/// The points `(a₁,…,a₁ᵏ,a₂,…,a₂ᵏ)` with `a₂ = s·a₁`, both in `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineFamily {
    pub quotient: BigRational,
    /// The admissible `a₁`.
    pub p: GroundSet,
    /// Points of dimension `2k`.
    pub l: VectorSet,
    pub m: Vec<(BigInt, BigInt)>,
}

pub fn build_line_family(a: &GroundSet, k: usize, s: &BigRational) -> Result<LineFamily> {
    let mut firsts = Vec::new();
    let mut pairs = Vec::new();
    for a1 in a.elements() {
        let a2 = s * BigRational::from_integer(a1.clone());
        if a2.is_integer() && a.contains(a2.numer()) {
            firsts.push(a1.clone());
            pairs.push((a1.clone(), a2.numer().clone()));
        }
    }
    if pairs.is_empty() {
        return Err(Error::QuotientAbsent(rational_string(s)));
    }
    let points = pairs.iter().map(|(x, y)| power_vector(x, k).concat(&power_vector(y, k)));
    Ok(LineFamily {
        quotient: s.clone(),
        p: GroundSet::new(firsts)?,
        l: VectorSet::new(2 * k, points)?,
        m: pairs,
    })
}

/// `|u l_i|` against the Cauchy–Schwarz bound through `J_{u,k}(p_i)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VmvtlRow {
    pub quotient: String,
    pub size: usize,
    /// `|u l_i|`.
    pub fold: usize,
    /// `|u p_{i,k}|`.
    pub projected: usize,
    #[serde(rename = "J", serialize_with = "ser_big")]
    pub j: BigUint,
    /// `|u p_{i,k}| · J_{u,k}(p_i) >= |p_i|^{2u}` and `|u l_i| >= |u p_{i,k}|`.
    pub chain: bool,
    /// `log|u l_i| / log|l_i|`, absent when `|l_i| = 1`.
    pub exponent: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineLemmaReport {
    pub u: usize,
    pub families: usize,
    pub pairs: usize,
    /// Pairs `i < j` with `|u l_i + u l_j| != |u l_i| |u l_j|`.
    pub ul_failures: Vec<(usize, usize)>,
    pub ul_ok: bool,
    pub vmvtl: Vec<VmvtlRow>,
    pub vmvtl_ok: bool,
    /// Overlapping consecutive-block pairs `(i, j)`.
    pub pnp_failures: Vec<(usize, usize)>,
    pub pnp_ok: bool,
    /// `|u𝒜 + u𝒜|² >= Σ |u l_i + u l_{i+1}|`, with the blocks inside the square.
    #[serde(serialize_with = "ser_big")]
    pub assembled_lhs: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub assembled_rhs: BigUint,
    pub assembled_ok: bool,
    pub containment_ok: bool,
}

impl LineLemmaReport {
    pub fn all_ok(&self) -> bool {
        self.ul_ok && self.vmvtl_ok && self.pnp_ok && self.assembled_ok && self.containment_ok
    }
}

/// Checks the three line lemmas and the assembled bound on `families`,
/// which must be sorted by quotient.
pub fn check_line_lemmas(
    a: &GroundSet,
    k: usize,
    u: usize,
    families: &[LineFamily],
    caps: &Caps,
) -> Result<LineLemmaReport> {
    if !a.all_positive() {
        return Err(Error::NonPositiveElements);
    }
    if u == 0 {
        return Err(Error::InvalidParams("u must be >= 1".into()));
    }
    if families.windows(2).any(|w| w[0].quotient >= w[1].quotient) {
        return Err(Error::InvalidParams("families must be sorted by quotient".into()));
    }
    let folds: Vec<VectorSet> = families
        .iter()
        .map(|f| f.l.iterated(u, caps))
        .collect::<Result<_>>()?;

    let n = families.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let work: u64 = pairs.iter().map(|&(i, j)| (folds[i].len() * folds[j].len()) as u64).sum();
    if work > caps.iterations {
        return Err(Error::limit("line family cross sums", work, caps.iterations));
    }
    let ul_results: Vec<Result<Option<(usize, usize)>>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let s = folds[i].sumset(&folds[j], caps)?;
            Ok((s.len() != folds[i].len() * folds[j].len()).then_some((i, j)))
        })
        .collect();
    let mut ul_failures = Vec::new();
    for r in ul_results {
        if let Some(p) = r? {
            ul_failures.push(p);
        }
    }

    let mut vmvtl = Vec::with_capacity(n);
    for (f, fold) in families.iter().zip(&folds) {
        let emb = moment_embed(&f.p, k)?;
        let projected = VectorSet::from_embedding(&emb).iterated(u, caps)?;
        let j = vinogradov_count(&f.p, u, k, caps)?.j;
        let size = f.p.len();
        let chain = BigUint::from(projected.len()) * &j >= pow_u(size, 2 * u) && fold.len() >= projected.len();
        vmvtl.push(VmvtlRow {
            quotient: rational_string(&f.quotient),
            size,
            fold: fold.len(),
            projected: projected.len(),
            j,
            chain,
            exponent: (size > 1).then(|| sig12((fold.len() as f64).ln() / (size as f64).ln())),
        });
    }

    let blocks: Vec<VectorSet> = (0..n.saturating_sub(1))
        .into_par_iter()
        .map(|i| folds[i].sumset(&folds[i + 1], caps))
        .collect::<Result<_>>()?;
    let mut owner: std::collections::HashMap<&PowerSumKey, usize> = std::collections::HashMap::new();
    let mut overlaps: HashSet<(usize, usize)> = HashSet::new();
    for (i, b) in blocks.iter().enumerate() {
        for v in b.iter() {
            if let Some(&o) = owner.get(v) {
                overlaps.insert((o, i));
            } else {
                owner.insert(v, i);
            }
        }
    }
    let mut pnp_failures: Vec<(usize, usize)> = overlaps.into_iter().collect();
    pnp_failures.sort_unstable();

    let emb = moment_embed(a, k)?;
    let double = VectorSet::from_embedding(&emb).iterated(2 * u, caps)?;
    let containment_ok = blocks.iter().all(|b| {
        b.iter().all(|v| double.contains(&v.prefix(k)) && double.contains(&v.suffix(k)))
    });
    let assembled_lhs = BigUint::from(double.len()) * BigUint::from(double.len());
    let assembled_rhs: BigUint = blocks.iter().map(|b| BigUint::from(b.len())).sum();
    Ok(LineLemmaReport {
        u,
        families: n,
        pairs: pairs.len(),
        ul_ok: ul_failures.is_empty(),
        ul_failures,
        vmvtl_ok: vmvtl.iter().all(|r| r.chain),
        vmvtl,
        pnp_ok: pnp_failures.is_empty(),
        pnp_failures,
        assembled_ok: assembled_lhs >= assembled_rhs,
        assembled_lhs,
        assembled_rhs,
        containment_ok,
    })
}

/// Both sides of a power inequality as base-10 logarithms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerComparison {
    pub log10_lhs: f64,
    pub log10_rhs: f64,
    /// `log10_rhs - log10_lhs`; non-negative when `lhs <= rhs`.
    pub margin: f64,
}

impl PowerComparison {
    fn new(lhs: &PowerExpr, rhs: &PowerExpr) -> Self {
        let (l, r) = (lhs.log10(), rhs.log10());
        PowerComparison {
            log10_lhs: sig12(l),
            log10_rhs: sig12(r),
            margin: sig12(r - l),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumProductReport {
    pub s: usize,
    pub k: usize,
    pub u: usize,
    pub epsilon: String,
    /// Size of the input before the sign split.
    pub n_input: usize,
    pub n: usize,
    /// Whether the kept part was the negative one (reported on `-A`).
    pub negated: bool,
    /// `|s𝒜 + s𝒜|`.
    pub sum_size: usize,
    /// `|A/A|`.
    pub quotient_size: usize,
    pub level: LevelSelection,
    pub lemmas: LineLemmaReport,
    /// `N^{2s-2ε}` against `|s𝒜+s𝒜| |A/A|^{s-1/2-ε}`.
    pub main_inequality: PowerComparison,
    /// `log10` of `N^{2s-2ε} / (|s𝒜+s𝒜| |A/A|^{s-1/2-ε})`.
    pub log10_c_meas: f64,
    pub c_meas: f64,
    pub delta_s: String,
    /// `|A/A| >= N^{1+δ_s}`: the branch in which the quotient bound is
    /// immediate.
    pub quotient_branch: bool,
    pub records: Vec<CheckRecord>,
    pub note: Option<String>,
}

impl SumProductReport {
    /// Every unconditional record holds.
    pub fn exact_chain_ok(&self) -> bool {
        self.records
            .iter()
            .filter(|r| r.kind == Kind::Unconditional)
            .all(|r| r.holds())
    }
}

/// `A/A` multiplicities, level selection, line lemmas and both sides of the
/// sum-product inequality for `s𝒜+s𝒜` and `A/A`. `u` defaults to `s`.
pub fn vmvtsp_report(
    a: &GroundSet,
    s: usize,
    k: usize,
    eps: &BigRational,
    u: Option<usize>,
    caps: &Caps,
) -> Result<SumProductReport> {
    if k < 2 || s < k || 2 * s > k * (k + 1) {
        return Err(Error::InvalidParams(format!("need 2 <= k <= s <= k(k+1)/2, got s={} k={}", s, k)));
    }
    if !eps.is_positive() {
        return Err(Error::InvalidParams("epsilon must be positive".into()));
    }
    let u = u.unwrap_or(s);
    if u == 0 {
        return Err(Error::InvalidParams("u must be >= 1".into()));
    }
    let split = sign_split(a)?;
    let negated = !split.all_positive();
    let b = if negated {
        GroundSet::new(split.elements().iter().map(|x| -x).collect())?
    } else {
        split
    };
    let n = b.len();
    let emb = moment_embed(&b, k)?;
    let sum_size = VectorSet::from_embedding(&emb).iterated(2 * s, caps)?.len();
    let q = quotient_counts(&b)?;
    let quotient_size = q.support();
    let level = dyadic_level_select(&q);
    let families: Vec<LineFamily> = level
        .quotients
        .iter()
        .map(|x| build_line_family(&b, k, x))
        .collect::<Result<_>>()?;
    let lemmas = check_line_lemmas(&b, k, u, &families, caps)?;

    let mut records = Vec::new();
    let st = "sumprod";
    records.push(CheckRecord::ints(
        st,
        "|A/A| · M(A) >= N^4",
        Kind::Unconditional,
        BigInt::from(quotient_size) * BigInt::from(q.m.clone()),
        Relation::Ge,
        BigInt::from(pow_u(n, 4)),
    ));
    records.push(CheckRecord::ints(
        st,
        "(#levels) · L >= M(A)",
        Kind::Unconditional,
        BigInt::from(level.levels) * BigInt::from(level.mass.clone()),
        Relation::Ge,
        BigInt::from(q.m.clone()),
    ));
    records.push(
        CheckRecord::ints(
            st,
            "L <= n 2^{2I+2}",
            Kind::Unconditional,
            BigInt::from(level.mass.clone()),
            Relation::Le,
            BigInt::from(level.n) << (2 * level.level + 2),
        )
        .with("I", level.level)
        .with("n", level.n),
    );
    records.push(
        CheckRecord::predicate(st, "|u l_i + u l_j| = |u l_i| |u l_j|", Kind::Unconditional, Relation::Eq, lemmas.ul_ok)
            .with("pairs", lemmas.pairs)
            .with("u", u),
    );
    records.push(CheckRecord::predicate(
        st,
        "|u p_{i,k}| · J_{u,k}(p_i) >= |p_i|^{2u}",
        Kind::Unconditional,
        Relation::Ge,
        lemmas.vmvtl_ok,
    ));
    records.push(CheckRecord::predicate(
        st,
        "u l_i + u l_{i+1} pairwise disjoint",
        Kind::Unconditional,
        Relation::Disjoint,
        lemmas.pnp_ok,
    ));
    records.push(CheckRecord::predicate(
        st,
        "u l_i + u l_{i+1} ⊆ (u𝒜+u𝒜) × (u𝒜+u𝒜)",
        Kind::Unconditional,
        Relation::Subset,
        lemmas.containment_ok,
    ));
    records.push(CheckRecord::ints(
        st,
        "|u𝒜+u𝒜|^2 >= Σ |u l_i + u l_{i+1}|",
        Kind::Unconditional,
        BigInt::from(lemmas.assembled_lhs.clone()),
        Relation::Ge,
        BigInt::from(lemmas.assembled_rhs.clone()),
    ));

    let s_r = rat_int(BigInt::from(s));
    let lhs = PowerExpr::int_pow(n, rat_int(2) * &s_r - rat_int(2) * eps);
    let rhs = PowerExpr::int(sum_size).times(PowerExpr::int_pow(quotient_size, &s_r - rat(1, 2) - eps));
    let main_inequality = PowerComparison::new(&lhs, &rhs);
    let log10_c_meas = sig12(-main_inequality.margin);

    let delta_s = (rat_int(2) * &s_r - BigRational::one() - rat_int(2) * eps).recip();
    let branch_bound = PowerExpr::int_pow(n, BigRational::one() + &delta_s);
    let quotient_branch = PowerExpr::int(quotient_size).compare(&branch_bound).is_ge();
    records.push(
        CheckRecord::compare(
            st,
            "|A/A| >= N^{1+δ_s}",
            Kind::Conditional,
            &PowerExpr::int(quotient_size),
            Relation::Ge,
            &branch_bound,
        )
        .with("delta_s", rational_string(&delta_s)),
    );
    // 2^I >= N^{1/2} / (8 log N), only derived when |A/A| < N^{1+δ_s}.
    let ln_n = (n as f64).ln();
    let rhs56 = if n >= 2 {
        0.5 * (n as f64).log10() - (8.0 * ln_n).log10()
    } else {
        f64::NEG_INFINITY
    };
    let lhs56 = level.level as f64 * 2f64.log10();
    let mut r56 = CheckRecord::predicate(st, "2^I >= N^{1/2} / (8 log N)", Kind::Conditional, Relation::Ge, lhs56 >= rhs56);
    r56.lhs = Some(crate::check::Quantity::Power { log10: sig12(lhs56) });
    r56.rhs = Some(crate::check::Quantity::Power { log10: sig12(rhs56) });
    records.push(
        r56.with("branch", if quotient_branch { "quotient-large" } else { "contradiction" })
            .with("log", "natural"),
    );
    let mut rn = CheckRecord::predicate(st, "n >= log N", Kind::Conditional, Relation::Ge, level.n as f64 >= ln_n);
    rn.lhs = Some(crate::check::Quantity::Exact(level.n.to_string()));
    rn.rhs = Some(crate::check::Quantity::Power { log10: sig12(ln_n.log10()) });
    records.push(rn.with("branch", if quotient_branch { "quotient-large" } else { "contradiction" }));
    let mut r19 = CheckRecord::predicate(
        st,
        "N^{2s-2ε} <= c |s𝒜+s𝒜| |A/A|^{s-1/2-ε} with c = 1",
        Kind::Conditional,
        Relation::Le,
        lhs.compare(&rhs).is_le(),
    );
    r19.lhs = Some(crate::check::Quantity::Power {
        log10: main_inequality.log10_lhs,
    });
    r19.rhs = Some(crate::check::Quantity::Power {
        log10: main_inequality.log10_rhs,
    });
    records.push(r19.with("log10_c_meas", log10_c_meas));

    Ok(SumProductReport {
        s,
        k,
        u,
        epsilon: rational_string(eps),
        n_input: a.len(),
        n,
        negated,
        sum_size,
        quotient_size,
        level,
        lemmas,
        main_inequality,
        log10_c_meas,
        c_meas: sig12(10f64.powf(log10_c_meas)),
        delta_s: rational_string(&delta_s),
        quotient_branch,
        records,
        note: (u != s).then(|| format!("line lemmas use u = {} while the inequality is stated for s = {}", u, s)),
    })
}

/// `max(0, log J / log N - (2s - k(k+1)/2))`: the excess exponent of this one
/// instance. It is a witness for a single set, not an estimate of any
/// infimum over sets.
pub fn lambda_empirical(a: &GroundSet, s: usize, k: usize, caps: &Caps) -> Result<f64> {
    if 2 * s < k * (k + 1) {
        return Err(Error::InvalidParams(format!("need 2s >= k(k+1), got s={} k={}", s, k)));
    }
    if a.len() < 2 {
        return Err(Error::InvalidParams("need N >= 2".into()));
    }
    let st = vinogradov_count(a, s, k, caps)?;
    Ok(sig12(excess_exponent(&st.j, a.len(), s, k)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbsMainReport {
    pub s: usize,
    pub k: usize,
    pub lambda: String,
    pub l: usize,
    pub b: usize,
    /// `⌈k(k+1) - 2Λ⌉`.
    pub suggested_b: String,
    pub n: usize,
    /// `|lA|`.
    pub sum_fold: usize,
    /// `|A^{(l)}|`.
    pub product_fold: usize,
    /// `|AA|`.
    pub product: usize,
    /// Which of `|A^{(l)}|`, `|lA|` exceed `N^b`: `product`, `sum`, `both` or
    /// `neither`.
    pub branch: String,
    /// `(|AA|/|A|)^l >= |A^{(l)}|/|A|`.
    pub chain: bool,
    /// `log10 α` for `J = α N^{2s-k(k+1)/2+Λ}`.
    pub log10_alpha: f64,
    /// Least `ε` with `log α⁻¹ <= ε(k(k+1)-2Λ)/43200 · log N`.
    pub eps_min: Option<f64>,
    pub records: Vec<CheckRecord>,
}

/// Sizes of `lA`, `A^{(l)}` and `AA`, the dichotomy branch realized, and the
/// multiplicative Plünnecke chain. `l` and `b` are supplied by the caller.
pub fn absmain_report(
    a: &GroundSet,
    s: usize,
    k: usize,
    lambda: &BigRational,
    l: usize,
    b: usize,
    caps: &Caps,
) -> Result<AbsMainReport> {
    if a.contains_zero() {
        return Err(Error::ZeroElement);
    }
    if l == 0 || b == 0 {
        return Err(Error::InvalidParams("l and b must be >= 1".into()));
    }
    let n = a.len();
    let sum_fold = VectorSet::from_ground(a).iterated(l, caps)?.len();
    let product_fold = product_set(a, l, caps)?.len();
    let product = product_set(a, 2, caps)?.len();
    let nb = pow_u(n, b);
    let big_p = BigUint::from(product_fold) > nb;
    let big_s = BigUint::from(sum_fold) > nb;
    let branch = match (big_p, big_s) {
        (true, true) => "both",
        (true, false) => "product",
        (false, true) => "sum",
        (false, false) => "neither",
    };
    // |AA|^l >= |A^{(l)}| · N^{l-1}.
    let chain_lhs = pow_u(product, l);
    let chain_rhs = BigUint::from(product_fold) * pow_u(n, l - 1);
    let chain = chain_lhs >= chain_rhs;
    let tri = rat_int(BigInt::from(k * (k + 1)));
    let suggested = (&tri - rat_int(2) * lambda).ceil();

    let mut records = vec![
        CheckRecord::ints(
            "absmain",
            "(|AA|/|A|)^l >= |A^{(l)}|/|A|",
            Kind::Unconditional,
            BigInt::from(chain_lhs),
            Relation::Ge,
            BigInt::from(chain_rhs),
        )
        .with("l", l),
        CheckRecord::predicate(
            "absmain",
            "max(|A^{(l)}|, |lA|) > N^b",
            Kind::Conditional,
            Relation::Gt,
            big_p || big_s,
        )
        .with("branch", branch)
        .with("b", b),
    ];
    let (log10_alpha, eps_min) = if 2 * s >= k * (k + 1) && n >= 2 {
        let j = vinogradov_count(a, s, k, caps)?.j;
        let expo = rat_int(BigInt::from(2 * s)) - &tri / rat_int(2) + lambda;
        let log_n = (n as f64).log10();
        let la = log10_biguint(&j) - expo.to_f64().unwrap_or(f64::NAN) * log_n;
        let slope = (&tri - rat_int(2) * lambda).to_f64().unwrap_or(f64::NAN);
        let eps_min = (slope > 0.0).then(|| sig12((43200.0 * (-la) / (slope * log_n)).max(0.0)));
        (sig12(la), eps_min)
    } else {
        (f64::NAN, None)
    };
    let growth = BigRational::one() + rat_int(BigInt::from(b) - 1) / rat_int(BigInt::from(2 * l));
    records.push(CheckRecord::compare(
        "absmain",
        "|AA| > N^{1+(b-1)/(2l)}",
        Kind::Conditional,
        &PowerExpr::int(product),
        Relation::Gt,
        &PowerExpr::int_pow(n, growth),
    ));
    Ok(AbsMainReport {
        s,
        k,
        lambda: rational_string(lambda),
        l,
        b,
        suggested_b: rational_string(&suggested),
        n,
        sum_fold,
        product_fold,
        product,
        branch: branch.into(),
        chain,
        log10_alpha: if log10_alpha.is_finite() { log10_alpha } else { 0.0 },
        eps_min,
        records,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MainReport {
    pub s: usize,
    pub k: usize,
    pub epsilon: String,
    /// `1/(k(k+1)-1)`.
    pub delta: String,
    pub n: usize,
    pub quotient_size: usize,
    pub product_size: usize,
    pub alpha: String,
    pub hypothesis: bool,
    pub records: Vec<CheckRecord>,
}

/// The two growth bounds for `A/A` and `AA` under the large-`J` hypothesis,
/// with the exact Plünnecke step `|A/A| |A| <= |AA|²`.
pub fn main_report(a: &GroundSet, s: usize, k: usize, eps: &BigRational, caps: &Caps) -> Result<MainReport> {
    if k < 2 || s < k * (k + 1) {
        return Err(Error::InvalidParams(format!("need k >= 2 and s >= k(k+1), got s={} k={}", s, k)));
    }
    let n = a.len();
    let quotient_size = quotient_set(a)?.len();
    let product_size = product_set(a, 2, caps)?.len();
    let stats = vinogradov_count(a, s, k, caps)?;
    let alpha = stats.alpha.clone().expect("s >= k(k+1)");
    let tri = k * (k + 1);
    let delta = BigRational::new(BigInt::one(), BigInt::from(tri - 1));
    let k2 = rat_int(BigInt::from(k * k));
    let slope = eps * rat_int(BigInt::from(tri)) / rat_int(43200);
    let hyp = PowerExpr::rational(alpha.recip()).compare(&PowerExpr::int_pow(n, slope.clone())).is_le()
        && alpha <= BigRational::one();
    let records = vec![
        CheckRecord::ints(
            "main",
            "|A/A| · |A| <= |AA|^2",
            Kind::Unconditional,
            BigInt::from(quotient_size) * BigInt::from(n),
            Relation::Le,
            BigInt::from(product_size) * BigInt::from(product_size),
        ),
        CheckRecord::compare(
            "main",
            "α^{-1} <= N^{εk(k+1)/43200}",
            Kind::Conditional,
            &PowerExpr::rational(alpha.recip()),
            Relation::Le,
            &PowerExpr::int_pow(n, slope),
        ),
        CheckRecord::compare(
            "main",
            "|A/A| >= N^{1+δ-εk^2}",
            Kind::Conditional,
            &PowerExpr::int(quotient_size),
            Relation::Ge,
            &PowerExpr::int_pow(n, BigRational::one() + &delta - eps * &k2),
        ),
        CheckRecord::compare(
            "main",
            "|AA| >= N^{1+δ/2-4εk^2}",
            Kind::Conditional,
            &PowerExpr::int(product_size),
            Relation::Ge,
            &PowerExpr::int_pow(n, BigRational::one() + &delta / rat_int(2) - rat_int(4) * eps * &k2),
        ),
    ];
    Ok(MainReport {
        s,
        k,
        epsilon: rational_string(eps),
        delta: rational_string(&delta),
        n,
        quotient_size,
        product_size,
        alpha: rational_string(&alpha),
        hypothesis: hyp,
        records,
    })
}

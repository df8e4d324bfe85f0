//! The hypergraph stages: popular sums, parity reduction, pivot selection,
//! pruning to popular representations, and assembly of `A′`.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bits::BitSet;
use crate::caps::Caps;
use crate::check::{rational_string, CheckRecord, Kind, Relation};
use crate::counting::{alpha_of, pow_u, rep_table, stats_from_table, VinogradovStats};
use crate::error::{Error, Result};
use crate::exactset::{moment_embed, GroundSet};
use crate::key::PowerSumKey;
use crate::power::{rat, rat_int, PowerExpr};
use crate::sumsets::{restricted_sumset, StringSums, TupleGraph, VectorSet};

/// The quantities every conditional threshold is built from.
#[derive(Clone, Debug)]
pub struct Regime {
    pub n: usize,
    pub k: usize,
    pub alpha: BigRational,
    pub eps: BigRational,
    pub delta: BigRational,
}

impl Regime {
    pub(crate) fn n_pow(&self, e: BigRational) -> PowerExpr {
        PowerExpr::int_pow(self.n, e)
    }

    pub(crate) fn alpha_pow(&self, e: BigRational) -> PowerExpr {
        PowerExpr::pow(self.alpha.clone(), e)
    }

    fn triangle(&self) -> BigRational {
        rat_int(BigInt::from(self.k * (self.k + 1)))
    }
}

pub(crate) fn tuple_witness(points: &[PowerSumKey], tuple: &[usize]) -> String {
    let parts: Vec<String> = tuple.iter().map(|&i| points[i].component(0).to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn big(v: impl Into<BigUint>) -> BigInt {
    BigInt::from(v.into())
}

#[derive(Clone, Debug)]
pub struct PopularSums {
    /// `S`, the sums with `r(𝒜ˢ; n) >= threshold`.
    pub set: VectorSet,
    /// `r(𝒜ˢ; n)` for each member of `S`, in order.
    pub reps: Vec<u128>,
    /// `α/2 · N^{s-k(k+1)/2}`.
    pub threshold: BigRational,
    pub alpha: BigRational,
    pub alpha_overridden: bool,
}

#[derive(Clone, Debug)]
pub struct PopularStage {
    pub popular: PopularSums,
    pub graph: TupleGraph,
    pub stats: VinogradovStats,
    pub sigma: VectorSet,
}

/// Computes `S` and `G = {s-tuples with sum in S}`, recording the identities
/// `Σ_{n∈S} r(n) = |G|` and `|Σ(G)| = |S|` and the two bounds that follow from
/// `J = α N^{2s-k(k+1)/2}` (only unconditional when `α` is the computed one).
pub fn popular_sums(
    a: &GroundSet,
    s: usize,
    k: usize,
    alpha_override: Option<&BigRational>,
    caps: &Caps,
    log: &mut Vec<CheckRecord>,
) -> Result<PopularStage> {
    if s == 0 || k == 0 || 2 * s < k * (k + 1) {
        return Err(Error::InvalidParams(format!("need 2s >= k(k+1), got s={} k={}", s, k)));
    }
    let emb = moment_embed(a, k)?;
    let n = a.len();
    TupleGraph::empty(Arc::new(emb.coords()), s, caps)?;
    let table = rep_table(&emb, s, caps)?;
    let stats = stats_from_table(&table, n);
    let computed = alpha_of(&stats.j, n, s, k).expect("2s >= k(k+1)");
    let alpha = match alpha_override {
        Some(o) if *o <= BigRational::zero() || *o > BigRational::one() => {
            return Err(Error::DegenerateAlpha(rational_string(o)));
        }
        Some(o) => o.clone(),
        None => computed,
    };
    let tri = k * (k + 1) / 2;
    let threshold = &alpha / rat_int(2) * rat_int(BigInt::from(pow_u(n, s - tri)));
    let (mut members, mut reps) = (Vec::new(), Vec::new());
    for (key, c) in table.entries() {
        if rat_int(BigInt::from(*c)) >= threshold {
            members.push(key.clone());
            reps.push(*c);
        }
    }
    let set = VectorSet::from_sorted(k, members);

    let points = Arc::new(emb.coords());
    let head = s / 2;
    let tail = s - head;
    let pre = StringSums::new(&points, head);
    let suf = StringSums::new(&points, tail);
    let width = suf.distinct.len();
    let set_ref = &set;
    let hit: Vec<bool> = pre
        .distinct
        .iter()
        .flat_map(|p| suf.distinct.iter().map(move |q| set_ref.contains(&p.add(q))))
        .collect();
    let row = n.pow(tail as u32);
    let mut bits = BitSet::new(n.pow(s as u32));
    for (x, &pid) in pre.ids.iter().enumerate() {
        let base = pid as usize * width;
        for (y, &sid) in suf.ids.iter().enumerate() {
            if hit[base + sid as usize] {
                bits.set(x * row + y);
            }
        }
    }
    let graph = TupleGraph::from_bits(points, s, bits);
    let sigma = restricted_sumset(&graph)?;

    let kind = if alpha_override.is_some() {
        Kind::Conditional
    } else {
        Kind::Unconditional
    };
    let rep_mass: BigUint = reps.iter().map(|&c| BigUint::from(c)).sum();
    let rep_sq: BigUint = reps.iter().map(|&c| BigUint::from(c) * BigUint::from(c)).sum();
    let size_bound = PowerExpr::rational(rat(4, 1) / &alpha).times(PowerExpr::int_pow(n, rat_int(tri)));
    let mass_bound = PowerExpr::rational(&alpha / rat_int(2)).times(PowerExpr::int_pow(n, rat_int(2 * s - tri)));
    log.push(
        CheckRecord::ints(
            "G-build",
            "Σ_{n∈S} r(n) = |G|",
            Kind::Unconditional,
            big(rep_mass),
            Relation::Eq,
            graph.len(),
        )
        .with("threshold", rational_string(&threshold)),
    );
    log.push(CheckRecord::ints(
        "G-build",
        "|Σ(G)| = |S|",
        Kind::Unconditional,
        sigma.len(),
        Relation::Eq,
        set.len(),
    ));
    log.push(CheckRecord::compare(
        "G-build",
        "|S| <= (4/α) N^{k(k+1)/2}",
        kind,
        &PowerExpr::int(set.len()),
        Relation::Le,
        &size_bound,
    ));
    log.push(CheckRecord::compare(
        "G-build",
        "Σ_{n∈S} r(n)^2 >= (α/2) N^{2s-k(k+1)/2}",
        kind,
        &PowerExpr::int(big(rep_sq)),
        Relation::Ge,
        &mass_bound,
    ));
    Ok(PopularStage {
        popular: PopularSums {
            set,
            reps,
            threshold,
            alpha,
            alpha_overridden: alpha_override.is_some(),
        },
        graph,
        stats,
        sigma,
    })
}

#[derive(Clone, Debug)]
pub struct Reduced {
    pub graph: TupleGraph,
    /// Index of the fixed last coordinate.
    pub a: usize,
    pub sigma: VectorSet,
}

/// Fixes the last coordinate to the value `a` with the most tuples (ties go to
/// the smallest index) and drops it.
pub fn reduce_odd_s(g: &TupleGraph, log: &mut Vec<CheckRecord>) -> Result<Reduced> {
    if g.arity().is_multiple_of(2) || g.arity() < 3 {
        return Err(Error::InvalidParams(format!("arity {} is not odd and >= 3", g.arity())));
    }
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let n = g.ground_size();
    let mut counts = vec![0u64; n];
    for idx in g.iter_indices() {
        counts[idx % n] += 1;
    }
    let mut a = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[a] {
            a = i;
        }
    }
    let mut bits = BitSet::new(g.bits().len() / n);
    for idx in g.iter_indices() {
        if idx % n == a {
            bits.set(idx / n);
        }
    }
    let reduced = TupleGraph::from_bits(g.points().clone(), g.arity() - 1, bits);
    let sigma_full = restricted_sumset(g)?;
    let sigma = restricted_sumset(&reduced)?;
    log.push(
        CheckRecord::ints(
            "reduce-odd",
            "|G_a| · N >= |G|",
            Kind::Unconditional,
            BigInt::from(reduced.len()) * BigInt::from(n),
            Relation::Ge,
            g.len(),
        )
        .with("a", g.points()[a].component(0))
        .with("|G_a|", reduced.len())
        .with("arity", format!("{}->{}", g.arity(), reduced.arity())),
    );
    log.push(CheckRecord::ints(
        "reduce-odd",
        "|Σ(G_a)| <= |Σ(G)|",
        Kind::Unconditional,
        sigma.len(),
        Relation::Le,
        sigma_full.len(),
    ));
    Ok(Reduced {
        graph: reduced,
        a,
        sigma,
    })
}

/// Right neighbourhoods `R(x)` of every half-string, as bitsets over the
/// half-string indices.
#[derive(Clone, Debug)]
pub struct NeighborhoodIndex {
    half: usize,
    width: usize,
    rows: Vec<BitSet>,
}

impl NeighborhoodIndex {
    pub fn new(g: &TupleGraph) -> Result<Self> {
        if !g.arity().is_multiple_of(2) || g.arity() == 0 {
            return Err(Error::InvalidParams(format!("arity {} is not even", g.arity())));
        }
        let half = g.arity() / 2;
        let width = g.ground_size().pow(half as u32);
        let rows = (0..width).map(|x| g.bits().slice(x * width, width)).collect();
        Ok(NeighborhoodIndex { half, width, rows })
    }

    pub fn half(&self) -> usize {
        self.half
    }

    /// `N^{s/2}`, the number of half-strings.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn row(&self, x: usize) -> &BitSet {
        &self.rows[x]
    }

    pub fn total(&self) -> u64 {
        self.rows.iter().map(|r| r.count_ones()).sum()
    }
}

#[derive(Clone, Debug)]
pub struct Pivot {
    pub x: usize,
    /// `Σ_y |R(x) ∩ R(y)|`.
    pub score: u64,
    pub index: NeighborhoodIndex,
    pub g1: TupleGraph,
}

/// Picks the half-string `x` maximizing `Σ_y |R(x) ∩ R(y)|` (ties go to the
/// lexicographically smallest) and builds `G₁ = {yz ∈ G : z ∈ R(x)}`.
pub fn select_pivot(g: &TupleGraph, log: &mut Vec<CheckRecord>) -> Result<Pivot> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let index = NeighborhoodIndex::new(g)?;
    let width = index.width;
    // Σ_y |R(x) ∩ R(y)| = Σ_{z ∈ R(x)} |{y : z ∈ R(y)}|.
    let mut col = vec![0u64; width];
    for r in &index.rows {
        for z in r.iter_ones() {
            col[z] += 1;
        }
    }
    let scores: Vec<u64> = index.rows.iter().map(|r| r.iter_ones().map(|z| col[z]).sum()).collect();
    let mut x = 0;
    for (i, &sc) in scores.iter().enumerate() {
        if sc > scores[x] {
            x = i;
        }
    }
    let score = scores[x];
    let mut bits = BitSet::new(g.bits().len());
    for (y, r) in index.rows.iter().enumerate() {
        let mut row = r.clone();
        row.intersect_with(&index.rows[x]);
        bits.write_slice(y * width, &row);
    }
    let g1 = TupleGraph::from_bits(g.points().clone(), g.arity(), bits);

    let total = index.total();
    let x_tuple = NeighborhoodIndex::decode_half(g.ground_size(), index.half, x);
    log.push(CheckRecord::ints(
        "pivot-x",
        "Σ_x |R(x)| = |G|",
        Kind::Unconditional,
        total,
        Relation::Eq,
        g.len(),
    ));
    log.push(
        CheckRecord::ints(
            "pivot-x",
            "max_x Σ_y |R(x)∩R(y)| · r · n >= (Σ_y |R(y)|)^2",
            Kind::Unconditional,
            BigInt::from(score) * BigInt::from(width) * BigInt::from(width),
            Relation::Ge,
            BigInt::from(total) * BigInt::from(total),
        )
        .with("x", tuple_witness(g.points(), &x_tuple))
        .with("score", score),
    );
    log.push(CheckRecord::ints(
        "G₁",
        "|G₁| = Σ_y |R(x)∩R(y)|",
        Kind::Unconditional,
        g1.len(),
        Relation::Eq,
        score,
    ));
    Ok(Pivot { x, score, index, g1 })
}

impl NeighborhoodIndex {
    pub fn decode_half(n: usize, half: usize, mut idx: usize) -> Vec<usize> {
        let mut t = vec![0; half];
        for slot in t.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        t
    }
}

/// Sums of half-strings, shared by the pruning and assembly stages.
pub(crate) struct HalfSums {
    inner: StringSums,
    dim: usize,
}

impl HalfSums {
    pub fn new(points: &[PowerSumKey], half: usize) -> Self {
        HalfSums {
            inner: StringSums::new(points, half),
            dim: points[0].dim(),
        }
    }

    pub fn id(&self, y: usize) -> usize {
        self.inner.ids[y] as usize
    }

    pub fn classes(&self) -> usize {
        self.inner.distinct.len()
    }

    pub fn key(&self, id: usize) -> &PowerSumKey {
        &self.inner.distinct[id]
    }

    /// `Σ(X)` for a set of half-strings.
    pub fn sigma(&self, xs: impl IntoIterator<Item = usize>) -> VectorSet {
        let mut marks = BitSet::new(self.classes());
        for y in xs {
            marks.set(self.id(y));
        }
        VectorSet::from_sorted(self.dim, marks.iter_ones().map(|i| self.key(i).clone()).collect())
    }

    pub fn sigma_size(&self, xs: impl IntoIterator<Item = usize>, marks: &mut BitSet) -> u64 {
        *marks = BitSet::new(self.classes());
        for y in xs {
            marks.set(self.id(y));
        }
        marks.count_ones()
    }
}

#[derive(Clone, Debug)]
pub struct Pruned {
    pub y: Vec<usize>,
    pub z: usize,
    pub y1: Vec<usize>,
    pub sigma_y1: VectorSet,
    pub s1: VectorSet,
    pub y2: Vec<usize>,
    pub sigma_y2: VectorSet,
    pub sigma_rx: VectorSet,
}

/// `Y`, `z`, `Y₁`, `S₁` and `Y₂`.
pub(crate) fn prune_y(
    pivot: &Pivot,
    half: &HalfSums,
    sigma_g1: &VectorSet,
    regime: &Regime,
    points: &[PowerSumKey],
    log: &mut Vec<CheckRecord>,
) -> Result<Pruned> {
    let index = &pivot.index;
    let h = index.half;
    let rx = index.row(pivot.x);
    let hr = rat_int(BigInt::from(h));
    let four_delta = &regime.delta * rat_int(4);
    let eight_delta = &regime.delta * rat_int(8);
    let eps_1200 = BigRational::one() - &regime.eps / rat_int(1200);

    let y_threshold = regime
        .alpha_pow(rat_int(2))
        .scale(rat(1, 4))
        .times(regime.n_pow(&hr - &four_delta));
    let cut = y_threshold.ceil_int();
    let inter: Vec<u64> = (0..index.width).map(|y| index.row(y).intersect_count(rx)).collect();
    let y: Vec<usize> = (0..index.width).filter(|&y| BigInt::from(inter[y]) >= cut).collect();
    log.push(
        CheckRecord::compare(
            "Y",
            "|Y| >= (α^2/4) N^{s/2-4δ}",
            Kind::Conditional,
            &PowerExpr::int(y.len()),
            Relation::Ge,
            &y_threshold,
        )
        .with("membership_cut", &cut),
    );
    if y.is_empty() {
        return Err(Error::EmptyStage("Y"));
    }
    let g1_power = PowerExpr::int_pow(sigma_g1.len(), eps_1200.clone());
    let mut marks = BitSet::new(half.classes());
    let mut min_sigma = (u64::MAX, 0);
    for &yy in &y {
        let mut row = index.row(yy).clone();
        row.intersect_with(rx);
        let c = half.sigma_size(row.iter_ones(), &mut marks);
        if c < min_sigma.0 {
            min_sigma = (c, yy);
        }
    }
    log.push(
        CheckRecord::compare(
            "Y",
            "min_{y∈Y} |Σ(R(y)∩R(x))| >= |Σ(G₁)|^{1-ε/1200}",
            Kind::Conditional,
            &PowerExpr::int(min_sigma.0),
            Relation::Ge,
            &g1_power,
        )
        .with("argmin_y", tuple_witness(points, &NeighborhoodIndex::decode_half(regime.n, h, min_sigma.1))),
    );

    // z ∈ R(x) maximizing |{y ∈ Y : z ∈ R(y)}|.
    let mut hits = vec![0u64; index.width];
    for &yy in &y {
        let mut row = index.row(yy).clone();
        row.intersect_with(rx);
        for z in row.iter_ones() {
            hits[z] += 1;
        }
    }
    let mut z = rx.iter_ones().next().expect("members of Y meet R(x)");
    for zz in rx.iter_ones() {
        if hits[zz] > hits[z] {
            z = zz;
        }
    }
    let mass: u64 = y.iter().map(|&yy| inter[yy]).sum();
    log.push(
        CheckRecord::ints(
            "z-pick",
            "|{y∈Y : yz∈G₁}| · |R(x)| >= Σ_{y∈Y} |R(y)∩R(x)|",
            Kind::Unconditional,
            BigInt::from(hits[z]) * BigInt::from(rx.count_ones()),
            Relation::Ge,
            mass,
        )
        .with("z", tuple_witness(points, &NeighborhoodIndex::decode_half(regime.n, h, z))),
    );
    let y1_bound = regime
        .alpha_pow(rat_int(4))
        .scale(rat(1, 16))
        .times(regime.n_pow(&hr - &eight_delta));
    log.push(CheckRecord::compare(
        "z-pick",
        "|{y∈Y : yz∈G₁}| >= (α^4/2^4) N^{s/2-8δ}",
        Kind::Conditional,
        &PowerExpr::int(hits[z]),
        Relation::Ge,
        &y1_bound,
    ));

    let y1: Vec<usize> = y.iter().copied().filter(|&yy| index.row(yy).get(z)).collect();
    if y1.is_empty() {
        return Err(Error::EmptyStage("Y₁"));
    }
    let sigma_y1 = half.sigma(y1.iter().copied());
    log.push(
        CheckRecord::ints(
            "Y₁",
            "|Y₁| = |{y∈Y : yz∈G₁}|",
            Kind::Unconditional,
            y1.len(),
            Relation::Eq,
            hits[z],
        )
        .with("|Σ(Y₁)|", sigma_y1.len()),
    );

    let mut reps = vec![0u64; half.classes()];
    for &yy in &y1 {
        reps[half.id(yy)] += 1;
    }
    let sig_len = sigma_y1.len() as u64;
    let total = y1.len() as u64;
    // r(Y₁; n) > |Y₁| / (2|Σ(Y₁)|).
    let popular: Vec<bool> = reps.iter().map(|&r| r > 0 && 2 * r * sig_len > total).collect();
    let s1 = VectorSet::from_sorted(
        regime.k,
        (0..half.classes())
            .filter(|&i| popular[i])
            .map(|i| half.key(i).clone())
            .collect(),
    );
    let max_rep = reps.iter().copied().max().unwrap_or(0);
    log.push(
        CheckRecord::ints(
            "S₁",
            "max_n r(Y₁;n) · |Σ(Y₁)| >= |Y₁|",
            Kind::Unconditional,
            BigInt::from(max_rep) * BigInt::from(sig_len),
            Relation::Ge,
            total,
        )
        .with("|S₁|", s1.len()),
    );
    let y2: Vec<usize> = y1.iter().copied().filter(|&yy| popular[half.id(yy)]).collect();
    if y2.is_empty() {
        return Err(Error::EmptyStage("Y₂"));
    }
    let sigma_y2 = half.sigma(y2.iter().copied());
    let sigma_rx = half.sigma(rx.iter_ones());
    log.push(CheckRecord::predicate(
        "Y₂",
        "Σ(Y₂) = S₁",
        Kind::Unconditional,
        Relation::Eq,
        sigma_y2 == s1,
    ));
    log.push(CheckRecord::ints(
        "Y₂",
        "2|Y₂| >= |Y₁|",
        Kind::Unconditional,
        2 * y2.len(),
        Relation::Ge,
        y1.len(),
    ));
    log.push(CheckRecord::compare(
        "Y₂",
        "|Y₂| > (α^4/2^5) N^{s/2-8δ}",
        Kind::Conditional,
        &PowerExpr::int(y2.len()),
        Relation::Gt,
        &y1_bound.clone().scale(rat(1, 2)),
    ));
    log.push(CheckRecord::ints(
        "Y₂",
        "|Σ(Y₂)| <= |Σ(G₁)|",
        Kind::Unconditional,
        sigma_y2.len(),
        Relation::Le,
        sigma_g1.len(),
    ));
    log.push(CheckRecord::ints(
        "Y₂",
        "|Σ(R(x))| <= |Σ(G₁)|",
        Kind::Unconditional,
        sigma_rx.len(),
        Relation::Le,
        sigma_g1.len(),
    ));
    log.push(CheckRecord::compare(
        "Y₂",
        "|Σ(Y₂)| >= |Σ(G₁)|^{1-ε/1200}",
        Kind::Conditional,
        &PowerExpr::int(sigma_y2.len()),
        Relation::Ge,
        &g1_power,
    ));
    Ok(Pruned {
        y,
        z,
        y1,
        sigma_y1,
        s1,
        y2,
        sigma_y2,
        sigma_rx,
    })
}

#[derive(Clone, Debug)]
pub struct Finalized {
    pub y3: Vec<usize>,
    /// Index of `w` among strings of length `s/2 - 1`.
    pub w: usize,
    /// Indices into the ground set.
    pub a_prime: Vec<usize>,
}

/// `Y₃`, `w` and `A′ = {a : wa ∈ Y₃}`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn assemble(
    y1: &[usize],
    sigma_y1: &VectorSet,
    s2: &VectorSet,
    half: &HalfSums,
    regime: &Regime,
    h: usize,
    points: &[PowerSumKey],
    log: &mut Vec<CheckRecord>,
) -> Result<Finalized> {
    let n = regime.n;
    let y3: Vec<usize> = y1.iter().copied().filter(|&y| s2.contains(half.key(half.id(y)))).collect();
    let mut reps = vec![0u64; half.classes()];
    for &y in y1 {
        reps[half.id(y)] += 1;
    }
    let s2_mass: u64 = s2
        .iter()
        .filter_map(|v| (0..half.classes()).find(|&i| half.key(i) == v).map(|i| reps[i]))
        .sum();
    log.push(CheckRecord::ints(
        "Y₃",
        "|Y₃| = Σ_{n∈S₂} r(Y₁;n)",
        Kind::Unconditional,
        y3.len(),
        Relation::Eq,
        s2_mass,
    ));
    log.push(CheckRecord::ints(
        "Y₃",
        "|Y₃| · 2|Σ(Y₁)| > |S₂| · |Y₁|",
        Kind::Unconditional,
        BigInt::from(y3.len()) * BigInt::from(2 * sigma_y1.len()),
        Relation::Gt,
        BigInt::from(s2.len()) * BigInt::from(y1.len()),
    ));
    let tri_eps = regime.triangle() * &regime.eps / rat_int(4);
    let exp = rat_int(BigInt::from(h)) - &regime.delta * rat_int(8) - tri_eps;
    log.push(CheckRecord::compare(
        "Y₃",
        "|Y₃| >= α^{ε/4} N^{s/2-8δ-k(k+1)ε/4}",
        Kind::Conditional,
        &PowerExpr::int(y3.len()),
        Relation::Ge,
        &regime.alpha_pow(&regime.eps / rat_int(4)).times(regime.n_pow(exp)),
    ));
    if y3.is_empty() {
        return Err(Error::EmptyStage("Y₃"));
    }

    let prefixes = n.pow((h - 1) as u32);
    let mut counts = vec![0u64; prefixes];
    for &y in &y3 {
        counts[y / n] += 1;
    }
    let mut w = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[w] {
            w = i;
        }
    }
    let a_prime: Vec<usize> = y3.iter().filter(|&&y| y / n == w).map(|&y| y % n).collect();
    let w_tuple = NeighborhoodIndex::decode_half(n, h - 1, w);
    log.push(
        CheckRecord::ints(
            "w-pick",
            "|{a : wa∈Y₃}| · N^{s/2-1} >= |Y₃|",
            Kind::Unconditional,
            BigInt::from(counts[w]) * BigInt::from(prefixes),
            Relation::Ge,
            y3.len(),
        )
        .with("w", tuple_witness(points, &w_tuple)),
    );
    let k2 = rat_int(BigInt::from(regime.k * regime.k));
    log.push(
        CheckRecord::compare(
            "A′",
            "|A′| >= α^{ε/4} N^{1-εk^2}",
            Kind::Conditional,
            &PowerExpr::int(a_prime.len()),
            Relation::Ge,
            &regime
                .alpha_pow(&regime.eps / rat_int(4))
                .times(regime.n_pow(BigRational::one() - &regime.eps * k2)),
        )
        .with("A′", tuple_witness(points, &a_prime)),
    );
    Ok(Finalized { y3, w, a_prime })
}

/// Per-`l` certification of `|l𝒜′|`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct FoldCertificate {
    pub l: usize,
    /// `|l𝒜′|`.
    pub size: usize,
    /// `|lS₂|`.
    pub s2_fold: usize,
    pub log10_lhs: f64,
    pub log10_rhs: f64,
    pub holds: bool,
    pub containment: bool,
    pub plunnecke: bool,
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn certify(
    a_prime: &[usize],
    w_sum: &PowerSumKey,
    s2: &VectorSet,
    doubling: usize,
    regime: &Regime,
    l: usize,
    points: &[PowerSumKey],
    caps: &Caps,
    log: &mut Vec<CheckRecord>,
) -> Result<FoldCertificate> {
    let curve = VectorSet::new(regime.k, a_prime.iter().map(|&i| points[i].clone()))?;
    let fold = curve.iterated(l, caps)?;
    let s2_fold = s2.iterated(l, caps)?;
    let shift = (0..l).fold(PowerSumKey::zero(regime.k), |acc, _| acc.add(w_sum));
    let containment = fold.translate(&shift).is_subset(&s2_fold);
    log.push(
        CheckRecord::predicate(
            "certify",
            format!("{l}𝒜′ + {l}Σ(w) ⊆ {l}S₂"),
            Kind::Unconditional,
            Relation::Subset,
            containment,
        )
        .with("l", l),
    );
    log.push(CheckRecord::ints(
        "certify",
        format!("|{l}𝒜′| <= |{l}S₂|"),
        Kind::Unconditional,
        fold.len(),
        Relation::Le,
        s2_fold.len(),
    ));
    // |lS₂| <= (|S₂+S₂|/|S₂|)^l |S₂|.
    let k_ratio = BigRational::new(BigInt::from(doubling), BigInt::from(s2.len()));
    let plunnecke_rhs = num_traits::pow(k_ratio, l) * rat_int(BigInt::from(s2.len()));
    let plunnecke = CheckRecord::compare(
        "certify",
        format!("|{l}S₂| <= K^{l} |S₂|"),
        Kind::Unconditional,
        &PowerExpr::int(s2_fold.len()),
        Relation::Le,
        &PowerExpr::rational(plunnecke_rhs),
    );
    let plunnecke_ok = plunnecke.holds();
    log.push(plunnecke);
    let lk = rat_int(BigInt::from(l + regime.k * regime.k));
    let alpha_exp = -(BigRational::one() + rat_int(2) * &regime.eps * &lk);
    let size_exp = regime.triangle() / rat_int(2) * (BigRational::one() + &regime.eps * &lk);
    let bound = regime
        .alpha_pow(alpha_exp)
        .times(PowerExpr::int_pow(a_prime.len(), size_exp));
    let lhs = PowerExpr::int(fold.len());
    let record = CheckRecord::compare(
        "certify",
        format!("|{l}𝒜′| <= α^{{-(1+2ε(l+k^2))}} |A′|^{{(k(k+1)/2)(1+ε(l+k^2))}}"),
        Kind::Conditional,
        &lhs,
        Relation::Le,
        &bound,
    )
    .with("l", l);
    let holds = record.holds();
    log.push(record);
    Ok(FoldCertificate {
        l,
        size: fold.len(),
        s2_fold: s2_fold.len(),
        log10_lhs: crate::check::sig12(lhs.log10()),
        log10_rhs: crate::check::sig12(bound.log10()),
        holds,
        containment,
        plunnecke: plunnecke_ok,
    })
}

pub(crate) fn sum_of(points: &[PowerSumKey], tuple: &[usize], k: usize) -> PowerSumKey {
    tuple.iter().fold(PowerSumKey::zero(k), |acc, &i| acc.add(&points[i]))
}

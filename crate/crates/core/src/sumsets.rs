//! Exact sumset algebra over moment-curve points and integer sets.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bits::BitSet;
use crate::caps::Caps;
use crate::check::rational_string;
use crate::counting::pow_u;
use crate::error::{Error, Result};
use crate::exactset::{GroundSet, MomentEmbedding};
use crate::key::PowerSumKey;

/// A finite set of integer vectors, kept sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorSet {
    dim: usize,
    members: Vec<PowerSumKey>,
}

impl VectorSet {
    pub fn new(dim: usize, members: impl IntoIterator<Item = PowerSumKey>) -> Result<Self> {
        let mut members: Vec<_> = members.into_iter().collect();
        if let Some(m) = members.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, m.dim()));
        }
        members.sort_unstable();
        members.dedup();
        Ok(VectorSet { dim, members })
    }

    /// Builds from already sorted, distinct members of dimension `dim`.
    pub(crate) fn from_sorted(dim: usize, members: Vec<PowerSumKey>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        VectorSet { dim, members }
    }

    pub fn from_ground(a: &GroundSet) -> Self {
        let members = a
            .elements()
            .iter()
            .map(|x| PowerSumKey::from_bigints(vec![x.clone()]))
            .collect();
        VectorSet::from_sorted(1, members)
    }

    pub fn from_embedding(e: &MomentEmbedding) -> Self {
        VectorSet::new(e.degree(), e.coords()).expect("embedding points share a dimension")
    }

    /// `{0}` in dimension `dim`, the 0-fold sumset.
    pub fn zero(dim: usize) -> Self {
        VectorSet::from_sorted(dim, vec![PowerSumKey::zero(dim)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[PowerSumKey] {
        &self.members
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PowerSumKey> {
        self.members.iter()
    }

    pub fn contains(&self, v: &PowerSumKey) -> bool {
        self.members.binary_search(v).is_ok()
    }

    pub fn index_of(&self, v: &PowerSumKey) -> Option<usize> {
        self.members.binary_search(v).ok()
    }

    pub fn negate(&self) -> VectorSet {
        let mut members: Vec<_> = self.members.iter().map(|v| v.neg()).collect();
        members.reverse();
        VectorSet::from_sorted(self.dim, members)
    }

    pub fn translate(&self, t: &PowerSumKey) -> VectorSet {
        VectorSet::from_sorted(self.dim, self.members.iter().map(|v| v.add(t)).collect())
    }

    /// `X + Y`.
    pub fn sumset(&self, other: &VectorSet, caps: &Caps) -> Result<VectorSet> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let work = BigUint::from(self.len()) * BigUint::from(other.len());
        if work > BigUint::from(caps.iterations) {
            return Err(Error::limit("sumset pairs", work, caps.iterations));
        }
        // Sorted, deduplicated runs per chunk of X, merged pairwise.
        let per_chunk = (self.len() / (rayon::current_num_threads() * 4)).max(1);
        let chunk = per_chunk.min(((1usize << 20) / other.len().max(1)).max(1));
        let members = self
            .members
            .par_chunks(chunk)
            .map(|xs| {
                let mut v = Vec::with_capacity(xs.len() * other.len());
                for x in xs {
                    v.extend(other.members.iter().map(|y| x.add(y)));
                }
                v.sort_unstable();
                v.dedup();
                v
            })
            .reduce(Vec::new, merge_sorted);
        if members.len() as u64 > caps.table_entries {
            return Err(Error::limit("sumset size", members.len(), caps.table_entries));
        }
        Ok(VectorSet::from_sorted(self.dim, members))
    }

    /// `lX` for `l >= 0`.
    pub fn iterated(&self, l: usize, caps: &Caps) -> Result<VectorSet> {
        let mut acc = VectorSet::zero(self.dim);
        for _ in 0..l {
            acc = acc.sumset(self, caps)?;
        }
        Ok(acc)
    }

    pub fn union(&self, other: &VectorSet) -> VectorSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() && j < other.len() {
            match self.members[i].cmp(&other.members[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.members[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.members[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.members[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.members[i..]);
        out.extend_from_slice(&other.members[j..]);
        VectorSet::from_sorted(self.dim, out)
    }

    pub fn is_subset(&self, other: &VectorSet) -> bool {
        let mut j = 0;
        for v in &self.members {
            while j < other.len() && other.members[j] < *v {
                j += 1;
            }
            if j == other.len() || other.members[j] != *v {
                return false;
            }
        }
        true
    }

    pub fn is_disjoint(&self, other: &VectorSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.len() && j < other.len() {
            match self.members[i].cmp(&other.members[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }
}

impl Serialize for VectorSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.members.serialize(s)
    }
}

/// `l𝒜` by iterated convolution on supports.
fn merge_sorted(a: Vec<PowerSumKey>, b: Vec<PowerSumKey>) -> Vec<PowerSumKey> {
    if a.is_empty() {
        return b;
    }
    if b.is_empty() {
        return a;
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut a, mut b) = (a.into_iter().peekable(), b.into_iter().peekable());
    loop {
        let next = match (a.peek(), b.peek()) {
            (Some(x), Some(y)) => match x.cmp(y) {
                std::cmp::Ordering::Less => a.next(),
                std::cmp::Ordering::Greater => b.next(),
                std::cmp::Ordering::Equal => {
                    b.next();
                    a.next()
                }
            },
            (Some(_), None) => a.next(),
            (None, Some(_)) => b.next(),
            (None, None) => break,
        };
        out.extend(next);
    }
    out
}

pub fn moment_sumset(e: &MomentEmbedding, l: usize, caps: &Caps) -> Result<VectorSet> {
    if l == 0 {
        return Err(Error::InvalidParams("l must be >= 1".into()));
    }
    let base = VectorSet::from_embedding(e);
    let mut acc = base.clone();
    for _ in 1..l {
        acc = acc.sumset(&base, caps)?;
    }
    Ok(acc)
}

/// `mX - nX`.
pub fn iterated_sum_difference(x: &VectorSet, m: usize, n: usize, caps: &Caps) -> Result<VectorSet> {
    if m + n == 0 {
        return Err(Error::InvalidParams("m + n must be >= 1".into()));
    }
    let plus = x.iterated(m, caps)?;
    if n == 0 {
        return Ok(plus);
    }
    let minus = x.iterated(n, caps)?.negate();
    plus.sumset(&minus, caps)
}

/// A set of `s`-tuples of indices into a fixed point list, stored as a bitset
/// over the `N^s` tuple indices. Index order is lexicographic in the tuple
/// (first coordinate most significant), so for even `s` the tuples with a
/// fixed first half `x` occupy one contiguous row of length `N^{s/2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleGraph {
    points: Arc<Vec<PowerSumKey>>,
    arity: usize,
    bits: BitSet,
}

impl TupleGraph {
    fn check_size(n: usize, arity: usize, caps: &Caps) -> Result<usize> {
        let total = pow_u(n, arity);
        if total > BigUint::from(caps.table_entries) {
            return Err(Error::limit("tuple graph", total, caps.table_entries));
        }
        Ok(n.pow(arity as u32))
    }

    pub fn empty(points: Arc<Vec<PowerSumKey>>, arity: usize, caps: &Caps) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput);
        }
        let len = Self::check_size(points.len(), arity, caps)?;
        Ok(TupleGraph {
            points,
            arity,
            bits: BitSet::new(len),
        })
    }

    /// The complete graph `𝒜ˢ`.
    pub fn full(points: Arc<Vec<PowerSumKey>>, arity: usize, caps: &Caps) -> Result<Self> {
        let mut g = Self::empty(points, arity, caps)?;
        g.bits = BitSet::full(g.bits.len());
        Ok(g)
    }

    pub fn from_tuples(
        points: Arc<Vec<PowerSumKey>>,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<usize>>,
        caps: &Caps,
    ) -> Result<Self> {
        let mut g = Self::empty(points, arity, caps)?;
        let n = g.ground_size();
        for t in tuples {
            if t.len() != arity || t.iter().any(|&i| i >= n) {
                return Err(Error::InvalidParams(format!("tuple {:?} out of range", t)));
            }
            let idx = g.encode(&t);
            g.bits.set(idx);
        }
        Ok(g)
    }

    pub(crate) fn from_bits(points: Arc<Vec<PowerSumKey>>, arity: usize, bits: BitSet) -> Self {
        debug_assert_eq!(bits.len(), points.len().pow(arity as u32));
        TupleGraph { points, arity, bits }
    }

    pub fn points(&self) -> &Arc<Vec<PowerSumKey>> {
        &self.points
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn ground_size(&self) -> usize {
        self.points.len()
    }

    pub fn degree(&self) -> usize {
        self.points[0].dim()
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    /// Number of tuples.
    pub fn len(&self) -> u64 {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.any()
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        let n = self.ground_size();
        tuple.iter().fold(0, |acc, &i| acc * n + i)
    }

    pub fn decode(&self, mut idx: usize) -> Vec<usize> {
        let n = self.ground_size();
        let mut t = vec![0; self.arity];
        for slot in t.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        t
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.bits.get(self.encode(tuple))
    }

    pub fn iter_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    pub fn iter_tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.bits.iter_ones().map(|i| self.decode(i))
    }

    pub fn tuple_sum(&self, tuple: &[usize]) -> PowerSumKey {
        tuple
            .iter()
            .fold(PowerSumKey::zero(self.degree()), |acc, &i| acc.add(&self.points[i]))
    }
}

/// Sums of all `len`-tuples, in index order, plus the distinct sums and the
/// id of each tuple's sum within them.
pub(crate) struct StringSums {
    pub distinct: Vec<PowerSumKey>,
    pub ids: Vec<u32>,
}

impl StringSums {
    pub fn new(points: &[PowerSumKey], len: usize) -> Self {
        let dim = points[0].dim();
        let mut sums = vec![PowerSumKey::zero(dim)];
        for _ in 0..len {
            sums = sums
                .iter()
                .flat_map(|s| points.iter().map(move |p| s.add(p)))
                .collect();
        }
        let mut distinct = sums.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let lookup: HashMap<&PowerSumKey, u32> = distinct.iter().enumerate().map(|(i, k)| (k, i as u32)).collect();
        let ids = sums.iter().map(|s| lookup[s]).collect();
        StringSums { distinct, ids }
    }
}

/// `Σ(G)`, via the distinct (prefix-sum, suffix-sum) pairs that occur in `G`.
pub fn restricted_sumset(g: &TupleGraph) -> Result<VectorSet> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let head = g.arity / 2;
    let tail = g.arity - head;
    let pre = StringSums::new(&g.points, head);
    let suf = StringSums::new(&g.points, tail);
    let row = g.ground_size().pow(tail as u32);
    let width = suf.distinct.len();
    let mut pairs = BitSet::new(pre.distinct.len() * width);
    for idx in g.bits.iter_ones() {
        let (x, y) = (idx / row, idx % row);
        pairs.set(pre.ids[x] as usize * width + suf.ids[y] as usize);
    }
    let sums: HashSet<PowerSumKey> = pairs
        .iter_ones()
        .map(|p| pre.distinct[p / width].add(&suf.distinct[p % width]))
        .collect();
    VectorSet::new(g.degree(), sums)
}

/// A finite set of exact rationals in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSet {
    members: Vec<BigRational>,
}

impl RationalSet {
    pub fn new(members: impl IntoIterator<Item = BigRational>) -> Self {
        let set: BTreeSet<_> = members.into_iter().collect();
        RationalSet {
            members: set.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[BigRational] {
        &self.members
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        self.members.binary_search(x).is_ok()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.members.iter().map(rational_string).collect()
    }
}

impl Serialize for RationalSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

/// `A^{(l)} = {a₁⋯a_l}`.
pub fn product_set(a: &GroundSet, l: usize, caps: &Caps) -> Result<RationalSet> {
    if l == 0 {
        return Err(Error::InvalidParams("l must be >= 1".into()));
    }
    let mut acc: BTreeSet<BigInt> = a.elements().iter().cloned().collect();
    for _ in 1..l {
        let work = BigUint::from(acc.len()) * BigUint::from(a.len());
        if work > BigUint::from(caps.iterations) {
            return Err(Error::limit("product set pairs", work, caps.iterations));
        }
        acc = acc.iter().flat_map(|x| a.elements().iter().map(move |y| x * y)).collect();
    }
    Ok(RationalSet::new(acc.into_iter().map(BigRational::from_integer)))
}

/// `A/A` as reduced fractions.
pub fn quotient_set(a: &GroundSet) -> Result<RationalSet> {
    if a.contains_zero() {
        return Err(Error::ZeroElement);
    }
    let e = a.elements();
    Ok(RationalSet::new(
        e.iter().flat_map(|a1| e.iter().map(move |a2| BigRational::new(a2.clone(), a1.clone()))),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlunneckeReport {
    pub m: usize,
    pub n: usize,
    /// `|A+A|/|A|`.
    #[serde(rename = "K", serialize_with = "ser_rational")]
    pub k: BigRational,
    /// `|mA - nA|`.
    pub lhs: usize,
    /// `K^{m+n}|A|`.
    #[serde(serialize_with = "ser_rational")]
    pub rhs: BigRational,
    pub pass: bool,
}

fn ser_rational<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(v))
}

pub fn plunnecke_check(x: &VectorSet, m: usize, n: usize, caps: &Caps) -> Result<PlunneckeReport> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let doubled = x.sumset(x, caps)?;
    let k = BigRational::new(BigInt::from(doubled.len()), BigInt::from(x.len()));
    let lhs = iterated_sum_difference(x, m, n, caps)?.len();
    let rhs = num_traits::pow(k.clone(), m + n) * BigRational::from_integer(BigInt::from(x.len()));
    let pass = BigRational::from_integer(BigInt::from(lhs)) <= rhs;
    Ok(PlunneckeReport { m, n, k, lhs, rhs, pass })
}

/// `|A/A|/|A| <= (|AA|/|A|)²`, checked by cross-multiplication.
pub fn quotient_product_check(a: &GroundSet, caps: &Caps) -> Result<bool> {
    let q = BigUint::from(quotient_set(a)?.len());
    let p = BigUint::from(product_set(a, 2, caps)?.len());
    let n = BigUint::from(a.len());
    Ok(q * &n <= &p * &p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactset::moment_embed;

    fn set(v: &[i64]) -> GroundSet {
        GroundSet::from_i64s(v).unwrap()
    }

    fn ints(v: &[i64]) -> VectorSet {
        VectorSet::from_ground(&set(v))
    }

    fn keys(v: &[&[i64]]) -> Vec<PowerSumKey> {
        v.iter().map(|c| PowerSumKey::from_i64s(c)).collect()
    }

    #[test]
    fn moment_sumset_examples() {
        let c = Caps::default();
        let e = moment_embed(&set(&[1, 2, 3]), 2).unwrap();
        let s = moment_sumset(&e, 2, &c).unwrap();
        assert_eq!(s.members(), &keys(&[&[2, 2], &[3, 5], &[4, 8], &[4, 10], &[5, 13], &[6, 18]])[..]);
        let e = moment_embed(&set(&[0, 1]), 2).unwrap();
        assert_eq!(
            moment_sumset(&e, 2, &c).unwrap().members(),
            &keys(&[&[0, 0], &[1, 1], &[2, 2]])[..]
        );
        let e = moment_embed(&set(&[-4, 1, 9]), 3).unwrap();
        assert_eq!(moment_sumset(&e, 1, &c).unwrap().len(), 3);
    }

    #[test]
    fn restricted_sumset_examples() {
        let c = Caps::default();
        let pts = Arc::new(keys(&[&[0], &[1]]));
        let full = TupleGraph::full(pts.clone(), 2, &c).unwrap();
        assert_eq!(restricted_sumset(&full).unwrap(), ints(&[0, 1, 2]));
        let one = TupleGraph::from_tuples(pts.clone(), 2, [vec![1, 0]], &c).unwrap();
        assert_eq!(restricted_sumset(&one).unwrap(), ints(&[1]));
        let none = TupleGraph::empty(pts, 2, &c).unwrap();
        assert_eq!(restricted_sumset(&none), Err(Error::EmptyGraph));
        let e = moment_embed(&set(&[1, 2, 3, 5]), 2).unwrap();
        let pts = Arc::new(e.coords());
        for s in 1..=3 {
            let g = TupleGraph::full(pts.clone(), s, &c).unwrap();
            assert_eq!(restricted_sumset(&g).unwrap(), moment_sumset(&e, s, &c).unwrap());
        }
    }

    #[test]
    fn tuple_index_order_is_lexicographic() {
        let c = Caps::default();
        let g = TupleGraph::full(Arc::new(keys(&[&[0], &[1], &[2]])), 3, &c).unwrap();
        let tuples: Vec<_> = g.iter_tuples().collect();
        let mut sorted = tuples.clone();
        sorted.sort();
        assert_eq!(tuples, sorted);
        assert_eq!(g.decode(g.encode(&[2, 0, 1])), vec![2, 0, 1]);
    }

    #[test]
    fn sum_difference_examples() {
        let c = Caps::default();
        assert_eq!(iterated_sum_difference(&ints(&[0, 1]), 1, 1, &c).unwrap(), ints(&[-1, 0, 1]));
        let ten: Vec<i64> = (1..=10).collect();
        let d = iterated_sum_difference(&ints(&ten), 2, 1, &c).unwrap();
        assert_eq!(d, ints(&(-8..=19).collect::<Vec<_>>()));
        assert_eq!(d.len(), 28);
        assert_eq!(iterated_sum_difference(&ints(&ten), 1, 0, &c).unwrap(), ints(&ten));
        assert!(iterated_sum_difference(&ints(&ten), 0, 0, &c).is_err());
    }

    #[test]
    fn multiplicative_examples() {
        let c = Caps::default();
        let a = set(&[1, 2, 4]);
        assert_eq!(product_set(&a, 2, &c).unwrap().to_strings(), ["1", "2", "4", "8", "16"]);
        assert_eq!(product_set(&a, 3, &c).unwrap().len(), 7);
        assert_eq!(product_set(&a, 1, &c).unwrap().len(), 3);
        assert_eq!(quotient_set(&a).unwrap().to_strings(), ["1/4", "1/2", "1", "2", "4"]);
        assert_eq!(quotient_set(&set(&[7])).unwrap().to_strings(), ["1"]);
        // 9 reduced fractions below 1 with numerator and denominator at most 5.
        assert_eq!(quotient_set(&set(&[1, 2, 3, 4, 5])).unwrap().len(), 19);
        assert_eq!(quotient_set(&set(&[0, 3])), Err(Error::ZeroElement));
        assert_eq!(quotient_set(&set(&[-2, 3])).unwrap().to_strings(), ["-3/2", "-2/3", "1"]);
    }

    #[test]
    fn plunnecke_examples() {
        let c = Caps::default();
        let ten: Vec<i64> = (1..=10).collect();
        let r = plunnecke_check(&ints(&ten), 2, 1, &c).unwrap();
        assert_eq!(rational_string(&r.k), "19/10");
        assert_eq!(r.lhs, 28);
        assert!(r.pass);
        let r = plunnecke_check(&ints(&[5]), 2, 2, &c).unwrap();
        assert_eq!((r.lhs, rational_string(&r.rhs)), (1, "1".to_string()));
        assert!(r.pass);
        let r = plunnecke_check(&ints(&[1, 2, 4, 8]), 1, 1, &c).unwrap();
        // A+A = {2,3,4,5,6,8,9,10,12,16}.
        assert_eq!(rational_string(&r.k), "5/2");
        assert_eq!(r.lhs, 13);
        assert!(r.pass);
    }

    #[test]
    fn set_relations() {
        let a = ints(&[1, 3, 5]);
        let b = ints(&[0, 1, 3, 5, 9]);
        assert!(a.is_subset(&b));
        assert!(!b.is_subset(&a));
        assert!(a.is_disjoint(&ints(&[2, 4])));
        assert!(!a.is_disjoint(&b));
        assert_eq!(a.union(&ints(&[2, 3])), ints(&[1, 2, 3, 5]));
        assert_eq!(a.negate(), ints(&[-5, -3, -1]));
        let json = serde_json::to_string(&ints(&[-1, 2])).unwrap();
        assert_eq!(json, r#"[["-1"],["2"]]"#);
    }

    #[test]
    fn caps_are_enforced() {
        let big: Vec<i64> = (0..100).collect();
        assert!(matches!(
            ints(&big).sumset(&ints(&big), &Caps::uniform(1000)),
            Err(Error::ResourceLimit { .. })
        ));
        let pts = Arc::new(keys(&[&[0], &[1], &[2]]));
        assert!(TupleGraph::full(pts, 10, &Caps::uniform(1000)).is_err());
    }
}

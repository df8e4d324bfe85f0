//! Brute-force oracles over `i64` sets. Written independently of the library:
//! plain enumeration, no meet-in-the-middle, no shared helpers.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rand::Rng;
use vinolab_core::GroundSet;

pub type Vector = Vec<i128>;

pub fn set(v: &[i64]) -> GroundSet {
    GroundSet::from_i64s(v).unwrap()
}

pub fn elements(a: &GroundSet) -> Vec<i64> {
    a.elements().iter().map(|e| i64::try_from(e).unwrap()).collect()
}

/// `n` distinct values from `[lo, hi]`, sorted; `n` uniform in `1..=max_n`.
pub fn random_set(rng: &mut impl Rng, lo: i64, hi: i64, max_n: usize) -> Vec<i64> {
    let n = rng.gen_range(1..=max_n);
    let mut out = BTreeSet::new();
    while out.len() < n {
        out.insert(rng.gen_range(lo..=hi));
    }
    out.into_iter().collect()
}

pub fn powers(a: i64, k: usize) -> Vector {
    (1..=k as u32).map(|j| (a as i128).pow(j)).collect()
}

fn add(x: &[i128], y: &[i128]) -> Vector {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

/// Every `t`-tuple of indices in `0..n`, in lexicographic order.
fn tuples(n: usize, t: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(t as u32);
    (0..total).map(move |mut idx| {
        let mut v = vec![0; t];
        for slot in v.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        v
    })
}

/// `J_{s,k}(A)` by testing every `2s`-tuple.
pub fn j_naive(a: &[i64], s: usize, k: usize) -> u128 {
    let pts: Vec<Vector> = a.iter().map(|&x| powers(x, k)).collect();
    let zero = vec![0i128; k];
    let mut count = 0u128;
    for t in tuples(a.len(), 2 * s) {
        let mut acc = zero.clone();
        for (pos, &i) in t.iter().enumerate() {
            for (c, p) in acc.iter_mut().zip(&pts[i]) {
                if pos < s {
                    *c += p;
                } else {
                    *c -= p;
                }
            }
        }
        if acc == zero {
            count += 1;
        }
    }
    count
}

/// `|{(a,b,c,d) : a + b = c + d}|`.
pub fn energy(a: &[i64]) -> u64 {
    let mut n = 0;
    for &w in a {
        for &x in a {
            for &y in a {
                for &z in a {
                    if w + x == y + z {
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

pub fn sumset(x: &BTreeSet<Vector>, y: &BTreeSet<Vector>) -> BTreeSet<Vector> {
    x.iter().flat_map(|p| y.iter().map(move |q| add(p, q))).collect()
}

/// `l𝒜` for the degree-`k` moment curve.
pub fn moment_sumset(a: &[i64], k: usize, l: usize) -> BTreeSet<Vector> {
    let base: BTreeSet<Vector> = a.iter().map(|&x| powers(x, k)).collect();
    let mut acc: BTreeSet<Vector> = [vec![0; k]].into_iter().collect();
    for _ in 0..l {
        acc = sumset(&acc, &base);
    }
    acc
}

/// `|mA - nA|` for integers.
pub fn sum_diff(a: &[i64], m: usize, n: usize) -> usize {
    let mut acc: BTreeSet<i64> = [0].into_iter().collect();
    for _ in 0..m {
        acc = acc.iter().flat_map(|s| a.iter().map(move |x| s + x)).collect();
    }
    for _ in 0..n {
        acc = acc.iter().flat_map(|s| a.iter().map(move |x| s - x)).collect();
    }
    acc.len()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Reduced `p/q` (with `q > 0`) for `x/y`.
pub fn reduce(x: i64, y: i64) -> (i64, i64) {
    let g = gcd(x, y);
    let (p, q) = (x / g, y / g);
    if q < 0 {
        (-p, -q)
    } else {
        (p, q)
    }
}

/// `d(x)` for every `x ∈ A/A`, keyed by reduced fraction.
pub fn quotient_counts(a: &[i64]) -> BTreeMap<(i64, i64), u64> {
    let mut d = BTreeMap::new();
    for &x in a {
        for &y in a {
            *d.entry(reduce(x, y)).or_insert(0) += 1;
        }
    }
    d
}

pub fn multiplicative_energy(a: &[i64]) -> u64 {
    quotient_counts(a).values().map(|d| d * d).sum()
}

pub fn product_count(a: &[i64]) -> usize {
    a.iter().flat_map(|x| a.iter().map(move |y| x * y)).collect::<BTreeSet<_>>().len()
}

/// Dyadic levels of `d`: index `i` holds the `x` with `2^i <= d(x) < 2^{i+1}`.
pub struct Levels {
    pub count: usize,
    pub mass: Vec<u64>,
    pub best: usize,
    pub members: Vec<(i64, i64)>,
}

pub fn dyadic_levels(a: &[i64]) -> Levels {
    let n = a.len();
    let mut count = 1;
    while (1usize << (count - 1)) < n {
        count += 1;
    }
    let d = quotient_counts(a);
    let level = |v: u64| 63 - v.leading_zeros() as usize;
    let mut mass = vec![0u64; count];
    for &v in d.values() {
        mass[level(v)] += v * v;
    }
    let mut best = 0;
    for i in 1..count {
        if mass[i] > mass[best] {
            best = i;
        }
    }
    let mut members: Vec<(i64, i64)> = d.iter().filter(|(_, &v)| level(v) == best).map(|(&x, _)| x).collect();
    sort_by_value(&mut members);
    Levels { count, mass, best, members }
}

/// Increasing order of `p/q` (denominators positive).
pub fn sort_by_value(v: &mut [(i64, i64)]) {
    v.sort_by(|x, y| (x.0 as i128 * y.1 as i128).cmp(&(y.0 as i128 * x.1 as i128)));
}

/// The quotients whose multiplicity lies in `[2^i, 2^{i+1})`, increasing.
pub fn level_members(a: &[i64], i: usize) -> Vec<(i64, i64)> {
    let mut out: Vec<(i64, i64)> = quotient_counts(a)
        .into_iter()
        .filter(|(_, v)| 63 - v.leading_zeros() as usize == i)
        .map(|(x, _)| x)
        .collect();
    sort_by_value(&mut out);
    out
}

/// Points `(a₁,…,a₁ᵏ, a₂,…,a₂ᵏ)` with `a₂ = (p/q)·a₁`, both in `A`.
pub fn line_points(a: &[i64], (p, q): (i64, i64), k: usize) -> BTreeSet<Vector> {
    let members: BTreeSet<i64> = a.iter().copied().collect();
    a.iter()
        .filter(|&&x| (x * p) % q == 0 && members.contains(&(x * p / q)))
        .map(|&x| {
            let mut v = powers(x, k);
            v.extend(powers(x * p / q, k));
            v
        })
        .collect()
}

pub fn big(v: u128) -> BigInt {
    BigInt::from(v)
}

mod common;

use std::collections::BTreeSet;

use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vinolab_core::caps::Caps;
use vinolab_core::counting::quotient_counts as lib_quotients;
use vinolab_core::sumproduct::{build_line_family, check_line_lemmas, dyadic_level_select, vmvtsp_report};
use vinolab_core::GroundSet;

fn fold(x: &BTreeSet<Vector>, u: usize) -> BTreeSet<Vector> {
    let mut acc = x.clone();
    for _ in 1..u {
        acc = sumset(&acc, x);
    }
    acc
}

struct OracleLemmas {
    ul_failures: Vec<(usize, usize)>,
    pnp_failures: Vec<(usize, usize)>,
}

fn oracle_lemmas(raw: &[i64], k: usize, u: usize) -> OracleLemmas {
    let levels = dyadic_levels(raw);
    let folds: Vec<BTreeSet<Vector>> = levels.members.iter().map(|&q| fold(&line_points(raw, q, k), u)).collect();
    let n = folds.len();
    let mut ul_failures = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if sumset(&folds[i], &folds[j]).len() != folds[i].len() * folds[j].len() {
                ul_failures.push((i, j));
            }
        }
    }
    let blocks: Vec<BTreeSet<Vector>> = (0..n.saturating_sub(1)).map(|i| sumset(&folds[i], &folds[i + 1])).collect();
    let mut pnp_failures = Vec::new();
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            if !blocks[i].is_disjoint(&blocks[j]) {
                pnp_failures.push((i, j));
            }
        }
    }
    OracleLemmas { ul_failures, pnp_failures }
}

fn lib_lemmas(raw: &[i64], k: usize, u: usize) -> vinolab_core::sumproduct::LineLemmaReport {
    let a = set(raw);
    let lv = dyadic_level_select(&lib_quotients(&a).unwrap());
    let fams: Vec<_> = lv.quotients.iter().map(|q| build_line_family(&a, k, q).unwrap()).collect();
    check_line_lemmas(&a, k, u, &fams, &Caps::default()).unwrap()
}

#[test]
fn line_families_match_oracle() {
    let raw: Vec<i64> = (1..=12).collect();
    let a = set(&raw);
    let lv = dyadic_level_select(&lib_quotients(&a).unwrap());
    let want = dyadic_levels(&raw);
    let got: Vec<(i64, i64)> = lv
        .quotients
        .iter()
        .map(|q| (i64::try_from(q.numer()).unwrap(), i64::try_from(q.denom()).unwrap()))
        .collect();
    assert_eq!(got, want.members);
    for (q, &pq) in lv.quotients.iter().zip(&want.members) {
        let fam = build_line_family(&a, 2, q).unwrap();
        let pts: BTreeSet<Vector> = fam
            .l
            .iter()
            .map(|v| v.to_strings().iter().map(|c| c.parse().unwrap()).collect())
            .collect();
        assert_eq!(pts, line_points(&raw, pq, 2));
    }
}

#[test]
fn interval_twelve_lemmas_hold() {
    let raw: Vec<i64> = (1..=12).collect();
    for u in 1..=2 {
        let rep = lib_lemmas(&raw, 2, u);
        let oracle = oracle_lemmas(&raw, 2, u);
        assert!(oracle.ul_failures.is_empty() && oracle.pnp_failures.is_empty());
        assert!(rep.all_ok(), "u={u}");
    }
}

#[test]
fn lemma_failures_agree_with_oracle_on_random_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..12 {
        let raw = random_set(&mut rng, 1, 30, 10);
        for u in 1..=2 {
            let rep = lib_lemmas(&raw, 2, u);
            let oracle = oracle_lemmas(&raw, 2, u);
            assert_eq!(rep.ul_failures, oracle.ul_failures, "{raw:?} u={u}");
            assert_eq!(rep.pnp_failures, oracle.pnp_failures, "{raw:?} u={u}");
        }
    }
}

#[test]
fn geometric_quotient_set() {
    for n in 2..=10u32 {
        let a = GroundSet::new((0..n).map(|i| BigInt::from(3u32).pow(i)).collect()).unwrap();
        let q = lib_quotients(&a).unwrap().support();
        assert_eq!(q, 2 * n as usize - 1);
    }
    let gp = GroundSet::new((0..8).map(|i| BigInt::from(1u32) << i).collect()).unwrap();
    let rep = vmvtsp_report(&gp, 3, 2, &BigRational::new(1.into(), 10.into()), None, &Caps::default()).unwrap();
    assert_eq!(rep.quotient_size, 15);
    assert!(rep.exact_chain_ok());
}

mod common;

use common::*;
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vinolab_core::caps::Caps;
use vinolab_core::counting::{additive_energy, quotient_counts as lib_quotients, vinogradov_count, vinogradov_count_naive};
use vinolab_core::exactset::moment_embed;
use vinolab_core::sumsets::{iterated_sum_difference, moment_sumset as lib_moment_sumset, product_set, VectorSet};

#[test]
fn vinogradov_counts_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let caps = Caps::default();
    for _ in 0..30 {
        let raw = random_set(&mut rng, -12, 12, 7);
        let a = set(&raw);
        for s in 1..=3 {
            for k in 1..=3 {
                let want = BigUint::from(j_naive(&raw, s, k));
                assert_eq!(vinogradov_count(&a, s, k, &caps).unwrap().j, want, "{raw:?} s={s} k={k}");
                assert_eq!(vinogradov_count_naive(&a, s, k, &caps).unwrap(), want);
            }
        }
    }
}

#[test]
fn energy_and_sumsets_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let caps = Caps::default();
    for _ in 0..30 {
        let raw = random_set(&mut rng, -20, 20, 9);
        let a = set(&raw);
        let pts = moment_embed(&a, 1).unwrap().coords();
        assert_eq!(additive_energy(&pts, &pts).unwrap(), BigUint::from(energy(&raw)));
        for k in 1..=3 {
            for l in 1..=3 {
                let lib = lib_moment_sumset(&moment_embed(&a, k).unwrap(), l, &caps).unwrap();
                let want = moment_sumset(&raw, k, l);
                assert_eq!(lib.len(), want.len(), "{raw:?} k={k} l={l}");
                let got: Vec<Vec<i128>> = lib
                    .iter()
                    .map(|v| v.to_strings().iter().map(|c| c.parse().unwrap()).collect())
                    .collect();
                assert_eq!(got, want.into_iter().collect::<Vec<_>>());
            }
        }
        for (m, n) in [(1, 1), (2, 1), (1, 2), (3, 0)] {
            let x = iterated_sum_difference(&VectorSet::from_ground(&a), m, n, &caps).unwrap();
            assert_eq!(x.len(), sum_diff(&raw, m, n));
        }
    }
}

#[test]
fn quotients_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..40 {
        let raw = random_set(&mut rng, 1, 50, 12);
        let a = set(&raw);
        let q = lib_quotients(&a).unwrap();
        let want = quotient_counts(&raw);
        assert_eq!(q.support(), want.len());
        assert_eq!(q.m, BigUint::from(multiplicative_energy(&raw)));
        let got: std::collections::BTreeMap<(i64, i64), u64> = q
            .d
            .iter()
            .map(|(x, &c)| ((i64::try_from(x.numer()).unwrap(), i64::try_from(x.denom()).unwrap()), c))
            .collect();
        assert_eq!(got, want);
        assert_eq!(product_set(&a, 2, &Caps::default()).unwrap().len(), product_count(&raw));
    }
}

#[test]
fn pinned_values() {
    let caps = Caps::default();
    for (raw, s, k, want) in [(&[0i64, 1, 2][..], 2, 1, 19u128), (&[1, 2, 3][..], 3, 2, 93)] {
        assert_eq!(j_naive(raw, s, k), want);
        assert_eq!(vinogradov_count(&set(raw), s, k, &caps).unwrap().j, BigUint::from(want));
    }
    let ap: Vec<i64> = (0..8).collect();
    assert_eq!(energy(&ap), 344);
    assert_eq!(quotient_counts(&[1, 2, 4]).len(), 5);
    assert_eq!(multiplicative_energy(&[1, 2, 4]), 19);
    assert_eq!(moment_sumset(&[1, 2, 3], 2, 2).len(), 6);
}

//! Acceptance criteria 1-9. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on any FAIL.

#[path = "../../core/tests/common/mod.rs"]
mod oracle;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use oracle::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vinolab_core::caps::Caps;
use vinolab_core::counting::{
    additive_energy, pow_u, quotient_counts as lib_quotients, vinogradov_count, vinogradov_count_naive,
};
use vinolab_core::exactset::moment_embed;
use vinolab_core::extraction::{bsg_extract, run_pipeline, Outcome, PipelineParams};
use vinolab_core::sumproduct::{build_line_family, check_line_lemmas, dyadic_level_select, vmvtsp_report};
use vinolab_core::sumsets::{iterated_sum_difference, moment_sumset as lib_moment_sumset, VectorSet};
use vinolab_core::{GroundSet, PowerSumKey};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(took)
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let caps = Caps::default();
    let mut rng = ChaCha8Rng::seed_from_u64(20240501);
    let mut compared = 0;
    for _ in 0..50 {
        let raw = random_set(&mut rng, -16, 16, 8);
        let a = set(&raw);
        for s in 1..=3 {
            for k in 1..=2 {
                let fast = vinogradov_count(&a, s, k, &caps).map_err(|e| e.to_string())?.j;
                let naive = vinogradov_count_naive(&a, s, k, &caps).map_err(|e| e.to_string())?;
                ensure(fast == naive, || format!("{raw:?} s={s} k={k}: {fast} vs {naive}"))?;
                if s <= 2 {
                    let brute = BigUint::from(j_naive(&raw, s, k));
                    ensure(fast == brute, || format!("{raw:?} s={s} k={k}: oracle {brute}"))?;
                }
                compared += 1;
            }
        }
    }
    let took = within(start, Duration::from_secs(30))?;
    Ok(format!("{compared} (set, s, k) triples agree in {took:.2?}"))
}

fn criterion_2() -> Check {
    let caps = Caps::default();
    let mut out = Vec::new();
    for (raw, s, k, want) in [(&[0i64, 1, 2][..], 2, 1, 19u128), (&[1, 2, 3][..], 3, 2, 93)] {
        let brute = j_naive(raw, s, k);
        ensure(brute == want, || format!("oracle J_{{{s},{k}}}({raw:?}) = {brute}"))?;
        let lib = vinogradov_count(&set(raw), s, k, &caps).map_err(|e| e.to_string())?.j;
        ensure(lib == BigUint::from(want), || format!("J_{{{s},{k}}}({raw:?}) = {lib}"))?;
        out.push(format!("J={want}"));
    }
    let ap: Vec<i64> = (0..8).collect();
    ensure(energy(&ap) == 344, || "oracle E(AP8)".into())?;
    let pts = moment_embed(&set(&ap), 1).map_err(|e| e.to_string())?.coords();
    let e = additive_energy(&pts, &pts).map_err(|e| e.to_string())?;
    ensure(e == BigUint::from(344u32), || format!("E(AP8) = {e}"))?;
    out.push("E=344".into());
    ensure(quotient_counts(&[1, 2, 4]).len() == 5 && multiplicative_energy(&[1, 2, 4]) == 19, || "oracle A/A".into())?;
    let q = lib_quotients(&set(&[1, 2, 4])).map_err(|e| e.to_string())?;
    ensure(q.support() == 5 && q.m == BigUint::from(19u32), || format!("|A/A|={} M={}", q.support(), q.m))?;
    out.push("|A/A|=5 M=19".into());
    ensure(moment_sumset(&[1, 2, 3], 2, 2).len() == 6, || "oracle |2A|".into())?;
    let two = lib_moment_sumset(&moment_embed(&set(&[1, 2, 3]), 2).unwrap(), 2, &caps).map_err(|e| e.to_string())?;
    ensure(two.len() == 6, || format!("|2A| = {}", two.len()))?;
    out.push("|2A|=6".into());
    Ok(out.join(", "))
}

fn criterion_3() -> Check {
    let caps = Caps::default();
    let mut rng = ChaCha8Rng::seed_from_u64(314159);
    let mut checked = 0;
    for _ in 0..100 {
        let raw = random_set(&mut rng, 1, 100, 16);
        let a = set(&raw);
        let n = raw.len();
        for (s, k) in [(2, 1), (3, 2)] {
            let st = vinogradov_count(&a, s, k, &caps).map_err(|e| e.to_string())?;
            ensure(st.j >= pow_u(n, s), || format!("{raw:?}: J_{{{s},{k}}} < N^s"))?;
            let size = BigUint::from(st.sumset_size);
            ensure(&st.j * size >= pow_u(n, 2 * s), || format!("{raw:?}: J|sA| < N^2s"))?;
            checked += 2;
        }
        let q = lib_quotients(&a).map_err(|e| e.to_string())?;
        ensure(q.support() == quotient_counts(&raw).len(), || format!("{raw:?}: |A/A| disagrees with oracle"))?;
        ensure(BigUint::from(q.support()) * &q.m >= pow_u(n, 4), || format!("{raw:?}: |A/A|M < N^4"))?;
        let lv = dyadic_level_select(&q);
        ensure(BigUint::from(lv.levels) * &lv.mass >= q.m, || format!("{raw:?}: levels·L < M"))?;
        ensure(lv.mass <= BigUint::from(lv.n) << (2 * lv.level + 2), || format!("{raw:?}: L > n 2^(2I+2)"))?;
        let diff = iterated_sum_difference(&VectorSet::from_ground(&a), 2, 1, &caps).map_err(|e| e.to_string())?;
        ensure(diff.len() == sum_diff(&raw, 2, 1), || format!("{raw:?}: |2A-A| disagrees with oracle"))?;
        let sum = sum_diff(&raw, 2, 0);
        // |2A-A| |A|^2 <= |A+A|^3, i.e. (|A+A|/|A|)^3 |A| cleared of denominators.
        let lhs = BigUint::from(diff.len()) * BigUint::from(n) * BigUint::from(n);
        ensure(lhs <= BigUint::from(sum).pow(3), || format!("{raw:?}: Plünnecke fails"))?;
        checked += 4;
    }
    Ok(format!("{checked} inequalities on 100 sets, zero failures"))
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let caps = Caps::default();
    let mut pts = Vec::new();
    for n in [16usize, 24, 32, 48] {
        let j = vinogradov_count(&GroundSet::interval(1, n as i64).unwrap(), 3, 2, &caps)
            .map_err(|e| e.to_string())?
            .j;
        let j = j.to_string().parse::<f64>().unwrap();
        pts.push(((n as f64).ln(), j.ln()));
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let slope = num / den;
    ensure((3.2..=3.8).contains(&slope), || format!("slope {slope:.4} outside [3.2, 3.8]"))?;
    let took = within(start, Duration::from_secs(120))?;
    Ok(format!("slope {slope:.4} (target 3.5) in {took:.2?}"))
}

/// Oracle recount of both lemmas for the given quotients; returns the pair count.
fn recount_lemmas(raw: &[i64], quotients: &[(i64, i64)], u: usize) -> Result<usize, String> {
    let folds: Vec<_> = quotients
        .iter()
        .map(|&q| {
            let base = line_points(raw, q, 2);
            let mut acc = base.clone();
            for _ in 1..u {
                acc = sumset(&acc, &base);
            }
            acc
        })
        .collect();
    let n = folds.len();
    for i in 0..n {
        for j in i + 1..n {
            let size = sumset(&folds[i], &folds[j]).len();
            ensure(size == folds[i].len() * folds[j].len(), || format!("u={u}: oracle ul fails at ({i},{j})"))?;
        }
    }
    let blocks: Vec<_> = (0..n.saturating_sub(1)).map(|i| sumset(&folds[i], &folds[i + 1])).collect();
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            ensure(blocks[i].is_disjoint(&blocks[j]), || format!("u={u}: oracle blocks {i},{j} overlap"))?;
        }
    }
    Ok(n * n.saturating_sub(1) / 2)
}

fn criterion_5() -> Check {
    let raw: Vec<i64> = (1..=12).collect();
    let a = set(&raw);
    let q = lib_quotients(&a).unwrap();
    let lv = dyadic_level_select(&q);
    let oracle_levels = dyadic_levels(&raw);
    ensure(lv.level as usize == oracle_levels.best && lv.n == oracle_levels.members.len(), || {
        "level selection disagrees with oracle".into()
    })?;
    // The selected level first, then every other level as extra coverage.
    let mut order = vec![lv.level as usize];
    order.extend((0..oracle_levels.count).filter(|&i| i != lv.level as usize));
    let mut pairs = 0;
    let mut families = 0;
    for level in order {
        let members = level_members(&raw, level);
        let fams: Vec<_> = members
            .iter()
            .map(|&(p, d)| build_line_family(&a, 2, &rat(p, d)).unwrap())
            .collect();
        for u in 1..=2 {
            let rep = check_line_lemmas(&a, 2, u, &fams, &Caps::default()).map_err(|e| e.to_string())?;
            ensure(rep.ul_ok && rep.pnp_ok, || {
                format!("level {level} u={u}: ul {:?} pnp {:?}", rep.ul_failures, rep.pnp_failures)
            })?;
            ensure(recount_lemmas(&raw, &members, u)? == rep.pairs, || "pair count disagrees".into())?;
            pairs += rep.pairs;
        }
        families += fams.len();
    }
    Ok(format!(
        "selected level I={} has {} famil{}; all {} levels: {families} families, {pairs} pair checks over u=1,2, zero failures",
        lv.level,
        lv.n,
        if lv.n == 1 { "y" } else { "ies" },
        oracle_levels.count
    ))
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let a = GroundSet::interval(1, 16).unwrap();
    let mut params = PipelineParams::new(6, 2, rat(1, 10));
    params.delta = rat(1, 100);
    params.l_list = vec![2];
    let t = run_pipeline(&a, &params, &Caps::default()).map_err(|e| e.to_string())?;
    ensure(t.outcome == Outcome::Complete, || format!("outcome {:?}", t.outcome))?;
    let bad = t.unconditional_failures();
    ensure(bad.is_empty(), || format!("unconditional failures: {:?}", bad.iter().map(|r| &r.name).collect::<Vec<_>>()))?;
    let a_prime = t.a_prime_set().ok_or("no A′")?;
    ensure(!a_prime.is_empty(), || "A′ empty".into())?;
    let cert = t.certification.first().ok_or("no certification record")?;
    let want = moment_sumset(&elements(&a_prime), 2, 2).len();
    ensure(cert.l == 2 && cert.size == want, || format!("|2A′| = {} vs oracle {want}", cert.size))?;
    let first = t.to_json();
    let took = within(start, Duration::from_secs(120))?;
    let again = run_pipeline(&a, &params, &Caps::default()).map_err(|e| e.to_string())?.to_json();
    ensure(first == again, || "rerun trace differs".into())?;
    Ok(format!("|A′| = {}, |2A′| = {want}, {} records, {took:.2?}, rerun identical", a_prime.len(), t.stages.len()))
}

fn ints(v: &[i64]) -> VectorSet {
    VectorSet::new(1, v.iter().map(|&x| PowerSumKey::from_i64s(&[x]))).unwrap()
}

/// `|S| >= n^{1-ε/5}` and `|S+S| <= |S|^{1+ε/2}` for `ε = p/q`, cleared of roots.
fn certifies(n: usize, size: usize, doubling: usize, p: u32, q: u32) -> (bool, bool) {
    let size_ok = BigUint::from(size).pow(5 * q) >= BigUint::from(n).pow(5 * q - p);
    let doubling_ok = BigUint::from(doubling).pow(2 * q) <= BigUint::from(size).pow(2 * q + p);
    (size_ok, doubling_ok)
}

fn doubling(s: &[i64]) -> usize {
    s.iter().flat_map(|a| s.iter().map(move |b| a + b)).collect::<std::collections::BTreeSet<_>>().len()
}

fn criterion_7() -> Check {
    let eps = rat(7, 10);
    let z: Vec<i64> = (0..8).collect();
    let out = bsg_extract(&ints(&z), &ints(&z), &rat(344, 512), &eps, &Caps::default()).map_err(|e| e.to_string())?;
    let s2: Vec<i64> = out.s2.iter().map(|v| v.to_strings()[0].parse().unwrap()).collect();
    ensure(s2.iter().all(|x| z.contains(x)), || "S₂ not inside Z₁".into())?;
    let d = doubling(&s2);
    ensure(d == out.doubling, || format!("recorded |S₂+S₂| {} vs {d}", out.doubling))?;
    let (a_ok, b_ok) = certifies(z.len(), s2.len(), d, 7, 10);
    ensure(a_ok && b_ok && out.certified(), || format!("AP8: S₂ = {s2:?} does not certify"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(777);
    let mut instances = 0;
    let mut certifiable = 0;
    for _ in 0..60 {
        let n = rand::Rng::gen_range(&mut rng, 1..=10);
        let z1 = loop {
            let v = random_set(&mut rng, -12, 12, 10);
            if v.len() == n {
                break v;
            }
        };
        let z2 = loop {
            let v = random_set(&mut rng, -12, 12, 10);
            if v.len() == n {
                break v;
            }
        };
        let mut e = 0i64;
        for a in &z1 {
            for b in &z1 {
                for c in &z2 {
                    e += z2.iter().filter(|&&d| a + c == b + d).count() as i64;
                }
            }
        }
        let alpha = rat(e, (n * n * n) as i64);
        let out = bsg_extract(&ints(&z1), &ints(&z2), &alpha, &eps, &Caps::default()).map_err(|e| e.to_string())?;
        let mut best = 0u8;
        for mask in 1u32..(1 << n) {
            let s: Vec<i64> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| z1[i]).collect();
            let (x, y) = certifies(n, s.len(), doubling(&s), 7, 10);
            best = best.max(x as u8 + y as u8);
        }
        ensure(out.score.level >= best, || {
            format!("Z₁={z1:?} Z₂={z2:?}: returned level {} < exhaustive {best}", out.score.level)
        })?;
        instances += 1;
        if best == 2 {
            certifiable += 1;
        }
    }
    Ok(format!("AP8 S₂ of size {} certifies; {instances} random instances ({certifiable} certifiable) never beaten", s2.len()))
}

fn criterion_8() -> Check {
    let eps = rat(1, 10);
    let caps = Caps::default();
    let interval = GroundSet::interval(1, 16).unwrap();
    let gp_raw: Vec<i64> = (0..16).map(|i| 1i64 << i).collect();
    let gp = GroundSet::new(gp_raw.iter().map(|&x| BigInt::from(x)).collect()).unwrap();
    let mut out = Vec::new();
    for (label, a) in [("interval", &interval), ("geometric", &gp)] {
        let rep = vmvtsp_report(a, 3, 2, &eps, None, &caps).map_err(|e| e.to_string())?;
        ensure(rep.exact_chain_ok() && rep.lemmas.all_ok(), || format!("{label}: exact chain fails"))?;
        ensure(rep.level.pigeonhole && rep.level.dyadic_cap, || format!("{label}: level selection fails"))?;
        let mi = rep.main_inequality;
        ensure(mi.log10_lhs.is_finite() && mi.log10_rhs.is_finite() && rep.c_meas > 0.0, || {
            format!("{label}: main inequality not emitted")
        })?;
        let v = serde_json::to_value(&rep).unwrap();
        ensure(v.get("main_inequality").is_some() && v.get("c_meas").is_some(), || format!("{label}: report missing fields"))?;
        out.push(format!("{label}: log10 {:.3} vs {:.3}, c_meas {:.4}", mi.log10_lhs, mi.log10_rhs, rep.c_meas));
        if label == "geometric" {
            let want = 2 * gp_raw.len() - 1;
            ensure(quotient_counts(&gp_raw).len() == want, || "oracle |A/A| for GP".into())?;
            ensure(rep.quotient_size == want, || format!("GP |A/A| = {}", rep.quotient_size))?;
            out.push(format!("GP |A/A| = {want}"));
        }
    }
    Ok(out.join("; "))
}

fn criterion_9() -> Check {
    let bin = env!("CARGO_BIN_EXE_vinolab");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |args: &[&str]| -> Result<i32, String> {
        let out = Command::new(bin)
            .args(args)
            .env_remove("VINOLAB_CAP")
            .current_dir(dir.path())
            .output()
            .map_err(|e| e.to_string())?;
        out.status.code().ok_or_else(|| "killed by signal".to_string())
    };
    let verify = run(&["verify", "--suite", "core", "--seed", "42"])?;
    ensure(verify == 0, || format!("verify exited {verify}"))?;
    std::fs::write(dir.path().join("bad.json"), "{\"elements\": [1, 2").unwrap();
    let bad = run(&["count", "j", "--set", "bad.json", "--s", "2", "--k", "1"])?;
    ensure(bad == 2, || format!("malformed set file exited {bad}"))?;
    let gen = run(&["gen", "--family", "ap", "--start", "1", "--step", "1", "--n", "16", "-o", "set.json"])?;
    ensure(gen == 0, || format!("gen exited {gen}"))?;
    let capped = run(&["count", "j", "--set", "set.json", "--s", "6", "--k", "2", "--cap", "1e3"])?;
    ensure(capped == 3, || format!("cap exceeded exited {capped}"))?;
    Ok("verify 0, malformed 2, cap 3".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", criterion_1),
        ("pinned values", criterion_2),
        ("exact inequality suite", criterion_3),
        ("exponent trend", criterion_4),
        ("line lemmas", criterion_5),
        ("extraction pipeline", criterion_6),
        ("BSG subroutine", criterion_7),
        ("sum-product dashboard", criterion_8),
        ("CLI contract", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

use std::path::Path;
use std::process::{Command, Output};

use vinolab::{emit_report, render_report, run_suite, ExperimentConfig, Format, Report, Status};
use vinolab_core::exactset::{generate, FamilySpec};
use vinolab_core::GroundSet;

fn vinolab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vinolab"))
        .args(args)
        .env_remove("VINOLAB_CAP")
        .current_dir(dir)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn gen_ap(dir: &Path, n: &str, name: &str) {
    let out = vinolab(dir, &["gen", "--family", "ap", "--start", "1", "--step", "1", "--n", n, "-o", name]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn gen_round_trips_through_the_set_parser() {
    let dir = tempfile::tempdir().unwrap();
    gen_ap(dir.path(), "16", "ap.json");
    let parsed = GroundSet::from_json(&std::fs::read_to_string(dir.path().join("ap.json")).unwrap()).unwrap();
    assert_eq!(parsed, GroundSet::interval(1, 16).unwrap());

    let out = vinolab(dir.path(), &["gen", "--family", "random", "--lo", "-50", "--hi", "50", "--n", "9", "--seed", "4"]);
    assert_eq!(code(&out), 0);
    let parsed = GroundSet::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let want = generate(&FamilySpec::RandomSubset { lo: -50, hi: 50, n: 9, seed: 4 }).unwrap();
    assert_eq!(parsed, want);

    let out = vinolab(dir.path(), &["gen", "--family", "explicit", "--elements", "5,-3,5"]);
    assert_eq!(code(&out), 2, "duplicates are rejected");
}

#[test]
fn count_reports_exact_values() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.json"), r#"{"elements": ["1", "2", "3"]}"#).unwrap();
    let out = vinolab(dir.path(), &["count", "j", "--set", "s.json", "--s", "3", "--k", "2"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["stats"]["J"], "93");
    let out = vinolab(dir.path(), &["count", "j", "--set", "s.json", "--s", "3", "--k", "2", "--naive"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["J"], "93");
    let out = vinolab(dir.path(), &["sumset", "moment", "--set", "s.json", "--k", "2", "--l", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["size"], 6);
}

#[test]
fn sweep_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = vinolab(dir.path(), &["count", "sweep", "--from", "8", "--to", "32", "--s", "3", "--k", "2", "-o", "sweep.csv"]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,s,k,J,alpha_num,alpha_den,rep_sup"));
    assert_eq!(lines.count(), 25);
}

#[test]
fn extract_trace_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    gen_ap(dir.path(), "12", "a.json");
    let args = |t: &'static str| {
        vec!["extract", "--set", "a.json", "--s", "6", "--k", "2", "--eps", "1/10", "--delta", "1/100", "--l", "2,3", "--trace", t]
    };
    assert_eq!(code(&vinolab(dir.path(), &args("t1.json"))), 0);
    assert_eq!(code(&vinolab(dir.path(), &args("t2.json"))), 0);
    let t1 = std::fs::read(dir.path().join("t1.json")).unwrap();
    assert_eq!(t1, std::fs::read(dir.path().join("t2.json")).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&t1).unwrap();
    assert_eq!(v["outcome"]["status"], "complete");
    assert_eq!(v["certification"].as_array().unwrap().len(), 2);

    let out = vinolab(dir.path(), &["extract", "--set", "a.json", "--s", "6", "--k", "2", "--eps", "0.1"]);
    assert_eq!(code(&out), 2, "decimal rationals are rejected");
    let out = vinolab(dir.path(), &["extract", "--set", "a.json", "--s", "6", "--k", "2", "--cap", "1000"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn sumprod_report() {
    let dir = tempfile::tempdir().unwrap();
    gen_ap(dir.path(), "10", "a.json");
    let out = vinolab(dir.path(), &["sumprod", "--set", "a.json", "--s", "3", "--k", "2", "--eps", "1/10", "--m", "2", "--report", "r.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("r.json")).unwrap()).unwrap();
    assert!(v["report"]["main_inequality"]["log10_lhs"].is_number());
    assert_eq!(v["diameter"]["holds"], true);
    let out = vinolab(dir.path(), &["sumprod", "--set", "a.json", "--s", "6", "--k", "2", "--theorem", "main"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn usage_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    gen_ap(dir.path(), "16", "a.json");
    assert_eq!(code(&vinolab(dir.path(), &["count", "j", "--set", "a.json"])), 2);
    assert_eq!(code(&vinolab(dir.path(), &["verify", "--suite", "nope"])), 2);
    assert_eq!(code(&vinolab(dir.path(), &["count", "j", "--set", "missing.json", "--s", "2", "--k", "1"])), 2);
    assert_eq!(code(&vinolab(dir.path(), &["count", "j", "--set", "a.json", "--s", "2", "--k", "1", "--cap", "abc"])), 2);
    let out = Command::new(env!("CARGO_BIN_EXE_vinolab"))
        .args(["count", "j", "--set", "a.json", "--s", "6", "--k", "2"])
        .env("VINOLAB_CAP", "1e3")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn suites_are_deterministic() {
    let cfg = ExperimentConfig { seed: 9, ..Default::default() };
    let a = run_suite("oracle", &cfg).unwrap();
    let b = run_suite("oracle", &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.exit_status, 0);
    let dir = tempfile::tempdir().unwrap();
    let (p, q) = (dir.path().join("a.json"), dir.path().join("b.json"));
    emit_report(&Report::Suite(&a), Format::Json, &p).unwrap();
    emit_report(&Report::Suite(&b), Format::Json, &q).unwrap();
    assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&q).unwrap());
    let csv = render_report(&Report::Suite(&a), Format::Csv).unwrap();
    assert!(csv.starts_with("name,status,details\n"));
}

#[test]
fn extraction_suite_records_conditionals() {
    let r = run_suite("extraction", &ExperimentConfig::default()).unwrap();
    assert_eq!(r.exit_status, 0);
    assert!(r.count(Status::Pass) > 0);
    assert!(r.count(Status::Recorded) > 0);
    assert_eq!(r.count(Status::Fail), 0);
}

#[test]
fn core_suite_passes_on_defaults() {
    let r = run_suite("core", &ExperimentConfig::default()).unwrap();
    assert_eq!(r.exit_status, 0, "{:?}", r.failures().collect::<Vec<_>>());
    let capped = ExperimentConfig { cap: Some(10), ..Default::default() };
    assert_eq!(run_suite("core", &capped).unwrap_err().exit_code(), 3);
}

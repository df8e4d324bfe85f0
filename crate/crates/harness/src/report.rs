use std::fs;
use std::path::Path;

use serde::Serialize;
use vinolab_core::caps::Caps;
use vinolab_core::check::{CheckRecord, Quantity};
use vinolab_core::counting::{alpha_of, vinogradov_count};
use vinolab_core::extraction::ExtractionTrace;
use vinolab_core::GroundSet;

use crate::suite::SuiteResult;
use crate::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(HarnessError::Config(format!("unknown format {other:?}"))),
        }
    }
}

/// One row of a J-sweep. Big values are decimal strings; alpha columns are
/// empty when `2s < k(k+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub s: usize,
    pub k: usize,
    #[serde(rename = "J")]
    pub j: String,
    pub alpha_num: String,
    pub alpha_den: String,
    pub rep_sup: String,
}

/// `J_{s,k}({1..N})` for each `N`.
pub fn j_sweep(ns: impl IntoIterator<Item = usize>, s: usize, k: usize, caps: &Caps) -> Result<Vec<SweepRow>, HarnessError> {
    ns.into_iter()
        .map(|n| {
            let a = GroundSet::interval(1, n as i64)?;
            let st = vinogradov_count(&a, s, k, caps)?;
            let (alpha_num, alpha_den) = match alpha_of(&st.j, n, s, k) {
                Some(r) => (r.numer().to_string(), r.denom().to_string()),
                None => (String::new(), String::new()),
            };
            Ok(SweepRow {
                n,
                s,
                k,
                j: st.j.to_string(),
                alpha_num,
                alpha_den,
                rep_sup: st.rep_sup.to_string(),
            })
        })
        .collect()
}

pub enum Report<'a> {
    Suite(&'a SuiteResult),
    Trace(&'a ExtractionTrace),
    Sweep(&'a [SweepRow]),
    /// Anything else serializable; JSON only.
    Value(serde_json::Value),
}

#[derive(Serialize)]
struct RecordRow<'a> {
    stage: &'a str,
    name: &'a str,
    kind: String,
    lhs: String,
    relation: String,
    rhs: String,
    flag: String,
}

fn plain<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v).expect("serializes") {
        serde_json::Value::String(s) => s,
        other => other.to_string(),
    }
}

fn quantity(q: &Option<Quantity>) -> String {
    match q {
        None => String::new(),
        Some(Quantity::Exact(s)) => s.clone(),
        Some(Quantity::Power { log10 }) => format!("10^{log10}"),
    }
}

fn record_row(r: &CheckRecord) -> RecordRow<'_> {
    RecordRow {
        stage: r.stage,
        name: &r.name,
        kind: plain(&r.kind),
        lhs: quantity(&r.lhs),
        relation: plain(&r.relation),
        rhs: quantity(&r.rhs),
        flag: plain(&r.flag),
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_sorted_json<T: Serialize>(v: &T) -> String {
    let value = serde_json::to_value(v).expect("report serializes");
    let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
    out.push('\n');
    out
}

fn csv_of<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| HarnessError::Config(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn render_report(report: &Report<'_>, format: Format) -> Result<String, HarnessError> {
    match (report, format) {
        (Report::Suite(r), Format::Json) => Ok(to_sorted_json(r)),
        (Report::Trace(t), Format::Json) => Ok(to_sorted_json(t)),
        (Report::Sweep(rows), Format::Json) => Ok(to_sorted_json(rows)),
        (Report::Value(v), Format::Json) => Ok(to_sorted_json(v)),
        (Report::Suite(r), Format::Csv) => csv_of(r.checks.iter()),
        (Report::Trace(t), Format::Csv) => csv_of(t.stages.iter().map(record_row)),
        (Report::Sweep(rows), Format::Csv) => {
            if rows.is_empty() {
                return Ok("N,s,k,J,alpha_num,alpha_den,rep_sup\n".into());
            }
            csv_of(rows.iter())
        }
        (Report::Value(_), Format::Csv) => Err(HarnessError::Config("this report has no csv form".into())),
    }
}

pub fn emit_report(report: &Report<'_>, format: Format, path: &Path) -> Result<(), HarnessError> {
    let text = render_report(report, format)?;
    fs::write(path, text).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}

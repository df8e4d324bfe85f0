//! Extraction of a subset `A′ ⊆ A` with small iterated moment sumsets from a
//! set with many Vinogradov solutions.
//!
//! [`run_pipeline`] chains the stages and returns an [`ExtractionTrace`] with
//! every inequality it met on the way. Identities that must always hold are
//! tagged [`Kind::Unconditional`]; bounds that need `N` large are tagged
//! [`Kind::Conditional`] and only recorded.

mod bsg;
mod stages;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

pub use bsg::{
    bsg_extract, hypothesis_slope, prebsg_split, score, BsgConstants, BsgOutcome, BsgScore, PreBsg, EXHAUSTIVE_MAX,
    PIVOTS,
};
pub use stages::{
    popular_sums, reduce_odd_s, select_pivot, Finalized, FoldCertificate, NeighborhoodIndex, Pivot, PopularStage,
    PopularSums, Pruned, Reduced, Regime,
};

use crate::caps::Caps;
use crate::check::{rational_string, sig12, CheckRecord, Kind, Relation};
use crate::counting::{pow_u, VinogradovStats};
use crate::error::{Error, Result};
use crate::exactset::GroundSet;
use crate::power::{rat, rat_int, PowerExpr};
use crate::sumsets::{restricted_sumset, TupleGraph};
use stages::{assemble, certify, prune_y, tuple_witness, HalfSums};

/// Parameters of one extraction run.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineParams {
    pub s: usize,
    pub k: usize,
    pub epsilon: BigRational,
    pub delta: BigRational,
    pub l_list: Vec<usize>,
    /// Replaces the computed `α` in every threshold.
    pub alpha_override: Option<BigRational>,
}

/// `min(ε/100, 1/100)`.
pub fn default_delta(eps: &BigRational) -> BigRational {
    let a = eps / rat_int(100);
    let b = rat(1, 100);
    if a < b {
        a
    } else {
        b
    }
}

impl PipelineParams {
    pub fn new(s: usize, k: usize, epsilon: BigRational) -> Self {
        let delta = default_delta(&epsilon);
        PipelineParams {
            s,
            k,
            epsilon,
            delta,
            l_list: vec![2],
            alpha_override: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.s < self.k * (self.k + 1) {
            return Err(Error::InvalidParams(format!(
                "need s >= k(k+1), got s={} k={}",
                self.s, self.k
            )));
        }
        if !self.epsilon.is_positive() || self.epsilon > BigRational::one() {
            return Err(Error::InvalidParams(format!(
                "epsilon {} outside (0, 1]",
                rational_string(&self.epsilon)
            )));
        }
        if !self.delta.is_positive() || self.delta > self.epsilon {
            return Err(Error::InvalidParams(format!(
                "delta {} outside (0, epsilon]",
                rational_string(&self.delta)
            )));
        }
        if self.l_list.contains(&0) {
            return Err(Error::InvalidParams("fold counts must be >= 1".into()));
        }
        if let Some(a) = &self.alpha_override {
            if !a.is_positive() || *a > BigRational::one() {
                return Err(Error::DegenerateAlpha(rational_string(a)));
            }
        }
        Ok(())
    }
}

/// How the run ended. A stopped run keeps the error for exit-code mapping.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Complete,
    Stopped { stage: &'static str, error: Error },
}

impl Outcome {
    pub fn is_complete(&self) -> bool {
        matches!(self, Outcome::Complete)
    }
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Outcome::Complete => {
                let mut m = serializer.serialize_map(Some(1))?;
                m.serialize_entry("status", "complete")?;
                m.end()
            }
            Outcome::Stopped { stage, error } => {
                let mut m = serializer.serialize_map(Some(3))?;
                m.serialize_entry("status", "stopped")?;
                m.serialize_entry("stage", stage)?;
                m.serialize_entry("reason", &error.to_string())?;
                m.end()
            }
        }
    }
}

/// `log α⁻¹ <= ε k(k+1)/43200 · log N`, and the least `ε` that would make it
/// hold on this instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub alpha: String,
    pub log10_alpha_inv: f64,
    pub log10_rhs: f64,
    pub holds: bool,
    pub eps_threshold: f64,
}

impl HypothesisReport {
    pub fn new(alpha: &BigRational, n: usize, eps: &BigRational, k: usize) -> Self {
        let inv = PowerExpr::rational(alpha.recip());
        let rhs = PowerExpr::int_pow(n, hypothesis_slope(eps, k));
        let holds = inv.compare(&rhs) != std::cmp::Ordering::Greater;
        let ln_inv = -crate::power::log10_rational(alpha) * std::f64::consts::LN_10;
        let eps_threshold = if n < 2 {
            if ln_inv > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            (43200.0 * ln_inv / ((k * (k + 1)) as f64 * (n as f64).ln())).max(0.0)
        };
        HypothesisReport {
            alpha: rational_string(alpha),
            log10_alpha_inv: sig12(inv.log10()),
            log10_rhs: sig12(rhs.log10()),
            holds,
            eps_threshold: sig12(eps_threshold),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceInput {
    pub set: Vec<String>,
    pub s: usize,
    pub k: usize,
    pub epsilon: String,
    pub delta: String,
    pub l_list: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_override: Option<String>,
}

/// The full record of one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtractionTrace {
    pub input: TraceInput,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<VinogradovStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<HypothesisReport>,
    pub stages: Vec<CheckRecord>,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_prime: Option<Vec<String>>,
    pub certification: Vec<FoldCertificate>,
}

impl ExtractionTrace {
    /// Pretty JSON with object keys sorted.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("trace serializes");
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    pub fn unconditional_failures(&self) -> Vec<&CheckRecord> {
        self.stages
            .iter()
            .filter(|r| r.kind == Kind::Unconditional && !r.holds())
            .collect()
    }

    pub fn records(&self, stage: &str) -> impl Iterator<Item = &CheckRecord> + '_ {
        let stage = stage.to_string();
        self.stages.iter().filter(move |r| r.stage == stage)
    }

    /// `A′` as a ground set, when the run got that far.
    pub fn a_prime_set(&self) -> Option<GroundSet> {
        let raw = self.a_prime.as_ref()?;
        GroundSet::new(raw.iter().map(|s| s.parse::<BigInt>().expect("decimal")).collect()).ok()
    }
}

/// Runs every stage on `a`. Only invalid parameters are returned as errors;
/// any later failure stops the run and is reported in the trace outcome.
pub fn run_pipeline(a: &GroundSet, params: &PipelineParams, caps: &Caps) -> Result<ExtractionTrace> {
    params.validate()?;
    let mut trace = ExtractionTrace {
        input: TraceInput {
            set: a.to_strings(),
            s: params.s,
            k: params.k,
            epsilon: rational_string(&params.epsilon),
            delta: rational_string(&params.delta),
            l_list: params.l_list.clone(),
            alpha_override: params.alpha_override.as_ref().map(rational_string),
        },
        counts: None,
        hypothesis: None,
        stages: Vec::new(),
        outcome: Outcome::Complete,
        a_prime: None,
        certification: Vec::new(),
    };
    let mut stage = "G-build";
    if let Err(error) = drive(a, params, caps, &mut trace, &mut stage) {
        trace.outcome = Outcome::Stopped { stage, error };
    }
    Ok(trace)
}

fn drive(
    a: &GroundSet,
    params: &PipelineParams,
    caps: &Caps,
    trace: &mut ExtractionTrace,
    stage: &mut &'static str,
) -> Result<()> {
    let (s, k) = (params.s, params.k);
    let n = a.len();
    let log = &mut trace.stages;
    let tri = k * (k + 1) / 2;

    *stage = "G-build";
    let popular = popular_sums(a, s, k, params.alpha_override.as_ref(), caps, log)?;
    let alpha = popular.popular.alpha.clone();
    trace.counts = Some(popular.stats.clone());
    let hyp = HypothesisReport::new(&alpha, n, &params.epsilon, k);
    let regime = Regime {
        n,
        k,
        alpha: alpha.clone(),
        eps: params.epsilon.clone(),
        delta: params.delta.clone(),
    };
    log.push(
        CheckRecord::compare(
            "G-build",
            "α^{-1} <= N^{εk(k+1)/43200}",
            Kind::Conditional,
            &PowerExpr::rational(alpha.recip()),
            Relation::Le,
            &PowerExpr::int_pow(n, hypothesis_slope(&params.epsilon, k)),
        )
        .with("eps_threshold", hyp.eps_threshold),
    );
    trace.hypothesis = Some(hyp);
    log.push(CheckRecord::compare(
        "G-build",
        "α <= 1",
        Kind::Conditional,
        &PowerExpr::rational(alpha.clone()),
        Relation::Le,
        &PowerExpr::int(1),
    ));
    let delta = &params.delta;
    let s_r = rat_int(BigInt::from(s));
    log.push(CheckRecord::compare(
        "G-build",
        "|G| >= (α/2) N^{s-δ}",
        Kind::Conditional,
        &PowerExpr::int(popular.graph.len()),
        Relation::Ge,
        &regime.alpha_pow(BigRational::one()).scale(rat(1, 2)).times(regime.n_pow(&s_r - delta)),
    ));
    log.push(CheckRecord::compare(
        "G-build",
        "max_n r(𝒜^s; n) <= N^{s-k(k+1)/2+δ}",
        Kind::Conditional,
        &PowerExpr::biguint(&popular.stats.rep_sup),
        Relation::Le,
        &regime.n_pow(&s_r - rat_int(BigInt::from(tri)) + delta),
    ));

    let mut g = popular.graph;
    if s % 2 == 1 {
        *stage = "reduce-odd";
        let red = reduce_odd_s(&g, log)?;
        log.push(CheckRecord::compare(
            "reduce-odd",
            "|G_a| >= (α/2) N^{s-1-δ}",
            Kind::Conditional,
            &PowerExpr::int(red.graph.len()),
            Relation::Ge,
            &regime
                .alpha_pow(BigRational::one())
                .scale(rat(1, 2))
                .times(regime.n_pow(&s_r - BigRational::one() - delta)),
        ));
        g = red.graph;
    }
    let even = g.arity();
    let h = even / 2;
    let points: Arc<Vec<_>> = g.points().clone();

    *stage = "pivot-x";
    let pivot = select_pivot(&g, log)?;
    *stage = "G₁";
    let sigma_g1 = restricted_sumset(&pivot.g1)?;
    log.push(
        CheckRecord::compare(
            "G₁",
            "|G₁| >= (α^2/4) N^{s-2δ}",
            Kind::Conditional,
            &PowerExpr::int(pivot.g1.len()),
            Relation::Ge,
            &regime
                .alpha_pow(rat_int(2))
                .scale(rat(1, 4))
                .times(regime.n_pow(rat_int(BigInt::from(even)) - delta * rat_int(2))),
        )
        .with("|Σ(G₁)|", sigma_g1.len()),
    );

    *stage = "Y";
    let half = HalfSums::new(&points, h);
    let pruned = prune_y(&pivot, &half, &sigma_g1, &regime, &points, log);
    let pruned = match pruned {
        Ok(p) => p,
        Err(Error::EmptyStage(st)) => {
            *stage = st;
            return Err(Error::EmptyStage(st));
        }
        Err(e) => return Err(e),
    };

    *stage = "prebsg";
    let y2_is_u = pruned.sigma_y2.len() >= pruned.sigma_rx.len();
    let (u, v) = if y2_is_u {
        (&pruned.sigma_y2, &pruned.sigma_rx)
    } else {
        (&pruned.sigma_rx, &pruned.sigma_y2)
    };
    let pre = prebsg_split(u, v, &sigma_g1)?;
    log.extend(pre.records.iter().cloned().map(|r| r.with("U", if y2_is_u { "Σ(Y₂)" } else { "Σ(R(x))" })));

    *stage = "Z₁Z₂";
    let z = pre.z1.len();
    log.push(CheckRecord::ints(
        "Z₁Z₂",
        "|Z₁| = |Z₂|",
        Kind::Unconditional,
        z,
        Relation::Eq,
        pre.z2.len(),
    ));
    log.push(CheckRecord::ints(
        "Z₁Z₂",
        "|Z₁| <= |Σ(G₁)|",
        Kind::Unconditional,
        z,
        Relation::Le,
        sigma_g1.len(),
    ));
    let eps = &params.epsilon;
    log.push(CheckRecord::compare(
        "Z₁Z₂",
        "|Z₁| >= |Σ(G₁)|^{1-ε/1200}",
        Kind::Conditional,
        &PowerExpr::int(z),
        Relation::Ge,
        &PowerExpr::int_pow(sigma_g1.len(), BigRational::one() - eps / rat_int(1200)),
    ));
    log.push(
        CheckRecord::compare(
            "Z₁Z₂",
            "E(Z₁,Z₂) >= |Z₁|^3 / (4|Σ(G₁)|^{ε/200})",
            Kind::Conditional,
            &PowerExpr::biguint(&pre.energy),
            Relation::Ge,
            &PowerExpr::int(pow_u(z, 3))
                .scale(rat(1, 4))
                .times(PowerExpr::int_pow(sigma_g1.len(), -(eps / rat_int(200)))),
        )
        .with("E", &pre.energy),
    );

    *stage = "bsg";
    // The first argument is the side inside Σ(Y₂), so S₂ ⊆ Σ(Y₂).
    let (first, second) = if y2_is_u { (&pre.z2, &pre.z1) } else { (&pre.z1, &pre.z2) };
    let alpha_bsg = BigRational::new(BigInt::from(pre.energy.clone()), BigInt::from(pow_u(z, 3)));
    let outcome = bsg_extract(first, second, &alpha_bsg, eps, caps)?;
    log.extend(outcome.records.iter().cloned());

    *stage = "S₂";
    let s2 = outcome.s2.clone();
    log.push(
        CheckRecord::predicate(
            "S₂",
            "S₂ ⊆ Σ(Y₂)",
            Kind::Unconditional,
            Relation::Subset,
            s2.is_subset(&pruned.sigma_y2),
        )
        .with("|S₂|", s2.len())
        .with("|S₂+S₂|", outcome.doubling)
        .with("source", &outcome.source),
    );
    if s2.is_empty() {
        return Err(Error::EmptyStage("S₂"));
    }

    *stage = "Y₃";
    let fin = assemble(&pruned.y1, &pruned.sigma_y1, &s2, &half, &regime, h, &points, log);
    let fin = match fin {
        Ok(f) => f,
        Err(Error::EmptyStage(st)) => {
            *stage = st;
            return Err(Error::EmptyStage(st));
        }
        Err(e) => return Err(e),
    };
    let elements = a.elements();
    trace.a_prime = Some(fin.a_prime.iter().map(|&i| elements[i].to_string()).collect());

    *stage = "certify";
    let w_tuple = NeighborhoodIndex::decode_half(n, h - 1, fin.w);
    let w_sum = stages::sum_of(&points, &w_tuple, k);
    for &l in &params.l_list {
        let cert = certify(&fin.a_prime, &w_sum, &s2, outcome.doubling, &regime, l, &points, caps, log)?;
        trace.certification.push(cert);
    }
    log.push(
        CheckRecord::witness("certify", "A′")
            .with("A′", tuple_witness(&points, &fin.a_prime))
            .with("|A′|", fin.a_prime.len()),
    );
    Ok(())
}

/// A tuple graph over the moment curve of `a` with the given tuples.
pub fn graph_from_tuples(a: &GroundSet, k: usize, arity: usize, tuples: &[Vec<usize>], caps: &Caps) -> Result<TupleGraph> {
    let emb = crate::exactset::moment_embed(a, k)?;
    TupleGraph::from_tuples(Arc::new(emb.coords()), arity, tuples.iter().cloned(), caps)
}

//! Inequality records shared by the extraction trace and the sum-product
//! reports. Each record carries both sides, the relation, whether the
//! inequality is an unconditional identity or a bound that needs large `N`,
//! and whether it held on the instance.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::Serialize;

use crate::power::PowerExpr;

/// Rounds to 12 significant digits so serialized floats are byte-stable.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.11e}", x).parse().unwrap_or(x)
}

pub fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Quantity {
    Exact(String),
    Power { log10: f64 },
}

impl Quantity {
    pub fn of(e: &PowerExpr) -> Quantity {
        match e.as_exact() {
            Some(v) if v.numer().bits() < 256 && v.denom().bits() < 256 => Quantity::Exact(rational_string(&v)),
            _ => Quantity::Power { log10: sig12(e.log10()) },
        }
    }
}

impl From<&BigUint> for Quantity {
    fn from(v: &BigUint) -> Self {
        Quantity::Exact(v.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "subset")]
    Subset,
    #[serde(rename = "disjoint")]
    Disjoint,
    #[serde(rename = "none")]
    Witness,
}

impl Relation {
    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            Relation::Le => ord != Ordering::Greater,
            Relation::Lt => ord == Ordering::Less,
            Relation::Ge => ord != Ordering::Less,
            Relation::Gt => ord == Ordering::Greater,
            Relation::Eq => ord == Ordering::Equal,
            Relation::Subset | Relation::Disjoint | Relation::Witness => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Holds on every instance; a failure is an implementation bug.
    Unconditional,
    /// Needs "N sufficiently large" or an analytic input; recorded only.
    Conditional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    Holds,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub stage: &'static str,
    pub name: String,
    pub kind: Kind,
    pub lhs: Option<Quantity>,
    pub relation: Relation,
    pub rhs: Option<Quantity>,
    pub flag: Flag,
    pub witness: BTreeMap<String, String>,
}

impl CheckRecord {
    pub fn compare(
        stage: &'static str,
        name: impl Into<String>,
        kind: Kind,
        lhs: &PowerExpr,
        relation: Relation,
        rhs: &PowerExpr,
    ) -> Self {
        let ok = relation.holds(lhs.compare(rhs));
        CheckRecord {
            stage,
            name: name.into(),
            kind,
            lhs: Some(Quantity::of(lhs)),
            relation,
            rhs: Some(Quantity::of(rhs)),
            flag: if ok { Flag::Holds } else { Flag::Fails },
            witness: BTreeMap::new(),
        }
    }

    pub fn ints(
        stage: &'static str,
        name: impl Into<String>,
        kind: Kind,
        lhs: impl Into<BigInt>,
        relation: Relation,
        rhs: impl Into<BigInt>,
    ) -> Self {
        Self::compare(stage, name, kind, &PowerExpr::int(lhs), relation, &PowerExpr::int(rhs))
    }

    /// A set-relation check (containment, disjointness) decided by the caller.
    pub fn predicate(stage: &'static str, name: impl Into<String>, kind: Kind, relation: Relation, ok: bool) -> Self {
        CheckRecord {
            stage,
            name: name.into(),
            kind,
            lhs: None,
            relation,
            rhs: None,
            flag: if ok { Flag::Holds } else { Flag::Fails },
            witness: BTreeMap::new(),
        }
    }

    /// A record that only carries witnesses.
    pub fn witness(stage: &'static str, name: impl Into<String>) -> Self {
        Self::predicate(stage, name, Kind::Unconditional, Relation::Witness, true)
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.witness.insert(key.to_string(), value.to_string());
        self
    }

    pub fn holds(&self) -> bool {
        self.flag == Flag::Holds
    }
}

//! Exact integer vectors used as keys of every counting table.
//!
//! Components are stored inline as `i128` while they fit and promoted to
//! `BigInt` on overflow. The representation is canonical (a vector that fits
//! is always stored small), so the derived `Eq`/`Hash` agree with numeric
//! equality.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use smallvec::SmallVec;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PowerSumKey(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(SmallVec<[i128; 4]>),
    Big(Vec<BigInt>),
}

impl PowerSumKey {
    pub fn zero(dim: usize) -> Self {
        PowerSumKey(Repr::Small(SmallVec::from_elem(0, dim)))
    }

    pub fn from_i128s(components: &[i128]) -> Self {
        PowerSumKey(Repr::Small(SmallVec::from_slice(components)))
    }

    pub fn from_bigints(components: Vec<BigInt>) -> Self {
        let small: Option<SmallVec<[i128; 4]>> = components.iter().map(|c| c.to_i128()).collect();
        match small {
            Some(v) => PowerSumKey(Repr::Small(v)),
            None => PowerSumKey(Repr::Big(components)),
        }
    }

    pub fn from_i64s(components: &[i64]) -> Self {
        let v: SmallVec<[i128; 4]> = components.iter().map(|&c| c as i128).collect();
        PowerSumKey(Repr::Small(v))
    }

    pub fn dim(&self) -> usize {
        match &self.0 {
            Repr::Small(v) => v.len(),
            Repr::Big(v) => v.len(),
        }
    }

    pub fn component(&self, j: usize) -> BigInt {
        match &self.0 {
            Repr::Small(v) => BigInt::from(v[j]),
            Repr::Big(v) => v[j].clone(),
        }
    }

    pub fn components(&self) -> Vec<BigInt> {
        (0..self.dim()).map(|j| self.component(j)).collect()
    }

    /// The leading `len` components.
    pub fn prefix(&self, len: usize) -> PowerSumKey {
        match &self.0 {
            Repr::Small(v) => PowerSumKey(Repr::Small(SmallVec::from_slice(&v[..len]))),
            Repr::Big(v) => PowerSumKey::from_bigints(v[..len].to_vec()),
        }
    }

    /// Components from `start` on.
    pub fn suffix(&self, start: usize) -> PowerSumKey {
        match &self.0 {
            Repr::Small(v) => PowerSumKey(Repr::Small(SmallVec::from_slice(&v[start..]))),
            Repr::Big(v) => PowerSumKey::from_bigints(v[start..].to_vec()),
        }
    }

    /// Concatenation `(self, other)`.
    pub fn concat(&self, other: &PowerSumKey) -> PowerSumKey {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => {
                let mut v = a.clone();
                v.extend_from_slice(b);
                PowerSumKey(Repr::Small(v))
            }
            _ => {
                let mut v = self.components();
                v.extend(other.components());
                PowerSumKey::from_bigints(v)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small(v) => v.iter().all(|&c| c == 0),
            Repr::Big(v) => v.iter().all(|c| c.is_zero()),
        }
    }

    pub fn neg(&self) -> PowerSumKey {
        match &self.0 {
            Repr::Small(v) => {
                let out: Option<SmallVec<[i128; 4]>> = v.iter().map(|c| c.checked_neg()).collect();
                match out {
                    Some(out) => PowerSumKey(Repr::Small(out)),
                    None => PowerSumKey::from_bigints(self.components().into_iter().map(|c| -c).collect()),
                }
            }
            Repr::Big(v) => PowerSumKey::from_bigints(v.iter().map(|c| -c).collect()),
        }
    }

    /// Component-wise sum. Panics on a dimension mismatch; public entry points
    /// validate dimensions before reaching here.
    pub fn add(&self, other: &PowerSumKey) -> PowerSumKey {
        assert_eq!(self.dim(), other.dim(), "key dimension mismatch");
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            let out: Option<SmallVec<[i128; 4]>> =
                a.iter().zip(b.iter()).map(|(x, y)| x.checked_add(*y)).collect();
            if let Some(out) = out {
                return PowerSumKey(Repr::Small(out));
            }
        }
        let out = self
            .components()
            .into_iter()
            .zip(other.components())
            .map(|(x, y)| x + y)
            .collect();
        PowerSumKey::from_bigints(out)
    }

    pub fn sub(&self, other: &PowerSumKey) -> PowerSumKey {
        self.add(&other.neg())
    }

    /// Canonical byte encoding: `dim` as u32 BE, then per component a u32 BE
    /// length followed by the big-endian two's-complement bytes.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + self.dim() * 8);
        out.extend_from_slice(&(self.dim() as u32).to_be_bytes());
        for c in self.components() {
            let bytes = c.to_signed_bytes_be();
            out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
            out.extend_from_slice(&bytes);
        }
        out
    }

    pub fn to_strings(&self) -> Vec<String> {
        match &self.0 {
            Repr::Small(v) => v.iter().map(|c| c.to_string()).collect(),
            Repr::Big(v) => v.iter().map(|c| c.to_string()).collect(),
        }
    }
}

impl Ord for PowerSumKey {
    /// Dimension first, then numeric lexicographic order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim().cmp(&other.dim()).then_with(|| match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.as_slice().cmp(b.as_slice()),
            _ => self.components().cmp(&other.components()),
        })
    }
}

impl PartialOrd for PowerSumKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PowerSumKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(","))
    }
}

impl fmt::Debug for PowerSumKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for PowerSumKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(serializer)
    }
}

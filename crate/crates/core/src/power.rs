//! Exact comparison of positive power products `c · Π bᵢ^{eᵢ}` with rational
//! coefficient, bases and exponents.
//!
//! Comparisons are decided on base-10 logarithms when the two sides differ by
//! more than a guard band of 1e-9; inside the band both sides are raised to
//! the common denominator of all exponents and compared as exact rationals.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const GUARD_BAND: f64 = 1e-9;

/// Upper limit on the bit size of an exact escalation. Beyond it the float
/// decision stands.
const MAX_ESCALATION_BITS: f64 = 5.0e7;

#[derive(Clone, Debug, PartialEq)]
pub struct PowerExpr {
    coef: BigRational,
    factors: Vec<(BigRational, BigRational)>,
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

pub fn log10_bigint(n: &BigInt) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits < 1000 {
        n.abs().to_f64().unwrap().log10()
    } else {
        let shift = bits - 64;
        let top: BigInt = n.abs() >> shift;
        top.to_f64().unwrap().log10() + shift as f64 * std::f64::consts::LOG10_2
    }
}

pub fn log10_rational(r: &BigRational) -> f64 {
    log10_bigint(r.numer()) - log10_bigint(r.denom())
}

pub fn log10_biguint(n: &BigUint) -> f64 {
    log10_bigint(&BigInt::from(n.clone()))
}

impl PowerExpr {
    pub fn rational(coef: BigRational) -> Self {
        assert!(!coef.is_negative(), "power expressions are non-negative");
        PowerExpr { coef, factors: Vec::new() }
    }

    pub fn int(v: impl Into<BigInt>) -> Self {
        Self::rational(rat_int(v))
    }

    pub fn biguint(v: &BigUint) -> Self {
        Self::int(BigInt::from(v.clone()))
    }

    /// `base^exp` with `base > 0`.
    pub fn pow(base: BigRational, exp: BigRational) -> Self {
        assert!(base.is_positive(), "power base must be positive");
        let mut e = PowerExpr::rational(BigRational::one());
        e.factors.push((base, exp));
        e
    }

    pub fn int_pow(base: impl Into<BigInt>, exp: BigRational) -> Self {
        Self::pow(rat_int(base), exp)
    }

    pub fn times(mut self, other: PowerExpr) -> Self {
        self.coef *= other.coef;
        self.factors.extend(other.factors);
        self
    }

    pub fn scale(mut self, r: BigRational) -> Self {
        assert!(!r.is_negative());
        self.coef *= r;
        self
    }

    /// Exact rational value when there are no fractional powers.
    pub fn as_exact(&self) -> Option<BigRational> {
        let mut v = self.coef.clone();
        for (b, e) in &self.factors {
            if !e.is_integer() {
                return None;
            }
            let n = e.to_integer().to_i32()?;
            v *= num_traits::Pow::pow(b.clone(), n);
        }
        Some(v)
    }

    pub fn is_zero(&self) -> bool {
        self.coef.is_zero()
    }

    pub fn log10(&self) -> f64 {
        if self.coef.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.factors.iter().fold(log10_rational(&self.coef), |acc, (b, e)| {
            acc + log10_rational(b) * e.to_f64().unwrap_or(f64::NAN)
        })
    }

    fn denominators_lcm(&self, acc: BigInt) -> BigInt {
        self.factors.iter().fold(acc, |acc, (_, e)| acc.lcm(e.denom()))
    }

    /// `self^q` for a `q` that clears every exponent denominator.
    fn raised(&self, q: &BigInt) -> Option<BigRational> {
        let qi = q.to_i32()?;
        let mut v = num_traits::Pow::pow(self.coef.clone(), qi);
        for (b, e) in &self.factors {
            let n = (e * rat_int(q.clone())).to_integer().to_i32()?;
            v *= num_traits::Pow::pow(b.clone(), n);
        }
        Some(v)
    }

    fn escalation_bits(&self, q: f64) -> f64 {
        let coef_bits = (self.coef.numer().bits() + self.coef.denom().bits()) as f64;
        self.factors.iter().fold(coef_bits * q, |acc, (b, e)| {
            let bits = (b.numer().bits() + b.denom().bits()) as f64;
            acc + bits * (e.to_f64().unwrap_or(0.0).abs() * q + 1.0)
        })
    }

    /// Exact total order on the represented non-negative reals.
    pub fn compare(&self, other: &PowerExpr) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        if let (Some(a), Some(b)) = (self.as_exact(), other.as_exact()) {
            return a.cmp(&b);
        }
        let (la, lb) = (self.log10(), other.log10());
        let band = GUARD_BAND * la.abs().max(lb.abs()).max(1.0);
        if (la - lb).abs() > band {
            return la.partial_cmp(&lb).unwrap_or(Ordering::Equal);
        }
        let q = other.denominators_lcm(self.denominators_lcm(BigInt::one()));
        let qf = q.to_f64().unwrap_or(f64::INFINITY);
        if self.escalation_bits(qf) + other.escalation_bits(qf) > MAX_ESCALATION_BITS {
            return la.partial_cmp(&lb).unwrap_or(Ordering::Equal);
        }
        match (self.raised(&q), other.raised(&q)) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => la.partial_cmp(&lb).unwrap_or(Ordering::Equal),
        }
    }

    /// Smallest integer `c` with `c >= self`.
    pub fn ceil_int(&self) -> BigInt {
        if let Some(v) = self.as_exact() {
            return v.ceil().to_integer();
        }
        let approx = 10f64.powf(self.log10());
        let mut c = if approx.is_finite() && approx < 1e30 {
            BigInt::from(approx.floor() as i128)
        } else {
            // Coarse start from the log; corrected exactly below.
            let digits = self.log10().floor() as u32;
            num_traits::pow(BigInt::from(10), digits.saturating_sub(1) as usize)
        };
        while c > BigInt::zero() && PowerExpr::int(c.clone() - 1).compare(self) != Ordering::Less {
            c -= 1;
        }
        while PowerExpr::int(c.clone()).compare(self) == Ordering::Less {
            c += 1;
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_equality_inside_guard_band() {
        // 8^(1/3) == 2 exactly.
        let lhs = PowerExpr::int_pow(8, rat(1, 3));
        assert_eq!(lhs.compare(&PowerExpr::int(2)), Ordering::Equal);
        // 2^(1/2) * 2^(1/2) == 2.
        let prod = PowerExpr::int_pow(2, rat(1, 2)).times(PowerExpr::int_pow(2, rat(1, 2)));
        assert_eq!(prod.compare(&PowerExpr::int(2)), Ordering::Equal);
    }

    #[test]
    fn strict_comparisons() {
        assert_eq!(PowerExpr::int_pow(10, rat(1, 2)).compare(&PowerExpr::int(3)), Ordering::Greater);
        assert_eq!(PowerExpr::int(15).compare(&PowerExpr::int_pow(8, rat(131, 100))), Ordering::Less);
        assert_eq!(PowerExpr::int(0).compare(&PowerExpr::int_pow(8, rat(1, 2))), Ordering::Less);
    }

    #[test]
    fn ceiling_is_exact() {
        assert_eq!(PowerExpr::int_pow(8, rat(1, 3)).ceil_int(), BigInt::from(2));
        assert_eq!(PowerExpr::int_pow(10, rat(1, 2)).ceil_int(), BigInt::from(4));
        let t = PowerExpr::int_pow(16, rat(74, 25)).scale(rat(1, 4));
        let c = t.ceil_int();
        assert_ne!(PowerExpr::int(c.clone()).compare(&t), Ordering::Less);
        assert_eq!(PowerExpr::int(c - 1).compare(&t), Ordering::Less);
    }

    #[test]
    fn big_logs() {
        let n = num_traits::pow(BigInt::from(10), 400);
        assert!((log10_bigint(&n) - 400.0).abs() < 1e-9);
    }
}

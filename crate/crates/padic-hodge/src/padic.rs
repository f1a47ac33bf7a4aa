//! Precision-tracked scalars over Q_p.
//!
//! A nonzero scalar is stored as p^val * unit with the unit known modulo
//! p^rel (its relative precision); the absolute precision is val + rel.
//! Zero is a distinguished state carrying only a precision floor O(p^prec).
//! All arithmetic propagates precision pessimistically: valuations are
//! exact, relative precision is the minimum justified by the inputs.

use crate::error::{Error, Result};

/// Largest exponent r with p^r < 2^62, so products of residues fit in u128.
pub fn max_rel_precision(p: u64) -> u32 {
    let mut r = 0u32;
    let mut acc: u128 = 1;
    while acc * (p as u128) < (1u128 << 62) {
        acc *= p as u128;
        r += 1;
    }
    r
}

/// p^k as u64; caller must keep k within `max_rel_precision(p)`.
pub fn pow_u64(p: u64, k: u32) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(p).expect("p-power overflow");
    }
    acc
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Inverse of a mod m = p^k for a coprime to p, by Euler/Newton lifting.
pub fn inv_mod(a: u64, p: u64, k: u32) -> u64 {
    let m = pow_u64(p, k);
    // inverse mod p by Fermat
    let mut inv = {
        let mut e = p - 2;
        let mut base = a % p;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc
    };
    // Hensel-lift x -> x(2 - a x) doubles correct digits
    let mut prec = 1u32;
    while prec < k {
        let two = 2 % m;
        let ax = mul_mod(a % m, inv, m);
        let t = (two + m - ax % m) % m;
        inv = mul_mod(inv, t, m);
        prec *= 2;
    }
    inv % m
}

fn vp_u64(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// A p-adic scalar with tracked precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PadicScalar {
    /// Known to vanish modulo p^prec, nothing beyond.
    Zero { p: u64, prec: i64 },
    /// p^val * unit with unit a unit mod p^rel.
    NonZero { p: u64, val: i64, unit: u64, rel: u32 },
}

impl PadicScalar {
    pub fn zero(p: u64, prec: i64) -> Self {
        PadicScalar::Zero { p, prec }
    }

    pub fn one(p: u64, rel: u32) -> Self {
        PadicScalar::NonZero { p, val: 0, unit: 1, rel }
    }

    /// Build from an integer, exact up to absolute precision abs.
    pub fn from_i64(p: u64, n: i64, abs: i64) -> Self {
        if n == 0 {
            return PadicScalar::Zero { p, prec: abs };
        }
        let neg = n < 0;
        let mut mag = n.unsigned_abs();
        let mut val = 0i64;
        while mag % p == 0 {
            mag /= p;
            val += 1;
        }
        if val >= abs {
            return PadicScalar::Zero { p, prec: abs };
        }
        let rel = (abs - val) as u32;
        let rel = rel.min(max_rel_precision(p));
        let m = pow_u64(p, rel);
        let mut u = mag % m;
        if neg {
            u = (m - u) % m;
        }
        PadicScalar::NonZero { p, val, unit: u % m, rel }
    }

    /// n / p^k at the given absolute precision.
    pub fn from_ratio(p: u64, n: i64, denom_exp: u32, abs: i64) -> Self {
        match Self::from_i64(p, n, abs + denom_exp as i64) {
            PadicScalar::Zero { p, prec } => PadicScalar::Zero { p, prec: prec - denom_exp as i64 },
            PadicScalar::NonZero { p, val, unit, rel } => {
                PadicScalar::NonZero { p, val: val - denom_exp as i64, unit, rel }
            }
        }
    }

    pub fn prime(&self) -> u64 {
        match *self {
            PadicScalar::Zero { p, .. } | PadicScalar::NonZero { p, .. } => p,
        }
    }

    /// Exact valuation, None when indistinguishable from zero.
    pub fn valuation(&self) -> Option<i64> {
        match *self {
            PadicScalar::Zero { .. } => None,
            PadicScalar::NonZero { val, .. } => Some(val),
        }
    }

    /// Absolute precision exponent of the known part.
    pub fn abs_precision(&self) -> i64 {
        match *self {
            PadicScalar::Zero { prec, .. } => prec,
            PadicScalar::NonZero { val, rel, .. } => val + rel as i64,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PadicScalar::Zero { .. })
    }

    /// True when self - other vanishes at the joint precision.
    pub fn eq_at_precision(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// Residue mod p^k (k <= abs precision), as an integer in [0, p^k).
    pub fn residue(&self, k: u32) -> Result<u64> {
        let p = self.prime();
        let m = pow_u64(p, k);
        match *self {
            PadicScalar::Zero { prec, .. } => {
                if (k as i64) <= prec {
                    Ok(0)
                } else {
                    Err(Error::PrecisionExhausted(format!(
                        "residue mod p^{k} requested, only O(p^{prec}) known"
                    )))
                }
            }
            PadicScalar::NonZero { val, unit, rel, .. } => {
                if val < 0 {
                    return Err(Error::PrecisionExhausted("negative valuation residue".into()));
                }
                if (k as i64) > val + rel as i64 {
                    return Err(Error::PrecisionExhausted(format!(
                        "residue mod p^{k} requested, abs precision {}",
                        val + rel as i64
                    )));
                }
                let shift = pow_u64(p, val as u32);
                Ok(mul_mod(unit % m, shift % m, m))
            }
        }
    }

    fn normalize(p: u64, val: i64, raw: u64, abs: i64) -> Self {
        if raw == 0 {
            return PadicScalar::Zero { p, prec: abs };
        }
        let t = vp_u64(raw, p);
        let new_val = val + t as i64;
        if new_val >= abs {
            return PadicScalar::Zero { p, prec: abs };
        }
        let rel = (abs - new_val) as u32;
        let m = pow_u64(p, rel.min(max_rel_precision(p)));
        PadicScalar::NonZero {
            p,
            val: new_val,
            unit: (raw / pow_u64(p, t)) % m,
            rel: rel.min(max_rel_precision(p)),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.prime();
        debug_assert_eq!(p, other.prime());
        match (self, other) {
            (PadicScalar::Zero { prec: a, .. }, PadicScalar::Zero { prec: b, .. }) => {
                PadicScalar::Zero { p, prec: (*a).min(*b) }
            }
            (PadicScalar::Zero { prec, .. }, x) | (x, PadicScalar::Zero { prec, .. }) => {
                let abs = (*prec).min(x.abs_precision());
                match *x {
                    PadicScalar::NonZero { val, unit, .. } => {
                        if val >= abs {
                            PadicScalar::Zero { p, prec: abs }
                        } else {
                            let rel = ((abs - val) as u32).min(max_rel_precision(p));
                            let m = pow_u64(p, rel);
                            PadicScalar::NonZero { p, val, unit: unit % m, rel }
                        }
                    }
                    _ => unreachable!(),
                }
            }
            (
                PadicScalar::NonZero { val: v1, unit: u1, .. },
                PadicScalar::NonZero { val: v2, unit: u2, .. },
            ) => {
                let abs = self.abs_precision().min(other.abs_precision());
                let v = (*v1).min(*v2);
                if v >= abs {
                    return PadicScalar::Zero { p, prec: abs };
                }
                let rel = ((abs - v) as u32).min(max_rel_precision(p));
                let m = pow_u64(p, rel);
                let s1 = if (*v1 - v) as u32 >= rel { 0 } else { mul_mod(*u1 % m, pow_u64(p, (*v1 - v) as u32) % m, m) };
                let s2 = if (*v2 - v) as u32 >= rel { 0 } else { mul_mod(*u2 % m, pow_u64(p, (*v2 - v) as u32) % m, m) };
                Self::normalize(p, v, (s1 + s2) % m, abs)
            }
        }
    }

    pub fn neg(&self) -> Self {
        match *self {
            PadicScalar::Zero { .. } => self.clone(),
            PadicScalar::NonZero { p, val, unit, rel } => {
                let m = pow_u64(p, rel);
                PadicScalar::NonZero { p, val, unit: (m - unit % m) % m, rel }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.prime();
        match (self, other) {
            (PadicScalar::Zero { prec: a, .. }, PadicScalar::Zero { prec: b, .. }) => {
                PadicScalar::Zero { p, prec: a + b }
            }
            (PadicScalar::Zero { prec, .. }, PadicScalar::NonZero { val, .. })
            | (PadicScalar::NonZero { val, .. }, PadicScalar::Zero { prec, .. }) => {
                PadicScalar::Zero { p, prec: prec + val }
            }
            (
                PadicScalar::NonZero { val: v1, unit: u1, rel: r1, .. },
                PadicScalar::NonZero { val: v2, unit: u2, rel: r2, .. },
            ) => {
                let rel = (*r1).min(*r2);
                let m = pow_u64(p, rel);
                PadicScalar::NonZero { p, val: v1 + v2, unit: mul_mod(*u1 % m, *u2 % m, m), rel }
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        let p = self.prime();
        match other {
            PadicScalar::Zero { prec, .. } => Err(Error::PrecisionExhausted(format!(
                "division by a scalar indistinguishable from zero (O(p^{prec}))"
            ))),
            PadicScalar::NonZero { val: v2, unit: u2, rel: r2, .. } => match self {
                PadicScalar::Zero { prec, .. } => Ok(PadicScalar::Zero { p, prec: prec - v2 }),
                PadicScalar::NonZero { val: v1, unit: u1, rel: r1, .. } => {
                    let rel = (*r1).min(*r2);
                    let m = pow_u64(p, rel);
                    let inv = inv_mod(*u2 % m, p, rel);
                    Ok(PadicScalar::NonZero {
                        p,
                        val: v1 - v2,
                        unit: mul_mod(*u1 % m, inv, m),
                        rel,
                    })
                }
            },
        }
    }

    /// Multiply by p^k (exact shift of valuation / precision floor).
    pub fn shift(&self, k: i64) -> Self {
        match *self {
            PadicScalar::Zero { p, prec } => PadicScalar::Zero { p, prec: prec + k },
            PadicScalar::NonZero { p, val, unit, rel } => {
                PadicScalar::NonZero { p, val: val + k, unit, rel }
            }
        }
    }

    /// Truncate the absolute precision down to `abs`.
    pub fn truncate(&self, abs: i64) -> Self {
        let p = self.prime();
        match *self {
            PadicScalar::Zero { prec, .. } => PadicScalar::Zero { p, prec: prec.min(abs) },
            PadicScalar::NonZero { val, unit, rel, .. } => {
                if val >= abs {
                    PadicScalar::Zero { p, prec: abs }
                } else {
                    let nrel = (rel as i64).min(abs - val) as u32;
                    let m = pow_u64(p, nrel);
                    PadicScalar::NonZero { p, val, unit: unit % m, rel: nrel }
                }
            }
        }
    }
}

impl std::fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            PadicScalar::Zero { p, prec } => write!(f, "O({p}^{prec})"),
            PadicScalar::NonZero { p, val, unit, rel } => {
                write!(f, "{p}^{val}*{unit} + O({p}^{})", val + rel as i64)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{Signed, Zero as _};
    use proptest::prelude::*;

    fn vp_rat(r: &BigRational, p: u64) -> Option<i64> {
        if r.is_zero() {
            return None;
        }
        let p = BigInt::from(p);
        let mut v = 0i64;
        let mut n = r.numer().abs();
        while (&n % &p).is_zero() {
            n /= &p;
            v += 1;
        }
        let mut d = r.denom().abs();
        while (&d % &p).is_zero() {
            d /= &p;
            v -= 1;
        }
        Some(v)
    }

    #[test]
    fn integer_add_identity() {
        // (p=5, a=1, b=1, add) -> 2 with unchanged precision
        let a = PadicScalar::from_i64(5, 1, 10);
        let b = PadicScalar::from_i64(5, 1, 10);
        let c = a.add(&b);
        assert_eq!(c.residue(10).unwrap(), 2);
        assert_eq!(c.abs_precision(), 10);
    }

    #[test]
    fn p_over_p_is_one() {
        let a = PadicScalar::from_i64(5, 5, 10);
        let c = a.div(&a).unwrap();
        assert_eq!(c.valuation(), Some(0));
        assert_eq!(c.residue(5).unwrap(), 1);
    }

    #[test]
    fn division_by_zero_rejected() {
        let a = PadicScalar::from_i64(3, 4, 8);
        let z = PadicScalar::zero(3, 8);
        assert!(matches!(a.div(&z), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn cancellation_reports_floor() {
        let a = PadicScalar::from_i64(3, 7, 6);
        let d = a.sub(&a);
        assert!(d.is_zero());
        assert_eq!(d.abs_precision(), 6);
    }

    proptest! {
        // oracle: exact rational arithmetic on lifts
        #[test]
        fn mul_valuation_matches_exact(a in -2000i64..2000, b in -2000i64..2000) {
            let p = 3u64;
            let x = PadicScalar::from_i64(p, a, 18);
            let y = PadicScalar::from_i64(p, b, 18);
            let prod = x.mul(&y);
            let exact = BigRational::from(BigInt::from(a)) * BigRational::from(BigInt::from(b));
            match vp_rat(&exact, p) {
                None => prop_assert!(prod.is_zero()),
                Some(v) => {
                    if v < prod.abs_precision() {
                        prop_assert_eq!(prod.valuation(), Some(v));
                    }
                }
            }
        }

        #[test]
        fn ring_axioms_sampled(a in -500i64..500, b in -500i64..500, c in -500i64..500) {
            let p = 5u64;
            let abs = 12;
            let x = PadicScalar::from_i64(p, a, abs);
            let y = PadicScalar::from_i64(p, b, abs);
            let z = PadicScalar::from_i64(p, c, abs);
            // associativity + commutativity + distributivity at joint precision
            prop_assert!(x.add(&y).add(&z).eq_at_precision(&x.add(&y.add(&z))));
            prop_assert!(x.mul(&y).eq_at_precision(&y.mul(&x)));
            prop_assert!(x.mul(&y.add(&z)).eq_at_precision(&x.mul(&y).add(&x.mul(&z))));
        }
    }
}

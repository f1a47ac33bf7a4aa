//! Monogenic tower quotient rings approximating rings of integers.
//!
//! A tower ring is (Z/p^M)[x, y] / (Phi_{p^m}(1+x), y^{p^m} - p), with either
//! generator optional. The cyclotomic generator x is zeta_{p^m} - 1; the
//! Kummer generator y is p^{1/p^m}. Coefficients live in Z/p^M, so with
//! M = 1 the same code gives the reduction mod p, where the relations
//! degenerate to x^E = 0 and y^K = 0 and the ring is a truncated polynomial
//! ring carrying the restriction of the valuation of C_p.

use crate::error::{Error, Result};
use crate::padic::{inv_mod, mul_mod, pow_u64};
use num_rational::Ratio;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TowerKind {
    Cyclotomic,
    Kummer,
    Compositum,
}

/// Shared context for one tower quotient ring.
#[derive(Debug)]
pub struct TowerCtx {
    pub p: u64,
    pub m_exp: u32,
    pub level: u32,
    pub kind: TowerKind,
    pub e_cyc: usize,
    pub e_kum: usize,
    pub modulus: u64,
    /// x^{e_cyc} = sum_i cyc_red[i] x^i, absent when e_cyc == 1.
    cyc_red: Vec<u64>,
}

/// Dense product of polynomials with coefficients mod m.
fn poly_mul(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if bj == 0 {
                continue;
            }
            let k = i + j;
            out[k] = (out[k] + mul_mod(ai, bj, m)) % m;
        }
    }
    out
}

impl TowerCtx {
    pub fn new(p: u64, m_exp: u32, level: u32, kind: TowerKind) -> Arc<TowerCtx> {
        assert!(p >= 3 && p % 2 == 1, "odd primes only");
        let modulus = pow_u64(p, m_exp);
        let (has_cyc, has_kum) = match kind {
            TowerKind::Cyclotomic => (true, false),
            TowerKind::Kummer => (false, true),
            TowerKind::Compositum => (true, true),
        };
        let e_cyc = if has_cyc && level >= 1 {
            (pow_u64(p, level - 1) * (p - 1)) as usize
        } else {
            1
        };
        let e_kum = if has_kum { pow_u64(p, level) as usize } else { 1 };

        // Phi_{p^m}(1+x) = sum_{i<p} ((1+x)^{p^{m-1}})^i, monic of degree e_cyc.
        let cyc_red = if e_cyc > 1 {
            let m = modulus;
            let base = {
                // (1+x)^{p^{level-1}}
                let mut acc = vec![1u64];
                let one_plus_x = vec![1u64, 1u64];
                for _ in 0..pow_u64(p, level - 1) {
                    acc = poly_mul(&acc, &one_plus_x, m);
                }
                acc
            };
            let mut phi = vec![0u64; 1];
            phi[0] = 1;
            let mut powb = vec![1u64];
            let mut sum = vec![1u64]; // i = 0 term
            for _ in 1..p {
                powb = poly_mul(&powb, &base, m);
                if sum.len() < powb.len() {
                    sum.resize(powb.len(), 0);
                }
                for (k, &c) in powb.iter().enumerate() {
                    sum[k] = (sum[k] + c) % m;
                }
            }
            debug_assert_eq!(sum.len() - 1, e_cyc);
            debug_assert_eq!(sum[e_cyc] % m, 1 % m);
            // x^E = -(lower part)
            sum[..e_cyc].iter().map(|&c| (m - c % m) % m).collect()
        } else {
            Vec::new()
        };

        Arc::new(TowerCtx { p, m_exp, level, kind, e_cyc, e_kum, modulus, cyc_red })
    }

    pub fn rank(&self) -> usize {
        self.e_cyc * self.e_kum
    }

    pub fn zero(self: &Arc<Self>) -> TowerElem {
        TowerElem { ctx: self.clone(), c: vec![0; self.rank()] }
    }

    pub fn from_u64(self: &Arc<Self>, n: u64) -> TowerElem {
        let mut e = self.zero();
        e.c[0] = n % self.modulus;
        e
    }

    pub fn from_i64(self: &Arc<Self>, n: i64) -> TowerElem {
        let m = self.modulus;
        let r = n.rem_euclid(m as i64) as u64;
        self.from_u64(r)
    }

    /// Monomial x^i y^j.
    pub fn monomial(self: &Arc<Self>, i: usize, j: usize, coeff: u64) -> TowerElem {
        let mut e = self.zero();
        if i < self.e_cyc && j < self.e_kum {
            e.c[i + self.e_cyc * j] = coeff % self.modulus;
        } else {
            // reduce through multiplication
            let mut acc = self.from_u64(coeff);
            let x = {
                let mut t = self.zero();
                if self.e_cyc > 1 {
                    t.c[1] = 1;
                }
                t
            };
            let y = {
                let mut t = self.zero();
                if self.e_kum > 1 {
                    t.c[self.e_cyc] = 1;
                }
                t
            };
            for _ in 0..i {
                acc = acc.mul(&x);
            }
            for _ in 0..j {
                acc = acc.mul(&y);
            }
            return acc;
        }
        e
    }

    /// zeta_{p^n} as an element of this ring (requires the cyclotomic
    /// generator and n <= level).
    pub fn zeta(self: &Arc<Self>, n: u32) -> TowerElem {
        assert!(self.e_cyc > 1 || n == 0, "no cyclotomic generator");
        if n == 0 {
            return self.from_u64(1);
        }
        // zeta_{p^n} = (1+x)^{p^{level-n}}
        let mut acc = self.monomial(1, 0, 1);
        acc.c[0] = (acc.c[0] + 1) % self.modulus;
        acc.pow(pow_u64(self.p, self.level - n) as u128)
    }

    /// p^{1/p^n} as an element of this ring (Kummer generator, n <= level).
    pub fn proot(self: &Arc<Self>, n: u32) -> TowerElem {
        assert!(self.e_kum > 1, "no Kummer generator");
        self.monomial(0, 1, 1).pow(pow_u64(self.p, self.level - n) as u128)
    }
}

/// Element of a tower ring: coefficient vector indexed by x^i y^j.
#[derive(Debug, Clone)]
pub struct TowerElem {
    pub ctx: Arc<TowerCtx>,
    pub c: Vec<u64>,
}

impl TowerElem {
    fn same_ring(&self, other: &TowerElem) -> Result<()> {
        if !Arc::ptr_eq(&self.ctx, &other.ctx)
            && (self.ctx.p != other.ctx.p
                || self.ctx.m_exp != other.ctx.m_exp
                || self.ctx.level != other.ctx.level
                || self.ctx.kind != other.ctx.kind)
        {
            return Err(Error::RingMismatch(format!(
                "tower rings differ: (p={}, M={}, m={}, {:?}) vs (p={}, M={}, m={}, {:?})",
                self.ctx.p,
                self.ctx.m_exp,
                self.ctx.level,
                self.ctx.kind,
                other.ctx.p,
                other.ctx.m_exp,
                other.ctx.level,
                other.ctx.kind
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &TowerElem) -> TowerElem {
        self.same_ring(other).expect("tower ring mismatch");
        let m = self.ctx.modulus;
        let c = self.c.iter().zip(&other.c).map(|(&a, &b)| (a + b) % m).collect();
        TowerElem { ctx: self.ctx.clone(), c }
    }

    pub fn neg(&self) -> TowerElem {
        let m = self.ctx.modulus;
        TowerElem { ctx: self.ctx.clone(), c: self.c.iter().map(|&a| (m - a % m) % m).collect() }
    }

    pub fn sub(&self, other: &TowerElem) -> TowerElem {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: u64) -> TowerElem {
        let m = self.ctx.modulus;
        TowerElem { ctx: self.ctx.clone(), c: self.c.iter().map(|&a| mul_mod(a, k % m, m)).collect() }
    }

    pub fn mul(&self, other: &TowerElem) -> TowerElem {
        self.same_ring(other).expect("tower ring mismatch");
        let ctx = &self.ctx;
        let (ec, ek) = (ctx.e_cyc, ctx.e_kum);
        let m = ctx.modulus;
        // convolution on the x/y grid
        let mut wide = vec![0u64; (2 * ec - 1) * (2 * ek - 1).max(1)];
        let wx = 2 * ec - 1;
        for j1 in 0..ek {
            for i1 in 0..ec {
                let a = self.c[i1 + ec * j1];
                if a == 0 {
                    continue;
                }
                for j2 in 0..ek {
                    for i2 in 0..ec {
                        let b = other.c[i2 + ec * j2];
                        if b == 0 {
                            continue;
                        }
                        let idx = (i1 + i2) + wx * (j1 + j2);
                        wide[idx] = (wide[idx] + mul_mod(a, b, m)) % m;
                    }
                }
            }
        }
        // reduce y: y^{ek + t} = p * y^t
        let wy = 2 * ek - 1;
        if ek > 1 {
            for j in (ek..wy).rev() {
                for i in 0..wx {
                    let v = wide[i + wx * j];
                    if v != 0 {
                        let tgt = i + wx * (j - ek);
                        wide[tgt] = (wide[tgt] + mul_mod(v, ctx.p % m, m)) % m;
                        wide[i + wx * j] = 0;
                    }
                }
            }
        }
        // reduce x: x^{ec} = cyc_red (or 0 when absent/trivial)
        if ec > 1 {
            for j in 0..ek {
                for i in (ec..wx).rev() {
                    let v = wide[i + wx * j];
                    if v == 0 {
                        continue;
                    }
                    wide[i + wx * j] = 0;
                    if !ctx.cyc_red.is_empty() {
                        for (t, &r) in ctx.cyc_red.iter().enumerate() {
                            if r != 0 {
                                let tgt = (i - ec + t) + wx * j;
                                wide[tgt] = (wide[tgt] + mul_mod(v, r, m)) % m;
                            }
                        }
                        // the rule may re-introduce degree >= ec terms when
                        // i - ec + t >= ec; the loop keeps sweeping downward,
                        // so re-visit those indices
                    }
                }
                // second sweep for any terms pushed back above ec
                let mut again = true;
                while again {
                    again = false;
                    for i in (ec..wx).rev() {
                        let v = wide[i + wx * j];
                        if v == 0 {
                            continue;
                        }
                        wide[i + wx * j] = 0;
                        for (t, &r) in ctx.cyc_red.iter().enumerate() {
                            if r != 0 {
                                let tgt = (i - ec + t) + wx * j;
                                wide[tgt] = (wide[tgt] + mul_mod(v, r, m)) % m;
                                if i - ec + t >= ec {
                                    again = true;
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut c = vec![0u64; ec * ek];
        for j in 0..ek {
            for i in 0..ec {
                c[i + ec * j] = wide[i + wx * j];
            }
        }
        TowerElem { ctx: self.ctx.clone(), c }
    }

    pub fn pow(&self, mut e: u128) -> TowerElem {
        let mut base = self.clone();
        let mut acc = self.ctx.from_u64(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&a| a == 0)
    }

    pub fn eq_elem(&self, other: &TowerElem) -> bool {
        self.same_ring(other).is_ok() && self.c == other.c
    }

    /// Change the coefficient modulus exponent (lift with zero digits or
    /// reduce). Lifting is a choice of representative, as in theta-bar.
    pub fn with_modulus(&self, m_exp: u32) -> TowerElem {
        let ctx = TowerCtx::new(self.ctx.p, m_exp, self.ctx.level, self.ctx.kind);
        let m = ctx.modulus;
        TowerElem { c: self.c.iter().map(|&a| a % m).collect(), ctx }
    }

    /// Valuation of the element in units where v(p) = 1, computed from the
    /// monomial grading: v(x^i y^j) = i/e_cyc + j/e_kum. Only meaningful in
    /// the mod-p ring (m_exp == 1), where the tower relations are monomial.
    /// Returns None for zero.
    pub fn valuation(&self) -> Option<Ratio<i64>> {
        assert_eq!(self.ctx.m_exp, 1, "valuation is computed on the mod-p ring");
        let (ec, ek) = (self.ctx.e_cyc, self.ctx.e_kum);
        let mut best: Option<Ratio<i64>> = None;
        for j in 0..ek {
            for i in 0..ec {
                if self.c[i + ec * j] != 0 {
                    let v = Ratio::new(i as i64, ec as i64) + Ratio::new(j as i64, ek as i64);
                    best = Some(match best {
                        None => v,
                        Some(b) => b.min(v),
                    });
                }
            }
        }
        best
    }

    /// Division by the monomial x^a y^b in the mod-p ring. Requires every
    /// nonzero term to be divisible; the quotient is reliable only below
    /// degrees (e_cyc - a, e_kum - b), which the caller must track.
    pub fn div_monomial(&self, a: usize, b: usize) -> Result<TowerElem> {
        assert_eq!(self.ctx.m_exp, 1);
        let (ec, ek) = (self.ctx.e_cyc, self.ctx.e_kum);
        let mut out = vec![0u64; ec * ek];
        for j in 0..ek {
            for i in 0..ec {
                let v = self.c[i + ec * j];
                if v == 0 {
                    continue;
                }
                if i < a || j < b {
                    return Err(Error::PrecisionExhausted(format!(
                        "monomial division: term x^{i}y^{j} not divisible by x^{a}y^{b}"
                    )));
                }
                out[(i - a) + ec * (j - b)] = v;
            }
        }
        Ok(TowerElem { ctx: self.ctx.clone(), c: out })
    }

    /// Zero out coefficients at or above the given degree bounds.
    pub fn truncate_degrees(&self, dx: usize, dy: usize) -> TowerElem {
        let (ec, ek) = (self.ctx.e_cyc, self.ctx.e_kum);
        let mut out = self.clone();
        for j in 0..ek {
            for i in 0..ec {
                if i >= dx || j >= dy {
                    out.c[i + ec * j] = 0;
                }
            }
        }
        out
    }

    /// Exact division by p (every coefficient divisible by p); drops the
    /// modulus exponent by one.
    pub fn div_p_exact(&self) -> Result<TowerElem> {
        let p = self.ctx.p;
        if self.ctx.m_exp < 2 {
            return Err(Error::PrecisionExhausted("div_p_exact needs modulus exponent >= 2".into()));
        }
        for &a in &self.c {
            if a % p != 0 {
                return Err(Error::PrecisionExhausted("element not divisible by p".into()));
            }
        }
        let ctx = TowerCtx::new(p, self.ctx.m_exp - 1, self.ctx.level, self.ctx.kind);
        let m = ctx.modulus;
        Ok(TowerElem { c: self.c.iter().map(|&a| (a / p) % m).collect(), ctx })
    }

    /// Multiplicative inverse when the constant term is a unit and the rest
    /// is topologically nilpotent (true for 1 + maximal-ideal elements).
    pub fn inv_unit(&self) -> Result<TowerElem> {
        let ctx = &self.ctx;
        let u0 = self.c[0] % ctx.p;
        if u0 == 0 {
            return Err(Error::NotAUnit("constant term divisible by p".into()));
        }
        // Newton: z -> z(2 - a z), starting from the inverse of the constant.
        let mut z = ctx.from_u64(inv_mod(self.c[0] % ctx.modulus, ctx.p, ctx.m_exp));
        // quadratic convergence in the (p, x, y)-adic filtration
        let steps = (usize::BITS - (ctx.rank().max(ctx.m_exp as usize)).leading_zeros()) + 2;
        for _ in 0..steps {
            let az = self.mul(&z);
            let two_minus = ctx.from_u64(2).sub(&az);
            z = z.mul(&two_minus);
        }
        let check = self.mul(&z);
        let mut ok = check.c[0] == 1 % ctx.modulus;
        for &c in &check.c[1..] {
            ok &= c == 0;
        }
        if ok {
            Ok(z)
        } else {
            Err(Error::NotAUnit("Newton inversion did not converge".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_defining_relation() {
        // p=3, level 1: zeta^3 = 1 where zeta = 1 + x
        let ctx = TowerCtx::new(3, 6, 1, TowerKind::Cyclotomic);
        let zeta = ctx.zeta(1);
        assert!(zeta.pow(3).eq_elem(&ctx.from_u64(1)));
        assert!(!zeta.eq_elem(&ctx.from_u64(1)));
    }

    #[test]
    fn kummer_defining_relation() {
        // p=3, level 1: y^3 = 3
        let ctx = TowerCtx::new(3, 6, 1, TowerKind::Kummer);
        let y = ctx.proot(0);
        assert!(y.eq_elem(&ctx.from_u64(3)));
        let y1 = ctx.proot(1);
        assert!(y1.pow(3).eq_elem(&ctx.from_u64(3)));
    }

    #[test]
    fn root_of_unity_sum_vanishes() {
        // 1 + zeta + zeta^2 = 0 for p=3 (exact cyclotomic identity)
        let ctx = TowerCtx::new(3, 8, 1, TowerKind::Cyclotomic);
        let z = ctx.zeta(1);
        let s = ctx.from_u64(1).add(&z).add(&z.pow(2));
        assert!(s.is_zero());
    }

    #[test]
    fn compositum_relations_commute() {
        let ctx = TowerCtx::new(3, 5, 2, TowerKind::Compositum);
        let z = ctx.zeta(2);
        let y = ctx.proot(2);
        assert!(z.pow(9).eq_elem(&ctx.from_u64(1)));
        assert!(y.pow(9).eq_elem(&ctx.from_u64(3)));
        let a = z.mul(&y);
        let b = y.mul(&z);
        assert!(a.eq_elem(&b));
    }

    #[test]
    fn mod_p_ring_is_truncated_and_graded() {
        let ctx = TowerCtx::new(3, 1, 2, TowerKind::Cyclotomic);
        // x^E = 0 mod p
        let x = ctx.monomial(1, 0, 1);
        assert!(x.pow(ctx.e_cyc as u128).is_zero());
        assert_eq!(x.valuation(), Some(Ratio::new(1, ctx.e_cyc as i64)));
        // zeta_{p} - 1 has valuation 1/(p-1)
        let z1 = ctx.zeta(1).sub(&ctx.from_u64(1));
        assert_eq!(z1.valuation(), Some(Ratio::new(1, 2)));
    }

    #[test]
    fn unit_inversion_round_trip() {
        let ctx = TowerCtx::new(5, 4, 1, TowerKind::Cyclotomic);
        let u = ctx.from_u64(2).add(&ctx.monomial(1, 0, 3));
        let inv = u.inv_unit().unwrap();
        assert!(u.mul(&inv).eq_elem(&ctx.from_u64(1)));
    }
}

//! Linear algebra over Z/p^K and precision-aware rank over Q_p.
//!
//! Smith normal form over Z/p^K picks minimum-valuation pivots, so the
//! elementary divisors come out as p-powers with nondecreasing exponents
//! (clipped at K). Numerical rank counts divisor exponents below a
//! threshold tau; everything at or above tau is treated as p-adically zero.

use crate::error::{Error, Result};
use crate::padic::{inv_mod, mul_mod, pow_u64, PadicScalar};

/// Dense matrix over Z/p^K.
#[derive(Debug, Clone)]
pub struct ZkMatrix {
    pub p: u64,
    pub k: u32,
    pub modulus: u64,
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<u64>,
}

impl ZkMatrix {
    pub fn zero(p: u64, k: u32, rows: usize, cols: usize) -> Self {
        ZkMatrix { p, k, modulus: pow_u64(p, k), rows, cols, a: vec![0; rows * cols] }
    }

    pub fn identity(p: u64, k: u32, n: usize) -> Self {
        let mut m = Self::zero(p, k, n, n);
        for i in 0..n {
            m.a[i * n + i] = 1;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.a[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.a[i * self.cols + j] = v % self.modulus;
    }

    pub fn mul(&self, other: &ZkMatrix) -> ZkMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = ZkMatrix::zero(self.p, self.k, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let v = self.get(i, l);
                if v == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let w = other.get(l, j);
                    if w != 0 {
                        let idx = i * other.cols + j;
                        out.a[idx] = (out.a[idx] + mul_mod(v, w, self.modulus)) % self.modulus;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, x.len());
        let mut out = vec![0u64; self.rows];
        for i in 0..self.rows {
            let mut acc = 0u64;
            for j in 0..self.cols {
                let v = self.get(i, j);
                if v != 0 && x[j] != 0 {
                    acc = (acc + mul_mod(v, x[j], self.modulus)) % self.modulus;
                }
            }
            out[i] = acc;
        }
        out
    }

    fn vp(&self, v: u64) -> u32 {
        if v == 0 {
            return self.k;
        }
        let mut n = v;
        let mut e = 0;
        while n % self.p == 0 {
            n /= self.p;
            e += 1;
        }
        e
    }
}

/// Result of Smith normal form over Z/p^K: U * A * V = diag(p^{e_i}).
#[derive(Debug, Clone)]
pub struct Snf {
    /// Divisor exponents, nondecreasing, clipped at K (K means zero mod p^K).
    pub divisors: Vec<u32>,
    pub u: ZkMatrix,
    pub v: ZkMatrix,
}

/// Smith normal form with invertible transforms over Z/p^K.
pub fn smith_normal_form(input: &ZkMatrix) -> Snf {
    let mut a = input.clone();
    let (rows, cols) = (a.rows, a.cols);
    let m = a.modulus;
    let p = a.p;
    let mut u = ZkMatrix::identity(p, a.k, rows);
    let mut v = ZkMatrix::identity(p, a.k, cols);
    let rmax = rows.min(cols);
    let mut divisors = Vec::with_capacity(rmax);

    for t in 0..rmax {
        // minimum-valuation pivot in the remaining block
        let mut best: Option<(usize, usize, u32)> = None;
        for i in t..rows {
            for j in t..cols {
                let val = a.get(i, j);
                if val != 0 {
                    let e = a.vp(val);
                    if best.map_or(true, |(_, _, be)| e < be) {
                        best = Some((i, j, e));
                    }
                }
            }
        }
        let Some((pi, pj, pe)) = best else {
            break;
        };
        // move pivot to (t, t)
        if pi != t {
            for j in 0..cols {
                a.a.swap(t * cols + j, pi * cols + j);
            }
            for j in 0..rows {
                u.a.swap(t * rows + j, pi * rows + j);
            }
        }
        if pj != t {
            for i in 0..rows {
                a.a.swap(i * cols + t, i * cols + pj);
            }
            for i in 0..cols {
                v.a.swap(i * cols + t, i * cols + pj);
            }
        }
        // normalize pivot to p^pe: scale row t by the inverse of its unit part
        let piv = a.get(t, t);
        let unit = piv / pow_u64(p, pe);
        let inv = inv_mod(unit % m, p, a.k);
        for j in 0..cols {
            let val = a.get(t, j);
            a.set(t, j, mul_mod(val, inv, m));
        }
        for j in 0..rows {
            let val = u.get(t, j);
            u.set(t, j, mul_mod(val, inv, m));
        }
        let pivot = pow_u64(p, pe) % m;
        debug_assert_eq!(a.get(t, t), pivot);
        // clear column t below and row t to the right; entries are divisible
        // by p^pe because the pivot had minimal valuation
        for i in (t + 1)..rows {
            let val = a.get(i, t);
            if val == 0 {
                continue;
            }
            let q = val / pow_u64(p, pe);
            for j in 0..cols {
                let sub = mul_mod(q, a.get(t, j), m);
                let cur = a.get(i, j);
                a.set(i, j, (cur + m - sub) % m);
            }
            for j in 0..rows {
                let sub = mul_mod(q, u.get(t, j), m);
                let cur = u.get(i, j);
                u.set(i, j, (cur + m - sub) % m);
            }
        }
        for j in (t + 1)..cols {
            let val = a.get(t, j);
            if val == 0 {
                continue;
            }
            let q = val / pow_u64(p, pe);
            for i in 0..rows {
                let sub = mul_mod(q, a.get(i, t), m);
                let cur = a.get(i, j);
                a.set(i, j, (cur + m - sub) % m);
            }
            for i in 0..cols {
                let sub = mul_mod(q, v.get(i, t), m);
                let cur = v.get(i, j);
                v.set(i, j, (cur + m - sub) % m);
            }
        }
        divisors.push(pe);
    }
    while divisors.len() < rmax {
        divisors.push(input.k);
    }
    Snf { divisors, u, v }
}

/// Count of elementary divisor exponents < tau (p-adically nonzero).
pub fn numerical_rank(a: &ZkMatrix, tau: u32) -> usize {
    assert!(tau <= a.k, "threshold exceeds working precision");
    smith_normal_form(a).divisors.iter().filter(|&&e| e < tau).count()
}

/// Basis of the numerical kernel at threshold tau: columns x with
/// v_p(A x) >= effective zero. rank + kernel dimension = cols.
pub fn kernel_basis(a: &ZkMatrix, tau: u32) -> Vec<Vec<u64>> {
    let snf = smith_normal_form(a);
    let mut basis = Vec::new();
    for t in 0..a.cols {
        let dead = t >= snf.divisors.len() || snf.divisors[t] >= tau;
        if dead {
            let mut col = Vec::with_capacity(a.cols);
            for i in 0..a.cols {
                col.push(snf.v.get(i, t));
            }
            basis.push(col);
        }
    }
    basis
}

/// Attempt to solve A x = b at threshold tau. Returns a witness solution or
/// the obstruction: the coordinates of b in the cokernel directions.
pub fn solve_at_threshold(a: &ZkMatrix, b: &[u64], tau: u32) -> std::result::Result<Vec<u64>, Vec<u64>> {
    let snf = smith_normal_form(a);
    let m = a.modulus;
    let p = a.p;
    let c = snf.u.mul_vec(b);
    let mut y = vec![0u64; a.cols];
    let mut obstruction = Vec::new();
    for (t, &ct) in c.iter().enumerate() {
        let e = if t < snf.divisors.len() { snf.divisors[t] } else { a.k };
        if e < tau {
            // y_t = c_t / p^e, rounding away the sub-threshold defect
            let pe = pow_u64(p, e);
            let q = ct / pe;
            if t < a.cols {
                y[t] = q % m;
            } else if a.vp(ct) < tau {
                obstruction.push(ct);
            }
        } else if a.vp(ct) < tau {
            obstruction.push(ct);
        }
    }
    if obstruction.is_empty() {
        Ok(snf.v.mul_vec(&y))
    } else {
        Err(obstruction)
    }
}

/// Rectangular grid of precision-tracked p-adic scalars.
#[derive(Debug, Clone)]
pub struct PadicMatrix {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<PadicScalar>,
}

impl PadicMatrix {
    pub fn new(p: u64, rows: usize, cols: usize) -> Self {
        PadicMatrix { p, rows, cols, entries: vec![PadicScalar::zero(p, i64::MAX / 4); rows * cols] }
    }

    pub fn set(&mut self, i: usize, j: usize, v: PadicScalar) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn get(&self, i: usize, j: usize) -> &PadicScalar {
        &self.entries[i * self.cols + j]
    }

    /// Common floor of absolute precisions.
    pub fn precision_floor(&self) -> i64 {
        self.entries.iter().map(|e| e.abs_precision()).min().unwrap_or(i64::MAX / 4)
    }

    /// Minimal valuation over the entries (0 for an all-zero matrix).
    pub fn min_valuation(&self) -> i64 {
        self.entries.iter().filter_map(|e| e.valuation()).min().unwrap_or(0)
    }

    /// Scale by p^s so entries are integral, and reduce mod p^work.
    pub fn to_integral(&self, work: u32) -> Result<(ZkMatrix, i64)> {
        let s = (-self.min_valuation()).max(0);
        let mut zk = ZkMatrix::zero(self.p, work, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j).shift(s);
                if e.abs_precision() < work as i64 {
                    return Err(Error::PrecisionExhausted(format!(
                        "matrix entry ({i},{j}) known only to O(p^{}) after scaling by p^{s}, need p^{work}",
                        e.abs_precision()
                    )));
                }
                zk.set(i, j, e.residue(work)?);
            }
        }
        Ok((zk, s))
    }

    /// Numerical rank over Q_p: divisor exponents of the p^s-scaled matrix
    /// below s + tau. Scale-invariant in the natural coefficient basis.
    pub fn rank_qp(&self, tau: u32, work: u32) -> Result<usize> {
        let (zk, s) = self.to_integral(work)?;
        let cut = (tau as i64 + s).clamp(0, work as i64) as u32;
        Ok(numerical_rank(&zk, cut))
    }

    /// Numerical kernel over Q_p at threshold tau.
    pub fn kernel_qp(&self, tau: u32, work: u32) -> Result<Vec<Vec<u64>>> {
        let (zk, s) = self.to_integral(work)?;
        let cut = (tau as i64 + s).clamp(0, work as i64) as u32;
        Ok(kernel_basis(&zk, cut))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{Signed, Zero};
    use rand::{Rng, SeedableRng};

    fn diag_matrix(p: u64, k: u32, d: &[u64]) -> ZkMatrix {
        let n = d.len();
        let mut m = ZkMatrix::zero(p, k, n, n);
        for i in 0..n {
            m.set(i, i, d[i]);
        }
        m
    }

    #[test]
    fn identity_has_zero_exponents() {
        let m = ZkMatrix::identity(5, 5, 3);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.divisors, vec![0, 0, 0]);
    }

    #[test]
    fn diagonal_prime_powers() {
        // diag(1, p, p^2) with M=5, p=5 -> exponents (0,1,2)
        let m = diag_matrix(5, 5, &[1, 5, 25]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.divisors, vec![0, 1, 2]);
    }

    #[test]
    fn zero_matrix_rank() {
        let m = ZkMatrix::zero(3, 6, 4, 4);
        assert_eq!(numerical_rank(&m, 3), 0);
        assert_eq!(kernel_basis(&m, 3).len(), 4);
    }

    /// Exact Smith normal form over Z (test oracle).
    fn exact_snf_diagonal(mat: &mut Vec<Vec<BigInt>>) -> Vec<BigInt> {
        let rows = mat.len();
        let cols = mat[0].len();
        let n = rows.min(cols);
        let mut out = Vec::new();
        for t in 0..n {
            loop {
                // find minimal nonzero |entry|
                let mut best: Option<(usize, usize)> = None;
                for i in t..rows {
                    for j in t..cols {
                        if !mat[i][j].is_zero()
                            && best.map_or(true, |(bi, bj)| {
                                mat[i][j].abs() < mat[bi][bj].abs()
                            })
                        {
                            best = Some((i, j));
                        }
                    }
                }
                let Some((bi, bj)) = best else {
                    return out;
                };
                mat.swap(t, bi);
                for row in mat.iter_mut() {
                    row.swap(t, bj);
                }
                let mut clean = true;
                for i in (t + 1)..rows {
                    if !mat[i][t].is_zero() {
                        let q = mat[i][t].div_floor(&mat[t][t]);
                        for j in t..cols {
                            let sub = &q * &mat[t][j];
                            mat[i][j] -= sub;
                        }
                        if !mat[i][t].is_zero() {
                            clean = false;
                        }
                    }
                }
                for j in (t + 1)..cols {
                    if !mat[t][j].is_zero() {
                        let q = mat[t][j].div_floor(&mat[t][t]);
                        for i in t..rows {
                            let sub = &q * &mat[i][t];
                            mat[i][j] -= sub;
                        }
                        if !mat[t][j].is_zero() {
                            clean = false;
                        }
                    }
                }
                if clean {
                    break;
                }
            }
            out.push(mat[t][t].abs());
        }
        out
    }

    #[test]
    fn random_matrix_matches_exact_integer_snf() {
        let p = 3u64;
        let k = 7u32;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..25 {
            let n = 4;
            let mut zk = ZkMatrix::zero(p, k, n, n);
            let mut exact = vec![vec![BigInt::zero(); n]; n];
            for i in 0..n {
                for j in 0..n {
                    let v: i64 = rng.gen_range(-40..40);
                    exact[i][j] = BigInt::from(v);
                    zk.set(i, j, v.rem_euclid(zk.modulus as i64) as u64);
                }
            }
            let got = smith_normal_form(&zk).divisors;
            let ex = exact_snf_diagonal(&mut exact);
            for (t, d) in ex.iter().enumerate() {
                // p-exponent of the exact divisor, clipped at k
                let mut e = 0u32;
                let mut d = d.clone();
                let bp = BigInt::from(p);
                while !d.is_zero() && (&d % &bp).is_zero() && e < k {
                    d /= &bp;
                    e += 1;
                }
                assert_eq!(got[t].min(k), e.min(k), "divisor {t} mismatch");
            }
        }
    }

    #[test]
    fn transforms_are_invertible() {
        let p = 3u64;
        let k = 6u32;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 5;
        let mut zk = ZkMatrix::zero(p, k, n, n);
        for i in 0..n {
            for j in 0..n {
                zk.set(i, j, rng.gen_range(0..zk.modulus));
            }
        }
        let snf = smith_normal_form(&zk);
        // U A V must equal the diagonal of the reported divisors
        let d = snf.u.mul(&zk).mul(&snf.v);
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { pow_u64(p, snf.divisors[i]) % d.modulus } else { 0 };
                assert_eq!(d.get(i, j), expect, "({i},{j})");
            }
        }
        // invertibility: SNF of U and V have all-zero divisors
        assert!(smith_normal_form(&snf.u).divisors.iter().all(|&e| e == 0));
        assert!(smith_normal_form(&snf.v).divisors.iter().all(|&e| e == 0));
    }

    #[test]
    fn rank_plus_kernel_is_cols() {
        let p = 5u64;
        let k = 6u32;
        let tau = 3u32;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let rows = rng.gen_range(2..6);
            let cols = rng.gen_range(2..6);
            let mut zk = ZkMatrix::zero(p, k, rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    zk.set(i, j, rng.gen_range(0..zk.modulus));
                }
            }
            let r = numerical_rank(&zk, tau);
            let kdim = kernel_basis(&zk, tau).len();
            assert_eq!(r + kdim, cols);
        }
    }
}

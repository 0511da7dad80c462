//! Dense matrices over Z/p^k. Entries are canonical residues; all maps in the
//! crate are carried by these.

use crate::error::{Error, Result};
use crate::ring::RingContext;
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct PMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
    ctx: RingContext,
}

impl fmt::Debug for PMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PMatrix {}x{} mod {}^{}", self.rows, self.cols, self.ctx.p(), self.ctx.work())?;
        for i in 0..self.rows {
            let row: Vec<i64> = (0..self.cols).map(|j| self.ctx.balanced(self.get(i, j))).collect();
            writeln!(f, "  {:?}", row)?;
        }
        Ok(())
    }
}

impl PMatrix {
    pub fn zero(ctx: RingContext, rows: usize, cols: usize) -> Self {
        PMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
            ctx,
        }
    }

    pub fn identity(ctx: RingContext, n: usize) -> Self {
        let mut m = Self::zero(ctx, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(ctx: RingContext, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zero(ctx, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.set_i(i, j, x as i128);
            }
        }
        m
    }

    pub fn from_fn(ctx: RingContext, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i128) -> Self {
        let mut m = Self::zero(ctx, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set_i(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn ctx(&self) -> RingContext {
        self.ctx
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.entries[i * self.cols + j] = self.ctx.reduce(x);
    }

    #[inline]
    pub fn set_i(&mut self, i: usize, j: usize, x: i128) {
        self.entries[i * self.cols + j] = self.ctx.reduce_i128(x);
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == u64::from(i == j)))
    }

    pub fn transpose(&self) -> PMatrix {
        let mut t = Self::zero(self.ctx, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &PMatrix) -> PMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let m = self.ctx.modulus() as u128;
        let mut out = Self::zero(self.ctx, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let a = a as u128;
                let orow = &other.entries[k * other.cols..(k + 1) * other.cols];
                let trow = &mut out.entries[i * other.cols..(i + 1) * other.cols];
                for j in 0..other.cols {
                    let add = (a * orow[j] as u128) % m;
                    let s = trow[j] as u128 + add;
                    trow[j] = (s % m) as u64;
                }
            }
        }
        out
    }

    /// Matrix-vector product (column vector convention): self * v.
    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u64;
                for j in 0..self.cols {
                    acc = self.ctx.add(acc, self.ctx.mul(self.get(i, j), v[j]));
                }
                acc
            })
            .collect()
    }

    /// Row-vector product: v * self.
    pub fn vec_mul(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.rows, v.len());
        let mut out = vec![0u64; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            for j in 0..self.cols {
                out[j] = self.ctx.add(out[j], self.ctx.mul(vi, self.get(i, j)));
            }
        }
        out
    }

    pub fn add(&self, other: &PMatrix) -> PMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, &b) in out.entries.iter_mut().zip(&other.entries) {
            *a = self.ctx.add(*a, b);
        }
        out
    }

    pub fn sub(&self, other: &PMatrix) -> PMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, &b) in out.entries.iter_mut().zip(&other.entries) {
            *a = self.ctx.sub(*a, b);
        }
        out
    }

    pub fn neg(&self) -> PMatrix {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = self.ctx.neg(*a);
        }
        out
    }

    pub fn scale(&self, c: u64) -> PMatrix {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = self.ctx.mul(*a, c);
        }
        out
    }

    /// Stack rows: [self; other].
    pub fn vstack(&self, other: &PMatrix) -> PMatrix {
        assert_eq!(self.cols, other.cols);
        let mut out = Self::zero(self.ctx, self.rows + other.rows, self.cols);
        out.entries[..self.entries.len()].copy_from_slice(&self.entries);
        out.entries[self.entries.len()..].copy_from_slice(&other.entries);
        out
    }

    /// Concatenate columns: [self | other].
    pub fn hstack(&self, other: &PMatrix) -> PMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zero(self.ctx, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            out.entries[i * out.cols..i * out.cols + self.cols].copy_from_slice(self.row(i));
            out.entries[i * out.cols + self.cols..(i + 1) * out.cols].copy_from_slice(other.row(i));
        }
        out
    }

    /// Block diagonal [self 0; 0 other].
    pub fn block_diag(&self, other: &PMatrix) -> PMatrix {
        let mut out = Self::zero(self.ctx, self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j));
            }
        }
        out
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PMatrix {
        let mut out = Self::zero(self.ctx, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c));
            }
        }
        out
    }

    pub fn take_rows(&self, rows: &[usize]) -> PMatrix {
        self.submatrix(rows, &(0..self.cols).collect::<Vec<_>>())
    }

    pub fn take_cols(&self, cols: &[usize]) -> PMatrix {
        self.submatrix(&(0..self.rows).collect::<Vec<_>>(), cols)
    }

    pub fn trace(&self) -> u64 {
        assert_eq!(self.rows, self.cols);
        let mut t = 0u64;
        for i in 0..self.rows {
            t = self.ctx.add(t, self.get(i, i));
        }
        t
    }

    /// Determinant mod p^work by fraction-free valuation-pivot elimination.
    pub fn det(&self) -> u64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let ctx = self.ctx;
        let mut a = self.clone();
        let mut sign_neg = false;
        let mut unit_scale = 1u64; // accumulated inverses of pivot unit parts
        let mut det = 1u64;
        for k in 0..n {
            // global-min valuation pivot in column k among rows >= k
            let mut best: Option<(u32, usize)> = None;
            for i in k..n {
                let v = ctx.val(a.get(i, k));
                if v < ctx.work() && best.map_or(true, |(bv, _)| v < bv) {
                    best = Some((v, i));
                }
            }
            let Some((_, pi)) = best else { return 0 };
            if pi != k {
                a.swap_rows(pi, k);
                sign_neg = !sign_neg;
            }
            let pivot = a.get(k, k);
            let (pv, pu) = ctx.val_unit(pivot);
            let pu_inv = ctx.inv_unit(pu);
            det = ctx.mul(det, pivot);
            let _ = unit_scale;
            unit_scale = 1;
            for i in (k + 1)..n {
                let e = a.get(i, k);
                if e == 0 {
                    continue;
                }
                // e has valuation >= pv by pivot minimality
                let q = ctx.mul(ctx.div_pow(e, pv), pu_inv);
                for j in k..n {
                    let s = ctx.sub(a.get(i, j), ctx.mul(q, a.get(k, j)));
                    a.set(i, j, s);
                }
            }
        }
        if sign_neg {
            det = ctx.neg(det);
        }
        det
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    /// row_i += q * row_k
    pub fn add_mul_row(&mut self, i: usize, k: usize, q: u64) {
        assert_ne!(i, k);
        let m = self.ctx.modulus() as u128;
        let q = q as u128;
        let (lo, hi, ilow) = if i < k { (i, k, true) } else { (k, i, false) };
        let (a, b) = self.entries.split_at_mut(hi * self.cols);
        let (ri, rk) = if ilow {
            (&mut a[lo * self.cols..(lo + 1) * self.cols], &b[..self.cols])
        } else {
            (&mut b[..self.cols], &a[lo * self.cols..(lo + 1) * self.cols])
        };
        for (x, &y) in ri.iter_mut().zip(rk.iter()) {
            let add = (q * y as u128) % m;
            *x = ((*x as u128 + add) % m) as u64;
        }
    }

    /// row_i *= u
    pub fn scale_row(&mut self, i: usize, u: u64) {
        for c in 0..self.cols {
            let x = self.ctx.mul(self.get(i, c), u);
            self.set(i, c, x);
        }
    }

    /// Inverse of a matrix that is invertible mod p (unit determinant).
    pub fn inverse(&self) -> Option<PMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let ctx = self.ctx;
        let mut a = self.clone();
        let mut inv = PMatrix::identity(ctx, n);
        for k in 0..n {
            let pi = (k..n).find(|&i| ctx.is_unit(a.get(i, k)))?;
            a.swap_rows(pi, k);
            inv.swap_rows(pi, k);
            let u = ctx.inv_unit(a.get(k, k));
            a.scale_row(k, u);
            inv.scale_row(k, u);
            for i in 0..n {
                if i == k {
                    continue;
                }
                let e = a.get(i, k);
                if e == 0 {
                    continue;
                }
                let q = ctx.neg(e);
                a.add_mul_row(i, k, q);
                inv.add_mul_row(i, k, q);
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.ctx.is_unit(self.det())
    }

    /// Entrywise congruence at certificate precision.
    pub fn cert_eq(&self, other: &PMatrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(&a, &b)| self.ctx.cert_eq(a, b))
    }

    pub fn is_cert_zero(&self) -> bool {
        self.entries.iter().all(|&a| self.ctx.cert_eq(a, 0))
    }

    /// Reduce every entry into the certificate world (mod p^prec), returning a
    /// matrix whose context has work == prec.
    pub fn reduce_to_cert(&self) -> PMatrix {
        let cctx = self.ctx.cert();
        let q = cctx.modulus();
        PMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&x| x % q).collect(),
            ctx: cctx,
        }
    }

    /// Reinterpret entries in another context (entries reduced mod the new modulus).
    pub fn with_ctx(&self, ctx: RingContext) -> PMatrix {
        PMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&x| ctx.reduce(x)).collect(),
            ctx,
        }
    }

    pub fn check_same_ctx(&self, other: &PMatrix) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::Dimension("matrices from different ring contexts".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> RingContext {
        RingContext::new(3, 4, 2).unwrap()
    }

    #[test]
    fn mul_identity() {
        let c = ctx();
        let m = PMatrix::from_rows(c, &[vec![1, 2], vec![3, 4]]);
        let id = PMatrix::identity(c, 2);
        assert_eq!(m.mul(&id), m);
        assert_eq!(id.mul(&m), m);
    }

    #[test]
    fn det_and_inverse() {
        let c = ctx();
        let m = PMatrix::from_rows(c, &[vec![1, 2], vec![3, 4]]);
        // det = 4 - 6 = -2, a unit mod 3
        assert_eq!(m.det(), c.reduce_i128(-2));
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());
    }

    #[test]
    fn det_zero_divisor() {
        let c = ctx();
        let m = PMatrix::from_rows(c, &[vec![3, 0], vec![0, 27]]);
        assert_eq!(c.val(m.det()), 4); // 81 == 0 mod 3^4
        assert!(m.inverse().is_none());
    }

    #[test]
    fn stacking() {
        let c = ctx();
        let a = PMatrix::from_rows(c, &[vec![1, 2]]);
        let b = PMatrix::from_rows(c, &[vec![3, 4]]);
        let v = a.vstack(&b);
        assert_eq!(v.rows(), 2);
        let h = a.hstack(&b);
        assert_eq!(h.cols(), 4);
        assert_eq!(h.get(0, 3), 4);
    }
}

//! Normalized 2-cochains and 2-cocycles with values in a finite coefficient
//! module, inhomogeneous convention: a cocycle classifies an extension via
//! the product (a1, g)(a2, h) = (a1 + g.a2 + c(g, h), gh).

use crate::amodule::FiniteAModule;
use crate::error::{Error, Result};
use crate::matrix::PMatrix;
use crate::ring::RingContext;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle2 {
    order: usize,
    rank: usize,
    /// values[(g * order + h) * rank ..][..rank]
    values: Vec<u64>,
}

impl Cocycle2 {
    pub fn zero(a: &FiniteAModule) -> Self {
        let order = a.group().order();
        Cocycle2 {
            order,
            rank: a.rank(),
            values: vec![0; order * order * a.rank()],
        }
    }

    pub fn from_fn(a: &FiniteAModule, mut f: impl FnMut(usize, usize) -> Vec<u64>) -> Self {
        let order = a.group().order();
        let mut c = Cocycle2::zero(a);
        for g in 0..order {
            for h in 0..order {
                let v = a.reduce_elem(&f(g, h));
                c.set(g, h, &v);
            }
        }
        c
    }

    #[inline]
    pub fn get(&self, g: usize, h: usize) -> &[u64] {
        let base = (g * self.order + h) * self.rank;
        &self.values[base..base + self.rank]
    }

    pub fn set(&mut self, g: usize, h: usize, v: &[u64]) {
        let base = (g * self.order + h) * self.rank;
        self.values[base..base + self.rank].copy_from_slice(v);
    }

    pub fn is_normalized(&self, a: &FiniteAModule) -> bool {
        (0..self.order).all(|g| {
            a.is_zero_elem(self.get(0, g)) && a.is_zero_elem(self.get(g, 0))
        })
    }

    pub fn add(&self, a: &FiniteAModule, other: &Cocycle2) -> Cocycle2 {
        let mut out = self.clone();
        for g in 0..self.order {
            for h in 0..self.order {
                let v = a.add_elem(self.get(g, h), other.get(g, h));
                out.set(g, h, &v);
            }
        }
        out
    }

    pub fn sub(&self, a: &FiniteAModule, other: &Cocycle2) -> Cocycle2 {
        let mut out = self.clone();
        for g in 0..self.order {
            for h in 0..self.order {
                let v = a.sub_elem(self.get(g, h), other.get(g, h));
                out.set(g, h, &v);
            }
        }
        out
    }

    pub fn scale(&self, a: &FiniteAModule, c: u64) -> Cocycle2 {
        let mut out = self.clone();
        for g in 0..self.order {
            for h in 0..self.order {
                let v = a.scale_elem(c, self.get(g, h));
                out.set(g, h, &v);
            }
        }
        out
    }

    pub fn is_zero(&self, a: &FiniteAModule) -> bool {
        (0..self.order)
            .all(|g| (0..self.order).all(|h| a.is_zero_elem(self.get(g, h))))
    }

    pub fn values_table(&self) -> Vec<Vec<Vec<u64>>> {
        (0..self.order)
            .map(|g| (0..self.order).map(|h| self.get(g, h).to_vec()).collect())
            .collect()
    }
}

/// First failing triple of the cocycle identity
/// g.c(h,k) - c(gh,k) + c(g,hk) - c(g,h) = 0, or Ok.
pub fn cocycle_check(a: &FiniteAModule, c: &Cocycle2) -> Result<()> {
    if !c.is_normalized(a) {
        return Err(Error::InvalidCocycle(0, 0, 0));
    }
    let grp = a.group();
    let n = grp.order();
    for g in 0..n {
        for h in 0..n {
            for k in 0..n {
                let mut v = a.act(g, c.get(h, k));
                v = a.sub_elem(&v, c.get(grp.mul(g, h), k));
                v = a.add_elem(&v, c.get(g, grp.mul(h, k)));
                v = a.sub_elem(&v, c.get(g, h));
                if !a.is_zero_elem(&v) {
                    return Err(Error::InvalidCocycle(g, h, k));
                }
            }
        }
    }
    Ok(())
}

/// (d1 f)(g, h) = g.f(h) - f(gh) + f(g) for a normalized 1-cochain
/// (f is indexed by group element; f[0] must be zero).
pub fn coboundary1(a: &FiniteAModule, f: &[Vec<u64>]) -> Cocycle2 {
    let grp = a.group().clone();
    assert_eq!(f.len(), grp.order());
    assert!(a.is_zero_elem(&f[0]), "1-cochain must be normalized");
    Cocycle2::from_fn(a, |g, h| {
        let mut v = a.act(g, &f[h]);
        v = a.sub_elem(&v, &f[grp.mul(g, h)]);
        a.add_elem(&v, &f[g])
    })
}

/// Scaled single-modulus linear model of the normalized cochain complex in
/// degrees 1 and 2: parameters are A-coordinates, every equation row is
/// scaled by p^{e_max - e_i} so all solving happens mod p^{e_max}.
pub struct CochainSystem {
    pub qctx: RingContext,
    pub n: usize,
    pub rank: usize,
    pub exps: Vec<u32>,
}

impl CochainSystem {
    pub fn new(a: &FiniteAModule) -> Option<CochainSystem> {
        let emax = a.max_exponent();
        if a.rank() == 0 || emax == 0 {
            return None;
        }
        Some(CochainSystem {
            qctx: RingContext::raw(a.ctx().p(), emax),
            n: a.group().order(),
            rank: a.rank(),
            exps: a.exponents().to_vec(),
        })
    }

    /// parameter index of a normalized 1-cochain value f(g)_i, g != 1
    pub fn c1_param(&self, g: usize, i: usize) -> usize {
        (g - 1) * self.rank + i
    }
    pub fn c1_dim(&self) -> usize {
        (self.n - 1) * self.rank
    }

    /// parameter index of a normalized 2-cochain value c(g,h)_i, g,h != 1
    pub fn c2_param(&self, g: usize, h: usize, i: usize) -> usize {
        ((g - 1) * (self.n - 1) + (h - 1)) * self.rank + i
    }
    pub fn c2_dim(&self) -> usize {
        (self.n - 1) * (self.n - 1) * self.rank
    }

    pub fn scale_of_coord(&self, i: usize) -> u64 {
        self.qctx.pow_p(self.qctx.work() - self.exps[i])
    }

    /// Pack a normalized cocycle into parameter coordinates.
    pub fn pack2(&self, c: &Cocycle2) -> Vec<u64> {
        let mut v = vec![0u64; self.c2_dim()];
        for g in 1..self.n {
            for h in 1..self.n {
                for (i, &x) in c.get(g, h).iter().enumerate() {
                    v[self.c2_param(g, h, i)] = x % self.qctx.modulus();
                }
            }
        }
        v
    }

    pub fn unpack2(&self, a: &FiniteAModule, v: &[u64]) -> Cocycle2 {
        Cocycle2::from_fn(a, |g, h| {
            if g == 0 || h == 0 {
                return vec![0; self.rank];
            }
            (0..self.rank)
                .map(|i| v[self.c2_param(g, h, i)])
                .collect()
        })
    }

    /// Matrix of d1 as a row-action: rows = C1 params, cols = C2 params
    /// (value coordinates; the output of a 1-cochain param under d1).
    pub fn d1_matrix(&self, a: &FiniteAModule) -> PMatrix {
        let grp = a.group().clone();
        let mut m = PMatrix::zero(self.qctx, self.c1_dim(), self.c2_dim());
        for g in 1..self.n {
            for h in 1..self.n {
                let gh = grp.mul(g, h);
                for i in 0..self.rank {
                    let col = self.c2_param(g, h, i);
                    // + (g . f(h))_i = sum_j act(g)[i][j] f(h)_j
                    for j in 0..self.rank {
                        let coef = a.action_of(g).get(i, j) % self.qctx.modulus();
                        if coef != 0 {
                            let row = self.c1_param(h, j);
                            let cur = m.get(row, col);
                            m.set(row, col, self.qctx.add(cur, coef));
                        }
                    }
                    // - f(gh)_i
                    if gh != 0 {
                        let row = self.c1_param(gh, i);
                        let cur = m.get(row, col);
                        m.set(row, col, self.qctx.sub(cur, 1));
                    }
                    // + f(g)_i
                    let row = self.c1_param(g, i);
                    let cur = m.get(row, col);
                    m.set(row, col, self.qctx.add(cur, 1));
                }
            }
        }
        m
    }

    /// Matrix of d2: rows = C2 params, cols = equations (triples g,h,k != 1,
    /// scaled per coordinate so everything lives mod p^{e_max}).
    pub fn d2_matrix(&self, a: &FiniteAModule) -> PMatrix {
        let grp = a.group().clone();
        let nn = self.n - 1;
        let cols = nn * nn * nn * self.rank;
        let mut m = PMatrix::zero(self.qctx, self.c2_dim(), cols);
        let eq = |g: usize, h: usize, k: usize, i: usize| {
            (((g - 1) * nn + (h - 1)) * nn + (k - 1)) * self.rank + i
        };
        for g in 1..self.n {
            for h in 1..self.n {
                let gh = grp.mul(g, h);
                for k in 1..self.n {
                    let hk = grp.mul(h, k);
                    for i in 0..self.rank {
                        let col = eq(g, h, k, i);
                        let s = self.scale_of_coord(i);
                        // + g.c(h,k): coefficient s * act(g)[i][j] on c(h,k)_j
                        for j in 0..self.rank {
                            let coef = self
                                .qctx
                                .mul(s, a.action_of(g).get(i, j) % self.qctx.modulus());
                            if coef != 0 {
                                let row = self.c2_param(h, k, j);
                                let cur = m.get(row, col);
                                m.set(row, col, self.qctx.add(cur, coef));
                            }
                        }
                        // - c(gh, k)
                        if gh != 0 {
                            let row = self.c2_param(gh, k, i);
                            let cur = m.get(row, col);
                            m.set(row, col, self.qctx.sub(cur, s));
                        }
                        // + c(g, hk)
                        if hk != 0 {
                            let row = self.c2_param(g, hk, i);
                            let cur = m.get(row, col);
                            m.set(row, col, self.qctx.add(cur, s));
                        }
                        // - c(g, h)
                        let row = self.c2_param(g, h, i);
                        let cur = m.get(row, col);
                        m.set(row, col, self.qctx.sub(cur, s));
                    }
                }
            }
        }
        m
    }

    /// Rows spanning the parameter ambiguity (coordinate i only matters mod
    /// p^{e_i} inside the single-modulus model).
    pub fn c2_modulus_rows(&self) -> PMatrix {
        let mut rows = Vec::new();
        for g in 1..self.n {
            for h in 1..self.n {
                for i in 0..self.rank {
                    let q = self.qctx.pow_p(self.exps[i]);
                    if q < self.qctx.modulus() {
                        let mut r = vec![0i64; self.c2_dim()];
                        r[self.c2_param(g, h, i)] = q as i64;
                        rows.push(r);
                    }
                }
            }
        }
        PMatrix::from_rows_or_empty(self.qctx, rows, self.c2_dim())
    }
}

/// Solve d1 f = c; returns the normalized 1-cochain on success.
pub fn is_coboundary(a: &FiniteAModule, c: &Cocycle2) -> Option<Vec<Vec<u64>>> {
    if a.rank() == 0 {
        return Some(vec![vec![]; a.group().order()]);
    }
    let sys = CochainSystem::new(a)?;
    let d1 = sys.d1_matrix(a);
    // target: scale coordinate i of c by p^{e_max - e_i}, matching d2's scaling
    // convention is unnecessary here: d1 rows are unscaled parameter images, so
    // solve directly in the value coordinates mod p^{e_max}; value coords only
    // matter mod p^{e_i}, so adjoin the modulus rows.
    let modrows = sys.c2_modulus_rows();
    let stacked = d1.vstack(&modrows);
    let b = sys.pack2(c);
    let x = crate::howell::solve(&stacked, &b)?;
    let mut f = vec![vec![0u64; a.rank()]; a.group().order()];
    for g in 1..sys.n {
        for i in 0..a.rank() {
            f[g][i] = x[sys.c1_param(g, i)];
        }
    }
    // verify (cheap, and guards the scaled-model bookkeeping)
    let d1f = coboundary1(a, &f);
    if d1f.sub(a, c).is_zero(a) {
        Some(f)
    } else {
        None
    }
}

impl PMatrix {
    fn from_rows_or_empty(ctx: RingContext, rows: Vec<Vec<i64>>, cols: usize) -> PMatrix {
        if rows.is_empty() {
            PMatrix::zero(ctx, 0, cols)
        } else {
            PMatrix::from_rows(ctx, &rows)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::cyclic;

    fn setup() -> FiniteAModule {
        let ctx = RingContext::new(3, 16, 8).unwrap();
        FiniteAModule::trivial(ctx, cyclic(3).unwrap(), vec![1]).unwrap()
    }

    #[test]
    fn zero_cocycle_valid() {
        let a = setup();
        let c = Cocycle2::zero(&a);
        assert!(cocycle_check(&a, &c).is_ok());
        assert!(is_coboundary(&a, &c).is_some());
    }

    #[test]
    fn coboundary_is_cocycle() {
        let a = setup();
        // any normalized f: d2 d1 = 0
        for bits in 0..9u64 {
            let f = vec![vec![0], vec![bits % 3], vec![bits / 3]];
            let c = coboundary1(&a, &f);
            assert!(cocycle_check(&a, &c).is_ok());
            let recovered = is_coboundary(&a, &c).expect("is a coboundary");
            let again = coboundary1(&a, &recovered);
            assert!(again.sub(&a, &c).is_zero(&a));
        }
    }

    /// Direct evaluation (spec example): G = C3, f(g)=1, f(g^2)=2 trivial
    /// action on Z/3: (d1 f)(g, g) = f(g) - f(g^2) + f(g) = 0.
    #[test]
    fn coboundary_direct_evaluation() {
        let a = setup();
        let f = vec![vec![0], vec![1], vec![2]];
        let c = coboundary1(&a, &f);
        assert_eq!(c.get(1, 1), &[0]);
    }

    /// The base-3 carry cocycle on C3 is not a coboundary (it is the class of
    /// the extension C9 -> C3).
    #[test]
    fn carry_cocycle_nontrivial() {
        let a = setup();
        let carry = Cocycle2::from_fn(&a, |g, h| vec![u64::from(g + h >= 3)]);
        assert!(cocycle_check(&a, &carry).is_ok());
        assert!(is_coboundary(&a, &carry).is_none());
    }
}

//! Finite abelian p-groups with a G-action: the coefficient modules of the
//! extension/cohomology layer. Elements are coordinate vectors, coordinate i
//! taken mod p^{e_i}.

use crate::error::{Error, Result};
use crate::group::Group;
use crate::matrix::PMatrix;
use crate::ring::RingContext;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct FiniteAModule {
    ctx: RingContext,
    group: Arc<Group>,
    exps: Vec<u32>,
    /// action matrix per group element (r x r)
    action: Vec<PMatrix>,
}

impl FiniteAModule {
    pub fn trivial(ctx: RingContext, group: Arc<Group>, exps: Vec<u32>) -> Result<Self> {
        let r = exps.len();
        let action = (0..group.order())
            .map(|_| PMatrix::identity(ctx, r))
            .collect();
        let m = FiniteAModule {
            ctx,
            group,
            exps,
            action,
        };
        m.validate()?;
        Ok(m)
    }

    /// Zero coefficient module (A = 0).
    pub fn zero(ctx: RingContext, group: Arc<Group>) -> Self {
        FiniteAModule::trivial(ctx, group, vec![]).unwrap()
    }

    /// Build from one matrix per listed group generator, extending along
    /// generator words; the extension is validated against the full table.
    pub fn with_generator_action(
        ctx: RingContext,
        group: Arc<Group>,
        exps: Vec<u32>,
        gen_action: &[PMatrix],
    ) -> Result<Self> {
        let gens = group.generators();
        if gen_action.len() != gens.len() {
            return Err(Error::InvalidModule(format!(
                "need one action matrix per generator ({} generators, {} matrices)",
                gens.len(),
                gen_action.len()
            )));
        }
        let r = exps.len();
        let words = group.generator_words();
        let mat_of_gen = |g: usize| -> &PMatrix {
            let pos = gens.iter().position(|&x| x == g).unwrap();
            &gen_action[pos]
        };
        let mut action = Vec::with_capacity(group.order());
        for el in group.elements() {
            let mut m = PMatrix::identity(ctx, r);
            for &g in &words[el] {
                m = mat_of_gen(g).mul(&m);
            }
            action.push(m);
        }
        let out = FiniteAModule {
            ctx,
            group,
            exps,
            action,
        };
        out.validate()?;
        Ok(out)
    }

    /// Build from explicit per-element matrices.
    pub fn from_element_action(
        ctx: RingContext,
        group: Arc<Group>,
        exps: Vec<u32>,
        action: Vec<PMatrix>,
    ) -> Result<Self> {
        let m = FiniteAModule {
            ctx,
            group,
            exps,
            action,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let r = self.rank();
        for &e in &self.exps {
            if e == 0 || e > self.ctx.torsion_guard() {
                return Err(Error::InvalidModule(format!(
                    "cyclic exponent {e} outside (0, torsion_guard = {}]",
                    self.ctx.torsion_guard()
                )));
            }
        }
        if self.action.len() != self.group.order() {
            return Err(Error::InvalidModule("action table size mismatch".into()));
        }
        for m in &self.action {
            if m.rows() != r || m.cols() != r {
                return Err(Error::InvalidModule("action matrix shape mismatch".into()));
            }
        }
        if r == 0 {
            return Ok(());
        }
        // well-definedness: entry (i,j) must kill p^{e_j}-torsion into p^{e_i}
        for m in &self.action {
            for i in 0..r {
                for j in 0..r {
                    if self.exps[i] > self.exps[j]
                        && self.ctx.val(m.get(i, j)) < self.exps[i] - self.exps[j]
                    {
                        return Err(Error::InvalidModule(
                            "action entry not well-defined on mixed moduli".into(),
                        ));
                    }
                }
            }
        }
        if !self.action[0].is_identity() {
            return Err(Error::InvalidModule("action of identity is not identity".into()));
        }
        // invertibility: bijective on A iff unit det mod p (Nakayama)
        for m in &self.action {
            if !self.ctx.is_unit(m.det()) {
                return Err(Error::InvalidModule("action matrix not invertible".into()));
            }
        }
        // homomorphism against the full multiplication table
        for g in self.group.elements() {
            for h in self.group.elements() {
                let gh = self.group.mul(g, h);
                let prod = self.action[g].mul(&self.action[h]);
                if !self.mat_eq(&prod, &self.action[gh]) {
                    return Err(Error::InvalidModule(format!(
                        "action is not a homomorphism at ({g}, {h})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Matrix congruence in the per-row moduli.
    fn mat_eq(&self, a: &PMatrix, b: &PMatrix) -> bool {
        let r = self.rank();
        for i in 0..r {
            let q = self.ctx.pow_p(self.exps[i]);
            for j in 0..r {
                if a.get(i, j) % q != b.get(i, j) % q {
                    return false;
                }
            }
        }
        true
    }

    pub fn ctx(&self) -> RingContext {
        self.ctx
    }
    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }
    pub fn rank(&self) -> usize {
        self.exps.len()
    }
    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }
    pub fn action_of(&self, g: usize) -> &PMatrix {
        &self.action[g]
    }
    pub fn max_exponent(&self) -> u32 {
        self.exps.iter().copied().max().unwrap_or(0)
    }

    pub fn size(&self) -> u64 {
        self.exps.iter().map(|&e| self.ctx.pow_p(e)).product()
    }

    pub fn orders(&self) -> Vec<u64> {
        self.exps.iter().map(|&e| self.ctx.pow_p(e)).collect()
    }

    pub fn zero_elem(&self) -> Vec<u64> {
        vec![0; self.rank()]
    }

    pub fn reduce_elem(&self, v: &[u64]) -> Vec<u64> {
        v.iter()
            .zip(&self.exps)
            .map(|(&x, &e)| x % self.ctx.pow_p(e))
            .collect()
    }

    pub fn add_elem(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.reduce_elem(
            &a.iter()
                .zip(b)
                .map(|(&x, &y)| self.ctx.add(x, y))
                .collect::<Vec<_>>(),
        )
    }

    pub fn sub_elem(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.reduce_elem(
            &a.iter()
                .zip(b)
                .map(|(&x, &y)| self.ctx.sub(x, y))
                .collect::<Vec<_>>(),
        )
    }

    pub fn neg_elem(&self, a: &[u64]) -> Vec<u64> {
        self.reduce_elem(&a.iter().map(|&x| self.ctx.neg(x)).collect::<Vec<_>>())
    }

    pub fn scale_elem(&self, c: u64, a: &[u64]) -> Vec<u64> {
        self.reduce_elem(&a.iter().map(|&x| self.ctx.mul(c, x)).collect::<Vec<_>>())
    }

    pub fn act(&self, g: usize, a: &[u64]) -> Vec<u64> {
        self.reduce_elem(&self.action[g].mul_vec(a))
    }

    pub fn is_zero_elem(&self, a: &[u64]) -> bool {
        self.reduce_elem(a).iter().all(|&x| x == 0)
    }

    /// Mixed-radix index of an element (identity has index 0).
    pub fn index_of(&self, a: &[u64]) -> usize {
        let a = self.reduce_elem(a);
        let mut idx = 0u64;
        let mut stride = 1u64;
        for (x, &e) in a.iter().zip(&self.exps) {
            idx += x * stride;
            stride *= self.ctx.pow_p(e);
        }
        idx as usize
    }

    pub fn elem_of_index(&self, mut idx: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.rank());
        for &e in &self.exps {
            let q = self.ctx.pow_p(e) as usize;
            out.push((idx % q) as u64);
            idx /= q;
        }
        out
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.size() as usize).map(|i| self.elem_of_index(i))
    }

    /// Standard generators (unit coordinate vectors).
    pub fn generators(&self) -> Vec<Vec<u64>> {
        (0..self.rank())
            .map(|i| {
                let mut v = self.zero_elem();
                v[i] = 1;
                v
            })
            .collect()
    }

    pub fn is_trivial_action(&self) -> bool {
        self.action.iter().all(|m| m.is_identity())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::cyclic;

    fn ctx() -> RingContext {
        RingContext::new(3, 16, 8).unwrap()
    }

    #[test]
    fn trivial_module_roundtrip() {
        let g = cyclic(3).unwrap();
        let a = FiniteAModule::trivial(ctx(), g, vec![1, 2]).unwrap();
        assert_eq!(a.size(), 27);
        for i in 0..27 {
            assert_eq!(a.index_of(&a.elem_of_index(i)), i);
        }
        let x = a.add_elem(&[2, 8], &[1, 1]);
        assert_eq!(x, vec![0, 0]);
    }

    #[test]
    fn rejects_oversized_exponent() {
        let g = cyclic(3).unwrap();
        assert!(FiniteAModule::trivial(ctx(), g, vec![9]).is_err());
    }

    #[test]
    fn action_of_order_three_on_z9() {
        // C3 acting on Z/9 by multiplication by 4 (4^3 = 64 = 1 mod 9)
        let c = ctx();
        let g = cyclic(3).unwrap();
        let m = PMatrix::from_rows(c, &[vec![4]]);
        let a = FiniteAModule::with_generator_action(c, g, vec![2], &[m]).unwrap();
        assert!(!a.is_trivial_action());
        assert_eq!(a.act(1, &[1]), vec![4]);
        assert_eq!(a.act(2, &[1]), vec![7]); // 16 mod 9
    }

    #[test]
    fn rejects_non_action() {
        // multiplication by 2 has order 6 on Z/9, not dividing |C3|
        let c = ctx();
        let g = cyclic(3).unwrap();
        let m = PMatrix::from_rows(c, &[vec![2]]);
        assert!(FiniteAModule::with_generator_action(c, g, vec![2], &[m]).is_err());
    }

    #[test]
    fn rejects_ill_defined_mixed_modulus() {
        // map Z/3 -> Z/9 component with a unit entry is not well-defined
        let c = ctx();
        let g = cyclic(3).unwrap();
        let m = PMatrix::from_rows(c, &[vec![1, 1], vec![0, 1]]);
        // exps: row/col 0 has e=2 (Z/9), col 1 e=1 (Z/3): entry (0,1)=1 bad
        assert!(FiniteAModule::with_generator_action(c, g.clone(), vec![2, 1], &[m]).is_err());
        let ok = PMatrix::from_rows(c, &[vec![1, 3], vec![0, 1]]);
        assert!(FiniteAModule::with_generator_action(c, g, vec![2, 1], &[ok]).is_ok());
    }
}

//! Finitely presented Z_p[G]-modules at working precision: lattices, finite
//! modules, equivariant morphisms, Hom modules, kernels and cokernels, and
//! the trace criterion for rational freeness.
//!
//! Presentation convention: module elements are column vectors on `ngens`
//! generators, relations are the columns of `relations`, the group acts on
//! the left by `action[g]`. All congruence certificates are checked at the
//! context's certificate precision; modules whose action matrices come from
//! solving carry diagonal "noise floor" relation columns at p^(work - guard),
//! which absorb the solve ambiguity and vanish at certificate precision.

use crate::error::{Error, Result};
use crate::group::Group;
use crate::howell::{kernel, HowellForm, Solver};
#[cfg(test)]
use crate::howell::howell_of;
use crate::matrix::PMatrix;
use crate::ring::RingContext;
use crate::smith::{lattice_row_basis, smith_form, zp_invariants, FiniteQuotient};
use std::sync::Arc;

#[derive(Debug)]
struct Inner {
    ctx: RingContext,
    group: Arc<Group>,
    ngens: usize,
    relations: PMatrix,
    action: Vec<PMatrix>,
    /// action matrices obtained by solving: congruences hold only modulo the
    /// noise-floor scale, so Hom systems must carry floor auxiliaries
    noisy: bool,
    /// exponent of this presentation's noise floor; `work` for exact data
    depth: u32,
}

#[derive(Clone, Debug)]
pub struct GModule(Arc<Inner>);

impl PartialEq for GModule {
    fn eq(&self, other: &Self) -> bool {
        self.0.ngens == other.0.ngens
            && self.0.relations == other.0.relations
            && self.0.action == other.0.action
            && self.0.group == other.0.group
    }
}

/// Absorption floor for morphism-level solves: certificate precision. Noise
/// above this scale never shows in certificates; module presentations track
/// their own graded depths.
pub fn floor_exp(ctx: &RingContext) -> u32 {
    ctx.prec()
}

impl GModule {
    pub fn new(
        ctx: RingContext,
        group: Arc<Group>,
        relations: PMatrix,
        action: Vec<PMatrix>,
    ) -> Result<GModule> {
        let ngens = relations.rows();
        let m = GModule(Arc::new(Inner {
            noisy: false,
            depth: ctx.work(),
            ctx,
            group,
            ngens,
            relations,
            action,
        }));
        m.validate_shape()?;
        m.zp_structure()?;
        Ok(m)
    }

    fn validate_shape(&self) -> Result<()> {
        let i = &self.0;
        if i.action.len() != i.group.order() {
            return Err(Error::InvalidModule("need one action matrix per group element".into()));
        }
        for a in &i.action {
            if a.rows() != i.ngens || a.cols() != i.ngens {
                return Err(Error::InvalidModule("action matrix shape mismatch".into()));
            }
        }
        if !i.action[0].is_identity() {
            return Err(Error::InvalidModule("action of the identity must be the identity".into()));
        }
        Ok(())
    }

    /// Full invariant check (tests): the action is a homomorphism into module
    /// automorphisms and preserves the relation span, at certificate precision.
    pub fn verify(&self) -> Result<()> {
        self.validate_shape()?;
        let rel = self.rel_howell_cert();
        for g in self.group().elements() {
            let ag = self.action_of(g).reduce_to_cert();
            // relation span preserved
            let moved = ag.mul(&self.relations().reduce_to_cert());
            for j in 0..moved.cols() {
                if !rel.contains(&moved.col(j)) {
                    return Err(Error::InvalidModule(format!(
                        "action of {g} does not preserve the relation span"
                    )));
                }
            }
            for h in self.group().elements() {
                let prod = ag.mul(&self.action_of(h).reduce_to_cert());
                let gh = self.action_of(self.group().mul(g, h)).reduce_to_cert();
                let diff = prod.sub(&gh);
                for j in 0..diff.cols() {
                    if !rel.contains(&diff.col(j)) {
                        return Err(Error::InvalidModule(format!(
                            "action composition fails at ({g}, {h}) modulo the relations"
                        )));
                    }
                }
            }
        }
        self.zp_structure()?;
        Ok(())
    }

    pub fn ctx(&self) -> RingContext {
        self.0.ctx
    }
    pub fn is_noisy(&self) -> bool {
        self.0.noisy
    }
    /// Exponent below which this presentation's congruences are exact.
    pub fn depth(&self) -> u32 {
        self.0.depth
    }
    pub fn group(&self) -> &Arc<Group> {
        &self.0.group
    }
    pub fn ngens(&self) -> usize {
        self.0.ngens
    }
    pub fn relations(&self) -> &PMatrix {
        &self.0.relations
    }
    pub fn action_of(&self, g: usize) -> &PMatrix {
        &self.0.action[g]
    }
    pub fn action(&self) -> &[PMatrix] {
        &self.0.action
    }

    pub fn zero(ctx: RingContext, group: Arc<Group>) -> GModule {
        GModule(Arc::new(Inner {
            noisy: false,
            depth: ctx.work(),
            ctx,
            group: group.clone(),
            ngens: 0,
            relations: PMatrix::zero(ctx, 0, 0),
            action: (0..group.order()).map(|_| PMatrix::zero(ctx, 0, 0)).collect(),
        }))
    }

    pub fn is_zero_module(&self) -> bool {
        match self.zp_structure() {
            Ok((r, t)) => r == 0 && t.is_empty(),
            Err(_) => false,
        }
    }

    /// A lattice in the certificate sense: every relation column vanishes at
    /// certificate precision (noise-floor columns allowed).
    pub fn is_lattice(&self) -> bool {
        self.relations().is_cert_zero()
    }

    /// (free rank, torsion exponents) of the underlying Z_p-module.
    pub fn zp_structure(&self) -> Result<(usize, Vec<u32>)> {
        zp_invariants(&self.relations().transpose())
    }

    pub fn rank(&self) -> usize {
        self.zp_structure().map(|(r, _)| r).unwrap_or(0)
    }

    pub fn trace_of(&self, g: usize) -> u64 {
        self.action_of(g).trace()
    }

    /// Howell form of the relation span at working precision.
    pub fn rel_howell_work(&self) -> HowellForm {
        crate::howell::howell(&self.relations().transpose())
    }

    /// Howell form of the relation span at certificate precision.
    pub fn rel_howell_cert(&self) -> HowellForm {
        crate::howell::howell(&self.relations().transpose().reduce_to_cert())
    }

    /// Is the element zero in the module at certificate precision?
    pub fn is_zero_elem_cert(&self, v: &[u64]) -> bool {
        let q = self.ctx().pow_p(self.ctx().prec());
        let red: Vec<u64> = v.iter().map(|&x| x % q).collect();
        self.rel_howell_cert().contains(&red)
    }

    /// Direct sum, with the canonical inclusion and projection maps.
    pub fn direct_sum(&self, other: &GModule) -> (GModule, [GHom; 2], [GHom; 2]) {
        assert_eq!(self.ctx(), other.ctx());
        let ctx = self.ctx();
        let relations = self.relations().block_diag(other.relations());
        let action: Vec<PMatrix> = self
            .action()
            .iter()
            .zip(other.action())
            .map(|(a, b)| a.block_diag(b))
            .collect();
        let sum = GModule(Arc::new(Inner {
            noisy: self.is_noisy() || other.is_noisy(),
            depth: self.depth().min(other.depth()),
            ctx,
            group: self.group().clone(),
            ngens: self.ngens() + other.ngens(),
            relations,
            action,
        }));
        let (n1, n2) = (self.ngens(), other.ngens());
        let mut i1 = PMatrix::zero(ctx, n1 + n2, n1);
        let mut i2 = PMatrix::zero(ctx, n1 + n2, n2);
        let mut p1 = PMatrix::zero(ctx, n1, n1 + n2);
        let mut p2 = PMatrix::zero(ctx, n2, n1 + n2);
        for i in 0..n1 {
            i1.set(i, i, 1);
            p1.set(i, i, 1);
        }
        for i in 0..n2 {
            i2.set(n1 + i, i, 1);
            p2.set(i, n1 + i, 1);
        }
        let inc = [
            GHom::new_unchecked(self.clone(), sum.clone(), i1),
            GHom::new_unchecked(other.clone(), sum.clone(), i2),
        ];
        let proj = [
            GHom::new_unchecked(sum.clone(), self.clone(), p1),
            GHom::new_unchecked(sum.clone(), other.clone(), p2),
        ];
        (sum, inc, proj)
    }

    /// Nakayama minimal generators: indices whose images form a basis of
    /// M/(p, I_G)M over F_p, greedily in generator order.
    pub fn mingens_nakayama(&self) -> Vec<usize> {
        let p = self.ctx().p();
        let n = self.ngens();
        let mut elim = FpElim::new(p, n);
        for j in 0..self.relations().cols() {
            elim.add(&self.relations().col(j));
        }
        for g in self.group().generators() {
            let a = self.action_of(g);
            for j in 0..n {
                let mut col = a.col(j);
                col[j] = self.ctx().sub(col[j], 1);
                elim.add(&col);
            }
        }
        let mut selected = Vec::new();
        for i in 0..n {
            let mut e = vec![0u64; n];
            e[i] = 1;
            if elim.add(&e) {
                selected.push(i);
            }
        }
        selected
    }

    /// Presentation with unit relations eliminated: returns the reduced
    /// module with mutually inverse maps (to_reduced, from_reduced).
    pub fn smith_reduce(&self) -> Result<(GModule, GHom, GHom)> {
        let ctx = self.ctx();
        let (d, l, _r) = smith_form(self.relations());
        let linv = l.inverse().expect("smith transform invertible");
        let n = self.ngens();
        let mut keep = Vec::new();
        let mut kept_exps = Vec::new();
        for i in 0..n {
            let e = if i < d.cols().min(n) {
                ctx.val(d.get(i, i))
            } else {
                ctx.work()
            };
            if e == 0 {
                continue;
            }
            keep.push(i);
            kept_exps.push(e);
        }
        let all: Vec<usize> = (0..n).collect();
        let lk = l.submatrix(&keep, &all);
        let lik = linv.submatrix(&all, &keep);
        let m = keep.len();
        let mut relations = PMatrix::zero(ctx, m, 0);
        let mut diag_cols: Vec<Vec<i64>> = Vec::new();
        for (row, &e) in kept_exps.iter().enumerate() {
            if e >= ctx.work() {
                continue;
            }
            let mut col = vec![0i64; m];
            col[row] = ctx.pow_p(e) as i64;
            diag_cols.push(col);
        }
        if !diag_cols.is_empty() {
            let cols: Vec<Vec<i64>> = (0..m)
                .map(|i| diag_cols.iter().map(|c| c[i]).collect())
                .collect();
            relations = PMatrix::from_rows(ctx, &cols);
        }
        let action: Vec<PMatrix> = self
            .action()
            .iter()
            .map(|a| lk.mul(a).mul(&lik))
            .collect();
        let reduced = GModule(Arc::new(Inner {
            noisy: self.is_noisy(),
            depth: self.depth(),
            ctx,
            group: self.group().clone(),
            ngens: m,
            relations,
            action,
        }));
        reduced.zp_structure()?;
        let to_red = GHom::new_unchecked(self.clone(), reduced.clone(), lk);
        let from_red = GHom::new_unchecked(reduced.clone(), self.clone(), lik);
        Ok((reduced, to_red, from_red))
    }
}

/// F_p Gaussian elimination helper for Nakayama quotients.
struct FpElim {
    p: u64,
    n: usize,
    /// reduced pivot rows, pivot position strictly increasing per insertion
    rows: Vec<(usize, Vec<u64>)>,
}

impl FpElim {
    fn new(p: u64, n: usize) -> Self {
        FpElim { p, n, rows: Vec::new() }
    }

    /// Returns true if v was independent of the span so far.
    fn add(&mut self, v: &[u64]) -> bool {
        let p = self.p;
        let mut v: Vec<u64> = v.iter().map(|&x| x % p).collect();
        for (piv, row) in &self.rows {
            if v[*piv] != 0 {
                let c = v[*piv];
                for i in 0..self.n {
                    v[i] = (v[i] + (p - c) * row[i]) % p;
                }
            }
        }
        if let Some(piv) = v.iter().position(|&x| x != 0) {
            let inv = mod_inv(v[piv], p);
            for x in v.iter_mut() {
                *x = (*x * inv) % p;
            }
            self.rows.push((piv, v));
            true
        } else {
            false
        }
    }
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // Fermat
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Free module of rank s over Z_p[G]: generators (i, g), regular action.
pub fn free_module(ctx: RingContext, group: &Arc<Group>, s: usize) -> GModule {
    let og = group.order();
    let n = s * og;
    let mut action = Vec::with_capacity(og);
    for h in group.elements() {
        let mut m = PMatrix::zero(ctx, n, n);
        for i in 0..s {
            for g in group.elements() {
                m.set(i * og + group.mul(h, g), i * og + g, 1);
            }
        }
        action.push(m);
    }
    GModule(Arc::new(Inner {
        noisy: false,
        depth: ctx.work(),
        ctx,
        group: group.clone(),
        ngens: n,
        relations: PMatrix::zero(ctx, n, 0),
        action,
    }))
}

/// Z_p with trivial action.
pub fn trivial_module(ctx: RingContext, group: &Arc<Group>) -> GModule {
    let action = (0..group.order()).map(|_| PMatrix::identity(ctx, 1)).collect();
    GModule(Arc::new(Inner {
        noisy: false,
        depth: ctx.work(),
        ctx,
        group: group.clone(),
        ngens: 1,
        relations: PMatrix::zero(ctx, 1, 0),
        action,
    }))
}

/// Augmentation ideal: basis {g - 1 : g != 1}, generator index g-1 for the
/// group element g; h . (g - 1) = (hg - 1) - (h - 1).
pub fn augmentation_ideal(ctx: RingContext, group: &Arc<Group>) -> GModule {
    let og = group.order();
    let n = og.saturating_sub(1);
    let mut action = Vec::with_capacity(og);
    for h in group.elements() {
        let mut m = PMatrix::zero(ctx, n, n);
        for g in 1..og {
            let hg = group.mul(h, g);
            if hg != 0 {
                m.set(hg - 1, g - 1, 1);
            }
            if h != 0 {
                let cur = m.get(h - 1, g - 1);
                m.set(h - 1, g - 1, ctx.sub(cur, 1));
            }
        }
        action.push(m);
    }
    GModule(Arc::new(Inner {
        noisy: false,
        depth: ctx.work(),
        ctx,
        group: group.clone(),
        ngens: n,
        relations: PMatrix::zero(ctx, n, 0),
        action,
    }))
}

/// The coefficient module A as a finitely presented G-module:
/// generators the cyclic generators, relations diag(p^{e_i}).
pub fn module_from_amodule(a: &crate::amodule::FiniteAModule) -> GModule {
    let ctx = a.ctx();
    let r = a.rank();
    let mut relations = PMatrix::zero(ctx, r, r);
    for i in 0..r {
        relations.set(i, i, ctx.pow_p(a.exponents()[i]));
    }
    let action: Vec<PMatrix> = (0..a.group().order())
        .map(|g| a.action_of(g).clone())
        .collect();
    GModule(Arc::new(Inner {
        noisy: false,
        depth: ctx.work(),
        ctx,
        group: a.group().clone(),
        ngens: r,
        relations,
        action,
    }))
}

/// Dual lattice: same generators, action(g) = action(g^{-1})^T. Double dual
/// is entrywise equal to the original.
pub fn dual_lattice(c: &GModule) -> Result<GModule> {
    if !c.is_lattice() {
        return Err(Error::NotALattice);
    }
    let group = c.group().clone();
    let action: Vec<PMatrix> = group
        .elements()
        .map(|g| c.action_of(group.inv(g)).transpose())
        .collect();
    Ok(GModule(Arc::new(Inner {
        noisy: c.is_noisy(),
        depth: c.depth(),
        ctx: c.ctx(),
        group,
        ngens: c.ngens(),
        relations: c.relations().clone(),
        action,
    })))
}

/// Trace criterion: (C tensor Q_p) + Q_p free over Q_p[G] iff trace(g|C) = -1
/// for all g != 1 and |G| divides rank(C) + 1; returns (ok, s).
pub fn check_rational_freeness(c: &GModule) -> Result<(bool, Option<usize>)> {
    let ctx = c.ctx();
    let (rank, _) = c.zp_structure()?;
    let og = c.group().order();
    let minus_one = ctx.neg(1);
    let traces_ok = c
        .group()
        .elements()
        .skip(1)
        .all(|g| ctx.cert_eq(c.trace_of(g), minus_one));
    if traces_ok && (rank + 1) % og == 0 {
        Ok((true, Some((rank + 1) / og)))
    } else {
        Ok((false, None))
    }
}

#[derive(Clone, Debug)]
pub struct GHom {
    source: GModule,
    target: GModule,
    matrix: PMatrix,
}

impl GHom {
    pub fn new_unchecked(source: GModule, target: GModule, matrix: PMatrix) -> GHom {
        assert_eq!(matrix.rows(), target.ngens(), "GHom row count");
        assert_eq!(matrix.cols(), source.ngens(), "GHom col count");
        GHom {
            source,
            target,
            matrix,
        }
    }

    pub fn new(source: GModule, target: GModule, matrix: PMatrix) -> Result<GHom> {
        let h = GHom::new_unchecked(source, target, matrix);
        h.verify_cert()?;
        Ok(h)
    }

    pub fn source(&self) -> &GModule {
        &self.source
    }
    pub fn target(&self) -> &GModule {
        &self.target
    }
    pub fn matrix(&self) -> &PMatrix {
        &self.matrix
    }

    pub fn identity(m: &GModule) -> GHom {
        GHom::new_unchecked(m.clone(), m.clone(), PMatrix::identity(m.ctx(), m.ngens()))
    }

    pub fn zero(source: &GModule, target: &GModule) -> GHom {
        GHom::new_unchecked(
            source.clone(),
            target.clone(),
            PMatrix::zero(source.ctx(), target.ngens(), source.ngens()),
        )
    }

    /// self . other (apply other first).
    pub fn compose(&self, other: &GHom) -> GHom {
        assert_eq!(other.target.ngens(), self.source.ngens(), "compose mismatch");
        GHom::new_unchecked(
            other.source.clone(),
            self.target.clone(),
            self.matrix.mul(&other.matrix),
        )
    }

    pub fn add(&self, other: &GHom) -> GHom {
        GHom::new_unchecked(
            self.source.clone(),
            self.target.clone(),
            self.matrix.add(&other.matrix),
        )
    }

    pub fn sub(&self, other: &GHom) -> GHom {
        GHom::new_unchecked(
            self.source.clone(),
            self.target.clone(),
            self.matrix.sub(&other.matrix),
        )
    }

    pub fn scale(&self, c: u64) -> GHom {
        GHom::new_unchecked(self.source.clone(), self.target.clone(), self.matrix.scale(c))
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        self.matrix.mul_vec(v)
    }

    /// Morphism certificate at certificate precision: maps source relations
    /// into the target relation span and intertwines the generator actions
    /// modulo the target relations.
    pub fn verify_cert(&self) -> Result<()> {
        let rel = self.target.rel_howell_cert();
        let mc = self.matrix.reduce_to_cert();
        let moved = mc.mul(&self.source.relations().reduce_to_cert());
        for j in 0..moved.cols() {
            if !rel.contains(&moved.col(j)) {
                return Err(Error::InvalidModule(format!(
                    "hom does not kill source relation {j}"
                )));
            }
        }
        for g in self.source.group().generators() {
            let lhs = mc.mul(&self.source.action_of(g).reduce_to_cert());
            let rhs = self.target.action_of(g).reduce_to_cert().mul(&mc);
            let diff = lhs.sub(&rhs);
            for j in 0..diff.cols() {
                if !rel.contains(&diff.col(j)) {
                    return Err(Error::InvalidModule(format!(
                        "hom does not intertwine the action of generator {g}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Zero as a morphism (at certificate precision).
    pub fn is_cert_zero(&self) -> bool {
        let rel = self.target.rel_howell_cert();
        let mc = self.matrix.reduce_to_cert();
        (0..mc.cols()).all(|j| rel.contains(&mc.col(j)))
    }

    /// Equal as morphisms (at certificate precision).
    pub fn cert_eq(&self, other: &GHom) -> bool {
        self.sub(other).is_cert_zero()
    }

    pub fn direct_sum(&self, other: &GHom, source: &GModule, target: &GModule) -> GHom {
        GHom::new_unchecked(
            source.clone(),
            target.clone(),
            self.matrix.block_diag(&other.matrix),
        )
    }

    /// Attempt to invert: solve for a two-sided inverse modulo relations, at
    /// certificate precision (noisy presentations are only cert-accurate).
    pub fn try_inverse(&self) -> Option<GHom> {
        let cctx = self.source.ctx().cert();
        let q = cctx.modulus();
        let mc = self.matrix.reduce_to_cert();
        let rel = self.target.relations().reduce_to_cert();
        let stacked = mc.transpose().vstack(&rel.transpose());
        let solver = Solver::new(&stacked);
        let mut inv_matrix = PMatrix::zero(self.source.ctx(), self.source.ngens(), self.target.ngens());
        for j in 0..self.target.ngens() {
            let mut e = vec![0u64; self.target.ngens()];
            e[j] = 1;
            let x = solver.solve(&e)?;
            for i in 0..self.source.ngens() {
                inv_matrix.set(i, j, x[i] % q);
            }
        }
        let inv = GHom::new_unchecked(self.target.clone(), self.source.clone(), inv_matrix);
        let a = inv.compose(self);
        let b = self.compose(&inv);
        if a.cert_eq(&GHom::identity(&self.source)) && b.cert_eq(&GHom::identity(&self.target)) {
            Some(inv)
        } else {
            None
        }
    }
}

/// Solve F * X == B columnwise modulo the relation span of the module the
/// columns of F live in (`f_target`): for each column b of B, find x with
/// F x + R y = b (R = relations of f_target). Returns the matrix of x-columns.
pub fn solve_columns_mod_relations(
    f: &PMatrix,
    f_target: &GModule,
    b: &PMatrix,
) -> Option<PMatrix> {
    assert_eq!(f.rows(), f_target.ngens());
    assert_eq!(b.rows(), f_target.ngens());
    let ctx = f.ctx();
    let stacked = f.transpose().vstack(&f_target.relations().transpose());
    let solver = Solver::new(&stacked);
    let mut out = PMatrix::zero(ctx, f.cols(), b.cols());
    for j in 0..b.cols() {
        let x = solver.solve(&b.col(j))?;
        for i in 0..f.cols() {
            out.set(i, j, x[i]);
        }
    }
    Some(out)
}

/// As `solve_columns_mod_relations`, additionally allowing slack at the given
/// noise-floor exponent (for right-hand sides carrying solve-derived noise).
/// Floors at or above certificate precision never affect certificates; when
/// expressing through a non-saturated kernel inclusion the floor must be the
/// kernel's own depth so the solution ambiguity stays above the certificate
/// precision.
pub fn solve_columns_floored_at(
    f: &PMatrix,
    f_target: &GModule,
    b: &PMatrix,
    floor: u32,
) -> Option<PMatrix> {
    let ctx = f.ctx();
    let fl = ctx.pow_p(floor);
    let floor_rows = PMatrix::identity(ctx, f_target.ngens()).scale(fl);
    let stacked = f
        .transpose()
        .vstack(&f_target.relations().transpose())
        .vstack(&floor_rows);
    let solver = Solver::new(&stacked);
    let mut out = PMatrix::zero(ctx, f.cols(), b.cols());
    for j in 0..b.cols() {
        let x = solver.solve(&b.col(j))?;
        for i in 0..f.cols() {
            out.set(i, j, x[i]);
        }
    }
    Some(out)
}

/// Floored solve at certificate precision (morphism-level constructions).
pub fn solve_columns_floored(f: &PMatrix, f_target: &GModule, b: &PMatrix) -> Option<PMatrix> {
    solve_columns_floored_at(f, f_target, b, floor_exp(&f.ctx()))
}

/// Generating set of Hom_G(M, N): solved as the simultaneous kernel of the
/// relation-compatibility and intertwining conditions, then minimalized as a
/// Z_p-module modulo the zero homs (matrices with columns in the relation
/// span of N).
pub fn hom_equivariant(m: &GModule, n: &GModule) -> Result<Vec<GHom>> {
    assert_eq!(m.ctx(), n.ctx());
    let ctx = m.ctx();
    let (sn, tn) = (m.ngens(), n.ngens());
    if sn == 0 || tn == 0 {
        return Ok(vec![]);
    }
    // target relation columns; noisy presentations additionally get the noise
    // floor adjoined so their honest homs remain exact solutions
    let mut telcols: Vec<Vec<u64>> = (0..n.relations().cols())
        .map(|j| n.relations().col(j))
        .collect();
    if m.is_noisy() || n.is_noisy() {
        let fl = ctx.pow_p(m.depth().min(n.depth()));
        for i in 0..tn {
            let mut c = vec![0u64; tn];
            c[i] = fl;
            telcols.push(c);
        }
    }
    let nrel = telcols.len();
    let gens = m.group().generators();
    let srel = m.relations().cols();

    // unknown layout: vec(X) (tn*sn, X[i][j] at i*sn+j), then y-aux per source
    // relation (nrel each), then z-aux per generator (nrel * sn)
    let nx = tn * sn;
    let nunk = nx + srel * nrel + gens.len() * nrel * sn;
    let neq = tn * srel + gens.len() * tn * sn;
    let mut sys = PMatrix::zero(ctx, nunk, neq);
    let mut eq = 0usize;
    // (a) X * r_k - R y_k = 0 for each source relation column k
    for k in 0..srel {
        let rk = m.relations().col(k);
        for i in 0..tn {
            // sum_j X[i][j] rk[j] - sum_t R[i][t] y_k[t] = 0
            for j in 0..sn {
                if rk[j] != 0 {
                    let cur = sys.get(i * sn + j, eq);
                    sys.set(i * sn + j, eq, ctx.add(cur, rk[j]));
                }
            }
            for (t, c) in telcols.iter().enumerate() {
                if c[i] != 0 {
                    let row = nx + k * nrel + t;
                    let cur = sys.get(row, eq);
                    sys.set(row, eq, ctx.sub(cur, c[i]));
                }
            }
            eq += 1;
        }
    }
    // (b) X A_m(g) - A_n(g) X - R z_g = 0
    for (gi, &g) in gens.iter().enumerate() {
        let am = m.action_of(g);
        let an = n.action_of(g);
        for i in 0..tn {
            for j in 0..sn {
                // entry (i, j) of X am - an X
                for t in 0..sn {
                    let c = am.get(t, j);
                    if c != 0 {
                        let row = i * sn + t;
                        let cur = sys.get(row, eq);
                        sys.set(row, eq, ctx.add(cur, c));
                    }
                }
                for t in 0..tn {
                    let c = an.get(i, t);
                    if c != 0 {
                        let row = t * sn + j;
                        let cur = sys.get(row, eq);
                        sys.set(row, eq, ctx.sub(cur, c));
                    }
                }
                for (t, c) in telcols.iter().enumerate() {
                    if c[i] != 0 {
                        let row = nx + srel * nrel + gi * nrel * sn + t * sn + j;
                        let cur = sys.get(row, eq);
                        sys.set(row, eq, ctx.sub(cur, c[i]));
                    }
                }
                eq += 1;
            }
        }
    }
    debug_assert_eq!(eq, neq);
    let ker = kernel(&sys);
    // project to the X block
    let xcols: Vec<usize> = (0..nx).collect();
    let sols = ker.take_cols(&xcols);
    // zero homs: target relation columns placed in each X column slot
    let mut zrows: Vec<Vec<i64>> = Vec::new();
    for c in &telcols {
        for j in 0..sn {
            let mut v = vec![0i64; nx];
            for i in 0..tn {
                v[i * sn + j] = c[i] as i64;
            }
            zrows.push(v);
        }
    }
    let zero_span = if zrows.is_empty() {
        PMatrix::zero(ctx, 0, nx)
    } else {
        PMatrix::from_rows(ctx, &zrows)
    };
    let quot = FiniteQuotient::new_lenient(&sols, &zero_span)?;
    let zero_howell = crate::howell::howell(&zero_span);
    // truncation junk sits at or above work - guard once reduced mod the
    // zero homs; honest torsion classes never divide that deep
    let fl = ctx.pow_p(ctx.work() - ctx.torsion_guard());
    let mut out = Vec::new();
    for i in 0..quot.basis.rows() {
        // a representative divisible by the noise floor (modulo the zero homs)
        // is truncation junk, not an honest hom class
        let red = zero_howell.reduce(quot.basis.row(i));
        if red.iter().all(|&x| x % fl == 0) {
            continue;
        }
        let v = quot.basis.row(i);
        let mut mat = PMatrix::zero(ctx, tn, sn);
        for r in 0..tn {
            for c in 0..sn {
                mat.set(r, c, v[r * sn + c]);
            }
        }
        let h = GHom::new_unchecked(m.clone(), n.clone(), mat);
        debug_assert!(h.verify_cert().is_ok(), "hom generator fails certificate");
        out.push(h);
    }
    Ok(out)
}

/// Kernel of a morphism as a presented module with its inclusion. Saturated
/// kernels come out as honest lattices with exact action; otherwise the
/// presentation carries noise-floor relations.
pub fn kernel_hom(h: &GHom) -> Result<(GModule, GHom)> {
    let ctx = h.source().ctx();
    let src = h.source();
    let tgt = h.target();
    // augmented kernel: (x, y) with M x + R y = 0
    let stacked = h.matrix().transpose().vstack(&tgt.relations().transpose());
    let ker = kernel(&stacked);
    let xspan = ker.take_cols(&(0..src.ngens()).collect::<Vec<_>>());
    let basis = lattice_row_basis(&xspan)?;
    let k = basis.rows();
    let basis_exps = crate::smith::smith_exponents(&basis);
    let saturated = basis_exps.iter().all(|&e| e == 0);
    let clean = saturated && src.depth() == ctx.work() && tgt.depth() == ctx.work();
    // graded noise depth: one honest-torsion scale below the shallowest input
    let d_out = if clean {
        ctx.work()
    } else {
        let mut drop = basis_exps
            .iter()
            .copied()
            .filter(|&e| e < ctx.prec())
            .max()
            .unwrap_or(0)
            .max(1);
        for j in 0..tgt.relations().cols() {
            let col = tgt.relations().col(j);
            let mv = col
                .iter()
                .filter(|&&x| x != 0)
                .map(|&x| ctx.val(x))
                .min()
                .unwrap_or(ctx.work());
            if mv < ctx.prec() {
                drop = drop.max(mv);
            }
        }
        let d_in = ctx.work().min(src.depth()).min(tgt.depth());
        let d = d_in.saturating_sub(drop);
        if d < ctx.prec() {
            return Err(Error::PrecisionExhausted {
                exponent: d,
                guard: ctx.torsion_guard(),
                prec: ctx.prec(),
                stage: "kernel noise depth",
            });
        }
        d
    };
    // express g . (basis row) in the basis: solve z * basis = target row; for
    // non-saturated kernels the action leaks into truncation-junk directions,
    // which the graded noise floor absorbs
    let solver = if clean {
        Solver::new(&basis)
    } else {
        let floor_rows = PMatrix::identity(ctx, src.ngens()).scale(ctx.pow_p(d_out));
        Solver::new(&basis.vstack(&floor_rows))
    };
    let mut action = Vec::with_capacity(src.group().order());
    for g in src.group().elements() {
        let ag = src.action_of(g);
        let mut m = PMatrix::zero(ctx, k, k);
        for j in 0..k {
            let moved = ag.mul_vec(basis.row(j));
            let z = solver
                .solve(&moved)
                .ok_or(Error::LiftFailed("kernel action expression"))?;
            for i in 0..k {
                m.set(i, j, z[i]);
            }
        }
        action.push(m);
    }
    let relations = if clean {
        PMatrix::zero(ctx, k, 0)
    } else {
        let mut r = PMatrix::zero(ctx, k, k);
        for i in 0..k {
            r.set(i, i, ctx.pow_p(d_out));
        }
        r
    };
    let module = GModule(Arc::new(Inner {
        noisy: !clean,
        depth: d_out,
        ctx,
        group: src.group().clone(),
        ngens: k,
        relations,
        action,
    }));
    module.zp_structure()?;
    let inclusion = GHom::new_unchecked(module.clone(), src.clone(), basis.transpose());
    Ok((module, inclusion))
}

/// Cokernel: target generators with the image columns adjoined as relations.
pub fn cokernel_hom(h: &GHom) -> Result<(GModule, GHom)> {
    let tgt = h.target();
    let relations = tgt.relations().hstack(h.matrix());
    let module = GModule(Arc::new(Inner {
        noisy: tgt.is_noisy(),
        depth: tgt.depth(),
        ctx: tgt.ctx(),
        group: tgt.group().clone(),
        ngens: tgt.ngens(),
        relations,
        action: tgt.action().to_vec(),
    }));
    module.zp_structure()?;
    let projection = GHom::new_unchecked(
        tgt.clone(),
        module.clone(),
        PMatrix::identity(tgt.ctx(), tgt.ngens()),
    );
    Ok((module, projection))
}

/// Surjection from a free module along the Nakayama minimal generators.
pub fn cover_by_free(m: &GModule) -> (GModule, GHom) {
    cover_by_free_padded(m, 0)
}

/// Free cover with `extra` additional rank-one blocks mapping to zero.
pub fn cover_by_free_padded(m: &GModule, extra: usize) -> (GModule, GHom) {
    let ctx = m.ctx();
    let grp = m.group().clone();
    let sel = m.mingens_nakayama();
    let s = sel.len() + extra;
    let f = free_module(ctx, &grp, s);
    let og = grp.order();
    let mut mat = PMatrix::zero(ctx, m.ngens(), s * og);
    for (i, &gen_idx) in sel.iter().enumerate() {
        for g in grp.elements() {
            // column (i, g) = action(g) . e_{gen_idx}
            let col = m.action_of(g).col(gen_idx);
            for (r, &x) in col.iter().enumerate() {
                mat.set(r, i * og + g, x);
            }
        }
    }
    (f.clone(), GHom::new_unchecked(f, m.clone(), mat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic, direct_product, heisenberg, trivial};

    fn ctx() -> RingContext {
        RingContext::new(3, 16, 8).unwrap()
    }

    #[test]
    fn augmentation_ideal_of_c3() {
        let c = ctx();
        let g = cyclic(3).unwrap();
        let i = augmentation_ideal(c, &g);
        assert_eq!(i.ngens(), 2);
        i.verify().unwrap();
        // action of the generator on basis (g-1, g^2-1): columns (-1,1), (-1,0)
        let a = i.action_of(1);
        assert_eq!(a.get(0, 0), c.neg(1));
        assert_eq!(a.get(1, 0), 1);
        assert_eq!(a.get(0, 1), c.neg(1));
        assert_eq!(a.get(1, 1), 0);
        assert_eq!(a.trace(), c.neg(1));
        // trivial group: rank 0
        let t = trivial();
        assert_eq!(augmentation_ideal(c, &t).ngens(), 0);
    }

    #[test]
    fn free_module_traces() {
        let c = ctx();
        let g = cyclic(3).unwrap();
        let f = free_module(c, &g, 1);
        f.verify().unwrap();
        assert_eq!(f.trace_of(1), 0);
        assert_eq!(f.trace_of(2), 0);
        assert_eq!(f.trace_of(0), 3);
    }

    #[test]
    fn trace_is_class_function() {
        let c = ctx();
        let g = heisenberg(3).unwrap();
        let i = augmentation_ideal(c, &g);
        for x in g.elements() {
            for h in g.elements() {
                let conj = g.mul(g.mul(h, x), g.inv(h));
                assert_eq!(i.trace_of(conj), i.trace_of(x));
            }
        }
    }

    #[test]
    fn dual_lattice_involution_and_trace() {
        let c = ctx();
        let g = cyclic(3).unwrap();
        let i = augmentation_ideal(c, &g);
        let d = dual_lattice(&i).unwrap();
        d.verify().unwrap();
        let dd = dual_lattice(&d).unwrap();
        assert_eq!(dd, i);
        // dual of I has trace -1 at every g != 1
        assert_eq!(d.trace_of(1), c.neg(1));
        assert_eq!(d.trace_of(2), c.neg(1));
        // dual of free is free-shaped: permutation transpose
        let f = free_module(c, &g, 2);
        let df = dual_lattice(&f).unwrap();
        df.verify().unwrap();
        assert_eq!(df.trace_of(1), 0);
        // finite module is rejected
        let a = crate::amodule::FiniteAModule::trivial(c, g, vec![1]).unwrap();
        let am = module_from_amodule(&a);
        assert!(matches!(dual_lattice(&am), Err(Error::NotALattice)));
    }

    #[test]
    fn freeness_criterion() {
        let c = ctx();
        for g in [cyclic(3).unwrap(), cyclic(9).unwrap(), heisenberg(3).unwrap()] {
            let i = augmentation_ideal(c, &g);
            assert_eq!(check_rational_freeness(&i).unwrap(), (true, Some(1)));
            let f = free_module(c, &g, 1);
            assert_eq!(check_rational_freeness(&f).unwrap().0, false);
        }
        // I + free(2) over C3: s = 3
        let g = cyclic(3).unwrap();
        let i = augmentation_ideal(c, &g);
        let f2 = free_module(c, &g, 2);
        let (sum, _, _) = i.direct_sum(&f2);
        assert_eq!(check_rational_freeness(&sum).unwrap(), (true, Some(3)));
    }

    #[test]
    fn freeness_additivity_random() {
        let c = ctx();
        let g = direct_product(&cyclic(3).unwrap(), &cyclic(3).unwrap());
        let i = augmentation_ideal(c, &g);
        for k in 1..4usize {
            let f = free_module(c, &g, k);
            let (sum, _, _) = i.direct_sum(&f);
            let (ok, s) = check_rational_freeness(&sum).unwrap();
            assert!(ok);
            assert_eq!(s, Some(1 + k));
        }
    }

    #[test]
    fn mingens_of_augmentation_ideal() {
        let c = ctx();
        // I over C3 is generated by g-1 alone over Z_p[G]
        let g = cyclic(3).unwrap();
        let i = augmentation_ideal(c, &g);
        assert_eq!(i.mingens_nakayama(), vec![0]);
        // over C3 x C3: two generators
        let g2 = direct_product(&cyclic(3).unwrap(), &cyclic(3).unwrap());
        let i2 = augmentation_ideal(c, &g2);
        assert_eq!(i2.mingens_nakayama().len(), 2);
        // free module of rank 2: two generators
        let f = free_module(c, &g, 2);
        assert_eq!(f.mingens_nakayama().len(), 2);
    }

    #[test]
    fn hom_free_source_evaluation() {
        let c = ctx();
        let g = cyclic(3).unwrap();
        let f1 = free_module(c, &g, 1);
        let i = augmentation_ideal(c, &g);
        let homs = hom_equivariant(&f1, &i).unwrap();
        // Hom(Z_p[G], I) = I as Z_p-module: 2 generators
        assert_eq!(homs.len(), 2);
        for h in &homs {
            h.verify_cert().unwrap();
        }
        // Hom_G(I, I) = Z_p[zeta_3] has Z_p-rank 2, and the identity is an
        // equivariant endomorphism
        let endos = hom_equivariant(&i, &i).unwrap();
        assert_eq!(endos.len(), 2);
        GHom::new(i.clone(), i.clone(), PMatrix::identity(c, 2)).unwrap();
    }

    #[test]
    fn hom_trivial_source_fixed_points() {
        let c = ctx();
        let g = cyclic(3).unwrap();
        let t = trivial_module(c, &g);
        let i = augmentation_ideal(c, &g);
        // Hom(Z_p, I) = I^G, which is honestly zero for I over C3 (the fixed
        // space of I tensor Q_p vanishes): only truncation-boundary torsion
        // can appear, and it is filtered out of the generating set
        let homs = hom_equivariant(&t, &i).unwrap();
        assert!(homs.is_empty(), "no honest hom below the torsion guard");
        // oracle: the honest fixed sublattice is trivial because every
        // truncated fixed vector of the generator action is p-divisible
        let a = i.action_of(1);
        let m = a.sub(&PMatrix::identity(c, 2));
        let fixed = kernel(&m.transpose());
        for r in 0..fixed.rows() {
            let v = fixed.row(r);
            assert!(v.iter().all(|&x| x == 0 || !c.is_unit(x)));
        }
    }

    #[test]
    fn kernel_and_cokernel_basics() {
        let c = ctx();
        let g = cyclic(3).unwrap();
        let i = augmentation_ideal(c, &g);
        let id = GHom::identity(&i);
        let (k, _) = kernel_hom(&id).unwrap();
        assert!(k.is_zero_module());
        let z = GHom::zero(&i, &i);
        let (co, _) = cokernel_hom(&z).unwrap();
        assert_eq!(co.zp_structure().unwrap(), (2, vec![]));
        // cokernel of multiplication by 3 on free(1): order 3^{|G|}
        let f = free_module(c, &g, 1);
        let three = GHom::new_unchecked(f.clone(), f.clone(), PMatrix::identity(c, 3).scale(3));
        let (co3, _) = cokernel_hom(&three).unwrap();
        assert_eq!(co3.zp_structure().unwrap(), (0, vec![1, 1, 1]));
    }

    #[test]
    fn kernel_of_augmentation_map() {
        // kernel of Z_p[G] -> Z_p (all generators to 1) is I, rank |G| - 1
        let c = ctx();
        let g = cyclic(3).unwrap();
        let f = free_module(c, &g, 1);
        let t = trivial_module(c, &g);
        let mat = PMatrix::from_rows(c, &[vec![1, 1, 1]]);
        let aug = GHom::new(f, t, mat).unwrap();
        let (k, inc) = kernel_hom(&aug).unwrap();
        assert_eq!(k.zp_structure().unwrap(), (2, vec![]));
        assert!(k.is_lattice());
        assert!(k.relations().cols() == 0, "saturated kernel is a clean lattice");
        k.verify().unwrap();
        inc.verify_cert().unwrap();
    }

    #[test]
    fn smith_reduce_roundtrip() {
        let c = ctx();
        let g = cyclic(3).unwrap();
        let f = free_module(c, &g, 1);
        // present f with a redundant generator: x = y relation
        let mut rel = PMatrix::zero(c, 4, 1);
        rel.set(0, 0, 1);
        rel.set(3, 0, c.neg(1));
        // action: block f action on gens 0..3 with gen 3 tied to gen 0
        // simpler: take cokernel of a map to build a redundant presentation
        let embed_mat = {
            let mut m = PMatrix::zero(c, 4, 3);
            for i in 0..3 {
                m.set(i, i, 1);
            }
            m.set(3, 0, 1);
            m
        };
        // action on 4 gens: gen 3 behaves like gen 0 modulo the relation
        let mut action = Vec::new();
        for h in g.elements() {
            let a = f.action_of(h);
            let mut b = PMatrix::zero(c, 4, 4);
            for i in 0..3 {
                for j in 0..3 {
                    b.set(i, j, a.get(i, j));
                }
            }
            if h == 0 {
                b.set(3, 3, 1);
            } else {
                // column 3: image of gen3 = image of gen0 (equal mod relation)
                for i in 0..3 {
                    b.set(i, 3, a.get(i, 0));
                }
            }
            action.push(b);
        }
        let _ = embed_mat;
        let m = GModule::new(c, g, rel, action).unwrap();
        let (red, to_red, from_red) = m.smith_reduce().unwrap();
        assert_eq!(red.zp_structure().unwrap(), m.zp_structure().unwrap());
        let back = to_red.compose(&from_red);
        assert!(back.cert_eq(&GHom::identity(&red)));
        let fwd = from_red.compose(&to_red);
        assert!(fwd.cert_eq(&GHom::identity(&m)));
    }

    #[test]
    fn cover_by_free_is_surjective() {
        let c = ctx();
        let g = cyclic(3).unwrap();
        let i = augmentation_ideal(c, &g);
        let (f4, cover) = cover_by_free(&i);
        assert_eq!(f4.ngens(), 3);
        cover.verify_cert().unwrap();
        // surjective: the columns + relations span everything
        let span = howell_of(
            c,
            i.ngens(),
            &[&cover.matrix().transpose(), &i.relations().transpose()],
        );
        for k in 0..i.ngens() {
            let mut e = vec![0u64; i.ngens()];
            e[k] = 1;
            assert!(span.contains(&e));
        }
    }
}

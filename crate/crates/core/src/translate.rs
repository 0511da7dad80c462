//! The translation functor and the two-way bridge between group cohomology
//! and lattice extensions: a group extension 1 -> A -> big -> G -> 1 becomes
//! a module extension 0 -> A -> M -> I -> 0 of the augmentation ideal, with
//! M presented on the generators {gamma - 1} of the big augmentation ideal
//! modulo the relations (a gamma - 1) - (gamma - 1) - (a - 1).
//!
//! Ext^1(I, A) is computed through the fixed resolution 0 -> L -> F2 -> I -> 0
//! as Hom_G(L, A) modulo restrictions from F2; the comparison maps to and
//! from bar-resolution 2-cocycles are built by explicit lifts, using the
//! standard contracting homotopy of the normalized bar resolution.

use crate::amodule::FiniteAModule;
use crate::cocycle::{cocycle_check, Cocycle2};
use crate::error::{Error, Result};
use crate::exact::ExactSeq;
use crate::extension::{extension_group, GroupExtension};
use crate::gmodule::{
    augmentation_ideal, cover_by_free, free_module, hom_equivariant, kernel_hom,
    module_from_amodule, solve_columns_mod_relations, GHom, GModule,
};
use crate::group::Group;
use crate::howell::{howell, Solver};
use crate::matrix::PMatrix;
use crate::ring::RingContext;
use crate::smith::FiniteQuotient;
use rand::Rng;
use std::sync::Arc;

/// The augmentation resolution 0 -> L -> F2 -> I -> 0 with F2 free on the
/// group generators, e_i -> g_i - 1.
#[derive(Clone, Debug)]
pub struct AugmentationData {
    pub group: Arc<Group>,
    pub i_mod: GModule,
    pub f2: GModule,
    pub pi2: GHom,
    pub l_mod: GModule,
    pub incl_l: GHom,
}

pub fn augmentation_resolution(ctx: RingContext, group: &Arc<Group>) -> Result<AugmentationData> {
    let i_mod = augmentation_ideal(ctx, group);
    let gens = group.generators();
    let d = gens.len();
    let og = group.order();
    let f2 = free_module(ctx, group, d);
    let n_i = i_mod.ngens();
    let mut mat = PMatrix::zero(ctx, n_i, d * og);
    for (i, &gi) in gens.iter().enumerate() {
        for g in group.elements() {
            // column (i, g) = g . (g_i - 1) = (g g_i - 1) - (g - 1)
            let col = i * og + g;
            let ggi = group.mul(g, gi);
            if ggi != 0 {
                let cur = mat.get(ggi - 1, col);
                mat.set(ggi - 1, col, ctx.add(cur, 1));
            }
            if g != 0 {
                let cur = mat.get(g - 1, col);
                mat.set(g - 1, col, ctx.sub(cur, 1));
            }
        }
    }
    let pi2 = GHom::new_unchecked(f2.clone(), i_mod.clone(), mat);
    let (l_mod, incl_l) = kernel_hom(&pi2)?;
    Ok(AugmentationData {
        group: group.clone(),
        i_mod,
        f2,
        pi2,
        l_mod,
        incl_l,
    })
}

/// The translated module with its verified short exact sequence.
#[derive(Clone, Debug)]
pub struct Translation {
    pub m: GModule,
    pub a_gmod: GModule,
    pub i_mod: GModule,
    /// A -> M, a -> class of (a - 1)
    pub alpha: GHom,
    /// M -> I, (gamma - 1) -> (proj(gamma) - 1)
    pub beta: GHom,
    pub seq: ExactSeq,
}

/// Apply the translation functor to an extension; the sequence certificate is
/// computed by the caller via `exactness_check(&t.seq)`.
pub fn translate(e: &GroupExtension, size_budget: usize) -> Result<Translation> {
    let big = &e.big;
    let nbig = big.order();
    if nbig > size_budget {
        return Err(Error::SizeBudget {
            size: nbig,
            budget: size_budget,
        });
    }
    let ctx = e.amod.ctx();
    let base = &e.base;
    let ng = base.order();
    let n = nbig - 1; // generators (gamma - 1), gamma != 1
    let na = e.amod.size() as usize;

    // relations: (a gamma - 1) - (gamma - 1) - (a - 1), over all pairs (a,
    // gamma != 1); the redundancy is removed by Howell canonicalization
    let mut relations = PMatrix::zero(ctx, n, na * n);
    let mut colidx = 0;
    for ai in 0..na {
        let a_el = e.embed[ai];
        for gamma in 1..nbig {
            if a_el != 0 {
                let ag = big.mul(a_el, gamma);
                if ag != 0 {
                    let cur = relations.get(ag - 1, colidx);
                    relations.set(ag - 1, colidx, ctx.add(cur, 1));
                }
                let cur = relations.get(gamma - 1, colidx);
                relations.set(gamma - 1, colidx, ctx.sub(cur, 1));
                let cur = relations.get(a_el - 1, colidx);
                relations.set(a_el - 1, colidx, ctx.sub(cur, 1));
            }
            colidx += 1;
        }
    }
    let relations = howell(&relations.transpose()).mat.transpose();

    // action of g in G: left multiplication by the section lift
    let mut action = Vec::with_capacity(ng);
    for g in base.elements() {
        let s = e.section[g];
        let mut m = PMatrix::zero(ctx, n, n);
        for gamma in 1..nbig {
            let sg = big.mul(s, gamma);
            if sg != 0 {
                let cur = m.get(sg - 1, gamma - 1);
                m.set(sg - 1, gamma - 1, ctx.add(cur, 1));
            }
            if s != 0 {
                let cur = m.get(s - 1, gamma - 1);
                m.set(s - 1, gamma - 1, ctx.sub(cur, 1));
            }
        }
        action.push(m);
    }
    let m_mod = GModule::new(ctx, base.clone(), relations, action)?;

    // independence of the section lift: both lifts agree modulo the relations
    // on a sampled set of elements (generators, leading generators of M)
    if na > 1 {
        let rel_span = m_mod.rel_howell_work();
        let a_el = e.embed[1];
        for g in base.generators() {
            let s = big.mul(a_el, e.section[g]);
            for gamma in 1..nbig.min(28) {
                let mut diff = vec![0u64; n];
                let sg = big.mul(s, gamma);
                if sg != 0 {
                    diff[sg - 1] = ctx.add(diff[sg - 1], 1);
                }
                if s != 0 {
                    diff[s - 1] = ctx.sub(diff[s - 1], 1);
                }
                let col = m_mod.action_of(g).col(gamma - 1);
                for (d, &c) in diff.iter_mut().zip(&col) {
                    *d = ctx.sub(*d, c);
                }
                if !rel_span.contains(&diff) {
                    return Err(Error::InvalidModule(
                        "translated action depends on the section lift".into(),
                    ));
                }
            }
        }
    }

    let a_gmod = module_from_amodule(&e.amod);
    let i_mod = augmentation_ideal(ctx, base);

    // alpha: A -> M, generator j -> (embed(gen_j) - 1)
    let mut amat = PMatrix::zero(ctx, n, a_gmod.ngens());
    for j in 0..a_gmod.ngens() {
        let mut v = e.amod.zero_elem();
        v[j] = 1;
        let el = e.embed[e.amod.index_of(&v)];
        debug_assert_ne!(el, 0);
        amat.set(el - 1, j, 1);
    }
    let alpha = GHom::new_unchecked(a_gmod.clone(), m_mod.clone(), amat);

    // beta: M -> I, (gamma - 1) -> (proj(gamma) - 1)
    let mut bmat = PMatrix::zero(ctx, i_mod.ngens(), n);
    for gamma in 1..nbig {
        let pg = e.proj[gamma];
        if pg != 0 {
            bmat.set(pg - 1, gamma - 1, 1);
        }
    }
    let beta = GHom::new_unchecked(m_mod.clone(), i_mod.clone(), bmat);

    let ctxg = ctx;
    let zl = GModule::zero(ctxg, base.clone());
    let zr = GModule::zero(ctxg, base.clone());
    let seq = ExactSeq::new(
        vec![zl.clone(), a_gmod.clone(), m_mod.clone(), i_mod.clone(), zr.clone()],
        vec![
            GHom::zero(&zl, &a_gmod),
            alpha.clone(),
            beta.clone(),
            GHom::zero(&i_mod, &zr),
        ],
    );
    Ok(Translation {
        m: m_mod,
        a_gmod,
        i_mod,
        alpha,
        beta,
        seq,
    })
}

/// An element of Ext^1(I, A): a hom L -> A, stored as its canonical residue
/// modulo restrictions from F2 and the zero homs, at certificate precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtClass {
    pub rep: PMatrix,
}

impl ExtClass {
    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }
}

/// Explicit generators of Hom_G(F2, A): block i, A-generator j gives the map
/// sending the i-th free generator to a_j, extended equivariantly.
pub(crate) fn hom_f2_to_a_generators(aug: &AugmentationData, amod: &FiniteAModule) -> Vec<PMatrix> {
    let ctx = amod.ctx();
    let d = aug.group.generators().len();
    let og = aug.group.order();
    let r = amod.rank();
    let mut out = Vec::new();
    for i in 0..d {
        for j in 0..r {
            let mut m = PMatrix::zero(ctx, r, d * og);
            for g in aug.group.elements() {
                let mut v = amod.zero_elem();
                v[j] = 1;
                let gv = amod.act(g, &v);
                for (row, &x) in gv.iter().enumerate() {
                    m.set(row, i * og + g, x);
                }
            }
            out.push(m);
        }
    }
    out
}

/// The span to reduce Ext representatives by: restrictions of Hom(F2, A)
/// along L -> F2, and the zero homs p^{e_i} E_{ij}; rows are vectorized
/// (A-rank x L-rank) matrices at certificate precision.
fn ext_reduction_span(aug: &AugmentationData, amod: &FiniteAModule) -> PMatrix {
    let cctx = amod.ctx().cert();
    let r = amod.rank();
    let nl = aug.l_mod.ngens();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for chi in hom_f2_to_a_generators(aug, amod) {
        let restricted = chi.mul(aug.incl_l.matrix());
        let rc = restricted.reduce_to_cert();
        rows.push(
            (0..r * nl)
                .map(|k| rc.get(k / nl, k % nl) as i64)
                .collect(),
        );
    }
    for i in 0..r {
        let q = amod.ctx().pow_p(amod.exponents()[i]);
        for j in 0..nl {
            let mut v = vec![0i64; r * nl];
            v[i * nl + j] = q as i64;
            rows.push(v);
        }
    }
    if rows.is_empty() {
        PMatrix::zero(cctx, 0, r * nl)
    } else {
        PMatrix::from_rows(cctx, &rows)
    }
}

fn canonical_ext_class(
    aug: &AugmentationData,
    amod: &FiniteAModule,
    lambda: &PMatrix,
) -> ExtClass {
    let r = amod.rank();
    let nl = aug.l_mod.ngens();
    let span = howell(&ext_reduction_span(aug, amod));
    let lc = lambda.reduce_to_cert();
    let vec: Vec<u64> = (0..r * nl).map(|k| lc.get(k / nl, k % nl)).collect();
    let red = span.reduce(&vec);
    let mut rep = PMatrix::zero(lc.ctx(), r, nl);
    for k in 0..r * nl {
        rep.set(k / nl, k % nl, red[k]);
    }
    ExtClass { rep }
}

/// Ext class of a short exact sequence 0 -> A -> B -> I -> 0: lift the
/// surjection F2 -> I through B, restrict to L, express through A.
pub fn ext1_class(
    aug: &AugmentationData,
    amod: &FiniteAModule,
    alpha: &GHom,
    beta: &GHom,
) -> Result<ExtClass> {
    let ctx = beta.source().ctx();
    let b_mod = beta.source();
    let og = aug.group.order();
    let d = aug.group.generators().len();
    // lift each free generator: solve beta(x_i) = pi2(e_{i, 1})
    let mut idcols = PMatrix::zero(ctx, aug.i_mod.ngens(), d);
    for i in 0..d {
        for (row, &x) in aug.pi2.matrix().col(i * og).iter().enumerate() {
            idcols.set(row, i, x);
        }
    }
    let x = solve_columns_mod_relations(beta.matrix(), &aug.i_mod, &idcols)
        .ok_or(Error::LiftFailed("ext1_class: lifting F2 through B"))?;
    // equivariant extension: phi column (i, g) = action_B(g) . x_i
    let mut phi = PMatrix::zero(ctx, b_mod.ngens(), d * og);
    for i in 0..d {
        let xi = x.col(i);
        for g in aug.group.elements() {
            let gx = b_mod.action_of(g).mul_vec(&xi);
            for (row, &v) in gx.iter().enumerate() {
                phi.set(row, i * og + g, v);
            }
        }
    }
    // restrict to L and express through alpha
    let psi = phi.mul(aug.incl_l.matrix());
    let lambda = solve_columns_mod_relations(alpha.matrix(), b_mod, &psi)
        .ok_or(Error::LiftFailed("ext1_class: expressing through A"))?;
    Ok(canonical_ext_class(aug, amod, &lambda))
}

/// Transport a 2-cocycle to an Ext class through the chain comparison from
/// the bar resolution, using the explicit contracting homotopy
/// h1(g . [h]) = [g|h] of the normalized bar resolution.
pub fn h2_to_ext1(
    aug: &AugmentationData,
    amod: &FiniteAModule,
    c: &Cocycle2,
) -> Result<ExtClass> {
    cocycle_check(amod, c)?;
    let ctx = amod.ctx();
    let grp = &aug.group;
    let og = grp.order();
    let r = amod.rank();
    let nl = aug.l_mod.ngens();
    if r == 0 || nl == 0 {
        return Ok(ExtClass {
            rep: PMatrix::zero(ctx.cert(), r, nl),
        });
    }
    // free cover of L along Nakayama generators
    let (_, q) = cover_by_free(&aug.l_mod);
    let sel: Vec<usize> = {
        // recover generator indices: columns at the identity slot are unit vectors
        aug.l_mod.mingens_nakayama()
    };
    let ncov = sel.len();
    // mu column for each cover block m: chi(h1(sigma1(iota(e_sel_m))))
    // iota(e_j) in F2-coords; sigma1: F2-coord (i, g) -> B1 basis g . [g_i];
    // h1: g . [h] -> [g|h] (zero when g = 1); chi(g . [a|b]) = g . c(a, b).
    let gens = grp.generators();
    let mut mu0: Vec<Vec<u64>> = Vec::with_capacity(ncov);
    for &j in &sel {
        let w = aug.incl_l.matrix().col(j); // F2-coords of the L-generator
        let mut acc = amod.zero_elem();
        for (col, &coef) in w.iter().enumerate() {
            if coef == 0 {
                continue;
            }
            let i = col / og;
            let g = col % og;
            // sigma1 sends this to coef * (g . [g_i]); h1 kills g = 1
            if g == 0 {
                continue;
            }
            // h1(g . [g_i]) = [g | g_i]: chi evaluates to c(g, g_i)
            let val = c.get(g, gens[i]);
            let contrib = amod.scale_elem(coef, val);
            acc = amod.add_elem(&acc, &contrib);
        }
        mu0.push(acc);
    }
    // mu matrix on the cover: column (m, g) = g . mu0[m]
    let mut mu = PMatrix::zero(ctx, r, ncov * og);
    for (m, v) in mu0.iter().enumerate() {
        for g in grp.elements() {
            let gv = amod.act(g, v);
            for (row, &x) in gv.iter().enumerate() {
                mu.set(row, m * og + g, x);
            }
        }
    }
    // factor through the cover: lambda(e_j) = mu(z_j), q z_j = e_j
    let z = solve_columns_mod_relations(q.matrix(), &aug.l_mod, &PMatrix::identity(ctx, nl))
        .ok_or(Error::LiftFailed("h2_to_ext1: cover preimages"))?;
    let lambda = mu.mul(&z);
    Ok(canonical_ext_class(aug, amod, &lambda))
}

/// Transport an Ext class back to a 2-cocycle: lift the bar generators
/// through pi2, push their defects into L, and evaluate the hom.
pub fn ext1_to_h2(
    aug: &AugmentationData,
    amod: &FiniteAModule,
    x: &ExtClass,
) -> Result<Cocycle2> {
    let ctx = amod.ctx();
    let grp = &aug.group;
    let og = grp.order();
    if amod.rank() == 0 || og == 1 {
        return Ok(Cocycle2::zero(amod));
    }
    // x_g in F2 with pi2(x_g) = (g - 1); x_1 = 0
    let n_i = aug.i_mod.ngens();
    let mut b = PMatrix::zero(ctx, n_i, og);
    for g in 1..og {
        b.set(g - 1, g, 1);
    }
    let xg = solve_columns_mod_relations(aug.pi2.matrix(), &aug.i_mod, &b)
        .ok_or(Error::LiftFailed("ext1_to_h2: lifting bar generators"))?;
    // w_{g,h} = g . x_h - x_{gh} + x_g lies in L; express in the L basis
    let nf = aug.f2.ngens();
    let mut wcols = PMatrix::zero(ctx, nf, og * og);
    for g in grp.elements() {
        let ag = aug.f2.action_of(g);
        for h in grp.elements() {
            let gh = grp.mul(g, h);
            let mut w = ag.mul_vec(&xg.col(h));
            let xgh = xg.col(gh);
            let xgg = xg.col(g);
            for i in 0..nf {
                w[i] = ctx.add(ctx.sub(w[i], xgh[i]), xgg[i]);
            }
            for (row, &v) in w.iter().enumerate() {
                wcols.set(row, g * og + h, v);
            }
        }
    }
    let z = solve_columns_mod_relations(aug.incl_l.matrix(), &aug.f2, &wcols)
        .ok_or(Error::LiftFailed("ext1_to_h2: defect not in L"))?;
    let vals = x.rep.with_ctx(ctx).mul(&z);
    let c = Cocycle2::from_fn(amod, |g, h| vals.col(g * og + h));
    cocycle_check(amod, &c).map_err(|_| Error::LiftFailed("ext1_to_h2: transported cochain"))?;
    Ok(c)
}

/// Build the extension realizing a cohomology class.
pub fn extension_from_class(
    group: &Arc<Group>,
    amod: &FiniteAModule,
    c: &Cocycle2,
) -> Result<GroupExtension> {
    extension_group(group, amod, c)
}

/// The structure of Ext^1(I, A) = Hom_G(L, A)/restrictions as a finite
/// abelian p-group, with basis classes and their cocycle transports. This is
/// the Ext-side route to H^2, cheap even for larger groups.
pub struct ExtGroup {
    pub orders: Vec<u64>,
    pub basis: Vec<ExtClass>,
    pub basis_cocycles: Vec<Cocycle2>,
}

pub fn ext_group(aug: &AugmentationData, amod: &FiniteAModule) -> Result<ExtGroup> {
    let ctx = amod.ctx();
    let r = amod.rank();
    let nl = aug.l_mod.ngens();
    if r == 0 || nl == 0 {
        return Ok(ExtGroup {
            orders: vec![],
            basis: vec![],
            basis_cocycles: vec![],
        });
    }
    let a_gmod = module_from_amodule(amod);
    let homs = hom_equivariant(&aug.l_mod, &a_gmod)?;
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for h in &homs {
        rows.push(
            (0..r * nl)
                .map(|k| h.matrix().get(k / nl, k % nl) as i64)
                .collect(),
        );
    }
    let span = if rows.is_empty() {
        PMatrix::zero(ctx, 0, r * nl)
    } else {
        PMatrix::from_rows(ctx, &rows)
    };
    // subtract restrictions and zero homs (at working precision)
    let mut sub_rows: Vec<Vec<i64>> = Vec::new();
    for chi in hom_f2_to_a_generators(aug, amod) {
        let restricted = chi.mul(aug.incl_l.matrix());
        sub_rows.push(
            (0..r * nl)
                .map(|k| restricted.get(k / nl, k % nl) as i64)
                .collect(),
        );
    }
    for i in 0..r {
        let q = ctx.pow_p(amod.exponents()[i]);
        for j in 0..nl {
            let mut v = vec![0i64; r * nl];
            v[i * nl + j] = q as i64;
            sub_rows.push(v);
        }
    }
    let sub = PMatrix::from_rows(ctx, &sub_rows);
    let quot = FiniteQuotient::new_lenient(&span, &sub)?;
    let sub_howell = howell(&sub);
    let fl = ctx.pow_p(ctx.work() - ctx.torsion_guard());
    let mut orders = Vec::new();
    let mut basis = Vec::new();
    let mut basis_cocycles = Vec::new();
    for (i, &e) in quot.exponents.iter().enumerate() {
        let red = sub_howell.reduce(quot.basis.row(i));
        if red.iter().all(|&x| x % fl == 0) {
            continue; // truncation junk
        }
        let o = ctx.pow_p(e.min(amod.max_exponent()));
        if o <= 1 {
            continue;
        }
        let mut lambda = PMatrix::zero(ctx, r, nl);
        for k in 0..r * nl {
            lambda.set(k / nl, k % nl, quot.basis.row(i)[k]);
        }
        let cls = canonical_ext_class(aug, amod, &lambda);
        if cls.is_zero() {
            continue;
        }
        let coc = ext1_to_h2(aug, amod, &cls)?;
        orders.push(o);
        basis.push(cls);
        basis_cocycles.push(coc);
    }
    Ok(ExtGroup {
        orders,
        basis,
        basis_cocycles,
    })
}

impl ExtGroup {
    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Random valid cocycle: random basis combination plus a random coboundary.
    pub fn random_cocycle(
        &self,
        amod: &FiniteAModule,
        rng: &mut impl Rng,
    ) -> Cocycle2 {
        let mut c = Cocycle2::zero(amod);
        for (b, &o) in self.basis_cocycles.iter().zip(&self.orders) {
            let k = rng.gen_range(0..o);
            c = c.add(amod, &b.scale(amod, k));
        }
        let n = amod.group().order();
        let mut f = vec![amod.zero_elem(); n];
        for fg in f.iter_mut().skip(1) {
            for (i, &e) in amod.exponents().iter().enumerate() {
                fg[i] = rng.gen_range(0..amod.ctx().pow_p(e));
            }
        }
        c.add(amod, &crate::cocycle::coboundary1(amod, &f))
    }
}

/// Solve for a retraction r: M -> A with r . alpha = id_A; exists iff the
/// translated sequence splits.
pub fn find_retraction(t: &Translation) -> Option<GHom> {
    let ctx = t.m.ctx();
    let r = t.a_gmod.ngens();
    if r == 0 {
        return Some(GHom::zero(&t.m, &t.a_gmod));
    }
    // unknown R (r x nM) with R alpha = id mod A-relations and equivariance;
    // solve via hom_equivariant and a linear search over combinations is
    // overkill: set up the direct linear system instead.
    let homs = hom_equivariant(&t.m, &t.a_gmod).ok()?;
    if homs.is_empty() {
        return None;
    }
    // find a combination with (sum c_i h_i) . alpha = id: linear in c_i
    let cols = r * r;
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for h in &homs {
        let comp = h.matrix().mul(t.alpha.matrix());
        rows.push((0..cols).map(|k| comp.get(k / r, k % r) as i64).collect());
    }
    // allow adjustment by A-relations
    for i in 0..r {
        let q = ctx.pow_p(t.a_gmod.ctx().val(t.a_gmod.relations().get(i, i)));
        for j in 0..r {
            let mut v = vec![0i64; cols];
            v[i * r + j] = q as i64;
            rows.push(v);
        }
    }
    let span = PMatrix::from_rows(ctx, &rows);
    let target: Vec<u64> = (0..cols).map(|k| u64::from(k / r == k % r)).collect();
    let sol = crate::howell::solve(&span, &target)?;
    let mut mat = PMatrix::zero(ctx, r, t.m.ngens());
    for (i, h) in homs.iter().enumerate() {
        if sol[i] != 0 {
            mat = mat.add(&h.matrix().scale(sol[i]));
        }
    }
    let ret = GHom::new_unchecked(t.m.clone(), t.a_gmod.clone(), mat);
    let comp = ret.compose(&t.alpha);
    if comp.cert_eq(&GHom::identity(&t.a_gmod)) {
        Some(ret)
    } else {
        None
    }
}

/// Solver bundle reused by tests: Howell form of a module's relation span.
pub fn relation_solver(m: &GModule) -> Solver {
    Solver::new(&m.relations().transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amodule::FiniteAModule;
    use crate::exact::exactness_check;
    use crate::cohomology::h2;
    use crate::extension::quotient_with_cocycle;
    use crate::group::{cyclic, trivial};
    use rand::SeedableRng;

    fn ctx() -> RingContext {
        RingContext::new(3, 16, 8).unwrap()
    }

    fn c9_over_c3(c: RingContext) -> GroupExtension {
        let c9 = cyclic(9).unwrap();
        let sub = c9.closure(&[3]);
        quotient_with_cocycle(c, &c9, &sub).unwrap()
    }

    #[test]
    fn translate_c9_structure() {
        let c = ctx();
        let e = c9_over_c3(c);
        let t = translate(&e, 729).unwrap();
        // Z_p-structure: free rank 2 plus Z/3 torsion
        assert_eq!(t.m.zp_structure().unwrap(), (2, vec![1]));
        let cert = exactness_check(&t.seq);
        assert!(cert.pass, "{cert:?}");
    }

    /// Independent oracle: naive integer Smith normal form over i128 of the
    /// 8-generator translated presentation of the C9/C3 extension.
    #[test]
    fn translate_c9_matches_naive_integer_smith() {
        let c = ctx();
        let e = c9_over_c3(c);
        let t = translate(&e, 729).unwrap();
        let rel = t.m.relations();
        let mut m: Vec<Vec<i128>> = (0..rel.rows())
            .map(|i| (0..rel.cols()).map(|j| c.balanced(rel.get(i, j)) as i128).collect())
            .collect();
        let exps = naive_integer_smith(&mut m);
        let torsion: Vec<i128> = exps.iter().copied().filter(|&d| d > 1).collect();
        assert_eq!(torsion, vec![3]);
        let rank = rel.rows() - exps.len();
        assert_eq!(rank, 2);
    }

    fn naive_integer_smith(m: &mut Vec<Vec<i128>>) -> Vec<i128> {
        // returns the nonzero invariant factors
        let rows = m.len();
        if rows == 0 {
            return vec![];
        }
        let cols = m[0].len();
        let mut out = Vec::new();
        let mut top = 0usize;
        while top < rows.min(cols) {
            // find minimal nonzero |entry|
            let mut best: Option<(i128, usize, usize)> = None;
            for i in top..rows {
                for j in top..cols {
                    let v = m[i][j].abs();
                    if v != 0 && best.map_or(true, |(b, _, _)| v < b) {
                        best = Some((v, i, j));
                    }
                }
            }
            let Some((_, bi, bj)) = best else { break };
            m.swap(top, bi);
            for row in m.iter_mut() {
                row.swap(top, bj);
            }
            let mut dirty = false;
            let pivot = m[top][top];
            for i in (top + 1)..rows {
                let q = m[i][top] / pivot;
                if q != 0 {
                    for j in top..cols {
                        m[i][j] -= q * m[top][j];
                    }
                }
                if m[i][top] != 0 {
                    dirty = true;
                }
            }
            for j in (top + 1)..cols {
                let q = m[top][j] / pivot;
                if q != 0 {
                    for i in top..rows {
                        m[i][j] -= q * m[i][top];
                    }
                }
                if m[top][j] != 0 {
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            out.push(pivot.abs());
            top += 1;
        }
        out.retain(|&x| x != 0);
        out.sort_unstable();
        out
    }

    #[test]
    fn translate_trivial_a_gives_augmentation_ideal() {
        let c = ctx();
        let g = cyclic(3).unwrap();
        let a = FiniteAModule::zero(c, g.clone());
        let coc = Cocycle2::zero(&a);
        let e = extension_group(&g, &a, &coc).unwrap();
        let t = translate(&e, 729).unwrap();
        assert_eq!(t.m.zp_structure().unwrap(), (2, vec![]));
        // beta: M -> I is an isomorphism here
        let inv = t.beta.try_inverse();
        assert!(inv.is_some());
        let cert = exactness_check(&t.seq);
        assert!(cert.pass);
    }

    #[test]
    fn translate_trivial_group_gives_a() {
        let c = ctx();
        let g = trivial();
        let a = FiniteAModule::trivial(c, g.clone(), vec![2]).unwrap();
        let e = extension_group(&g, &a, &Cocycle2::zero(&a)).unwrap();
        let t = translate(&e, 729).unwrap();
        assert_eq!(t.m.zp_structure().unwrap(), (0, vec![2]));
        let cert = exactness_check(&t.seq);
        assert!(cert.pass, "{cert:?}");
    }

    #[test]
    fn split_extension_has_zero_class_and_retraction() {
        let c = ctx();
        let g = cyclic(3).unwrap();
        let a = FiniteAModule::trivial(c, g.clone(), vec![1]).unwrap();
        let e = extension_group(&g, &a, &Cocycle2::zero(&a)).unwrap();
        let t = translate(&e, 729).unwrap();
        let aug = augmentation_resolution(c, &g).unwrap();
        let cls = ext1_class(&aug, &a, &t.alpha, &t.beta).unwrap();
        assert!(cls.is_zero());
        assert!(find_retraction(&t).is_some());
    }

    #[test]
    fn nonsplit_extension_has_nonzero_class() {
        let c = ctx();
        let e = c9_over_c3(c);
        let t = translate(&e, 729).unwrap();
        let aug = augmentation_resolution(c, &e.base).unwrap();
        let cls = ext1_class(&aug, &e.amod, &t.alpha, &t.beta).unwrap();
        assert!(!cls.is_zero());
        assert!(find_retraction(&t).is_none());
    }

    #[test]
    fn realization_bridge_agrees() {
        // ext1_class(translate(eps)) == h2_to_ext1(cocycle of eps)
        let c = ctx();
        let g = cyclic(3).unwrap();
        let a = FiniteAModule::trivial(c, g.clone(), vec![1]).unwrap();
        let aug = augmentation_resolution(c, &g).unwrap();
        let hh = h2(&g, &a).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..6 {
            let coc = hh.random_cocycle(&mut rng);
            let e = extension_group(&g, &a, &coc).unwrap();
            let t = translate(&e, 729).unwrap();
            let via_seq = ext1_class(&aug, &a, &t.alpha, &t.beta).unwrap();
            let via_chain = h2_to_ext1(&aug, &a, &e.cocycle).unwrap();
            assert_eq!(via_seq, via_chain);
        }
    }

    #[test]
    fn bridge_round_trips_are_identity_on_classes() {
        let c = ctx();
        let g = cyclic(3).unwrap();
        let a = FiniteAModule::trivial(c, g.clone(), vec![1]).unwrap();
        let aug = augmentation_resolution(c, &g).unwrap();
        let hh = h2(&g, &a).unwrap();
        // every class of H^2(C3, Z/3): 3 classes
        for k in 0..3u64 {
            let coc = hh.from_coords(&[k]);
            let x = h2_to_ext1(&aug, &a, &coc).unwrap();
            let back = ext1_to_h2(&aug, &a, &x).unwrap();
            assert!(hh.classes_equal(&coc, &back));
            // and the other direction
            let x2 = h2_to_ext1(&aug, &a, &back).unwrap();
            assert_eq!(x, x2);
        }
    }

    #[test]
    fn ext_group_matches_h2_order() {
        let c = ctx();
        let g = cyclic(3).unwrap();
        let a = FiniteAModule::trivial(c, g.clone(), vec![1]).unwrap();
        let aug = augmentation_resolution(c, &g).unwrap();
        let eg = ext_group(&aug, &a).unwrap();
        assert_eq!(eg.order(), 3);
        let hh = h2(&g, &a).unwrap();
        assert_eq!(hh.order(), eg.order());
    }

    #[test]
    fn baer_sum_additivity() {
        // ext1_class is additive: class(c1 + c2) = class(c1) + class(c2)
        // checked through the cocycle route (the Baer sum of pulled-back
        // sequences corresponds to cocycle addition)
        let c = ctx();
        let g = cyclic(3).unwrap();
        let a = FiniteAModule::trivial(c, g.clone(), vec![1]).unwrap();
        let aug = augmentation_resolution(c, &g).unwrap();
        let hh = h2(&g, &a).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let c1 = hh.random_cocycle(&mut rng);
            let c2 = hh.random_cocycle(&mut rng);
            let sum = c1.add(&a, &c2);
            let x1 = h2_to_ext1(&aug, &a, &c1).unwrap();
            let x2 = h2_to_ext1(&aug, &a, &c2).unwrap();
            let xs = h2_to_ext1(&aug, &a, &sum).unwrap();
            let lam = x1.rep.add(&x2.rep);
            let resummed = canonical_ext_class(&aug, &a, &lam.with_ctx(c));
            assert_eq!(xs, resummed);
        }
    }
}

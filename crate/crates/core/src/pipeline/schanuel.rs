//! Constructive Schanuel isomorphism for four-term sequences with free middle
//! terms sharing their end module, and free cancellation over the local group
//! ring.

use crate::error::{Error, Result};
use crate::exact::SplitFourTerm;
use crate::gmodule::{
    free_module, hom_equivariant, kernel_hom, solve_columns_floored_at, GHom, GModule,
};
use crate::matrix::PMatrix;

/// The assembled isomorphism X2 + P1 + Q1 -> X1 + P2 + Q2 for sequences
/// s1 = (X1, P1, Q1, B), s2 = (X2, P2, Q2, B), with the direct-sum block
/// structure recorded for the cancellation loop.
pub struct SchanuelData {
    pub iso: GHom,
    /// left side: X2, then rank-one free blocks of P1 and Q2... (see assemble)
    pub left_parts: Vec<GModule>,
    pub right_parts: Vec<GModule>,
    pub left_sum: GModule,
    pub right_sum: GModule,
}

/// Split a free module of rank s into s rank-one blocks.
fn free_blocks(m: &GModule) -> Vec<GModule> {
    let og = m.group().order();
    let s = m.ngens() / og.max(1);
    (0..s)
        .map(|_| free_module(m.ctx(), m.group(), 1))
        .collect()
}

fn sum_of(parts: &[GModule]) -> GModule {
    let mut it = parts.iter();
    let mut acc = it.next().expect("nonempty").clone();
    for p in it {
        acc = acc.direct_sum(p).0;
    }
    acc
}

/// Build the explicit Schanuel isomorphism
/// X2 + P1 + Q1  ~  X1 + P2 + Q2
/// (for the theorem instance: E + F1 + F4 ~ C + F3 + F2),
/// from the two certified split sequences sharing B.
pub fn schanuel_iso(sp1: &SplitFourTerm, sp2: &SplitFourTerm) -> Result<SchanuelData> {
    let s1 = &sp1.seq;
    let s2 = &sp2.seq;
    let ctx = s1.x().ctx();
    if !sp1.cert.pass || !sp2.cert.pass {
        return Err(Error::NotExact {
            junction: 0,
            reason: "schanuel inputs failed their four-term certificates".into(),
        });
    }
    let (y1, psi1, iota1) = (&sp1.y, &sp1.psi, &sp1.iota);
    let (y2, psi2, iota2) = (&sp2.y, &sp2.psi, &sp2.iota);
    // accuracy bookkeeping: each solve stage absorbs noise at its floor and
    // erodes the accuracy by at most the largest torsion pivot among the
    // image inclusions, so the floors decrease strictly stage by stage
    let max_val = |m: &PMatrix| -> u32 {
        crate::smith::smith_exponents(m)
            .into_iter()
            .filter(|&e| e < ctx.prec())
            .max()
            .unwrap_or(0)
    };
    let vmax = max_val(iota1.matrix())
        .max(max_val(iota2.matrix()))
        .max(max_val(sp1.seq.map_x().matrix()))
        .max(1);
    let acc0 = y1
        .depth()
        .min(y2.depth())
        .min(sp1.seq.x().depth())
        .min(sp2.seq.x().depth());
    let f_lift = acc0; // sigma, tau, hat2
    let f_section = acc0.saturating_sub(vmax); // s_CE, s_EC
    let f_expr = acc0.saturating_sub(2 * vmax); // hat_c
    let acc_final = acc0.saturating_sub(3 * vmax);
    if acc_final < ctx.prec() {
        return Err(Error::PrecisionExhausted {
            exponent: acc_final,
            guard: ctx.torsion_guard(),
            prec: ctx.prec(),
            stage: "schanuel accuracy budget",
        });
    }

    // sigma: Q1 -> Q2 with piQ2 . sigma = piQ1, tau the other way
    let sigma = lift_between_frees(s1.map_q(), s2.map_q(), f_lift)?;
    let tau = lift_between_frees(s2.map_q(), s1.map_q(), f_lift)?;

    // omega: Y1 + Q2 -> Y2 + Q1 ... careful with orientation; we need the
    // middle identification Y1 + Q2 ~ Y2 + Q1 realized both ways:
    //   omega(y1, q2) = (hat2(q2' - sigma q1'), q1') with q1' = iota1 y1 + tau q2
    // where hat2 expresses kernel elements of piQ2 in Y2.
    let q1p_from = |mats: (&PMatrix, &PMatrix)| -> PMatrix {
        // columns [iota1 | tau]: map Y1 + Q2 -> Q1
        mats.0.hstack(mats.1)
    };
    let to_q1 = q1p_from((iota1.matrix(), tau.matrix()));
    // defect into ker piQ2: q2-part minus sigma . q1'
    let n_q2 = s2.q().ngens();
    let n_q1 = s1.q().ngens();
    let top_in = {
        // matrix (Q2-coords) of (y1, q2) -> q2 - sigma(iota1 y1 + tau q2)
        let left = sigma.matrix().mul(iota1.matrix()).neg();
        let right = PMatrix::identity(ctx, n_q2).sub(&sigma.matrix().mul(tau.matrix()));
        left.hstack(&right)
    };
    let hat2 = solve_columns_floored_at(iota2.matrix(), s2.q(), &top_in, f_lift)
        .ok_or(Error::LiftFailed("schanuel: defect not in Y2"))?;
    let omega_mat = hat2.vstack(&to_q1);
    // omega: Y1 + Q2 -> Y2 + Q1
    let (y1q2, _, _) = y1.direct_sum(s2.q());
    let (y2q1, _, _) = y2.direct_sum(s1.q());
    let omega = GHom::new_unchecked(y1q2.clone(), y2q1.clone(), omega_mat);

    // left halves: 0 -> X1 -> P1 -> Y1 -> 0 and 0 -> X2 -> P2 -> Y2 -> 0.
    // pad to the common middle Z := Y2 + Q1:
    //   piC: P1 + Q2 -> Z, (u, q) -> omega(psi1 u, q)
    //   piE: P2 + Q1 -> Z, (v, q) -> (psi2 v, q)
    let pi_c_mat = omega
        .matrix()
        .mul(&psi1.matrix().block_diag(&PMatrix::identity(ctx, n_q2)));
    let pi_e_mat = psi2.matrix().block_diag(&PMatrix::identity(ctx, n_q1));
    let (p_c, _, _) = s1.p().direct_sum(s2.q());
    let (p_e, _, _) = s2.p().direct_sum(s1.q());
    let pi_c = GHom::new_unchecked(p_c.clone(), y2q1.clone(), pi_c_mat);
    let pi_e = GHom::new_unchecked(p_e.clone(), y2q1.clone(), pi_e_mat);

    // sections through the free sources
    let s_ce = lift_between_frees(&pi_c, &pi_e, f_section)?; // P_C -> P_E
    let s_ec = lift_between_frees(&pi_e, &pi_c, f_section)?; // P_E -> P_C

    // inclusions of the ends
    let iota_c = {
        // X1 -> P_C = (X1 -> P1) then include
        let m = s1
            .map_x()
            .matrix()
            .vstack(&PMatrix::zero(ctx, n_q2, s1.x().ngens()));
        GHom::new_unchecked(s1.x().clone(), p_c.clone(), m)
    };
    let iota_e = {
        let m = s2
            .map_x()
            .matrix()
            .vstack(&PMatrix::zero(ctx, n_q1, s2.x().ngens()));
        GHom::new_unchecked(s2.x().clone(), p_e.clone(), m)
    };

    // Phi: X2 + P_C -> X1 + P_E
    //   (e, u) -> ( hatC(u - s_EC(iota_E e + s_CE u)), iota_E e + s_CE u )
    let v_from_e = iota_e.matrix().clone();
    let v_from_u = s_ce.matrix().clone();
    let top_arg_e = s_ec.matrix().mul(&v_from_e).neg();
    let top_arg_u = PMatrix::identity(ctx, p_c.ngens()).sub(&s_ec.matrix().mul(&v_from_u));
    let top_arg = top_arg_e.hstack(&top_arg_u);
    let hat_c = match solve_columns_floored_at(iota_c.matrix(), &p_c, &top_arg, f_expr) {
        Some(h) => h,
        None => {
            if std::env::var("ZPGLAT_TRACE").is_ok() {
                for fl in [f_expr, 24, 20, 16, 12, 8] {
                    let ok = solve_columns_floored_at(iota_c.matrix(), &p_c, &top_arg, fl).is_some();
                    eprintln!("[schanuel dbg] hat_c solvable at floor {fl}: {ok}");
                    if ok {
                        break;
                    }
                }
                // which column fails? check membership per column at acc1
                let flm = ctx.pow_p(f_expr);
                let floor_rows = PMatrix::identity(ctx, p_c.ngens()).scale(flm);
                let stacked = iota_c
                    .matrix()
                    .transpose()
                    .vstack(&p_c.relations().transpose())
                    .vstack(&floor_rows);
                let hf = crate::howell::howell(&stacked);
                for j in 0..top_arg.cols() {
                    let red = hf.reduce(&top_arg.col(j));
                    let minval = red
                        .iter()
                        .filter(|&&x| x != 0)
                        .map(|&x| ctx.val(x))
                        .min();
                    if minval.is_some() {
                        eprintln!("[schanuel dbg] col {j} residual min val {:?}", minval);
                        break;
                    }
                }
            }
            return Err(Error::LiftFailed("schanuel: C-part expression"));
        }
    };
    let bottom = v_from_e.hstack(&v_from_u);
    let phi_mat = hat_c.vstack(&bottom);

    // assemble sums with rank-one free blocks for the cancellation loop
    let mut left_parts = vec![s2.x().clone()];
    left_parts.extend(free_blocks(s1.p()));
    left_parts.extend(free_blocks(s2.q()));
    let mut right_parts = vec![s1.x().clone()];
    right_parts.extend(free_blocks(s2.p()));
    right_parts.extend(free_blocks(s1.q()));
    let left_sum = sum_of(&left_parts);
    let right_sum = sum_of(&right_parts);
    debug_assert_eq!(left_sum.ngens(), s2.x().ngens() + p_c.ngens());
    debug_assert_eq!(right_sum.ngens(), s1.x().ngens() + p_e.ngens());
    let iso = GHom::new_unchecked(left_sum.clone(), right_sum.clone(), phi_mat);
    iso.verify_cert()?;
    if iso.try_inverse().is_none() {
        return Err(Error::LiftFailed("schanuel: assembled map not invertible"));
    }
    Ok(SchanuelData {
        iso,
        left_parts,
        right_parts,
        left_sum,
        right_sum,
    })
}

/// Lift f through g between free sources: h with g . h = f (modulo the noise
/// floor), built on the free generators of f's source, equivariantly.
fn lift_between_frees(f: &GHom, g: &GHom, floor: u32) -> Result<GHom> {
    let ctx = f.source().ctx();
    let grp = f.source().group().clone();
    let og = grp.order();
    let nf = f.source().ngens();
    let s = nf / og;
    // identity-slot columns of f
    let mut idcols = PMatrix::zero(ctx, f.target().ngens(), s);
    for i in 0..s {
        for (row, &x) in f.matrix().col(i * og).iter().enumerate() {
            idcols.set(row, i, x);
        }
    }
    let x = solve_columns_floored_at(g.matrix(), f.target(), &idcols, floor)
        .ok_or(Error::LiftFailed("free lift"))?;
    let mut h = PMatrix::zero(ctx, g.source().ngens(), nf);
    for i in 0..s {
        let xi = x.col(i);
        for gg in grp.elements() {
            let gx = g.source().action_of(gg).mul_vec(&xi);
            for (row, &v) in gx.iter().enumerate() {
                h.set(row, i * og + gg, v);
            }
        }
    }
    Ok(GHom::new_unchecked(f.source().clone(), g.source().clone(), h))
}

/// One cancellation step recorded for the report.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CancelStep {
    /// whether the R-corner was already a unit, or the column index mixed in
    pub direct: bool,
    pub mixed_column: Option<usize>,
}

/// Given an isomorphism between sums whose LAST parts are both rank-one free
/// blocks, peel them: returns the isomorphism between the truncated sums.
pub fn cancel_one(
    iso: &GHom,
    left_parts: &[GModule],
    right_parts: &[GModule],
) -> Result<(GHom, CancelStep)> {
    let ctx = iso.source().ctx();
    let og = iso.source().group().order();
    let n_src = iso.source().ngens();
    let n_tgt = iso.target().ngens();
    let nx = n_src - og;
    let ny = n_tgt - og;
    let m = iso.matrix();
    let a = m.submatrix(&(0..ny).collect::<Vec<_>>(), &(0..nx).collect::<Vec<_>>());
    let b = m.submatrix(&(0..ny).collect::<Vec<_>>(), &(nx..n_src).collect::<Vec<_>>());
    let c = m.submatrix(&(ny..n_tgt).collect::<Vec<_>>(), &(0..nx).collect::<Vec<_>>());
    let d = m.submatrix(&(ny..n_tgt).collect::<Vec<_>>(), &(nx..n_src).collect::<Vec<_>>());

    let residue = |mat: &PMatrix, col: usize| -> u64 {
        // image of the column in the residue field R/(p, I_G): sum of the
        // group-ring coefficients mod p
        let mut s = 0u64;
        for i in 0..mat.rows() {
            s = (s + mat.get(i, col)) % ctx.p();
        }
        s
    };

    let d_unit = residue(&d, 0) != 0;
    let (a2, b2, c2, d2, step) = if d_unit {
        (
            a.clone(),
            b.clone(),
            c.clone(),
            d.clone(),
            CancelStep {
                direct: true,
                mixed_column: None,
            },
        )
    } else {
        // find a source X-generator column whose pairing with the R-row block
        // has unit residue; guaranteed because the map is onto the R-summand
        let mut found = None;
        for j in 0..nx {
            if residue(&c, j) != 0 {
                found = Some(j);
                break;
            }
        }
        let j = found.ok_or(Error::LiftFailed("cancel: no unit pairing available"))?;
        // k: R -> X, identity generator -> e_j, extended equivariantly;
        // precomposing with (x, r) -> (x + k r, r) adds (A k, c k) to (b, d)
        let x_part = left_sum_without_last(left_parts);
        let mut k = PMatrix::zero(ctx, nx, og);
        for g in 0..og {
            let col = x_part.action_of(g).col(j);
            for (row, &v) in col.iter().enumerate() {
                k.set(row, g, v);
            }
        }
        let b2 = b.add(&a.mul(&k));
        let d2 = d.add(&c.mul(&k));
        (
            a.clone(),
            b2,
            c.clone(),
            d2,
            CancelStep {
                direct: false,
                mixed_column: Some(j),
            },
        )
    };
    if residue_of_identity_col(&d2, ctx.p()) == 0 {
        return Err(Error::LiftFailed("cancel: corner still not a unit"));
    }
    let d_inv = d2
        .inverse()
        .ok_or(Error::LiftFailed("cancel: corner not invertible"))?;
    let schur = a2.sub(&b2.mul(&d_inv).mul(&c2));
    let new_src = sum_parts(&left_parts[..left_parts.len() - 1]);
    let new_tgt = sum_parts(&right_parts[..right_parts.len() - 1]);
    let out = GHom::new_unchecked(new_src, new_tgt, schur);
    out.verify_cert()?;
    if out.try_inverse().is_none() {
        return Err(Error::LiftFailed("cancel: peeled map not invertible"));
    }
    Ok((out, step))
}

fn residue_of_identity_col(d: &PMatrix, p: u64) -> u64 {
    let mut s = 0u64;
    for i in 0..d.rows() {
        s = (s + d.get(i, 0)) % p;
    }
    s
}

fn left_sum_without_last(parts: &[GModule]) -> GModule {
    sum_parts(&parts[..parts.len() - 1])
}

fn sum_parts(parts: &[GModule]) -> GModule {
    assert!(!parts.is_empty());
    let mut acc = parts[0].clone();
    for p in &parts[1..] {
        acc = acc.direct_sum(p).0;
    }
    acc
}

/// Split off rank-one free summands until none remain; returns the count and
/// the certified core. The certificate is the vanishing of the residue
/// pairing Hom_G(core, R) x core -> R/(p, I_G).
pub fn cancel_free(m: &GModule) -> Result<(usize, GModule)> {
    let ctx = m.ctx();
    let grp = m.group().clone();
    let og = grp.order();
    let r = free_module(ctx, &grp, 1);
    let mut current = m.clone();
    let mut count = 0usize;
    loop {
        if current.ngens() == 0 {
            return Ok((count, current));
        }
        let homs = hom_equivariant(&current, &r)?;
        let mut split: Option<(GHom, usize)> = None;
        'outer: for psi in &homs {
            for j in 0..current.ngens() {
                let mut s = 0u64;
                for i in 0..og {
                    s = (s + psi.matrix().get(i, j)) % ctx.p();
                }
                if s != 0 {
                    split = Some((psi.clone(), j));
                    break 'outer;
                }
            }
        }
        let Some((psi, _)) = split else {
            // certified: all residue pairings vanish, no free summand
            return Ok((count, current));
        };
        let (core, _) = kernel_hom(&psi)?;
        count += 1;
        current = core;
    }
}

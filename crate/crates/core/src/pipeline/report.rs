//! The end-to-end verification record: every stage's structural data and
//! certificates, stable field order, reproducible from (inputs, seed, config).

use super::schanuel::{CancelStep, SchanuelData};
use super::{BData, Tower};
use crate::exact::{ExactnessCert, FourTermCert, FourTermSeq};
use crate::gmodule::GModule;
use crate::json::{ExtensionJson, GModuleJson, PMatrixJson};
use crate::matrix::PMatrix;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct ModuleSummary {
    pub ngens: usize,
    pub rank: usize,
    pub torsion_exponents: Vec<u32>,
}

impl ModuleSummary {
    pub fn of(m: &GModule) -> ModuleSummary {
        let (rank, torsion_exponents) = m.zp_structure().unwrap_or((0, vec![]));
        ModuleSummary {
            ngens: m.ngens(),
            rank,
            torsion_exponents,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    /// number of free summands in E = C + Z_p[G]^s
    pub s: usize,
    pub rank_e: usize,
    pub rank_c: usize,
    pub iso_matrix: PMatrix,
    pub det_val: u32,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub p: u64,
    pub prec: u32,
    pub torsion_guard: u32,
    pub group_order: usize,
    pub input_c: GModuleJson,
    pub rank_f1: usize,
    pub rank_n: usize,
    pub rank_l: usize,
    pub rank_f2: usize,
    pub pad_e1: usize,
    pub pad_e2: usize,
    pub injection: PMatrixJson,
    pub injection_det_val: u32,
    pub a_invariant_factors: Vec<u64>,
    pub b_summary: ModuleSummary,
    pub eff_cert: FourTermCert,
    pub em_cert: ExactnessCert,
    pub extension: ExtensionJson,
    pub m_summary: ModuleSummary,
    pub m_seq_cert: ExactnessCert,
    pub theta: PMatrixJson,
    pub e_summary: ModuleSummary,
    pub rank_f3: usize,
    pub rank_f4: usize,
    pub syzygy_cert: FourTermCert,
    pub schanuel_matrix: PMatrixJson,
    pub cancellation: Vec<CancelStep>,
    pub verdict_s: usize,
    pub verdict_rank_e: usize,
    pub verdict_rank_c: usize,
    pub verdict_iso: PMatrixJson,
    pub verdict_det_val: u32,
    pub verified: bool,
}

impl PipelineReport {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        c: &GModule,
        bd: &BData,
        tower: &Tower,
        e_mod: &GModule,
        syz: &FourTermSeq,
        sch: &SchanuelData,
        cancellation: Vec<CancelStep>,
        verdict: Verdict,
        eff_cert: FourTermCert,
        em_cert: ExactnessCert,
        m_seq_cert: ExactnessCert,
        syzygy_cert: FourTermCert,
    ) -> PipelineReport {
        let ctx = c.ctx();
        PipelineReport {
            p: ctx.p(),
            prec: ctx.prec(),
            torsion_guard: ctx.torsion_guard(),
            group_order: c.group().order(),
            input_c: GModuleJson::of(c),
            rank_f1: bd.balanced.f1.rank(),
            rank_n: bd.balanced.n.rank(),
            rank_l: bd.balanced.l.rank(),
            rank_f2: bd.balanced.f2.rank(),
            pad_e1: bd.balanced.pad_e1,
            pad_e2: bd.balanced.pad_e2,
            injection: PMatrixJson::of_work(bd.injection.matrix()),
            injection_det_val: ctx.val(bd.injection.matrix().det()),
            a_invariant_factors: bd.amod.orders(),
            b_summary: ModuleSummary::of(&bd.b),
            eff_cert,
            em_cert,
            extension: ExtensionJson::of(&tower.extension),
            m_summary: ModuleSummary::of(&tower.translation.m),
            m_seq_cert,
            theta: PMatrixJson::of(tower.theta.matrix()),
            e_summary: ModuleSummary::of(e_mod),
            rank_f3: syz.p().rank(),
            rank_f4: syz.q().rank(),
            syzygy_cert,
            schanuel_matrix: PMatrixJson::of(sch.iso.matrix()),
            cancellation,
            verdict_s: verdict.s,
            verdict_rank_e: verdict.rank_e,
            verdict_rank_c: verdict.rank_c,
            verdict_iso: PMatrixJson::of(&verdict.iso_matrix),
            verdict_det_val: verdict.det_val,
            verified: verdict.verified,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

//! JSON forms of the shared data types. Matrix entries are reduced to the
//! declared precision on export.

use crate::amodule::FiniteAModule;
use crate::cocycle::Cocycle2;
use crate::error::{Error, Result};
use crate::extension::GroupExtension;
use crate::gmodule::GModule;
use crate::group::Group;
use crate::matrix::PMatrix;
use crate::ring::RingContext;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PMatrixJson {
    pub p: u64,
    pub prec: u32,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<u64>>,
}

impl PMatrixJson {
    pub fn of(m: &PMatrix) -> PMatrixJson {
        let mc = m.reduce_to_cert();
        PMatrixJson {
            p: mc.ctx().p(),
            prec: mc.ctx().prec(),
            rows: mc.rows(),
            cols: mc.cols(),
            entries: (0..mc.rows()).map(|i| mc.row(i).to_vec()).collect(),
        }
    }

    /// Export at the full working precision (exact data).
    pub fn of_work(m: &PMatrix) -> PMatrixJson {
        PMatrixJson {
            p: m.ctx().p(),
            prec: m.ctx().work(),
            rows: m.rows(),
            cols: m.cols(),
            entries: (0..m.rows()).map(|i| m.row(i).to_vec()).collect(),
        }
    }

    pub fn to_matrix(&self, ctx: RingContext) -> Result<PMatrix> {
        if self.entries.len() != self.rows || self.entries.iter().any(|r| r.len() != self.cols) {
            return Err(Error::Dimension("entry grid does not match rows/cols".into()));
        }
        let mut m = PMatrix::zero(ctx, self.rows, self.cols);
        for (i, row) in self.entries.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupJson {
    pub order: usize,
    pub table: Vec<Vec<u32>>,
    pub generators: Vec<u32>,
}

impl GroupJson {
    pub fn of(g: &Group) -> GroupJson {
        GroupJson {
            order: g.order(),
            table: g.table_rows(),
            generators: g.generators().iter().map(|&x| x as u32).collect(),
        }
    }

    pub fn to_group(&self) -> Result<Arc<Group>> {
        Group::from_table(self.table.clone(), self.generators.clone())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AModuleJson {
    pub orders: Vec<u64>,
    /// one matrix per listed group generator
    pub action: Vec<PMatrixJson>,
}

impl AModuleJson {
    pub fn of(a: &FiniteAModule) -> AModuleJson {
        AModuleJson {
            orders: a.orders(),
            action: a
                .group()
                .generators()
                .iter()
                .map(|&g| PMatrixJson::of(a.action_of(g)))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtensionJson {
    #[serde(rename = "G")]
    pub g: GroupJson,
    #[serde(rename = "A")]
    pub a: AModuleJson,
    /// cocycle values: table[g][h] = coordinates in A
    pub cocycle: Vec<Vec<Vec<u64>>>,
}

impl ExtensionJson {
    pub fn of(e: &GroupExtension) -> ExtensionJson {
        ExtensionJson {
            g: GroupJson::of(&e.base),
            a: AModuleJson::of(&e.amod),
            cocycle: e.cocycle.values_table(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GModuleJson {
    pub p: u64,
    pub prec: u32,
    pub group: GroupJson,
    pub ngens: usize,
    pub relations: PMatrixJson,
    pub action: Vec<PMatrixJson>,
}

impl GModuleJson {
    pub fn of(m: &GModule) -> GModuleJson {
        GModuleJson {
            p: m.ctx().p(),
            prec: m.ctx().prec(),
            group: GroupJson::of(m.group()),
            ngens: m.ngens(),
            relations: PMatrixJson::of(m.relations()),
            action: m.action().iter().map(PMatrixJson::of).collect(),
        }
    }

    pub fn to_module(&self, ctx: RingContext) -> Result<GModule> {
        let group = self.group.to_group()?;
        let relations = self.relations.to_matrix(ctx)?;
        let action = self
            .action
            .iter()
            .map(|m| m.to_matrix(ctx))
            .collect::<Result<Vec<_>>>()?;
        GModule::new(ctx, group, relations, action)
    }
}

pub fn cocycle_table(c: &Cocycle2) -> Vec<Vec<Vec<u64>>> {
    c.values_table()
}

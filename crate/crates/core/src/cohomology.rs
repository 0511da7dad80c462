//! Second group cohomology by bar-resolution linear algebra: the structure of
//! H^2(G, A) as a finite abelian p-group, a basis of representative cocycles,
//! and class membership by coboundary solving.

use crate::amodule::FiniteAModule;
use crate::cocycle::{coboundary1, cocycle_check, CochainSystem, Cocycle2};
use crate::error::Result;
use crate::group::Group;
use crate::howell::Solver;
use crate::matrix::PMatrix;
use crate::smith::FiniteQuotient;
use rand::Rng;
use std::sync::Arc;

pub struct H2 {
    pub group: Arc<Group>,
    pub amod: FiniteAModule,
    /// cyclic orders of H^2 (each a power of p, largest-order factor last)
    pub orders: Vec<u64>,
    pub basis: Vec<Cocycle2>,
    membership: Option<Solver>,
}

impl H2 {
    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Coordinates of the class of `c` in the chosen basis; `None` only if
    /// `c` is not a cocycle for (G, A).
    pub fn class_coords(&self, c: &Cocycle2) -> Option<Vec<u64>> {
        if cocycle_check(&self.amod, c).is_err() {
            return None;
        }
        if self.orders.is_empty() {
            return Some(vec![]);
        }
        let sys = CochainSystem::new(&self.amod).expect("nontrivial coefficients");
        let target = sys.pack2(c);
        let x = self.membership.as_ref()?.solve(&target)?;
        let k = self.basis.len();
        Some(
            (0..k)
                .map(|i| x[i] % self.orders[i].min(sys.qctx.modulus()))
                .collect(),
        )
    }

    pub fn classes_equal(&self, c1: &Cocycle2, c2: &Cocycle2) -> bool {
        match (self.class_coords(c1), self.class_coords(c2)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }

    pub fn is_zero_class(&self, c: &Cocycle2) -> bool {
        self.class_coords(c).map_or(false, |v| v.iter().all(|&x| x == 0))
    }

    /// Representative cocycle with the given basis coordinates.
    pub fn from_coords(&self, coords: &[u64]) -> Cocycle2 {
        assert_eq!(coords.len(), self.basis.len());
        let mut c = Cocycle2::zero(&self.amod);
        for (b, &k) in self.basis.iter().zip(coords) {
            c = c.add(&self.amod, &b.scale(&self.amod, k));
        }
        c
    }

    /// Random class representative shifted by a random coboundary.
    pub fn random_cocycle(&self, rng: &mut impl Rng) -> Cocycle2 {
        let coords: Vec<u64> = self.orders.iter().map(|&o| rng.gen_range(0..o)).collect();
        let mut c = self.from_coords(&coords);
        // random normalized 1-cochain
        let n = self.group.order();
        let mut f = vec![self.amod.zero_elem(); n];
        for fg in f.iter_mut().skip(1) {
            for (i, &e) in self.amod.exponents().iter().enumerate() {
                fg[i] = rng.gen_range(0..self.amod.ctx().pow_p(e));
            }
        }
        c = c.add(&self.amod, &coboundary1(&self.amod, &f));
        debug_assert!(cocycle_check(&self.amod, &c).is_ok());
        c
    }
}

/// Compute H^2(G, A) = ker d2 / im d1 over the scaled single-modulus cochain
/// model: structure, basis cocycles, and a membership solver.
pub fn h2(group: &Arc<Group>, amod: &FiniteAModule) -> Result<H2> {
    if amod.rank() == 0 || group.order() == 1 {
        return Ok(H2 {
            group: group.clone(),
            amod: amod.clone(),
            orders: vec![],
            basis: vec![],
            membership: None,
        });
    }
    let sys = CochainSystem::new(amod).expect("nontrivial coefficients");
    let qctx = sys.qctx;
    // cocycles: kernel of the scaled d2 (includes the parameter-modulus junk
    // vectors automatically, as they are honest kernel members)
    let d2 = sys.d2_matrix(amod);
    let zspan = crate::howell::kernel(&d2);
    // coboundaries and parameter-modulus rows
    let d1 = sys.d1_matrix(amod);
    let modrows = sys.c2_modulus_rows();
    let bspan = d1.vstack(&modrows);
    let quot = FiniteQuotient::new(&zspan, &bspan)?;
    let mut orders = Vec::new();
    let mut basis = Vec::new();
    let mut basis_rows = Vec::new();
    for (i, &e) in quot.exponents.iter().enumerate() {
        let o = qctx.pow_p(e.min(qctx.work()));
        if o <= 1 {
            continue;
        }
        orders.push(o);
        let row = quot.basis.row(i).to_vec();
        basis.push(sys.unpack2(amod, &row));
        basis_rows.push(row.iter().map(|&x| x as i64).collect::<Vec<i64>>());
    }
    let basis_params = if basis_rows.is_empty() {
        PMatrix::zero(qctx, 0, sys.c2_dim())
    } else {
        PMatrix::from_rows(qctx, &basis_rows)
    };
    // membership: solve c = lambda * basis + mu * bspan
    let membership = if basis_params.rows() + bspan.rows() > 0 {
        Some(Solver::new(&basis_params.vstack(&bspan)))
    } else {
        None
    };
    for b in &basis {
        debug_assert!(cocycle_check(amod, b).is_ok());
    }
    Ok(H2 {
        group: group.clone(),
        amod: amod.clone(),
        orders,
        basis,
        membership,
    })
}

/// A cohomology class: coefficients together with a representative cocycle.
#[derive(Clone, Debug)]
pub struct CohomologyClass {
    pub group: Arc<Group>,
    pub amod: FiniteAModule,
    pub representative: Cocycle2,
}

impl CohomologyClass {
    pub fn new(group: Arc<Group>, amod: FiniteAModule, representative: Cocycle2) -> Result<Self> {
        cocycle_check(&amod, &representative)?;
        Ok(CohomologyClass {
            group,
            amod,
            representative,
        })
    }
}

/// Brute-force oracle: enumerate every normalized 2-cochain (free positions
/// are the pairs with both arguments nontrivial), filter the cocycle
/// identity, and count classes by quotienting with the enumerated
/// coboundaries. Only usable at desk scale.
pub fn h2_brute_force_order(amod: &FiniteAModule) -> u64 {
    let grp = amod.amod_group();
    let n = grp.order();
    let asize = amod.size();
    let positions = (n - 1) * (n - 1);
    let total = asize.checked_pow(positions as u32).expect("oracle too large");
    let mut cocycles = std::collections::BTreeSet::new();
    for code in 0..total {
        let mut idx = code;
        let mut c = Cocycle2::zero(amod);
        for g in 1..n {
            for h in 1..n {
                let a = amod.elem_of_index((idx % asize) as usize);
                idx /= asize;
                c.set(g, h, &a);
            }
        }
        if cocycle_check(amod, &c).is_err() {
            continue;
        }
        cocycles.insert(c.values_table());
    }
    // enumerate coboundaries
    let mut boundaries = std::collections::BTreeSet::new();
    let fcount = asize.checked_pow((n - 1) as u32).expect("oracle too large");
    for code in 0..fcount {
        let mut idx = code;
        let mut f = vec![amod.zero_elem(); n];
        for fg in f.iter_mut().skip(1) {
            *fg = amod.elem_of_index((idx % asize) as usize);
            idx /= asize;
        }
        boundaries.insert(coboundary1(amod, &f).values_table());
    }
    (cocycles.len() / boundaries.len()) as u64
}

impl FiniteAModule {
    fn amod_group(&self) -> Arc<Group> {
        self.group().clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic, direct_product, trivial};
    use crate::ring::RingContext;
    use rand::SeedableRng;

    fn ctx() -> RingContext {
        RingContext::new(3, 16, 8).unwrap()
    }

    #[test]
    fn h2_c3_z3_trivial() {
        let g = cyclic(3).unwrap();
        let a = FiniteAModule::trivial(ctx(), g.clone(), vec![1]).unwrap();
        let h = h2(&g, &a).unwrap();
        assert_eq!(h.orders, vec![3]);
        // oracle: exhaustive enumeration
        assert_eq!(h2_brute_force_order(&a), 3);
        // carry cocycle is a generator (nonzero class)
        let carry = Cocycle2::from_fn(&a, |x, y| vec![u64::from(x + y >= 3)]);
        let coords = h.class_coords(&carry).unwrap();
        assert_ne!(coords, vec![0]);
    }

    #[test]
    fn h2_trivial_group() {
        let g = trivial();
        let a = FiniteAModule::trivial(ctx(), g.clone(), vec![1]).unwrap();
        let h = h2(&g, &a).unwrap();
        assert!(h.orders.is_empty());
    }

    #[test]
    fn h2_with_nontrivial_action_matches_oracle() {
        // C3 acting on Z/9 by multiplication by 4
        let c = ctx();
        let g = cyclic(3).unwrap();
        let m = PMatrix::from_rows(c, &[vec![4]]);
        let a = FiniteAModule::with_generator_action(c, g.clone(), vec![2], &[m]).unwrap();
        let h = h2(&g, &a).unwrap();
        assert_eq!(h.order(), h2_brute_force_order(&a));
    }

    #[test]
    fn h2_c3xc3_rank() {
        // H^2(C3 x C3, Z/3 trivial) = (Z/3)^3
        let c3 = cyclic(3).unwrap();
        let g = direct_product(&c3, &c3);
        let a = FiniteAModule::trivial(ctx(), g.clone(), vec![1]).unwrap();
        let h = h2(&g, &a).unwrap();
        assert_eq!(h.order(), 27);
        assert_eq!(h.orders, vec![3, 3, 3]);
    }

    #[test]
    fn class_arithmetic_consistency() {
        let g = cyclic(3).unwrap();
        let a = FiniteAModule::trivial(ctx(), g.clone(), vec![1]).unwrap();
        let h = h2(&g, &a).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let c1 = h.random_cocycle(&mut rng);
            let c2 = h.random_cocycle(&mut rng);
            let k1 = h.class_coords(&c1).unwrap();
            let k2 = h.class_coords(&c2).unwrap();
            let sum = c1.add(&a, &c2);
            let ks = h.class_coords(&sum).unwrap();
            for i in 0..k1.len() {
                assert_eq!(ks[i], (k1[i] + k2[i]) % h.orders[i]);
            }
        }
    }

    #[test]
    fn zero_class_detection() {
        let g = cyclic(3).unwrap();
        let a = FiniteAModule::trivial(ctx(), g.clone(), vec![1]).unwrap();
        let h = h2(&g, &a).unwrap();
        let f = vec![vec![0], vec![2], vec![2]];
        let cob = coboundary1(&a, &f);
        assert!(h.is_zero_class(&cob));
    }
}

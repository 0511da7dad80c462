//! Group extensions 1 -> A -> big -> G -> 1: building the middle group from a
//! normalized 2-cocycle, and recovering (G, A, section, cocycle) from an
//! abelian normal subgroup of an explicit group.

use crate::amodule::FiniteAModule;
use crate::cocycle::{cocycle_check, Cocycle2};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::matrix::PMatrix;
use crate::ring::RingContext;
use crate::smith::smith_form;
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct GroupExtension {
    pub big: Arc<Group>,
    pub base: Arc<Group>,
    pub amod: FiniteAModule,
    /// big element -> G element
    pub proj: Vec<usize>,
    /// A element index (mixed radix) -> big element
    pub embed: Vec<usize>,
    /// G element -> big element, section(1) = 1
    pub section: Vec<usize>,
    pub cocycle: Cocycle2,
}

impl GroupExtension {
    /// Invariant checks: embed(A) = ker(proj), proj . section = id,
    /// section(1) = 1, and conjugation induces the declared action:
    /// embed(g.a) = s(g) embed(a) s(g)^{-1}.
    pub fn verify(&self) -> Result<()> {
        let nbig = self.big.order();
        if self.amod.size() as usize * self.base.order() != nbig {
            return Err(Error::InvalidGroup("|big| != |A| * |G|".into()));
        }
        if self.section[0] != 0 {
            return Err(Error::InvalidGroup("section(1) != 1".into()));
        }
        for g in self.base.elements() {
            if self.proj[self.section[g]] != g {
                return Err(Error::InvalidGroup("proj . section != id".into()));
            }
        }
        // proj is a homomorphism
        for x in 0..nbig {
            for y in 0..nbig {
                if self.proj[self.big.mul(x, y)] != self.base.mul(self.proj[x], self.proj[y]) {
                    return Err(Error::InvalidGroup("proj is not a homomorphism".into()));
                }
            }
        }
        // embed(A) = kernel of proj, and embed is an injective homomorphism
        let mut seen = vec![false; nbig];
        for (i, &x) in self.embed.iter().enumerate() {
            if self.proj[x] != 0 || seen[x] {
                return Err(Error::InvalidGroup("embed not into ker(proj) or not injective".into()));
            }
            seen[x] = true;
            let a = self.amod.elem_of_index(i);
            for (j, &y) in self.embed.iter().enumerate() {
                let b = self.amod.elem_of_index(j);
                let sum = self.amod.add_elem(&a, &b);
                if self.big.mul(x, y) != self.embed[self.amod.index_of(&sum)] {
                    return Err(Error::InvalidGroup("embed is not a homomorphism".into()));
                }
            }
        }
        if self.proj.iter().filter(|&&g| g == 0).count() != self.embed.len() {
            return Err(Error::InvalidGroup("embed does not cover ker(proj)".into()));
        }
        // conjugation action
        for g in self.base.elements() {
            let s = self.section[g];
            let sinv = self.big.inv(s);
            for (i, &x) in self.embed.iter().enumerate() {
                let a = self.amod.elem_of_index(i);
                let ga = self.amod.act(g, &a);
                let conj = self.big.mul(self.big.mul(s, x), sinv);
                if conj != self.embed[self.amod.index_of(&ga)] {
                    return Err(Error::InvalidGroup(format!(
                        "conjugation does not induce the declared action at (g={g}, a={i})"
                    )));
                }
            }
        }
        // the stored cocycle is the one recovered from the section
        for g in self.base.elements() {
            for h in self.base.elements() {
                let sg = self.section[g];
                let sh = self.section[h];
                let sgh_inv = self.big.inv(self.section[self.base.mul(g, h)]);
                let k = self.big.mul(self.big.mul(sg, sh), sgh_inv);
                let idx = self
                    .embed
                    .iter()
                    .position(|&x| x == k)
                    .ok_or_else(|| Error::InvalidGroup("section defect outside A".into()))?;
                let want = self.amod.elem_of_index(idx);
                if self.amod.reduce_elem(self.cocycle.get(g, h)) != want {
                    return Err(Error::InvalidGroup("stored cocycle mismatches section".into()));
                }
            }
        }
        Ok(())
    }
}

/// Build the extension of G by A along a normalized 2-cocycle. The element
/// set is A x G, (a1, g)(a2, h) = (a1 + g.a2 + c(g, h), gh).
pub fn extension_group(
    base: &Arc<Group>,
    amod: &FiniteAModule,
    c: &Cocycle2,
) -> Result<GroupExtension> {
    cocycle_check(amod, c)?;
    let ng = base.order();
    let na = amod.size() as usize;
    let n = na * ng;
    let idx = |a: usize, g: usize| a * ng + g;
    // decode table for A indices
    let a_elems: Vec<Vec<u64>> = (0..na).map(|i| amod.elem_of_index(i)).collect();
    let mut table = vec![0u32; n * n];
    for a1 in 0..na {
        for g in 0..ng {
            let row = idx(a1, g);
            for a2 in 0..na {
                let ga2 = amod.act(g, &a_elems[a2]);
                for h in 0..ng {
                    let mut a3 = amod.add_elem(&a_elems[a1], &ga2);
                    a3 = amod.add_elem(&a3, c.get(g, h));
                    table[row * n + idx(a2, h)] = idx(amod.index_of(&a3), base.mul(g, h)) as u32;
                }
            }
        }
    }
    let mut generators: Vec<u32> = Vec::new();
    for i in 0..amod.rank() {
        let mut v = amod.zero_elem();
        v[i] = 1;
        generators.push(idx(amod.index_of(&v), 0) as u32);
    }
    for g in base.generators() {
        generators.push(idx(0, g) as u32);
    }
    let big = Group::from_table_unverified(n, table, generators)?;
    // the cocycle identity implies associativity; verify exhaustively at desk scale
    if n <= 81 {
        big.verify()?;
    } else {
        big.verify_light()?;
    }
    let ext = GroupExtension {
        big,
        base: base.clone(),
        amod: amod.clone(),
        proj: (0..n).map(|x| x % ng).collect(),
        embed: (0..na).map(|a| idx(a, 0)).collect(),
        section: (0..ng).map(|g| idx(0, g)).collect(),
        cocycle: c.clone(),
    };
    ext.verify()?;
    Ok(ext)
}

/// Decompose: given an abelian normal p-subgroup of `big`, produce the
/// quotient group, the conjugation module structure on the kernel, the
/// first-seen section and its defect cocycle.
pub fn quotient_with_cocycle(
    ctx: RingContext,
    big: &Arc<Group>,
    kernel_elements: &[usize],
) -> Result<GroupExtension> {
    let n = big.order();
    let mut in_k = vec![false; n];
    for &k in kernel_elements {
        if k >= n {
            return Err(Error::InvalidGroup("kernel element out of range".into()));
        }
        in_k[k] = true;
    }
    if !in_k[0] {
        in_k[0] = true;
    }
    let kset: Vec<usize> = (0..n).filter(|&x| in_k[x]).collect();
    // closed under multiplication
    for &a in &kset {
        for &b in &kset {
            if !in_k[big.mul(a, b)] {
                return Err(Error::InvalidGroup("kernel set is not a subgroup".into()));
            }
        }
    }
    // abelian, with witnesses
    for &a in &kset {
        for &b in &kset {
            if big.mul(a, b) != big.mul(b, a) {
                return Err(Error::NotAbelian(a, b));
            }
        }
    }
    // normal, with witnesses
    for g in 0..n {
        let gi = big.inv(g);
        for &k in &kset {
            if !in_k[big.mul(big.mul(g, k), gi)] {
                return Err(Error::NotNormal { element: k, by: g });
            }
        }
    }
    // p-power order
    let mut m = kset.len() as u64;
    while m % ctx.p() == 0 {
        m /= ctx.p();
    }
    if m != 1 {
        return Err(Error::InvalidGroup(format!(
            "kernel order {} is not a power of p = {}",
            kset.len(),
            ctx.p()
        )));
    }

    // abelian p-group basis for K
    let (basis_els, basis_exps) = abelian_basis(ctx, big, &kset)?;
    let rank = basis_els.len();
    // discrete log table: big element -> coordinates in the basis
    let mut coords_of: HashMap<usize, Vec<u64>> = HashMap::new();
    {
        let sizes: Vec<u64> = basis_exps.iter().map(|&e| ctx.pow_p(e)).collect();
        let total: u64 = sizes.iter().product();
        assert_eq!(total as usize, kset.len(), "basis does not enumerate K");
        let mut coords = vec![0u64; rank];
        // precompute powers of each basis element
        let pows: Vec<Vec<usize>> = basis_els
            .iter()
            .zip(&sizes)
            .map(|(&b, &s)| {
                let mut v = vec![0usize; s as usize];
                for i in 1..s as usize {
                    v[i] = big.mul(v[i - 1], b);
                }
                v
            })
            .collect();
        for _ in 0..total {
            let mut el = 0usize;
            for (j, &c) in coords.iter().enumerate() {
                el = big.mul(el, pows[j][c as usize]);
            }
            if coords_of.insert(el, coords.clone()).is_some() {
                return Err(Error::InvalidGroup("kernel basis is not independent".into()));
            }
            // increment mixed radix
            for j in 0..rank {
                coords[j] += 1;
                if coords[j] < sizes[j] {
                    break;
                }
                coords[j] = 0;
            }
        }
    }

    // cosets with first-seen representatives
    let mut coset_of = vec![usize::MAX; n];
    let mut reps: Vec<usize> = Vec::new();
    for x in 0..n {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let id = reps.len();
        reps.push(x);
        for &k in &kset {
            coset_of[big.mul(x, k)] = id;
        }
    }
    let ng = reps.len();
    let mut qtable = vec![0u32; ng * ng];
    for i in 0..ng {
        for j in 0..ng {
            qtable[i * ng + j] = coset_of[big.mul(reps[i], reps[j])] as u32;
        }
    }
    let mut qgens: Vec<u32> = Vec::new();
    for g in big.generators() {
        let c = coset_of[g] as u32;
        if c != 0 && !qgens.contains(&c) {
            qgens.push(c);
        }
    }
    let base = Group::from_table_unverified(ng, qtable, qgens)?;
    base.verify()?;

    // conjugation action per quotient element
    let mut action = Vec::with_capacity(ng);
    for u in 0..ng {
        let s = reps[u];
        let sinv = big.inv(s);
        let mut mat = PMatrix::zero(ctx, rank, rank);
        for (j, &b) in basis_els.iter().enumerate() {
            let conj = big.mul(big.mul(s, b), sinv);
            let c = &coords_of[&conj];
            for i in 0..rank {
                mat.set(i, j, c[i]);
            }
        }
        action.push(mat);
    }
    let amod = FiniteAModule::from_element_action(ctx, base.clone(), basis_exps, action)?;

    // embed: A index -> big element
    let embed: Vec<usize> = (0..amod.size() as usize)
        .map(|i| {
            let coords = amod.elem_of_index(i);
            let mut el = 0usize;
            for (j, &c) in coords.iter().enumerate() {
                let mut x = 0usize;
                for _ in 0..c {
                    x = big.mul(x, basis_els[j]);
                }
                el = big.mul(el, x);
            }
            el
        })
        .collect();

    // cocycle from the section defect
    let cocycle = Cocycle2::from_fn(&amod, |g, h| {
        let sg = reps[g];
        let sh = reps[h];
        let sgh_inv = big.inv(reps[base.mul(g, h)]);
        let k = big.mul(big.mul(sg, sh), sgh_inv);
        coords_of[&k].clone()
    });
    cocycle_check(&amod, &cocycle)?;

    let ext = GroupExtension {
        big: big.clone(),
        base,
        amod,
        proj: coset_of,
        embed,
        section: reps,
        cocycle,
    };
    ext.verify()?;
    Ok(ext)
}

/// Basis of a finite abelian p-group given as a subset of an ambient group:
/// greedy generators by decreasing element order, then a Smith pass over the
/// relation lattice to split into independent cyclic factors.
fn abelian_basis(
    ctx: RingContext,
    big: &Group,
    kset: &[usize],
) -> Result<(Vec<usize>, Vec<u32>)> {
    if kset.len() == 1 {
        return Ok((vec![], vec![]));
    }
    let mut sorted: Vec<usize> = kset.to_vec();
    sorted.sort_by_key(|&x| std::cmp::Reverse(big.order_of(x)));
    let mut gens: Vec<usize> = Vec::new();
    let mut have: Vec<usize> = vec![0];
    for &x in &sorted {
        if x == 0 || have.contains(&x) {
            continue;
        }
        gens.push(x);
        have = big.closure(&gens);
        if have.len() == kset.len() {
            break;
        }
    }
    let k = gens.len();
    let orders: Vec<u64> = gens.iter().map(|&g| big.order_of(g) as u64).collect();
    // enumerate the relation lattice inside the box prod [0, o_i)
    let mut rel_rows: Vec<Vec<i64>> = Vec::new();
    {
        let total: u64 = orders.iter().product();
        let pows: Vec<Vec<usize>> = gens
            .iter()
            .zip(&orders)
            .map(|(&g, &o)| {
                let mut v = vec![0usize; o as usize];
                for i in 1..o as usize {
                    v[i] = big.mul(v[i - 1], g);
                }
                v
            })
            .collect();
        let mut coords = vec![0u64; k];
        for _ in 0..total {
            let mut el = 0usize;
            for (j, &c) in coords.iter().enumerate() {
                el = big.mul(el, pows[j][c as usize]);
            }
            if el == 0 && coords.iter().any(|&c| c != 0) {
                rel_rows.push(coords.iter().map(|&c| c as i64).collect());
            }
            for j in 0..k {
                coords[j] += 1;
                if coords[j] < orders[j] {
                    break;
                }
                coords[j] = 0;
            }
        }
    }
    for (j, &o) in orders.iter().enumerate() {
        let mut row = vec![0i64; k];
        row[j] = o as i64;
        rel_rows.push(row);
    }
    let rel = PMatrix::from_rows(ctx, &rel_rows);
    let (d, _, r) = smith_form(&rel);
    let rinv = r.inverse().expect("smith transform invertible");
    let mut basis_els = Vec::new();
    let mut basis_exps = Vec::new();
    for i in 0..k {
        let e = ctx.val(d.get(i, i));
        if e == 0 {
            continue;
        }
        if e > ctx.torsion_guard() {
            return Err(Error::InvalidGroup(
                "kernel torsion exceeds the torsion guard".into(),
            ));
        }
        // basis element: combination of gens with coefficients row i of r^{-1}
        let mut el = 0usize;
        for (j, (&g, &o)) in gens.iter().zip(&orders).enumerate() {
            let c = rinv.get(i, j) % o;
            let mut x = 0usize;
            for _ in 0..c {
                x = big.mul(x, g);
            }
            el = big.mul(el, x);
        }
        basis_els.push(el);
        basis_exps.push(e);
    }
    let covered: u64 = basis_exps.iter().map(|&e| ctx.pow_p(e)).product();
    if covered as usize != kset.len() {
        return Err(Error::InvalidGroup("abelian basis extraction failed".into()));
    }
    Ok((basis_els, basis_exps))
}

impl Group {
    /// identity, inverses and generator checks only (associativity implied by
    /// construction for cocycle-built tables; exhaustive below order 82).
    pub fn verify_light(&self) -> Result<()> {
        let n = self.order();
        for a in 0..n {
            if self.mul(0, a) != a || self.mul(a, 0) != a {
                return Err(Error::InvalidGroup("identity fails".into()));
            }
            let i = self.inv(a);
            if self.mul(a, i) != 0 {
                return Err(Error::InvalidGroup("inverse fails".into()));
            }
        }
        let gens = self.generators();
        if self.closure(&gens).len() != n {
            return Err(Error::InvalidGroup("generators do not generate".into()));
        }
        Ok(())
    }

    pub(crate) fn from_table_unverified(
        order: usize,
        table: Vec<u32>,
        generators: Vec<u32>,
    ) -> Result<Arc<Group>> {
        Ok(Arc::new(Group::finish_pub(order, table, generators)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic, direct_product, trivial};

    fn ctx() -> RingContext {
        RingContext::new(3, 16, 8).unwrap()
    }

    fn carry_cocycle(a: &FiniteAModule) -> Cocycle2 {
        Cocycle2::from_fn(a, |g, h| vec![u64::from(g + h >= 3)])
    }

    #[test]
    fn split_extension_is_direct_product() {
        let g = cyclic(3).unwrap();
        let a = FiniteAModule::trivial(ctx(), g.clone(), vec![1]).unwrap();
        let e = extension_group(&g, &a, &Cocycle2::zero(&a)).unwrap();
        assert_eq!(e.big.order(), 9);
        assert!(e.big.is_abelian());
        assert_eq!(e.big.exponent(), 3); // C3 x C3
    }

    /// Carry cocycle -> C9: the table must contain an element of order 9.
    #[test]
    fn carry_extension_is_c9() {
        let g = cyclic(3).unwrap();
        let a = FiniteAModule::trivial(ctx(), g.clone(), vec![1]).unwrap();
        let e = extension_group(&g, &a, &carry_cocycle(&a)).unwrap();
        assert_eq!(e.big.order(), 9);
        assert_eq!(e.big.exponent(), 9);
    }

    /// A coboundary gives a split extension: exhibit an order-3 splitting
    /// subgroup by search.
    #[test]
    fn coboundary_extension_splits() {
        let g = cyclic(3).unwrap();
        let a = FiniteAModule::trivial(ctx(), g.clone(), vec![1]).unwrap();
        let f = vec![vec![0], vec![2], vec![1]];
        let c = crate::cocycle::coboundary1(&a, &f);
        let e = extension_group(&g, &a, &c).unwrap();
        // find a subgroup mapping isomorphically onto G
        let found = (0..9).any(|x| {
            e.proj[x] != 0 && {
                let sub = e.big.closure(&[x]);
                sub.len() == 3 && sub.iter().map(|&y| e.proj[y]).collect::<std::collections::BTreeSet<_>>().len() == 3
            }
        });
        assert!(found, "no splitting subgroup found");
    }

    #[test]
    fn quotient_of_c9_recovers_nontrivial_cocycle() {
        let c9 = cyclic(9).unwrap();
        let sub = c9.closure(&[3]);
        let e = quotient_with_cocycle(ctx(), &c9, &sub).unwrap();
        assert_eq!(e.base.order(), 3);
        assert_eq!(e.amod.size(), 3);
        assert!(crate::cocycle::is_coboundary(&e.amod, &e.cocycle).is_none());
    }

    #[test]
    fn quotient_of_product_gives_coboundary() {
        let c3 = cyclic(3).unwrap();
        let g = direct_product(&c3, &c3);
        // first factor: elements {(0,0),(1,0),(2,0)} = indices {0, 3, 6}
        let sub = g.closure(&[3]);
        let e = quotient_with_cocycle(ctx(), &g, &sub).unwrap();
        assert!(crate::cocycle::is_coboundary(&e.amod, &e.cocycle).is_some());
    }

    #[test]
    fn quotient_by_trivial_kernel() {
        let c3 = cyclic(3).unwrap();
        let e = quotient_with_cocycle(ctx(), &c3, &[0]).unwrap();
        assert_eq!(e.base.order(), 3);
        assert_eq!(e.amod.rank(), 0);
        assert!(e.cocycle.is_zero(&e.amod));
    }

    #[test]
    fn quotient_rejects_non_normal_and_non_abelian() {
        let h = crate::group::heisenberg(3).unwrap();
        // a non-central order-3 subgroup generated by x=(1,0,0) is not normal
        let sub = h.closure(&[1]);
        assert!(matches!(
            quotient_with_cocycle(ctx(), &h, &sub),
            Err(Error::NotNormal { .. })
        ));
        // the subgroup generated by x and z is abelian and normal; x,y is not abelian
        let subxy = h.closure(&[1, 3]);
        let err = quotient_with_cocycle(ctx(), &h, &subxy);
        assert!(matches!(err, Err(Error::NotAbelian(_, _)) | Err(Error::NotNormal { .. })));
    }

    /// Round trip: extension -> quotient recovers a cohomologous cocycle.
    #[test]
    fn round_trip_cocycle_cohomologous() {
        let g = cyclic(3).unwrap();
        let a = FiniteAModule::trivial(ctx(), g.clone(), vec![1]).unwrap();
        let c = carry_cocycle(&a);
        let e = extension_group(&g, &a, &c).unwrap();
        let kernel: Vec<usize> = e.embed.clone();
        let e2 = quotient_with_cocycle(ctx(), &e.big, &kernel).unwrap();
        assert_eq!(e2.base.order(), 3);
        // recovered cocycle is cohomologous to c after identifying the groups;
        // both live over C3 with A = Z/3, and the difference must be a coboundary
        // up to the identification of A with itself (scaling by a unit).
        let mut matched = false;
        for u in 1..3u64 {
            let scaled = e2.cocycle.scale(&e2.amod, u);
            // identify base groups: both are C3 with generator the image of
            // the section; the quotient's element order matches index order here
            let diff = scaled.sub(&e2.amod, &c);
            if crate::cocycle::is_coboundary(&e2.amod, &diff).is_some() {
                matched = true;
                break;
            }
        }
        assert!(matched);
    }

    #[test]
    fn trivial_group_extension() {
        let t = trivial();
        let a = FiniteAModule::trivial(ctx(), t.clone(), vec![2]).unwrap();
        let e = extension_group(&t, &a, &Cocycle2::zero(&a)).unwrap();
        assert_eq!(e.big.order(), 9);
        assert!(e.big.is_abelian());
    }
}

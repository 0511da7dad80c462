//! Finite groups as explicit multiplication tables. Element 0 is the
//! identity; everything downstream (actions, cochains, extensions) indexes
//! elements through these tables.

use crate::error::{Error, Result};
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Group {
    order: usize,
    table: Vec<u32>,
    inv: Vec<u32>,
    generators: Vec<u32>,
}

impl Group {
    pub fn from_table(table: Vec<Vec<u32>>, generators: Vec<u32>) -> Result<Arc<Group>> {
        let order = table.len();
        if order == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        let mut flat = Vec::with_capacity(order * order);
        for row in &table {
            if row.len() != order {
                return Err(Error::InvalidGroup("table is not square".into()));
            }
            for &x in row {
                if x as usize >= order {
                    return Err(Error::InvalidGroup("table entry out of range".into()));
                }
                flat.push(x);
            }
        }
        let g = Group::finish(order, flat, generators)?;
        g.verify()?;
        Ok(Arc::new(g))
    }

    pub(crate) fn finish_pub(order: usize, table: Vec<u32>, generators: Vec<u32>) -> Result<Group> {
        Group::finish(order, table, generators)
    }

    fn finish(order: usize, table: Vec<u32>, generators: Vec<u32>) -> Result<Group> {
        let mut inv = vec![u32::MAX; order];
        for a in 0..order {
            for b in 0..order {
                if table[a * order + b] == 0 {
                    inv[a] = b as u32;
                }
            }
        }
        if inv.iter().any(|&x| x == u32::MAX) {
            return Err(Error::InvalidGroup("an element has no inverse".into()));
        }
        Ok(Group {
            order,
            table,
            inv,
            generators,
        })
    }

    /// Full invariant check: two-sided identity, inverses, associativity on
    /// all triples, and that the listed generators generate.
    pub fn verify(&self) -> Result<()> {
        let n = self.order;
        for a in 0..n {
            if self.mul(0, a) != a || self.mul(a, 0) != a {
                return Err(Error::InvalidGroup(format!("0 is not an identity at {a}")));
            }
            let i = self.inv(a);
            if self.mul(a, i) != 0 || self.mul(i, a) != 0 {
                return Err(Error::InvalidGroup(format!("bad inverse for {a}")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let gen = self.closure(&self.generators.iter().map(|&g| g as usize).collect::<Vec<_>>());
        if gen.len() != n {
            return Err(Error::InvalidGroup(
                "listed generators do not generate the group".into(),
            ));
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn generators(&self) -> Vec<usize> {
        self.generators.iter().map(|&g| g as usize).collect()
    }

    pub fn table_rows(&self) -> Vec<Vec<u32>> {
        (0..self.order)
            .map(|i| self.table[i * self.order..(i + 1) * self.order].to_vec())
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> {
        0..self.order
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn order_of(&self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != 0 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    pub fn exponent(&self) -> usize {
        (0..self.order).map(|a| self.order_of(a)).fold(1, lcm)
    }

    pub fn is_p_group(&self, p: u64) -> bool {
        let mut n = self.order as u64;
        while n % p == 0 {
            n /= p;
        }
        n == 1
    }

    pub fn center(&self) -> Vec<usize> {
        (0..self.order)
            .filter(|&a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
            .collect()
    }

    /// Subgroup generated by a set of elements, as a sorted element list.
    pub fn closure(&self, seed: &[usize]) -> Vec<usize> {
        let mut in_set = vec![false; self.order];
        in_set[0] = true;
        let mut frontier = vec![0usize];
        for &s in seed {
            if !in_set[s] {
                in_set[s] = true;
                frontier.push(s);
            }
        }
        let mut i = 0;
        while i < frontier.len() {
            let a = frontier[i];
            i += 1;
            for &s in seed {
                for x in [self.mul(a, s), self.mul(s, a)] {
                    if !in_set[x] {
                        in_set[x] = true;
                        frontier.push(x);
                    }
                }
            }
        }
        let mut out: Vec<usize> = (0..self.order).filter(|&x| in_set[x]).collect();
        out.sort_unstable();
        out
    }

    /// For each element, a word in the listed generators reaching it from the
    /// identity (BFS, left multiplication). Used to extend generator-level
    /// data (module actions) to the whole group.
    pub fn generator_words(&self) -> Vec<Vec<usize>> {
        let mut words: Vec<Option<Vec<usize>>> = vec![None; self.order];
        words[0] = Some(vec![]);
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(a) = queue.pop_front() {
            for &g in &self.generators {
                let b = self.mul(g as usize, a);
                if words[b].is_none() {
                    let mut w = vec![g as usize];
                    w.extend(words[a].as_ref().unwrap());
                    words[b] = Some(w);
                    queue.push_back(b);
                }
            }
        }
        words
            .into_iter()
            .map(|w| w.expect("generators generate"))
            .collect()
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn is_prime_power(mut n: usize) -> bool {
    if n == 1 {
        return true;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            return n == 1;
        }
        p += 1;
    }
    true // n itself prime
}

pub fn trivial() -> Arc<Group> {
    Arc::new(Group::finish(1, vec![0], vec![]).unwrap())
}

pub fn cyclic(n: usize) -> Result<Arc<Group>> {
    if n == 0 || !is_prime_power(n) {
        return Err(Error::InvalidGroup(format!("cyclic order {n} is not a prime power")));
    }
    let mut table = vec![0u32; n * n];
    for a in 0..n {
        for b in 0..n {
            table[a * n + b] = ((a + b) % n) as u32;
        }
    }
    let generators = if n > 1 { vec![1u32] } else { vec![] };
    Ok(Arc::new(Group::finish(n, table, generators)?))
}

pub fn direct_product(g1: &Group, g2: &Group) -> Arc<Group> {
    let (n1, n2) = (g1.order, g2.order);
    let n = n1 * n2;
    let idx = |a: usize, b: usize| a * n2 + b;
    let mut table = vec![0u32; n * n];
    for a1 in 0..n1 {
        for a2 in 0..n2 {
            for b1 in 0..n1 {
                for b2 in 0..n2 {
                    table[idx(a1, a2) * n + idx(b1, b2)] =
                        idx(g1.mul(a1, b1), g2.mul(a2, b2)) as u32;
                }
            }
        }
    }
    let mut generators = Vec::new();
    for &g in &g1.generators {
        generators.push(idx(g as usize, 0) as u32);
    }
    for &g in &g2.generators {
        generators.push(idx(0, g as usize) as u32);
    }
    Arc::new(Group::finish(n, table, generators).unwrap())
}

/// Heisenberg group of order p^3: upper unitriangular 3x3 matrices over F_p,
/// encoded as (a, b, c) -> a + p*b + p^2*c with product
/// (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab').
pub fn heisenberg(p: u64) -> Result<Arc<Group>> {
    if p < 3 || !(2..p).all(|d| p % d != 0) {
        return Err(Error::InvalidGroup(format!("heisenberg needs an odd prime, got {p}")));
    }
    let p = p as usize;
    let n = p * p * p;
    let enc = |a: usize, b: usize, c: usize| a + p * b + p * p * c;
    let mut table = vec![0u32; n * n];
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for a2 in 0..p {
                    for b2 in 0..p {
                        for c2 in 0..p {
                            let prod = enc((a + a2) % p, (b + b2) % p, (c + c2 + a * b2) % p);
                            table[enc(a, b, c) * n + enc(a2, b2, c2)] = prod as u32;
                        }
                    }
                }
            }
        }
    }
    let generators = vec![enc(1, 0, 0) as u32, enc(0, 1, 0) as u32];
    Ok(Arc::new(Group::finish(n, table, generators)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_basics() {
        let c3 = cyclic(3).unwrap();
        c3.verify().unwrap();
        assert_eq!(c3.order(), 3);
        assert!(c3.is_abelian());
        assert!(cyclic(6).is_err());
        assert!(cyclic(12).is_err());
        let c1 = cyclic(1).unwrap();
        assert_eq!(c1.order(), 1);
    }

    #[test]
    fn product_of_cyclics() {
        let c3 = cyclic(3).unwrap();
        let g = direct_product(&c3, &c3);
        g.verify().unwrap();
        assert_eq!(g.order(), 9);
        assert_eq!(g.exponent(), 3);
        assert!(g.is_abelian());
        assert_eq!(g.generators().len(), 2);
    }

    /// Oracle: exhaustive enumeration of upper unitriangular 3x3 matrices over
    /// F_3, multiplied as matrices, must agree with the encoded table.
    #[test]
    fn heisenberg_matches_matrix_model() {
        let g = heisenberg(3).unwrap();
        g.verify().unwrap();
        assert_eq!(g.order(), 27);
        assert!(!g.is_abelian());
        assert_eq!(g.exponent(), 3);
        assert_eq!(g.center().len(), 3);

        type M = [[u64; 3]; 3];
        let to_mat = |i: usize| -> M {
            let (a, b, c) = (i % 3, (i / 3) % 3, i / 9);
            [[1, a as u64, c as u64], [0, 1, b as u64], [0, 0, 1]]
        };
        let matmul = |x: M, y: M| -> M {
            let mut z = [[0u64; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        z[i][j] = (z[i][j] + x[i][k] * y[k][j]) % 3;
                    }
                }
            }
            z
        };
        let encode = |m: M| -> usize { (m[0][1] + 3 * m[1][2] + 9 * m[0][2]) as usize };
        for i in 0..27 {
            for j in 0..27 {
                assert_eq!(g.mul(i, j), encode(matmul(to_mat(i), to_mat(j))));
            }
        }
    }

    #[test]
    fn words_reach_everything() {
        let g = heisenberg(3).unwrap();
        let words = g.generator_words();
        for (el, w) in words.iter().enumerate() {
            let mut x = 0usize;
            for &gi in w.iter().rev() {
                x = g.mul(gi, x);
            }
            assert_eq!(x, el);
        }
    }

    #[test]
    fn closure_of_subgroup() {
        let c9 = cyclic(9).unwrap();
        let sub = c9.closure(&[3]);
        assert_eq!(sub, vec![0, 3, 6]);
    }
}

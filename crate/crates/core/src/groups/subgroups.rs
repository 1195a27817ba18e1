//! Subgroup enumeration for small groups.
//!
//! Every subgroup `H ≠ 1` is `⟨K, g⟩` for a maximal subgroup `K < H` and some `g ∈ H \ K`
//! of prime-power order (elements of prime-power order generate `H`, so one of them lies
//! outside `K`). Starting from the cyclic subgroups of prime-power order, each subgroup
//! found is extended once by each such cyclic subgroup it does not contain, which reaches
//! every subgroup, including perfect ones that cyclic extension by normalising elements
//! alone would miss.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::{orbits, transitivity_rank, Action, GroupElement, GroupTable};

/// Largest parent order accepted by [`subgroup_scan`].
pub const SUBGROUP_SCAN_LIMIT: usize = 10_000;

const CAYLEY_TABLE_LIMIT: usize = 4096;

/// One subgroup of a scanned parent, described by element positions in the parent table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupNode {
    pub order: usize,
    pub generators: Vec<usize>,
    /// Sorted positions in the parent.
    pub elements: Vec<usize>,
    pub transitive: Option<bool>,
    pub rank: Option<usize>,
}

impl SubgroupNode {
    pub fn to_table<T: GroupElement>(&self, parent: &GroupTable<T>, name: impl Into<String>) -> Result<GroupTable<T>> {
        let elements: Vec<T> = self.elements.iter().map(|&i| parent.element(i).clone()).collect();
        let gens: Vec<T> = self.generators.iter().map(|&i| parent.element(i).clone()).collect();
        let gens = if self.order == 1 { Vec::new() } else { gens };
        GroupTable::from_elements(name, elements, gens)
    }

    /// Fills `transitive` and, for transitive subgroups, `rank`.
    pub fn annotate<T: GroupElement, A: Action<T> + ?Sized>(&mut self, parent: &GroupTable<T>, action: &A) -> Result<()> {
        let table = self.to_table(parent, "H")?;
        let transitive = orbits(&table, action)?.orbit_count() == 1;
        self.transitive = Some(transitive);
        self.rank = if transitive { Some(transitivity_rank(&table, action)?) } else { None };
        Ok(())
    }
}

struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Self(vec![0; n.div_ceil(64)])
    }
    #[inline]
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    #[inline]
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
}

struct Multiplier<'a, T: GroupElement> {
    group: &'a GroupTable<T>,
    table: Option<Vec<u16>>,
}

impl<'a, T: GroupElement> Multiplier<'a, T> {
    fn new(group: &'a GroupTable<T>) -> Self {
        let n = group.order();
        let table = (n <= CAYLEY_TABLE_LIMIT).then(|| {
            (0..n * n)
                .into_par_iter()
                .map(|k| {
                    let prod = group.element(k / n).mul(group.element(k % n));
                    group.position(&prod).expect("group is closed") as u16
                })
                .collect()
        });
        Self { group, table }
    }

    #[inline]
    fn mul(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a * self.group.order() + b] as usize,
            None => self.group.position(&self.group.element(a).mul(self.group.element(b))).expect("group is closed"),
        }
    }
}

fn is_prime_power(mut n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d)).unwrap();
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

/// All subgroups of `group` of order at most `max_order`, each exactly once, sorted by
/// order and then by element positions.
pub fn subgroup_scan<T: GroupElement>(group: &GroupTable<T>, max_order: usize) -> Result<Vec<SubgroupNode>> {
    let n = group.order();
    if n > SUBGROUP_SCAN_LIMIT {
        return Err(Error::SizeLimit { what: format!("subgroup scan of {} (order {n})", group.name()), limit: SUBGROUP_SCAN_LIMIT as u128 });
    }
    let mult = Multiplier::new(group);
    let id = group.position(group.identity()).expect("identity present");

    let close = |gens: &[usize], cap: usize| -> Option<(Vec<usize>, Bits)> {
        let mut bits = Bits::new(n);
        let mut elems = vec![id];
        bits.set(id);
        let mut head = 0;
        while head < elems.len() {
            let x = elems[head];
            for &s in gens {
                let y = mult.mul(x, s);
                if !bits.get(y) {
                    if elems.len() >= cap {
                        return None;
                    }
                    bits.set(y);
                    elems.push(y);
                }
            }
            head += 1;
        }
        elems.sort_unstable();
        Some((elems, bits))
    };

    // cyclic subgroups of prime-power order
    let mut cyclic: Vec<(usize, Bits)> = Vec::new();
    let mut seen_cyclic: HashSet<Vec<u64>> = HashSet::new();
    for g in 0..n {
        let (elems, bits) = close(&[g], n).expect("cyclic subgroup within group");
        if is_prime_power(elems.len()) && seen_cyclic.insert(bits.0.clone()) {
            cyclic.push((g, bits));
        }
    }

    let mut found: Vec<SubgroupNode> = Vec::new();
    let mut keys: HashSet<Vec<u64>> = HashSet::new();
    let mut members: Vec<Bits> = Vec::new();
    let mut push = |node: SubgroupNode, bits: Bits, found: &mut Vec<SubgroupNode>, members: &mut Vec<Bits>| {
        if keys.insert(bits.0.clone()) {
            found.push(node);
            members.push(bits);
        }
    };
    if max_order >= 1 {
        let (elems, bits) = close(&[], 1).unwrap();
        push(SubgroupNode { order: 1, generators: vec![], elements: elems, transitive: None, rank: None }, bits, &mut found, &mut members);
    }
    for (g, _) in &cyclic {
        if let Some((elems, bits)) = close(&[*g], max_order) {
            let node = SubgroupNode { order: elems.len(), generators: vec![*g], elements: elems, transitive: None, rank: None };
            push(node, bits, &mut found, &mut members);
        }
    }
    let mut head = 0;
    while head < found.len() {
        let base_gens = found[head].generators.clone();
        let candidates: Vec<usize> =
            cyclic.iter().map(|(g, _)| *g).filter(|&g| !members[head].get(g)).collect();
        let extensions: Vec<(Vec<usize>, Vec<usize>, Bits)> = candidates
            .par_iter()
            .filter_map(|&g| {
                let mut gens = base_gens.clone();
                gens.push(g);
                close(&gens, max_order).map(|(elems, bits)| (gens, elems, bits))
            })
            .collect();
        for (gens, elems, bits) in extensions {
            let node = SubgroupNode { order: elems.len(), generators: gens, elements: elems, transitive: None, rank: None };
            push(node, bits, &mut found, &mut members);
        }
        head += 1;
    }
    found.sort_by(|a, b| (a.order, &a.elements).cmp(&(b.order, &b.elements)));
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{Perm, PermAction};

    fn sym(n: usize) -> GroupTable<Perm> {
        let cycle = Perm::from_images((0..n as u32).map(|i| (i + 1) % n as u32).collect()).unwrap();
        let mut swap: Vec<u32> = (0..n as u32).collect();
        swap.swap(0, 1);
        GroupTable::closure(format!("S{n}"), vec![Perm::from_images(swap).unwrap(), cycle], 1 << 16).unwrap()
    }

    /// Brute force: every subset closed under multiplication.
    fn brute_force_subgroup_count<T: GroupElement>(g: &GroupTable<T>) -> usize {
        let n = g.order();
        (1u64..1 << n)
            .filter(|mask| {
                let members: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                members.iter().all(|&a| {
                    members.iter().all(|&b| {
                        let p = g.position(&g.element(a).mul(g.element(b))).unwrap();
                        mask >> p & 1 == 1
                    })
                })
            })
            .count()
    }

    #[test]
    fn s3_lattice() {
        let s3 = sym(3);
        let subs = subgroup_scan(&s3, 6).unwrap();
        let orders: Vec<usize> = subs.iter().map(|s| s.order).collect();
        assert_eq!(orders, vec![1, 2, 2, 2, 3, 6]);
        assert_eq!(brute_force_subgroup_count(&s3), 6);
    }

    #[test]
    fn s4_has_30_subgroups() {
        let s4 = sym(4);
        let subs = subgroup_scan(&s4, 24).unwrap();
        assert_eq!(subs.len(), 30);
        assert!(subs.iter().all(|s| 24 % s.order == 0));
        let small = subgroup_scan(&s4, 4).unwrap();
        assert_eq!(small.len(), subs.iter().filter(|s| s.order <= 4).count());
    }

    #[test]
    fn s5_contains_a5_and_156_subgroups() {
        let s5 = sym(5);
        let subs = subgroup_scan(&s5, 120).unwrap();
        assert_eq!(subs.len(), 156);
        assert_eq!(subs.iter().filter(|s| s.order == 60).count(), 1);
    }

    #[test]
    fn annotate_transitive_subgroups() {
        let s4 = sym(4);
        let mut subs = subgroup_scan(&s4, 24).unwrap();
        for s in &mut subs {
            s.annotate(&s4, &PermAction::new(4)).unwrap();
        }
        // transitive subgroups of S4: C4 (x3), V4 normal, D4 (x3), A4, S4
        assert_eq!(subs.iter().filter(|s| s.transitive == Some(true)).count(), 9);
    }
}

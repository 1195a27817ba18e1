//! Enumerated finite groups: closure from generators, actions on finite domains, orbits,
//! stabilisers, transitivity rank, derived subgroups, block systems and subgroup scans.
//!
//! Every group here is small enough to list. A [`GroupTable`] stores its elements in a
//! deterministic order (breadth-first from a fixed generator list) together with a hash
//! index, so that element positions can be used as stable identifiers.

mod cache;
mod perm;
mod subgroups;

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::seeded_rng;

pub use cache::{read_cache, write_cache, CacheHeader, CacheKind, CacheRecord};
pub use perm::{Perm, PermAction};
pub use subgroups::{subgroup_scan, SubgroupNode, SUBGROUP_SCAN_LIMIT};

/// An element of a finite group with a canonical byte encoding.
///
/// `a.mul(&b)` is the product `a·b`; when elements act on a domain, `b` acts first.
pub trait GroupElement: Clone + Eq + Hash + Send + Sync {
    fn mul(&self, rhs: &Self) -> Self;
    fn inv(&self) -> Self;
    /// Canonical encoding: equal elements encode identically.
    fn encode(&self) -> Vec<u8>;
}

/// A fully enumerated finite group.
#[derive(Clone, Debug)]
pub struct GroupTable<T: GroupElement> {
    name: String,
    elements: Vec<T>,
    index: HashMap<T, usize>,
    generators: Vec<T>,
    /// Breadth-first tree: `elements[i] = generators[g] · elements[parent]` for `words[i] = Some((parent, g))`.
    words: Vec<Option<(u32, u32)>>,
}

impl<T: GroupElement> GroupTable<T> {
    /// Breadth-first closure of `generators`. Fails once more than `cap` elements appear.
    pub fn closure(name: impl Into<String>, generators: Vec<T>, cap: usize) -> Result<Self> {
        let first = generators.first().ok_or_else(|| Error::Contract("closure needs at least one generator".into()))?;
        let identity = first.mul(&first.inv());
        Self::closure_from(name, identity, generators, cap)
    }

    /// As [`GroupTable::closure`], starting from a given identity. Elements carrying floating
    /// point data need this to match a replay from [`GroupTable::from_words`] bit for bit.
    pub fn closure_from(name: impl Into<String>, identity: T, generators: Vec<T>, cap: usize) -> Result<Self> {
        let name = name.into();
        let mut elements = vec![identity.clone()];
        let mut index = HashMap::from([(identity, 0usize)]);
        let mut words = vec![None];
        let mut head = 0;
        while head < elements.len() {
            for (gi, g) in generators.iter().enumerate() {
                let h = g.mul(&elements[head]);
                if index.contains_key(&h) {
                    continue;
                }
                if elements.len() >= cap {
                    return Err(Error::SizeLimit { what: format!("closure of {name}"), limit: cap as u128 });
                }
                index.insert(h.clone(), elements.len());
                elements.push(h);
                words.push(Some((head as u32, gi as u32)));
            }
            head += 1;
        }
        Ok(Self { name, elements, index, generators, words })
    }

    /// Wraps an explicit element list. Checks that the list has no duplicates, that it
    /// contains every generator, and that the generators close to exactly this set.
    pub fn from_elements(name: impl Into<String>, elements: Vec<T>, generators: Vec<T>) -> Result<Self> {
        let name = name.into();
        match elements.first() {
            Some(e) if e.mul(e) == *e => {}
            _ => return Err(Error::Contract(format!("{name}: element list must start with the identity"))),
        }
        let mut index = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::Contract(format!("{name}: duplicate element at position {i}")));
            }
        }
        if let Some(g) = generators.iter().position(|g| !index.contains_key(g)) {
            return Err(Error::Contract(format!("{name}: generator {g} is not an element")));
        }
        if !generators.is_empty() {
            let check = Self::closure("check", generators.clone(), elements.len() + 1)?;
            if check.order() != elements.len() {
                return Err(Error::Contract(format!(
                    "{name}: generators close to {} elements, list has {}",
                    check.order(),
                    elements.len()
                )));
            }
        } else if elements.len() > 1 {
            return Err(Error::Contract(format!("{name}: nontrivial group without generators")));
        }
        let words = vec![None; elements.len()];
        Ok(Self { name, elements, index, generators, words })
    }

    /// Rebuilds a closure-built table from its identity, generators and breadth-first words
    /// by replaying the products, checking each against `expected` when given.
    pub fn from_words(
        name: impl Into<String>,
        identity: T,
        generators: Vec<T>,
        words: &[Option<(u32, u32)>],
        expected: Option<&[T]>,
    ) -> Result<Self> {
        let name = name.into();
        let mut elements: Vec<T> = Vec::with_capacity(words.len());
        let mut index = HashMap::with_capacity(words.len());
        for (i, word) in words.iter().enumerate() {
            let e = match (i, word) {
                (0, None) => identity.clone(),
                (_, Some((parent, g))) if (*parent as usize) < i && (*g as usize) < generators.len() => {
                    generators[*g as usize].mul(&elements[*parent as usize])
                }
                _ => return Err(Error::CacheFormat(format!("{name}: bad word at record {i}"))),
            };
            if expected.is_some_and(|exp| exp.get(i) != Some(&e)) {
                return Err(Error::CacheFormat(format!("{name}: record {i} does not match its word")));
            }
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::CacheFormat(format!("{name}: duplicate element at record {i}")));
            }
            elements.push(e);
        }
        let closed = elements.par_iter().all(|e| generators.iter().all(|g| index.contains_key(&g.mul(e))));
        if !closed {
            return Err(Error::CacheFormat(format!("{name}: replayed elements are not closed under the generators")));
        }
        Ok(Self { name, elements, index, generators, words: words.to_vec() })
    }

    /// The subgroup generated by `candidates`, with a small generating set picked greedily
    /// (a candidate is kept only if it is not already in the group generated so far).
    pub fn generate(name: impl Into<String>, identity: T, candidates: impl IntoIterator<Item = T>, cap: usize) -> Result<Self> {
        let name = name.into();
        let mut gens: Vec<T> = Vec::new();
        let mut current = Self::trivial(&name, identity.clone());
        for c in candidates {
            if current.contains(&c) {
                continue;
            }
            gens.push(c);
            current = Self::closure(name.clone(), gens.clone(), cap)?;
        }
        Ok(current)
    }

    pub fn trivial(name: impl Into<String>, identity: T) -> Self {
        Self {
            name: name.into(),
            elements: vec![identity.clone()],
            index: HashMap::from([(identity.clone(), 0)]),
            generators: vec![identity],
            words: vec![None],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[T] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &T {
        &self.elements[i]
    }

    pub fn generators(&self) -> &[T] {
        &self.generators
    }

    pub fn identity(&self) -> &T {
        &self.elements[0]
    }

    pub fn position(&self, g: &T) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn contains(&self, g: &T) -> bool {
        self.index.contains_key(g)
    }

    /// Breadth-first word data, present for closure-built tables.
    pub fn words(&self) -> &[Option<(u32, u32)>] {
        &self.words
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Subgroup of elements satisfying `keep`, in table order, with greedy generators.
    pub fn filter(&self, name: impl Into<String>, keep: impl Fn(&T) -> bool + Sync) -> Result<Self> {
        let name = name.into();
        let elements: Vec<T> = self.elements.par_iter().filter(|g| keep(g)).cloned().collect();
        if elements.first() != Some(self.identity()) {
            return Err(Error::Contract(format!("{name}: filtered set does not contain the identity")));
        }
        let gens = Self::generate(&name, self.identity().clone(), elements.iter().cloned(), elements.len())?.generators;
        let gens = if elements.len() == 1 { Vec::new() } else { gens };
        Self::from_elements(name, elements, gens)
    }

    /// Spot-checks closure, associativity and inverses on `samples` seeded random triples.
    pub fn check_axioms(&self, samples: usize, seed: u64) -> Result<()> {
        let mut rng = seeded_rng(seed);
        let n = self.order();
        let e = self.identity();
        for _ in 0..samples {
            let a = &self.elements[rng.random_range(0..n)];
            let b = &self.elements[rng.random_range(0..n)];
            let c = &self.elements[rng.random_range(0..n)];
            let ab = a.mul(b);
            if !self.contains(&ab) {
                return Err(Error::Contract(format!("{}: not closed under multiplication", self.name)));
            }
            if ab.mul(c) != a.mul(&b.mul(c)) {
                return Err(Error::Contract(format!("{}: multiplication not associative", self.name)));
            }
            if a.mul(&a.inv()) != *e || e.mul(a) != *a {
                return Err(Error::Contract(format!("{}: inverse or identity law fails", self.name)));
            }
        }
        Ok(())
    }
}

/// An action of a group with elements `T` on the points `0..domain_size()`.
pub trait Action<T: Sync>: Sync {
    fn domain_size(&self) -> usize;
    fn act(&self, g: &T, x: usize) -> usize;

    /// The permutation of the domain induced by `g`.
    fn permutation(&self, g: &T) -> Vec<u32> {
        (0..self.domain_size()).into_par_iter().map(|x| self.act(g, x) as u32).collect()
    }
}

/// Checks `(gh)·x = g·(h·x)` and `e·x = x` on seeded samples.
pub fn check_action<T: GroupElement, A: Action<T> + ?Sized>(group: &GroupTable<T>, action: &A, samples: usize, seed: u64) -> Result<()> {
    let n = action.domain_size();
    if n == 0 {
        return Ok(());
    }
    let mut rng = seeded_rng(seed);
    for _ in 0..samples {
        let g = &group.elements[rng.random_range(0..group.order())];
        let h = &group.elements[rng.random_range(0..group.order())];
        let x = rng.random_range(0..n);
        let lhs = action.act(&g.mul(h), x);
        let rhs = action.act(g, action.act(h, x));
        if lhs != rhs || lhs >= n {
            return Err(Error::Contract(format!("{}: (gh)·x != g·(h·x) at point {x}", group.name)));
        }
        if action.act(group.identity(), x) != x {
            return Err(Error::Contract(format!("{}: identity moves point {x}", group.name)));
        }
    }
    Ok(())
}

/// Partition of an action domain into orbits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    orbit_of: Vec<u32>,
    reps: Vec<usize>,
    sizes: Vec<usize>,
}

impl OrbitPartition {
    pub fn orbit_count(&self) -> usize {
        self.reps.len()
    }

    /// Orbit sizes in order of first appearance.
    pub fn orbit_sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Orbit sizes sorted ascending.
    pub fn size_multiset(&self) -> Vec<usize> {
        let mut s = self.sizes.clone();
        s.sort_unstable();
        s
    }

    /// Smallest point of each orbit.
    pub fn representatives(&self) -> &[usize] {
        &self.reps
    }

    pub fn rep(&self, x: usize) -> usize {
        self.reps[self.orbit_of[x] as usize]
    }

    pub fn orbit_index(&self, x: usize) -> usize {
        self.orbit_of[x] as usize
    }

    pub fn domain_size(&self) -> usize {
        self.orbit_of.len()
    }
}

/// Orbits of `group` on the action domain, found by sweeping generator images only.
pub fn orbits<T: GroupElement, A: Action<T> + ?Sized>(group: &GroupTable<T>, action: &A) -> Result<OrbitPartition> {
    check_action(group, action, 32, 0x5eed)?;
    let perms: Vec<Vec<u32>> = group.generators.iter().map(|g| action.permutation(g)).collect();
    Ok(orbits_from_permutations(action.domain_size(), &perms))
}

pub(crate) fn orbits_from_permutations(n: usize, perms: &[Vec<u32>]) -> OrbitPartition {
    let mut orbit_of = vec![u32::MAX; n];
    let (mut reps, mut sizes) = (Vec::new(), Vec::new());
    let mut stack = Vec::new();
    for start in 0..n {
        if orbit_of[start] != u32::MAX {
            continue;
        }
        let id = reps.len() as u32;
        orbit_of[start] = id;
        stack.push(start);
        let mut size = 0;
        while let Some(x) = stack.pop() {
            size += 1;
            for perm in perms {
                let y = perm[x] as usize;
                if orbit_of[y] == u32::MAX {
                    orbit_of[y] = id;
                    stack.push(y);
                }
            }
        }
        reps.push(start);
        sizes.push(size);
    }
    OrbitPartition { orbit_of, reps, sizes }
}

/// The orbit of a single point, in breadth-first order.
pub fn orbit_of<T: GroupElement, A: Action<T> + ?Sized>(group: &GroupTable<T>, action: &A, x: usize) -> Vec<usize> {
    let mut seen = HashSet::from([x]);
    let mut out = vec![x];
    let mut head = 0;
    while head < out.len() {
        let y = out[head];
        for g in &group.generators {
            let z = action.act(g, y);
            if seen.insert(z) {
                out.push(z);
            }
        }
        head += 1;
    }
    out
}

/// Orbit count by Burnside's lemma, `(1/|G|) Σ_g |Fix(g)|`, computed over all elements.
pub fn burnside_orbit_count<T: GroupElement, A: Action<T> + ?Sized>(group: &GroupTable<T>, action: &A) -> Result<u64> {
    let n = action.domain_size();
    let total: u64 = group
        .elements
        .par_iter()
        .map(|g| (0..n).filter(|&x| action.act(g, x) == x).count() as u64)
        .sum();
    let order = group.order() as u64;
    if !total.is_multiple_of(order) {
        return Err(Error::Consistency(format!("Burnside sum {total} not divisible by |G| = {order}")));
    }
    Ok(total / order)
}

/// The stabiliser `{g : g·x = x}`, obtained by filtering the element list.
pub fn point_stabilizer<T: GroupElement, A: Action<T> + ?Sized>(group: &GroupTable<T>, action: &A, x: usize) -> Result<GroupTable<T>> {
    if x >= action.domain_size() {
        return Err(Error::Contract(format!("point {x} outside domain of size {}", action.domain_size())));
    }
    group.filter(format!("Stab_{}({x})", group.name), |g| action.act(g, x) == x)
}

/// Number of orbits of a point stabiliser on the domain, counting the fixed point's own orbit.
pub fn transitivity_rank<T: GroupElement, A: Action<T> + ?Sized>(group: &GroupTable<T>, action: &A) -> Result<usize> {
    let part = orbits(group, action)?;
    if part.orbit_count() != 1 {
        return Err(Error::Intransitive(format!(
            "{} has {} orbits on the domain; rank is undefined",
            group.name,
            part.orbit_count()
        )));
    }
    let stab = point_stabilizer(group, action, 0)?;
    Ok(orbits(&stab, action)?.orbit_count())
}

/// Smallest normal subgroup containing `seeds`.
pub fn normal_closure<T: GroupElement>(group: &GroupTable<T>, seeds: impl IntoIterator<Item = T>) -> Result<GroupTable<T>> {
    let cap = group.order();
    let name = format!("ncl({})", group.name);
    let mut sub = GroupTable::generate(&name, group.identity().clone(), seeds, cap)?;
    loop {
        let missing: Vec<T> = sub
            .generators
            .iter()
            .flat_map(|s| group.generators.iter().map(move |g| g.mul(s).mul(&g.inv())))
            .filter(|c| !sub.contains(c))
            .collect();
        if missing.is_empty() {
            return Ok(sub);
        }
        let mut cands = sub.generators.clone();
        cands.extend(missing);
        sub = GroupTable::generate(&name, group.identity().clone(), cands, cap)?;
    }
}

fn commutator<T: GroupElement>(a: &T, b: &T) -> T {
    a.mul(b).mul(&a.inv()).mul(&b.inv())
}

/// The commutator subgroup `[G, G]`, as the normal closure of commutators of generators.
pub fn derived_subgroup<T: GroupElement>(group: &GroupTable<T>) -> Result<GroupTable<T>> {
    let gens = &group.generators;
    let comms: Vec<T> = gens.iter().flat_map(|a| gens.iter().map(move |b| commutator(a, b))).collect();
    Ok(normal_closure(group, comms)?.with_name(format!("[{0},{0}]", group.name)))
}

/// Subgroup generated by all commutators `ghg⁻¹h⁻¹`; quadratic in `|G|`, kept as a
/// brute-force cross-check for [`derived_subgroup`].
pub fn derived_subgroup_brute_force<T: GroupElement>(group: &GroupTable<T>) -> Result<GroupTable<T>> {
    let all: HashSet<T> = group
        .elements
        .par_iter()
        .flat_map_iter(|a| group.elements.iter().map(move |b| commutator(a, b)))
        .collect();
    let mut sorted: Vec<T> = all.into_iter().collect();
    sorted.sort_by_key(|g| group.position(g));
    GroupTable::generate(format!("[{0},{0}]", group.name), group.identity().clone(), sorted, group.order())
}

/// Conjugacy classes as lists of element positions, classes ordered by smallest member.
pub fn conjugacy_classes<T: GroupElement>(group: &GroupTable<T>) -> Vec<Vec<usize>> {
    let perms: Vec<Vec<u32>> = group
        .generators
        .iter()
        .map(|g| {
            let gi = g.inv();
            group.elements.iter().map(|x| group.position(&g.mul(x).mul(&gi)).expect("closed") as u32).collect()
        })
        .collect();
    let part = orbits_from_permutations(group.order(), &perms);
    let mut classes = vec![Vec::new(); part.orbit_count()];
    for x in 0..group.order() {
        classes[part.orbit_index(x)].push(x);
    }
    classes
}

/// True iff the only normal subgroups are trivial and the whole group (checked by taking
/// the normal closure of one element from every nontrivial conjugacy class).
pub fn is_simple<T: GroupElement>(group: &GroupTable<T>) -> Result<bool> {
    if group.order() == 1 {
        return Ok(false);
    }
    for class in conjugacy_classes(group).into_iter().skip(1) {
        let rep = group.element(class[0]).clone();
        if normal_closure(group, [rep])?.order() != group.order() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Result of the minimal-block test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Primitivity {
    pub primitive: bool,
    /// A nontrivial block system when imprimitive, blocks listed by smallest point.
    pub blocks: Option<Vec<Vec<usize>>>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
}

/// Tests primitivity of a transitive action: for each `y ≠ 0`, the finest block system in
/// which `0` and `y` share a block is computed by closing the pair under the generators.
pub fn primitivity<T: GroupElement, A: Action<T> + ?Sized>(group: &GroupTable<T>, action: &A) -> Result<Primitivity> {
    let n = action.domain_size();
    let part = orbits(group, action)?;
    if part.orbit_count() != 1 {
        return Err(Error::Intransitive(format!("{} is not transitive; primitivity undefined", group.name)));
    }
    let perms: Vec<Vec<u32>> = group.generators.iter().map(|g| action.permutation(g)).collect();
    for y in 1..n {
        let mut uf = UnionFind((0..n).collect());
        let mut queue = vec![(0usize, y)];
        uf.0[y] = 0;
        while let Some((a, b)) = queue.pop() {
            for perm in &perms {
                let (ra, rb) = (uf.find(perm[a] as usize), uf.find(perm[b] as usize));
                if ra != rb {
                    let (lo, hi) = (ra.min(rb), ra.max(rb));
                    uf.0[hi] = lo;
                    queue.push((perm[a] as usize, perm[b] as usize));
                }
            }
        }
        let root = uf.find(0);
        let block_size = (0..n).filter(|&x| uf.find(x) == root).count();
        if block_size < n {
            let mut blocks: HashMap<usize, Vec<usize>> = HashMap::new();
            for x in 0..n {
                let r = uf.find(x);
                blocks.entry(r).or_default().push(x);
            }
            let mut blocks: Vec<Vec<usize>> = blocks.into_values().collect();
            blocks.sort();
            return Ok(Primitivity { primitive: false, blocks: Some(blocks) });
        }
    }
    Ok(Primitivity { primitive: true, blocks: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: usize) -> GroupTable<Perm> {
        let gen = Perm::from_images((0..n as u32).map(|i| (i + 1) % n as u32).collect()).unwrap();
        GroupTable::closure(format!("C{n}"), vec![gen], n).unwrap()
    }

    fn symmetric(n: usize) -> GroupTable<Perm> {
        let cycle = Perm::from_images((0..n as u32).map(|i| (i + 1) % n as u32).collect()).unwrap();
        let mut swap: Vec<u32> = (0..n as u32).collect();
        swap.swap(0, 1);
        GroupTable::closure(format!("S{n}"), vec![Perm::from_images(swap).unwrap(), cycle], 1 << 20).unwrap()
    }

    #[test]
    fn closure_of_identity_is_trivial() {
        let id = Perm::identity(4);
        let g = GroupTable::closure("1", vec![id], 10).unwrap();
        assert_eq!(g.order(), 1);
    }

    #[test]
    fn closure_cap_is_enforced() {
        let err = GroupTable::closure("S5", symmetric(5).generators().to_vec(), 100).unwrap_err();
        assert!(matches!(err, Error::SizeLimit { .. }));
    }

    #[test]
    fn closure_ordering_is_deterministic() {
        let a = symmetric(4);
        let b = symmetric(4);
        assert_eq!(a.elements(), b.elements());
        assert_eq!(a.order(), 24);
        a.check_axioms(200, 1).unwrap();
    }

    #[test]
    fn trivial_group_orbits_are_points() {
        let g = GroupTable::trivial("1", Perm::identity(5));
        let part = orbits(&g, &PermAction::new(5)).unwrap();
        assert_eq!(part.orbit_count(), 5);
    }

    #[test]
    fn bad_action_is_detected() {
        struct Broken;
        impl Action<Perm> for Broken {
            fn domain_size(&self) -> usize {
                4
            }
            fn act(&self, g: &Perm, x: usize) -> usize {
                // right action used as if it were a left action
                g.inv().apply(x)
            }
        }
        let s4 = symmetric(4);
        assert!(matches!(orbits(&s4, &Broken), Err(Error::Contract(_))));
    }

    #[test]
    fn burnside_agrees_with_sweep() {
        let s4 = symmetric(4);
        let act = PermAction::new(4);
        assert_eq!(burnside_orbit_count(&s4, &act).unwrap(), 1);
        let c6 = cyclic(6);
        let part = orbits(&c6, &act_pairs(6)).unwrap();
        assert_eq!(burnside_orbit_count(&c6, &act_pairs(6)).unwrap() as usize, part.orbit_count());
    }

    struct PairAction(usize);
    impl Action<Perm> for PairAction {
        fn domain_size(&self) -> usize {
            self.0 * self.0
        }
        fn act(&self, g: &Perm, x: usize) -> usize {
            g.apply(x / self.0) * self.0 + g.apply(x % self.0)
        }
    }
    fn act_pairs(n: usize) -> PairAction {
        PairAction(n)
    }

    #[test]
    fn orbit_stabilizer_on_pairs() {
        let s4 = symmetric(4);
        let act = act_pairs(4);
        let part = orbits(&s4, &act).unwrap();
        assert_eq!(part.orbit_count(), 2);
        for x in [0, 1, 7] {
            let stab = point_stabilizer(&s4, &act, x).unwrap();
            assert_eq!(orbit_of(&s4, &act, x).len() * stab.order(), s4.order());
            assert_eq!(part.orbit_sizes()[part.orbit_index(x)], orbit_of(&s4, &act, x).len());
        }
    }

    #[test]
    fn derived_subgroups() {
        let c6 = cyclic(6);
        assert_eq!(derived_subgroup(&c6).unwrap().order(), 1);
        let s4 = symmetric(4);
        assert_eq!(derived_subgroup(&s4).unwrap().order(), 12);
        assert_eq!(derived_subgroup_brute_force(&s4).unwrap().order(), 12);
        let s5 = symmetric(5);
        let a5 = derived_subgroup(&s5).unwrap();
        assert_eq!(a5.order(), 60);
        assert!(is_simple(&a5).unwrap());
        assert!(!is_simple(&s5).unwrap());
        assert_eq!(derived_subgroup(&a5).unwrap().order(), 60);
    }

    #[test]
    fn rank_of_symmetric_groups() {
        let s4 = symmetric(4);
        assert_eq!(transitivity_rank(&s4, &PermAction::new(4)).unwrap(), 2);
        let c4 = cyclic(4);
        assert_eq!(transitivity_rank(&c4, &PermAction::new(4)).unwrap(), 4);
        let trivial = GroupTable::trivial("1", Perm::identity(3));
        assert!(matches!(transitivity_rank(&trivial, &PermAction::new(3)), Err(Error::Intransitive(_))));
    }

    #[test]
    fn regular_c4_is_imprimitive() {
        let c4 = cyclic(4);
        let res = primitivity(&c4, &PermAction::new(4)).unwrap();
        assert!(!res.primitive);
        assert_eq!(res.blocks.unwrap(), vec![vec![0, 2], vec![1, 3]]);
        let c5 = cyclic(5);
        assert!(primitivity(&c5, &PermAction::new(5)).unwrap().primitive);
        assert!(primitivity(&symmetric(4), &PermAction::new(4)).unwrap().primitive);
    }

    #[test]
    fn conjugacy_classes_of_s4() {
        let sizes: Vec<usize> = {
            let mut s: Vec<usize> = conjugacy_classes(&symmetric(4)).iter().map(Vec::len).collect();
            s.sort();
            s
        };
        assert_eq!(sizes, vec![1, 3, 6, 6, 8]);
    }

    #[test]
    fn filter_builds_subgroup() {
        let s4 = symmetric(4);
        let stab = s4.filter("fix0", |g| g.apply(0) == 0).unwrap();
        assert_eq!(stab.order(), 6);
        assert!(stab.generators().len() <= 2);
        assert!(s4.filter("bad", |g| g.apply(0) == 1).is_err());
    }
}

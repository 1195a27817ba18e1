//! Projective Clifford groups in dimension `d = p^n ≤ 5`, the induced symplectic action,
//! and the exact fixed-point route to frame potentials.
//!
//! A Clifford unitary is identified, up to global phase, by its key `(F, a)`: conjugation
//! sends `D_{e_i}` to `τ^{a_i} D_{F e_i}`. Keys compose exactly, so closure and projective
//! deduplication never compare floating-point matrices. The dense unitary is carried
//! alongside and only read by numerical cross-checks.

use std::path::Path;

use num_complex::Complex64 as C64;
use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::groups::{self, derived_subgroup, CacheKind, GroupElement, GroupTable};
use crate::linalg::{seeded_rng, CMatrix};
use crate::pauli::{all_displacements, omega_power, tau_order, tau_power, Displacement};
use crate::symplectic::{sl2q_embedding, sp_order, SpGroup, SympMatrix, SympVector};

/// Exact rational used for frame potentials.
pub type Rational = Ratio<u128>;

const UNITARY_TOL: f64 = 1e-9;
const MATCH_TOL: f64 = 1e-6;

/// `(F, a)` with `U D_{e_i} U† = τ^{a_i} D_{F e_i}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct CliffordKey {
    f: SympMatrix,
    phases: Vec<u8>,
}

impl CliffordKey {
    pub fn new(f: SympMatrix, phases: Vec<u8>) -> Result<Self> {
        if phases.len() != f.dim() {
            return Err(Error::DimensionMismatch(format!("{} phases for a {}-dimensional F", phases.len(), f.dim())));
        }
        let ord = tau_order(f.p());
        if phases.iter().any(|&a| a as u32 >= ord) {
            return Err(Error::Domain(format!("phase exponent outside [0, {ord})")));
        }
        Ok(Self { f, phases })
    }

    pub fn identity(p: u32, n: u32) -> Self {
        Self { f: SympMatrix::identity(p, n), phases: vec![0; 2 * n as usize] }
    }

    pub fn f(&self) -> &SympMatrix {
        &self.f
    }

    pub fn phases(&self) -> &[u8] {
        &self.phases
    }

    /// `U D_{e_i} U†`.
    pub fn image(&self, i: usize) -> Displacement {
        let (p, n) = (self.f.p(), self.f.n());
        let col = SympVector::basis(p, n, i);
        Displacement::new(self.f.apply(&col), self.phases[i] as i64)
    }

    /// `U D U†` for an arbitrary phased displacement, by writing `D_ν` as a phased ordered
    /// product of basis displacements and conjugating factor by factor.
    pub fn conjugate(&self, d: &Displacement) -> Displacement {
        let (p, n) = (self.f.p(), self.f.n());
        let nu = d.mu();
        let mut word = Displacement::identity(p, n);
        let mut image = Displacement::identity(p, n);
        for k in 0..2 * n as usize {
            let (basis, img) = (Displacement::basis(p, n, k), self.image(k));
            for _ in 0..nu.coord(k) {
                word = word.mul(&basis);
                image = image.mul(&img);
            }
        }
        // word = τ^c D_ν, so τ^φ D_ν ↦ τ^{φ − c} · image
        image.with_phase(image.phase() as i64 + d.phase() as i64 - word.phase() as i64)
    }

    /// Key of `U·V` for `self = key(U)`, `rhs = key(V)`.
    pub fn compose(&self, rhs: &Self) -> Self {
        let f = self.f.mul(&rhs.f);
        let phases = (0..rhs.phases.len())
            .map(|i| {
                let img = self.conjugate(&rhs.image(i));
                debug_assert_eq!(*img.mu(), f.apply(&SympVector::basis(f.p(), f.n(), i)));
                img.phase() as u8
            })
            .collect();
        Self { f, phases }
    }

    /// Key of `U†`: if `U D_{F⁻¹e_i} U† = τ^φ D_{e_i}` then `U† D_{e_i} U = τ^{−φ} D_{F⁻¹e_i}`.
    pub fn inverse(&self) -> Self {
        let (p, n) = (self.f.p(), self.f.n());
        let finv = self.f.inv();
        let phases = (0..2 * n as usize)
            .map(|i| {
                let pre = Displacement::new(finv.apply(&SympVector::basis(p, n, i)), 0);
                let img = self.conjugate(&pre);
                (-(img.phase() as i64)).rem_euclid(tau_order(p) as i64) as u8
            })
            .collect();
        Self { f: finv, phases }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut bytes = self.f.encode();
        bytes.extend(&self.phases);
        bytes
    }

    pub fn decode(p: u32, n: u32, bytes: &[u8]) -> Result<Self> {
        let dim = 2 * n as usize;
        if bytes.len() != dim * dim + dim {
            return Err(Error::CacheFormat(format!("Clifford key of {} bytes, expected {}", bytes.len(), dim * dim + dim)));
        }
        let f = SympMatrix::decode(p, n, &bytes[..dim * dim])?;
        Self::new(f, bytes[dim * dim..].to_vec()).map_err(|e| Error::CacheFormat(e.to_string()))
    }
}

/// A Clifford unitary together with its exact key. Equality and hashing use the key only,
/// so two unitaries differing by a global phase are the same element.
#[derive(Clone, Debug)]
pub struct CliffordElement {
    key: CliffordKey,
    unitary: CMatrix,
}

impl PartialEq for CliffordElement {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for CliffordElement {}

impl std::hash::Hash for CliffordElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key.hash(state)
    }
}

impl CliffordElement {
    /// Wraps a dense unitary, deriving its key with [`induced_symplectic`].
    pub fn from_unitary(p: u32, n: u32, unitary: CMatrix) -> Result<Self> {
        let key = induced_symplectic(p, n, &unitary)?;
        Ok(Self { key, unitary })
    }

    pub fn key(&self) -> &CliffordKey {
        &self.key
    }

    pub fn f(&self) -> &SympMatrix {
        &self.key.f
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }
}

impl GroupElement for CliffordElement {
    fn mul(&self, rhs: &Self) -> Self {
        Self { key: self.key.compose(&rhs.key), unitary: &self.unitary * &rhs.unitary }
    }

    fn inv(&self) -> Self {
        Self { key: self.key.inverse(), unitary: self.unitary.adjoint() }
    }

    fn encode(&self) -> Vec<u8> {
        self.key.encode()
    }
}

fn dense_displacements(p: u32, n: u32) -> Result<Vec<(Displacement, CMatrix)>> {
    all_displacements(p, n).into_iter().map(|d| d.matrix().map(|m| (d, m))).collect()
}

/// Key of a dense unitary: conjugates each `D_{e_i}`, matches the result against every
/// `τ^k D_μ`, and checks that the resulting `F` is symplectic.
pub fn induced_symplectic(p: u32, n: u32, u: &CMatrix) -> Result<CliffordKey> {
    let d = (p as usize).pow(n);
    if u.dim() != d {
        return Err(Error::DimensionMismatch(format!("{}-dimensional unitary for d = {d}", u.dim())));
    }
    if !u.is_unitary(UNITARY_TOL) {
        return Err(Error::NotClifford("matrix is not unitary".into()));
    }
    let disps = dense_displacements(p, n)?;
    let u_dag = u.adjoint();
    let dim = 2 * n as usize;
    let mut entries = vec![0u32; dim * dim];
    let mut phases = Vec::with_capacity(dim);
    for i in 0..dim {
        let basis = Displacement::basis(p, n, i).matrix()?;
        let m = &(u * &basis) * &u_dag;
        let (mu, overlap) = disps
            .iter()
            .map(|(disp, dm)| (disp.mu(), dm.adjoint().trace_product(&m) / d as f64))
            .find(|(_, t)| t.norm() > 0.5)
            .ok_or_else(|| Error::NotClifford(format!("U D_e{i} U† is not a phased displacement")))?;
        if (overlap.norm() - 1.0).abs() > MATCH_TOL {
            return Err(Error::NotClifford(format!("U D_e{i} U† overlaps a displacement with weight {}", overlap.norm())));
        }
        let k = (0..tau_order(p))
            .find(|&k| (tau_power(p, k as i64) - overlap).norm() < MATCH_TOL)
            .ok_or_else(|| Error::NotClifford(format!("phase {overlap} of U D_e{i} U† is not a power of τ")))?;
        for (row, c) in mu.coords().into_iter().enumerate() {
            entries[row * dim + i] = c;
        }
        phases.push(k as u8);
    }
    let f = SympMatrix::new(p, n, &entries)?;
    if !f.is_symplectic() {
        return Err(Error::NotClifford("induced map is not symplectic".into()));
    }
    CliffordKey::new(f, phases)
}

fn embed_on_party(g: &CMatrix, p: usize, n: usize, first: usize, width: usize) -> CMatrix {
    let left = CMatrix::identity(p.pow(first as u32));
    let right = CMatrix::identity(p.pow((n - first - width) as u32));
    left.kron(g).kron(&right)
}

/// Dense generators: Fourier and phase gate on each party, `|a, b⟩ ↦ |a, a + b⟩` on
/// neighbouring parties, and `X`, `Z` on each party.
pub fn clifford_generators(p: u32, n: u32) -> Result<Vec<CMatrix>> {
    let (pu, nu) = (p as usize, n as usize);
    let fourier = CMatrix::from_fn(pu, |u, v| omega_power(p, (u * v) as i64) / (p as f64).sqrt());
    let phase = CMatrix::from_fn(pu, |u, v| match (u == v, p) {
        (false, _) => C64::new(0.0, 0.0),
        (true, 2) => if u == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 1.0) },
        (true, _) => tau_power(p, (u * u) as i64),
    });
    let sum = CMatrix::from_fn(pu * pu, |row, col| {
        let (a, b) = (col / pu, col % pu);
        C64::new(if row == a * pu + (a + b) % pu { 1.0 } else { 0.0 }, 0.0)
    });
    let x = Displacement::basis(p, 1, 0).matrix()?;
    let z = Displacement::basis(p, 1, 1).matrix()?;
    let mut gens = Vec::new();
    for j in 0..nu {
        gens.push(embed_on_party(&fourier, pu, nu, j, 1));
        gens.push(embed_on_party(&phase, pu, nu, j, 1));
    }
    for j in 0..nu.saturating_sub(1) {
        gens.push(embed_on_party(&sum, pu, nu, j, 2));
    }
    for j in 0..nu {
        gens.push(embed_on_party(&x, pu, nu, j, 1));
        gens.push(embed_on_party(&z, pu, nu, j, 1));
    }
    Ok(gens)
}

/// An enumerated projective Clifford group.
#[derive(Clone, Debug)]
pub struct CliffordGroup {
    p: u32,
    n: u32,
    table: GroupTable<CliffordElement>,
}

impl CliffordGroup {
    pub fn d(&self) -> usize {
        (self.p as usize).pow(self.n)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn table(&self) -> &GroupTable<CliffordElement> {
        &self.table
    }

    pub fn order(&self) -> usize {
        self.table.order()
    }

    pub fn unitaries(&self) -> Vec<CMatrix> {
        self.table.elements().iter().map(|e| e.unitary.clone()).collect()
    }

    /// `d² · |Sp(2n, p)|`.
    pub fn expected_order(p: u32, n: u32) -> u128 {
        (p as u128).pow(2 * n) * sp_order(p, n)
    }

    fn name(p: u32, n: u32) -> String {
        format!("Clifford({})", p.pow(n))
    }

    fn identity_element(p: u32, n: u32) -> CliffordElement {
        CliffordElement { key: CliffordKey::identity(p, n), unitary: CMatrix::identity((p as usize).pow(n)) }
    }

    fn generator_elements(p: u32, n: u32) -> Result<Vec<CliffordElement>> {
        clifford_generators(p, n)?.into_iter().map(|u| CliffordElement::from_unitary(p, n, u)).collect()
    }

    fn check_dimension(p: u32, n: u32) -> Result<()> {
        let d = (p as u64).checked_pow(n).unwrap_or(u64::MAX);
        if !(2..=5).contains(&d) || !crate::ffield::is_prime(p) {
            return Err(Error::SizeLimit { what: format!("Clifford enumeration in dimension {d}"), limit: 5 });
        }
        Ok(())
    }

    /// Breadth-first closure of [`clifford_generators`], deduplicated by key and checked
    /// against `d² · |Sp(2n, p)|`.
    pub fn enumerate(p: u32, n: u32) -> Result<Self> {
        Self::check_dimension(p, n)?;
        let expected = Self::expected_order(p, n);
        let gens = Self::generator_elements(p, n)?;
        let name = Self::name(p, n);
        let table = GroupTable::closure_from(name.clone(), Self::identity_element(p, n), gens, expected as usize).map_err(|e| match e {
            Error::SizeLimit { .. } => Error::GenerationFailure { what: name.clone(), expected, got: expected + 1 },
            other => other,
        })?;
        if table.order() as u128 != expected {
            return Err(Error::GenerationFailure { what: name, expected, got: table.order() as u128 });
        }
        Ok(Self { p, n, table })
    }

    pub fn cache_file_name(p: u32, n: u32) -> String {
        format!("clifford_{}.group", p.pow(n))
    }

    pub fn load_or_enumerate(p: u32, n: u32, dir: Option<&Path>) -> Result<Self> {
        let Some(dir) = dir else { return Self::enumerate(p, n) };
        let path = dir.join(Self::cache_file_name(p, n));
        if path.exists() {
            return Self::read_cache(p, n, &path);
        }
        let group = Self::enumerate(p, n)?;
        std::fs::create_dir_all(dir)?;
        group.write_cache(&path)?;
        Ok(group)
    }

    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        groups::write_cache(&self.table, CacheKind::Unitary, file)
    }

    /// Reloads keys and words, replays the words to rebuild the unitaries, and checks every
    /// replayed key against the stored one.
    pub fn read_cache(p: u32, n: u32, path: &Path) -> Result<Self> {
        Self::check_dimension(p, n)?;
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let (header, records) = groups::read_cache(file)?;
        let name = Self::name(p, n);
        if header.kind != CacheKind::Unitary || header.name != name {
            return Err(Error::CacheFormat(format!("{path:?} holds {} ({}), expected {name}", header.name, header.kind)));
        }
        if header.order as u128 != Self::expected_order(p, n) {
            return Err(Error::CacheFormat(format!("{path:?}: order {} does not match |{name}|", header.order)));
        }
        let identity = Self::identity_element(p, n);
        let stored: Vec<CliffordElement> = records
            .iter()
            .map(|r| CliffordKey::decode(p, n, &r.encoding).map(|key| CliffordElement { key, unitary: CMatrix::zeros(1) }))
            .collect::<Result<_>>()?;
        let words: Vec<Option<(u32, u32)>> = records.iter().map(|r| r.word).collect();
        let table = GroupTable::from_words(name, identity, Self::generator_elements(p, n)?, &words, Some(&stored))?;
        Ok(Self { p, n, table })
    }

    /// The image `R ≤ Sp(2n, p)` of the group under `U ↦ F`.
    pub fn symplectic_image(&self) -> Result<GroupTable<SympMatrix>> {
        let gens: Vec<SympMatrix> = self.table.generators().iter().map(|g| *g.f()).collect();
        GroupTable::closure(format!("R({})", self.d()), gens, sp_order(self.p, self.n) as usize)
    }

    /// Positions of one element per symplectic image, in table order.
    pub fn coset_representatives(&self) -> Vec<usize> {
        let mut seen = std::collections::HashSet::new();
        (0..self.order()).filter(|&i| seen.insert(*self.table.element(i).f())).collect()
    }

    /// Positions of the displacement subgroup (`F = I`).
    pub fn displacement_subgroup(&self) -> Vec<usize> {
        let id = SympMatrix::identity(self.p, self.n);
        (0..self.order()).filter(|&i| *self.table.element(i).f() == id).collect()
    }

    /// Positions of elements whose `F` lies in `r`.
    pub fn preimage(&self, r: &GroupTable<SympMatrix>) -> Vec<usize> {
        (0..self.order()).filter(|&i| r.contains(self.table.element(i).f())).collect()
    }
}

/// Enumerates the Clifford group of dimension `p^n ≤ 5`.
pub fn enumerate_clifford(p: u32, n: u32) -> Result<CliffordGroup> {
    CliffordGroup::enumerate(p, n)
}

/// Outcome of [`key_step_check`] for one element.
#[derive(Clone, Debug, PartialEq)]
pub struct KeyStepReport {
    pub fixed_points: u64,
    pub nonzero: usize,
    pub expected_nonzero: usize,
    /// Largest distance of `|tr(U D_μ)|²` from the nearer of `0` and `f(F)`.
    pub max_deviation: f64,
    pub offending: Option<SympVector>,
    pub pass: bool,
}

/// Checks `|tr(U D_μ)|² ∈ {0, f(F)}` for all `μ`, with exactly `d²/f(F)` nonzero values.
pub fn key_step_check(elem: &CliffordElement, displacements: &[(Displacement, CMatrix)]) -> KeyStepReport {
    let f = elem.f().fixed_points();
    let mut nonzero = 0;
    let mut max_deviation = 0.0f64;
    let mut offending = None;
    for (disp, dm) in displacements {
        let v = elem.unitary.trace_product(dm).norm_sqr();
        let dev = v.abs().min((v - f as f64).abs());
        if dev > MATCH_TOL && offending.is_none() {
            offending = Some(*disp.mu());
        }
        max_deviation = max_deviation.max(dev);
        nonzero += usize::from(v > f as f64 / 2.0);
    }
    let expected_nonzero = displacements.len() / f as usize;
    let pass = offending.is_none() && nonzero == expected_nonzero;
    KeyStepReport { fixed_points: f, nonzero, expected_nonzero, max_deviation, offending, pass }
}

/// Runs [`key_step_check`] on the given element positions in parallel; returns the number
/// checked and the first failure, if any.
pub fn key_step_sweep(group: &CliffordGroup, positions: &[usize]) -> Result<(usize, Option<(usize, KeyStepReport)>)> {
    let disps = dense_displacements(group.p, group.n)?;
    let failure = positions
        .par_iter()
        .map(|&i| (i, key_step_check(group.table.element(i), &disps)))
        .find_first(|(_, r)| !r.pass);
    Ok((positions.len(), failure))
}

/// `samples` positions drawn deterministically from `seed`.
pub fn sample_positions(order: usize, samples: usize, seed: u64) -> Vec<usize> {
    let mut rng = seeded_rng(seed);
    (0..samples).map(|_| rng.random_range(0..order)).collect()
}

/// Checks on seeded pairs that the dense product `UV` induces `F(U)·F(V)` with the composed key.
pub fn homomorphism_check(group: &CliffordGroup, samples: usize, seed: u64) -> Result<bool> {
    let mut rng = seeded_rng(seed);
    for _ in 0..samples {
        let a = group.table.element(rng.random_range(0..group.order()));
        let b = group.table.element(rng.random_range(0..group.order()));
        let dense = induced_symplectic(group.p, group.n, &(&a.unitary * &b.unitary))?;
        if dense.f != a.f().mul(b.f()) || dense != a.key.compose(&b.key) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Φ_t = (1/|R|) Σ_{F ∈ R} f(F)^{t−1}` in exact arithmetic.
pub fn frame_potential_fixed_points(r: &[SympMatrix], t: u32) -> Result<Rational> {
    if t == 0 || r.is_empty() {
        return Err(Error::Domain("need t ≥ 1 and a nonempty group".into()));
    }
    let sum: u128 = r.par_iter().map(|f| (f.fixed_points() as u128).pow(t - 1)).sum();
    Ok(Rational::new(sum, r.len() as u128))
}

/// `q(q^{2t−4} − 1)/(q² − 1) + q^{t−2} + 1`.
pub fn restricted_closed_form(q: u32, t: u32) -> Result<Rational> {
    if t < 2 {
        return Err(Error::Domain("closed form needs t ≥ 2".into()));
    }
    let q = q as u128;
    Ok(Rational::new(q * (q.pow(2 * t - 4) - 1), q * q - 1) + Rational::from(q.pow(t - 2) + 1))
}

/// The restricted-Clifford frame potential evaluated three ways.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedPotential {
    pub q: u32,
    pub t: u32,
    pub closed_form: Rational,
    /// Sum over `SL(2, q)` with fixed points counted in `F_q²`.
    pub explicit: Rational,
    /// Same sum over the image in `Sp(2k, p)` with fixed points from `rank(F − I)`.
    pub embedded: Rational,
}

pub fn restricted_frame_potential(q: u32, t: u32) -> Result<RestrictedPotential> {
    let closed_form = restricted_closed_form(q, t)?;
    let sl = sl2q_embedding(q)?;
    let sum: u128 = sl.fixed_points().iter().map(|&f| (f as u128).pow(t - 1)).sum();
    let explicit = Rational::new(sum, sl.order() as u128);
    let embedded = frame_potential_fixed_points(&sl.embed()?, t)?;
    if explicit != closed_form || embedded != closed_form {
        return Err(Error::Consistency(format!(
            "restricted Φ_{t} at q = {q}: closed form {closed_form}, explicit {explicit}, embedded {embedded}"
        )));
    }
    Ok(RestrictedPotential { q, t, closed_form, explicit, embedded })
}

/// The index-2 subgroup of `Sp(4, 2)` obtained as its derived subgroup, with checks that
/// it has order 360 and is perfect.
pub fn locate_a6(sp42: &SpGroup) -> Result<GroupTable<SympMatrix>> {
    if (sp42.p(), sp42.n()) != (2, 2) {
        return Err(Error::Domain("A6 lives in Sp(4,2)".into()));
    }
    let a6 = derived_subgroup(sp42.table())?.with_name("A6");
    if a6.order() != 360 {
        return Err(Error::Consistency(format!("derived subgroup of Sp(4,2) has order {}", a6.order())));
    }
    if derived_subgroup(&a6)?.order() != a6.order() {
        return Err(Error::Consistency("derived subgroup of Sp(4,2) is not perfect".into()));
    }
    Ok(a6)
}

#[derive(Clone, Debug, PartialEq)]
pub struct A6Report {
    pub r_order: usize,
    /// `d² · |R|`.
    pub preimage_order: u128,
    /// `(t, Φ_t)` for `t = 2, 3, 4`.
    pub potentials: Vec<(u32, Rational)>,
}

pub fn a6_preimage_potentials(sp42: &SpGroup) -> Result<A6Report> {
    let a6 = locate_a6(sp42)?;
    let potentials =
        (2..=4).map(|t| frame_potential_fixed_points(a6.elements(), t).map(|v| (t, v))).collect::<Result<_>>()?;
    Ok(A6Report { r_order: a6.order(), preimage_order: 16 * a6.order() as u128, potentials })
}

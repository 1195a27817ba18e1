//! Frame potentials, Haar minima, twirls and design predicates.
//!
//! Floating-point sums are reduced in a fixed order (per-row or per-chunk partial sums
//! collected in index order, then added sequentially), so results do not depend on the
//! number of worker threads.

use std::collections::HashSet;
use std::fmt::Display;

use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{CliffordGroup, Rational};
use crate::error::{Error, Result};
use crate::groups::{orbits, GroupTable};
use crate::linalg::{compensated_sum, ginibre, haar_unitary, seeded_rng, vdot, CMatrix};
use crate::symplectic::{SympMatrix, TupleAction};

const TWIRL_CHUNK: usize = 32;
const OUTER_CHUNK: usize = 64;
const ORBIT_DOMAIN_LIMIT: u128 = 100_000_000;
const CLOSURE_SAMPLES: usize = 32;

fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Haar minimum `γ(t, d)`: the Catalan number `(2t)!/(t!(t+1)!)` for `d = 2`, `t!` for `d ≥ t`.
pub fn gamma(t: u32, d: u64) -> Result<u128> {
    if t == 0 || d == 0 {
        return Err(Error::Domain("γ needs t, d ≥ 1".into()));
    }
    if d == 2 {
        Ok(binomial(2 * t as u64, t as u64) / (t as u128 + 1))
    } else if d >= t as u64 {
        Ok(factorial(t))
    } else {
        Err(Error::Unsupported(format!("γ({t}, {d}) has no closed form here")))
    }
}

/// `d²(d⁴ − 3d² + 6)/2`.
pub fn min_3design_size(d: u64) -> u128 {
    let d = d as u128;
    d * d * (d.pow(4) - 3 * d * d + 6) / 2
}

/// `(1/K²) Σ_{j,k} |tr(U_j U_k†)|^{2t}`.
pub fn frame_potential_set(unitaries: &[CMatrix], t: u32) -> f64 {
    let k = unitaries.len() as f64;
    let rows: Vec<f64> = unitaries
        .par_iter()
        .map(|uj| compensated_sum(unitaries.iter().map(|uk| uk.inner(uj).norm_sqr().powi(t as i32))))
        .collect();
    compensated_sum(rows) / (k * k)
}

/// Single-sum form `(1/|G|) Σ_U |tr U|^{2t}` for a group given projectively. Closure is
/// spot-checked on seeded products by projective fingerprint.
pub fn frame_potential_group(unitaries: &[CMatrix], t: u32, seed: u64) -> Result<f64> {
    if unitaries.is_empty() {
        return Err(Error::Domain("empty group".into()));
    }
    let prints: HashSet<Vec<i64>> = unitaries.par_iter().map(|u| u.projective_fingerprint(1e-6)).collect();
    let mut rng = seeded_rng(seed);
    for _ in 0..CLOSURE_SAMPLES {
        let a = &unitaries[rng.random_range(0..unitaries.len())];
        let b = &unitaries[rng.random_range(0..unitaries.len())];
        if !prints.contains(&(a * b).projective_fingerprint(1e-6)) {
            return Err(Error::Contract("unitary set is not closed under multiplication".into()));
        }
    }
    let terms: Vec<f64> = unitaries.par_iter().map(|u| u.trace().norm_sqr().powi(t as i32)).collect();
    Ok(compensated_sum(terms) / unitaries.len() as f64)
}

/// Number of orbits of `R` on `(F_p^{2n})^{×(t−1)}` by explicit sweep.
pub fn frame_potential_orbit_count(r: &GroupTable<SympMatrix>, t: u32) -> Result<u64> {
    if t == 0 {
        return Err(Error::Domain("t must be positive".into()));
    }
    let id = r.identity();
    let (p, n) = (id.p(), id.n());
    let size = (p as u128).pow(2 * n * (t - 1));
    if size > ORBIT_DOMAIN_LIMIT {
        return Err(Error::SizeLimit { what: format!("tuple domain of size {size}"), limit: ORBIT_DOMAIN_LIMIT });
    }
    if t == 1 {
        return Ok(1);
    }
    Ok(orbits(r, &TupleAction::new(p, n, t - 1))?.orbit_count() as u64)
}

/// `(1/K) Σ_j U_j^{⊗t} A (U_j^{⊗t})†`.
pub fn twirl(unitaries: &[CMatrix], t: usize, a: &CMatrix) -> CMatrix {
    let partials: Vec<CMatrix> = unitaries
        .par_chunks(TWIRL_CHUNK)
        .map(|chunk| {
            let mut acc = CMatrix::zeros(a.dim());
            for u in chunk {
                acc.add_assign(&a.conjugate_by_tensor_power(u, t));
            }
            acc
        })
        .collect();
    let mut total = CMatrix::zeros(a.dim());
    for part in &partials {
        total.add_assign(part);
    }
    total.scale(C64::new(1.0 / unitaries.len() as f64, 0.0))
}

/// Twirl over `G = ⋃_r r·N`, computed as the twirl over the coset representatives of the
/// twirl over `N`. Valid when every element of `G` is `r·n` for exactly one pair.
pub fn twirl_factored(reps: &[CMatrix], normal: &[CMatrix], t: usize, a: &CMatrix) -> CMatrix {
    twirl(reps, t, &twirl(normal, t, a))
}

/// Twirl over an enumerated Clifford group, factored through its displacement subgroup.
pub fn clifford_twirl(group: &CliffordGroup, t: usize, a: &CMatrix) -> CMatrix {
    let pick = |idx: Vec<usize>| -> Vec<CMatrix> { idx.into_iter().map(|i| group.table().element(i).unitary().clone()).collect() };
    twirl_factored(&pick(group.coset_representatives()), &pick(group.displacement_subgroup()), t, a)
}

/// `max_V ‖V^{⊗t} T V^{⊗t†} − T‖_F / scale`.
pub fn commutant_defect(twirled: &CMatrix, t: usize, probes: &[CMatrix], scale: f64) -> f64 {
    probes
        .iter()
        .map(|v| (&twirled.conjugate_by_tensor_power(v, t) - twirled).frobenius_norm() / scale)
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwirlReport {
    pub d: usize,
    pub t: usize,
    pub operators: usize,
    pub probes: usize,
    pub seed: u64,
    /// Largest `‖[V^{⊗t}, T(A)]‖_F / ‖A‖_F` over operators and probes.
    pub max_defect: f64,
    /// Largest `‖T(T(A)) − T(A)‖_F / ‖A‖_F`.
    pub projection_defect: f64,
}

/// Twirls `operators` seeded Ginibre operators over the group and tests them against
/// `probes` seeded Haar unitaries.
pub fn twirl_commutant_check(group: &CliffordGroup, t: usize, operators: usize, probes: usize, seed: u64) -> TwirlReport {
    let d = group.d();
    let mut rng = seeded_rng(seed);
    let ops: Vec<CMatrix> = (0..operators).map(|_| ginibre(d.pow(t as u32), &mut rng)).collect();
    let vs: Vec<CMatrix> = (0..probes).map(|_| haar_unitary(d, &mut rng)).collect();
    let mut max_defect = 0.0f64;
    let mut projection_defect = 0.0f64;
    for a in &ops {
        let norm = a.frobenius_norm();
        let tw = clifford_twirl(group, t, a);
        max_defect = max_defect.max(commutant_defect(&tw, t, &vs, norm));
        let again = clifford_twirl(group, t, &tw);
        projection_defect = projection_defect.max((&again - &tw).frobenius_norm() / norm);
    }
    TwirlReport { d, t, operators, probes, seed, max_defect, projection_defect }
}

fn permutations(t: usize) -> Vec<Vec<usize>> {
    if t == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for perm in permutations(t - 1) {
        for pos in 0..t {
            let mut p = perm.clone();
            p.insert(pos, t - 1);
            out.push(p);
        }
    }
    out
}

/// Projector onto the symmetric subspace of `(C^d)^{⊗t}`.
#[derive(Clone, Debug)]
pub struct SymProjector {
    pub t: usize,
    pub d: usize,
    pub matrix: CMatrix,
}

impl SymProjector {
    pub fn new(d: usize, t: usize) -> Self {
        let big = d.pow(t as u32);
        let perms = permutations(t);
        let w = 1.0 / perms.len() as f64;
        let mut m = CMatrix::zeros(big);
        for u in 0..big {
            let digits: Vec<usize> = (0..t).map(|i| u / d.pow((t - 1 - i) as u32) % d).collect();
            for perm in &perms {
                let v = perm.iter().fold(0, |acc, &i| acc * d + digits[i]);
                m[(v, u)] += C64::new(w, 0.0);
            }
        }
        Self { t, d, matrix: m }
    }

    /// `C(d + t − 1, t)`.
    pub fn rank(&self) -> u128 {
        binomial((self.d + self.t - 1) as u64, self.t as u64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveDesignReport {
    pub states: usize,
    pub d: usize,
    pub t: usize,
    /// `‖Σ_j (ψ_jψ_j†)^{⊗t} − (K / C(d+t−1, t)) P_sym‖_F`.
    pub frobenius_error: f64,
    pub tolerance: f64,
    /// `(1/K²) Σ_{i,j} |⟨ψ_i|ψ_j⟩|^{2t}`.
    pub frame_potential: f64,
    pub expected_frame_potential: f64,
    pub pass: bool,
}

fn tensor_power_vec(v: &[C64], t: usize) -> Vec<C64> {
    (1..t).fold(v.to_vec(), |acc, _| acc.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect())
}

/// Compares `Σ_j (ψ_jψ_j†)^{⊗t}` with `(K / C(d+t−1, t)) P_sym` to Frobenius tolerance
/// `1e−8·K`, and reports the projective frame potential.
pub fn projective_design_check(states: &[Vec<C64>], t: usize) -> Result<ProjectiveDesignReport> {
    let first = states.first().ok_or_else(|| Error::Domain("empty state set".into()))?;
    let d = first.len();
    if d.pow(t as u32) > 1024 {
        return Err(Error::SizeLimit { what: format!("(C^{d})^⊗{t}"), limit: 1024 });
    }
    for (i, s) in states.iter().enumerate() {
        if s.len() != d {
            return Err(Error::DimensionMismatch(format!("state {i} has dimension {}", s.len())));
        }
        let norm = vdot(s, s).re.sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("state {i} has norm {norm}")));
        }
    }
    let k = states.len();
    let powers: Vec<Vec<C64>> = states.par_iter().map(|s| tensor_power_vec(s, t)).collect();
    let big = d.pow(t as u32);
    let partials: Vec<CMatrix> = powers
        .par_chunks(OUTER_CHUNK)
        .map(|chunk| {
            let mut acc = CMatrix::zeros(big);
            for v in chunk {
                acc.add_assign(&CMatrix::outer(v, v));
            }
            acc
        })
        .collect();
    let mut sum = CMatrix::zeros(big);
    for part in &partials {
        sum.add_assign(part);
    }
    let sym = SymProjector::new(d, t);
    let rank = sym.rank() as f64;
    let target = sym.matrix.scale(C64::new(k as f64 / rank, 0.0));
    let frobenius_error = (&sum - &target).frobenius_norm();
    let tolerance = 1e-8 * k as f64;
    let rows: Vec<f64> = states
        .par_iter()
        .map(|a| compensated_sum(states.iter().map(|b| vdot(a, b).norm_sqr().powi(t as i32))))
        .collect();
    let frame_potential = compensated_sum(rows) / (k * k) as f64;
    Ok(ProjectiveDesignReport {
        states: k,
        d,
        t,
        frobenius_error,
        tolerance,
        frame_potential,
        expected_frame_potential: 1.0 / rank,
        pass: frobenius_error <= tolerance,
    })
}

/// Largest `t ≤ t_max` such that `Φ_s = γ(s, d)` for every `s ≤ t`.
pub fn design_strength(d: u64, t_max: u32, phi: impl Fn(u32) -> Result<Rational>) -> Result<u32> {
    for t in 1..=t_max {
        let g = gamma(t, d)?;
        if phi(t)? != Rational::from(g) {
            return Ok(t - 1);
        }
    }
    Ok(t_max)
}

/// Formats `v` with 12 significant digits.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    if !(-4..12).contains(&magnitude) {
        return format!("{v:.11e}");
    }
    let decimals = (11 - magnitude).clamp(0, 20) as usize;
    format!("{v:.decimals$}")
}

/// One verified claim.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub claim: String,
    pub method: String,
    pub params: String,
    pub value: String,
    pub expected: String,
    pub pass: bool,
    pub runtime_ms: u64,
    pub seed: Option<u64>,
}

impl DesignReport {
    pub fn new(
        claim: impl Into<String>,
        method: impl Into<String>,
        params: impl Into<String>,
        value: impl Display,
        expected: impl Display,
        pass: bool,
    ) -> Self {
        Self {
            claim: claim.into(),
            method: method.into(),
            params: params.into(),
            value: value.to_string(),
            expected: expected.to_string(),
            pass,
            runtime_ms: 0,
            seed: None,
        }
    }

    /// Exact comparison.
    pub fn exact<V: Display + PartialEq>(claim: impl Into<String>, method: impl Into<String>, params: impl Into<String>, value: V, expected: V) -> Self {
        let pass = value == expected;
        Self::new(claim, method, params, value, expected, pass)
    }

    /// `|value − expected| ≤ rel_tol · max(1, |expected|)`.
    pub fn numeric(claim: impl Into<String>, method: impl Into<String>, params: impl Into<String>, value: f64, expected: f64, rel_tol: f64) -> Self {
        let pass = (value - expected).abs() <= rel_tol * expected.abs().max(1.0);
        Self::new(claim, method, params, fmt_sig(value), fmt_sig(expected), pass)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_runtime(mut self, ms: u64) -> Self {
        self.runtime_ms = ms;
        self
    }

    /// Equality of everything except the runtime.
    pub fn same_outcome(&self, other: &Self) -> bool {
        Self { runtime_ms: 0, ..self.clone() } == Self { runtime_ms: 0, ..other.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{enumerate_clifford, frame_potential_fixed_points};
    use crate::linalg::haar_state;
    use crate::symplectic::SpGroup;

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(3, 2).unwrap(), 5);
        assert_eq!(gamma(4, 2).unwrap(), 14);
        assert_eq!(gamma(3, 8).unwrap(), 6);
        assert_eq!(gamma(1, 7).unwrap(), 1);
        assert!(matches!(gamma(4, 3), Err(Error::Unsupported(_))));
        // Catalan numbers
        let catalan = [1, 2, 5, 14, 42, 132];
        for (t, c) in (1..).zip(catalan) {
            assert_eq!(gamma(t, 2).unwrap(), c);
        }
    }

    #[test]
    fn min_sizes() {
        assert_eq!(min_3design_size(2), 20);
        assert_eq!(min_3design_size(3), 270);
        assert_eq!(min_3design_size(4), 1712);
    }

    #[test]
    fn single_identity_potential() {
        assert_eq!(frame_potential_set(&[CMatrix::identity(2)], 2), 16.0);
    }

    #[test]
    fn set_group_and_fixed_point_paths_agree() {
        for (p, n) in [(2, 1), (3, 1), (2, 2)] {
            let g = enumerate_clifford(p, n).unwrap();
            let us = g.unitaries();
            let r = g.symplectic_image().unwrap();
            for t in 1..=4 {
                let exact = frame_potential_fixed_points(r.elements(), t).unwrap();
                assert!(exact.is_integer());
                let exact = *exact.numer() as f64;
                let group = frame_potential_group(&us, t, 1).unwrap();
                assert!((group - exact).abs() < 1e-6 * exact, "p={p} n={n} t={t}");
                assert_eq!(frame_potential_orbit_count(&r, t).unwrap() as f64, exact);
                if us.len() <= 216 {
                    assert!((frame_potential_set(&us, t) - exact).abs() < 1e-6 * exact);
                }
            }
        }
    }

    #[test]
    fn group_path_rejects_non_groups() {
        let g = enumerate_clifford(2, 1).unwrap();
        let mut us = g.unitaries();
        us.truncate(5);
        assert!(matches!(frame_potential_group(&us, 2, 3), Err(Error::Contract(_))));
    }

    #[test]
    fn orbit_count_examples() {
        let sp22 = SpGroup::enumerate(2, 1).unwrap();
        assert_eq!(frame_potential_orbit_count(sp22.table(), 2).unwrap(), 2);
        let sp43 = SpGroup::enumerate(3, 2).unwrap();
        assert_eq!(frame_potential_orbit_count(sp43.table(), 3).unwrap(), 8);
    }

    #[test]
    fn sym_projector_properties() {
        for (d, t) in [(2, 1), (2, 3), (3, 2), (4, 3), (2, 4)] {
            let s = SymProjector::new(d, t);
            assert!((&(&s.matrix * &s.matrix) - &s.matrix).frobenius_norm() < 1e-12);
            assert!(s.matrix.is_hermitian(1e-12));
            assert_eq!(s.matrix.trace().re.round() as u128, s.rank());
        }
        assert_eq!(SymProjector::new(2, 3).rank(), 4);
    }

    #[test]
    fn one_state_is_not_a_design() {
        let r = projective_design_check(&[vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]], 1).unwrap();
        assert!(!r.pass);
        let unnormalised = vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)];
        assert!(projective_design_check(&[unnormalised], 1).is_err());
    }

    #[test]
    fn haar_like_set_fails_exactly_when_expected() {
        let mut rng = seeded_rng(2);
        let states: Vec<Vec<C64>> = (0..10).map(|_| haar_state(2, &mut rng)).collect();
        assert!(!projective_design_check(&states, 2).unwrap().pass);
    }

    #[test]
    fn twirl_is_irreducible_at_t1() {
        let g = enumerate_clifford(3, 1).unwrap();
        let a = ginibre(3, &mut seeded_rng(4));
        let tw = twirl(&g.unitaries(), 1, &a);
        let expect = CMatrix::identity(3).scale(a.trace() / 3.0);
        assert!((&tw - &expect).frobenius_norm() < 1e-10);
    }

    #[test]
    fn factored_twirl_matches_plain_twirl() {
        let g = enumerate_clifford(2, 1).unwrap();
        let a = ginibre(8, &mut seeded_rng(8));
        let plain = twirl(&g.unitaries(), 3, &a);
        let factored = clifford_twirl(&g, 3, &a);
        assert!((&plain - &factored).frobenius_norm() < 1e-10);
    }

    #[test]
    fn twirl_commutant() {
        let g2 = enumerate_clifford(2, 1).unwrap();
        let r = twirl_commutant_check(&g2, 3, 3, 10, 21);
        assert!(r.max_defect < 1e-8 && r.projection_defect < 1e-8, "{r:?}");
        let g3 = enumerate_clifford(3, 1).unwrap();
        let r = twirl_commutant_check(&g3, 3, 2, 10, 21);
        assert!(r.max_defect > 1e-3, "{r:?}");
        assert!(r.projection_defect < 1e-8);
    }

    #[test]
    fn strength() {
        let sp = |p, n| SpGroup::enumerate(p, n).unwrap();
        let s22 = sp(2, 1);
        assert_eq!(design_strength(2, 6, |t| frame_potential_fixed_points(s22.table().elements(), t)).unwrap(), 3);
        let s43 = sp(3, 2);
        assert_eq!(design_strength(9, 4, |t| frame_potential_fixed_points(s43.table().elements(), t)).unwrap(), 2);
    }

    #[test]
    fn report_helpers() {
        let r = DesignReport::exact("phi", "fixed-points", "d=2 t=3", Rational::from(5), Rational::from(5));
        assert!(r.pass);
        assert_eq!(r.value, "5");
        let r = DesignReport::exact("phi", "m", "", Rational::new(5, 24), Rational::new(1, 5));
        assert_eq!((r.value.as_str(), r.pass), ("5/24", false));
        let n = DesignReport::numeric("x", "m", "", 6.0000000001, 6.0, 1e-6);
        assert!(n.pass);
        assert!(n.same_outcome(&n.clone().with_runtime(99)));
        assert_eq!(fmt_sig(0.25), "0.250000000000");
        assert_eq!(fmt_sig(4.5e-17), "4.50000000000e-17");
    }
}

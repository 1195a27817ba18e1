//! Operator bases permuted by conjugation: covariance and transitivity checks, triple
//! products, phase-point operators in odd prime dimension, and a finite search for
//! covariant bases through subgroups of index `d²`.

use num_complex::Complex64 as C64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::clifford::CliffordGroup;
use crate::error::{Error, Result};
use crate::groups::subgroup_scan;
use crate::groups::GroupElement;
use crate::linalg::{complex_rank, seeded_rng, CMatrix};
use crate::pauli::{all_displacements, omega_power};
use crate::symplectic::SympVector;

const GRAM_TOL: f64 = 1e-8;
const MATCH_TOL: f64 = 1e-7;
const CLUSTER_TOL: f64 = 1e-8;
const MAX_BASIS_DIM: usize = 4;

#[derive(Clone, Debug)]
pub struct OperatorBasis {
    d: usize,
    ops: Vec<CMatrix>,
}

impl OperatorBasis {
    /// Rejects anything that is not `d²` linearly independent `d × d` operators.
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let d = ops.first().map_or(0, CMatrix::dim);
        if d == 0 || ops.len() != d * d || ops.iter().any(|m| m.dim() != d) {
            return Err(Error::Construction(format!("{} operators do not form a square operator basis", ops.len())));
        }
        let gram: Vec<Vec<C64>> = ops.iter().map(|a| ops.iter().map(|b| a.inner(b)).collect()).collect();
        let rank = complex_rank(&gram, GRAM_TOL);
        if rank != d * d {
            return Err(Error::Construction(format!("Gram matrix has rank {rank}, need {}", d * d)));
        }
        Ok(Self { d, ops })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// The displacement operators `D_μ` in index order of `μ`.
    pub fn displacements(p: u32, n: u32) -> Result<Self> {
        Self::new(all_displacements(p, n).iter().map(|d| d.matrix()).collect::<Result<_>>()?)
    }
}

/// Phase-point operators `A_μ = (1/d) Σ_ν ω^{⟨μ,ν⟩} D_ν` for an odd prime `d`.
#[derive(Clone, Debug)]
pub struct PhasePointBasis {
    pub basis: OperatorBasis,
}

impl PhasePointBasis {
    pub fn new(p: u32) -> Result<Self> {
        if p.is_multiple_of(2) || !crate::ffield::is_prime(p) {
            return Err(Error::Unsupported(format!("phase-point operators need an odd prime dimension, got {p}")));
        }
        if (p as usize) > MAX_BASIS_DIM + 1 {
            return Err(Error::SizeLimit { what: format!("phase-point basis in dimension {p}"), limit: 5 });
        }
        let ds = all_displacements(p, 1);
        let dense: Vec<CMatrix> = ds.iter().map(|d| d.matrix()).collect::<Result<_>>()?;
        let d = p as usize;
        let ops = (0..d * d)
            .map(|m| {
                let mu = SympVector::from_index(p, 1, m);
                let mut a = CMatrix::zeros(d);
                for (nu, dm) in ds.iter().zip(&dense) {
                    a.axpy(omega_power(p, mu.form(nu.mu()) as i64) / d as f64, dm);
                }
                a
            })
            .collect();
        Ok(Self { basis: OperatorBasis::new(ops)? })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceReport {
    /// Every conjugate `U L_j U†` equals some `L_k` up to a global phase.
    pub matched: bool,
    /// All matches hold with phase exactly 1.
    pub exact: bool,
    pub transitive: bool,
    /// Induced permutation per unitary, when `matched`.
    pub permutations: Vec<Vec<u32>>,
}

impl CovarianceReport {
    pub fn covariant(&self) -> bool {
        self.matched && self.transitive
    }
}

/// `σ` with `U L_j U† ∝ L_{σ(j)}` and whether every proportionality factor is 1, or `None`
/// if some conjugate is not a basis element.
pub fn induced_permutation(basis: &OperatorBasis, u: &CMatrix) -> Result<Option<(Vec<u32>, bool)>> {
    let ud = u.adjoint();
    let norms: Vec<f64> = basis.ops.iter().map(CMatrix::frobenius_norm).collect();
    let mut perm = Vec::with_capacity(basis.ops.len());
    let mut exact = true;
    for l in &basis.ops {
        let m = &(u * l) * &ud;
        let mn = m.frobenius_norm();
        let mut hits = basis.ops.iter().zip(&norms).enumerate().filter_map(|(k, (lk, &nk))| {
            let overlap = lk.inner(&m);
            // min over phases of ‖M − e^{iθ} L_k‖
            let dist = (mn * mn + nk * nk - 2.0 * overlap.norm()).max(0.0).sqrt();
            (dist <= MATCH_TOL).then_some((k, (&m - lk).frobenius_norm() <= MATCH_TOL))
        });
        let Some((k, is_exact)) = hits.next() else { return Ok(None) };
        if hits.next().is_some() {
            return Err(Error::Degeneracy(format!("conjugate matches several basis elements within {MATCH_TOL}")));
        }
        exact &= is_exact;
        perm.push(k as u32);
    }
    Ok(Some((perm, exact)))
}

pub fn is_covariant(basis: &OperatorBasis, unitaries: &[CMatrix]) -> Result<CovarianceReport> {
    if basis.d > MAX_BASIS_DIM {
        return Err(Error::SizeLimit { what: format!("covariance check with {} operators", basis.ops.len()), limit: 16 });
    }
    let perms: Vec<Option<(Vec<u32>, bool)>> =
        unitaries.par_iter().map(|u| induced_permutation(basis, u)).collect::<Result<_>>()?;
    if perms.iter().any(Option::is_none) {
        return Ok(CovarianceReport { matched: false, exact: false, transitive: false, permutations: Vec::new() });
    }
    let (permutations, exacts): (Vec<Vec<u32>>, Vec<bool>) = perms.into_iter().flatten().unzip();
    let n = basis.ops.len();
    let mut reached = vec![false; n];
    reached[0] = true;
    let mut stack = vec![0usize];
    while let Some(j) = stack.pop() {
        for p in &permutations {
            let k = p[j] as usize;
            if !reached[k] {
                reached[k] = true;
                stack.push(k);
            }
        }
    }
    Ok(CovarianceReport {
        matched: true,
        exact: exacts.iter().all(|&e| e),
        transitive: reached.iter().all(|&r| r),
        permutations,
    })
}

/// For sampled pairs `(g, h)`, checks `σ_{gh} = σ_g ∘ σ_h`.
pub fn permutation_homomorphism_check(basis: &OperatorBasis, group: &CliffordGroup, samples: usize, seed: u64) -> Result<bool> {
    use rand::Rng;
    let mut rng = seeded_rng(seed);
    let n = group.order();
    for _ in 0..samples {
        let (g, h) = (group.table().element(rng.random_range(0..n)), group.table().element(rng.random_range(0..n)));
        let gh = g.mul(h);
        let perm = |e: &crate::clifford::CliffordElement| induced_permutation(basis, e.unitary());
        let (Some((sg, _)), Some((sh, _)), Some((sgh, _))) = (perm(g)?, perm(h)?, perm(&gh)?) else {
            return Ok(false);
        };
        if (0..sg.len()).any(|j| sgh[j] != sg[sh[j] as usize]) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TripleProductReport {
    pub triples: usize,
    /// Cluster representatives with multiplicities, in order of first appearance.
    pub clusters: Vec<(C64, usize)>,
    pub all_real: bool,
    /// The two values when there are exactly two clusters and they are complex conjugates.
    pub conjugate_pair: Option<(C64, C64)>,
}

/// `tr(L_j L_k L_l)` over ordered triples of distinct indices, clustered at `1e-8`.
pub fn triple_products(basis: &OperatorBasis) -> TripleProductReport {
    let n = basis.ops.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..n).map(move |k| (j, k))).filter(|(j, k)| j != k).collect();
    let values: Vec<C64> = pairs
        .par_iter()
        .flat_map_iter(|&(j, k)| {
            let jk = &basis.ops[j] * &basis.ops[k];
            (0..n).filter(move |&l| l != j && l != k).map(move |l| jk.trace_product(&basis.ops[l])).collect::<Vec<_>>()
        })
        .collect();
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for v in &values {
        match clusters.iter_mut().find(|(c, _)| (c - v).norm() <= CLUSTER_TOL) {
            Some((_, m)) => *m += 1,
            None => clusters.push((*v, 1)),
        }
    }
    let conjugate_pair = match clusters.as_slice() {
        [(a, _), (b, _)] if (a.conj() - b).norm() <= CLUSTER_TOL && a.im.abs() > CLUSTER_TOL => Some((*a, *b)),
        _ => None,
    };
    TripleProductReport {
        triples: values.len(),
        all_real: values.iter().all(|v| v.im.abs() <= CLUSTER_TOL),
        clusters,
        conjugate_pair,
    }
}

#[derive(Clone, Debug)]
pub struct CovariantSearchReport {
    pub d: usize,
    pub group_order: usize,
    /// Number of subgroups of index `d²`.
    pub subgroups: usize,
    pub fixed_space_dims: Vec<usize>,
    pub candidates: usize,
    /// First orbit found that is a basis, in subgroup scan order.
    pub witness: Option<OperatorBasis>,
}

impl CovariantSearchReport {
    pub fn found(&self) -> bool {
        self.witness.is_some()
    }
}

/// Orthonormal basis (trace inner product) of the span of `ops`.
fn orthonormal_span(ops: impl IntoIterator<Item = CMatrix>) -> Vec<CMatrix> {
    let mut basis: Vec<CMatrix> = Vec::new();
    for mut m in ops {
        let scale = m.frobenius_norm();
        for b in &basis {
            let c = b.inner(&m);
            m.axpy(-c, b);
        }
        let r = m.frobenius_norm();
        if r > GRAM_TOL * scale.max(1.0) {
            basis.push(m.scale(C64::new(1.0 / r, 0.0)));
        }
    }
    basis
}

/// The orbit of `l` under conjugation, or `None` once it exceeds `limit` elements.
fn conjugation_orbit(l: &CMatrix, unitaries: &[CMatrix], limit: usize) -> Option<Vec<CMatrix>> {
    let mut orbit: Vec<CMatrix> = Vec::new();
    for u in unitaries {
        let m = &(u * l) * &u.adjoint();
        if !orbit.iter().any(|o| (o - &m).frobenius_norm() <= MATCH_TOL) {
            if orbit.len() == limit {
                return None;
            }
            orbit.push(m);
        }
    }
    Some(orbit)
}

/// A covariant basis is a single conjugation orbit of `d²` operators, so each element is
/// fixed by a subgroup `H` of index `d²`. For every such `H` the search takes an orthonormal
/// basis of the `H`-fixed operators (group averages of the matrix units) together with
/// `random_combinations` seeded combinations of it, and tests whether the orbit of each
/// candidate is a basis of size `d²`.
pub fn covariant_basis_search(group: &CliffordGroup, random_combinations: usize, seed: u64) -> Result<CovariantSearchReport> {
    let d = group.d();
    let order = group.order();
    let target = d * d;
    if !order.is_multiple_of(target) {
        return Err(Error::Contract(format!("group order {order} not divisible by {target}")));
    }
    let unitaries = group.unitaries();
    let subgroups: Vec<_> = subgroup_scan(group.table(), order / target)?.into_iter().filter(|h| h.order * target == order).collect();
    let results: Vec<(usize, usize, Option<Vec<CMatrix>>)> = subgroups
        .par_iter()
        .enumerate()
        .map(|(idx, h)| {
            let hu: Vec<&CMatrix> = h.elements.iter().map(|&i| &unitaries[i]).collect();
            let averaged = (0..d * d).map(|k| {
                let unit = CMatrix::from_fn(d, |r, c| if r * d + c == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
                let mut avg = CMatrix::zeros(d);
                for u in &hu {
                    avg.add_assign(&(&(*u * &unit) * &u.adjoint()));
                }
                avg.scale(C64::new(1.0 / hu.len() as f64, 0.0))
            });
            let fixed = orthonormal_span(averaged);
            let mut rng = seeded_rng(seed ^ (idx as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let mut candidates = fixed.clone();
            for _ in 0..random_combinations {
                let mut m = CMatrix::zeros(d);
                for b in &fixed {
                    let c = C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
                    m.axpy(c, b);
                }
                candidates.push(m);
            }
            let count = candidates.len();
            let witness = candidates.iter().find_map(|l| {
                let orbit = conjugation_orbit(l, &unitaries, target)?;
                let rows: Vec<Vec<C64>> = orbit.iter().map(|m| m.data().to_vec()).collect();
                (orbit.len() == target && complex_rank(&rows, GRAM_TOL) == target).then_some(orbit)
            });
            (fixed.len(), count, witness)
        })
        .collect();
    let witness = results.iter().find_map(|(_, _, w)| w.clone()).map(OperatorBasis::new).transpose()?;
    Ok(CovariantSearchReport {
        d,
        group_order: order,
        subgroups: subgroups.len(),
        fixed_space_dims: results.iter().map(|r| r.0).collect(),
        candidates: results.iter().map(|r| r.1).sum(),
        witness,
    })
}

/// Raised when a group verified as a unitary 3-design also admits a covariant basis.
pub fn contradiction_flag(is_3_design: bool, covariant: bool) -> bool {
    is_3_design && covariant
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::enumerate_clifford;
    use crate::linalg::haar_unitary;

    #[test]
    fn gram_check_rejects_commuting_sets() {
        let diag = |a: f64, b: f64| CMatrix::from_fn(2, |r, c| C64::new(if r != c { 0.0 } else if r == 0 { a } else { b }, 0.0));
        let ops = vec![diag(1.0, 0.0), diag(0.0, 1.0), diag(1.0, 1.0), diag(1.0, -1.0)];
        assert!(matches!(OperatorBasis::new(ops), Err(Error::Construction(_))));
    }

    #[test]
    fn phase_point_identities() {
        for p in [3u32, 5] {
            let b = PhasePointBasis::new(p).unwrap().basis;
            let d = p as usize;
            let mut sum = CMatrix::zeros(d);
            for (i, a) in b.ops().iter().enumerate() {
                assert!(a.is_hermitian(1e-12));
                assert!((a.trace() - C64::new(1.0, 0.0)).norm() < 1e-9);
                for (j, c) in b.ops().iter().enumerate() {
                    let want = if i == j { d as f64 } else { 0.0 };
                    assert!((a.trace_product(c) - C64::new(want, 0.0)).norm() < 1e-9);
                }
                sum.add_assign(a);
            }
            assert!((&sum.scale(C64::new(1.0 / d as f64, 0.0)) - &CMatrix::identity(d)).frobenius_norm() < 1e-9);
        }
        assert!(matches!(PhasePointBasis::new(2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn displacements_under_their_own_group() {
        let b = OperatorBasis::displacements(2, 1).unwrap();
        let r = is_covariant(&b, b.ops()).unwrap();
        assert!(r.matched && !r.exact && !r.transitive && !r.covariant());
        assert!(r.permutations.iter().all(|p| p.iter().enumerate().all(|(j, &k)| j == k as usize)));
    }

    #[test]
    fn phase_points_are_clifford_covariant() {
        let g = enumerate_clifford(3, 1).unwrap();
        let b = PhasePointBasis::new(3).unwrap().basis;
        let r = is_covariant(&b, &g.unitaries()).unwrap();
        assert!(r.covariant() && r.exact);
        assert!(permutation_homomorphism_check(&b, &g, 50, 4).unwrap());
        let u = haar_unitary(3, &mut seeded_rng(17));
        assert!(!is_covariant(&b, &[u]).unwrap().matched);
    }

    #[test]
    fn triple_product_structure() {
        let tp = triple_products(&PhasePointBasis::new(3).unwrap().basis);
        assert_eq!(tp.triples, 9 * 8 * 7);
        assert!(!tp.all_real);
        let pauli = triple_products(&OperatorBasis::displacements(2, 1).unwrap());
        assert_eq!(pauli.triples, 24);
        assert!(!pauli.all_real);
        // X, −Y, Z with D_{(1|1)} = −iXZ
        assert!(pauli.clusters.iter().any(|(v, _)| (v - C64::new(0.0, -2.0)).norm() < 1e-9));
        // triples through the identity vanish
        assert!(pauli.clusters.iter().all(|(v, _)| v.re.abs() < 1e-9 && (v.im.abs() < 1e-9 || (v.im.abs() - 2.0).abs() < 1e-9)));
    }

    #[test]
    fn no_covariant_qubit_basis() {
        let g = enumerate_clifford(2, 1).unwrap();
        let r = covariant_basis_search(&g, 16, 5).unwrap();
        assert_eq!(r.group_order, 24);
        assert_eq!(r.subgroups, 4);
        assert!(!r.found());
        assert!(!contradiction_flag(true, r.found()));
    }

    #[test]
    fn qutrit_search_finds_a_covariant_basis() {
        let g = enumerate_clifford(3, 1).unwrap();
        let r = covariant_basis_search(&g, 4, 5).unwrap();
        let w = r.witness.as_ref().expect("odd dimension admits covariant bases");
        assert!(is_covariant(w, &g.unitaries()).unwrap().covariant());
        // the stabiliser of A_0 is one of the subgroups searched
        let pp = PhasePointBasis::new(3).unwrap();
        let a0 = &pp.basis.ops()[0];
        let orbit = conjugation_orbit(a0, &g.unitaries(), 9).unwrap();
        assert_eq!(orbit.len(), 9);
    }
}

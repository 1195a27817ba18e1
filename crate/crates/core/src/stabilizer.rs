//! Stabilizer states from Lagrangian subspaces and sign characters, and Clifford orbits of
//! pure states, as inputs to the projective design check.

use std::collections::HashSet;
use std::io::Write;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::clifford::CliffordGroup;
use crate::designs::{projective_design_check, ProjectiveDesignReport};
use crate::error::{Error, Result};
use crate::linalg::{canonical_phase, haar_state, phase_fingerprint, seeded_rng, CMatrix};
use crate::pauli::{omega_power, Displacement};
use crate::symplectic::SympVector;

const MAX_STATE_DIM: usize = 8;
const STATE_QUANTUM: f64 = 1e-8;

/// A maximal isotropic subspace, stored as the rows of its reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lagrangian {
    pub basis: Vec<SympVector>,
}

/// `∏_{k=1}^{n} (p^k + 1)`.
pub fn lagrangian_count(p: u32, n: u32) -> u128 {
    (1..=n).map(|k| (p as u128).pow(k) + 1).product()
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if m < k {
        return vec![];
    }
    let mut with_last: Vec<Vec<usize>> = combinations(m - 1, k - 1);
    for c in &mut with_last {
        c.push(m - 1);
    }
    let mut out = combinations(m - 1, k);
    out.extend(with_last);
    out.sort();
    out
}

/// All Lagrangian subspaces of `F_p^{2n}`, enumerated as reduced row echelon forms of rank
/// `n` whose rows are pairwise orthogonal, and checked against `∏(p^k + 1)`.
pub fn enumerate_lagrangians(p: u32, n: u32) -> Result<Vec<Lagrangian>> {
    let (nu, dim) = (n as usize, 2 * n as usize);
    let mut out = Vec::new();
    for pivots in combinations(dim, nu) {
        let free: Vec<(usize, usize)> = (0..nu)
            .flat_map(|r| ((pivots[r] + 1)..dim).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
            .collect();
        let total = (p as usize).pow(free.len() as u32);
        for mut assignment in 0..total {
            let mut rows = vec![vec![0u32; dim]; nu];
            for (r, &c) in pivots.iter().enumerate() {
                rows[r][c] = 1;
            }
            for &(r, c) in &free {
                rows[r][c] = (assignment % p as usize) as u32;
                assignment /= p as usize;
            }
            let basis: Vec<SympVector> = rows.iter().map(|r| SympVector::new(p, n, r)).collect::<Result<_>>()?;
            if basis.iter().all(|a| basis.iter().all(|b| a.form(b) == 0)) {
                out.push(Lagrangian { basis });
            }
        }
    }
    let expected = lagrangian_count(p, n);
    if out.len() as u128 != expected {
        return Err(Error::Consistency(format!("found {} Lagrangians of F_{p}^{dim}, expected {expected}", out.len())));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct StabilizerState {
    pub lagrangian: Lagrangian,
    /// `s_i` with `ω^{s_i} D_{b_i} ψ = ψ`.
    pub signs: Vec<u32>,
    pub vector: Vec<C64>,
}

/// All `p^n ∏(p^k + 1)` stabilizer states for `p^n ≤ 8`. Each state is a normalised column
/// of `∏_i (1/p) Σ_k (ω^{s_i} D_{b_i})^k`, a rank-one projector.
pub fn enumerate_stabilizer_states(p: u32, n: u32) -> Result<Vec<StabilizerState>> {
    let d = (p as usize).pow(n);
    if d > MAX_STATE_DIM {
        return Err(Error::SizeLimit { what: format!("stabilizer states in dimension {d}"), limit: MAX_STATE_DIM as u128 });
    }
    let lagrangians = enumerate_lagrangians(p, n)?;
    let per_subspace: Vec<Vec<StabilizerState>> = lagrangians
        .par_iter()
        .map(|lag| {
            let ds: Vec<CMatrix> = lag.basis.iter().map(|b| Displacement::new(*b, 0).matrix()).collect::<Result<_>>()?;
            (0..d)
                .map(|code| {
                    let signs: Vec<u32> = (0..n as usize).map(|i| (code / (p as usize).pow(i as u32) % p as usize) as u32).collect();
                    let mut proj = CMatrix::identity(d);
                    for (dm, &s) in ds.iter().zip(&signs) {
                        let g = dm.scale(omega_power(p, s as i64));
                        let mut term = CMatrix::identity(d);
                        let mut avg = CMatrix::zeros(d);
                        for _ in 0..p {
                            avg.add_assign(&term);
                            term = &term * &g;
                        }
                        proj = &proj * &avg.scale(C64::new(1.0 / p as f64, 0.0));
                    }
                    let tr = proj.trace();
                    if (tr - C64::new(1.0, 0.0)).norm() > 1e-9 {
                        return Err(Error::Construction(format!("stabilizer projector has trace {tr}")));
                    }
                    let col = (0..d)
                        .max_by(|&a, &b| column_norm(&proj, a).total_cmp(&column_norm(&proj, b)))
                        .expect("d ≥ 1");
                    let norm = column_norm(&proj, col);
                    let v: Vec<C64> = (0..d).map(|r| proj[(r, col)] / norm).collect();
                    let phase = canonical_phase(&v);
                    let vector = v.iter().map(|z| z * phase).collect();
                    Ok(StabilizerState { lagrangian: lag.clone(), signs, vector })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(per_subspace.into_iter().flatten().collect())
}

fn column_norm(m: &CMatrix, col: usize) -> f64 {
    (0..m.dim()).map(|r| m[(r, col)].norm_sqr()).sum::<f64>().sqrt()
}

/// Writes one state per line as space-separated `re,im` amplitudes of a unit vector.
pub fn write_states<W: Write>(states: &[Vec<C64>], mut out: W) -> Result<()> {
    for s in states {
        let line: Vec<String> = s.iter().map(|z| format!("{:.17e},{:.17e}", z.re, z.im)).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Distinct states of the orbit of `psi`, up to global phase, in group-table order.
pub fn clifford_orbit(group: &CliffordGroup, psi: &[C64]) -> Vec<Vec<C64>> {
    let images: Vec<Vec<C64>> = group.table().elements().par_iter().map(|e| e.unitary().mul_vec(psi)).collect();
    let mut seen = HashSet::new();
    images.into_iter().filter(|v| seen.insert(phase_fingerprint(v, STATE_QUANTUM))).collect()
}

/// Orbit of a seeded Haar-random state, then the projective check at `t`.
pub fn clifford_orbit_design_check(group: &CliffordGroup, seed: u64, t: usize) -> Result<(usize, ProjectiveDesignReport)> {
    let psi = haar_state(group.d(), &mut seeded_rng(seed));
    let orbit = clifford_orbit(group, &psi);
    Ok((orbit.len(), projective_design_check(&orbit, t)?))
}

/// True iff every generator of `group` maps every state of `states` into the set
/// (up to global phase), so the set is a union of orbits.
pub fn orbit_closure_check(group: &CliffordGroup, states: &[Vec<C64>]) -> bool {
    let quantum = 1e-6;
    let prints: HashSet<Vec<i64>> = states.iter().map(|s| phase_fingerprint(s, quantum)).collect();
    group
        .table()
        .generators()
        .iter()
        .all(|g| states.par_iter().all(|s| prints.contains(&phase_fingerprint(&g.unitary().mul_vec(s), quantum))))
}

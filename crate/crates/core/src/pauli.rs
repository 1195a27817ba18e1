//! Displacement operators `D_μ = τ^{x·z} ∏_j X_j^{x_j} Z_j^{z_j}` for `μ = (x | z) ∈ F_p^{2n}`,
//! with `Z|u⟩ = ω^u|u⟩`, `X|u⟩ = |u+1⟩`, `ω = e^{2πi/p}` and `τ = −e^{iπ/p}`.
//!
//! Products are tracked exactly as a vector plus an exponent of `τ`. Since `τ² = ω` and
//! `τ` has order 4 for `p = 2` and order `p` for odd `p`, the exponent is stored reduced
//! modulo that order, which makes the representation of each phased operator unique.
//! Party 1 is the most significant digit of the computational-basis index.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{ginibre, seeded_rng, CMatrix};
use crate::symplectic::SympVector;

const MAX_DENSE_DIM: usize = 16;

/// Multiplicative order of `τ`.
pub fn tau_order(p: u32) -> u32 {
    if p == 2 {
        4
    } else {
        p
    }
}

/// `τ^k` as a complex number.
pub fn tau_power(p: u32, k: i64) -> C64 {
    let e = (k * (p as i64 + 1)).rem_euclid(2 * p as i64);
    C64::from_polar(1.0, PI * e as f64 / p as f64)
}

/// `ω^k` as a complex number.
pub fn omega_power(p: u32, k: i64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * k.rem_euclid(p as i64) as f64 / p as f64)
}

/// The phased operator `τ^phase · D_μ`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Displacement {
    mu: SympVector,
    phase: u32,
}

impl Displacement {
    pub fn new(mu: SympVector, phase: i64) -> Self {
        let phase = phase.rem_euclid(tau_order(mu.p()) as i64) as u32;
        Self { mu, phase }
    }

    pub fn identity(p: u32, n: u32) -> Self {
        Self::new(SympVector::zero(p, n), 0)
    }

    /// `D_{e_i}`: `X` on party `i` for `i < n`, `Z` on party `i − n` otherwise.
    pub fn basis(p: u32, n: u32, i: usize) -> Self {
        Self::new(SympVector::basis(p, n, i), 0)
    }

    pub fn mu(&self) -> &SympVector {
        &self.mu
    }

    pub fn phase(&self) -> u32 {
        self.phase
    }

    pub fn p(&self) -> u32 {
        self.mu.p()
    }

    pub fn with_phase(&self, phase: i64) -> Self {
        Self::new(self.mu, phase)
    }

    /// Exact product `self · rhs`, using `D_μ D_ν = τ^c D_{μ+ν}` with
    /// `c = x·z + x′·z′ + 2 z·x′ − s·r`, where `(s | r) = μ + ν` reduced mod `p`.
    pub fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!((self.mu.p(), self.mu.n()), (rhs.mu.p(), rhs.mu.n()));
        let n = self.mu.n() as usize;
        let p = self.mu.p() as i64;
        let mut c = 0i64;
        for j in 0..n {
            let (x, z) = (self.mu.coord(j) as i64, self.mu.coord(n + j) as i64);
            let (x2, z2) = (rhs.mu.coord(j) as i64, rhs.mu.coord(n + j) as i64);
            c += x * z + x2 * z2 + 2 * z * x2 - ((x + x2) % p) * ((z + z2) % p);
        }
        Self::new(self.mu.add(&rhs.mu), self.phase as i64 + rhs.phase as i64 + c)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.mu.p(), self.mu.n()), |acc, _| acc.mul(self))
    }

    /// Adjoint, which for a unitary of finite order `m` is its `(m − 1)`-th power.
    pub fn adjoint(&self) -> Self {
        self.pow(self.order() - 1)
    }

    /// Order of `τ^phase D_μ` as an operator.
    pub fn order(&self) -> u32 {
        let id = Self::identity(self.mu.p(), self.mu.n());
        let mut acc = *self;
        let mut k = 1;
        while acc != id {
            acc = acc.mul(self);
            k += 1;
        }
        k
    }

    /// Dense matrix, `d = p^n ≤ 16`.
    pub fn matrix(&self) -> Result<CMatrix> {
        let (p, n) = (self.mu.p(), self.mu.n() as usize);
        let d = (p as usize).pow(n as u32);
        if d > MAX_DENSE_DIM {
            return Err(Error::SizeLimit { what: format!("dense displacement in dimension {d}"), limit: MAX_DENSE_DIM as u128 });
        }
        let x: Vec<usize> = (0..n).map(|j| self.mu.coord(j) as usize).collect();
        let z: Vec<i64> = (0..n).map(|j| self.mu.coord(n + j) as i64).collect();
        let xz: i64 = x.iter().zip(&z).map(|(&a, &b)| a as i64 * b).sum();
        let global = tau_power(p, self.phase as i64 + xz);
        let mut m = CMatrix::zeros(d);
        for u in 0..d {
            let digits = party_digits(u, p as usize, n);
            let zu: i64 = digits.iter().zip(&z).map(|(&a, &b)| a as i64 * b).sum();
            let target = digits.iter().zip(&x).fold(0, |acc, (&a, &b)| acc * p as usize + (a + b) % p as usize);
            m[(target, u)] = global * omega_power(p, zu);
        }
        Ok(m)
    }
}

/// Digits of a basis index, party 1 first.
pub(crate) fn party_digits(mut u: usize, p: usize, n: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    for slot in d.iter_mut().rev() {
        *slot = u % p;
        u /= p;
    }
    d
}

/// Dense `D_μ` (zero phase exponent).
pub fn displacement_matrix(d: &Displacement) -> Result<CMatrix> {
    d.matrix()
}

/// All `D_μ` with zero phase, in domain-index order of `μ`.
pub fn all_displacements(p: u32, n: u32) -> Vec<Displacement> {
    (0..(p as usize).pow(2 * n)).map(|i| Displacement::new(SympVector::from_index(p, n, i), 0)).collect()
}

/// Exponent `k` in `D_μ D_ν D_μ† D_ν† = ω^k`, which is `⟨μ, ν⟩`.
pub fn commutation_phase(mu: &SympVector, nu: &SympVector) -> Result<u32> {
    Ok(crate::symplectic::symp_product(mu, nu)?.value())
}

/// Group commutator computed from the exact product law, as an exponent of `ω`.
pub fn symbolic_commutator(mu: &SympVector, nu: &SympVector) -> Result<u32> {
    let (a, b) = (Displacement::new(*mu, 0), Displacement::new(*nu, 0));
    let c = a.mul(&b).mul(&a.adjoint()).mul(&b.adjoint());
    if !c.mu.is_zero() {
        return Err(Error::Consistency("commutator of displacements is not a phase".into()));
    }
    // τ^k = ω^{k/2}; for odd p, 2 is invertible mod p, for p = 2 the exponent is even.
    let p = mu.p();
    let k = c.phase;
    Ok(if p == 2 {
        if k % 2 != 0 {
            return Err(Error::Consistency(format!("commutator phase τ^{k} is not a power of ω")));
        }
        k / 2
    } else {
        k * p.div_ceil(2) % p
    })
}

/// Outcome of [`unitary_error_basis_check`].
#[derive(Clone, Debug)]
pub struct ErrorBasisReport {
    pub count: usize,
    /// `max |tr(D_μ† D_ν) − d δ_{μν}|`.
    pub gram_error: f64,
    /// Largest relative Parseval defect `|Σ_μ |tr(A D_μ†)|² − d tr(A†A)| / (d tr(A†A))` over the probes.
    pub parseval_error: f64,
    pub pass: bool,
}

/// Trace orthogonality of all `p^{2n}` displacements and the Parseval identity on seeded
/// random operators.
pub fn unitary_error_basis_check(p: u32, n: u32, probes: usize, seed: u64) -> Result<ErrorBasisReport> {
    let ops: Vec<CMatrix> = all_displacements(p, n).iter().map(Displacement::matrix).collect::<Result<_>>()?;
    let d = ops[0].dim() as f64;
    let gram_error = ops
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let a_dag = a.adjoint();
            ops.iter()
                .enumerate()
                .map(|(j, b)| {
                    let expect = if i == j { d } else { 0.0 };
                    (a_dag.trace_product(b) - expect).norm()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let mut rng = seeded_rng(seed);
    let mut parseval_error = 0.0f64;
    for _ in 0..probes {
        let a = ginibre(ops[0].dim(), &mut rng);
        let lhs: f64 = ops.iter().map(|dm| a.trace_product(&dm.adjoint()).norm_sqr()).sum();
        let rhs = d * a.frobenius_norm().powi(2);
        parseval_error = parseval_error.max((lhs - rhs).abs() / rhs);
    }
    let pass = gram_error <= 1e-9 * d && parseval_error <= 1e-8;
    Ok(ErrorBasisReport { count: ops.len(), gram_error, parseval_error, pass })
}

/// The displacement group modulo phases is elementary abelian of order `p^{2n}`: the phase-free
/// parts multiply by vector addition, commute, and every element has order dividing `p`.
pub fn hw_quotient_check(p: u32, n: u32) -> bool {
    let all = all_displacements(p, n);
    let distinct: std::collections::HashSet<SympVector> = all.iter().map(|d| *d.mu()).collect();
    distinct.len() == (p as usize).pow(2 * n)
        && all.iter().all(|a| a.pow(p).mu().is_zero())
        && all.iter().all(|a| all.iter().all(|b| a.mul(b).mu() == b.mul(a).mu() && *a.mul(b).mu() == a.mu().add(b.mu())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        (a - b).frobenius_norm() <= tol
    }

    #[test]
    fn tau_squares_to_omega() {
        for p in [2, 3, 5, 7] {
            for k in 0..10 {
                assert!((tau_power(p, 2 * k) - omega_power(p, k)).norm() < 1e-12);
            }
            assert!((tau_power(p, tau_order(p) as i64) - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
        assert!((tau_power(2, 1) - C64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn dense_examples() {
        let id = Displacement::identity(2, 1).matrix().unwrap();
        assert!(close(&id, &CMatrix::identity(2), 1e-12));

        let y = Displacement::new(SympVector::new(2, 1, &[1, 1]).unwrap(), 0).matrix().unwrap();
        assert!(y.is_hermitian(1e-12));
        assert!(close(&(&y * &y), &CMatrix::identity(2), 1e-12));
        assert!(y.trace().norm() < 1e-12);
        assert!((y[(0, 1)] - C64::new(0.0, 1.0)).norm() < 1e-12);

        let shift = Displacement::basis(3, 1, 0).matrix().unwrap();
        for u in 0..3 {
            assert!((shift[((u + 1) % 3, u)] - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn product_law_matches_dense() {
        for (p, n) in [(2, 1), (3, 1), (2, 2), (2, 3)] {
            let all: Vec<Displacement> =
                all_displacements(p, n).iter().enumerate().map(|(i, d)| d.with_phase((i % 3) as i64)).collect();
            let dense: Vec<CMatrix> = all.iter().map(|d| d.matrix().unwrap()).collect();
            for (i, a) in all.iter().enumerate() {
                for (j, b) in all.iter().enumerate() {
                    let lhs = &dense[i] * &dense[j];
                    let rhs = a.mul(b).matrix().unwrap();
                    assert!(close(&lhs, &rhs, 1e-9), "p={p} n={n} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn commutation_relation_dense_and_symbolic() {
        for (p, n) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let all = all_displacements(p, n);
            for a in &all {
                for b in &all {
                    let k = commutation_phase(a.mu(), b.mu()).unwrap();
                    assert_eq!(symbolic_commutator(a.mu(), b.mu()).unwrap(), k);
                    let (da, db) = (a.matrix().unwrap(), b.matrix().unwrap());
                    let c = &(&(&da * &db) * &da.adjoint()) * &db.adjoint();
                    let expect = CMatrix::identity(da.dim()).scale(omega_power(p, k as i64));
                    assert!(close(&c, &expect, 1e-9));
                }
            }
        }
        let x = SympVector::new(2, 1, &[1, 0]).unwrap();
        let z = SympVector::new(2, 1, &[0, 1]).unwrap();
        assert_eq!(commutation_phase(&x, &z).unwrap(), 1);
        assert_eq!(commutation_phase(&x, &x).unwrap(), 0);
        // with ⟨μ,ν⟩ = z·x′ − x·z′, X then Z at p = 3 gives −1 ≡ 2
        let x3 = SympVector::new(3, 1, &[1, 0]).unwrap();
        let z3 = SympVector::new(3, 1, &[0, 1]).unwrap();
        assert_eq!(commutation_phase(&x3, &z3).unwrap(), 2);
        assert_eq!(commutation_phase(&z3, &x3).unwrap(), 1);
    }

    #[test]
    fn displacements_have_order_p() {
        for (p, n) in [(2, 2), (3, 1), (5, 1), (3, 2)] {
            for d in all_displacements(p, n).iter().skip(1) {
                assert_eq!(d.order(), p);
                assert_eq!(d.adjoint().mul(d), Displacement::identity(p, n));
            }
        }
    }

    #[test]
    fn error_basis() {
        for (p, n, count) in [(2, 1, 4), (2, 2, 16), (3, 1, 9), (2, 3, 64)] {
            let r = unitary_error_basis_check(p, n, 4, 17).unwrap();
            assert_eq!(r.count, count);
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn quotient_is_elementary_abelian() {
        for (p, n) in [(2, 1), (2, 2), (3, 1), (3, 2)] {
            assert!(hw_quotient_check(p, n));
        }
    }

    #[test]
    fn dense_limit() {
        assert!(Displacement::identity(5, 2).matrix().is_err());
    }
}

//! Small dense complex matrices and the seeded random objects used as test probes.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Rng64 = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

/// Dense unitary realisation; unitarity is a checked property, not a type invariant.
pub type DenseUnitary = CMatrix;

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_vec(dim: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), dim * dim, "data length must be dim²");
        Self { dim, data }
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        assert_eq!(a.len(), b.len());
        Self::from_fn(a.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let d = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                acc += self.data[i * d + k] * other.data[k * d + i];
            }
        }
        acc
    }

    /// Hilbert-Schmidt inner product `tr(self† · other)`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim, other.dim);
        Self::from_fn(a * b, |i, j| self[(i / b, j / b)] * other[(i % b, j % b)])
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        let d = self.dim;
        (0..d).map(|i| (0..d).map(|j| self.data[i * d + j] * v[j]).sum()).collect()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let g = &self.adjoint() * self;
        (&g - &Self::identity(self.dim)).frobenius_norm() <= tol * self.dim as f64
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self - &self.adjoint()).frobenius_norm() <= tol
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// `self += c · other`.
    pub fn axpy(&mut self, c: C64, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    /// `n`-fold tensor power.
    pub fn tensor_power(&self, n: usize) -> Self {
        let mut out = Self::identity(1);
        for _ in 0..n {
            out = out.kron(self);
        }
        out
    }

    /// `(u ⊗ … ⊗ u) · self · (u ⊗ … ⊗ u)†` for `self` on `t` tensor factors of dimension `u.dim()`.
    ///
    /// Applies `u` one factor at a time, `O(t · d · D²)` instead of `O(D³)` with `D = d^t`.
    pub fn conjugate_by_tensor_power(&self, u: &Self, t: usize) -> Self {
        let d = u.dim;
        let big = self.dim;
        debug_assert_eq!(d.pow(t as u32), big);
        let mut m = self.data.clone();
        let mut scratch = vec![C64::new(0.0, 0.0); big * big];
        // left multiplication on each factor
        for f in 0..t {
            let stride = d.pow((t - 1 - f) as u32);
            for col in 0..big {
                for row in 0..big {
                    let digit = (row / stride) % d;
                    let base = row - digit * stride;
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..d {
                        acc += u.data[digit * d + k] * m[(base + k * stride) * big + col];
                    }
                    scratch[row * big + col] = acc;
                }
            }
            std::mem::swap(&mut m, &mut scratch);
        }
        // right multiplication by u† on each factor: (M u†)[r,c] = Σ_k M[r,k] conj(u[c,k])
        for f in 0..t {
            let stride = d.pow((t - 1 - f) as u32);
            for row in 0..big {
                for col in 0..big {
                    let digit = (col / stride) % d;
                    let base = col - digit * stride;
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..d {
                        acc += m[row * big + base + k * stride] * u.data[digit * d + k].conj();
                    }
                    scratch[row * big + col] = acc;
                }
            }
            std::mem::swap(&mut m, &mut scratch);
        }
        Self { dim: big, data: m }
    }

    /// Projective fingerprint: global phase fixed by [`canonical_phase`], then entries
    /// quantised to `quantum`.
    pub fn projective_fingerprint(&self, quantum: f64) -> Vec<i64> {
        phase_fingerprint(&self.data, quantum)
    }
}

/// Global-phase canonicalisation and quantisation of a complex vector.
pub fn phase_fingerprint(v: &[C64], quantum: f64) -> Vec<i64> {
    let phase = canonical_phase(v);
    v.iter()
        .flat_map(|z| {
            let w = z * phase;
            [(w.re / quantum).round() as i64, (w.im / quantum).round() as i64]
        })
        .collect()
}

/// Unit phase that makes the first significant entry of `v` real positive.
pub fn canonical_phase(v: &[C64]) -> C64 {
    let threshold = v.iter().map(|z| z.norm()).fold(0.0, f64::max) * 1e-3;
    v.iter()
        .find(|z| z.norm() > threshold.max(1e-12))
        .map(|z| z.conj() / z.norm())
        .unwrap_or(C64::new(1.0, 0.0))
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        let d = self.dim;
        assert_eq!(d, rhs.dim, "dimension mismatch");
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * d..(k + 1) * d];
                for (o, b) in out[i * d..(i + 1) * d].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        CMatrix { dim: d, data: out }
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

fn gaussian(rng: &mut Rng64) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Random operator with i.i.d. standard complex Gaussian entries.
pub fn ginibre(dim: usize, rng: &mut Rng64) -> CMatrix {
    CMatrix::zeros(dim).map_entries(|_| gaussian(rng))
}

impl CMatrix {
    fn map_entries(mut self, mut f: impl FnMut(C64) -> C64) -> Self {
        for z in &mut self.data {
            *z = f(*z);
        }
        self
    }
}

/// Haar-random unitary: QR of a Ginibre matrix by modified Gram-Schmidt on its columns.
///
/// Gram-Schmidt yields an `R` with positive real diagonal, which is exactly the phase
/// correction that makes `Q` Haar distributed.
pub fn haar_unitary(dim: usize, rng: &mut Rng64) -> CMatrix {
    let g = ginibre(dim, rng);
    let mut cols: Vec<Vec<C64>> = (0..dim).map(|j| (0..dim).map(|i| g[(i, j)]).collect()).collect();
    for j in 0..dim {
        for k in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let qk = &done[k];
            let proj: C64 = qk.iter().zip(&rest[0]).map(|(a, b)| a.conj() * b).sum();
            for (x, q) in rest[0].iter_mut().zip(qk) {
                *x -= proj * q;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut cols[j] {
            *x /= norm;
        }
    }
    CMatrix::from_fn(dim, |i, j| cols[j][i])
}

/// Haar-random pure state (normalised complex Gaussian vector).
pub fn haar_state(dim: usize, rng: &mut Rng64) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
    normalize(v)
}

pub fn normalize(mut v: Vec<C64>) -> Vec<C64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= n;
    }
    v
}

pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Rank of a (possibly rectangular) complex matrix given as rows, by Gaussian
/// elimination with partial pivoting; pivots below `rel_tol · max|entry|` count as zero.
pub fn complex_rank(rows: &[Vec<C64>], rel_tol: f64) -> usize {
    let mut m: Vec<Vec<C64>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let scale = m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let mut rank = 0;
    for col in 0..ncols {
        let Some((piv, best)) = (rank..m.len()).map(|r| (r, m[r][col].norm())).max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            break;
        };
        if best <= rel_tol * scale {
            continue;
        }
        m.swap(rank, piv);
        let pivot_row = m[rank].clone();
        for r in rank + 1..m.len() {
            let factor = m[r][col] / pivot_row[col];
            for (x, y) in m[r].iter_mut().zip(&pivot_row) {
                *x -= factor * y;
            }
        }
        rank += 1;
    }
    rank
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitaries_are_unitary() {
        let mut rng = seeded_rng(7);
        for d in 1..6 {
            assert!(haar_unitary(d, &mut rng).is_unitary(1e-12));
        }
    }

    #[test]
    fn tensor_conjugation_matches_dense() {
        let mut rng = seeded_rng(3);
        for (d, t) in [(2, 3), (3, 2), (2, 1)] {
            let u = haar_unitary(d, &mut rng);
            let a = ginibre(d.pow(t as u32), &mut rng);
            let ut = u.tensor_power(t);
            let dense = &(&ut * &a) * &ut.adjoint();
            let fast = a.conjugate_by_tensor_power(&u, t);
            assert!((&dense - &fast).frobenius_norm() < 1e-10);
        }
    }

    #[test]
    fn rank_of_dependent_rows() {
        let one = C64::new(1.0, 0.0);
        let rows = vec![vec![one, one * 2.0], vec![one * 2.0, one * 4.0], vec![one, C64::new(0.0, 1.0)]];
        assert_eq!(complex_rank(&rows, 1e-12), 2);
    }

    #[test]
    fn fingerprint_ignores_global_phase() {
        let mut rng = seeded_rng(11);
        let u = haar_unitary(3, &mut rng);
        let v = u.scale(C64::from_polar(1.0, 0.7));
        assert_eq!(u.projective_fingerprint(1e-8), v.projective_fingerprint(1e-8));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let vals = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(vals), 2.0);
    }
}

//! The symplectic space `F_p^{2n}` with form `⟨μ,ν⟩ = μᵀJν`, `J = [[0, −I], [I, 0]]`,
//! the groups `Sp(2n, p)`, fixed-point counts, the pair-orbit classification, and
//! `SL(2, q)` acting on `F_q²` together with its embedding into `Sp(2k, p)`.
//!
//! Vectors and matrices are packed into machine words with `⌈log₂ p⌉` bits per entry;
//! for `p = 2` the row of a matrix is a bit mask and products and ranks are computed with
//! word operations. A vector's domain index is `Σ μ_i p^i`, which for `p = 2` coincides
//! with its packed bits.

use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ffield::{is_prime, ExtElem, ExtField, Fp, PrimeField};
use crate::groups::{self, orbit_of, orbits, Action, CacheKind, GroupElement, GroupTable};

const MAX_MATRIX_BITS: u32 = 128;
const MAX_DIM: usize = 11;

fn bits_for(p: u32) -> u32 {
    32 - (p - 1).leading_zeros()
}

fn check_params(p: u32, n: u32) -> Result<()> {
    if !is_prime(p) || p > 255 {
        return Err(Error::Domain(format!("p = {p} must be a prime below 256")));
    }
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let dim = 2 * n;
    if dim * dim * bits_for(p) > MAX_MATRIX_BITS {
        return Err(Error::SizeLimit { what: format!("Sp({dim},{p}) matrix packing"), limit: MAX_MATRIX_BITS as u128 });
    }
    Ok(())
}

/// `|Sp(2n, p)| = p^{n²} ∏_{i=1}^{n} (p^{2i} − 1)`.
pub fn sp_order(p: u32, n: u32) -> u128 {
    let p = p as u128;
    (1..=n).fold(p.pow(n * n), |acc, i| acc * (p.pow(2 * i) - 1))
}

/// A vector of `F_p^{2n}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SympVector {
    p: u8,
    n: u8,
    packed: u64,
}

impl SympVector {
    pub fn new(p: u32, n: u32, coords: &[u32]) -> Result<Self> {
        check_params(p, n)?;
        if coords.len() != 2 * n as usize {
            return Err(Error::DimensionMismatch(format!("expected {} coordinates, got {}", 2 * n, coords.len())));
        }
        let b = bits_for(p);
        let packed = coords.iter().enumerate().fold(0u64, |acc, (i, &c)| acc | (((c % p) as u64) << (i as u32 * b)));
        Ok(Self { p: p as u8, n: n as u8, packed })
    }

    pub fn zero(p: u32, n: u32) -> Self {
        Self { p: p as u8, n: n as u8, packed: 0 }
    }

    /// Standard basis vector `e_i`, `0 ≤ i < 2n`.
    pub fn basis(p: u32, n: u32, i: usize) -> Self {
        Self { p: p as u8, n: n as u8, packed: 1 << (i as u32 * bits_for(p)) }
    }

    pub fn from_index(p: u32, n: u32, mut index: usize) -> Self {
        if p == 2 {
            return Self { p: 2, n: n as u8, packed: index as u64 };
        }
        let b = bits_for(p);
        let mut packed = 0u64;
        for i in 0..2 * n {
            packed |= ((index % p as usize) as u64) << (i * b);
            index /= p as usize;
        }
        Self { p: p as u8, n: n as u8, packed }
    }

    pub fn index(&self) -> usize {
        if self.p == 2 {
            return self.packed as usize;
        }
        (0..self.dim()).rev().fold(0usize, |acc, i| acc * self.p as usize + self.coord(i) as usize)
    }

    pub fn p(&self) -> u32 {
        self.p as u32
    }

    pub fn n(&self) -> u32 {
        self.n as u32
    }

    pub fn dim(&self) -> usize {
        2 * self.n as usize
    }

    #[inline]
    pub fn coord(&self, i: usize) -> u32 {
        let b = bits_for(self.p as u32);
        ((self.packed >> (i as u32 * b)) & ((1 << b) - 1)) as u32
    }

    pub fn coords(&self) -> Vec<u32> {
        (0..self.dim()).map(|i| self.coord(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.packed == 0
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if (self.p, self.n) != (other.p, other.n) {
            return Err(Error::DimensionMismatch(format!(
                "F_{}^{} vs F_{}^{}",
                self.p,
                self.dim(),
                other.p,
                other.dim()
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u32, u32) -> u32) -> Self {
        if self.p == 2 {
            return Self { packed: f(0, 0) as u64 ^ (self.packed ^ other.packed), ..*self };
        }
        let coords: Vec<u32> = (0..self.dim()).map(|i| f(self.coord(i), other.coord(i)) % self.p as u32).collect();
        Self::new(self.p as u32, self.n as u32, &coords).expect("same parameters")
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert!(self.same_space(other).is_ok());
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, c: u32) -> Self {
        let coords: Vec<u32> = self.coords().iter().map(|&x| x * c % self.p as u32).collect();
        Self::new(self.p as u32, self.n as u32, &coords).expect("same parameters")
    }

    pub fn neg(&self) -> Self {
        self.scale(self.p as u32 - 1)
    }

    /// Symplectic form without the parameter check, as a residue in `[0, p)`.
    #[inline]
    pub(crate) fn form(&self, other: &Self) -> u32 {
        let n = self.n as usize;
        let p = self.p as u32;
        if p == 2 {
            let mask = (1u64 << n) - 1;
            let (x, z) = (self.packed & mask, self.packed >> n);
            let (x2, z2) = (other.packed & mask, other.packed >> n);
            return ((x & z2).count_ones() + (z & x2).count_ones()) % 2;
        }
        let mut acc = 0i64;
        for j in 0..n {
            acc -= self.coord(j) as i64 * other.coord(n + j) as i64;
            acc += self.coord(n + j) as i64 * other.coord(j) as i64;
        }
        acc.rem_euclid(p as i64) as u32
    }
}

impl fmt::Debug for SympVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

/// `⟨μ, ν⟩ = μᵀJν`.
pub fn symp_product(mu: &SympVector, nu: &SympVector) -> Result<Fp> {
    mu.same_space(nu)?;
    Ok(Fp::reduce(mu.form(nu) as i64, mu.p as u32))
}

/// A `2n × 2n` matrix over `F_p`, acting on column vectors.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SympMatrix {
    p: u8,
    n: u8,
    packed: u128,
}

type Entries = [[u32; MAX_DIM]; MAX_DIM];

impl SympMatrix {
    pub fn new(p: u32, n: u32, entries: &[u32]) -> Result<Self> {
        check_params(p, n)?;
        let dim = 2 * n as usize;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!("expected {} entries, got {}", dim * dim, entries.len())));
        }
        let b = bits_for(p);
        let packed = entries
            .iter()
            .enumerate()
            .fold(0u128, |acc, (k, &c)| acc | (((c % p) as u128) << (k as u32 * b)));
        Ok(Self { p: p as u8, n: n as u8, packed })
    }

    pub fn identity(p: u32, n: u32) -> Self {
        let dim = 2 * n as usize;
        let entries: Vec<u32> = (0..dim * dim).map(|k| u32::from(k / dim == k % dim)).collect();
        Self::new(p, n, &entries).expect("validated parameters")
    }

    /// The form matrix `J = [[0, −I], [I, 0]]`.
    pub fn form_matrix(p: u32, n: u32) -> Self {
        let (dim, n) = (2 * n as usize, n as usize);
        let mut e = vec![0u32; dim * dim];
        for j in 0..n {
            e[j * dim + n + j] = p - 1;
            e[(n + j) * dim + j] = 1;
        }
        Self::new(p, n as u32, &e).expect("validated parameters")
    }

    pub fn p(&self) -> u32 {
        self.p as u32
    }

    pub fn n(&self) -> u32 {
        self.n as u32
    }

    pub fn dim(&self) -> usize {
        2 * self.n as usize
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        let b = bits_for(self.p as u32);
        let k = (i * self.dim() + j) as u32;
        ((self.packed >> (k * b)) & ((1 << b) - 1)) as u32
    }

    pub fn entries(&self) -> Vec<u32> {
        let d = self.dim();
        (0..d * d).map(|k| self.get(k / d, k % d)).collect()
    }

    fn unpack(&self) -> Entries {
        let mut e = [[0u32; MAX_DIM]; MAX_DIM];
        let d = self.dim();
        for (i, row) in e.iter_mut().enumerate().take(d) {
            for (j, x) in row.iter_mut().enumerate().take(d) {
                *x = self.get(i, j);
            }
        }
        e
    }

    fn pack(p: u8, n: u8, e: &Entries) -> Self {
        let d = 2 * n as usize;
        let b = bits_for(p as u32);
        let mut packed = 0u128;
        for i in 0..d {
            for j in 0..d {
                packed |= (e[i][j] as u128) << ((i * d + j) as u32 * b);
            }
        }
        Self { p, n, packed }
    }

    #[inline]
    fn row_mask(&self, i: usize) -> u64 {
        let d = self.dim();
        ((self.packed >> (i * d)) as u64) & ((1u64 << d) - 1)
    }

    #[inline]
    fn from_row_masks(n: u8, rows: &[u64]) -> Self {
        let d = 2 * n as usize;
        let packed = rows.iter().enumerate().fold(0u128, |acc, (i, &r)| acc | ((r as u128) << (i * d)));
        Self { p: 2, n, packed }
    }

    pub fn transpose(&self) -> Self {
        let e = self.unpack();
        let mut t = [[0u32; MAX_DIM]; MAX_DIM];
        for (i, row) in e.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                t[j][i] = x;
            }
        }
        Self::pack(self.p, self.n, &t)
    }

    /// `F·v`.
    pub fn apply(&self, v: &SympVector) -> SympVector {
        debug_assert_eq!((self.p, self.n), (v.p, v.n));
        let d = self.dim();
        if self.p == 2 {
            let packed = (0..d).fold(0u64, |acc, i| acc | (((self.row_mask(i) & v.packed).count_ones() as u64 & 1) << i));
            return SympVector { p: 2, n: self.n, packed };
        }
        let p = self.p as u32;
        let coords: Vec<u32> = (0..d).map(|i| (0..d).map(|j| self.get(i, j) * v.coord(j)).sum::<u32>() % p).collect();
        SympVector::new(p, self.n as u32, &coords).expect("same parameters")
    }

    /// `F` applied to the vector with domain index `x`.
    #[inline]
    pub fn apply_index(&self, x: usize) -> usize {
        self.apply(&SympVector::from_index(self.p as u32, self.n as u32, x)).index()
    }

    /// `FᵀJF = J`.
    pub fn is_symplectic(&self) -> bool {
        let j = Self::form_matrix(self.p as u32, self.n as u32);
        self.transpose().mul(&j).mul(self) == j
    }

    /// Transvection `x ↦ x + c⟨x, v⟩v`.
    pub fn transvection(v: &SympVector, c: u32) -> Self {
        let (p, n) = (v.p as u32, v.n as u32);
        let d = v.dim();
        let mut e = vec![0u32; d * d];
        for col in 0..d {
            let ej = SympVector::basis(p, n, col);
            let coef = c * ej.form(v) % p;
            for row in 0..d {
                e[row * d + col] = (u32::from(row == col) + coef * v.coord(row)) % p;
            }
        }
        Self::new(p, n, &e).expect("validated parameters")
    }

    /// `rank(F − I)` over `F_p`.
    pub fn rank_minus_identity(&self) -> u32 {
        let d = self.dim();
        if self.p == 2 {
            let mut rows: Vec<u64> = (0..d).map(|i| self.row_mask(i) ^ (1 << i)).collect();
            return rank_gf2(&mut rows);
        }
        let p = self.p as u32;
        let mut e = self.unpack();
        for (i, row) in e.iter_mut().enumerate().take(d) {
            row[i] = (row[i] + p - 1) % p;
        }
        rank_mod_p(&mut e, d, d, p)
    }

    /// Number of fixed vectors, `p^{2n − rank(F − I)}`.
    pub fn fixed_points(&self) -> u64 {
        (self.p as u64).pow(self.dim() as u32 - self.rank_minus_identity())
    }

    /// Inverse by Gauss-Jordan elimination over `F_p`.
    pub fn try_inverse(&self) -> Option<Self> {
        let d = self.dim();
        let p = self.p as u32;
        let field = PrimeField::new(p).ok()?;
        let mut a = self.unpack();
        let mut inv = Self::identity(p, self.n as u32).unpack();
        for col in 0..d {
            let piv = (col..d).find(|&r| a[r][col] != 0)?;
            a.swap(col, piv);
            inv.swap(col, piv);
            let s = field.inv_raw(a[col][col]);
            for j in 0..d {
                a[col][j] = a[col][j] * s % p;
                inv[col][j] = inv[col][j] * s % p;
            }
            for r in 0..d {
                if r != col && a[r][col] != 0 {
                    let f = a[r][col];
                    for j in 0..d {
                        a[r][j] = (a[r][j] + p * p - f * a[col][j]) % p;
                        inv[r][j] = (inv[r][j] + p * p - f * inv[col][j]) % p;
                    }
                }
            }
        }
        Some(Self::pack(self.p, self.n, &inv))
    }

    pub fn decode(p: u32, n: u32, bytes: &[u8]) -> Result<Self> {
        let entries: Vec<u32> = bytes.iter().map(|&b| b as u32).collect();
        if entries.iter().any(|&x| x >= p) {
            return Err(Error::CacheFormat(format!("matrix entry out of range for p = {p}")));
        }
        Self::new(p, n, &entries).map_err(|e| Error::CacheFormat(e.to_string()))
    }
}

fn rank_gf2(rows: &mut [u64]) -> u32 {
    let mut rank = 0;
    for bit in 0..64 {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 == 1) else { continue };
        rows.swap(rank, piv);
        let pr = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row >> bit & 1 == 1 {
                *row ^= pr;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank as u32
}

fn rank_mod_p(e: &mut Entries, rows: usize, cols: usize, p: u32) -> u32 {
    let field = PrimeField::new(p).expect("prime");
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| e[r][col] != 0) else { continue };
        e.swap(rank, piv);
        let s = field.inv_raw(e[rank][col]);
        for j in 0..cols {
            e[rank][j] = e[rank][j] * s % p;
        }
        for r in 0..rows {
            if r != rank && e[r][col] != 0 {
                let f = e[r][col];
                for j in 0..cols {
                    e[r][j] = (e[r][j] + p * p - f * e[rank][j]) % p;
                }
            }
        }
        rank += 1;
    }
    rank as u32
}

impl GroupElement for SympMatrix {
    fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!((self.p, self.n), (rhs.p, rhs.n));
        let d = self.dim();
        if self.p == 2 {
            let mut rows = [0u64; MAX_DIM];
            for (i, out) in rows.iter_mut().enumerate().take(d) {
                let mut a = self.row_mask(i);
                while a != 0 {
                    let j = a.trailing_zeros() as usize;
                    *out ^= rhs.row_mask(j);
                    a &= a - 1;
                }
            }
            return Self::from_row_masks(self.n, &rows[..d]);
        }
        let p = self.p as u32;
        let (a, b) = (self.unpack(), rhs.unpack());
        let mut c = [[0u32; MAX_DIM]; MAX_DIM];
        for i in 0..d {
            for k in 0..d {
                if a[i][k] == 0 {
                    continue;
                }
                for j in 0..d {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
            for x in c[i].iter_mut().take(d) {
                *x %= p;
            }
        }
        Self::pack(self.p, self.n, &c)
    }

    fn inv(&self) -> Self {
        self.try_inverse().expect("group elements are invertible")
    }

    /// Entries row-major, one byte each.
    fn encode(&self) -> Vec<u8> {
        self.entries().iter().map(|&x| x as u8).collect()
    }
}

impl fmt::Debug for SympMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim();
        let rows: Vec<Vec<u32>> = (0..d).map(|i| (0..d).map(|j| self.get(i, j)).collect()).collect();
        write!(f, "{rows:?}")
    }
}

/// Number of fixed points of `F` on `F_p^{2n}`.
pub fn fixed_points(f: &SympMatrix) -> u64 {
    f.fixed_points()
}

/// Transvections along `e_1, …, e_{2n}`, the sums `e_i + e_{i+1}` of neighbouring `x`
/// coordinates and the all-ones vector; for odd `p` also the same transvections scaled by a
/// primitive root of `F_p`. Without the neighbour sums the closure at `(p, n) = (2, 3)` is a
/// proper subgroup of order 51840.
pub fn sp_generators(p: u32, n: u32) -> Result<Vec<SympMatrix>> {
    check_params(p, n)?;
    let dim = 2 * n as usize;
    let mut axes: Vec<SympVector> = (0..dim).map(|i| SympVector::basis(p, n, i)).collect();
    for i in 1..n as usize {
        axes.push(SympVector::basis(p, n, i - 1).add(&SympVector::basis(p, n, i)));
    }
    axes.push(SympVector::new(p, n, &vec![1; dim])?);
    let mut gens: Vec<SympMatrix> = axes.iter().map(|v| SympMatrix::transvection(v, 1)).collect();
    if p > 2 {
        let c = PrimeField::new(p)?.primitive_root().value();
        gens.extend(axes.iter().map(|v| SympMatrix::transvection(v, c)));
    }
    debug_assert!(gens.iter().all(SympMatrix::is_symplectic));
    Ok(gens)
}

/// An enumerated symplectic group `Sp(2n, p)`.
#[derive(Clone, Debug)]
pub struct SpGroup {
    p: u32,
    n: u32,
    table: GroupTable<SympMatrix>,
}

impl SpGroup {
    /// Closure of [`sp_generators`], checked against the order formula.
    pub fn enumerate(p: u32, n: u32) -> Result<Self> {
        let gens = sp_generators(p, n)?;
        let expected = sp_order(p, n);
        let name = format!("Sp({},{p})", 2 * n);
        let table = GroupTable::closure(name.clone(), gens, expected as usize).map_err(|e| match e {
            Error::SizeLimit { .. } => Error::GenerationFailure { what: name.clone(), expected, got: expected + 1 },
            other => other,
        })?;
        if table.order() as u128 != expected {
            return Err(Error::GenerationFailure { what: name, expected, got: table.order() as u128 });
        }
        Ok(Self { p, n, table })
    }

    /// Loads from `dir` if a cache file exists and verifies it, otherwise enumerates and
    /// writes the cache file.
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

    pub fn cache_file_name(p: u32, n: u32) -> String {
        format!("sp_{}_{p}.group", 2 * n)
    }

    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        groups::write_cache(&self.table, CacheKind::Matrix, file)
    }

    pub fn read_cache(p: u32, n: u32, path: &Path) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let (header, records) = groups::read_cache(file)?;
        let name = format!("Sp({},{p})", 2 * n);
        if header.kind != CacheKind::Matrix || header.name != name {
            return Err(Error::CacheFormat(format!("{path:?} holds {} ({}), expected {name}", header.name, header.kind)));
        }
        if header.order as u128 != sp_order(p, n) {
            return Err(Error::CacheFormat(format!("{path:?}: order {} does not match |{name}|", header.order)));
        }
        let elements = records.iter().map(|r| SympMatrix::decode(p, n, &r.encoding)).collect::<Result<Vec<_>>>()?;
        let table = GroupTable::from_elements(name, elements, sp_generators(p, n)?)?;
        Ok(Self { p, n, table })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn table(&self) -> &GroupTable<SympMatrix> {
        &self.table
    }

    pub fn order(&self) -> usize {
        self.table.order()
    }
}

/// The natural action on `F_p^{2n}` (domain indices as in [`SympVector::index`]).
#[derive(Clone, Copy, Debug)]
pub struct VectorAction {
    p: u32,
    n: u32,
}

impl VectorAction {
    pub fn new(p: u32, n: u32) -> Self {
        Self { p, n }
    }
}

impl Action<SympMatrix> for VectorAction {
    fn domain_size(&self) -> usize {
        (self.p as usize).pow(2 * self.n)
    }

    fn act(&self, g: &SympMatrix, x: usize) -> usize {
        g.apply_index(x)
    }
}

/// The action on nonzero vectors; point `x` is the vector with index `x + 1`.
#[derive(Clone, Copy, Debug)]
pub struct NonzeroVectorAction {
    p: u32,
    n: u32,
}

impl NonzeroVectorAction {
    pub fn new(p: u32, n: u32) -> Self {
        Self { p, n }
    }
}

impl Action<SympMatrix> for NonzeroVectorAction {
    fn domain_size(&self) -> usize {
        (self.p as usize).pow(2 * self.n) - 1
    }

    fn act(&self, g: &SympMatrix, x: usize) -> usize {
        g.apply_index(x + 1) - 1
    }
}

/// Diagonal action on `(F_p^{2n})^{×k}`; a tuple's index has component `i` as its base-`p^{2n}` digit `i`.
#[derive(Clone, Copy, Debug)]
pub struct TupleAction {
    p: u32,
    n: u32,
    arity: u32,
}

impl TupleAction {
    pub fn new(p: u32, n: u32, arity: u32) -> Self {
        Self { p, n, arity }
    }

    fn base(&self) -> usize {
        (self.p as usize).pow(2 * self.n)
    }

    pub fn component(&self, x: usize, i: u32) -> SympVector {
        SympVector::from_index(self.p, self.n, x / self.base().pow(i) % self.base())
    }

    pub fn encode(&self, parts: &[SympVector]) -> usize {
        parts.iter().rev().fold(0, |acc, v| acc * self.base() + v.index())
    }
}

impl Action<SympMatrix> for TupleAction {
    fn domain_size(&self) -> usize {
        self.base().pow(self.arity)
    }

    fn act(&self, g: &SympMatrix, x: usize) -> usize {
        let (base, mut rest, mut out, mut place) = (self.base(), x, 0, 1);
        for _ in 0..self.arity {
            out += g.apply_index(rest % base) * place;
            rest /= base;
            place *= base;
        }
        out
    }

    fn permutation(&self, g: &SympMatrix) -> Vec<u32> {
        let base = self.base();
        let single: Vec<usize> = (0..base).map(|x| g.apply_index(x)).collect();
        (0..self.domain_size())
            .into_par_iter()
            .map(|x| {
                let (mut rest, mut out, mut place) = (x, 0, 1);
                for _ in 0..self.arity {
                    out += single[rest % base] * place;
                    rest /= base;
                    place *= base;
                }
                out as u32
            })
            .collect()
    }
}

/// Invariant label of a pair `(a, b)` under `Sp(2n, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairClass {
    ZeroZero,
    ZeroNonzero,
    NonzeroZero,
    /// `b = λa` with `λ ≠ 0`.
    Proportional(u32),
    /// `b` not proportional to `a`, classified by `⟨a, b⟩`.
    Independent(u32),
}

pub fn classify_pair(a: &SympVector, b: &SympVector) -> PairClass {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => PairClass::ZeroZero,
        (true, false) => PairClass::ZeroNonzero,
        (false, true) => PairClass::NonzeroZero,
        (false, false) => match (1..a.p()).find(|&l| a.scale(l) == *b) {
            Some(l) => PairClass::Proportional(l),
            None => PairClass::Independent(a.form(b)),
        },
    }
}

/// Result of classifying `Sp`-orbits on pairs two ways.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittOrbitTable {
    pub p: u32,
    pub n: u32,
    /// Orbit count from the explicit sweep.
    pub swept_orbits: usize,
    /// Number of distinct invariant labels.
    pub invariant_classes: usize,
    /// `(label, orbit size)`, sorted by label.
    pub classes: Vec<(PairClass, usize)>,
}

/// Classifies the orbits of `Sp(2n, p)` on `(F_p^{2n})^{×2}` by an explicit sweep and by the
/// invariants (zero pattern, proportionality, symplectic product); the two must coincide.
pub fn witt_orbit_classifier(group: &SpGroup) -> Result<WittOrbitTable> {
    let (p, n) = (group.p, group.n);
    let action = TupleAction::new(p, n, 2);
    let part = orbits(group.table(), &action)?;
    let mut label_of_orbit: Vec<Option<PairClass>> = vec![None; part.orbit_count()];
    let mut orbit_of_label: std::collections::BTreeMap<PairClass, usize> = Default::default();
    for x in 0..action.domain_size() {
        let label = classify_pair(&action.component(x, 0), &action.component(x, 1));
        let orbit = part.orbit_index(x);
        match label_of_orbit[orbit] {
            None => label_of_orbit[orbit] = Some(label),
            Some(l) if l != label => {
                return Err(Error::Consistency(format!("orbit {orbit} mixes invariant classes {l:?} and {label:?}")));
            }
            _ => {}
        }
        if *orbit_of_label.entry(label).or_insert(orbit) != orbit {
            return Err(Error::Consistency(format!("invariant class {label:?} spans several orbits")));
        }
    }
    let classes = orbit_of_label.iter().map(|(&l, &o)| (l, part.orbit_sizes()[o])).collect();
    Ok(WittOrbitTable { p, n, swept_orbits: part.orbit_count(), invariant_classes: orbit_of_label.len(), classes })
}

/// True iff `group` is transitive on antiflags `(μ, ν^⊥)` with `⟨μ, ν⟩ = 1`, encoded as
/// vector pairs `(μ, ν)`.
pub fn antiflag_transitive(group: &GroupTable<SympMatrix>) -> Result<bool> {
    let g = group.identity();
    let (p, n) = (g.p(), g.n());
    let action = TupleAction::new(p, n, 2);
    let antiflags: Vec<usize> = (0..action.domain_size())
        .filter(|&x| action.component(x, 0).form(&action.component(x, 1)) == 1)
        .collect();
    let Some(&start) = antiflags.first() else { return Ok(false) };
    Ok(orbit_of(group, &action, start).len() == antiflags.len())
}

/// `SL(2, q)` acting on `F_q²`.
#[derive(Clone, Debug)]
pub struct Sl2q {
    field: ExtField,
    /// Matrices `[a, b, c, d]` for `[[a, b], [c, d]]`.
    elements: Vec<[ExtElem; 4]>,
    fixed: Vec<u64>,
}

/// Enumerates `SL(2, q)`, counts fixed points of every element on `F_q²`, and checks the
/// class profile: `q² − 1` nonidentity elements with `q` fixed points and `q³ − q² − q`
/// with exactly one.
pub fn sl2q_embedding(q: u32) -> Result<Sl2q> {
    let field = ExtField::with_order(q)?;
    if q > 16 {
        return Err(Error::SizeLimit { what: format!("SL(2,{q})"), limit: 16 });
    }
    let one = field.one();
    let mut elements = Vec::new();
    for a in field.elements() {
        for b in field.elements() {
            for c in field.elements() {
                for d in field.elements() {
                    if field.sub(field.mul(a, d), field.mul(b, c)) == one {
                        elements.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    let order = (q * (q * q - 1)) as usize;
    if elements.len() != order {
        return Err(Error::GenerationFailure { what: format!("SL(2,{q})"), expected: order as u128, got: elements.len() as u128 });
    }
    let fixed: Vec<u64> = elements
        .iter()
        .map(|m| {
            let mut count = 0;
            for x in field.elements() {
                for y in field.elements() {
                    let fx = field.add(field.mul(m[0], x), field.mul(m[1], y));
                    let fy = field.add(field.mul(m[2], x), field.mul(m[3], y));
                    count += u64::from(fx == x && fy == y);
                }
            }
            count
        })
        .collect();
    let sl = Sl2q { field, elements, fixed };
    let (with_q, with_one) = sl.profile();
    let q64 = q as u64;
    if with_q != q64 * q64 - 1 || with_one != q64.pow(3) - q64 * q64 - q64 {
        return Err(Error::Consistency(format!(
            "SL(2,{q}) fixed-point profile: {with_q} elements with f = q, {with_one} with f = 1"
        )));
    }
    Ok(sl)
}

impl Sl2q {
    pub fn q(&self) -> u32 {
        self.field.order()
    }

    pub fn field(&self) -> &ExtField {
        &self.field
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[[ExtElem; 4]] {
        &self.elements
    }

    /// Fixed-point counts on `F_q²`, aligned with [`Sl2q::elements`].
    pub fn fixed_points(&self) -> &[u64] {
        &self.fixed
    }

    /// `(# nonidentity elements with f = q, # nonidentity elements with f = 1)`.
    pub fn profile(&self) -> (u64, u64) {
        let q = self.q() as u64;
        let one = self.field.one();
        let zero = self.field.zero();
        let mut with_q = 0;
        let mut with_one = 0;
        for (m, &f) in self.elements.iter().zip(&self.fixed) {
            if *m == [one, zero, zero, one] {
                continue;
            }
            with_q += u64::from(f == q);
            with_one += u64::from(f == 1);
        }
        (with_q, with_one)
    }

    /// Images of all elements in `Sp(2k, p)` under `F_q² ≅ F_p^{2k}`, `v = (a, b) ↦
    /// (coefficients of a, trace-dual coordinates of b)`. In these coordinates
    /// `⟨μ, ν⟩ = −Tr(det(v, w))`, so determinant-one maps become symplectic.
    pub fn embed(&self) -> Result<Vec<SympMatrix>> {
        let f = &self.field;
        let (p, k) = (f.characteristic(), f.degree());
        let kk = k as usize;
        let basis: Vec<ExtElem> = (0..kk)
            .map(|i| {
                let mut c = vec![0; kk];
                c[i] = 1;
                f.from_coeffs(&c)
            })
            .collect::<Result<_>>()?;
        let gram: Vec<Vec<u32>> =
            basis.iter().map(|&x| basis.iter().map(|&y| f.trace(f.mul(x, y)).value()).collect()).collect();
        let gram_inv = invert_small(&gram, p)
            .ok_or_else(|| Error::Consistency(format!("trace form on F_{} is degenerate", f.order())))?;
        let dual: Vec<ExtElem> = (0..kk)
            .map(|j| {
                (0..kk).fold(f.zero(), |acc, l| {
                    f.add(acc, f.mul(f.from_prime(Fp::reduce(gram_inv[j][l] as i64, p)), basis[l]))
                })
            })
            .collect();
        let coords = |a: ExtElem, b: ExtElem| -> Vec<u32> {
            let mut v = f.coeffs(a);
            v.extend(basis.iter().map(|&bj| f.trace(f.mul(b, bj)).value()));
            v
        };
        let dim = 2 * kk;
        self.elements
            .iter()
            .map(|m| {
                let mut e = vec![0u32; dim * dim];
                for col in 0..dim {
                    let (a, b) = if col < kk { (basis[col], f.zero()) } else { (f.zero(), dual[col - kk]) };
                    let fa = f.add(f.mul(m[0], a), f.mul(m[1], b));
                    let fb = f.add(f.mul(m[2], a), f.mul(m[3], b));
                    for (row, c) in coords(fa, fb).into_iter().enumerate() {
                        e[row * dim + col] = c;
                    }
                }
                SympMatrix::new(p, k, &e)
            })
            .collect()
    }
}

fn invert_small(m: &[Vec<u32>], p: u32) -> Option<Vec<Vec<u32>>> {
    let k = m.len();
    let field = PrimeField::new(p).ok()?;
    let mut a: Vec<Vec<u32>> = m.to_vec();
    let mut inv: Vec<Vec<u32>> = (0..k).map(|i| (0..k).map(|j| u32::from(i == j)).collect()).collect();
    for col in 0..k {
        let piv = (col..k).find(|&r| a[r][col] != 0)?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let s = field.inv_raw(a[col][col]);
        for j in 0..k {
            a[col][j] = a[col][j] * s % p;
            inv[col][j] = inv[col][j] * s % p;
        }
        for r in 0..k {
            if r != col && a[r][col] != 0 {
                let f = a[r][col];
                for j in 0..k {
                    a[r][j] = (a[r][j] + p * p - f * a[col][j]) % p;
                    inv[r][j] = (inv[r][j] + p * p - f * inv[col][j]) % p;
                }
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::burnside_orbit_count;
    use rand::Rng;

    fn v(p: u32, n: u32, c: &[u32]) -> SympVector {
        SympVector::new(p, n, c).unwrap()
    }

    #[test]
    fn product_examples() {
        assert_eq!(symp_product(&v(2, 1, &[1, 0]), &v(2, 1, &[0, 1])).unwrap().value(), 1);
        assert_eq!(symp_product(&v(3, 1, &[1, 2]), &v(3, 1, &[2, 1])).unwrap().value(), 0);
        // μᵀJν with J = [[0,-1],[1,0]]: (1,0)·J(0,1) = (1,0)·(-1,0) = -1
        assert_eq!(symp_product(&v(3, 1, &[1, 0]), &v(3, 1, &[0, 1])).unwrap().value(), 2);
        assert!(matches!(symp_product(&v(2, 1, &[1, 0]), &v(2, 2, &[1, 0, 0, 0])), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn product_is_alternating_exhaustive() {
        for (p, n) in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)] {
            let q = (p as usize).pow(2 * n);
            for a in 0..q {
                let mu = SympVector::from_index(p, n, a);
                assert_eq!(mu.form(&mu), 0);
                assert_eq!(mu.index(), a);
                for b in 0..q {
                    let nu = SympVector::from_index(p, n, b);
                    assert_eq!((mu.form(&nu) + nu.form(&mu)) % p, 0);
                }
            }
        }
    }

    #[test]
    fn form_matches_matrix_definition() {
        let mut rng = crate::linalg::seeded_rng(5);
        for (p, n) in [(2, 3), (3, 2), (7, 1)] {
            let j = SympMatrix::form_matrix(p, n);
            let q = (p as usize).pow(2 * n);
            for _ in 0..50 {
                let mu = SympVector::from_index(p, n, rng.random_range(0..q));
                let nu = SympVector::from_index(p, n, rng.random_range(0..q));
                let jnu = j.apply(&nu);
                let direct: u32 = mu.coords().iter().zip(jnu.coords()).map(|(a, b)| a * b).sum::<u32>() % p;
                assert_eq!(direct, mu.form(&nu));
            }
        }
    }

    #[test]
    fn generator_closure_orders() {
        assert_eq!(SpGroup::enumerate(2, 1).unwrap().order(), 6);
        assert_eq!(SpGroup::enumerate(2, 2).unwrap().order(), 720);
        assert_eq!(SpGroup::enumerate(3, 1).unwrap().order(), 24);
        assert_eq!(SpGroup::enumerate(5, 1).unwrap().order(), 120);
        assert_eq!(sp_order(2, 3), 1_451_520);
        assert_eq!(sp_order(3, 2), 51_840);
    }

    #[test]
    fn every_element_is_symplectic() {
        for (p, n) in [(2, 1), (2, 2), (3, 1), (3, 2)] {
            let g = SpGroup::enumerate(p, n).unwrap();
            assert!(g.table().elements().par_iter().all(SympMatrix::is_symplectic));
            g.table().check_axioms(200, 9).unwrap();
        }
    }

    #[test]
    fn inverse_and_packing() {
        let g = SpGroup::enumerate(3, 2).unwrap();
        for m in g.table().elements().iter().step_by(97) {
            assert_eq!(m.mul(&m.inv()), SympMatrix::identity(3, 2));
            assert_eq!(SympMatrix::decode(3, 2, &m.encode()).unwrap(), *m);
        }
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(fixed_points(&SympMatrix::identity(2, 2)), 16);
        let t = SympMatrix::transvection(&SympVector::basis(2, 1, 0), 1);
        assert_eq!(fixed_points(&t), 2);
        for (p, n) in [(2, 2), (3, 2), (5, 1)] {
            for i in 0..2 * n as usize {
                let t = SympMatrix::transvection(&SympVector::basis(p, n, i), 1);
                assert_eq!(t.rank_minus_identity(), 1);
                assert_eq!(fixed_points(&t), (p as u64).pow(2 * n - 1));
            }
        }
    }

    #[test]
    fn fixed_points_match_enumeration() {
        for (p, n) in [(2, 2), (3, 1), (3, 2)] {
            let g = SpGroup::enumerate(p, n).unwrap();
            let act = VectorAction::new(p, n);
            for m in g.table().elements().iter().step_by(37) {
                let brute = (0..act.domain_size()).filter(|&x| act.act(m, x) == x).count() as u64;
                assert_eq!(brute, m.fixed_points());
            }
        }
    }

    #[test]
    fn fixed_points_are_class_functions() {
        let g = SpGroup::enumerate(2, 2).unwrap();
        let mut rng = crate::linalg::seeded_rng(1);
        for _ in 0..200 {
            let f = g.table().element(rng.random_range(0..720));
            let h = g.table().element(rng.random_range(0..720));
            assert_eq!(f.fixed_points(), h.mul(f).mul(&h.inv()).fixed_points());
        }
    }

    #[test]
    fn burnside_on_vectors_gives_two_orbits() {
        for (p, n) in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)] {
            let g = SpGroup::enumerate(p, n).unwrap();
            let total: u64 = g.table().elements().iter().map(SympMatrix::fixed_points).sum();
            assert_eq!(total, 2 * g.order() as u64);
            let act = VectorAction::new(p, n);
            assert_eq!(orbits(g.table(), &act).unwrap().orbit_count(), 2);
            assert_eq!(burnside_orbit_count(g.table(), &act).unwrap(), 2);
        }
    }

    #[test]
    fn witt_examples() {
        for (p, n, expected) in [(2, 1, 5), (2, 2, 6), (3, 1, 7), (5, 1, 11), (3, 2, 8)] {
            let g = SpGroup::enumerate(p, n).unwrap();
            let table = witt_orbit_classifier(&g).unwrap();
            assert_eq!(table.swept_orbits, expected, "p={p} n={n}");
            assert_eq!(table.invariant_classes, expected);
        }
    }

    #[test]
    fn sl2q_profiles() {
        for (q, order, fq, f1) in [(2, 6, 3, 2), (3, 24, 8, 15), (4, 60, 15, 44), (5, 120, 24, 95)] {
            let sl = sl2q_embedding(q).unwrap();
            assert_eq!(sl.order(), order);
            assert_eq!(sl.profile(), (fq, f1));
        }
    }

    #[test]
    fn sl2q_embeds_symplectically() {
        for q in [2, 3, 4, 8, 9] {
            let sl = sl2q_embedding(q).unwrap();
            let embedded = sl.embed().unwrap();
            assert!(embedded.iter().all(SympMatrix::is_symplectic), "q={q}");
            for (m, &f) in embedded.iter().zip(sl.fixed_points()) {
                assert_eq!(m.fixed_points(), f);
            }
            let distinct: std::collections::HashSet<_> = embedded.iter().collect();
            assert_eq!(distinct.len(), sl.order());
        }
    }

    #[test]
    fn antiflags() {
        let g = SpGroup::enumerate(2, 2).unwrap();
        assert!(antiflag_transitive(g.table()).unwrap());
        let t = SympMatrix::transvection(&SympVector::basis(2, 2, 0), 1);
        let small = GroupTable::closure("T", vec![t], 2).unwrap();
        assert!(!antiflag_transitive(&small).unwrap());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cold = SpGroup::load_or_enumerate(2, 2, Some(dir.path())).unwrap();
        let warm = SpGroup::load_or_enumerate(2, 2, Some(dir.path())).unwrap();
        assert_eq!(cold.table().elements(), warm.table().elements());
    }
}

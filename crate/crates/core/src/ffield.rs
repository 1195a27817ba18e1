//! Prime fields `F_p` and small extension fields `F_{p^k}`.
//!
//! Prime-field scalars are plain value records carrying their modulus. Extension-field
//! elements are stored as the integer `Σ c_i p^i` of their coefficient vector and all
//! arithmetic goes through precomputed tables held by [`ExtField`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Trial-division primality test.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u32;
    while k.saturating_mul(k) <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Writes `q` as `p^k` if `q` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut rest, mut k) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

/// An element of the prime field `F_p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp {
    value: u32,
    p: u32,
}

impl Fp {
    /// Reduces `value` modulo `p`; fails unless `p` is prime.
    pub fn new(value: i64, p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Domain(format!("modulus {p} is not prime")));
        }
        Ok(Self::reduce(value, p))
    }

    pub(crate) fn reduce(value: i64, p: u32) -> Self {
        Self { value: value.rem_euclid(p as i64) as u32, p }
    }

    pub fn zero(p: u32) -> Self {
        Self { value: 0, p }
    }

    pub fn one(p: u32) -> Self {
        Self { value: 1 % p, p }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let p = self.p as u64;
        let (mut base, mut acc) = (self.value as u64, 1 % p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        Self { value: acc as u32, p: self.p }
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::Domain(format!("0 has no inverse in F_{}", self.p)));
        }
        let (mut r0, mut r1) = (self.p as i64, self.value as i64);
        let (mut s0, mut s1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        Ok(Self::reduce(s0, self.p))
    }

    fn check(self, other: Self) {
        debug_assert_eq!(self.p, other.p, "mixed moduli");
    }
}

/// Inverse of a nonzero prime-field element.
pub fn field_inv(x: Fp) -> Result<Fp> {
    x.inv()
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.p)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        self.check(rhs);
        Fp { value: (self.value + rhs.value) % self.p, p: self.p }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self.check(rhs);
        Fp { value: (self.value + self.p - rhs.value) % self.p, p: self.p }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        self.check(rhs);
        Fp { value: ((self.value as u64 * rhs.value as u64) % self.p as u64) as u32, p: self.p }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp { value: (self.p - self.value) % self.p, p: self.p }
    }
}

/// Table-driven prime field used inside elimination loops.
#[derive(Clone, Debug)]
pub struct PrimeField {
    p: u32,
    inv: Vec<u32>,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Domain(format!("modulus {p} is not prime")));
        }
        let mut inv = vec![0u32; p as usize];
        for x in 1..p {
            inv[x as usize] = Fp::reduce(x as i64, p).inv()?.value;
        }
        Ok(Self { p, inv })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn elem(&self, value: i64) -> Fp {
        Fp::reduce(value, self.p)
    }

    /// Table inverse of a raw residue; `inv_raw(0)` is 0.
    #[inline]
    pub fn inv_raw(&self, x: u32) -> u32 {
        self.inv[x as usize]
    }

    /// Smallest generator of the multiplicative group.
    pub fn primitive_root(&self) -> Fp {
        let p = self.p;
        if p == 2 {
            return Fp::one(2);
        }
        (2..p)
            .map(|g| Fp::reduce(g as i64, p))
            .find(|g| (1..p - 1).all(|e| g.pow(e as u64).value != 1))
            .expect("F_p^* is cyclic")
    }
}

// --- polynomials over F_p, coefficient vectors low degree first ---

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let t = (lead as u64 * c as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
        }
        r.pop();
    }
    poly_trim(r)
}

fn poly_is_irreducible(f: &[u32], p: u32) -> bool {
    let k = f.len() - 1;
    if k <= 1 {
        return k == 1;
    }
    // trial division by every monic polynomial of degree 1..=k/2
    for deg in 1..=k / 2 {
        for idx in 0..(p as u64).pow(deg as u32) {
            let mut g = digits(idx, p, deg);
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn digits(mut idx: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((idx % p as u64) as u32);
        idx /= p as u64;
    }
    out
}

/// Smallest monic irreducible polynomial of degree `k` over `F_p`, as coefficients
/// `[c_0, …, c_{k-1}, 1]`.
///
/// Candidates are ordered by the integer `Σ c_i p^i`, i.e. lexicographically from the
/// highest non-leading coefficient down.
pub fn enumerate_irreducible(p: u32, k: u32) -> Result<Vec<u32>> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    if k == 0 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    for idx in 0..(p as u64).pow(k) {
        let mut f = digits(idx, p, k as usize);
        f.push(1);
        if poly_is_irreducible(&f, p) {
            return Ok(f);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// An element of an extension field; meaningful only together with its [`ExtField`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtElem(pub u32);

/// The field `F_q = F_p[x]/(m(x))` with `m` from [`enumerate_irreducible`].
#[derive(Clone, Debug)]
pub struct ExtField {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

impl ExtField {
    /// Largest order supported; tables are `q²` entries.
    pub const MAX_ORDER: u32 = 1024;

    pub fn new(p: u32, k: u32) -> Result<Self> {
        let modulus = enumerate_irreducible(p, k)?;
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= Self::MAX_ORDER)
            .ok_or_else(|| Error::SizeLimit { what: format!("F_{p}^{k}"), limit: Self::MAX_ORDER as u128 })?;
        let qs = q as usize;
        let encode = |c: &[u32]| c.iter().rev().fold(0u32, |acc, &x| acc * p + x);
        let mut add = vec![0u32; qs * qs];
        let mut mul = vec![0u32; qs * qs];
        let mut neg = vec![0u32; qs];
        for a in 0..q {
            let ca = digits(a as u64, p, k as usize);
            neg[a as usize] = encode(&ca.iter().map(|&x| (p - x) % p).collect::<Vec<_>>());
            for b in 0..q {
                let cb = digits(b as u64, p, k as usize);
                let sum: Vec<u32> = ca.iter().zip(&cb).map(|(&x, &y)| (x + y) % p).collect();
                add[a as usize * qs + b as usize] = encode(&sum);
                let mut prod = vec![0u32; 2 * k as usize - 1];
                for (i, &x) in ca.iter().enumerate() {
                    for (j, &y) in cb.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = poly_rem(&prod, &modulus, p);
                r.resize(k as usize, 0);
                mul[a as usize * qs + b as usize] = encode(&r);
            }
        }
        let mut inv = vec![0u32; qs];
        for a in 1..q {
            inv[a as usize] = (1..q).find(|&b| mul[a as usize * qs + b as usize] == 1).ok_or_else(|| {
                Error::Construction(format!("element {a} of F_{q} has no inverse"))
            })?;
        }
        Ok(Self { p, k, q, modulus, add, mul, neg, inv })
    }

    /// Builds `F_q` for a prime power `q`.
    pub fn with_order(q: u32) -> Result<Self> {
        let (p, k) = prime_power(q).ok_or_else(|| Error::Domain(format!("{q} is not a prime power")))?;
        Self::new(p, k)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> ExtElem {
        ExtElem(0)
    }

    pub fn one(&self) -> ExtElem {
        ExtElem(1)
    }

    pub fn elements(&self) -> impl Iterator<Item = ExtElem> {
        (0..self.q).map(ExtElem)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<ExtElem> {
        if coeffs.len() != self.k as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::Domain(format!("invalid coefficient vector {coeffs:?} for F_{}", self.q)));
        }
        Ok(ExtElem(coeffs.iter().rev().fold(0, |acc, &x| acc * self.p + x)))
    }

    pub fn coeffs(&self, x: ExtElem) -> Vec<u32> {
        digits(x.0 as u64, self.p, self.k as usize)
    }

    /// Embeds a prime-field scalar as a constant polynomial.
    pub fn from_prime(&self, x: Fp) -> ExtElem {
        debug_assert_eq!(x.modulus(), self.p);
        ExtElem(x.value())
    }

    #[inline]
    pub fn add(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        ExtElem(self.add[a.0 as usize * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: ExtElem) -> ExtElem {
        ExtElem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        ExtElem(self.mul[a.0 as usize * self.q as usize + b.0 as usize])
    }

    pub fn inv(&self, a: ExtElem) -> Result<ExtElem> {
        if a.0 == 0 {
            return Err(Error::Domain(format!("0 has no inverse in F_{}", self.q)));
        }
        Ok(ExtElem(self.inv[a.0 as usize]))
    }

    pub fn pow(&self, a: ExtElem, mut e: u64) -> ExtElem {
        let (mut base, mut acc) = (a, self.one());
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn frobenius(&self, a: ExtElem) -> ExtElem {
        self.pow(a, self.p as u64)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order_of(&self, a: ExtElem) -> Option<u32> {
        if a.0 == 0 {
            return None;
        }
        let mut x = a;
        for k in 1..self.q {
            if x == self.one() {
                return Some(k);
            }
            x = self.mul(x, a);
        }
        None
    }

    /// Absolute trace `x + x^p + … + x^{p^{k-1}}`, an element of the prime subfield.
    pub fn trace(&self, x: ExtElem) -> Fp {
        let mut acc = self.zero();
        let mut y = x;
        for _ in 0..self.k {
            acc = self.add(acc, y);
            y = self.frobenius(y);
        }
        debug_assert!(acc.0 < self.p, "trace must land in the prime subfield");
        Fp::reduce(acc.0 as i64, self.p)
    }
}

/// Absolute trace of an extension-field element.
pub fn ext_trace(field: &ExtField, x: ExtElem) -> Fp {
    field.trace(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL_PRIMES: [u32; 6] = [2, 3, 5, 7, 11, 13];

    #[test]
    fn inverse_examples() {
        assert_eq!(field_inv(Fp::new(1, 2).unwrap()).unwrap().value(), 1);
        assert_eq!(field_inv(Fp::new(2, 5).unwrap()).unwrap().value(), 3);
        // brute force: y with 3y = 1 mod 7
        let y = (0..7).find(|y| 3 * y % 7 == 1).unwrap();
        assert_eq!(field_inv(Fp::new(3, 7).unwrap()).unwrap().value(), y);
        assert!(matches!(field_inv(Fp::zero(5)), Err(Error::Domain(_))));
    }

    #[test]
    fn non_prime_modulus_rejected() {
        assert!(Fp::new(1, 4).is_err());
        assert!(PrimeField::new(9).is_err());
    }

    #[test]
    fn prime_field_axioms_exhaustive() {
        for &p in &SMALL_PRIMES {
            let els: Vec<Fp> = (0..p).map(|v| Fp::new(v as i64, p).unwrap()).collect();
            let (zero, one) = (Fp::zero(p), Fp::one(p));
            for &a in &els {
                assert_eq!(a + zero, a);
                assert_eq!(a * one, a);
                assert_eq!(a + (-a), zero);
                if !a.is_zero() {
                    assert_eq!(a * a.inv().unwrap(), one);
                }
                for &b in &els {
                    assert_eq!(a + b, b + a);
                    assert_eq!(a * b, b * a);
                    assert_eq!(a - b + b, a);
                    for &c in &els {
                        assert_eq!((a + b) + c, a + (b + c));
                        assert_eq!((a * b) * c, a * (b * c));
                        assert_eq!(a * (b + c), a * b + a * c);
                    }
                }
            }
        }
    }

    #[test]
    fn prime_field_tables_match_euclid() {
        for &p in &SMALL_PRIMES {
            let f = PrimeField::new(p).unwrap();
            for x in 1..p {
                assert_eq!(f.inv_raw(x), Fp::new(x as i64, p).unwrap().inv().unwrap().value());
            }
            let g = f.primitive_root();
            let generated: std::collections::BTreeSet<u32> = (0..p - 1).map(|e| g.pow(e as u64).value()).collect();
            assert_eq!(generated.len() as u32, p - 1);
        }
    }

    #[test]
    fn irreducible_examples() {
        assert_eq!(enumerate_irreducible(2, 1).unwrap(), vec![0, 1]);
        assert_eq!(enumerate_irreducible(2, 2).unwrap(), vec![1, 1, 1]);
        assert_eq!(enumerate_irreducible(3, 2).unwrap(), vec![1, 0, 1]);
        assert_eq!(enumerate_irreducible(2, 3).unwrap(), vec![1, 1, 0, 1]);
        assert_eq!(enumerate_irreducible(2, 4).unwrap(), vec![1, 1, 0, 0, 1]);
    }

    #[test]
    fn only_irreducible_quadratic_over_f2() {
        let irreducible: Vec<u64> = (0..4)
            .filter(|&idx| {
                let mut f = digits(idx, 2, 2);
                f.push(1);
                poly_is_irreducible(&f, 2)
            })
            .collect();
        assert_eq!(irreducible, vec![3]);
    }

    fn fields() -> Vec<ExtField> {
        [2, 3, 4, 5, 7, 8, 9, 16].iter().map(|&q| ExtField::with_order(q).unwrap()).collect()
    }

    #[test]
    fn extension_field_axioms_exhaustive() {
        for f in fields() {
            let els: Vec<ExtElem> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), f.zero());
                if a != f.zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
                }
                for &b in &els {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn multiplicative_group_is_cyclic() {
        for f in fields() {
            let q = f.order();
            assert!(f.elements().any(|a| f.order_of(a) == Some(q - 1)), "F_{q}^* not cyclic");
        }
    }

    #[test]
    fn frobenius_fixes_exactly_prime_subfield() {
        for f in fields() {
            let fixed: Vec<ExtElem> = f.elements().filter(|&a| f.frobenius(a) == a).collect();
            assert_eq!(fixed, (0..f.characteristic()).map(ExtElem).collect::<Vec<_>>());
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
                    assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
                }
            }
        }
    }

    #[test]
    fn trace_examples() {
        let f2 = ExtField::with_order(2).unwrap();
        assert_eq!(ext_trace(&f2, f2.one()).value(), 1);
        let f4 = ExtField::with_order(4).unwrap();
        assert_eq!(ext_trace(&f4, f4.one()).value(), 0);
        let omega = f4.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f4.order_of(omega), Some(3));
        assert_eq!(ext_trace(&f4, omega).value(), 1);
    }

    #[test]
    fn trace_is_linear_and_balanced() {
        for f in fields() {
            let p = f.characteristic();
            let mut fibers = vec![0u32; p as usize];
            for a in f.elements() {
                fibers[f.trace(a).value() as usize] += 1;
                for b in f.elements() {
                    assert_eq!(f.trace(f.add(a, b)), f.trace(a) + f.trace(b));
                }
                for c in 0..p {
                    let c = Fp::new(c as i64, p).unwrap();
                    assert_eq!(f.trace(f.mul(f.from_prime(c), a)), c * f.trace(a));
                }
            }
            let fiber = f.order() / p;
            assert!(fibers.iter().all(|&n| n == fiber), "fibers {fibers:?} for F_{}", f.order());
        }
    }

    #[test]
    fn prime_power_decomposition() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(16), Some((2, 4)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}

use crate::error::{Error, Result};

use super::{Action, GroupElement};

/// A permutation of `0..n`, stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Self((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            let slot = seen.get_mut(x as usize).ok_or_else(|| Error::Domain(format!("image {x} out of range")))?;
            if std::mem::replace(slot, true) {
                return Err(Error::Domain(format!("image {x} repeated")));
            }
        }
        Ok(Self(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }
}

impl GroupElement for Perm {
    /// `(a·b)(x) = a(b(x))`.
    fn mul(&self, rhs: &Self) -> Self {
        Self(rhs.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    fn inv(&self) -> Self {
        let mut out = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            out[x as usize] = i as u32;
        }
        Self(out)
    }

    fn encode(&self) -> Vec<u8> {
        self.0.iter().flat_map(|x| x.to_be_bytes()).collect()
    }
}

impl Perm {
    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if !bytes.len().is_multiple_of(4) {
            return Err(Error::CacheFormat("permutation encoding length not a multiple of 4".into()));
        }
        Self::from_images(bytes.chunks_exact(4).map(|c| u32::from_be_bytes([c[0], c[1], c[2], c[3]])).collect())
    }
}

/// The natural action of permutations of degree `n`.
#[derive(Clone, Copy, Debug)]
pub struct PermAction(usize);

impl PermAction {
    pub fn new(n: usize) -> Self {
        Self(n)
    }
}

impl Action<Perm> for PermAction {
    fn domain_size(&self) -> usize {
        self.0
    }

    fn act(&self, g: &Perm, x: usize) -> usize {
        g.apply(x)
    }
}

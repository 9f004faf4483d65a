//! Merkle vector commitments over full power-of-two trees.

use std::marker::PhantomData;

use crate::encoding::{Decode, DecodeError, Encode, Reader};
use crate::field::FieldElement;
use crate::hash::{compress, hash2, tag};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VcError {
    #[error("vector length must be at least 1")]
    ZeroLength,
    #[error("vector of length {len} exceeds capacity {cap}")]
    VectorTooLong { len: usize, cap: usize },
    #[error("index {index} out of range for capacity {cap}")]
    IndexOutOfRange { index: usize, cap: usize },
}

/// Maps vector elements to tree leaves.
pub trait LeafEncoder {
    type Elem: Clone;
    /// Element used to fill short vectors.
    fn padding() -> Self::Elem;
    fn leaf(e: &Self::Elem) -> FieldElement;
}

/// Attribute pairs `(idx, value)`; placeholders are `(0, 0)`.
#[derive(Debug, Clone, Copy)]
pub struct AttrLeaves;

/// Issuer pairs `(pk digest, revocation root)`; padding is `(0, 0)`.
#[derive(Debug, Clone, Copy)]
pub struct IssuerLeaves;

/// Field elements used directly as leaves; padding is `0`.
#[derive(Debug, Clone, Copy)]
pub struct RawLeaves;

pub fn attr_leaf(idx: FieldElement, value: FieldElement) -> FieldElement {
    FieldElement(compress(tag::ATTR_LEAF, idx.0, value.0))
}

pub fn issuer_leaf(pk_digest: FieldElement, c_r: FieldElement) -> FieldElement {
    FieldElement(compress(tag::ISSUER_LEAF, pk_digest.0, c_r.0))
}

impl LeafEncoder for AttrLeaves {
    type Elem = (FieldElement, FieldElement);
    fn padding() -> Self::Elem {
        (FieldElement::ZERO, FieldElement::ZERO)
    }
    fn leaf(e: &Self::Elem) -> FieldElement {
        attr_leaf(e.0, e.1)
    }
}

impl LeafEncoder for IssuerLeaves {
    type Elem = (FieldElement, FieldElement);
    fn padding() -> Self::Elem {
        (FieldElement::ZERO, FieldElement::ZERO)
    }
    fn leaf(e: &Self::Elem) -> FieldElement {
        issuer_leaf(e.0, e.1)
    }
}

impl LeafEncoder for RawLeaves {
    type Elem = FieldElement;
    fn padding() -> Self::Elem {
        FieldElement::ZERO
    }
    fn leaf(e: &Self::Elem) -> FieldElement {
        *e
    }
}

#[derive(Debug)]
pub struct VcParams<L> {
    n: usize,
    depth: u32,
    _leaf: PhantomData<L>,
}

impl<L> Clone for VcParams<L> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<L> Copy for VcParams<L> {}

impl<L> PartialEq for VcParams<L> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl<L> Eq for VcParams<L> {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Commitment(pub FieldElement);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpeningProof {
    pub index: u64,
    pub siblings: Vec<FieldElement>,
}

/// Rounds `n` up to a power of two, minimum 2.
pub fn vc_setup<L>(n: usize) -> Result<VcParams<L>, VcError> {
    if n == 0 {
        return Err(VcError::ZeroLength);
    }
    let n = n.max(2).next_power_of_two();
    Ok(VcParams { n, depth: n.trailing_zeros(), _leaf: PhantomData })
}

impl<L: LeafEncoder> VcParams<L> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn tree(&self, a: &[L::Elem]) -> Result<MerkleTree, VcError> {
        if a.len() > self.n {
            return Err(VcError::VectorTooLong { len: a.len(), cap: self.n });
        }
        let pad = L::leaf(&L::padding());
        let mut leaves: Vec<FieldElement> = a.iter().map(L::leaf).collect();
        leaves.resize(self.n, pad);
        Ok(MerkleTree::from_leaves(leaves))
    }

    pub fn commit(&self, a: &[L::Elem]) -> Result<Commitment, VcError> {
        Ok(self.tree(a)?.root())
    }

    pub fn open(&self, a: &[L::Elem], i: usize) -> Result<OpeningProof, VcError> {
        if i >= self.n {
            return Err(VcError::IndexOutOfRange { index: i, cap: self.n });
        }
        Ok(self.tree(a)?.open(i))
    }

    pub fn verify(&self, c: &Commitment, i: usize, y: &L::Elem, proof: &OpeningProof) -> bool {
        if proof.siblings.len() != self.depth as usize || i >= self.n || proof.index != i as u64 {
            return false;
        }
        path_root(L::leaf(y), i, &proof.siblings) == c.0
    }
}

/// Recomputes the root from a leaf and its authentication path.
pub fn path_root(leaf: FieldElement, index: usize, siblings: &[FieldElement]) -> FieldElement {
    let mut cur = leaf;
    for (level, sib) in siblings.iter().enumerate() {
        cur = if (index >> level) & 1 == 0 { hash2(cur, *sib) } else { hash2(*sib, cur) };
    }
    cur
}

/// All layers of a full binary tree, leaves first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MerkleTree {
    layers: Vec<Vec<FieldElement>>,
}

impl MerkleTree {
    pub fn from_leaves(leaves: Vec<FieldElement>) -> Self {
        assert!(leaves.len().is_power_of_two() && leaves.len() >= 2);
        let mut layers = vec![leaves];
        while layers.last().unwrap().len() > 1 {
            let next = layers.last().unwrap().chunks(2).map(|p| hash2(p[0], p[1])).collect();
            layers.push(next);
        }
        MerkleTree { layers }
    }

    pub fn root(&self) -> Commitment {
        Commitment(self.layers.last().unwrap()[0])
    }

    pub fn leaves(&self) -> &[FieldElement] {
        &self.layers[0]
    }

    pub fn depth(&self) -> u32 {
        (self.layers.len() - 1) as u32
    }

    pub fn open(&self, i: usize) -> OpeningProof {
        let siblings = self.layers[..self.layers.len() - 1]
            .iter()
            .enumerate()
            .map(|(level, layer)| layer[(i >> level) ^ 1])
            .collect();
        OpeningProof { index: i as u64, siblings }
    }
}

impl Encode for Commitment {
    fn encode_to(&self, out: &mut Vec<u8>) {
        self.0.encode_to(out);
    }
}

impl Decode for Commitment {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        Ok(Commitment(FieldElement::decode_from(r)?))
    }
}

impl Encode for OpeningProof {
    fn encode_to(&self, out: &mut Vec<u8>) {
        self.index.encode_to(out);
        self.siblings.encode_to(out);
    }
}

impl Decode for OpeningProof {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        Ok(OpeningProof { index: u64::decode_from(r)?, siblings: Vec::decode_from(r)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rand_vec(n: usize, seed: u64) -> Vec<FieldElement> {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
        (0..n).map(|_| FieldElement::random(&mut rng)).collect()
    }

    #[test]
    fn setup_rounds_up() {
        let p = vc_setup::<RawLeaves>(3).unwrap();
        assert_eq!((p.n(), p.depth()), (4, 2));
        let p = vc_setup::<RawLeaves>(1).unwrap();
        assert_eq!((p.n(), p.depth()), (2, 1));
        assert_eq!(vc_setup::<RawLeaves>(1 << 15).unwrap().depth(), 15);
        assert_eq!(vc_setup::<RawLeaves>(0), Err(VcError::ZeroLength));
    }

    #[test]
    fn open_verify_all_positions() {
        let p = vc_setup::<RawLeaves>(8).unwrap();
        let a = rand_vec(8, 1);
        let c = p.commit(&a).unwrap();
        for i in 0..8 {
            let pr = p.open(&a, i).unwrap();
            assert!(p.verify(&c, i, &a[i], &pr));
            assert!(!p.verify(&c, i, &(a[i] + FieldElement::ONE), &pr));
        }
    }

    #[test]
    fn errors() {
        let p = vc_setup::<RawLeaves>(4).unwrap();
        let a = rand_vec(5, 2);
        assert_eq!(p.commit(&a), Err(VcError::VectorTooLong { len: 5, cap: 4 }));
        assert_eq!(p.open(&a[..4], 4), Err(VcError::IndexOutOfRange { index: 4, cap: 4 }));
    }

    #[test]
    fn short_vectors_padded() {
        let p = vc_setup::<AttrLeaves>(4).unwrap();
        let x = (FieldElement::from_u64(1), FieldElement::from_u64(30));
        let full = vec![x, AttrLeaves::padding(), AttrLeaves::padding(), AttrLeaves::padding()];
        assert_eq!(p.commit(&[x]).unwrap(), p.commit(&full).unwrap());
    }
}

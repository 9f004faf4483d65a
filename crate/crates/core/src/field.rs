//! The scalar field of BN254, which is both the proof system's native field
//! and the base field of Grumpkin.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use halo2_base::halo2_proofs::halo2curves::ff::{Field, PrimeField};
use num_bigint::BigUint;
use rand::RngCore;

pub use halo2_base::halo2_proofs::halo2curves::bn256::Fr;

/// An element of `Fr`, ordered by its integer representative in `[0, p)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FieldElement(pub(crate) Fr);

impl FieldElement {
    pub const ZERO: Self = FieldElement(Fr::zero());
    pub const ONE: Self = FieldElement(Fr::one());

    /// `p - 1`, the largest canonical value. Used as the revocation sentinel.
    pub fn max_value() -> Self {
        FieldElement(-Fr::one())
    }

    pub fn from_u64(v: u64) -> Self {
        FieldElement(Fr::from(v))
    }

    pub fn from_u128(v: u128) -> Self {
        FieldElement(Fr::from_u128(v))
    }

    /// Canonical little-endian bytes. Returns `None` for values `>= p`.
    pub fn from_bytes(bytes: &[u8; 32]) -> Option<Self> {
        Option::from(Fr::from_repr(*bytes)).map(FieldElement)
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        self.0.to_repr()
    }

    /// Reduces an arbitrary integer mod p.
    pub fn from_biguint(v: &BigUint) -> Self {
        let reduced = v % modulus();
        let mut bytes = [0u8; 32];
        let le = reduced.to_bytes_le();
        bytes[..le.len()].copy_from_slice(&le);
        FieldElement::from_bytes(&bytes).expect("reduced below modulus")
    }

    /// Parses a canonical integer, rejecting values `>= p`.
    pub fn from_biguint_exact(v: &BigUint) -> Option<Self> {
        if v >= &modulus() {
            return None;
        }
        Some(Self::from_biguint(v))
    }

    pub fn to_biguint(&self) -> BigUint {
        BigUint::from_bytes_le(&self.to_bytes())
    }

    /// Low 64 bits if the value fits, else `None`.
    pub fn to_u64(&self) -> Option<u64> {
        let b = self.to_bytes();
        if b[8..].iter().any(|&x| x != 0) {
            return None;
        }
        Some(u64::from_le_bytes(b[..8].try_into().unwrap()))
    }

    /// Number of significant bits of the integer representative.
    pub fn bit_len(&self) -> u32 {
        let b = self.to_bytes();
        for i in (0..32).rev() {
            if b[i] != 0 {
                return (i as u32) * 8 + (8 - b[i].leading_zeros());
            }
        }
        0
    }

    pub fn is_zero(&self) -> bool {
        bool::from(self.0.is_zero())
    }

    pub fn random(rng: &mut impl RngCore) -> Self {
        FieldElement(Fr::random(rng))
    }

    pub fn inner(&self) -> Fr {
        self.0
    }
}

/// The modulus p as an integer.
pub fn modulus() -> BigUint {
    (-Fr::one()).to_repr().as_ref().iter().rev().fold(BigUint::from(0u8), |acc, &b| (acc << 8) + b) + 1u8
}

impl From<Fr> for FieldElement {
    fn from(f: Fr) -> Self {
        FieldElement(f)
    }
}

impl From<FieldElement> for Fr {
    fn from(f: FieldElement) -> Self {
        f.0
    }
}

impl From<u64> for FieldElement {
    fn from(v: u64) -> Self {
        FieldElement::from_u64(v)
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = self.to_bytes();
        let b = other.to_bytes();
        a.iter().rev().cmp(b.iter().rev())
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        FieldElement(self.0 + rhs.0)
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        FieldElement(self.0 - rhs.0)
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        FieldElement(self.0 * rhs.0)
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        FieldElement(-self.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_biguint())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.to_u64() {
            write!(f, "F({v})")
        } else {
            let mut be = self.to_bytes();
            be.reverse();
            write!(f, "F(0x{})", hex::encode(be))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_integer_order() {
        let a = FieldElement::from_u64(5);
        let b = FieldElement::from_u64(300);
        assert!(a < b);
        assert!(FieldElement::max_value() > b);
        assert!(FieldElement::ZERO < a);
    }

    #[test]
    fn modulus_matches_max() {
        assert_eq!(FieldElement::max_value().to_biguint() + 1u8, modulus());
        assert!(FieldElement::from_biguint_exact(&modulus()).is_none());
    }

    #[test]
    fn non_canonical_bytes_rejected() {
        assert!(FieldElement::from_bytes(&[0xff; 32]).is_none());
    }

    #[test]
    fn bit_len() {
        assert_eq!(FieldElement::ZERO.bit_len(), 0);
        assert_eq!(FieldElement::from_u64(1).bit_len(), 1);
        assert_eq!(FieldElement::from_u64(256).bit_len(), 9);
        assert_eq!(FieldElement::max_value().bit_len(), 254);
    }
}

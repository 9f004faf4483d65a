//! Schnorr signatures over Grumpkin.
//!
//! Grumpkin's base field is `Fr`, so points are pairs of native field
//! elements and verification costs only native arithmetic inside the circuit.
//! The response `s` is a Grumpkin scalar (mod q, q > p); signing retries
//! with a fresh nonce until `s < p` so that every signature component is a
//! canonical `Fr` element.

use halo2_base::halo2_proofs::halo2curves::ff::{Field, PrimeField};
use halo2_base::halo2_proofs::halo2curves::group::{prime::PrimeCurveAffine, Curve};
use halo2_base::halo2_proofs::halo2curves::grumpkin::{self, G1Affine, G1};
use halo2_base::halo2_proofs::halo2curves::CurveAffine;
use rand::RngCore;

use crate::encoding::{Decode, DecodeError, Encode, Reader};
use crate::field::{FieldElement, Fr};
use crate::hash::{poseidon, tag};

/// Grumpkin scalar field (the BN254 base field).
pub type Scalar = grumpkin::Fr;

#[derive(Clone, PartialEq, Eq)]
pub struct SigningKey(Scalar);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VerifyingKey {
    pub x: FieldElement,
    pub y: FieldElement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub rx: FieldElement,
    pub ry: FieldElement,
    pub s: FieldElement,
}

impl std::fmt::Debug for SigningKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("SigningKey(..)")
    }
}

pub fn generator() -> G1Affine {
    G1Affine::generator()
}

fn to_affine_checked(x: FieldElement, y: FieldElement) -> Option<G1Affine> {
    let p: Option<G1Affine> = G1Affine::from_xy(x.0, y.0).into();
    p.filter(|p| !bool::from(p.is_identity()))
}

fn coords(p: &G1Affine) -> (FieldElement, FieldElement) {
    let c = p.coordinates().unwrap();
    (FieldElement(*c.x()), FieldElement(*c.y()))
}

/// A field element below p read as a Grumpkin scalar.
pub fn field_to_scalar(e: FieldElement) -> Scalar {
    Option::from(Scalar::from_repr(e.to_bytes())).expect("p < q")
}

fn scalar_to_field(s: &Scalar) -> Option<FieldElement> {
    FieldElement::from_bytes(&s.to_repr())
}

pub fn challenge(rx: FieldElement, ry: FieldElement, pk: &VerifyingKey, m: FieldElement) -> FieldElement {
    FieldElement(poseidon(&[Fr::from(tag::SIG_CHALLENGE), rx.0, ry.0, pk.x.0, pk.y.0, m.0]))
}

impl SigningKey {
    pub fn random(rng: &mut impl RngCore) -> Self {
        loop {
            let sk = Scalar::random(&mut *rng);
            if !bool::from(sk.is_zero()) {
                return SigningKey(sk);
            }
        }
    }

    pub fn verifying_key(&self) -> VerifyingKey {
        let (x, y) = coords(&(G1::generator() * self.0).to_affine());
        VerifyingKey { x, y }
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        self.0.to_repr()
    }

    pub fn from_bytes(b: &[u8; 32]) -> Option<Self> {
        let s: Option<Scalar> = Scalar::from_repr(*b).into();
        s.filter(|s| !bool::from(s.is_zero())).map(SigningKey)
    }
}

impl VerifyingKey {
    pub fn point(&self) -> Option<G1Affine> {
        to_affine_checked(self.x, self.y)
    }

    pub fn from_point(p: &G1Affine) -> Self {
        let (x, y) = coords(p);
        VerifyingKey { x, y }
    }
}

pub fn sig_keygen(rng: &mut impl RngCore) -> (SigningKey, VerifyingKey) {
    let sk = SigningKey::random(rng);
    let pk = sk.verifying_key();
    (sk, pk)
}

pub fn sig_sign(sk: &SigningKey, m: FieldElement, rng: &mut impl RngCore) -> Signature {
    let pk = sk.verifying_key();
    loop {
        let k = Scalar::random(&mut *rng);
        if bool::from(k.is_zero()) {
            continue;
        }
        let (rx, ry) = coords(&(G1::generator() * k).to_affine());
        let e = field_to_scalar(challenge(rx, ry, &pk, m));
        if let Some(s) = scalar_to_field(&(k + e * sk.0)) {
            return Signature { rx, ry, s };
        }
    }
}

pub fn sig_verify(pk: &VerifyingKey, m: FieldElement, sig: &Signature) -> bool {
    let (Some(pkp), Some(r)) = (pk.point(), to_affine_checked(sig.rx, sig.ry)) else {
        return false;
    };
    let e = field_to_scalar(challenge(sig.rx, sig.ry, pk, m));
    let lhs = G1::generator() * field_to_scalar(sig.s);
    let rhs = G1::from(r) + pkp * e;
    lhs == rhs
}

impl Encode for VerifyingKey {
    fn encode_to(&self, out: &mut Vec<u8>) {
        self.x.encode_to(out);
        self.y.encode_to(out);
    }
}

impl Decode for VerifyingKey {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let pk = VerifyingKey { x: FieldElement::decode_from(r)?, y: FieldElement::decode_from(r)? };
        pk.point().ok_or(DecodeError::Invalid("point not on curve"))?;
        Ok(pk)
    }
}

impl Encode for Signature {
    fn encode_to(&self, out: &mut Vec<u8>) {
        self.rx.encode_to(out);
        self.ry.encode_to(out);
        self.s.encode_to(out);
    }
}

impl Decode for Signature {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        Ok(Signature {
            rx: FieldElement::decode_from(r)?,
            ry: FieldElement::decode_from(r)?,
            s: FieldElement::decode_from(r)?,
        })
    }
}

impl Encode for SigningKey {
    fn encode_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_bytes());
    }
}

impl Decode for SigningKey {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let b: [u8; 32] = r.take(32)?.try_into().unwrap();
        SigningKey::from_bytes(&b).ok_or(DecodeError::Invalid("signing key"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn sign_verify() {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(1);
        let (sk, pk) = sig_keygen(&mut rng);
        assert_eq!(sk.verifying_key(), pk);
        let m = FieldElement::from_u64(42);
        let sig = sig_sign(&sk, m, &mut rng);
        assert!(sig_verify(&pk, m, &sig));
        assert!(!sig_verify(&pk, m + FieldElement::ONE, &sig));
        let (_, pk2) = sig_keygen(&mut rng);
        assert_ne!(pk, pk2);
        assert!(!sig_verify(&pk2, m, &sig));
    }

    #[test]
    fn bit_flips_rejected() {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(2);
        let (sk, pk) = sig_keygen(&mut rng);
        let m = FieldElement::random(&mut rng);
        let enc = sig_sign(&sk, m, &mut rng).encode();
        for _ in 0..100 {
            let mut bad = enc.clone();
            let bit = rng.gen_range(0..bad.len() * 8);
            bad[bit / 8] ^= 1 << (bit % 8);
            if let Ok(sig) = Signature::decode(&bad) {
                assert!(!sig_verify(&pk, m, &sig));
            }
        }
    }

    #[test]
    fn key_roundtrip() {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(3);
        let (sk, pk) = sig_keygen(&mut rng);
        assert_eq!(SigningKey::decode(&sk.encode()).unwrap(), sk);
        assert_eq!(VerifyingKey::decode(&pk.encode()).unwrap(), pk);
        let mut off = pk;
        off.y = off.y + FieldElement::ONE;
        assert!(VerifyingKey::decode(&off.encode()).is_err());
    }
}

//! Poseidon over `Fr` (width 3, rate 2, x^5, 8 full and 57 partial rounds)
//! with the sponge conventions of the `halo2-base` in-circuit hasher, so
//! native digests and circuit digests agree.

use std::sync::OnceLock;

use halo2_base::halo2_proofs::halo2curves::ff::Field;
use poseidon_primitives::poseidon::primitives::Spec;

use crate::field::{FieldElement, Fr};

pub const T: usize = 3;
pub const RATE: usize = 2;
pub const R_F: usize = 8;
pub const R_P: usize = 57;

/// Domain tags. Compression tags occupy the capacity element; sponge tags
/// are absorbed as the first input.
pub mod tag {
    pub const ATTR_LEAF: u64 = 1;
    pub const ISSUER_LEAF: u64 = 2;
    pub const BYTES: u64 = 3;
    pub const SIG_CHALLENGE: u64 = 4;
    pub const NODE: u64 = 5;
}

/// Initial capacity element of the sponge.
pub fn sponge_capacity() -> Fr {
    Fr::from_raw([0, 1, 0, 0])
}

#[derive(Debug)]
struct Pow5Spec;

impl Spec<Fr, T, RATE> for Pow5Spec {
    fn full_rounds() -> usize {
        R_F
    }
    fn partial_rounds() -> usize {
        R_P
    }
    fn sbox(val: Fr) -> Fr {
        val.pow_vartime([5])
    }
    fn secure_mds() -> usize {
        0
    }
}

struct Constants {
    round: Vec<[Fr; T]>,
    mds: [[Fr; T]; T],
}

fn constants() -> &'static Constants {
    static C: OnceLock<Constants> = OnceLock::new();
    C.get_or_init(|| {
        let (round, mds, _) = Pow5Spec::constants();
        Constants { round, mds }
    })
}

fn sbox(x: Fr) -> Fr {
    let x2 = x.square();
    x2.square() * x
}

pub fn permute(state: &mut [Fr; T]) {
    let c = constants();
    let half = R_F / 2;
    for (r, rc) in c.round.iter().enumerate() {
        for (s, k) in state.iter_mut().zip(rc) {
            *s += k;
        }
        if r < half || r >= half + R_P {
            for s in state.iter_mut() {
                *s = sbox(*s);
            }
        } else {
            state[0] = sbox(state[0]);
        }
        let mut next = [Fr::zero(); T];
        for (i, row) in c.mds.iter().enumerate() {
            for (m, s) in row.iter().zip(state.iter()) {
                next[i] += *m * s;
            }
        }
        *state = next;
    }
}

/// Fixed-length sponge hash.
pub fn poseidon(inputs: &[Fr]) -> Fr {
    let mut state = [sponge_capacity(), Fr::zero(), Fr::zero()];
    for chunk in inputs.chunks(RATE) {
        absorb(&mut state, chunk);
    }
    if inputs.len() % RATE == 0 {
        absorb(&mut state, &[]);
    }
    state[1]
}

fn absorb(state: &mut [Fr; T], chunk: &[Fr]) {
    for (s, x) in state[1..].iter_mut().zip(chunk) {
        *s += x;
    }
    if chunk.len() < RATE {
        state[1 + chunk.len()] += Fr::one();
    }
    permute(state);
}

pub fn poseidon_fe(inputs: &[FieldElement]) -> FieldElement {
    let v: Vec<Fr> = inputs.iter().map(|x| x.0).collect();
    FieldElement(poseidon(&v))
}

/// Two-to-one compression: one permutation of `[tag, a, b]`.
pub fn compress(tag: u64, a: Fr, b: Fr) -> Fr {
    let mut s = [Fr::from(tag), a, b];
    permute(&mut s);
    s[1]
}

/// Merkle node combiner.
pub fn hash2(l: FieldElement, r: FieldElement) -> FieldElement {
    FieldElement(compress(tag::NODE, l.0, r.0))
}

/// Splits bytes into 31-byte little-endian chunks, each below p.
pub fn bytes_to_chunks(data: &[u8]) -> Vec<Fr> {
    data.chunks(31)
        .map(|c| {
            let mut b = [0u8; 32];
            b[..c.len()].copy_from_slice(c);
            FieldElement::from_bytes(&b).expect("31 bytes fit").0
        })
        .collect()
}

/// The input vector absorbed for `data` on the given rehash round.
pub fn bytes_preimage(data: &[u8], round: u64) -> Vec<Fr> {
    let mut v = vec![Fr::from(tag::BYTES), Fr::from(data.len() as u64)];
    v.extend(bytes_to_chunks(data));
    if round > 0 {
        v.push(Fr::from(round));
    }
    v
}

/// Maps bytes into the open interval (0, p-1). A digest of 0 or p-1 is
/// rehashed with a counter appended.
pub fn hash_to_field(data: &[u8]) -> FieldElement {
    let max = FieldElement::max_value();
    for round in 0u64.. {
        let h = FieldElement(poseidon(&bytes_preimage(data, round)));
        if !h.is_zero() && h != max {
            return h;
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    // Reference permutation vector for x^5 Poseidon over BN254 with width 3,
    // 8 full and 57 partial rounds.
    #[test]
    fn reference_permutation() {
        let mut s = [Fr::from(0), Fr::from(1), Fr::from(2)];
        permute(&mut s);
        let want = [
            "0x115cc0f5e7d690413df64c6b9662e9cf2a3617f2743245519e19607a4417189a",
            "0x0fca49b798923ab0239de1c9e7a4a9a2210312b6a2f616d18b5a87f9b628ae29",
            "0x0e7ae82e40091e63cbd4f16a6d16310b3729d4b6e138fcf54110e2867045a30c",
        ];
        for (x, w) in s.iter().zip(want) {
            assert_eq!(format!("{x:?}"), w);
        }
    }

    #[test]
    fn deterministic() {
        let a = FieldElement::from_u64(3);
        let b = FieldElement::from_u64(4);
        assert_eq!(hash2(a, b), hash2(a, b));
        assert_ne!(hash2(a, b), hash2(b, a));
    }

    // Pinned outputs, produced independently by tools/poseidon_ref.py. A
    // change here breaks every commitment ever published.
    #[test]
    fn golden_values() {
        let hex = |x: FieldElement| format!("{:?}", x.0);
        let fe = FieldElement::from_u64;
        assert_eq!(hex(hash2(fe(0), fe(0))), "0x08a155d4d25ac9b7e70ff0a88dc41e4ed08a77ec1409362a6e233862be0ad930");
        assert_eq!(hex(hash2(fe(1), fe(2))), "0x0f4c0a862311f77b31edbd904dc9106a170dfd7cf53c990b470cdb86462e5805");
        assert_eq!(
            format!("{:?}", compress(tag::ATTR_LEAF, Fr::from(1), Fr::from(30))),
            "0x1ce4c162a70c9ca507be0771c77e192d6c540bce2eb33f23b822f03d74f14633"
        );
        assert_eq!(
            format!("{:?}", compress(tag::ISSUER_LEAF, Fr::from(7), Fr::from(9))),
            "0x218ed65d0fabf74741a3f4e9c477aa8dbe0bb9630ed688c05286417c563b34ae"
        );
        assert_eq!(format!("{:?}", poseidon(&[])), "0x14b2e5484b232721d64f405caa487febbce835dd07c5de940f2a775dc9aa0da6");
        assert_eq!(
            format!("{:?}", poseidon(&[Fr::from(1), Fr::from(2), Fr::from(3)])),
            "0x1e771e80490bde52a453e40889e14665d5396a81ff3076ac798ce39ef71b6cf1"
        );
        assert_eq!(hex(hash_to_field(b"")), "0x19b2f802f6847fa35cf47400ea36844f210617fc3f2b43ec07b815587e1e6c54");
        assert_eq!(hex(hash_to_field(b"abc")), "0x01948d133f5fb0f27412614fda116e391b49366dd38c85039836a1dad692bc0e");
        assert_eq!(hex(hash_to_field(&[7u8; 70])), "0x17c80fafbad96fd828144dddf356c82e067193ed3d1817f159f65a762de21853");
    }

    #[test]
    fn symmetric_collisions_absent() {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(11);
        for _ in 0..200 {
            let x = FieldElement::random(&mut rng);
            let y = FieldElement::random(&mut rng);
            assert_ne!(hash2(x, y), hash2(y, x));
        }
    }

    #[test]
    fn hash_to_field_range_and_uniqueness() {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(12);
        let mut seen = std::collections::HashSet::new();
        for i in 0..10_000u32 {
            let len = rng.gen_range(0..80);
            let mut data: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            data.extend_from_slice(&i.to_le_bytes());
            let h = hash_to_field(&data);
            assert!(!h.is_zero() && h != FieldElement::max_value());
            assert!(seen.insert(h));
        }
    }

    #[test]
    fn length_is_bound() {
        // trailing zero bytes change the chunking only through the length
        assert_ne!(hash_to_field(&[1, 0]), hash_to_field(&[1]));
        assert_ne!(hash_to_field(&[0u8; 31]), hash_to_field(&[0u8; 30]));
    }
}

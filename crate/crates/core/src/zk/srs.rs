//! Seeded KZG parameter generation.
//!
//! Produces exactly the parameters of `ParamsKZG::setup` for the same seeded
//! RNG, but multiplies by the toxic scalar with a fixed-base window table
//! instead of a serial chain of curve additions.

use halo2_base::halo2_proofs::halo2curves::bn256::{Bn256, Fr, G1Affine, G2Affine, G1};
use halo2_base::halo2_proofs::halo2curves::ff::{BatchInvert, Field, PrimeField};
use halo2_base::halo2_proofs::halo2curves::group::{prime::PrimeCurveAffine, Curve, Group};
use halo2_base::halo2_proofs::poly::kzg::commitment::ParamsKZG;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

struct FixedBase {
    // table[w * 256 + d] = d * 256^w * G
    table: Vec<G1Affine>,
}

impl FixedBase {
    fn new() -> Self {
        let mut base = G1::generator();
        let mut proj = Vec::with_capacity(32 * 256);
        for _ in 0..32 {
            let mut acc = G1::identity();
            for _ in 0..256 {
                proj.push(acc);
                acc += base;
            }
            base = acc;
        }
        let mut table = vec![G1Affine::identity(); proj.len()];
        G1::batch_normalize(&proj, &mut table);
        FixedBase { table }
    }

    fn mul(&self, x: &Fr) -> G1 {
        let mut acc = G1::identity();
        for (w, byte) in x.to_repr().as_ref().iter().enumerate() {
            if *byte != 0 {
                acc += self.table[w * 256 + *byte as usize];
            }
        }
        acc
    }

    fn mul_all(&self, xs: &[Fr]) -> Vec<G1Affine> {
        let proj: Vec<G1> = xs.iter().map(|x| self.mul(x)).collect();
        let mut out = vec![G1Affine::identity(); proj.len()];
        G1::batch_normalize(&proj, &mut out);
        out
    }
}

/// KZG parameters for `2^k` rows from a seeded toxic scalar.
pub fn seeded_params(k: u32, seed: u64) -> ParamsKZG<Bn256> {
    let n = 1usize << k;
    let s = Fr::random(ChaCha20Rng::seed_from_u64(seed));
    let fb = FixedBase::new();

    let mut pows = Vec::with_capacity(n);
    let mut cur = Fr::ONE;
    for _ in 0..n {
        pows.push(cur);
        cur *= s;
    }

    let mut omega_inv = Fr::ROOT_OF_UNITY_INV;
    for _ in k..Fr::S {
        omega_inv = omega_inv.square();
    }
    let omega = omega_inv.invert().unwrap();
    // L_i(s) = (s^n - 1) / n * w^i / (s - w^i)
    let multiplier = (s.pow_vartime([n as u64]) - Fr::ONE) * Fr::from(n as u64).invert().unwrap();
    let mut roots = Vec::with_capacity(n);
    let mut cur = Fr::ONE;
    for _ in 0..n {
        roots.push(cur);
        cur *= omega;
    }
    let mut den: Vec<Fr> = roots.iter().map(|w| s - w).collect();
    den.iter_mut().batch_invert();
    let lagrange: Vec<Fr> = roots.iter().zip(&den).map(|(w, d)| multiplier * w * d).collect();

    let g = fb.mul_all(&pows);
    let g_lagrange = fb.mul_all(&lagrange);
    let g2 = G2Affine::generator();
    let s_g2 = (g2 * s).to_affine();
    // from_parts is only reachable through an instance
    let shell = ParamsKZG::<Bn256>::setup(1, ChaCha20Rng::seed_from_u64(0));
    shell.from_parts(k, g, Some(g_lagrange), g2, s_g2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use halo2_base::halo2_proofs::poly::commitment::Params;

    #[test]
    fn matches_library_setup() {
        for k in [4u32, 7] {
            let mut a = vec![];
            let mut b = vec![];
            ParamsKZG::<Bn256>::setup(k, ChaCha20Rng::seed_from_u64(9)).write(&mut a).unwrap();
            seeded_params(k, 9).write(&mut b).unwrap();
            assert!(a == b, "k={k}");
        }
    }

    #[test]
    fn seed_changes_params() {
        let mut a = vec![];
        let mut b = vec![];
        seeded_params(5, 1).write(&mut a).unwrap();
        seeded_params(5, 2).write(&mut b).unwrap();
        assert_ne!(a, b);
    }
}

//! Circuit gadgets over the halo2-base flex gate `a + b * c = d`.
//!
//! Nothing here may panic on an unsatisfying assignment: keys are generated
//! from an all-zero witness and malformed witnesses must simply leave the
//! circuit unsatisfied.

use std::sync::OnceLock;

use halo2_base::gates::{GateChip, GateInstructions, RangeChip, RangeInstructions};
use halo2_base::halo2_proofs::halo2curves::ff::{Field, PrimeField};
use halo2_base::poseidon::hasher::spec::OptimizedPoseidonSpec;
use halo2_base::{AssignedValue, Context, QuantumCell::{Constant, Existing, Witness}};

use crate::field::{FieldElement, Fr};
use crate::hash::{sponge_capacity, tag, RATE, R_F, R_P, T};

pub(crate) type AV = AssignedValue<Fr>;

fn low128(x: &Fr) -> u128 {
    u128::from_le_bytes(x.to_repr()[..16].try_into().unwrap())
}

pub(crate) fn spec() -> &'static OptimizedPoseidonSpec<Fr, T, RATE> {
    static S: OnceLock<OptimizedPoseidonSpec<Fr, T, RATE>> = OnceLock::new();
    S.get_or_init(|| OptimizedPoseidonSpec::new::<R_F, R_P, 0>())
}

fn inv0(x: Fr) -> Fr {
    x.invert().unwrap_or(Fr::ZERO)
}

/// Element split as `lo + hi * 2^128`, both range checked.
#[derive(Clone, Copy)]
pub(crate) struct Limbs {
    pub lo: AV,
    pub hi: AV,
}

fn split128(x: &Fr) -> (Fr, Fr) {
    let b = x.to_repr();
    let mut lo = [0u8; 32];
    let mut hi = [0u8; 32];
    lo[..16].copy_from_slice(&b[..16]);
    hi[..16].copy_from_slice(&b[16..]);
    (Fr::from_repr(lo).unwrap(), Fr::from_repr(hi).unwrap())
}

fn two_128() -> Fr {
    Fr::from_u128(1 << 127) * Fr::from(2)
}

pub(crate) struct Chips {
    pub range: RangeChip<Fr>,
}

impl Chips {
    pub fn new(range: RangeChip<Fr>) -> Self {
        Chips { range }
    }

    pub fn gate(&self) -> &GateChip<Fr> {
        self.range.gate()
    }

    pub fn load(&self, ctx: &mut Context<Fr>, v: FieldElement) -> AV {
        ctx.load_witness(v.inner())
    }

    pub fn assert_nonzero(&self, ctx: &mut Context<Fr>, x: AV) {
        // x * inv = 1
        let inv = inv0(*x.value());
        ctx.assign_region([Constant(Fr::ZERO), Existing(x), Witness(inv), Constant(Fr::ONE)], [0]);
    }

    /// `num / den` with `den != 0` enforced.
    pub fn div(&self, ctx: &mut Context<Fr>, num: AV, den: AV) -> AV {
        let q = *num.value() * inv0(*den.value());
        ctx.assign_region([Constant(Fr::ZERO), Witness(q), Existing(den), Existing(num)], [0]);
        let q = ctx.get(-3);
        self.assert_nonzero(ctx, den);
        q
    }

    // ---- Poseidon ----

    fn pow5_add(&self, ctx: &mut Context<Fr>, x: AV, c: Fr) -> AV {
        let g = self.gate();
        let x2 = g.mul(ctx, x, x);
        let x4 = g.mul(ctx, x2, x2);
        g.mul_add(ctx, x, x4, Constant(c))
    }

    fn mds(&self, ctx: &mut Context<Fr>, s: [AV; T], m: &[[Fr; T]; T]) -> [AV; T] {
        let g = self.gate();
        core::array::from_fn(|i| g.inner_product(ctx, s, m[i].iter().map(|c| Constant(*c))))
    }

    /// The permutation, mirroring the optimized schedule of the halo2-base
    /// hasher but starting from an arbitrary state.
    pub fn permute(&self, ctx: &mut Context<Fr>, s: [AV; T]) -> [AV; T] {
        let g = self.gate();
        let spec = spec();
        let r_f = spec.r_f() / 2;
        let consts = spec.constants();
        let mats = spec.mds_matrices();
        let mds = mats.mds().as_ref();
        let start = consts.start();
        let mut s: [AV; T] = core::array::from_fn(|i| g.add(ctx, s[i], Constant(start[0][i])));
        for c in start.iter().skip(1).take(r_f - 1) {
            s = core::array::from_fn(|i| self.pow5_add(ctx, s[i], c[i]));
            s = self.mds(ctx, s, mds);
        }
        let last = start.last().unwrap();
        s = core::array::from_fn(|i| self.pow5_add(ctx, s[i], last[i]));
        s = self.mds(ctx, s, mats.pre_sparse_mds().as_ref());
        for (c, sm) in consts.partial().iter().zip(mats.sparse_matrices()) {
            s[0] = self.pow5_add(ctx, s[0], *c);
            let first = g.inner_product(ctx, s, sm.row().iter().map(|c| Constant(*c)));
            let rest: Vec<AV> =
                sm.col_hat().iter().zip(&s[1..]).map(|(c, x)| g.mul_add(ctx, s[0], Constant(*c), *x)).collect();
            s = [first, rest[0], rest[1]];
        }
        for c in consts.end() {
            s = core::array::from_fn(|i| self.pow5_add(ctx, s[i], c[i]));
            s = self.mds(ctx, s, mds);
        }
        s = core::array::from_fn(|i| self.pow5_add(ctx, s[i], Fr::ZERO));
        self.mds(ctx, s, mds)
    }

    pub fn compress(&self, ctx: &mut Context<Fr>, tag: u64, a: AV, b: AV) -> AV {
        let t = ctx.load_constant(Fr::from(tag));
        self.permute(ctx, [t, a, b])[1]
    }

    /// Fixed-length sponge with the native padding rule.
    pub fn sponge(&self, ctx: &mut Context<Fr>, inputs: &[AV]) -> AV {
        let g = self.gate();
        let mut s = [ctx.load_constant(sponge_capacity()), ctx.load_zero(), ctx.load_zero()];
        let mut chunks: Vec<&[AV]> = inputs.chunks(RATE).collect();
        if inputs.len() % RATE == 0 {
            chunks.push(&[]);
        }
        for chunk in chunks {
            for (j, x) in chunk.iter().enumerate() {
                s[1 + j] = g.add(ctx, s[1 + j], *x);
            }
            if chunk.len() < RATE {
                s[1 + chunk.len()] = g.add(ctx, s[1 + chunk.len()], Constant(Fr::ONE));
            }
            s = self.permute(ctx, s);
        }
        s[1]
    }

    // ---- bits and Merkle paths ----

    /// Little-endian bits of `v`, each constrained boolean.
    pub fn load_bits(&self, ctx: &mut Context<Fr>, v: u64, n: usize) -> Vec<AV> {
        (0..n)
            .map(|i| {
                let b = ctx.load_witness(Fr::from((v >> i.min(63)) & 1 & u64::from(i < 64)));
                self.gate().assert_bit(ctx, b);
                b
            })
            .collect()
    }

    pub fn bits_value(&self, ctx: &mut Context<Fr>, bits: &[AV]) -> AV {
        let pows: Vec<_> = (0..bits.len()).map(|i| Constant(self.gate().pow_of_two()[i])).collect();
        self.gate().inner_product(ctx, bits.iter().copied(), pows)
    }

    pub fn merkle_root(&self, ctx: &mut Context<Fr>, leaf: AV, bits: &[AV], siblings: &[AV]) -> AV {
        let g = self.gate();
        let mut cur = leaf;
        for (b, sib) in bits.iter().zip(siblings) {
            let left = g.select(ctx, *sib, cur, *b);
            let sum = g.add(ctx, cur, *sib);
            let right = g.sub(ctx, sum, left);
            cur = self.compress(ctx, tag::NODE, left, right);
        }
        cur
    }

    // ---- integer embedding ----

    /// `hi * 2^128 + lo` with `x = lo + hi * 2^128` and `lo + hi * 2^128 <= p - 1`
    /// as integers.
    pub fn canonical(&self, ctx: &mut Context<Fr>, x: AV) -> Limbs {
        let (lo_v, hi_v) = split128(x.value());
        let lo = ctx.load_witness(lo_v);
        let hi = ctx.load_witness(hi_v);
        self.range.range_check(ctx, lo, 128);
        self.range.range_check(ctx, hi, 126);
        let sum = self.gate().mul_add(ctx, hi, Constant(two_128()), lo);
        ctx.constrain_equal(&sum, &x);
        self.assert_le_p_minus_1(ctx, lo, hi);
        Limbs { lo, hi }
    }

    fn assert_le_p_minus_1(&self, ctx: &mut Context<Fr>, lo: AV, hi: AV) {
        let (p_lo, p_hi) = split128(&-Fr::ONE);
        let c = Limbs { lo: ctx.load_constant(p_lo), hi: ctx.load_constant(p_hi) };
        self.assert_lt_or_eq(ctx, &Limbs { lo, hi }, &c, 0);
    }

    /// Enforces `a + strict <= b` for canonical limbs (strict in {0, 1}).
    fn assert_lt_or_eq(&self, ctx: &mut Context<Fr>, a: &Limbs, b: &Limbs, strict: u64) {
        let g = self.gate();
        // d_lo = b_lo - a_lo - strict + borrow * 2^128, d_hi = b_hi - a_hi - borrow
        let (b_lo, a_lo) = (low128(b.lo.value()), low128(a.lo.value()));
        let borrow_v = match a_lo.checked_add(strict as u128) {
            Some(n) => b_lo < n,
            None => true,
        };
        let borrow_v = Fr::from(borrow_v as u64);
        let borrow = ctx.load_witness(borrow_v);
        g.assert_bit(ctx, borrow);
        let t = g.sub(ctx, b.lo, a.lo);
        let t = g.sub(ctx, t, Constant(Fr::from(strict)));
        let d_lo = g.mul_add(ctx, borrow, Constant(two_128()), t);
        let t = g.sub(ctx, b.hi, a.hi);
        let d_hi = g.sub(ctx, t, borrow);
        self.range.range_check(ctx, d_lo, 128);
        self.range.range_check(ctx, d_hi, 126);
    }

    pub fn assert_lt(&self, ctx: &mut Context<Fr>, a: &Limbs, b: &Limbs) {
        self.assert_lt_or_eq(ctx, a, b, 1);
    }

    /// Canonical little-endian bytes of `x`.
    pub fn bytes(&self, ctx: &mut Context<Fr>, x: AV) -> Vec<AV> {
        let g = self.gate();
        let repr = x.value().to_repr();
        let bytes: Vec<AV> = repr
            .iter()
            .map(|b| {
                let c = ctx.load_witness(Fr::from(*b as u64));
                self.range.range_check(ctx, c, 8);
                c
            })
            .collect();
        let base = |n: usize| (0..n).map(|i| Constant(Fr::from(256).pow_vartime([i as u64]))).collect::<Vec<_>>();
        let lo = g.inner_product(ctx, bytes[..16].iter().copied(), base(16));
        let hi = g.inner_product(ctx, bytes[16..].iter().copied(), base(16));
        let sum = g.mul_add(ctx, hi, Constant(two_128()), lo);
        ctx.constrain_equal(&sum, &x);
        self.assert_le_p_minus_1(ctx, lo, hi);
        bytes
    }

    /// `hash_to_field` of a byte string (first round only).
    pub fn hash_bytes(&self, ctx: &mut Context<Fr>, bytes: &[AV]) -> AV {
        let g = self.gate();
        let mut inputs = vec![ctx.load_constant(Fr::from(tag::BYTES)), ctx.load_constant(Fr::from(bytes.len() as u64))];
        for chunk in bytes.chunks(31) {
            let base = (0..chunk.len()).map(|i| Constant(Fr::from(256).pow_vartime([i as u64])));
            inputs.push(g.inner_product(ctx, chunk.iter().copied(), base));
        }
        self.sponge(ctx, &inputs)
    }

    /// Little-endian bits of `x` as an integer below p (254 bits).
    pub fn scalar_bits(&self, ctx: &mut Context<Fr>, x: AV) -> Vec<AV> {
        let g = self.gate();
        let repr = x.value().to_repr();
        let bits: Vec<AV> = (0..254)
            .map(|i| {
                let b = ctx.load_witness(Fr::from(((repr[i / 8] >> (i % 8)) & 1) as u64));
                g.assert_bit(ctx, b);
                b
            })
            .collect();
        let lo = self.bits_value(ctx, &bits[..128]);
        let hi = self.bits_value(ctx, &bits[128..]);
        let sum = g.mul_add(ctx, hi, Constant(two_128()), lo);
        ctx.constrain_equal(&sum, &x);
        self.assert_le_p_minus_1(ctx, lo, hi);
        bits
    }
}

/// Affine Grumpkin point with native coordinates.
#[derive(Clone, Copy)]
pub(crate) struct Pt {
    pub x: AV,
    pub y: AV,
}

/// Grumpkin: y^2 = x^3 - 17.
const CURVE_B: u64 = 17;

impl Chips {
    pub fn assert_on_curve(&self, ctx: &mut Context<Fr>, p: Pt) {
        let g = self.gate();
        let x2 = g.mul(ctx, p.x, p.x);
        let x3 = g.mul(ctx, x2, p.x);
        let y2p = g.mul_add(ctx, p.y, p.y, Constant(Fr::from(CURVE_B)));
        ctx.constrain_equal(&y2p, &x3);
    }

    pub fn neg(&self, ctx: &mut Context<Fr>, p: Pt) -> Pt {
        Pt { x: p.x, y: self.gate().neg(ctx, p.y) }
    }

    /// Incomplete addition; requires `p.x != q.x`.
    pub fn add(&self, ctx: &mut Context<Fr>, p: Pt, q: Pt) -> Pt {
        let g = self.gate();
        let dy = g.sub(ctx, q.y, p.y);
        let dx = g.sub(ctx, q.x, p.x);
        let l = self.div(ctx, dy, dx);
        // x3 = l^2 - px - qx
        let s = g.add(ctx, p.x, q.x);
        let x = g.sub_mul(ctx, Existing(s), l, l);
        let x = g.neg(ctx, x);
        // y3 = l * (px - x3) - py
        let t = g.sub(ctx, p.x, x);
        let y = g.mul(ctx, l, t);
        let y = g.sub(ctx, y, p.y);
        Pt { x, y }
    }

    /// `2a + t` as `(a + t) + a`, skipping the intermediate y.
    pub fn double_add(&self, ctx: &mut Context<Fr>, a: Pt, t: Pt) -> Pt {
        let g = self.gate();
        let dy = g.sub(ctx, t.y, a.y);
        let dx = g.sub(ctx, t.x, a.x);
        let l1 = self.div(ctx, dy, dx);
        let s = g.add(ctx, a.x, t.x);
        let xm = g.sub_mul(ctx, Existing(s), l1, l1);
        let xm = g.neg(ctx, xm);
        let two_y = g.add(ctx, a.y, a.y);
        let den = g.sub(ctx, a.x, xm);
        let q = self.div(ctx, two_y, den);
        let l2 = g.sub(ctx, q, l1);
        let s = g.add(ctx, a.x, xm);
        let xo = g.sub_mul(ctx, Existing(s), l2, l2);
        let xo = g.neg(ctx, xo);
        let t = g.sub(ctx, a.x, xo);
        let yo = g.mul(ctx, l2, t);
        let yo = g.sub(ctx, yo, a.y);
        Pt { x: xo, y: yo }
    }
}

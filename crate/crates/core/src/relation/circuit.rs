//! Constraint system for the presentation relation.
//!
//! Public inputs follow [`Statement::public_inputs`]. The ctx digest is
//! exposed as an instance cell and otherwise unused: it binds the proof
//! through the transcript.

use std::sync::OnceLock;

use halo2_base::gates::circuit::builder::BaseCircuitBuilder;
use halo2_base::gates::{GateInstructions, RangeInstructions};
use halo2_base::halo2_proofs::halo2curves::ff::{Field, PrimeField};
use halo2_base::halo2_proofs::halo2curves::group::Curve;
use halo2_base::halo2_proofs::halo2curves::grumpkin::{G1Affine, G1};
use halo2_base::halo2_proofs::halo2curves::CurveAffine;
use halo2_base::{Context, QuantumCell::Constant};

use super::gadgets::{Chips, Pt, AV};
use super::{ClauseShape, GapOpening, RelationDescription, Witness};
use crate::field::{FieldElement, Fr};
use crate::hash::{hash_to_field, tag};
use crate::predicate::CmpOp;
use crate::signature::{generator, Scalar};
use crate::vc::OpeningProof;

/// Fixed points with no known discrete log relative to the generator.
struct Offsets {
    /// Accumulator start.
    q: G1Affine,
    /// Added in every step so that the table has no identity entry.
    z: G1Affine,
    z_plus_g: G1Affine,
    /// `2^254 Q + (2^254 - 1) Z`, the residue of the offsets after the loop.
    k: G1Affine,
}

fn point_from_label(label: &[u8]) -> G1Affine {
    for ctr in 0u32.. {
        let mut data = label.to_vec();
        data.extend_from_slice(&ctr.to_le_bytes());
        let x = hash_to_field(&data).inner();
        let rhs = x.square() * x - Fr::from(17);
        if let Some(y) = Option::<Fr>::from(rhs.sqrt()) {
            let y = if y.is_odd().into() { -y } else { y };
            return G1Affine::from_xy(x, y).unwrap();
        }
    }
    unreachable!()
}

fn offsets() -> &'static Offsets {
    static O: OnceLock<Offsets> = OnceLock::new();
    O.get_or_init(|| {
        let q = point_from_label(b"irac/offset-q");
        let z = point_from_label(b"irac/offset-z");
        let two254 = Scalar::from(2).pow_vartime([254]);
        let k = (G1::from(q) * two254 + G1::from(z) * (two254 - Scalar::ONE)).to_affine();
        let z_plus_g = (G1::from(z) + generator()).to_affine();
        Offsets { q, z, z_plus_g, k }
    })
}

fn const_pt(ctx: &mut Context<Fr>, p: &G1Affine) -> Pt {
    let c = p.coordinates().unwrap();
    Pt { x: ctx.load_constant(*c.x()), y: ctx.load_constant(*c.y()) }
}

/// Number of top-level public inputs before the slot indices.
pub const HEADER_INPUTS: usize = 2;

struct Loader<'a> {
    chips: &'a Chips,
    /// Set when the witness has a shape the circuit cannot represent.
    malformed: bool,
}

impl Loader<'_> {
    fn path(&mut self, ctx: &mut Context<Fr>, p: &OpeningProof, depth: usize) -> (Vec<AV>, Vec<AV>) {
        if p.siblings.len() != depth || (depth < 64 && p.index >> depth != 0) {
            self.malformed = true;
        }
        let bits = self.chips.load_bits(ctx, p.index, depth);
        let sibs = (0..depth)
            .map(|i| ctx.load_witness(p.siblings.get(i).copied().unwrap_or(FieldElement::ZERO).inner()))
            .collect();
        (bits, sibs)
    }

    /// `h_l < target < h_r` at adjacent positions under `root`.
    fn gap(&mut self, ctx: &mut Context<Fr>, g: &GapOpening, root: AV, depth: usize, target: AV) {
        let c = self.chips;
        let h_l = c.load(ctx, g.h_l);
        let h_r = c.load(ctx, g.h_r);
        let (bl, sl) = self.path(ctx, &g.left, depth);
        let (br, sr) = self.path(ctx, &g.right, depth);
        let il = c.bits_value(ctx, &bl);
        let ir = c.bits_value(ctx, &br);
        let il1 = c.gate().add(ctx, il, Constant(Fr::ONE));
        ctx.constrain_equal(&il1, &ir);
        let rl = c.merkle_root(ctx, h_l, &bl, &sl);
        let rr = c.merkle_root(ctx, h_r, &br, &sr);
        ctx.constrain_equal(&rl, &root);
        ctx.constrain_equal(&rr, &root);
        let a = c.canonical(ctx, h_l);
        let t = c.canonical(ctx, target);
        let b = c.canonical(ctx, h_r);
        c.assert_lt(ctx, &a, &t);
        c.assert_lt(ctx, &t, &b);
    }
}

/// Lays out the relation for `desc` with the given public inputs and witness.
/// Missing or surplus values are padded or dropped; such witnesses never
/// satisfy the constraints.
pub fn synthesize(b: &mut BaseCircuitBuilder<Fr>, desc: &RelationDescription, public: &[FieldElement], w: &Witness) {
    let chips = Chips::new(b.range_chip());
    let c = &chips;
    let g = c.gate();
    let dims = desc.dims;
    let ctx = b.main(0);
    let mut ld = Loader { chips: c, malformed: false };

    let n_pub = desc.num_public_inputs();
    if public.len() != n_pub {
        ld.malformed = true;
    }
    let pubs: Vec<AV> =
        (0..n_pub).map(|i| ctx.load_witness(public.get(i).copied().unwrap_or(FieldElement::ZERO).inner())).collect();
    let c_root = pubs[0];
    let slot_idx = &pubs[HEADER_INPUTS..HEADER_INPUTS + desc.slots];

    let c_a = c.load(ctx, w.c_a.0);
    let r = Pt { x: c.load(ctx, w.sig.rx), y: c.load(ctx, w.sig.ry) };
    let s = c.load(ctx, w.sig.s);
    let pk = Pt { x: c.load(ctx, w.issuer.pk.x), y: c.load(ctx, w.issuer.pk.y) };
    let c_r = c.load(ctx, w.issuer.c_r.0);

    // attribute openings against c_a
    if w.attrs.len() != desc.slots {
        ld.malformed = true;
    }
    let mut values = Vec::with_capacity(desc.slots);
    for (k, idx_cell) in slot_idx.iter().enumerate() {
        let (v, proof) = match w.attrs.get(k) {
            Some(a) => {
                if public.get(HEADER_INPUTS + k) != Some(&FieldElement::from_u64(a.idx as u64)) {
                    ld.malformed = true;
                }
                (a.value, a.proof.clone())
            }
            None => (FieldElement::ZERO, OpeningProof { index: 0, siblings: vec![] }),
        };
        let v = c.load(ctx, v);
        let (bits, sibs) = ld.path(ctx, &proof, dims.depth_a());
        let leaf = c.compress(ctx, tag::ATTR_LEAF, *idx_cell, v);
        let root = c.merkle_root(ctx, leaf, &bits, &sibs);
        ctx.constrain_equal(&root, &c_a);
        values.push(v);
    }

    // predicate clauses
    let mut next = HEADER_INPUTS + desc.slots;
    let mut lists = w.list_gaps.iter();
    if w.list_gaps.len() != desc.list_depths().len() {
        ld.malformed = true;
    }
    let empty_gap = GapOpening {
        h_l: FieldElement::ZERO,
        h_r: FieldElement::ZERO,
        left: OpeningProof { index: 0, siblings: vec![] },
        right: OpeningProof { index: 0, siblings: vec![] },
    };
    for clause in &desc.clauses {
        match *clause {
            ClauseShape::Compare { slot, op, bits } => {
                let v = values[slot];
                let k = pubs[next];
                next += 1;
                let bits = bits as usize;
                match op {
                    CmpOp::Eq => ctx.constrain_equal(&v, &k),
                    CmpOp::Ne => {
                        let d = g.sub(ctx, v, k);
                        c.assert_nonzero(ctx, d);
                    }
                    _ => {
                        c.range.range_check(ctx, v, bits);
                        c.range.range_check(ctx, k, bits);
                        let d = match op {
                            CmpOp::Gt => {
                                let t = g.sub(ctx, v, k);
                                g.sub(ctx, t, Constant(Fr::ONE))
                            }
                            CmpOp::Ge => g.sub(ctx, v, k),
                            CmpOp::Lt => {
                                let t = g.sub(ctx, k, v);
                                g.sub(ctx, t, Constant(Fr::ONE))
                            }
                            _ => g.sub(ctx, k, v),
                        };
                        c.range.range_check(ctx, d, bits);
                    }
                }
            }
            ClauseShape::MemberOf { slot, size } => {
                let v = values[slot];
                let mut prod = ctx.load_constant(Fr::ONE);
                for e in &pubs[next..next + size] {
                    let d = g.sub(ctx, v, *e);
                    prod = g.mul(ctx, prod, d);
                }
                next += size;
                g.assert_is_const(ctx, &prod, &Fr::ZERO);
            }
            ClauseShape::NotInList { slot, depth } => {
                let root = pubs[next];
                next += 1;
                let target = g.add(ctx, values[slot], Constant(Fr::ONE));
                let gap = lists.next().unwrap_or(&empty_gap);
                ld.gap(ctx, gap, root, depth, target);
            }
        }
    }

    // signature: [s]G - [e]pk == R
    c.assert_on_curve(ctx, pk);
    c.assert_on_curve(ctx, r);
    let tag_c = ctx.load_constant(Fr::from(tag::SIG_CHALLENGE));
    let e = c.sponge(ctx, &[tag_c, r.x, r.y, pk.x, pk.y, c_a]);
    let e_bits = c.scalar_bits(ctx, e);
    let s_bits = c.scalar_bits(ctx, s);
    let off = offsets();
    let z = const_pt(ctx, &off.z);
    let zg = const_pt(ctx, &off.z_plus_g);
    let neg_pk = c.neg(ctx, pk);
    let z_pk = c.add(ctx, z, neg_pk);
    let zg_pk = c.add(ctx, zg, neg_pk);
    // table entry = t0 + s_i * (t1 - t0) + e_i * (t2 - t0) + s_i e_i * (t3 - t2 - t1 + t0)
    let lin = |ctx: &mut Context<Fr>, a0: AV, a1: AV, a2: AV, a3: AV| {
        let d1 = g.sub(ctx, a1, a0);
        let d2 = g.sub(ctx, a2, a0);
        let t = g.sub(ctx, a3, a2);
        let t = g.sub(ctx, t, a1);
        let d3 = g.add(ctx, t, a0);
        (a0, d1, d2, d3)
    };
    let tx = lin(ctx, z.x, zg.x, z_pk.x, zg_pk.x);
    let ty = lin(ctx, z.y, zg.y, z_pk.y, zg_pk.y);
    let mut acc = const_pt(ctx, &off.q);
    for i in (0..254).rev() {
        let (bs, be) = (s_bits[i], e_bits[i]);
        let bse = g.mul(ctx, bs, be);
        let pick = |ctx: &mut Context<Fr>, t: (AV, AV, AV, AV)| {
            let v = g.mul_add(ctx, bs, t.1, t.0);
            let v = g.mul_add(ctx, be, t.2, v);
            g.mul_add(ctx, bse, t.3, v)
        };
        let x = pick(ctx, tx);
        let y = pick(ctx, ty);
        acc = c.double_add(ctx, acc, Pt { x, y });
    }
    let k = const_pt(ctx, &off.k);
    let expect = c.add(ctx, r, k);
    ctx.constrain_equal(&acc.x, &expect.x);
    ctx.constrain_equal(&acc.y, &expect.y);

    // issuer-set membership of (H(pk), c_r)
    let mut pk_bytes = c.bytes(ctx, pk.x);
    pk_bytes.extend(c.bytes(ctx, pk.y));
    let digest = c.hash_bytes(ctx, &pk_bytes);
    let leaf = c.compress(ctx, tag::ISSUER_LEAF, digest, c_r);
    let (bits, sibs) = ld.path(ctx, &w.issuer.proof, dims.depth_i());
    let root = c.merkle_root(ctx, leaf, &bits, &sibs);
    ctx.constrain_equal(&root, &c_root);

    // non-revocation of H(c_a || sigma)
    let mut cred_bytes = c.bytes(ctx, c_a);
    for x in [r.x, r.y, s] {
        cred_bytes.extend(c.bytes(ctx, x));
    }
    let h = c.hash_bytes(ctx, &cred_bytes);
    ld.gap(ctx, &w.gap, c_r, dims.depth_r(), h);

    // witnesses the fixed layout cannot carry are pinned to an unsatisfiable cell
    let flag = ctx.load_witness(Fr::from(ld.malformed as u64));
    g.assert_is_const(ctx, &flag, &Fr::ZERO);

    b.assigned_instances = vec![pubs];
}

/// An all-zero witness of the right shape, used for key generation.
pub fn dummy_witness(desc: &RelationDescription) -> Witness {
    let path = |d: usize| OpeningProof { index: 0, siblings: vec![FieldElement::ZERO; d] };
    let gap = |d: usize| GapOpening { h_l: FieldElement::ZERO, h_r: FieldElement::ZERO, left: path(d), right: path(d) };
    Witness {
        c_a: crate::vc::Commitment(FieldElement::ZERO),
        sig: crate::signature::Signature { rx: FieldElement::ZERO, ry: FieldElement::ZERO, s: FieldElement::ZERO },
        issuer: super::IssuerOpening {
            pk: crate::signature::VerifyingKey { x: FieldElement::ZERO, y: FieldElement::ZERO },
            c_r: crate::vc::Commitment(FieldElement::ZERO),
            proof: path(desc.dims.depth_i()),
        },
        attrs: (0..desc.slots)
            .map(|_| super::AttrOpening { idx: 0, value: FieldElement::ZERO, proof: path(desc.dims.depth_a()) })
            .collect(),
        gap: gap(desc.dims.depth_r()),
        list_gaps: desc.list_depths().into_iter().map(gap).collect(),
    }
}

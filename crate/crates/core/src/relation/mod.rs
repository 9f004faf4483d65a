//! The presentation relation: statement and witness types, a plain checker
//! and the circuit builder used by the proving backends.

pub mod checker;
pub mod circuit;
mod gadgets;

use std::collections::BTreeMap;

use crate::encoding::{Decode, DecodeError, Encode, Reader};
use crate::field::FieldElement;
use crate::hash::hash_to_field;
use crate::predicate::{pred_eval, pred_shape_id, Clause, CmpOp, Predicate};
use crate::signature::{sig_verify, Signature, VerifyingKey};
use crate::vc::{attr_leaf, issuer_leaf, path_root, Commitment, OpeningProof};
use crate::Dims;

pub use crate::protocol::witness_assemble;

/// Public part of the relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub predicate: Predicate,
    /// Issuer-set commitment.
    pub c: Commitment,
    pub ctx: Vec<u8>,
}

impl Statement {
    pub fn ctx_field(&self) -> FieldElement {
        hash_to_field(&self.ctx)
    }

    /// Public inputs in circuit order: `c`, `H(ctx)`, the attribute index of
    /// each slot, then per clause its constant, its set elements, or its list
    /// root.
    pub fn public_inputs(&self) -> Vec<FieldElement> {
        let mut out = vec![self.c.0, self.ctx_field()];
        out.extend(self.predicate.slots().iter().map(|&i| FieldElement::from_u64(i as u64)));
        for c in self.predicate.clauses() {
            match c {
                Clause::Compare { constant, .. } => out.push(*constant),
                Clause::MemberOf { set, .. } => out.extend(set.iter().copied()),
                Clause::NotInSortedList { list, .. } => out.push(list.root().0),
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IssuerOpening {
    pub pk: VerifyingKey,
    pub c_r: Commitment,
    /// Position `i_i` is `proof.index`.
    pub proof: OpeningProof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttrOpening {
    pub idx: u32,
    pub value: FieldElement,
    pub proof: OpeningProof,
}

/// Two adjacent openings of a sorted list with `h_l < target < h_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapOpening {
    pub h_l: FieldElement,
    pub h_r: FieldElement,
    pub left: OpeningProof,
    pub right: OpeningProof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub c_a: Commitment,
    pub sig: Signature,
    pub issuer: IssuerOpening,
    /// One opening per predicate slot, in slot order.
    pub attrs: Vec<AttrOpening>,
    /// Non-revocation gap in the issuer's revocation list.
    pub gap: GapOpening,
    /// One gap per list clause, for `value + 1` in the shifted list layout.
    pub list_gaps: Vec<GapOpening>,
}

/// The hash under which a credential is revoked.
pub fn credential_hash(c_a: &Commitment, sig: &Signature) -> FieldElement {
    let mut bytes = c_a.encode();
    sig.encode_to(&mut bytes);
    hash_to_field(&bytes)
}

/// Digest of a verifying key as used in issuer-set leaves.
pub fn pk_digest(pk: &VerifyingKey) -> FieldElement {
    hash_to_field(&pk.encode())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum GapError {
    #[error("target is in the list")]
    Member,
    #[error("no strict gap around target")]
    NoGap,
}

/// Finds `i` with `layout[i] < target < layout[i + 1]` in a sorted layout.
pub fn find_gap(layout: &[FieldElement], target: FieldElement) -> Result<usize, GapError> {
    let j = layout.partition_point(|x| *x < target);
    if j < layout.len() && layout[j] == target {
        return Err(GapError::Member);
    }
    if j == 0 || j == layout.len() {
        return Err(GapError::NoGap);
    }
    Ok(j - 1)
}

fn opening_ok(root: FieldElement, leaf: FieldElement, proof: &OpeningProof, depth: usize) -> bool {
    proof.siblings.len() == depth
        && proof.index < (1u64 << depth)
        && path_root(leaf, proof.index as usize, &proof.siblings) == root
}

fn gap_ok(root: FieldElement, depth: usize, target: FieldElement, g: &GapOpening) -> bool {
    g.right.index == g.left.index.wrapping_add(1)
        && opening_ok(root, g.h_l, &g.left, depth)
        && opening_ok(root, g.h_r, &g.right, depth)
        && g.h_l < target
        && target < g.h_r
}

/// Plain evaluation of the relation.
pub fn relation_check(dims: &Dims, stmt: &Statement, w: &Witness) -> bool {
    let phi = &stmt.predicate;
    let slots = phi.slots();
    if w.attrs.len() != slots.len() {
        return false;
    }
    let mut assignment = BTreeMap::new();
    for (a, &idx) in w.attrs.iter().zip(&slots) {
        let leaf = attr_leaf(FieldElement::from_u64(idx as u64), a.value);
        if a.idx != idx || !opening_ok(w.c_a.0, leaf, &a.proof, dims.depth_a()) {
            return false;
        }
        assignment.insert(idx, a.value);
    }
    if pred_eval(phi, &assignment) != Ok(true) {
        return false;
    }
    if !sig_verify(&w.issuer.pk, w.c_a.0, &w.sig) {
        return false;
    }
    let leaf = issuer_leaf(pk_digest(&w.issuer.pk), w.issuer.c_r.0);
    if !opening_ok(stmt.c.0, leaf, &w.issuer.proof, dims.depth_i()) {
        return false;
    }
    let h = credential_hash(&w.c_a, &w.sig);
    if !gap_ok(w.issuer.c_r.0, dims.depth_r(), h, &w.gap) {
        return false;
    }
    let lists: Vec<_> = phi
        .clauses()
        .iter()
        .filter_map(|c| match c {
            Clause::NotInSortedList { idx, list } => Some((*idx, list)),
            _ => None,
        })
        .collect();
    if lists.len() != w.list_gaps.len() {
        return false;
    }
    lists.iter().zip(&w.list_gaps).all(|((idx, list), g)| {
        let depth = list.tree().depth() as usize;
        gap_ok(list.root().0, depth, assignment[idx] + FieldElement::ONE, g)
    })
}

/// Circuit shape of one clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClauseShape {
    Compare { slot: usize, op: CmpOp, bits: u8 },
    MemberOf { slot: usize, size: usize },
    NotInList { slot: usize, depth: usize },
}

/// Everything that fixes the circuit layout for a predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationDescription {
    pub dims: Dims,
    pub shape_id: Vec<u8>,
    pub slots: usize,
    pub clauses: Vec<ClauseShape>,
}

impl RelationDescription {
    pub fn new(phi: &Predicate, dims: Dims) -> Self {
        let slots = phi.slots();
        let slot = |idx: u32| slots.iter().position(|&i| i == idx).unwrap();
        let clauses = phi
            .clauses()
            .iter()
            .map(|c| match c {
                Clause::Compare { idx, op, bits, .. } => ClauseShape::Compare { slot: slot(*idx), op: *op, bits: *bits },
                Clause::MemberOf { idx, set } => ClauseShape::MemberOf { slot: slot(*idx), size: set.len() },
                Clause::NotInSortedList { idx, list } => {
                    ClauseShape::NotInList { slot: slot(*idx), depth: list.tree().depth() as usize }
                }
            })
            .collect();
        RelationDescription { dims, shape_id: pred_shape_id(phi, &dims), slots: slots.len(), clauses }
    }

    pub fn num_public_inputs(&self) -> usize {
        2 + self.slots
            + self
                .clauses
                .iter()
                .map(|c| match c {
                    ClauseShape::MemberOf { size, .. } => *size,
                    _ => 1,
                })
                .sum::<usize>()
    }

    pub fn list_depths(&self) -> Vec<usize> {
        self.clauses
            .iter()
            .filter_map(|c| match c {
                ClauseShape::NotInList { depth, .. } => Some(*depth),
                _ => None,
            })
            .collect()
    }
}

impl Encode for IssuerOpening {
    fn encode_to(&self, out: &mut Vec<u8>) {
        self.pk.x.encode_to(out);
        self.pk.y.encode_to(out);
        self.c_r.encode_to(out);
        self.proof.encode_to(out);
    }
}

impl Decode for IssuerOpening {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        // off-curve keys must survive decoding so that the checker, not the
        // parser, rejects them
        let pk = VerifyingKey { x: FieldElement::decode_from(r)?, y: FieldElement::decode_from(r)? };
        Ok(IssuerOpening { pk, c_r: Commitment::decode_from(r)?, proof: OpeningProof::decode_from(r)? })
    }
}

impl Encode for AttrOpening {
    fn encode_to(&self, out: &mut Vec<u8>) {
        self.idx.encode_to(out);
        self.value.encode_to(out);
        self.proof.encode_to(out);
    }
}

impl Decode for AttrOpening {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        Ok(AttrOpening {
            idx: u32::decode_from(r)?,
            value: FieldElement::decode_from(r)?,
            proof: OpeningProof::decode_from(r)?,
        })
    }
}

impl Encode for GapOpening {
    fn encode_to(&self, out: &mut Vec<u8>) {
        self.h_l.encode_to(out);
        self.h_r.encode_to(out);
        self.left.encode_to(out);
        self.right.encode_to(out);
    }
}

impl Decode for GapOpening {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        Ok(GapOpening {
            h_l: FieldElement::decode_from(r)?,
            h_r: FieldElement::decode_from(r)?,
            left: OpeningProof::decode_from(r)?,
            right: OpeningProof::decode_from(r)?,
        })
    }
}

impl Encode for Witness {
    fn encode_to(&self, out: &mut Vec<u8>) {
        self.c_a.encode_to(out);
        self.sig.encode_to(out);
        self.issuer.encode_to(out);
        self.attrs.encode_to(out);
        self.gap.encode_to(out);
        self.list_gaps.encode_to(out);
    }
}

impl Decode for Witness {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        Ok(Witness {
            c_a: Commitment::decode_from(r)?,
            sig: Signature::decode_from(r)?,
            issuer: IssuerOpening::decode_from(r)?,
            attrs: Vec::decode_from(r)?,
            gap: GapOpening::decode_from(r)?,
            list_gaps: Vec::decode_from(r)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(v: u64) -> FieldElement {
        FieldElement::from_u64(v)
    }

    #[test]
    fn gap_search() {
        let max = FieldElement::max_value();
        let layout = vec![fe(0), fe(5), fe(9), max, max];
        assert_eq!(find_gap(&layout, fe(7)), Ok(1));
        assert_eq!(find_gap(&layout, fe(1)), Ok(0));
        assert_eq!(find_gap(&layout, fe(10)), Ok(2));
        assert_eq!(find_gap(&layout, fe(5)), Err(GapError::Member));
        assert_eq!(find_gap(&layout, fe(0)), Err(GapError::Member));
        assert_eq!(find_gap(&layout, max), Err(GapError::Member));
        let empty = vec![fe(0), max];
        assert_eq!(find_gap(&empty, fe(3)), Ok(0));
    }
}

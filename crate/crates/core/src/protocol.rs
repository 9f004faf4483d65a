//! Issuer, holder and verifier operations.
//!
//! State is passed around as immutable snapshots. `revoke` is the only
//! transition and returns a new issuer state; callers serialize writers.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use rand::RngCore;

use crate::encoding::{Bytes, Decode, DecodeError, Encode, Reader};
use crate::field::FieldElement;
use crate::predicate::{pred_eval, pred_required_attrs, AttrResolver, Clause, Predicate, PredicateError};
use crate::relation::{
    find_gap, pk_digest, AttrOpening, GapError, GapOpening, IssuerOpening, RelationDescription, Statement, Witness,
};
use crate::signature::{sig_keygen, sig_sign, sig_verify, Signature, SigningKey, VerifyingKey};
use crate::vc::{vc_setup, AttrLeaves, Commitment, IssuerLeaves, MerkleTree, RawLeaves, VcParams};
use crate::zk::{zk_prove, zk_verify, Backend, KeyCache, Proof, ZkError, ZkParams};
use crate::Dims;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IracError {
    #[error("sizes must be powers of two between 2 and 2^24")]
    InvalidSizes,
    #[error("unsupported security level {0}")]
    UnsupportedSecurity(u32),
    #[error("attribute name {0:?} already in the universe")]
    DuplicateAttributeName(String),
    #[error("attribute {0} not in the universe")]
    UnknownAttribute(u32),
    #[error("issuer would hold {0} attributes, more than n_a")]
    TooManyAttributes(usize),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("value for attribute {0} out of range")]
    ValueOutOfRange(u32),
    #[error("revocation list is full")]
    RevocationCapacityExceeded,
    #[error("credential issuer is not in the issuer set")]
    IssuerNotInSet,
    #[error("attribute {0} is not held by every issuer in the set")]
    AttributeNotCovered(u32),
    #[error("credential is revoked")]
    Revoked,
    #[error("issuer set has {0} entries, more than n_I")]
    HidingSetTooLarge(usize),
    #[error("issuer set is empty")]
    EmptyIssuerSet,
    #[error("invalid issuer data: {0}")]
    InvalidIssuerData(&'static str),
    #[error("credential does not satisfy the predicate")]
    PredicateNotSatisfied,
    #[error(transparent)]
    Predicate(#[from] PredicateError),
    #[error(transparent)]
    Zk(#[from] ZkError),
}

/// Security level supported by the BN254 instantiation.
pub const SECURITY: u32 = 128;

pub struct SystemParams {
    pub lambda: u32,
    pub dims: Dims,
    pub pp_a: VcParams<AttrLeaves>,
    pub pp_r: VcParams<RawLeaves>,
    pub pp_i: VcParams<IssuerLeaves>,
    pub zk: ZkParams,
    /// Keys per predicate shape, shared by proving and verifying calls.
    pub keys: KeyCache,
    empty_c_r: OnceLock<Commitment>,
}

impl SystemParams {
    fn from_parts(lambda: u32, dims: Dims, zk: ZkParams) -> Self {
        SystemParams {
            lambda,
            dims,
            pp_a: vc_setup(dims.n_a).unwrap(),
            pp_r: vc_setup(dims.n_r).unwrap(),
            pp_i: vc_setup(dims.n_i).unwrap(),
            zk,
            keys: KeyCache::default(),
            empty_c_r: OnceLock::new(),
        }
    }

    /// Commitment to an empty revocation list, shared by all issuers.
    pub fn empty_revocation_root(&self) -> Commitment {
        *self.empty_c_r.get_or_init(|| revocation_tree(self, &[]).root())
    }

    fn revocation_root(&self, rl: &[FieldElement]) -> Commitment {
        if rl.is_empty() {
            self.empty_revocation_root()
        } else {
            revocation_tree(self, rl).root()
        }
    }
}

impl Encode for SystemParams {
    fn encode_to(&self, out: &mut Vec<u8>) {
        self.lambda.encode_to(out);
        (self.dims.n_a as u64).encode_to(out);
        (self.dims.n_r as u64).encode_to(out);
        (self.dims.n_i as u64).encode_to(out);
        self.zk.encode_to(out);
    }
}

impl Decode for SystemParams {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let lambda = u32::decode_from(r)?;
        let mut n = || u64::decode_from(r).map(|v| v as usize);
        let (n_a, n_r, n_i) = (n()?, n()?, n()?);
        let dims = Dims::new(n_a, n_r, n_i).ok_or(DecodeError::Invalid("sizes"))?;
        if lambda != SECURITY {
            return Err(DecodeError::Invalid("security level"));
        }
        Ok(SystemParams::from_parts(lambda, dims, ZkParams::decode_from(r)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttrKind {
    /// Unsigned integer below `2^bits`.
    Numeric { bits: u8 },
    /// Free-form label mapped to a field element.
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeId {
    pub name: String,
    pub kind: AttrKind,
}

/// Append-only attribute list; the index of an attribute is its 1-based
/// position.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AttributeUniverse {
    attrs: Vec<AttributeId>,
}

impl AttributeUniverse {
    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    pub fn get(&self, idx: u32) -> Option<&AttributeId> {
        (idx as usize).checked_sub(1).and_then(|i| self.attrs.get(i))
    }

    pub fn index_of(&self, name: &str) -> Option<u32> {
        self.attrs.iter().position(|a| a.name == name).map(|i| i as u32 + 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &AttributeId)> {
        self.attrs.iter().enumerate().map(|(i, a)| (i as u32 + 1, a))
    }
}

impl AttrResolver for AttributeUniverse {
    fn resolve(&self, name: &str) -> Option<(u32, bool)> {
        let idx = self.index_of(name)?;
        Some((idx, self.get(idx)?.kind == AttrKind::Categorical))
    }

    fn name_of(&self, idx: u32) -> Option<String> {
        self.get(idx).map(|a| a.name.clone())
    }
}

pub fn setup(lambda: u32, n_a: usize, n_r: usize, n_i: usize, zk: ZkParams) -> Result<(SystemParams, AttributeUniverse), IracError> {
    if lambda != SECURITY {
        return Err(IracError::UnsupportedSecurity(lambda));
    }
    let dims = Dims::new(n_a, n_r, n_i).ok_or(IracError::InvalidSizes)?;
    Ok((SystemParams::from_parts(lambda, dims, zk), AttributeUniverse::default()))
}

/// Convenience wrapper building the proving parameters as well.
pub fn setup_with(
    n_a: usize,
    n_r: usize,
    n_i: usize,
    backend: Backend,
    max_constraints: usize,
    seed: u64,
) -> Result<(SystemParams, AttributeUniverse), IracError> {
    let zk = crate::zk::zk_setup(backend, max_constraints, seed)?;
    setup(SECURITY, n_a, n_r, n_i, zk)
}

pub fn add_attributes(u: &AttributeUniverse, new: &[AttributeId]) -> Result<AttributeUniverse, IracError> {
    let mut out = u.clone();
    for a in new {
        if out.index_of(&a.name).is_some() {
            return Err(IracError::DuplicateAttributeName(a.name.clone()));
        }
        if let AttrKind::Numeric { bits } = a.kind {
            if bits == 0 || bits > crate::predicate::MAX_BITS {
                return Err(IracError::Predicate(PredicateError::BadWidth(bits as u32)));
            }
        }
        out.attrs.push(a.clone());
    }
    Ok(out)
}

/// Layout of a revocation vector: 0, the sorted entries, then `p-1` up to
/// `n`.
pub fn revocation_layout(rl: &[FieldElement], n: usize) -> Vec<FieldElement> {
    let mut v = Vec::with_capacity(n);
    v.push(FieldElement::ZERO);
    v.extend_from_slice(rl);
    v.resize(n, FieldElement::max_value());
    v
}

fn revocation_tree(pp: &SystemParams, rl: &[FieldElement]) -> MerkleTree {
    pp.pp_r.tree(&revocation_layout(rl, pp.dims.n_r)).expect("list within capacity")
}

/// What an issuer publishes: key, attribute indices and revocation list.
/// `c_r` is the issuer's claimed commitment; verifiers recompute it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IssuerPublic {
    pub pk: VerifyingKey,
    pub attrs: Vec<u32>,
    pub rl: Vec<FieldElement>,
    pub c_r: Commitment,
}

#[derive(Clone, PartialEq, Eq)]
pub struct IssuerState {
    pub sk: SigningKey,
    pub public: IssuerPublic,
}

impl std::fmt::Debug for IssuerState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IssuerState").field("public", &self.public).finish_non_exhaustive()
    }
}

pub fn issuer_setup(
    pp: &SystemParams,
    u: &AttributeUniverse,
    chosen: &[u32],
    rng: &mut impl RngCore,
) -> Result<IssuerState, IracError> {
    let mut seen = BTreeSet::new();
    for &i in chosen {
        if u.get(i).is_none() {
            return Err(IracError::UnknownAttribute(i));
        }
        if !seen.insert(i) {
            return Err(IracError::InvalidIssuerData("repeated attribute"));
        }
    }
    if chosen.len() > pp.dims.n_a {
        return Err(IracError::TooManyAttributes(chosen.len()));
    }
    let (sk, pk) = sig_keygen(rng);
    let c_r = pp.empty_revocation_root();
    Ok(IssuerState { sk, public: IssuerPublic { pk, attrs: chosen.to_vec(), rl: Vec::new(), c_r } })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Credential {
    pub issuer: VerifyingKey,
    /// Attribute indices, aligned with `values`.
    pub attrs: Vec<u32>,
    pub values: Vec<FieldElement>,
    pub sig: Signature,
    pub c_a: Commitment,
}

fn attr_pairs(attrs: &[u32], values: &[FieldElement]) -> Vec<(FieldElement, FieldElement)> {
    attrs.iter().zip(values).map(|(&i, &v)| (FieldElement::from_u64(i as u64), v)).collect()
}

fn attr_tree(pp: &SystemParams, attrs: &[u32], values: &[FieldElement]) -> Option<MerkleTree> {
    pp.pp_a.tree(&attr_pairs(attrs, values)).ok()
}

pub fn issue_cred(
    pp: &SystemParams,
    u: &AttributeUniverse,
    issuer: &IssuerState,
    values: &[FieldElement],
    rng: &mut impl RngCore,
) -> Result<Credential, IracError> {
    let attrs = &issuer.public.attrs;
    if values.len() != attrs.len() {
        return Err(IracError::LengthMismatch { expected: attrs.len(), got: values.len() });
    }
    for (&i, v) in attrs.iter().zip(values) {
        match u.get(i).ok_or(IracError::UnknownAttribute(i))?.kind {
            AttrKind::Numeric { bits } if v.bit_len() > bits as u32 => return Err(IracError::ValueOutOfRange(i)),
            _ => {}
        }
    }
    let c_a = attr_tree(pp, attrs, values).ok_or(IracError::TooManyAttributes(attrs.len()))?.root();
    let sig = sig_sign(&issuer.sk, c_a.0, rng);
    Ok(Credential { issuer: issuer.public.pk, attrs: attrs.clone(), values: values.to_vec(), sig, c_a })
}

pub fn verify_cred(pp: &SystemParams, cred: &Credential, pk: &VerifyingKey, attrs: &[u32]) -> bool {
    if cred.attrs != attrs || cred.values.len() != attrs.len() || cred.issuer != *pk {
        return false;
    }
    match attr_tree(pp, attrs, &cred.values) {
        Some(t) => t.root() == cred.c_a && sig_verify(pk, cred.c_a.0, &cred.sig),
        None => false,
    }
}

pub fn credential_hash(cred: &Credential) -> FieldElement {
    crate::relation::credential_hash(&cred.c_a, &cred.sig)
}

/// Adds a credential hash to the list. Revoking twice leaves the state
/// unchanged.
pub fn revoke_hash(pp: &SystemParams, issuer: &IssuerState, h: FieldElement) -> Result<IssuerState, IracError> {
    if h.is_zero() || h == FieldElement::max_value() {
        return Err(IracError::InvalidIssuerData("revocation entry out of range"));
    }
    let rl = &issuer.public.rl;
    let pos = match rl.binary_search(&h) {
        Ok(_) => return Ok(issuer.clone()),
        Err(p) => p,
    };
    if rl.len() >= pp.dims.n_r - 2 {
        return Err(IracError::RevocationCapacityExceeded);
    }
    let mut next = issuer.clone();
    next.public.rl.insert(pos, h);
    next.public.c_r = revocation_tree(pp, &next.public.rl).root();
    Ok(next)
}

pub fn revoke(pp: &SystemParams, issuer: &IssuerState, cred: &Credential) -> Result<IssuerState, IracError> {
    revoke_hash(pp, issuer, credential_hash(cred))
}

/// One issuer as seen by a holder or verifier, with `c_r` recomputed from
/// the published list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewEntry {
    pub pk: VerifyingKey,
    pub attrs: Vec<u32>,
    pub rl: Vec<FieldElement>,
    pub c_r: Commitment,
}

/// A hiding set in canonical order (ascending by encoded key).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IssuerSetView {
    entries: Vec<ViewEntry>,
    c: Commitment,
}

impl IssuerSetView {
    /// Validates each published list, recomputes its commitment and orders
    /// the set. Repeated keys are dropped when their data agree and rejected
    /// otherwise.
    pub fn new(pp: &SystemParams, issuers: &[IssuerPublic]) -> Result<Self, IracError> {
        let mut by_key: BTreeMap<Vec<u8>, ViewEntry> = BTreeMap::new();
        for p in issuers {
            if p.pk.point().is_none() {
                return Err(IracError::InvalidIssuerData("key not on curve"));
            }
            let rl = &p.rl;
            if rl.len() > pp.dims.n_r - 2 {
                return Err(IracError::InvalidIssuerData("revocation list too long"));
            }
            if rl.windows(2).any(|w| w[0] >= w[1]) || rl.iter().any(|h| h.is_zero() || *h == FieldElement::max_value()) {
                return Err(IracError::InvalidIssuerData("revocation list not sorted"));
            }
            if p.attrs.len() > pp.dims.n_a {
                return Err(IracError::InvalidIssuerData("too many attributes"));
            }
            let e = ViewEntry { pk: p.pk, attrs: p.attrs.clone(), rl: rl.clone(), c_r: pp.revocation_root(rl) };
            match by_key.get(&p.pk.encode()) {
                Some(old) if *old != e => return Err(IracError::InvalidIssuerData("conflicting entries for one key")),
                _ => {
                    by_key.insert(p.pk.encode(), e);
                }
            }
        }
        if by_key.is_empty() {
            return Err(IracError::EmptyIssuerSet);
        }
        if by_key.len() > pp.dims.n_i {
            return Err(IracError::HidingSetTooLarge(by_key.len()));
        }
        let entries: Vec<ViewEntry> = by_key.into_values().collect();
        let c = pp.pp_i.commit(&Self::leaves(&entries)).expect("bounded above");
        Ok(IssuerSetView { entries, c })
    }

    fn leaves(entries: &[ViewEntry]) -> Vec<(FieldElement, FieldElement)> {
        entries.iter().map(|e| (pk_digest(&e.pk), e.c_r.0)).collect()
    }

    pub fn entries(&self) -> &[ViewEntry] {
        &self.entries
    }

    pub fn commitment(&self) -> Commitment {
        self.c
    }

    pub fn position(&self, pk: &VerifyingKey) -> Option<usize> {
        self.entries.iter().position(|e| e.pk == *pk)
    }

    /// Checks that every issuer in the set holds every attribute `phi` uses.
    pub fn covers(&self, phi: &Predicate) -> Result<(), IracError> {
        for idx in pred_required_attrs(phi) {
            if self.entries.iter().any(|e| !e.attrs.contains(&idx)) {
                return Err(IracError::AttributeNotCovered(idx));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationToken {
    pub shape_id: Vec<u8>,
    pub proof: Proof,
}

impl PresentationToken {
    pub fn to_bytes(&self) -> Vec<u8> {
        self.encode()
    }
}

fn gap_opening(tree: &MerkleTree, target: FieldElement) -> Result<GapOpening, GapError> {
    let leaves = tree.leaves();
    let i = find_gap(leaves, target)?;
    Ok(GapOpening { h_l: leaves[i], h_r: leaves[i + 1], left: tree.open(i), right: tree.open(i + 1) })
}

/// Collects the openings that make up the witness for `phi`.
pub fn witness_assemble(
    pp: &SystemParams,
    cred: &Credential,
    phi: &Predicate,
    view: &IssuerSetView,
) -> Result<Witness, IracError> {
    let pos = view.position(&cred.issuer).ok_or(IracError::IssuerNotInSet)?;
    view.covers(phi)?;
    let entry = &view.entries[pos];
    if entry.attrs != cred.attrs {
        return Err(IracError::InvalidIssuerData("credential attributes differ from issuer"));
    }
    let tree = attr_tree(pp, &cred.attrs, &cred.values).ok_or(IracError::TooManyAttributes(cred.attrs.len()))?;
    let mut attrs = Vec::new();
    let mut assignment = BTreeMap::new();
    for idx in phi.slots() {
        let p = cred.attrs.iter().position(|&a| a == idx).ok_or(IracError::AttributeNotCovered(idx))?;
        attrs.push(AttrOpening { idx, value: cred.values[p], proof: tree.open(p) });
        assignment.insert(idx, cred.values[p]);
    }
    if !pred_eval(phi, &assignment)? {
        return Err(IracError::PredicateNotSatisfied);
    }
    let issuer_tree = pp.pp_i.tree(&IssuerSetView::leaves(&view.entries)).expect("bounded above");
    let issuer = IssuerOpening { pk: cred.issuer, c_r: entry.c_r, proof: issuer_tree.open(pos) };
    let gap = gap_opening(&revocation_tree(pp, &entry.rl), credential_hash(cred)).map_err(|_| IracError::Revoked)?;
    let mut list_gaps = Vec::new();
    for c in phi.clauses() {
        if let Clause::NotInSortedList { idx, list } = c {
            let g = gap_opening(list.tree(), assignment[idx] + FieldElement::ONE)
                .map_err(|_| IracError::PredicateNotSatisfied)?;
            list_gaps.push(g);
        }
    }
    Ok(Witness { c_a: cred.c_a, sig: cred.sig, issuer, attrs, gap, list_gaps })
}

pub fn statement(phi: &Predicate, ctx: &[u8], view: &IssuerSetView) -> Statement {
    Statement { predicate: phi.clone(), c: view.commitment(), ctx: ctx.to_vec() }
}

pub fn present_cred(
    pp: &SystemParams,
    cred: &Credential,
    phi: &Predicate,
    ctx: &[u8],
    view: &IssuerSetView,
    rng: &mut impl RngCore,
) -> Result<PresentationToken, IracError> {
    let w = witness_assemble(pp, cred, phi, view)?;
    let desc = RelationDescription::new(phi, pp.dims);
    let keys = pp.keys.get_or_generate(&pp.zk, &desc)?;
    let proof = zk_prove(&pp.zk, &keys.0, &statement(phi, ctx, view), &w, rng)?;
    Ok(PresentationToken { shape_id: desc.shape_id, proof })
}

pub fn verify_presentation(
    pp: &SystemParams,
    pt: &PresentationToken,
    phi: &Predicate,
    ctx: &[u8],
    view: &IssuerSetView,
) -> bool {
    if view.covers(phi).is_err() {
        return false;
    }
    let desc = RelationDescription::new(phi, pp.dims);
    if pt.shape_id != desc.shape_id {
        return false;
    }
    let Ok(keys) = pp.keys.get_or_generate(&pp.zk, &desc) else { return false };
    zk_verify(&pp.zk, &keys.1, &statement(phi, ctx, view), &pt.proof)
}

impl Encode for AttrKind {
    fn encode_to(&self, out: &mut Vec<u8>) {
        match self {
            AttrKind::Numeric { bits } => out.extend([0, *bits]),
            AttrKind::Categorical => out.push(1),
        }
    }
}

impl Decode for AttrKind {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        match u8::decode_from(r)? {
            0 => {
                let bits = u8::decode_from(r)?;
                if bits == 0 || bits > crate::predicate::MAX_BITS {
                    return Err(DecodeError::Invalid("bit width"));
                }
                Ok(AttrKind::Numeric { bits })
            }
            1 => Ok(AttrKind::Categorical),
            _ => Err(DecodeError::Invalid("attribute kind")),
        }
    }
}

impl Encode for AttributeUniverse {
    fn encode_to(&self, out: &mut Vec<u8>) {
        (self.attrs.len() as u32).encode_to(out);
        for a in &self.attrs {
            a.name.encode_to(out);
            a.kind.encode_to(out);
        }
    }
}

impl Decode for AttributeUniverse {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let n = u32::decode_from(r)?;
        let mut u = AttributeUniverse::default();
        for _ in 0..n {
            let a = AttributeId { name: String::decode_from(r)?, kind: AttrKind::decode_from(r)? };
            if u.index_of(&a.name).is_some() {
                return Err(DecodeError::Invalid("duplicate attribute name"));
            }
            u.attrs.push(a);
        }
        Ok(u)
    }
}

impl Encode for IssuerPublic {
    fn encode_to(&self, out: &mut Vec<u8>) {
        self.pk.encode_to(out);
        self.attrs.encode_to(out);
        self.rl.encode_to(out);
        self.c_r.encode_to(out);
    }
}

impl Decode for IssuerPublic {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        Ok(IssuerPublic {
            pk: VerifyingKey::decode_from(r)?,
            attrs: Vec::decode_from(r)?,
            rl: Vec::decode_from(r)?,
            c_r: Commitment::decode_from(r)?,
        })
    }
}

impl Encode for IssuerState {
    fn encode_to(&self, out: &mut Vec<u8>) {
        self.sk.encode_to(out);
        self.public.encode_to(out);
    }
}

impl Decode for IssuerState {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let sk = SigningKey::decode_from(r)?;
        let public = IssuerPublic::decode_from(r)?;
        if sk.verifying_key() != public.pk {
            return Err(DecodeError::Invalid("key pair mismatch"));
        }
        Ok(IssuerState { sk, public })
    }
}

impl Encode for Credential {
    fn encode_to(&self, out: &mut Vec<u8>) {
        self.issuer.encode_to(out);
        self.attrs.encode_to(out);
        self.values.encode_to(out);
        self.sig.encode_to(out);
        self.c_a.encode_to(out);
    }
}

impl Decode for Credential {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let c = Credential {
            issuer: VerifyingKey::decode_from(r)?,
            attrs: Vec::decode_from(r)?,
            values: Vec::decode_from(r)?,
            sig: Signature::decode_from(r)?,
            c_a: Commitment::decode_from(r)?,
        };
        if c.attrs.len() != c.values.len() {
            return Err(DecodeError::Invalid("attribute count"));
        }
        Ok(c)
    }
}

impl Encode for PresentationToken {
    fn encode_to(&self, out: &mut Vec<u8>) {
        Bytes(self.shape_id.clone()).encode_to(out);
        Bytes(self.proof.0.clone()).encode_to(out);
    }
}

impl Decode for PresentationToken {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let shape_id = Bytes::decode_from(r)?.0;
        let proof = Proof(Bytes::decode_from(r)?.0);
        Ok(PresentationToken { shape_id, proof })
    }
}

//! Proving-system boundary.
//!
//! Two backends share one interface. `Kzg` is Plonk over BN254 with KZG
//! commitments (SHPLONK opening, Blake2b transcript). `Transparent` carries
//! the witness in the clear and replays the relation check; it exists for
//! differential testing only and provides no zero knowledge.

pub mod srs;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use halo2_base::gates::circuit::builder::BaseCircuitBuilder;
use halo2_base::gates::circuit::BaseCircuitParams;
use halo2_base::halo2_proofs::halo2curves::bn256::{Bn256, G1Affine};
use halo2_base::halo2_proofs::plonk::{create_proof, keygen_pk, keygen_vk, verify_proof, ProvingKey, VerifyingKey};
use halo2_base::halo2_proofs::poly::commitment::ParamsProver;
use halo2_base::halo2_proofs::poly::kzg::commitment::{KZGCommitmentScheme, ParamsKZG};
use halo2_base::halo2_proofs::poly::kzg::multiopen::{ProverSHPLONK, VerifierSHPLONK};
use halo2_base::halo2_proofs::poly::kzg::strategy::SingleStrategy;
use halo2_base::halo2_proofs::halo2curves::ff::PrimeField;
use halo2_base::halo2_proofs::halo2curves::group::GroupEncoding;
use halo2_base::halo2_proofs::transcript::{
    Blake2bRead, Blake2bWrite, Challenge255, Transcript, TranscriptRead, TranscriptReadBuffer, TranscriptWriterBuffer,
};
use halo2_base::halo2_proofs::SerdeFormat;
use rand::RngCore;

use crate::encoding::{Decode, DecodeError, Encode, Reader};
use crate::field::{FieldElement, Fr};
use crate::predicate::pred_shape_id;
use crate::relation::checker::{layout, stats, CircuitStats};
use crate::relation::circuit::{dummy_witness, synthesize};
use crate::relation::{relation_check, RelationDescription, Statement, Witness};

/// Smallest circuit size used; the lookup table needs `2^(k-1) >= 2^8` rows.
pub const MIN_K: u32 = 9;
/// Rows reserved for blinding.
const BLINDING_ROWS: usize = 20;
/// Upper bound on advice columns when choosing the circuit height.
pub const MAX_ADVICE_COLUMNS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Kzg,
    Transparent,
}

impl Backend {
    pub fn header(self) -> u8 {
        match self {
            Backend::Kzg => 0x01,
            Backend::Transparent => 0x54,
        }
    }

    pub fn from_header(b: u8) -> Option<Self> {
        match b {
            0x01 => Some(Backend::Kzg),
            0x54 => Some(Backend::Transparent),
            _ => None,
        }
    }

    /// Whether proofs hide the witness.
    pub fn is_zero_knowledge(self) -> bool {
        self == Backend::Kzg
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ZkError {
    #[error("circuit needs 2^{needed} rows but parameters support 2^{max}")]
    CircuitTooLarge { needed: u32, max: u32 },
    #[error("witness does not satisfy the relation")]
    UnsatisfiedWitness,
    #[error("statement shape does not match the key")]
    ShapeMismatch,
    #[error("max constraint count must be a power of two in 2^{MIN_K}..=2^26")]
    BadCapacity,
    #[error("proving failed: {0}")]
    Prover(String),
}

/// Universal parameters sized by a maximum constraint count.
pub struct ZkParams {
    backend: Backend,
    max_k: u32,
    seed: u64,
}

fn srs_cache() -> &'static Mutex<HashMap<(u64, u32), Arc<ParamsKZG<Bn256>>>> {
    static C: OnceLock<Mutex<HashMap<(u64, u32), Arc<ParamsKZG<Bn256>>>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// Seeded KZG parameters for `2^k` rows, shared within the process. All
/// sizes derive from the same secret, so smaller ones are truncations of the
/// largest.
pub fn srs_for(seed: u64, k: u32) -> Arc<ParamsKZG<Bn256>> {
    if let Some(p) = srs_cache().lock().unwrap().get(&(seed, k)) {
        return p.clone();
    }
    let p = Arc::new(srs::seeded_params(k, seed));
    srs_cache().lock().unwrap().entry((seed, k)).or_insert(p).clone()
}

pub fn zk_setup(backend: Backend, max_constraints: usize, seed: u64) -> Result<ZkParams, ZkError> {
    if !max_constraints.is_power_of_two() {
        return Err(ZkError::BadCapacity);
    }
    let max_k = max_constraints.trailing_zeros();
    if !(MIN_K..=26).contains(&max_k) {
        return Err(ZkError::BadCapacity);
    }
    if backend == Backend::Kzg {
        srs_for(seed, max_k);
    }
    Ok(ZkParams { backend, max_k, seed })
}

impl ZkParams {
    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn max_k(&self) -> u32 {
        self.max_k
    }

    pub fn max_constraints(&self) -> usize {
        1 << self.max_k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn srs(&self, k: u32) -> Arc<ParamsKZG<Bn256>> {
        srs_for(self.seed, k)
    }
}

impl Encode for ZkParams {
    fn encode_to(&self, out: &mut Vec<u8>) {
        out.push(self.backend.header());
        self.max_k.encode_to(out);
        self.seed.encode_to(out);
    }
}

impl Decode for ZkParams {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let backend = Backend::from_header(u8::decode_from(r)?).ok_or(DecodeError::Invalid("backend"))?;
        let max_k = u32::decode_from(r)?;
        let seed = u64::decode_from(r)?;
        if !(MIN_K..=26).contains(&max_k) {
            return Err(DecodeError::Invalid("capacity"));
        }
        Ok(ZkParams { backend, max_k, seed })
    }
}

/// Circuit size chosen for a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Plan {
    pub k: u32,
    pub lookup_bits: usize,
    pub stats: CircuitStats,
}

/// Picks the smallest `k >= MIN_K` whose `2^k` rows hold the advice cells in
/// at most `MAX_ADVICE_COLUMNS` columns, with a lookup table of `2^(k-1)`
/// entries. Returns the keygen-mode layout for reuse.
pub fn plan(desc: &RelationDescription) -> (Plan, BaseCircuitBuilder<Fr>) {
    let public = vec![FieldElement::ZERO; desc.num_public_inputs()];
    let w = dummy_witness(desc);
    let mut probe = layout(desc, &public, &w, 8);
    let first = stats(&mut probe);
    let fits = |k: u32| {
        let rows = (1usize << k) - BLINDING_ROWS - 1;
        first.advice_cells.div_ceil(rows) <= MAX_ADVICE_COLUMNS && first.lookups <= rows * MAX_ADVICE_COLUMNS
    };
    let k = (MIN_K..).find(|&k| fits(k)).unwrap();
    let lookup_bits = k as usize - 1;
    let mut b = layout(desc, &public, &w, lookup_bits);
    let s = stats(&mut b);
    (Plan { k, lookup_bits, stats: s }, b)
}

pub struct ProverKey {
    pub desc: RelationDescription,
    pub plan: Plan,
    backend: Backend,
    kzg: Option<(ProvingKey<G1Affine>, BaseCircuitParams, Vec<Vec<usize>>)>,
}

pub struct VerifierKey {
    pub desc: RelationDescription,
    pub plan: Plan,
    backend: Backend,
    vk: Option<VerifyingKey<G1Affine>>,
}

impl VerifierKey {
    /// Header byte, shape id, size and the backend key.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![self.backend.header()];
        crate::encoding::Bytes(self.desc.shape_id.clone()).encode_to(&mut out);
        self.plan.k.encode_to(&mut out);
        if let Some(vk) = &self.vk {
            out.extend(vk.to_bytes(SerdeFormat::RawBytes));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Proof(pub Vec<u8>);

pub fn zk_keygen(pp: &ZkParams, desc: &RelationDescription) -> Result<(ProverKey, VerifierKey), ZkError> {
    let (plan, mut b) = plan(desc);
    if plan.k > pp.max_k {
        return Err(ZkError::CircuitTooLarge { needed: plan.k, max: pp.max_k });
    }
    let (kzg, vk) = match pp.backend {
        Backend::Transparent => (None, None),
        Backend::Kzg => {
            let srs = pp.srs(plan.k);
            let config = b.calculate_params(Some(BLINDING_ROWS));
            let vk = keygen_vk(srs.as_ref(), &b).map_err(|e| ZkError::Prover(format!("{e:?}")))?;
            let pk = keygen_pk(srs.as_ref(), vk.clone(), &b).map_err(|e| ZkError::Prover(format!("{e:?}")))?;
            let bp = b.break_points();
            (Some((pk, config, bp)), Some(vk))
        }
    };
    let backend = pp.backend;
    Ok((
        ProverKey { desc: desc.clone(), plan, backend, kzg },
        VerifierKey { desc: desc.clone(), plan, backend, vk },
    ))
}

fn shape_matches(desc: &RelationDescription, stmt: &Statement) -> bool {
    pred_shape_id(&stmt.predicate, &desc.dims) == desc.shape_id
}

pub fn zk_prove(
    pp: &ZkParams,
    pk: &ProverKey,
    stmt: &Statement,
    w: &Witness,
    rng: &mut impl RngCore,
) -> Result<Proof, ZkError> {
    if !shape_matches(&pk.desc, stmt) {
        return Err(ZkError::ShapeMismatch);
    }
    if !relation_check(&pk.desc.dims, stmt, w) {
        return Err(ZkError::UnsatisfiedWitness);
    }
    let public = stmt.public_inputs();
    let mut out = vec![pk.backend.header()];
    match &pk.kzg {
        None => {
            stmt.ctx_field().encode_to(&mut out);
            w.encode_to(&mut out);
        }
        Some((key, config, bp)) => {
            let mut b = BaseCircuitBuilder::prover(config.clone(), bp.clone());
            synthesize(&mut b, &pk.desc, &public, w);
            let inst: Vec<Fr> = public.iter().map(|x| x.inner()).collect();
            let srs = pp.srs(pk.plan.k);
            let mut tr = Blake2bWrite::<_, G1Affine, Challenge255<_>>::init(out);
            create_proof::<KZGCommitmentScheme<Bn256>, ProverSHPLONK<'_, Bn256>, _, _, _, _>(
                srs.as_ref(),
                key,
                &[b],
                &[&[&inst]],
                rng,
                &mut tr,
            )
            .map_err(|e| ZkError::Prover(format!("{e:?}")))?;
            out = tr.finalize();
        }
    }
    Ok(Proof(out))
}

/// Encodes a transparent-backend proof for any witness, satisfying or not.
/// Lets tests hand the verifier witnesses that an honest prover would refuse.
pub fn transparent_proof(stmt: &Statement, w: &Witness) -> Proof {
    let mut out = vec![Backend::Transparent.header()];
    stmt.ctx_field().encode_to(&mut out);
    w.encode_to(&mut out);
    Proof(out)
}

pub fn zk_verify(pp: &ZkParams, vk: &VerifierKey, stmt: &Statement, proof: &Proof) -> bool {
    if !shape_matches(&vk.desc, stmt) {
        return false;
    }
    let Some((&head, body)) = proof.0.split_first() else { return false };
    if head != vk.backend.header() {
        return false;
    }
    match &vk.vk {
        None => {
            let mut r = Reader::new(body);
            let Ok(ctx) = FieldElement::decode_from(&mut r) else { return false };
            let Ok(w) = Witness::decode_from(&mut r) else { return false };
            r.finish().is_ok() && ctx == stmt.ctx_field() && relation_check(&vk.desc.dims, stmt, &w)
        }
        Some(key) => {
            let inst: Vec<Fr> = stmt.public_inputs().iter().map(|x| x.inner()).collect();
            let srs = pp.srs(vk.plan.k);
            let mut tr = CanonicalRead::new(body);
            let ok = verify_proof::<KZGCommitmentScheme<Bn256>, VerifierSHPLONK<'_, Bn256>, _, _, _>(
                srs.verifier_params(),
                key,
                SingleStrategy::new(srs.as_ref()),
                &[&[&inst]],
                &mut tr,
            )
            .is_ok();
            // trailing bytes are not part of any proof
            ok && tr.pos == body.len()
        }
    }
}

/// Verifier transcript that accepts only canonical encodings. The curve
/// library ignores the infinity flag of a point with nonzero x, so without
/// this check each point in a proof has a second valid encoding.
struct CanonicalRead<'a> {
    inner: Blake2bRead<&'a [u8], G1Affine, Challenge255<G1Affine>>,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> CanonicalRead<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        CanonicalRead { inner: Blake2bRead::init(bytes), bytes, pos: 0 }
    }

    fn consume(&mut self, expected: &[u8]) -> std::io::Result<()> {
        let end = self.pos + expected.len();
        if self.bytes.get(self.pos..end) != Some(expected) {
            return Err(std::io::Error::other("non-canonical encoding"));
        }
        self.pos = end;
        Ok(())
    }
}

impl Transcript<G1Affine, Challenge255<G1Affine>> for CanonicalRead<'_> {
    fn squeeze_challenge(&mut self) -> Challenge255<G1Affine> {
        self.inner.squeeze_challenge()
    }

    fn common_point(&mut self, point: G1Affine) -> std::io::Result<()> {
        self.inner.common_point(point)
    }

    fn common_scalar(&mut self, scalar: Fr) -> std::io::Result<()> {
        self.inner.common_scalar(scalar)
    }
}

impl TranscriptRead<G1Affine, Challenge255<G1Affine>> for CanonicalRead<'_> {
    fn read_point(&mut self) -> std::io::Result<G1Affine> {
        let p = self.inner.read_point()?;
        self.consume(p.to_bytes().as_ref())?;
        Ok(p)
    }

    fn read_scalar(&mut self) -> std::io::Result<Fr> {
        let s = self.inner.read_scalar()?;
        self.consume(s.to_repr().as_ref())?;
        Ok(s)
    }
}

/// Shape-keyed cache of generated keys. Key generation is deterministic, so
/// cached keys are interchangeable with fresh ones.
#[derive(Default)]
pub struct KeyCache {
    keys: RwLock<HashMap<Vec<u8>, Arc<(ProverKey, VerifierKey)>>>,
}

impl KeyCache {
    pub fn get_or_generate(&self, pp: &ZkParams, desc: &RelationDescription) -> Result<Arc<(ProverKey, VerifierKey)>, ZkError> {
        if let Some(k) = self.keys.read().unwrap().get(&desc.shape_id) {
            return Ok(k.clone());
        }
        let keys = Arc::new(zk_keygen(pp, desc)?);
        Ok(self.keys.write().unwrap().entry(desc.shape_id.clone()).or_insert(keys).clone())
    }

    pub fn len(&self) -> usize {
        self.keys.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

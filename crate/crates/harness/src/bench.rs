//! Timing runs for the main operations and presentations.

use std::time::{Duration, Instant};

use halo2_base::gates::circuit::builder::BaseCircuitBuilder;
use halo2_base::gates::circuit::{BaseCircuitParams, CircuitBuilderStage};
use halo2_base::gates::{GateInstructions, RangeInstructions};
use halo2_base::halo2_proofs::halo2curves::bn256::{Bn256, Fr, G1Affine};
use halo2_base::halo2_proofs::plonk::{create_proof, keygen_pk, keygen_vk, verify_proof};
use halo2_base::halo2_proofs::poly::commitment::ParamsProver;
use halo2_base::halo2_proofs::poly::kzg::commitment::KZGCommitmentScheme;
use halo2_base::halo2_proofs::poly::kzg::multiopen::{ProverSHPLONK, VerifierSHPLONK};
use halo2_base::halo2_proofs::poly::kzg::strategy::SingleStrategy;
use halo2_base::halo2_proofs::transcript::{
    Blake2bRead, Blake2bWrite, Challenge255, TranscriptReadBuffer, TranscriptWriterBuffer,
};
use halo2_base::QuantumCell::Constant;
use irac::predicate::{CmpOp, Clause, Predicate, SortedList};
use irac::protocol::*;
use irac::relation::RelationDescription;
use irac::zk::{srs_for, zk_setup, Backend};
use irac::FieldElement;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::suites::rng_for;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchConfig {
    /// `log2` of the maximum constraint counts for the setup sweep.
    pub setup_ks: Vec<u32>,
    /// `(n_a, n_r, n_I)` for the main operations and predicates 1 and 2.
    pub dims: (usize, usize, usize),
    /// Issuer-set size for the large presentation.
    pub large_n_i: usize,
    /// Entries in the banlist of predicate 2.
    pub banlist: usize,
    /// Sizes of the calibration circuits for the verify sweep.
    pub verify_ks: Vec<u32>,
    pub reps: usize,
    pub seed: u64,
}

impl BenchConfig {
    /// The sizes of the reference measurements.
    pub fn reference() -> Self {
        BenchConfig {
            setup_ks: vec![12, 13, 14, 15, 16],
            dims: (128, 1 << 15, 128),
            large_n_i: 1 << 10,
            banlist: 1 << 15,
            verify_ks: vec![12, 13, 14, 15, 16],
            reps: 5,
            seed: 1,
        }
    }

    /// Small sizes for smoke runs.
    pub fn quick() -> Self {
        BenchConfig {
            setup_ks: vec![12, 13],
            dims: (8, 8, 8),
            large_n_i: 16,
            banlist: 6,
            verify_ks: vec![12, 13],
            reps: 2,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hardware {
    pub cpu: String,
    pub cores: usize,
    pub os: String,
    pub arch: String,
}

impl Hardware {
    pub fn detect() -> Self {
        let cpu = std::fs::read_to_string("/proc/cpuinfo")
            .ok()
            .and_then(|s| s.lines().find(|l| l.starts_with("model name")).and_then(|l| l.split(':').nth(1)).map(|s| s.trim().to_string()))
            .unwrap_or_else(|| "unknown".into());
        Hardware {
            cpu,
            cores: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
        }
    }
}

/// Samples of one operation, in milliseconds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Timing {
    pub samples_ms: Vec<f64>,
    pub median_ms: f64,
}

impl Timing {
    fn of(samples: Vec<Duration>) -> Self {
        let ms: Vec<f64> = samples.iter().map(|d| d.as_secs_f64() * 1e3).collect();
        let mut sorted = ms.clone();
        sorted.sort_by(f64::total_cmp);
        let median_ms = sorted[sorted.len() / 2];
        Timing { samples_ms: ms, median_ms }
    }
}

fn time<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetupRow {
    pub k: u32,
    pub ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MainOps {
    pub issuer_setup: Timing,
    pub issue: Timing,
    pub verify_cred: Timing,
    pub revoke: Timing,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresentRow {
    pub label: String,
    pub dims: (usize, usize, usize),
    pub predicate: String,
    pub k: u32,
    pub gates: usize,
    pub lookups: usize,
    pub advice_cells: usize,
    pub keygen_ms: f64,
    pub prove: Timing,
    pub verify: Timing,
    pub proof_bytes: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyRow {
    pub k: u32,
    pub prove_ms: f64,
    pub verify: Timing,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub hardware: Hardware,
    pub config: BenchConfig,
    pub backend: String,
    pub setup: Vec<SetupRow>,
    pub main_ops: MainOps,
    pub presentations: Vec<PresentRow>,
    pub verify_sweep: Vec<VerifyRow>,
    /// Median verify time at the largest calibration size over the smallest.
    pub verify_ratio: f64,
}

impl BenchReport {
    pub fn row(&self, label: &str) -> Option<&PresentRow> {
        self.presentations.iter().find(|r| r.label == label)
    }

    /// Plain-text summary in the layout of the reference tables.
    pub fn table(&self) -> String {
        let h = &self.hardware;
        let mut s = format!("hardware: {} ({} cores, {}/{})\nbackend: {}\n\n", h.cpu, h.cores, h.os, h.arch, self.backend);
        s += "setup (max constraints -> time)\n";
        for r in &self.setup {
            s += &format!("  2^{:<3} {:>10.1} ms\n", r.k, r.ms);
        }
        let m = &self.main_ops;
        let (na, nr, ni) = self.config.dims;
        s += &format!("\nmain operations (n_a={na}, n_r={nr}, n_I={ni}), median ms\n");
        s += "  IssuerSetup   IssueCred   VerifyCred      Revoke\n";
        s += &format!(
            "  {:>11.2} {:>11.2} {:>12.2} {:>11.1}\n",
            m.issuer_setup.median_ms, m.issue.median_ms, m.verify_cred.median_ms, m.revoke.median_ms
        );
        s += "\npresentations, median ms\n";
        s += "  label        k   gates   cells     keygen      prove   verify   bytes\n";
        for r in &self.presentations {
            s += &format!(
                "  {:<10} {:>3} {:>7} {:>7} {:>10.0} {:>10.0} {:>8.2} {:>7}\n",
                r.label, r.k, r.gates, r.advice_cells, r.keygen_ms, r.prove.median_ms, r.verify.median_ms, r.proof_bytes
            );
        }
        s += "\nverify across circuit sizes, median ms\n";
        for r in &self.verify_sweep {
            s += &format!("  2^{:<3} prove {:>9.0}  verify {:>7.2}\n", r.k, r.prove_ms, r.verify.median_ms);
        }
        s += &format!("  ratio largest/smallest: {:.2}\n", self.verify_ratio);
        s
    }
}

fn bench_universe(n_a: usize) -> AttributeUniverse {
    let mut attrs = vec![
        AttributeId { name: "age".into(), kind: AttrKind::Numeric { bits: 8 } },
        AttributeId { name: "id".into(), kind: AttrKind::Numeric { bits: 64 } },
        AttributeId { name: "country".into(), kind: AttrKind::Categorical },
    ];
    for k in attrs.len()..n_a {
        attrs.push(AttributeId { name: format!("a{k}"), kind: AttrKind::Numeric { bits: 32 } });
    }
    add_attributes(&AttributeUniverse::default(), &attrs).unwrap()
}

fn full_credential_values(u: &AttributeUniverse, rng: &mut impl Rng) -> Vec<FieldElement> {
    (1..=u.len() as u32)
        .map(|i| match i {
            1 => FieldElement::from_u64(rng.gen_range(19..=90)),
            2 => FieldElement::from_u64(rng.gen()),
            3 => FieldElement::random(rng),
            _ => FieldElement::from_u64(rng.gen::<u32>() as u64),
        })
        .collect()
}

fn main_ops(cfg: &BenchConfig, pp: &SystemParams, u: &AttributeUniverse) -> MainOps {
    let mut rng = rng_for(cfg.seed, 10);
    let all: Vec<u32> = (1..=u.len() as u32).collect();
    let mut setups = Vec::new();
    let mut issuer = None;
    for _ in 0..cfg.reps {
        let (st, d) = time(|| issuer_setup(pp, u, &all, &mut rng).unwrap());
        setups.push(d);
        issuer = Some(st);
    }
    let mut issuer = issuer.unwrap();
    let (mut issues, mut verifies, mut revokes) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..cfg.reps {
        let values = full_credential_values(u, &mut rng);
        let (cred, d) = time(|| issue_cred(pp, u, &issuer, &values, &mut rng).unwrap());
        issues.push(d);
        let (ok, d) = time(|| verify_cred(pp, &cred, &issuer.public.pk, &issuer.public.attrs));
        assert!(ok);
        verifies.push(d);
        let (next, d) = time(|| revoke(pp, &issuer, &cred).unwrap());
        revokes.push(d);
        issuer = next;
    }
    MainOps {
        issuer_setup: Timing::of(setups),
        issue: Timing::of(issues),
        verify_cred: Timing::of(verifies),
        revoke: Timing::of(revokes),
    }
}

fn present_row(
    cfg: &BenchConfig,
    label: &str,
    pp: &SystemParams,
    u: &AttributeUniverse,
    n_issuers: usize,
    phi: &Predicate,
) -> PresentRow {
    let mut rng = rng_for(cfg.seed, 20);
    let all: Vec<u32> = (1..=u.len() as u32).collect();
    let issuers: Vec<IssuerState> = (0..n_issuers).map(|_| issuer_setup(pp, u, &all, &mut rng).unwrap()).collect();
    let publics: Vec<_> = issuers.iter().map(|i| i.public.clone()).collect();
    let view = IssuerSetView::new(pp, &publics).unwrap();
    let holder = &issuers[rng.gen_range(0..n_issuers)];
    let cred = issue_cred(pp, u, holder, &full_credential_values(u, &mut rng), &mut rng).unwrap();
    let desc = RelationDescription::new(phi, pp.dims);
    let (keys, keygen) = time(|| pp.keys.get_or_generate(&pp.zk, &desc).unwrap());
    let plan = keys.0.plan;
    let (mut proves, mut verifies) = (Vec::new(), Vec::new());
    let mut proof_bytes = 0;
    for r in 0..cfg.reps.min(3) {
        let ctx = format!("bench-{r}").into_bytes();
        let (pt, d) = time(|| present_cred(pp, &cred, phi, &ctx, &view, &mut rng).unwrap());
        proves.push(d);
        proof_bytes = pt.proof.0.len();
        for _ in 0..cfg.reps {
            let (ok, d) = time(|| verify_presentation(pp, &pt, phi, &ctx, &view));
            assert!(ok);
            verifies.push(d);
        }
    }
    PresentRow {
        label: label.into(),
        dims: (pp.dims.n_a, pp.dims.n_r, pp.dims.n_i),
        predicate: phi.to_string(),
        k: plan.k,
        gates: plan.stats.gates,
        lookups: plan.stats.lookups,
        advice_cells: plan.stats.advice_cells,
        keygen_ms: keygen.as_secs_f64() * 1e3,
        prove: Timing::of(proves),
        verify: Timing::of(verifies),
        proof_bytes,
    }
}

/// A circuit filling six advice columns of `2^k` rows with multiply-add
/// gates and range checks, the same column layout as the relation.
fn calibration(k: u32, stage: CircuitBuilderStage, config: Option<(BaseCircuitParams, Vec<Vec<usize>>)>) -> BaseCircuitBuilder<Fr> {
    let lookup_bits = k as usize - 1;
    let mut b = match config {
        Some((params, bp)) => BaseCircuitBuilder::prover(params, bp),
        None => BaseCircuitBuilder::from_stage(stage).use_k(k as usize).use_lookup_bits(lookup_bits).use_instance_columns(1),
    };
    let range = b.range_chip();
    let gate = range.gate();
    let ctx = b.main(0);
    let rows = (1usize << k) - 21;
    let target = rows * 6 * 9 / 10;
    let mut acc = ctx.load_witness(Fr::from(3));
    let x = ctx.load_witness(Fr::from(5));
    let mut n = 0;
    while ctx.advice.len() < target {
        acc = gate.mul_add(ctx, acc, x, Constant(Fr::from(n)));
        if n % 64 == 0 {
            let small = ctx.load_witness(Fr::from(n % (1 << lookup_bits)));
            range.range_check(ctx, small, lookup_bits);
        }
        n += 1;
    }
    b.assigned_instances = vec![vec![acc]];
    b
}

fn verify_row(cfg: &BenchConfig, k: u32) -> VerifyRow {
    let srs = srs_for(cfg.seed, k);
    let mut kb = calibration(k, CircuitBuilderStage::Keygen, None);
    let params = kb.calculate_params(Some(20));
    let vk = keygen_vk(srs.as_ref(), &kb).unwrap();
    let pk = keygen_pk(srs.as_ref(), vk.clone(), &kb).unwrap();
    let bp = kb.break_points();
    let inst: Vec<Fr> = kb.assigned_instances[0].iter().map(|v| *v.value()).collect();
    let prover = calibration(k, CircuitBuilderStage::Prover, Some((params, bp)));
    let mut rng = rng_for(cfg.seed, 30 + k as u64);
    let (proof, prove) = time(|| {
        let mut tr = Blake2bWrite::<_, G1Affine, Challenge255<_>>::init(vec![]);
        create_proof::<KZGCommitmentScheme<Bn256>, ProverSHPLONK<'_, Bn256>, _, _, _, _>(
            srs.as_ref(),
            &pk,
            &[prover],
            &[&[&inst]],
            &mut rng,
            &mut tr,
        )
        .unwrap();
        tr.finalize()
    });
    let mut samples = Vec::new();
    for _ in 0..cfg.reps.max(5) {
        let (ok, d) = time(|| {
            let mut tr = Blake2bRead::<_, G1Affine, Challenge255<_>>::init(proof.as_slice());
            verify_proof::<KZGCommitmentScheme<Bn256>, VerifierSHPLONK<'_, Bn256>, _, _, _>(
                srs.verifier_params(),
                &vk,
                SingleStrategy::new(srs.as_ref()),
                &[&[&inst]],
                &mut tr,
            )
            .is_ok()
        });
        assert!(ok);
        samples.push(d);
    }
    VerifyRow { k, prove_ms: prove.as_secs_f64() * 1e3, verify: Timing::of(samples) }
}

/// `#1 > 18` over an 8-bit age.
pub fn predicate_age() -> Predicate {
    Predicate::new(vec![Clause::Compare { idx: 1, op: CmpOp::Gt, constant: FieldElement::from_u64(18), bits: 8 }]).unwrap()
}

/// The holder's identifier is not on a banlist of `n` entries.
pub fn predicate_banlist(n: usize, seed: u64) -> Predicate {
    let mut rng = rng_for(seed, 40);
    // identifiers drawn from the upper half, holders from the full range
    let entries = (0..n).map(|_| FieldElement::from_u64(rng.gen::<u64>() | 1 << 63)).collect();
    Predicate::new(vec![Clause::NotInSortedList { idx: 2, list: SortedList::new(entries).unwrap() }]).unwrap()
}

fn predicate_mixed() -> Predicate {
    let countries = (1..=4).map(|i| irac::hash::hash_to_field(format!("country{i}").as_bytes())).collect();
    Predicate::new(vec![
        Clause::Compare { idx: 1, op: CmpOp::Ge, constant: FieldElement::from_u64(18), bits: 8 },
        Clause::Compare { idx: 1, op: CmpOp::Le, constant: FieldElement::from_u64(90), bits: 8 },
        Clause::NotInSortedList { idx: 3, list: SortedList::new(countries).unwrap() },
    ])
    .unwrap()
}

pub fn bench_run(cfg: &BenchConfig) -> BenchReport {
    let mut setup = Vec::new();
    for (n, &k) in cfg.setup_ks.iter().enumerate() {
        // a fresh seed so that no cached parameters are reused
        let (_, d) = time(|| zk_setup(Backend::Kzg, 1 << k, cfg.seed.wrapping_mul(1000) + 100 + n as u64).unwrap());
        setup.push(SetupRow { k, ms: d.as_secs_f64() * 1e3 });
    }
    let (na, nr, ni) = cfg.dims;
    let u = bench_universe(na);
    let (pp, _) = setup_with(na, nr, ni, Backend::Kzg, 1 << 16, cfg.seed).unwrap();
    let main_ops = main_ops(cfg, &pp, &u);
    let mut presentations = Vec::new();
    presentations.push(present_row(cfg, "pred1", &pp, &u, ni, &predicate_age()));
    presentations.push(present_row(cfg, "pred2", &pp, &u, ni, &predicate_banlist(cfg.banlist, cfg.seed)));
    let (pp_large, _) = setup_with(na, nr, cfg.large_n_i, Backend::Kzg, 1 << 16, cfg.seed).unwrap();
    presentations.push(present_row(cfg, "large", &pp_large, &u, cfg.large_n_i, &predicate_mixed()));
    let verify_sweep: Vec<VerifyRow> = cfg.verify_ks.iter().map(|&k| verify_row(cfg, k)).collect();
    let first = verify_sweep.first().map_or(1.0, |r| r.verify.median_ms);
    let last = verify_sweep.last().map_or(1.0, |r| r.verify.median_ms);
    BenchReport {
        hardware: Hardware::detect(),
        config: cfg.clone(),
        backend: "Plonk/KZG (SHPLONK) over BN254, halo2-axiom".into(),
        setup,
        main_ops,
        presentations,
        verify_sweep,
        verify_ratio: last / first,
    }
}

//! Pass/fail suites over the protocol.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};

use irac::encoding::{Decode, Encode};
use irac::predicate::{parse_simple, pred_shape_id, Clause, Predicate, SortedList};
use irac::protocol::*;
use irac::relation::checker::circuit_accepts;
use irac::relation::{find_gap, relation_check, RelationDescription, Statement, Witness};
use irac::vc::{vc_setup, AttrLeaves, Commitment, RawLeaves, VcParams};
use irac::zk::{plan, transparent_proof, Backend};
use irac::FieldElement;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::oracle::GameState;
use crate::scenario::{random_scenario, random_value, toy_attributes, toy_universe, Scenario};

/// Toy size used by the randomized suites.
pub const TOY: usize = 8;

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub cases: usize,
    pub failures: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.cases > 0 && self.failures.is_empty()
    }

    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.cases += other.cases;
        self.failures.extend(other.failures);
    }
}

/// Toy-size parameters for both backends over the same universe.
pub struct Fixture {
    pub kzg: SystemParams,
    pub test: SystemParams,
    pub u: AttributeUniverse,
}

impl Fixture {
    pub fn toy() -> Self {
        let (kzg, _) = setup_with(TOY, TOY, TOY, Backend::Kzg, 1 << 15, 0).unwrap();
        let (test, _) = setup_with(TOY, TOY, TOY, Backend::Transparent, 1 << 15, 0).unwrap();
        Fixture { kzg, test, u: toy_universe() }
    }
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Contexts different from `ctx`: one byte flipped, extended, truncated and
/// fresh.
pub fn other_contexts(ctx: &[u8], rng: &mut impl Rng) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    if !ctx.is_empty() {
        let mut f = ctx.to_vec();
        let i = rng.gen_range(0..f.len());
        f[i] ^= 1 << rng.gen_range(0..8);
        out.push(f);
        out.push(ctx[..ctx.len() - 1].to_vec());
    }
    let mut ext = ctx.to_vec();
    ext.push(0);
    out.push(ext);
    loop {
        let fresh: Vec<u8> = (0..16).map(|_| rng.gen()).collect();
        if fresh != ctx {
            out.push(fresh);
            return out;
        }
    }
}

#[derive(Debug, Default, Serialize)]
pub struct Completeness {
    /// Honest tokens accepted.
    pub accept: Report,
    /// Tokens rejected once the credential is revoked and the view refreshed.
    pub revoked: Report,
    /// Tokens rejected under every other context.
    pub ctx: Report,
}

/// Runs `n` random scenarios: present, verify, verify under other contexts,
/// then revoke and verify again.
pub fn completeness(pp: &SystemParams, u: &AttributeUniverse, n: usize, seed: u64) -> Completeness {
    let mut out = Completeness::default();
    for k in 0..n {
        let mut rng = rng_for(seed, k as u64);
        let mut sc = random_scenario(pp, u, &mut rng);
        let view = sc.view(pp);
        let pt = match present_cred(pp, &sc.cred, &sc.phi, &sc.ctx, &view, &mut rng) {
            Ok(pt) => pt,
            Err(e) => {
                out.accept.check(false, || format!("scenario {k}: present failed: {e} ({})", sc.phi));
                continue;
            }
        };
        out.accept.check(verify_presentation(pp, &pt, &sc.phi, &sc.ctx, &view), || format!("scenario {k}: rejected ({})", sc.phi));
        for alt in other_contexts(&sc.ctx, &mut rng) {
            out.ctx.check(!verify_presentation(pp, &pt, &sc.phi, &alt, &view), || format!("scenario {k}: accepted under {alt:02x?}"));
        }
        revoke_and_recheck(pp, &mut sc, &pt, k, &mut out.revoked, &mut rng);
    }
    out
}

fn revoke_and_recheck(pp: &SystemParams, sc: &mut Scenario, pt: &PresentationToken, k: usize, r: &mut Report, rng: &mut impl Rng) {
    if let Err(e) = sc.revoke_holder(pp) {
        r.check(false, || format!("scenario {k}: revoke failed: {e}"));
        return;
    }
    let fresh = sc.view(pp);
    r.check(!verify_presentation(pp, pt, &sc.phi, &sc.ctx, &fresh), || format!("scenario {k}: revoked token accepted"));
    let again = present_cred(pp, &sc.cred, &sc.phi, &sc.ctx, &fresh, rng);
    r.check(matches!(again, Err(IracError::Revoked)), || format!("scenario {k}: revoked credential presented: {again:?}"));
}

/// Every revocation list of at most `n_r - 2 = 6` entries drawn from the
/// hashes of 8 credentials; each credential's classification by
/// `witness_assemble` must match a linear scan of the list.
pub fn gap_oracle(pp: &SystemParams, u: &AttributeUniverse) -> Report {
    assert_eq!(pp.dims.n_r, TOY);
    let mut r = Report::default();
    let mut rng = rng_for(3, 0);
    let base = issuer_setup(pp, u, &[1], &mut rng).unwrap();
    let creds: Vec<Credential> =
        (0..8).map(|v| issue_cred(pp, u, &base, &[FieldElement::from_u64(v)], &mut rng).unwrap()).collect();
    let hashes: Vec<FieldElement> = creds.iter().map(credential_hash).collect();
    let phi = parse_simple("#1:8 >= 0").unwrap();
    for mask in 0u32..256 {
        if mask.count_ones() > 6 {
            continue;
        }
        let chosen: Vec<usize> = (0..8).filter(|t| mask >> t & 1 == 1).collect();
        let st = chosen.iter().fold(base.clone(), |s, &t| revoke(pp, &s, &creds[t]).unwrap());
        let view = IssuerSetView::new(pp, &[st.public.clone()]).unwrap();
        let stmt = statement(&phi, b"", &view);
        for (t, cred) in creds.iter().enumerate() {
            let listed = st.public.rl.iter().any(|h| *h == hashes[t]);
            match witness_assemble(pp, cred, &phi, &view) {
                Err(IracError::Revoked) => r.check(listed, || format!("mask {mask:08b}: cred {t} wrongly revoked")),
                Ok(w) => r.check(!listed && relation_check(&pp.dims, &stmt, &w), || format!("mask {mask:08b}: cred {t} wrongly unrevoked")),
                Err(e) => r.check(false, || format!("mask {mask:08b}: cred {t}: {e}")),
            }
        }
    }
    // the same over the raw layout with the values 1..=8 as hashes
    for mask in 0u32..256 {
        if mask.count_ones() > 6 {
            continue;
        }
        let rl: Vec<FieldElement> = (0..8).filter(|t| mask >> t & 1 == 1).map(|t| FieldElement::from_u64(t + 1)).collect();
        let layout = revocation_layout(&rl, TOY);
        for v in 1..=8 {
            let h = FieldElement::from_u64(v);
            let found = find_gap(&layout, h);
            let ok = match found {
                Ok(i) => !rl.contains(&h) && layout[i] < h && h < layout[i + 1],
                Err(_) => rl.contains(&h),
            };
            r.check(ok, || format!("layout {mask:08b}: value {v}: {found:?}"));
        }
    }
    r
}

#[derive(Debug, Default, Serialize)]
pub struct Equivalence {
    pub report: Report,
    pub honest: usize,
    pub mutated: usize,
    /// Instances both checkers rejected.
    pub rejected: usize,
    /// Mutations skipped because they changed the circuit shape.
    pub skipped: usize,
}

pub const MUTATIONS: usize = 22;

fn bump(x: FieldElement) -> FieldElement {
    x + FieldElement::ONE
}

/// Applies mutation `m` (1-based). Returns false if it does not apply.
pub fn mutate(m: usize, sc: &Scenario, stmt: &mut Statement, w: &mut Witness, rng: &mut impl Rng) -> bool {
    let slot = rng.gen_range(0..w.attrs.len());
    match m {
        1 => w.attrs[slot].value = bump(w.attrs[slot].value),
        2 => w.attrs[slot].value = FieldElement::random(rng),
        3 => {
            let s = &mut w.attrs[slot].proof.siblings;
            let i = rng.gen_range(0..s.len());
            s[i] = bump(s[i]);
        }
        4 => w.attrs[slot].proof.index ^= 1,
        5 => w.attrs[slot].idx += 1,
        6 => w.c_a = Commitment(FieldElement::random(rng)),
        7 => w.sig.s = bump(w.sig.s),
        8 => {
            w.sig.rx = w.issuer.pk.x;
            w.sig.ry = w.issuer.pk.y;
        }
        9 => {
            let others: Vec<_> = sc.issuers.iter().map(|i| i.public.pk).filter(|pk| *pk != w.issuer.pk).collect();
            w.issuer.pk = *others.choose(rng).unwrap();
        }
        10 => w.issuer.pk.x = bump(w.issuer.pk.x),
        11 => w.issuer.c_r = Commitment(FieldElement::random(rng)),
        12 => {
            let s = &mut w.issuer.proof.siblings;
            let i = rng.gen_range(0..s.len());
            s[i] = bump(s[i]);
        }
        13 => w.issuer.proof.index ^= 1 << rng.gen_range(0..w.issuer.proof.siblings.len()),
        14 => std::mem::swap(&mut w.gap.h_l, &mut w.gap.h_r),
        15 => {
            let s = &mut w.gap.right.siblings;
            let i = rng.gen_range(0..s.len());
            s[i] = bump(s[i]);
        }
        16 => match w.list_gaps.first_mut() {
            Some(g) => g.h_r = g.h_l,
            None => return false,
        },
        17 => stmt.c = Commitment(FieldElement::random(rng)),
        18 => stmt.ctx.push(rng.gen()),
        19 => match reshape_constants(&stmt.predicate, rng) {
            Some(p) => stmt.predicate = p,
            None => return false,
        },
        20 => {
            w.attrs.pop();
        }
        21 => {
            w.gap.left.siblings.pop();
        }
        22 => w.list_gaps.clear(),
        _ => return false,
    }
    true
}

/// Same clause shapes with fresh constants.
fn reshape_constants(phi: &Predicate, rng: &mut impl Rng) -> Option<Predicate> {
    let clauses = phi
        .clauses()
        .iter()
        .map(|c| match c {
            Clause::Compare { idx, op, bits, .. } => {
                let constant = if op.is_ordering() {
                    let max = if *bits >= 128 { u128::MAX } else { (1u128 << bits) - 1 };
                    FieldElement::from_u128(rng.gen_range(0..=max))
                } else {
                    FieldElement::from_u64(rng.gen_range(0..4))
                };
                Clause::Compare { idx: *idx, op: *op, constant, bits: *bits }
            }
            Clause::MemberOf { idx, set } => {
                let mut s = set.clone();
                let i = rng.gen_range(0..s.len());
                s[i] = FieldElement::random(rng);
                Clause::MemberOf { idx: *idx, set: s }
            }
            Clause::NotInSortedList { idx, list } => {
                let entries = (0..list.values().len()).map(|_| FieldElement::from_u64(rng.gen_range(0..300))).collect();
                Clause::NotInSortedList { idx: *idx, list: SortedList::new(entries).unwrap() }
            }
        })
        .collect();
    Predicate::new(clauses).ok()
}

/// Compares `relation_check` with the laid-out circuit on honest and
/// mutated instances. Every fourth instance is honest; the rest cycle
/// through the mutations.
pub fn relation_equivalence(pp: &SystemParams, u: &AttributeUniverse, n: usize, seed: u64) -> Equivalence {
    let mut out = Equivalence::default();
    let mut plans: HashMap<Vec<u8>, usize> = HashMap::new();
    for k in 0..n {
        let mut rng = rng_for(seed, k as u64);
        let sc = random_scenario(pp, u, &mut rng);
        let view = sc.view(pp);
        let mut stmt = statement(&sc.phi, &sc.ctx, &view);
        let mut w = witness_assemble(pp, &sc.cred, &sc.phi, &view).unwrap();
        let desc = RelationDescription::new(&sc.phi, pp.dims);
        let mut m = if k % 4 == 0 { 0 } else { 1 + (k - k / 4 - 1) % MUTATIONS };
        if m > 0 {
            while !mutate(m, &sc, &mut stmt, &mut w, &mut rng) {
                m = 1 + m % MUTATIONS;
            }
            if pred_shape_id(&stmt.predicate, &pp.dims) != desc.shape_id {
                out.skipped += 1;
                continue;
            }
            out.mutated += 1;
        } else {
            out.honest += 1;
        }
        let lookup_bits = *plans.entry(desc.shape_id.clone()).or_insert_with(|| plan(&desc).0.lookup_bits);
        let rel = relation_check(&pp.dims, &stmt, &w);
        let public = stmt.public_inputs();
        let circ = catch_unwind(AssertUnwindSafe(|| circuit_accepts(&desc, &public, &w, lookup_bits)));
        let circ_ok = matches!(circ, Ok(true));
        if !rel {
            out.rejected += usize::from(!circ_ok);
        }
        out.report.check(rel == circ_ok && circ.is_ok(), || {
            format!("instance {k} mutation {m}: relation {rel}, circuit {circ:?} ({})", stmt.predicate)
        });
        if m == 0 {
            out.report.check(rel, || format!("instance {k}: honest witness rejected"));
        }
    }
    out
}

fn vc_tampers<L: irac::vc::LeafEncoder>(
    pp: &VcParams<L>,
    a: &[L::Elem],
    alt: impl Fn(&L::Elem) -> L::Elem,
    r: &mut Report,
    tampers: &mut usize,
    rng: &mut impl Rng,
) {
    let c = pp.commit(a).unwrap();
    let n = pp.n();
    for i in 0..a.len() {
        let y = &a[i];
        let proof = pp.open(a, i).unwrap();
        r.check(pp.verify(&c, i, y, &proof), || format!("n={n}: honest opening {i} rejected"));
        let mut bad = Vec::new();
        bad.push((i, alt(y), proof.clone()));
        let j = (i + 1 + rng.gen_range(0..n - 1)) % n;
        bad.push((j, y.clone(), proof.clone()));
        let mut p = proof.clone();
        p.index = j as u64;
        bad.push((j, y.clone(), p));
        let mut p = proof.clone();
        p.siblings.pop();
        bad.push((i, y.clone(), p));
        let mut p = proof.clone();
        p.siblings.push(FieldElement::ZERO);
        bad.push((i, y.clone(), p));
        let mut p = proof.clone();
        let s = rng.gen_range(0..p.siblings.len());
        p.siblings[s] = bump(p.siblings[s]);
        bad.push((i, y.clone(), p));
        for (k, (at, v, p)) in bad.into_iter().enumerate() {
            *tampers += 1;
            r.check(!pp.verify(&c, at, &v, &p), || format!("n={n}: tamper {k} at {i} accepted"));
        }
        *tampers += 1;
        r.check(!pp.verify(&Commitment(bump(c.0)), i, y, &proof), || format!("n={n}: wrong commitment accepted"));
    }
}

/// Opening correctness at every position for n in {2, 4, 8, 16} and a
/// sweep of value, index, path and commitment tampers.
pub fn vc_properties(seed: u64) -> (Report, usize) {
    let mut r = Report::default();
    let mut tampers = 0;
    let mut rng = rng_for(seed, 0);
    for n in [2usize, 4, 8, 16] {
        let raw: VcParams<RawLeaves> = vc_setup(n).unwrap();
        let attr: VcParams<AttrLeaves> = vc_setup(n).unwrap();
        for len in 1..=n {
            for _ in 0..4 {
                let a: Vec<FieldElement> = (0..len).map(|_| FieldElement::random(&mut rng)).collect();
                vc_tampers(&raw, &a, |y| bump(*y), &mut r, &mut tampers, &mut rng);
                let b: Vec<(FieldElement, FieldElement)> =
                    (0..len).map(|i| (FieldElement::from_u64(i as u64 + 1), FieldElement::random(&mut rng))).collect();
                vc_tampers(&attr, &b, |y| (y.0, bump(y.1)), &mut r, &mut tampers, &mut rng);
            }
        }
    }
    (r, tampers)
}

fn universe_of(n: usize) -> AttributeUniverse {
    let mut attrs = toy_attributes();
    for k in attrs.len()..n {
        attrs.push(AttributeId { name: format!("extra{k}"), kind: AttrKind::Numeric { bits: 8 } });
    }
    add_attributes(&AttributeUniverse::default(), &attrs).unwrap()
}

/// Tokens from issuers with 1, 3 and `n_a` attributes under one statement.
/// Returns the token lengths per issuer.
pub fn issuer_uniformity(pp: &SystemParams, seed: u64) -> (Report, Vec<usize>) {
    let mut r = Report::default();
    let mut rng = rng_for(seed, 0);
    let n_a = pp.dims.n_a;
    let u = universe_of(n_a);
    let mut full: Vec<u32> = (1..=n_a as u32).collect();
    full.shuffle(&mut rng);
    let schemas = [vec![1], vec![3, 1, 2], full];
    let issuers: Vec<IssuerState> = schemas.iter().map(|s| issuer_setup(pp, &u, s, &mut rng).unwrap()).collect();
    let publics: Vec<_> = issuers.iter().map(|i| i.public.clone()).collect();
    let view = IssuerSetView::new(pp, &publics).unwrap();
    let phi = parse_simple("#1:8 >= 18").unwrap();
    let ctx = b"uniformity";
    let mut lens = Vec::new();
    for st in &issuers {
        let values: Vec<_> = st
            .public
            .attrs
            .iter()
            .map(|&i| if i == 1 { FieldElement::from_u64(rng.gen_range(18..=255)) } else { random_value(&u, i, &mut rng) })
            .collect();
        let cred = issue_cred(pp, &u, st, &values, &mut rng).unwrap();
        let pt = present_cred(pp, &cred, &phi, ctx, &view, &mut rng).unwrap();
        r.check(verify_presentation(pp, &pt, &phi, ctx, &view), || format!("|A|={}: rejected", st.public.attrs.len()));
        lens.push(pt.to_bytes().len());
    }
    r.check(lens.windows(2).all(|w| w[0] == w[1]), || format!("lengths differ: {lens:?}"));
    (r, lens)
}

fn adult_values(g: &mut GameState, u: &AttributeUniverse, i: usize) -> Vec<FieldElement> {
    let attrs = g.issuers[i].public.attrs.clone();
    attrs
        .iter()
        .map(|&a| if a == 1 { FieldElement::from_u64(g.rng().gen_range(18..=99)) } else { random_value(u, a, g.rng()) })
        .collect()
}

/// Scripted forgery attempts against one game. Every attempt must be
/// rejected.
pub fn unforgeability_suite(fix: &Fixture, seed: u64) -> Report {
    let mut r = Report::default();
    let mut g = GameState::new(&fix.kzg, fix.u.clone(), seed);
    g.init_issuers(&[vec![1, 3, 2], vec![4, 1], vec![2, 1, 5, 6], vec![1]]).unwrap();
    let is = [0, 1, 2, 3];
    let u = fix.u.clone();
    for i in 0..3 {
        let v = adult_values(&mut g, &u, i);
        g.issue(i, 0, &v).unwrap();
    }
    let minor = vec![FieldElement::from_u64(g.rng().gen_range(0..18))];
    g.issue(3, 0, &minor).unwrap();
    let phi = parse_simple("#1:8 >= 18").unwrap();
    let ctx: Vec<u8> = (0..16).map(|_| g.rng().gen()).collect();
    let pt = g.present(0, 0, &phi, &ctx, &is).unwrap();
    r.check(g.judge(&pt, &phi, &ctx, &is).accepted, || format!("seed {seed}: honest token rejected"));

    // (a) replay under a fresh context
    let fresh = other_contexts(&ctx, g.rng()).pop().unwrap();
    let out = g.judge(&pt, &phi, &fresh, &is);
    r.check(!out.accepted && !out.win_by_indices && !out.win_by_state, || format!("seed {seed}: (a) replay accepted"));

    // (c) single bit flips anywhere in the token
    let bytes = pt.to_bytes();
    for t in 0..100 {
        let mut b = bytes.clone();
        let pos = g.rng().gen_range(0..b.len());
        b[pos] ^= 1 << g.rng().gen_range(0..8);
        let accepted = match PresentationToken::decode(&b) {
            Ok(bad) => g.judge(&bad, &phi, &ctx, &is).accepted,
            Err(_) => false,
        };
        r.check(!accepted, || format!("seed {seed}: (c) flip {t} at byte {pos} accepted"));
    }

    // (b) replay after revocation, against the refreshed set
    g.revoke(0, 0).unwrap();
    let out = g.judge(&pt, &phi, &ctx, &is);
    r.check(!out.accepted && !out.win_by_state, || format!("seed {seed}: (b) revoked token accepted"));

    // (d) credential from a key outside the committed set
    let adv = issuer_setup(&fix.kzg, &u, &[1], g.rng()).unwrap();
    let forged = issue_cred(&fix.kzg, &u, &adv, &[FieldElement::from_u64(40)], g.rng()).unwrap();
    let honest_view = g.view(&is).unwrap();
    let ctx_d: Vec<u8> = (0..16).map(|_| g.rng().gen()).collect();
    let res = present_cred(&fix.kzg, &forged, &phi, &ctx_d, &honest_view, g.rng());
    r.check(matches!(res, Err(IracError::IssuerNotInSet)), || format!("seed {seed}: (d) assembled outside the set"));
    let mut widened = g.publics(&is).unwrap();
    widened.push(adv.public.clone());
    let wide_view = IssuerSetView::new(&fix.kzg, &widened).unwrap();
    let pt_d = present_cred(&fix.kzg, &forged, &phi, &ctx_d, &wide_view, g.rng()).unwrap();
    let out = g.judge(&pt_d, &phi, &ctx_d, &is);
    r.check(!out.accepted, || format!("seed {seed}: (d) proof over a widened set accepted"));

    // the same through the transparent backend, with a hand-built witness
    let t = &fix.test;
    let t_honest = IssuerSetView::new(t, &g.publics(&is).unwrap()).unwrap();
    let t_wide = IssuerSetView::new(t, &widened).unwrap();
    let stmt = statement(&phi, &ctx_d, &t_honest);
    let shape = RelationDescription::new(&phi, t.dims).shape_id;
    let crafted = |w: &Witness| PresentationToken { shape_id: shape.clone(), proof: transparent_proof(&stmt, w) };
    let w_wide = witness_assemble(t, &forged, &phi, &t_wide).unwrap();
    r.check(!verify_presentation(t, &crafted(&w_wide), &phi, &ctx_d, &t_honest), || {
        format!("seed {seed}: (d) widened witness accepted")
    });
    // own signature under a committed issuer's opening
    let minor_cred = g.reveal(3, 0).unwrap();
    let w_minor = witness_assemble(t, &minor_cred, &parse_simple("#1:8 >= 0").unwrap(), &t_honest).unwrap();
    let mut w_sig = w_wide.clone();
    w_sig.issuer = w_minor.issuer.clone();
    w_sig.gap = w_minor.gap.clone();
    r.check(!verify_presentation(t, &crafted(&w_sig), &phi, &ctx_d, &t_honest), || {
        format!("seed {seed}: (d) foreign signature accepted")
    });

    // (e) a credential that fails the predicate
    let res = present_cred(&fix.kzg, &minor_cred, &phi, &ctx_d, &honest_view, g.rng());
    r.check(matches!(res, Err(IracError::PredicateNotSatisfied)), || format!("seed {seed}: (e) assembled: {res:?}"));
    r.check(!verify_presentation(t, &crafted(&w_minor), &phi, &ctx_d, &t_honest), || {
        format!("seed {seed}: (e) witness for a weaker predicate accepted")
    });
    let mut w_lie = w_minor.clone();
    w_lie.attrs[0].value = FieldElement::from_u64(40);
    r.check(!verify_presentation(t, &crafted(&w_lie), &phi, &ctx_d, &t_honest), || {
        format!("seed {seed}: (e) altered attribute accepted")
    });
    r
}

/// A token with the statement it was made for.
pub struct Presented {
    pub pt: PresentationToken,
    pub phi: Predicate,
    pub ctx: Vec<u8>,
    pub view: IssuerSetView,
}

/// Presents two credentials from different issuers of one hiding set under
/// the same statement and checks the structural surface of both tokens.
pub fn unlinkability_suite(fix: &Fixture, seed: u64) -> (Report, Vec<Presented>) {
    let pp = &fix.kzg;
    let u = &fix.u;
    let mut r = Report::default();
    let mut rng = rng_for(seed, 1);
    let schemas = [vec![1, 2], vec![3, 1, 5, 6, 4], vec![6, 1]];
    let mut issuers: Vec<IssuerState> = schemas.iter().map(|s| issuer_setup(pp, u, s, &mut rng).unwrap()).collect();
    let mut creds = Vec::new();
    for (l, st) in issuers.iter_mut().take(2).enumerate() {
        let values: Vec<_> = st
            .public
            .attrs
            .iter()
            .map(|&i| if i == 1 { FieldElement::from_u64(rng.gen_range(18..=90)) } else { random_value(u, i, &mut rng) })
            .collect();
        creds.push(issue_cred(pp, u, st, &values, &mut rng).unwrap());
        // someone else's credential was revoked earlier
        for _ in 0..=l {
            let decoy = issue_cred(pp, u, st, &values, &mut rng).unwrap();
            *st = revoke(pp, st, &decoy).unwrap();
        }
    }
    let publics: Vec<_> = issuers.iter().map(|i| i.public.clone()).collect();
    let view = IssuerSetView::new(pp, &publics).unwrap();
    let banned: Vec<u64> = (0..3).map(|_| rng.gen_range(91..=255)).collect();
    let src = format!("#1:8 >= 18 and #1 not in [{}]", banned.iter().map(u64::to_string).collect::<Vec<_>>().join(", "));
    let phi = parse_simple(&src).unwrap();
    let ctx: Vec<u8> = (0..32).map(|_| rng.gen()).collect();
    let mut secrets: Vec<Vec<u8>> = Vec::new();
    for c in &creds {
        r.check(verify_cred(pp, c, &c.issuer, &c.attrs), || format!("seed {seed}: credential invalid"));
        secrets.extend(c.values.iter().map(Encode::encode));
        secrets.push(c.issuer.encode());
        secrets.push(c.c_a.encode());
        secrets.push(c.sig.encode());
        secrets.push(credential_hash(c).encode());
    }
    let mut out = Vec::new();
    for (b, c) in creds.iter().enumerate() {
        let pt = present_cred(pp, c, &phi, &ctx, &view, &mut rng).unwrap();
        r.check(verify_presentation(pp, &pt, &phi, &ctx, &view), || format!("seed {seed}: token {b} rejected"));
        let bytes = pt.to_bytes();
        for s in &secrets {
            r.check(!bytes.windows(s.len()).any(|w| w == s.as_slice()), || format!("seed {seed}: token {b} contains {s:02x?}"));
        }
        out.push(Presented { pt, phi: phi.clone(), ctx: ctx.clone(), view: view.clone() });
    }
    let (a, b) = (out[0].pt.to_bytes(), out[1].pt.to_bytes());
    r.check(a.len() == b.len(), || format!("seed {seed}: lengths {} and {}", a.len(), b.len()));
    r.check(a != b, || format!("seed {seed}: identical tokens"));
    (r, out)
}

/// Context binding over already-made tokens.
pub fn ctx_binding(pp: &SystemParams, tokens: &[Presented], seed: u64) -> Report {
    let mut r = Report::default();
    let mut rng = rng_for(seed, 2);
    for (k, t) in tokens.iter().enumerate() {
        r.check(verify_presentation(pp, &t.pt, &t.phi, &t.ctx, &t.view), || format!("token {k}: rejected under its own ctx"));
        for alt in other_contexts(&t.ctx, &mut rng) {
            r.check(!verify_presentation(pp, &t.pt, &t.phi, &alt, &t.view), || format!("token {k}: accepted under {alt:02x?}"));
        }
    }
    r
}

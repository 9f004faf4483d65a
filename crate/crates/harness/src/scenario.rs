//! Random presentation scenarios at toy sizes.

use irac::predicate::{CmpOp, Clause, Predicate, SortedList, DEFAULT_BITS};
use irac::protocol::*;
use irac::FieldElement;
use rand::seq::SliceRandom;
use rand::Rng;

/// Attributes used by generated scenarios: mixed widths and categorical
/// fields.
pub fn toy_attributes() -> Vec<AttributeId> {
    let num = |name: &str, bits| AttributeId { name: name.into(), kind: AttrKind::Numeric { bits } };
    let cat = |name: &str| AttributeId { name: name.into(), kind: AttrKind::Categorical };
    vec![num("age", 8), cat("country"), num("score", 16), num("balance", 64), cat("role"), num("zip", 32)]
}

pub fn toy_universe() -> AttributeUniverse {
    add_attributes(&AttributeUniverse::default(), &toy_attributes()).unwrap()
}

/// One holder, one credential and a predicate it satisfies, among 2 to 4
/// issuers that all cover the predicate.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub issuers: Vec<IssuerState>,
    /// Issuer of `cred` within `issuers`.
    pub holder_issuer: usize,
    pub cred: Credential,
    pub phi: Predicate,
    pub ctx: Vec<u8>,
}

impl Scenario {
    pub fn publics(&self) -> Vec<IssuerPublic> {
        self.issuers.iter().map(|i| i.public.clone()).collect()
    }

    pub fn view(&self, pp: &SystemParams) -> IssuerSetView {
        IssuerSetView::new(pp, &self.publics()).expect("generated issuers are valid")
    }

    /// Revokes the holder's credential at its issuer.
    pub fn revoke_holder(&mut self, pp: &SystemParams) -> Result<(), IracError> {
        let j = self.holder_issuer;
        self.issuers[j] = revoke(pp, &self.issuers[j], &self.cred)?;
        Ok(())
    }
}

pub fn random_value(u: &AttributeUniverse, idx: u32, rng: &mut impl Rng) -> FieldElement {
    match u.get(idx).unwrap().kind {
        AttrKind::Numeric { bits } => random_bits(bits, rng),
        AttrKind::Categorical => FieldElement::random(rng),
    }
}

fn max_of(bits: u8) -> u128 {
    if bits >= 128 {
        u128::MAX
    } else {
        (1u128 << bits) - 1
    }
}

fn random_bits(bits: u8, rng: &mut impl Rng) -> FieldElement {
    // bias towards the edges of the range
    let max = max_of(bits);
    let v = match rng.gen_range(0..6) {
        0 => 0,
        1 => max,
        2 => rng.gen_range(0..=max.min(3)),
        _ => rng.gen_range(0..=max),
    };
    FieldElement::from_u128(v)
}

fn ordering_constant(op: CmpOp, v: u128, max: u128, rng: &mut impl Rng) -> Option<u128> {
    match op {
        CmpOp::Lt if v < max => Some(rng.gen_range(v + 1..=max)),
        CmpOp::Le => Some(rng.gen_range(v..=max)),
        CmpOp::Gt if v > 0 => Some(rng.gen_range(0..v)),
        CmpOp::Ge => Some(rng.gen_range(0..=v)),
        _ => None,
    }
}

fn other_than(v: FieldElement, rng: &mut impl Rng) -> FieldElement {
    loop {
        let w = if rng.gen_bool(0.5) { FieldElement::from_u64(rng.gen_range(0..300)) } else { FieldElement::random(rng) };
        if w != v {
            return w;
        }
    }
}

/// A random clause on attribute `idx` that holds for value `v`.
pub fn satisfied_clause(u: &AttributeUniverse, idx: u32, v: FieldElement, rng: &mut impl Rng) -> Clause {
    let numeric = match u.get(idx).unwrap().kind {
        AttrKind::Numeric { bits } => Some(bits),
        AttrKind::Categorical => None,
    };
    loop {
        let c = match (rng.gen_range(0..5), numeric) {
            (0, Some(bits)) => {
                let op = *[CmpOp::Lt, CmpOp::Le, CmpOp::Ge, CmpOp::Gt].choose(rng).unwrap();
                let vv = v.to_biguint().try_into().unwrap_or(u128::MAX);
                match ordering_constant(op, vv, max_of(bits), rng) {
                    Some(k) => Clause::Compare { idx, op, constant: FieldElement::from_u128(k), bits },
                    None => continue,
                }
            }
            (0, None) | (1, _) => {
                let bits = numeric.unwrap_or(DEFAULT_BITS);
                if rng.gen_bool(0.5) {
                    Clause::Compare { idx, op: CmpOp::Eq, constant: v, bits }
                } else {
                    Clause::Compare { idx, op: CmpOp::Ne, constant: other_than(v, rng), bits }
                }
            }
            (2, _) => {
                let mut set: Vec<_> = (0..rng.gen_range(0..5)).map(|_| other_than(v, rng)).collect();
                set.push(v);
                Clause::MemberOf { idx, set }
            }
            _ => {
                let entries = (0..rng.gen_range(0..=6)).map(|_| other_than(v, rng)).collect();
                match SortedList::new(entries) {
                    Ok(list) => Clause::NotInSortedList { idx, list },
                    Err(_) => continue,
                }
            }
        };
        if c.holds(v) {
            return c;
        }
    }
}

/// Generates a scenario whose preconditions hold: the holder's issuer is in
/// the set, every issuer covers the predicate, and the credential satisfies
/// the predicate and is unrevoked.
pub fn random_scenario(pp: &SystemParams, u: &AttributeUniverse, rng: &mut impl Rng) -> Scenario {
    let all: Vec<u32> = (1..=u.len() as u32).collect();
    let n_clauses = rng.gen_range(1..=3);
    let used: Vec<u32> = (0..n_clauses).map(|_| *all.choose(rng).unwrap()).collect();
    let n_issuers = rng.gen_range(2..=4);
    let mut issuers = Vec::new();
    for _ in 0..n_issuers {
        let mut schema: Vec<u32> = all.iter().copied().filter(|i| used.contains(i) || rng.gen_bool(0.4)).collect();
        schema.shuffle(rng);
        schema.truncate(pp.dims.n_a);
        let mut st = issuer_setup(pp, u, &schema, rng).unwrap();
        // earlier, unrelated revocations
        for _ in 0..rng.gen_range(0..=3) {
            let vals: Vec<_> = schema.iter().map(|&i| random_value(u, i, rng)).collect();
            let decoy = issue_cred(pp, u, &st, &vals, rng).unwrap();
            st = revoke(pp, &st, &decoy).unwrap();
        }
        issuers.push(st);
    }
    let holder_issuer = rng.gen_range(0..n_issuers);
    let schema = issuers[holder_issuer].public.attrs.clone();
    let values: Vec<_> = schema.iter().map(|&i| random_value(u, i, rng)).collect();
    let cred = issue_cred(pp, u, &issuers[holder_issuer], &values, rng).unwrap();
    let value_of = |idx: u32| values[schema.iter().position(|&a| a == idx).unwrap()];
    let clauses = used.iter().map(|&idx| satisfied_clause(u, idx, value_of(idx), rng)).collect();
    let phi = Predicate::new(clauses).unwrap();
    let ctx_len = rng.gen_range(0..=40);
    let ctx = (0..ctx_len).map(|_| rng.gen()).collect();
    Scenario { issuers, holder_issuer, cred, phi, ctx }
}

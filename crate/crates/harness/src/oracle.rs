//! Oracles of the security experiments over a shared game state.

use std::collections::BTreeMap;

use irac::predicate::{pred_eval, Predicate};
use irac::protocol::*;
use irac::vc::Commitment;
use irac::FieldElement;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("no issuer {0}")]
    NoIssuer(usize),
    #[error("no credential ({0}, {1})")]
    NoCredential(usize, usize),
    #[error("credential ({0}, {1}) already issued")]
    AlreadyIssued(usize, usize),
    #[error(transparent)]
    Protocol(#[from] IracError),
}

/// A logged presentation query. `c` is the issuer-set commitment at query
/// time, which pins the revocation state of every issuer in `is`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentQuery {
    pub i: usize,
    pub j: usize,
    pub phi: Predicate,
    pub ctx: Vec<u8>,
    pub is: Vec<usize>,
    pub c: Commitment,
}

/// Judgement of a forgery attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub accepted: bool,
    /// Win with `Q_Present` keyed by `(phi, ctx, IS)` as index sets.
    pub win_by_indices: bool,
    /// Win with `Q_Present` keyed by `(phi, ctx, IS)` at the exact issuer
    /// state of the query, so a replay across a revocation counts.
    pub win_by_state: bool,
}

/// Issuers, credentials and the append-only query logs.
pub struct GameState<'a> {
    pub pp: &'a SystemParams,
    pub u: AttributeUniverse,
    pub issuers: Vec<IssuerState>,
    creds: BTreeMap<(usize, usize), Credential>,
    pub q_issue: Vec<(usize, usize, Vec<FieldElement>)>,
    pub q_present: Vec<PresentQuery>,
    pub q_reveal: Vec<(usize, usize)>,
    pub q_revoke: Vec<(usize, usize)>,
    pub seed: u64,
    rng: ChaCha20Rng,
}

impl<'a> GameState<'a> {
    pub fn new(pp: &'a SystemParams, u: AttributeUniverse, seed: u64) -> Self {
        GameState {
            pp,
            u,
            issuers: Vec::new(),
            creds: BTreeMap::new(),
            q_issue: Vec::new(),
            q_present: Vec::new(),
            q_reveal: Vec::new(),
            q_revoke: Vec::new(),
            seed,
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }

    /// O_Add.
    pub fn add(&mut self, attrs: &[AttributeId]) -> Result<(), OracleError> {
        self.u = add_attributes(&self.u, attrs)?;
        Ok(())
    }

    /// Runs issuer setup once per schema.
    pub fn init_issuers(&mut self, schemas: &[Vec<u32>]) -> Result<(), OracleError> {
        for s in schemas {
            let st = issuer_setup(self.pp, &self.u, s, &mut self.rng)?;
            self.issuers.push(st);
        }
        Ok(())
    }

    fn issuer(&self, i: usize) -> Result<&IssuerState, OracleError> {
        self.issuers.get(i).ok_or(OracleError::NoIssuer(i))
    }

    fn cred(&self, i: usize, j: usize) -> Result<&Credential, OracleError> {
        self.creds.get(&(i, j)).ok_or(OracleError::NoCredential(i, j))
    }

    /// O_Issue.
    pub fn issue(&mut self, i: usize, j: usize, values: &[FieldElement]) -> Result<(), OracleError> {
        if self.creds.contains_key(&(i, j)) {
            return Err(OracleError::AlreadyIssued(i, j));
        }
        let issuer = self.issuer(i)?.clone();
        let c = issue_cred(self.pp, &self.u, &issuer, values, &mut self.rng)?;
        self.creds.insert((i, j), c);
        self.q_issue.push((i, j, values.to_vec()));
        Ok(())
    }

    /// O_Revoke: returns the issuer's updated public data.
    pub fn revoke(&mut self, i: usize, j: usize) -> Result<IssuerPublic, OracleError> {
        let c = self.cred(i, j)?.clone();
        let next = revoke(self.pp, self.issuer(i)?, &c)?;
        self.issuers[i] = next;
        self.q_revoke.push((i, j));
        Ok(self.issuers[i].public.clone())
    }

    /// O_Present.
    pub fn present(
        &mut self,
        i: usize,
        j: usize,
        phi: &Predicate,
        ctx: &[u8],
        is: &[usize],
    ) -> Result<PresentationToken, OracleError> {
        let c = self.cred(i, j)?.clone();
        let view = self.view(is)?;
        self.q_present.push(PresentQuery { i, j, phi: phi.clone(), ctx: ctx.to_vec(), is: canon(is), c: view.commitment() });
        Ok(present_cred(self.pp, &c, phi, ctx, &view, &mut self.rng)?)
    }

    /// O_Reveal.
    pub fn reveal(&mut self, i: usize, j: usize) -> Result<Credential, OracleError> {
        let c = self.cred(i, j)?.clone();
        self.q_reveal.push((i, j));
        Ok(c)
    }

    /// Current public data of the issuers in `is`.
    pub fn publics(&self, is: &[usize]) -> Result<Vec<IssuerPublic>, OracleError> {
        is.iter().map(|&i| Ok(self.issuer(i)?.public.clone())).collect()
    }

    pub fn view(&self, is: &[usize]) -> Result<IssuerSetView, OracleError> {
        Ok(IssuerSetView::new(self.pp, &self.publics(is)?)?)
    }

    /// Checks a forgery `(pt, phi, ctx, IS)` against the current state.
    pub fn judge(&self, pt: &PresentationToken, phi: &Predicate, ctx: &[u8], is: &[usize]) -> Outcome {
        let Ok(view) = self.view(is) else {
            return Outcome { accepted: false, win_by_indices: false, win_by_state: false };
        };
        let accepted = verify_presentation(self.pp, pt, phi, ctx, &view);
        let is = canon(is);
        let in_range = is.iter().all(|&i| i < self.issuers.len());
        let same = |q: &&PresentQuery| q.phi == *phi && q.ctx == ctx && q.is == is;
        let logged_by_indices = self.q_present.iter().any(|q| same(&q));
        let logged_by_state = self.q_present.iter().filter(same).any(|q| q.c == view.commitment());
        let trivial = self.q_reveal.iter().any(|&(i, j)| {
            let c = &self.creds[&(i, j)];
            let assignment: BTreeMap<u32, FieldElement> = c.attrs.iter().copied().zip(c.values.iter().copied()).collect();
            pred_eval(phi, &assignment) == Ok(true) && !self.q_revoke.contains(&(i, j))
        });
        let base = accepted && in_range && !trivial;
        Outcome { accepted, win_by_indices: base && !logged_by_indices, win_by_state: base && !logged_by_state }
    }
}

fn canon(is: &[usize]) -> Vec<usize> {
    let mut v = is.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

use std::path::{Path, PathBuf};

use irac::encoding::{Decode, Encode};
use irac::predicate::{label_value, parse_predicate, Predicate};
use irac::protocol::*;
use irac::zk::Backend;
use irac::FieldElement;
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::envelope::{self, Kind};
use crate::error::{CliError, REJECT};
use crate::store::{load, lock, read_text, save};
use crate::{BackendArg, Session, SetupArgs};

pub const KEY_FILE: &str = "issuer.key";
pub const BUNDLE_FILE: &str = "bundle.irac";
pub const WALLET_FILE: &str = "wallet.irac";
pub const TEST_MODE_VAR: &str = "IRAC_TEST_MODE";

pub struct Env {
    params: PathBuf,
    universe: PathBuf,
    state_dir: PathBuf,
    seed: Option<u64>,
}

impl Env {
    pub fn new(params: PathBuf, universe: Option<PathBuf>, state_dir: PathBuf, seed: Option<u64>) -> Self {
        let universe = universe.unwrap_or_else(|| params.with_file_name("universe.irac"));
        Env { params, universe, state_dir, seed }
    }

    fn rng(&self) -> ChaCha20Rng {
        match self.seed {
            Some(s) => ChaCha20Rng::seed_from_u64(s),
            None => ChaCha20Rng::from_entropy(),
        }
    }

    fn pp(&self) -> Result<SystemParams, CliError> {
        let text = read_text(&self.params)?;
        let envelope_err = |source| CliError::Envelope { path: self.params.clone(), source };
        let (dims, payload) = envelope::read(&text, Kind::Params).map_err(envelope_err)?;
        let pp = SystemParams::decode(&payload).map_err(|source| CliError::Decode { path: self.params.clone(), source })?;
        if pp.dims != dims {
            return Err(envelope_err(envelope::EnvelopeError::Shape { expected: pp.dims, found: dims }));
        }
        Ok(pp)
    }

    fn universe(&self, pp: &SystemParams) -> Result<AttributeUniverse, CliError> {
        load(&self.universe, Kind::Universe, pp.dims)
    }

    fn state(&self, file: &str) -> PathBuf {
        self.state_dir.join(file)
    }
}

fn test_mode() -> bool {
    std::env::var(TEST_MODE_VAR).is_ok_and(|v| v == "1")
}

/// Refuses a non-zero-knowledge backend outside test mode.
fn guard(backend: Backend, expected: Option<BackendArg>) -> Result<(), CliError> {
    let actual = match backend {
        Backend::Kzg => BackendArg::Prod,
        Backend::Transparent => BackendArg::Test,
    };
    if expected == Some(BackendArg::Test) || actual == BackendArg::Test {
        if !test_mode() {
            return Err(CliError::TestBackend);
        }
    }
    match expected {
        Some(e) if e != actual => Err(CliError::BackendMismatch(if actual == BackendArg::Prod { "prod" } else { "test" })),
        _ => Ok(()),
    }
}

pub fn setup(env: &Env, a: &SetupArgs) -> Result<u8, CliError> {
    let backend = match a.backend {
        BackendArg::Prod => Backend::Kzg,
        BackendArg::Test => Backend::Transparent,
    };
    guard(backend, None)?;
    for p in [&env.params, &env.universe] {
        if p.exists() && !a.force {
            return Err(CliError::Exists(p.clone()));
        }
    }
    let seed = env.seed.unwrap_or_else(rand::random);
    let (pp, u) = setup_with(a.n_a, a.n_r, a.n_i, backend, a.max_constraints, seed).map_err(|e| match e {
        IracError::Zk(irac::zk::ZkError::BadCapacity) => CliError::Usage(e.to_string()),
        e => e.into(),
    })?;
    save(&env.params, Kind::Params, pp.dims, &pp)?;
    save(&env.universe, Kind::Universe, pp.dims, &u)?;
    Ok(0)
}

fn parse_attr_spec(spec: &str) -> Result<AttributeId, CliError> {
    let bad = || CliError::Usage(format!("attribute {spec:?} is not name:numBITS or name:cat"));
    let (name, kind) = spec.rsplit_once(':').ok_or_else(bad)?;
    if name.is_empty() {
        return Err(bad());
    }
    let kind = match kind {
        "cat" => AttrKind::Categorical,
        k => AttrKind::Numeric { bits: k.strip_prefix("num").and_then(|b| b.parse().ok()).ok_or_else(bad)? },
    };
    Ok(AttributeId { name: name.to_string(), kind })
}

pub fn universe_add(env: &Env, specs: &[String]) -> Result<u8, CliError> {
    let pp = env.pp()?;
    let dir = env.universe.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let _l = lock(dir)?;
    let u = env.universe(&pp)?;
    let new = specs.iter().map(|s| parse_attr_spec(s)).collect::<Result<Vec<_>, _>>()?;
    let u = add_attributes(&u, &new)?;
    save(&env.universe, Kind::Universe, pp.dims, &u)?;
    for (i, a) in u.iter().skip(u.len() - new.len()) {
        println!("#{i} {}", a.name);
    }
    Ok(0)
}

fn resolve_attr(u: &AttributeUniverse, s: &str) -> Result<u32, CliError> {
    let idx = match s.strip_prefix('#') {
        Some(n) => n.parse().map_err(|_| CliError::Usage(format!("bad attribute index {s:?}")))?,
        None => u.index_of(s).ok_or_else(|| CliError::Usage(format!("no attribute named {s:?}")))?,
    };
    u.get(idx).ok_or(IracError::UnknownAttribute(idx))?;
    Ok(idx)
}

pub fn issuer_init(env: &Env, attrs: &[String]) -> Result<u8, CliError> {
    let pp = env.pp()?;
    let u = env.universe(&pp)?;
    let _l = lock(&env.state_dir)?;
    let key = env.state(KEY_FILE);
    if key.exists() {
        return Err(CliError::Exists(key));
    }
    let chosen = attrs.iter().map(|a| resolve_attr(&u, a)).collect::<Result<Vec<_>, _>>()?;
    let st = issuer_setup(&pp, &u, &chosen, &mut env.rng())?;
    save(&key, Kind::IssuerKey, pp.dims, &st)?;
    save(&env.state(BUNDLE_FILE), Kind::Bundle, pp.dims, &st.public)?;
    Ok(0)
}

/// Decimal, `0x` hex, or a quoted label.
pub fn parse_value(s: &str) -> Option<FieldElement> {
    let s = s.trim();
    if let Some(l) = s.strip_prefix('"').and_then(|r| r.strip_suffix('"')) {
        return Some(label_value(l));
    }
    let n = match s.strip_prefix("0x") {
        Some(h) => BigUint::parse_bytes(h.as_bytes(), 16)?,
        None => BigUint::parse_bytes(s.as_bytes(), 10)?,
    };
    FieldElement::from_biguint_exact(&n)
}

pub fn issuer_issue(env: &Env, values: &[String], out: &Path) -> Result<u8, CliError> {
    let pp = env.pp()?;
    let u = env.universe(&pp)?;
    let _l = lock(&env.state_dir)?;
    let st: IssuerState = load(&env.state(KEY_FILE), Kind::IssuerKey, pp.dims)?;
    let mut given = std::collections::BTreeMap::new();
    for v in values {
        let (name, val) = v.split_once('=').ok_or_else(|| CliError::Usage(format!("{v:?} is not name=value")))?;
        let idx = resolve_attr(&u, name)?;
        // categorical values are labels, quoted or not
        let fe = match u.get(idx).map(|a| a.kind) {
            Some(AttrKind::Categorical) => label_value(val.trim_matches('"')),
            _ => parse_value(val).ok_or(IracError::ValueOutOfRange(idx))?,
        };
        if given.insert(idx, fe).is_some() {
            return Err(CliError::Usage(format!("{name} given twice")));
        }
    }
    let mut ordered = Vec::new();
    for &idx in &st.public.attrs {
        ordered.push(given.remove(&idx).ok_or(IracError::AttributeNotCovered(idx))?);
    }
    if let Some((&idx, _)) = given.iter().next() {
        return Err(IracError::UnknownAttribute(idx).into());
    }
    let cred = issue_cred(&pp, &u, &st, &ordered, &mut env.rng())?;
    save(out, Kind::Credential, pp.dims, &cred)?;
    Ok(0)
}

pub fn issuer_revoke(env: &Env, credential: &Path) -> Result<u8, CliError> {
    let pp = env.pp()?;
    let _l = lock(&env.state_dir)?;
    let st: IssuerState = load(&env.state(KEY_FILE), Kind::IssuerKey, pp.dims)?;
    let cred: Credential = load(credential, Kind::Credential, pp.dims)?;
    if cred.issuer != st.public.pk {
        return Err(IracError::IssuerNotInSet.into());
    }
    let next = revoke(&pp, &st, &cred)?;
    save(&env.state(KEY_FILE), Kind::IssuerKey, pp.dims, &next)?;
    save(&env.state(BUNDLE_FILE), Kind::Bundle, pp.dims, &next.public)?;
    println!("{} revoked", next.public.rl.len());
    Ok(0)
}

pub fn issuer_publish(env: &Env, out: &Path) -> Result<u8, CliError> {
    let pp = env.pp()?;
    let _l = lock(&env.state_dir)?;
    let st: IssuerState = load(&env.state(KEY_FILE), Kind::IssuerKey, pp.dims)?;
    let text = envelope::write(Kind::Bundle, pp.dims, &st.public.encode());
    if out == Path::new("-") {
        print!("{text}");
    } else {
        crate::store::write_file(out, text.as_bytes(), false)?;
    }
    Ok(0)
}

pub fn holder_store(env: &Env, credential: &Path, bundle: &Path) -> Result<u8, CliError> {
    let pp = env.pp()?;
    let cred: Credential = load(credential, Kind::Credential, pp.dims)?;
    let b: IssuerPublic = load(bundle, Kind::Bundle, pp.dims)?;
    if !verify_cred(&pp, &cred, &b.pk, &b.attrs) {
        return Err(CliError::InvalidCredential);
    }
    let _l = lock(&env.state_dir)?;
    let path = env.state(WALLET_FILE);
    let mut wallet: Vec<Credential> = if path.exists() { load(&path, Kind::Wallet, pp.dims)? } else { Vec::new() };
    if !wallet.contains(&cred) {
        wallet.push(cred);
    }
    save(&path, Kind::Wallet, pp.dims, &wallet)?;
    println!("{} credentials", wallet.len());
    Ok(0)
}

struct Loaded {
    pp: SystemParams,
    phi: Predicate,
    view: IssuerSetView,
    ctx: Vec<u8>,
}

fn load_session(env: &Env, s: &Session) -> Result<Loaded, CliError> {
    let pp = env.pp()?;
    guard(pp.zk.backend(), s.backend)?;
    let u = env.universe(&pp)?;
    let src = read_text(&s.predicate)?;
    let base = s.predicate.parent().unwrap_or(Path::new(".")).to_path_buf();
    let loader = |p: &str| -> Result<Vec<FieldElement>, String> {
        let text = std::fs::read_to_string(base.join(p)).map_err(|e| format!("{p}: {e}"))?;
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with("//"))
            .map(|l| parse_value(l).ok_or_else(|| format!("{p}: bad value {l:?}")))
            .collect()
    };
    let phi = parse_predicate(&src, &u, loader)?;
    let publics = s
        .issuer_set
        .iter()
        .map(|p| load::<IssuerPublic>(p, Kind::Bundle, pp.dims))
        .collect::<Result<Vec<_>, _>>()?;
    if publics.len() == 1 {
        eprintln!("warning: the issuer set has a single issuer, so the presentation reveals it");
    }
    let view = IssuerSetView::new(&pp, &publics)?;
    view.covers(&phi)?;
    let ctx = hex::decode(s.ctx.trim()).map_err(|_| CliError::Usage("--ctx is not hex".into()))?;
    Ok(Loaded { pp, phi, view, ctx })
}

pub fn holder_present(env: &Env, s: &Session, out: &Path) -> Result<u8, CliError> {
    let Loaded { pp, phi, view, ctx } = load_session(env, s)?;
    let path = env.state(WALLET_FILE);
    let wallet: Vec<Credential> = if path.exists() { load(&path, Kind::Wallet, pp.dims)? } else { Vec::new() };
    if wallet.is_empty() {
        return Err(CliError::EmptyWallet);
    }
    // The first credential that can prove wins; otherwise report why the
    // first credential from a listed issuer cannot.
    let mut first_err = None;
    for c in &wallet {
        match witness_assemble(&pp, c, &phi, &view) {
            Ok(_) => {
                let pt = present_cred(&pp, c, &phi, &ctx, &view, &mut env.rng())?;
                save(out, Kind::Token, pp.dims, &pt)?;
                return Ok(0);
            }
            Err(IracError::IssuerNotInSet) => {}
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.unwrap_or(IracError::IssuerNotInSet).into())
}

pub fn verifier_verify(env: &Env, s: &Session, token: &Path) -> Result<u8, CliError> {
    let Loaded { pp, phi, view, ctx } = load_session(env, s)?;
    let pt: PresentationToken = load(token, Kind::Token, pp.dims)?;
    if verify_presentation(&pp, &pt, &phi, &ctx, &view) {
        println!("ACCEPT");
        Ok(0)
    } else {
        println!("REJECT");
        Ok(REJECT)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attr_specs() {
        assert_eq!(parse_attr_spec("age:num8").unwrap().kind, AttrKind::Numeric { bits: 8 });
        assert_eq!(parse_attr_spec("a:b:cat").unwrap().name, "a:b");
        assert!(parse_attr_spec("age").is_err());
        assert!(parse_attr_spec(":cat").is_err());
        assert!(parse_attr_spec("age:num").is_err());
    }

    #[test]
    fn values() {
        assert_eq!(parse_value("42"), Some(FieldElement::from_u64(42)));
        assert_eq!(parse_value("0x2a"), Some(FieldElement::from_u64(42)));
        assert_eq!(parse_value("\"FR\""), Some(label_value("FR")));
        assert_eq!(parse_value("-1"), None);
        let p = irac::field::modulus();
        assert_eq!(parse_value(&p.to_string()), None);
        assert_eq!(parse_value(&(p - 1u32).to_string()), Some(FieldElement::max_value()));
    }
}

use irac::FieldElement;
use irac_harness::oracle::{GameState, OracleError};
use irac_harness::scenario::{random_scenario, toy_universe};
use irac_harness::suites::*;

fn fe(v: u64) -> FieldElement {
    FieldElement::from_u64(v)
}

#[test]
fn scenarios_are_replayable() {
    let fix = Fixture::toy();
    let a = random_scenario(&fix.test, &fix.u, &mut rng_for(9, 4));
    let b = random_scenario(&fix.test, &fix.u, &mut rng_for(9, 4));
    assert_eq!(a.cred, b.cred);
    assert_eq!(a.phi, b.phi);
    assert_eq!(a.publics(), b.publics());
}

#[test]
fn small_randomized_runs() {
    let fix = Fixture::toy();
    let c = completeness(&fix.test, &fix.u, 40, 11);
    assert!(c.accept.passed(), "{:?}", c.accept.failures);
    assert!(c.revoked.passed(), "{:?}", c.revoked.failures);
    assert!(c.ctx.passed(), "{:?}", c.ctx.failures);
    let eq = relation_equivalence(&fix.test, &fix.u, 60, 12);
    assert!(eq.report.passed(), "{:?}", eq.report.failures);
    assert!(eq.honest > 10 && eq.mutated > 30);
    assert!(eq.rejected >= eq.mutated / 2);
}

#[test]
fn gap_and_commitment_suites() {
    let fix = Fixture::toy();
    let r = gap_oracle(&fix.test, &fix.u);
    assert!(r.passed(), "{:?}", r.failures);
    assert_eq!(r.cases, 247 * 8 * 2);
    let (r, tampers) = vc_properties(1);
    assert!(r.passed(), "{:?}", r.failures);
    assert!(tampers >= 1000);
}

#[test]
fn oracle_logs() {
    let fix = Fixture::toy();
    let mut g = GameState::new(&fix.test, toy_universe(), 3);
    g.init_issuers(&[vec![1, 2], vec![1]]).unwrap();
    g.issue(0, 0, &[fe(30), fe(4)]).unwrap();
    assert_eq!(g.issue(0, 0, &[fe(30), fe(4)]), Err(OracleError::AlreadyIssued(0, 0)));
    assert_eq!(g.issue(5, 0, &[fe(1)]), Err(OracleError::NoIssuer(5)));
    let c = g.reveal(0, 0).unwrap();
    assert_eq!(c.values, vec![fe(30), fe(4)]);
    assert_eq!(g.q_reveal, vec![(0, 0)]);
    assert_eq!(g.reveal(1, 0).unwrap_err(), OracleError::NoCredential(1, 0));

    let phi = irac::predicate::parse_simple("#1:8 >= 18").unwrap();
    let pt = g.present(0, 0, &phi, b"s1", &[0, 1]).unwrap();
    assert!(g.judge(&pt, &phi, b"s1", &[1, 0]).accepted);
    // revealed, unrevoked and satisfying: never a win
    let out = g.judge(&pt, &phi, b"s2", &[0, 1]);
    assert!(!out.accepted && !out.win_by_indices);

    let before = g.issuers[0].public.rl.len();
    let aux = g.revoke(0, 0).unwrap();
    assert_eq!(aux.rl.len(), before + 1);
    assert!(aux.rl.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(g.q_revoke, vec![(0, 0)]);
    assert!(!g.judge(&pt, &phi, b"s1", &[0, 1]).accepted);
}

#[test]
fn adversaries_rejected_one_seed() {
    let fix = Fixture::toy();
    let r = unforgeability_suite(&fix, 100);
    assert!(r.passed(), "{:?}", r.failures);
    let (r, tokens) = unlinkability_suite(&fix, 100);
    assert!(r.passed(), "{:?}", r.failures);
    assert_eq!(tokens.len(), 2);
    let r = ctx_binding(&fix.kzg, &tokens, 1);
    assert!(r.passed(), "{:?}", r.failures);
}

use irac::encoding::Encode;
use irac::predicate::parse_simple;
use irac::protocol::*;
use irac::relation::{relation_check, GapError};
use irac::signature::sig_sign;
use irac::zk::Backend;
use irac::FieldElement;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn fe(v: u64) -> FieldElement {
    FieldElement::from_u64(v)
}

fn universe() -> AttributeUniverse {
    add_attributes(
        &AttributeUniverse::default(),
        &[
            AttributeId { name: "age".into(), kind: AttrKind::Numeric { bits: 8 } },
            AttributeId { name: "country".into(), kind: AttrKind::Categorical },
            AttributeId { name: "score".into(), kind: AttrKind::Numeric { bits: 16 } },
        ],
    )
    .unwrap()
}

fn toy() -> (SystemParams, AttributeUniverse) {
    let (pp, _) = setup_with(8, 8, 8, Backend::Transparent, 1 << 16, 0).unwrap();
    let u = universe();
    (pp, u)
}

#[test]
fn setup_checks_sizes() {
    assert!(setup_with(3, 8, 8, Backend::Transparent, 1 << 16, 0).is_err());
    assert!(setup_with(1, 8, 8, Backend::Transparent, 1 << 16, 0).is_err());
    assert!(setup_with(8, 8, 8, Backend::Transparent, 1000, 0).is_err());
    let (a, u) = setup_with(128, 1 << 15, 1 << 10, Backend::Transparent, 1 << 16, 5).unwrap();
    assert!(u.is_empty());
    let (b, _) = setup_with(128, 1 << 15, 1 << 10, Backend::Transparent, 1 << 16, 5).unwrap();
    assert_eq!(a.encode(), b.encode());
    assert_eq!(a.dims.depth_r(), 15);
}

#[test]
fn attributes_append() {
    let u = AttributeUniverse::default();
    let age = AttributeId { name: "Age".into(), kind: AttrKind::Numeric { bits: 8 } };
    let country = AttributeId { name: "Country".into(), kind: AttrKind::Categorical };
    let u1 = add_attributes(&u, &[age.clone(), country]).unwrap();
    assert_eq!(u1.index_of("Age"), Some(1));
    assert_eq!(u1.index_of("Country"), Some(2));
    assert_eq!(add_attributes(&u1, &[age]), Err(IracError::DuplicateAttributeName("Age".into())));
    let u2 = add_attributes(&u1, &[AttributeId { name: "Zip".into(), kind: AttrKind::Categorical }]).unwrap();
    assert_eq!(u2.index_of("Age"), Some(1));
    assert_eq!(u2.index_of("Zip"), Some(3));
}

#[test]
fn issuer_setup_empty_list() {
    let (pp, u) = toy();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let a = issuer_setup(&pp, &u, &[1, 2], &mut rng).unwrap();
    // root of [0, p-1 x 7], from tools/poseidon_ref.py
    assert_eq!(format!("{:?}", a.public.c_r.0.inner()), "0x03c481a209847c54f842ba86822bb78546ba5a78c2e844f24db5a1764483f1b3");
    let b = issuer_setup(&pp, &u, &[], &mut rng).unwrap();
    assert_ne!(a.public.pk, b.public.pk);
    assert_eq!(issuer_setup(&pp, &u, &[4], &mut rng).unwrap_err(), IracError::UnknownAttribute(4));
}

#[test]
fn issue_and_verify() {
    let (pp, u) = toy();
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let a = issuer_setup(&pp, &u, &[1, 2], &mut rng).unwrap();
    let b = issuer_setup(&pp, &u, &[3], &mut rng).unwrap();
    let ca = issue_cred(&pp, &u, &a, &[fe(30), fe(7)], &mut rng).unwrap();
    let cb = issue_cred(&pp, &u, &b, &[fe(999)], &mut rng).unwrap();
    assert!(verify_cred(&pp, &ca, &a.public.pk, &a.public.attrs));
    assert!(verify_cred(&pp, &cb, &b.public.pk, &b.public.attrs));
    assert_eq!(ca.c_a.encode().len(), cb.c_a.encode().len());
    let mut bad = ca.clone();
    bad.values[0] = fe(31);
    assert!(!verify_cred(&pp, &bad, &a.public.pk, &a.public.attrs));
    assert!(!verify_cred(&pp, &ca, &b.public.pk, &a.public.attrs));
    assert_eq!(issue_cred(&pp, &u, &a, &[fe(256), fe(1)], &mut rng).unwrap_err(), IracError::ValueOutOfRange(1));
    assert_eq!(
        issue_cred(&pp, &u, &a, &[fe(1)], &mut rng).unwrap_err(),
        IracError::LengthMismatch { expected: 2, got: 1 }
    );
}

#[test]
fn credential_hash_properties() {
    let (pp, u) = toy();
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let a = issuer_setup(&pp, &u, &[1], &mut rng).unwrap();
    let c = issue_cred(&pp, &u, &a, &[fe(40)], &mut rng).unwrap();
    assert_eq!(credential_hash(&c), credential_hash(&c.clone()));
    let mut resigned = c.clone();
    resigned.sig = sig_sign(&a.sk, c.c_a.0, &mut rng);
    assert_ne!(resigned.sig, c.sig);
    assert_ne!(credential_hash(&resigned), credential_hash(&c));
    let h = credential_hash(&c);
    assert!(!h.is_zero() && h != FieldElement::max_value());
}

#[test]
fn revocation_list_maintenance() {
    let (pp, u) = toy();
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let a = issuer_setup(&pp, &u, &[1], &mut rng).unwrap();
    let s = revoke_hash(&pp, &a, fe(5)).unwrap();
    let s = revoke_hash(&pp, &s, fe(9)).unwrap();
    let s = revoke_hash(&pp, &s, fe(7)).unwrap();
    assert_eq!(s.public.rl, vec![fe(5), fe(7), fe(9)]);
    assert_eq!(revoke_hash(&pp, &s, fe(7)).unwrap(), s);
    let layout = revocation_layout(&s.public.rl, 8);
    assert_eq!(s.public.c_r, pp.pp_r.commit(&layout).unwrap());
    let s = (10..13).fold(s, |s, v| revoke_hash(&pp, &s, fe(v)).unwrap());
    assert_eq!(s.public.rl.len(), 6);
    assert_eq!(revoke_hash(&pp, &s, fe(20)).unwrap_err(), IracError::RevocationCapacityExceeded);
    // a duplicate is still accepted when full
    assert_eq!(revoke_hash(&pp, &s, fe(5)).unwrap(), s);
}

#[test]
fn gap_witness_shapes() {
    let (pp, u) = toy();
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let a = issuer_setup(&pp, &u, &[1], &mut rng).unwrap();
    let c = issue_cred(&pp, &u, &a, &[fe(40)], &mut rng).unwrap();
    let phi = parse_simple("#1 >= 18").unwrap();
    let view = IssuerSetView::new(&pp, &[a.public.clone()]).unwrap();
    let w = witness_assemble(&pp, &c, &phi, &view).unwrap();
    assert_eq!((w.gap.h_l, w.gap.h_r), (FieldElement::ZERO, FieldElement::max_value()));
    assert_eq!((w.gap.left.index, w.gap.right.index), (0, 1));

    let lo = fe(5);
    let hi = FieldElement::max_value() - fe(9);
    let s = revoke_hash(&pp, &revoke_hash(&pp, &a, lo).unwrap(), hi).unwrap();
    let view = IssuerSetView::new(&pp, &[s.public.clone()]).unwrap();
    let w = witness_assemble(&pp, &c, &phi, &view).unwrap();
    assert_eq!((w.gap.h_l, w.gap.h_r), (lo, hi));
    assert!(relation_check(&pp.dims, &statement(&phi, b"x", &view), &w));

    let mut bad = w.clone();
    bad.gap.right = bad.gap.left.clone();
    bad.gap.right.index += 2;
    assert!(!relation_check(&pp.dims, &statement(&phi, b"x", &view), &bad));

    let s = revoke(&pp, &s, &c).unwrap();
    let view = IssuerSetView::new(&pp, &[s.public.clone()]).unwrap();
    assert_eq!(witness_assemble(&pp, &c, &phi, &view).unwrap_err(), IracError::Revoked);
    // the old witness does not open the new list
    assert!(!relation_check(&pp.dims, &statement(&phi, b"x", &view), &w));
    let layout = revocation_layout(&s.public.rl, 8);
    assert_eq!(irac::relation::find_gap(&layout, credential_hash(&c)), Err(GapError::Member));
}

#[test]
fn present_and_verify() {
    let (pp, u) = toy();
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let a = issuer_setup(&pp, &u, &[1, 2], &mut rng).unwrap();
    let b = issuer_setup(&pp, &u, &[2, 1, 3], &mut rng).unwrap();
    let outsider = issuer_setup(&pp, &u, &[1, 2], &mut rng).unwrap();
    let narrow = issuer_setup(&pp, &u, &[2], &mut rng).unwrap();
    let c = issue_cred(&pp, &u, &a, &[fe(30), fe(7)], &mut rng).unwrap();
    let phi = parse_simple("#1 >= 18 and #2 in {7, 9}").unwrap();
    let view = IssuerSetView::new(&pp, &[a.public.clone(), b.public.clone()]).unwrap();
    let pt = present_cred(&pp, &c, &phi, b"nonce-1", &view, &mut rng).unwrap();
    assert!(verify_presentation(&pp, &pt, &phi, b"nonce-1", &view));
    assert!(!verify_presentation(&pp, &pt, &phi, b"nonce-2", &view));

    // input order does not matter
    let flipped = IssuerSetView::new(&pp, &[b.public.clone(), a.public.clone(), a.public.clone()]).unwrap();
    assert_eq!(flipped, view);
    assert!(verify_presentation(&pp, &pt, &phi, b"nonce-1", &flipped));

    let other = IssuerSetView::new(&pp, &[outsider.public.clone(), b.public.clone()]).unwrap();
    assert_eq!(present_cred(&pp, &c, &phi, b"n", &other, &mut rng).unwrap_err(), IracError::IssuerNotInSet);
    let uncovered = IssuerSetView::new(&pp, &[a.public.clone(), narrow.public.clone()]).unwrap();
    assert_eq!(present_cred(&pp, &c, &phi, b"n", &uncovered, &mut rng).unwrap_err(), IracError::AttributeNotCovered(1));
    assert!(!verify_presentation(&pp, &pt, &phi, b"nonce-1", &uncovered));
    let failing = parse_simple("#1 > 40").unwrap();
    assert_eq!(present_cred(&pp, &c, &failing, b"n", &view, &mut rng).unwrap_err(), IracError::PredicateNotSatisfied);

    // revocation after proving changes the statement
    let a2 = revoke(&pp, &a, &c).unwrap();
    let fresh = IssuerSetView::new(&pp, &[a2.public.clone(), b.public.clone()]).unwrap();
    assert_ne!(fresh.commitment(), view.commitment());
    assert!(!verify_presentation(&pp, &pt, &phi, b"nonce-1", &fresh));
    assert_eq!(present_cred(&pp, &c, &phi, b"n", &fresh, &mut rng).unwrap_err(), IracError::Revoked);

    // an unrelated revocation also invalidates old tokens
    let c2 = issue_cred(&pp, &u, &b, &[fe(1), fe(20), fe(3)], &mut rng).unwrap();
    let b2 = revoke(&pp, &b, &c2).unwrap();
    let fresh = IssuerSetView::new(&pp, &[a.public.clone(), b2.public.clone()]).unwrap();
    assert!(!verify_presentation(&pp, &pt, &phi, b"nonce-1", &fresh));
    let pt2 = present_cred(&pp, &c, &phi, b"nonce-1", &fresh, &mut rng).unwrap();
    assert!(verify_presentation(&pp, &pt2, &phi, b"nonce-1", &fresh));
}

#[test]
fn view_validation() {
    let (pp, u) = toy();
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let issuers: Vec<_> = (0..9).map(|_| issuer_setup(&pp, &u, &[1], &mut rng).unwrap()).collect();
    let pubs: Vec<_> = issuers.iter().map(|i| i.public.clone()).collect();
    assert_eq!(IssuerSetView::new(&pp, &pubs).unwrap_err(), IracError::HidingSetTooLarge(9));
    assert_eq!(IssuerSetView::new(&pp, &[]).unwrap_err(), IracError::EmptyIssuerSet);

    // the claimed c_r is ignored in favour of the list
    let mut lying = pubs[0].clone();
    lying.c_r = pubs[1].c_r;
    lying.c_r.0 = lying.c_r.0 + fe(1);
    let honest = IssuerSetView::new(&pp, &pubs[..1]).unwrap();
    assert_eq!(IssuerSetView::new(&pp, &[lying]).unwrap(), honest);

    let mut unsorted = pubs[0].clone();
    unsorted.rl = vec![fe(9), fe(5)];
    assert!(matches!(IssuerSetView::new(&pp, &[unsorted]), Err(IracError::InvalidIssuerData(_))));
    let mut conflict = pubs[0].clone();
    conflict.rl = vec![fe(5)];
    assert!(IssuerSetView::new(&pp, &[pubs[0].clone(), conflict]).is_err());
}

#[test]
fn token_size_is_fixed() {
    let (pp, u) = toy();
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let phi = parse_simple("#2 != 3").unwrap();
    let a = issuer_setup(&pp, &u, &[2], &mut rng).unwrap();
    let b = issuer_setup(&pp, &u, &[1, 2, 3], &mut rng).unwrap();
    let view = IssuerSetView::new(&pp, &[a.public.clone(), b.public.clone()]).unwrap();
    let ca = issue_cred(&pp, &u, &a, &[fe(4)], &mut rng).unwrap();
    let cb = issue_cred(&pp, &u, &b, &[fe(10), fe(5), fe(6)], &mut rng).unwrap();
    let ta = present_cred(&pp, &ca, &phi, b"c", &view, &mut rng).unwrap();
    let tb = present_cred(&pp, &cb, &phi, b"c", &view, &mut rng).unwrap();
    assert_eq!(ta.to_bytes().len(), tb.to_bytes().len());
}

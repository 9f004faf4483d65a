use irac::predicate::parse_simple;
use irac::protocol::*;
use irac::relation::checker::{check, circuit_accepts, layout};
use irac::relation::{relation_check, RelationDescription};
use irac::zk::{plan, zk_keygen, zk_setup, zk_verify, Backend, Proof, ZkError};
use irac::{Dims, FieldElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn fe(v: u64) -> FieldElement {
    FieldElement::from_u64(v)
}

fn attrs() -> Vec<AttributeId> {
    vec![
        AttributeId { name: "age".into(), kind: AttrKind::Numeric { bits: 8 } },
        AttributeId { name: "country".into(), kind: AttrKind::Categorical },
    ]
}

#[test]
fn circuit_agrees_with_checker() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let (pp, u) = setup_with(8, 8, 8, Backend::Transparent, 1 << 16, 0).unwrap();
    let u = add_attributes(&u, &attrs()).unwrap();
    let iss = issuer_setup(&pp, &u, &[1, 2], &mut rng).unwrap();
    let other = issuer_setup(&pp, &u, &[2, 1], &mut rng).unwrap();
    let cred = issue_cred(&pp, &u, &iss, &[fe(30), fe(7)], &mut rng).unwrap();
    let view = IssuerSetView::new(&pp, &[iss.public.clone(), other.public.clone()]).unwrap();
    let phi = parse_simple("#1 >= 18 and #2 in {7, 9} and #1 not in [3, 40]").unwrap();
    let w = witness_assemble(&pp, &cred, &phi, &view).unwrap();
    let stmt = statement(&phi, b"ctx", &view);
    assert!(relation_check(&pp.dims, &stmt, &w));
    let desc = RelationDescription::new(&phi, pp.dims);
    let mut b = layout(&desc, &stmt.public_inputs(), &w, 12);
    check(&mut b, 12).unwrap();
    assert!(circuit_accepts(&desc, &stmt.public_inputs(), &w, 12));
    let mut bad = w.clone();
    bad.attrs[0].value = fe(31);
    assert!(!relation_check(&pp.dims, &stmt, &bad));
    assert!(!circuit_accepts(&desc, &stmt.public_inputs(), &bad, 12));
}

/// Circuit heights for a few shapes, frozen.
#[test]
fn plan_sizes() {
    let cases = [
        ((2, 2, 2), "#1 >= 18"),
        ((8, 8, 8), "#1:8 >= 18"),
        ((8, 8, 8), "#1 >= 18 and #2 in {1, 2, 3} and #1 not in [5, 6]"),
        ((128, 1 << 15, 128), "#1:8 > 18"),
        ((128, 1 << 15, 1 << 10), "#1:8 > 18"),
    ];
    let got: Vec<(u32, usize)> = cases
        .iter()
        .map(|&((a, r, i), src)| {
            let desc = RelationDescription::new(&parse_simple(src).unwrap(), Dims::new(a, r, i).unwrap());
            let (p, _) = plan(&desc);
            (p.k, p.stats.advice_cells)
        })
        .collect();
    assert_eq!(got, vec![(14, 71658), (14, 89815), (15, 108558), (15, 162515), (15, 169334)]);
}

#[test]
fn too_large_for_parameters() {
    let pp = zk_setup(Backend::Transparent, 1 << 10, 0).unwrap();
    let desc = RelationDescription::new(&parse_simple("#1 >= 18").unwrap(), Dims::new(8, 8, 8).unwrap());
    let needed = plan(&desc).0.k;
    assert!(matches!(zk_keygen(&pp, &desc), Err(ZkError::CircuitTooLarge { needed: n, max: 10 }) if n == needed));
    assert!(zk_setup(Backend::Kzg, 1 << 8, 0).is_err());
    assert!(zk_setup(Backend::Kzg, 3 << 10, 0).is_err());
}

#[test]
fn kzg_tokens() {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let (pp, u) = setup_with(4, 4, 4, Backend::Kzg, 1 << 15, 0).unwrap();
    let u = add_attributes(&u, &attrs()).unwrap();
    let iss = issuer_setup(&pp, &u, &[1], &mut rng).unwrap();
    let cred = issue_cred(&pp, &u, &iss, &[fe(30)], &mut rng).unwrap();
    let view = IssuerSetView::new(&pp, &[iss.public.clone()]).unwrap();
    let phi = parse_simple("#1:8 >= 18").unwrap();
    let desc = RelationDescription::new(&phi, pp.dims);

    // keys are a function of the shape alone
    let (_, vk1) = zk_keygen(&pp.zk, &desc).unwrap();
    let (_, vk2) = zk_keygen(&pp.zk, &desc).unwrap();
    assert_eq!(vk1.to_bytes(), vk2.to_bytes());

    let pt = present_cred(&pp, &cred, &phi, b"ctx", &view, &mut rng).unwrap();
    assert!(verify_presentation(&pp, &pt, &phi, b"ctx", &view));
    assert!(!verify_presentation(&pp, &pt, &phi, b"ctx2", &view));
    let keys = pp.keys.get_or_generate(&pp.zk, &desc).unwrap();
    let stmt = statement(&phi, b"ctx", &view);
    let p = &pt.proof.0;
    let rejects = |q: Vec<u8>| !zk_verify(&pp.zk, &keys.1, &stmt, &Proof(q));

    // every 32-byte element after the header, with its top bit flipped
    for end in (32..p.len()).step_by(32) {
        let mut q = p.clone();
        q[end] ^= 0x80;
        assert!(rejects(q), "flag flip at {end}");
    }
    for _ in 0..100 {
        let mut q = p.clone();
        let i = rng.gen_range(0..q.len());
        q[i] ^= 1 << rng.gen_range(0..8);
        assert!(rejects(q), "flip at {i}");
    }
    let mut long = p.clone();
    long.push(0);
    assert!(rejects(long));
    assert!(rejects(p[..p.len() - 1].to_vec()));
    assert!(rejects(Vec::new()));
}

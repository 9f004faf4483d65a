use std::collections::BTreeMap;

use irac::encoding::{Bytes, Decode, DecodeError, Encode};
use irac::field::modulus;
use irac::predicate::{parse_simple, pred_eval, to_text, Clause, CmpOp, Predicate, SortedList};
use irac::protocol::revocation_layout;
use irac::relation::{find_gap, GapError};
use irac::vc::{vc_setup, RawLeaves};
use irac::FieldElement;
use num_bigint::BigUint;
use proptest::prelude::*;

fn field() -> impl Strategy<Value = FieldElement> {
    prop_oneof![
        any::<u64>().prop_map(FieldElement::from_u64),
        any::<[u8; 32]>().prop_map(|b| FieldElement::from_biguint(&BigUint::from_bytes_le(&b))),
        (0u64..4).prop_map(|d| FieldElement::max_value() - FieldElement::from_u64(d)),
    ]
}

fn op() -> impl Strategy<Value = CmpOp> {
    prop_oneof![Just(CmpOp::Lt), Just(CmpOp::Le), Just(CmpOp::Eq), Just(CmpOp::Ge), Just(CmpOp::Gt), Just(CmpOp::Ne)]
}

fn clause() -> impl Strategy<Value = Clause> {
    let idx = 1u32..6;
    prop_oneof![
        (idx.clone(), op(), 1u8..=64, any::<u64>()).prop_map(|(idx, op, bits, c)| {
            let c = if bits == 64 { c } else { c & ((1 << bits) - 1) };
            Clause::Compare { idx, op, constant: FieldElement::from_u64(c), bits }
        }),
        (idx.clone(), prop::collection::vec(0u64..50, 1..6))
            .prop_map(|(idx, s)| Clause::MemberOf { idx, set: s.into_iter().map(FieldElement::from_u64).collect() }),
        (idx, prop::collection::vec(0u64..50, 0..8)).prop_map(|(idx, s)| Clause::NotInSortedList {
            idx,
            list: SortedList::new(s.into_iter().map(FieldElement::from_u64).collect()).unwrap()
        }),
    ]
}

proptest! {
    #[test]
    fn field_encoding_roundtrip(x in field()) {
        let b = x.encode();
        prop_assert_eq!(b.len(), 32);
        prop_assert_eq!(FieldElement::decode(&b), Ok(x));
        prop_assert_eq!(FieldElement::from_biguint_exact(&x.to_biguint()), Some(x));
    }

    #[test]
    fn non_canonical_field_rejected(d in 0u64..1000) {
        let v = modulus() + BigUint::from(d);
        prop_assert_eq!(FieldElement::from_biguint_exact(&v), None);
        let mut b = v.to_bytes_le();
        b.resize(32, 0);
        prop_assert_eq!(FieldElement::decode(&b), Err(DecodeError::NonCanonical));
    }

    #[test]
    fn field_order_is_integer_order(a in field(), b in field()) {
        prop_assert_eq!(a.cmp(&b), a.to_biguint().cmp(&b.to_biguint()));
    }

    #[test]
    fn vector_encoding_strict(v in prop::collection::vec(any::<u32>(), 0..20), bytes in prop::collection::vec(any::<u8>(), 0..40), extra in 1usize..4) {
        let item = (v.clone(), Bytes(bytes.clone()));
        let enc = item.encode();
        prop_assert_eq!(<(Vec<u32>, Bytes)>::decode(&enc), Ok(item));
        let mut long = enc.clone();
        long.extend(std::iter::repeat_n(0, extra));
        prop_assert_eq!(<(Vec<u32>, Bytes)>::decode(&long), Err(DecodeError::Trailing(extra)));
        prop_assert!(<(Vec<u32>, Bytes)>::decode(&enc[..enc.len() - 1]).is_err());
    }

    #[test]
    fn commitments_open_everywhere(a in prop::collection::vec(field(), 1..16), pick in any::<prop::sample::Index>()) {
        let p = vc_setup::<RawLeaves>(16).unwrap();
        let c = p.commit(&a).unwrap();
        let i = pick.index(a.len());
        let proof = p.open(&a, i).unwrap();
        prop_assert!(p.verify(&c, i, &a[i], &proof));
        prop_assert!(!p.verify(&c, i, &(a[i] + FieldElement::ONE), &proof));
        prop_assert!(!p.verify(&c, (i + 1) % 16, &a[i], &proof));
    }

    #[test]
    fn predicate_text_roundtrip(cs in prop::collection::vec(clause(), 1..5)) {
        let phi = Predicate::new(cs).unwrap();
        prop_assert_eq!(parse_simple(&to_text(&phi)).unwrap(), phi);
    }

    #[test]
    fn eval_is_conjunction(cs in prop::collection::vec(clause(), 1..5), vals in prop::collection::vec(0u64..60, 5)) {
        let phi = Predicate::new(cs).unwrap();
        let assignment: BTreeMap<u32, FieldElement> = (1..6).zip(vals.iter().map(|&v| FieldElement::from_u64(v))).collect();
        let expected = phi.clauses().iter().all(|c| c.holds(assignment[&c.idx()]));
        prop_assert_eq!(pred_eval(&phi, &assignment), Ok(expected));
    }

    #[test]
    fn gap_iff_absent(entries in prop::collection::btree_set(1u64..100, 0..7), t in 1u64..101) {
        let rl: Vec<FieldElement> = entries.iter().map(|&e| FieldElement::from_u64(e)).collect();
        let layout = revocation_layout(&rl, 8);
        let t = FieldElement::from_u64(t);
        match find_gap(&layout, t) {
            Ok(i) => {
                prop_assert!(!rl.contains(&t));
                prop_assert!(layout[i] < t && t < layout[i + 1]);
            }
            Err(e) => {
                prop_assert_eq!(e, GapError::Member);
                prop_assert!(rl.contains(&t));
            }
        }
    }
}

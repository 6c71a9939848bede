use std::collections::BTreeSet;

use koszul_core::brauer::{
    compose, day_summands, day_summands_multi, disjoint_union, hom_basis, parse_morphism, BrauerMorphism,
    FiniteSetObject, Label,
};
use proptest::prelude::*;

fn set(v: &[Label]) -> FiniteSetObject {
    FiniteSetObject::new(v.iter().copied()).unwrap()
}

fn falling(n: usize, k: usize) -> usize {
    (0..k).map(|i| n - i).product()
}

fn double_factorial(m: usize) -> usize {
    (1..m).step_by(2).product::<usize>().max(1)
}

#[test]
fn normalize_examples() {
    let s = set(&[1, 2]);
    let signed = BrauerMorphism::new(s.clone(), FiniteSetObject::empty(), &[], &[(2, 1)], true).unwrap();
    assert_eq!(signed.matching(), &[(1, 2)]);
    assert_eq!(signed.sign(), -1);

    let unsigned = BrauerMorphism::new(s.clone(), FiniteSetObject::empty(), &[], &[(2, 1)], false).unwrap();
    assert_eq!(unsigned.matching(), &[(1, 2)]);
    assert_eq!(unsigned.sign(), 1);

    let id = BrauerMorphism::new(s.clone(), s.clone(), &[(1, 1), (2, 2)], &[], true).unwrap();
    assert_eq!(id, BrauerMorphism::identity(&s, true));
}

#[test]
fn invalid_morphisms_are_rejected() {
    let s = set(&[1, 2, 3, 4]);
    let e = FiniteSetObject::empty();
    assert!(BrauerMorphism::new(s.clone(), e.clone(), &[], &[(1, 2), (2, 3)], true).is_err());
    assert!(BrauerMorphism::new(s.clone(), e.clone(), &[], &[(1, 2)], true).is_err());
    assert!(BrauerMorphism::new(s.clone(), e.clone(), &[], &[(1, 1), (3, 4)], true).is_err());
    assert!(BrauerMorphism::new(s.clone(), set(&[1]), &[(1, 5)], &[(2, 3)], true).is_err());
}

#[test]
fn composition_example() {
    let s = FiniteSetObject::range(4);
    let t = FiniteSetObject::range(2);
    let f = BrauerMorphism::new(s.clone(), t.clone(), &[(1, 1), (2, 2)], &[(3, 4)], true).unwrap();
    let g = BrauerMorphism::new(t.clone(), FiniteSetObject::empty(), &[], &[(1, 2)], true).unwrap();
    let h = compose(&f, &g).unwrap();
    assert_eq!(h.matching(), &[(1, 2), (3, 4)]);
    assert_eq!(h.sign(), 1);
    assert!(compose(&g, &f).is_err());
    let id_s = BrauerMorphism::identity(&s, true);
    let id_t = BrauerMorphism::identity(&t, true);
    assert_eq!(compose(&id_s, &f).unwrap(), f);
    assert_eq!(compose(&f, &id_t).unwrap(), f);
}

#[test]
fn composition_tracks_crossing_signs() {
    // f sends target 1 ↦ 2 and 2 ↦ 1, so g's pair (1,2) is pushed to (2,1).
    let s = FiniteSetObject::range(2);
    let f = BrauerMorphism::new(s.clone(), s.clone(), &[(1, 2), (2, 1)], &[], true).unwrap();
    let g = BrauerMorphism::new(s.clone(), FiniteSetObject::empty(), &[], &[(1, 2)], true).unwrap();
    assert_eq!(compose(&f, &g).unwrap().sign(), -1);
    let fu = BrauerMorphism::new(s.clone(), s.clone(), &[(1, 2), (2, 1)], &[], false).unwrap();
    let gu = BrauerMorphism::new(s.clone(), FiniteSetObject::empty(), &[], &[(1, 2)], false).unwrap();
    assert_eq!(compose(&fu, &gu).unwrap().sign(), 1);
}

#[test]
fn hom_basis_examples() {
    let e = FiniteSetObject::empty();
    assert_eq!(hom_basis(&FiniteSetObject::range(2), &e, true).len(), 1);
    assert_eq!(hom_basis(&FiniteSetObject::range(4), &e, true).len(), 3);
    assert_eq!(
        hom_basis(&FiniteSetObject::range(2), &FiniteSetObject::range(2), true).len(),
        2
    );
    assert!(hom_basis(&FiniteSetObject::range(3), &e, true).is_empty());
    assert!(hom_basis(&FiniteSetObject::range(1), &FiniteSetObject::range(3), false).is_empty());
}

#[test]
fn hom_dimension_formula() {
    for s in 0..=7 {
        for t in 0..=s {
            let expected = if (s - t) % 2 == 0 {
                falling(s, t) * double_factorial(s - t)
            } else {
                0
            };
            for signed in [false, true] {
                let basis = hom_basis(&FiniteSetObject::range(s), &FiniteSetObject::range(t), signed);
                assert_eq!(basis.len(), expected, "|S|={s} |T|={t}");
                let distinct: BTreeSet<_> = basis.iter().map(|m| m.to_string()).collect();
                assert_eq!(distinct.len(), expected);
            }
        }
    }
}

#[test]
fn day_summand_examples() {
    let e = FiniteSetObject::empty();
    assert_eq!(day_summands(&set(&[1]), &set(&[2]), &e, true).unwrap().len(), 1);
    assert!(day_summands(&set(&[1, 2]), &e, &e, true).unwrap().is_empty());
    let n = day_summands(&set(&[1, 2]), &set(&[3, 4]), &FiniteSetObject::range(2), true)
        .unwrap()
        .len();
    assert_eq!(n, 8);
    assert!(day_summands(&set(&[1, 2]), &set(&[2, 3]), &e, true).is_err());
}

/// Composites `S1 ⊔ S2 ⊔ S3 → S` obtained by gluing two blocks first, as
/// normalized diagrams with the sign dropped.
fn bracketed(
    first: (&FiniteSetObject, &FiniteSetObject),
    third: &FiniteSetObject,
    s: &FiniteSetObject,
    left: bool,
) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let inner_total = first.0.len() + first.1.len();
    // Intermediate sets use labels above everything else to stay disjoint.
    for u in (0..=inner_total).filter(|u| (inner_total - u) % 2 == 0) {
        let u_set = FiniteSetObject::new((0..u as Label).map(|i| 100 + i)).unwrap();
        for phi1 in day_summands(first.0, first.1, &u_set, true).unwrap() {
            let id3 = BrauerMorphism::identity(third, true);
            let step = if left {
                disjoint_union(&phi1, &id3).unwrap()
            } else {
                disjoint_union(&id3, &phi1).unwrap()
            };
            for phi2 in day_summands(&u_set, third, s, true).unwrap() {
                let c = compose(&step, &phi2).unwrap();
                out.insert(c.clone().to_string().replace("sign:-1", "sign:+1"));
            }
        }
    }
    out
}

#[test]
fn iterated_day_summands_do_not_depend_on_bracketing() {
    let cases: Vec<(Vec<Label>, Vec<Label>, Vec<Label>, usize)> = vec![
        (vec![1], vec![2], vec![3, 4], 0),
        (vec![1, 2], vec![3], vec![4, 5], 1),
        (vec![1, 2], vec![3, 4], vec![5, 6], 2),
        (vec![1], vec![2, 3], vec![4], 0),
    ];
    for (a, b, c, k) in cases {
        let (s1, s2, s3) = (set(&a), set(&b), set(&c));
        let s = FiniteSetObject::new((0..k as Label).map(|i| 50 + i)).unwrap();
        let left = bracketed((&s1, &s2), &s3, &s, true);
        let right = bracketed((&s2, &s3), &s1, &s, false);
        let direct: BTreeSet<String> = day_summands_multi(&[s1.clone(), s2.clone(), s3.clone()], &s, true)
            .unwrap()
            .into_iter()
            .map(|m| m.to_string().replace("sign:-1", "sign:+1"))
            .collect();
        assert_eq!(left, direct, "{a:?} {b:?} {c:?}");
        assert_eq!(right, direct, "{a:?} {b:?} {c:?}");
    }
}

#[test]
fn parser_rejects_malformed_text() {
    for bad in [
        "",
        "{1,2}|{}|inj:|match:(1,2)",
        "{1,2}|{}|inj:|match:(1,2)|sign:+2",
        "{1,1}|{}|inj:|match:(1,1)|sign:+1",
        "{1,2}|{}|inj:|match:(1,3)|sign:+1",
        "{1,2}|{1}|inj:1->1|match:|sign:+1",
        "{1,2}|{}|inj:|match:(1,2)|sign:+1 extra",
    ] {
        assert!(parse_morphism(bad, true).is_err(), "{bad}");
    }
    assert!(parse_morphism("{1,2}|{}|inj:|match:(2,1)|sign:+1", false).is_ok());
    assert!(parse_morphism("{1,2}|{}|inj:|match:(1,2)|sign:-1", false).is_err());
    let m = parse_morphism("{1,2,3}|{7}|inj:7→3|match:(2,1)|sign:+1", true).unwrap();
    assert_eq!(m.sign(), -1);
    assert_eq!(m.image_of(7), Some(3));
}

fn morphism_chain() -> impl Strategy<Value = (BrauerMorphism, BrauerMorphism, BrauerMorphism)> {
    (
        0usize..=1,
        0usize..=1,
        0usize..=1,
        0usize..=2,
        any::<u64>(),
        any::<bool>(),
    )
        .prop_map(|(a, b, c, d, seed, signed)| {
            let u = d;
            let t = u + 2 * c;
            let s1 = t + 2 * b;
            let s = s1 + 2 * a;
            let pick = |from: usize, to: usize, k: u64| {
                let basis = hom_basis(&FiniteSetObject::range(from), &FiniteSetObject::range(to), signed);
                basis[(k as usize) % basis.len()].clone()
            };
            (pick(s, s1, seed), pick(s1, t, seed / 7), pick(t, u, seed / 49))
        })
}

proptest! {
    #[test]
    fn composition_is_associative((f, g, h) in morphism_chain()) {
        let left = compose(&compose(&f, &g).unwrap(), &h).unwrap();
        let right = compose(&f, &compose(&g, &h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn display_parse_round_trip((f, g, _h) in morphism_chain(), neg in any::<bool>()) {
        let m = compose(&f, &g).unwrap();
        let m = if neg && m.is_signed() { m.negated() } else { m };
        let back = parse_morphism(&m.to_string(), m.is_signed()).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn parser_never_panics(text in "[{}0-9,|:a-z()+\\-> ]{0,40}") {
        let _ = parse_morphism(&text, true);
        let _ = parse_morphism(&text, false);
    }
}

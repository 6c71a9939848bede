use exactla::{q, SparseVec};
use koszul_core::realize::HyperbolicSpace;
use koszul_core::repchar::{format_decomposition, parse_expr, GroupType};
use koszul_core::torelli::lie::{is_lyndon, lyndon_words, necklace_count, standard_bracketing};
use koszul_core::torelli::{
    ce_duality_check, der_omega_basis, der_omega_character, der_omega_expected_dim, duality_bridge, johnson_tau,
    johnson_weight1_report, lie_quotient_dims, pair_index, pair_of, quadratic_dual, z_variant, DatumKind,
    QuadraticDatum, ThreeForms, TorelliError, TorelliPresentation,
};
use proptest::prelude::*;

fn all_words(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..k).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|w| (0..n).map(move |x| [w.clone(), vec![x]].concat()))
            .collect()
    })
}

#[test]
fn lyndon_words_match_enumeration_and_necklace_formula() {
    for n in 1..=4 {
        for k in 1..=6 {
            let brute: Vec<Vec<usize>> = all_words(n, k).into_iter().filter(|w| is_lyndon(w)).collect();
            let generated = lyndon_words(n, k);
            assert_eq!(generated, brute, "n={n} k={k}");
            assert_eq!(generated.len() as u64, necklace_count(n, k), "n={n} k={k}");
        }
    }
}

#[test]
fn standard_bracketing_leads_with_its_word() {
    // The lexicographically smallest word in P(w) is w, with coefficient 1.
    let n = 3;
    for k in 1..=5 {
        for w in lyndon_words(n, k) {
            let t = standard_bracketing(&w).tensor(n);
            let code = koszul_core::torelli::lie::encode(&w, n);
            assert_eq!(t.terms.first_key_value(), Some((&code, &1)), "{w:?}");
        }
    }
}

#[test]
fn symplectic_derivations_in_low_weight() {
    assert_eq!(der_omega_basis(1, 1).unwrap().len(), 0);
    assert_eq!(der_omega_basis(2, 1).unwrap().len(), 4);
    for (g, w) in [(1, 2), (2, 1), (2, 2), (3, 1), (2, 3)] {
        let basis = der_omega_basis(g, w).unwrap();
        assert_eq!(basis.len() as i64, der_omega_expected_dim(g, w), "g={g} w={w}");
        assert!(basis.iter().all(|d| d.is_symplectic()));
    }
    let expected = parse_expr("wedge3(std)").unwrap().evaluate(3, GroupType::Sp).unwrap();
    assert_eq!(der_omega_character(3, 1).unwrap(), expected);
}

#[test]
fn weight_one_johnson_map() {
    for g in 2..=4 {
        let r = johnson_weight1_report(g, 3, 11).unwrap();
        assert!(r.injective && r.omega_annihilated, "g={g}");
        assert_eq!(r.rank, r.source_dim);
        assert_eq!(r.equivariance_defect, 0, "g={g}");
    }
}

#[test]
fn genus_two_relations_fill_the_square() {
    let p = TorelliPresentation::build(2).unwrap();
    assert_eq!(p.rank(), 6);
    assert_eq!(p.perp().relation_rank(), 0);
    assert!(matches!(
        TorelliPresentation::build(1),
        Err(TorelliError::GenusTooSmall { .. })
    ));
}

#[test]
fn genus_four_presentation() {
    let p = TorelliPresentation::build(4).unwrap();
    assert_eq!(p.forms().len(), 56);
    assert_eq!(p.rank(), 337);
    assert!(p.theta_independent());
    assert_eq!(
        format_decomposition(&p.relation_decomposition().unwrap()),
        "2V_0 + V_{1^2} + V_{2^2}"
    );
    assert_eq!(
        format_decomposition(&p.perp_decomposition().unwrap()),
        "2V_{1^2} + V_{1^4} + V_{2,1^2} + V_{2^2,1^2}"
    );
    assert_eq!(p.perp().relation_rank(), 1203);
    assert!(p.double_annihilator_holds());
    let xs = koszul_core::torelli::random_sp_elements(p.space(), 2, 3);
    assert_eq!(p.sp_stability_defect(&xs).unwrap(), 0);
}

#[test]
fn genus_six_presentation() {
    let p = TorelliPresentation::build(6).unwrap();
    assert_eq!(p.rank(), 1717);
    assert_eq!(
        format_decomposition(&p.relation_decomposition().unwrap()),
        "2V_0 + V_{1^2} + V_{2^2}"
    );
    assert_eq!(
        format_decomposition(&p.perp_decomposition().unwrap()),
        "2V_{1^2} + 2V_{1^4} + V_{1^6} + V_{2,1^2} + V_{2^2,1^2}"
    );
    assert!(p.double_annihilator_holds());
}

#[test]
fn double_annihilator_in_small_genus() {
    for g in 2..=3 {
        assert!(
            TorelliPresentation::build(g).unwrap().double_annihilator_holds(),
            "g={g}"
        );
    }
}

#[test]
fn dual_swaps_full_and_empty_relations() {
    let space = HyperbolicSpace::new(2, GroupType::Sp).unwrap();
    let forms = ThreeForms::new(&space);
    let n = forms.len();
    let all: Vec<SparseVec> = (0..n * (n - 1) / 2).map(|i| vec![(i, q(1))]).collect();
    let full = QuadraticDatum::new(
        DatumKind::Commutative,
        forms.weights().to_vec(),
        forms.pairing(&space),
        all,
    )
    .unwrap();
    let dual = quadratic_dual(&full);
    assert_eq!(dual.kind(), DatumKind::Lie);
    assert_eq!(dual.relation_rank(), 0);
    assert_eq!(quadratic_dual(&dual).relation_rank(), full.quadratic_dim());

    let zero = vec![Vec::new(); n];
    assert_eq!(
        QuadraticDatum::new(DatumKind::Lie, forms.weights().to_vec(), zero, Vec::<SparseVec>::new()).err(),
        Some(TorelliError::DegeneratePairing)
    );
}

#[test]
fn chevalley_eilenberg_recovers_the_relations() {
    for g in 2..=3 {
        let p = TorelliPresentation::build(g).unwrap();
        let r = ce_duality_check(&p).unwrap();
        assert_eq!(r.h1, [p.forms().len(), 0], "g={g}");
        assert_eq!(r.h2, p.perp().relation_rank(), "g={g}");
        assert!(r.cycles_are_perp && r.cup_kernel_is_r, "g={g}");
    }
}

#[test]
fn lie_quotient_through_weight_three_at_genus_four() {
    let p = TorelliPresentation::build(4).unwrap();
    assert_eq!(lie_quotient_dims(&p, 3).unwrap().dims, vec![56, 337, 1392]);
    assert_eq!(lie_quotient_dims(&p, 4).err(), Some(TorelliError::WeightOutOfRange(4)));
}

#[test]
fn johnson_tau_at_genus_four() {
    let p = TorelliPresentation::build(4).unwrap();
    let report = johnson_tau(&p, 2, false).unwrap();
    let w2 = &report.weights[1];
    assert_eq!((w2.dim_t, w2.dim_h, w2.dim_ker), (337, 336, 1));
    assert!(w2.ker_trivial);
    assert_eq!(w2.ker_central, Some(true));
    assert_eq!(w2.ker_decomposition, "V_0");
    assert!(!report.stable_expectation.is_empty());
    let w1 = &report.weights[0];
    assert_eq!((w1.dim_t, w1.dim_h, w1.dim_ker), (56, 56, 0));
}

#[test]
fn tau_genus_guard() {
    let p = TorelliPresentation::build(5).unwrap();
    assert!(matches!(johnson_tau(&p, 2, false), Err(TorelliError::TooLarge { .. })));
    assert_eq!(johnson_tau(&p, 1, false).unwrap().weights.len(), 1);
}

#[test]
fn realization_matches_the_quadratic_dual() {
    let b = duality_bridge(&TorelliPresentation::build(4).unwrap()).unwrap();
    assert_eq!(b.realized, [56, 1203]);
    assert_eq!(b.lie, [56, 337]);
    assert_eq!(b.wedge, 1540);
    assert!(b.characters_match && b.holds);
}

#[test]
fn ih_only_presentation_on_primitive_forms() {
    let z = z_variant(6).unwrap();
    assert!(z.weight_one_injective);
    assert_eq!(z.relations, "V_0 + V_{1^2} + V_{2^2}");
    assert_eq!(z.relations_dim, 1716);
    assert_eq!(z.perp, "V_{1^4} + V_{1^6} + V_{2^2,1^2}");
    assert_eq!(z_variant(4).unwrap().perp, "V_{2^2,1^2}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pair_index_round_trips(n in 2usize..40, a in 0usize..40, b in 0usize..40) {
        prop_assume!(a < b && b < n);
        let idx = pair_index(n, a, b);
        prop_assert!(idx < n * (n - 1) / 2);
        prop_assert_eq!(pair_of(n, idx), (a, b));
    }

    #[test]
    fn johnson_map_is_equivariant(seed in any::<u64>()) {
        let r = johnson_weight1_report(3, 1, seed).unwrap();
        prop_assert_eq!(r.equivariance_defect, 0);
    }

    /// `S^⊥⊥ = S` for random homogeneous relation spans over `Λ³ℚ⁶`.
    #[test]
    fn double_dual_of_random_relations(
        picks in prop::collection::vec((0usize..190, 0usize..190, -2i64..=2), 1..12),
    ) {
        let space = HyperbolicSpace::new(3, GroupType::Sp).unwrap();
        let forms = ThreeForms::new(&space);
        let weights = forms.weights().to_vec();
        let probe = QuadraticDatum::new(DatumKind::Commutative, weights.clone(), forms.pairing(&space), Vec::<SparseVec>::new()).unwrap();
        let rels: Vec<SparseVec> = picks
            .iter()
            .map(|(i, j, c)| {
                let w = probe.pair_weight(*i);
                let block = probe.block_basis(&w);
                let other = block[j % block.len()];
                let mut v = vec![(*i, q(1))];
                if other != *i && *c != 0 {
                    v.push((other, q(*c)));
                }
                v.sort_by_key(|(k, _)| *k);
                v
            })
            .collect();
        let d = QuadraticDatum::new(DatumKind::Commutative, weights, forms.pairing(&space), rels).unwrap();
        let dd = d.dual().dual();
        prop_assert_eq!(dd.kind(), DatumKind::Commutative);
        prop_assert!(dd.same_relations(&d));
        prop_assert_eq!(d.dual().relation_rank() + d.relation_rank(), d.quadratic_dim());
    }
}

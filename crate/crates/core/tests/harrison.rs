use std::collections::BTreeMap;

use exactla::{q, rank, RationalSparseMatrix};
use koszul_core::brauer::FiniteSetObject;
use koszul_core::graphcx::{build_complex, GraphFamily, Variant};
use koszul_core::harrison::{
    ce_complex, harrison_complex, harrison_species_complex, hcom_species, hcom_table, hlie_table, koszul_report,
    relative_hcom, GradedAlgebraPresentation, GradedLieAlgebra, HarrisonError, HcomCell, HcomTable,
};
use koszul_core::species::Species;
use proptest::prelude::*;

/// Dimension of the length-`p` words over letters of the given shifted
/// degrees modulo all signed `(r, p−r)`-shuffle products, by brute force over
/// position subsets.
fn brute_shuffle_quotient(shifted: &[i64], p: usize) -> usize {
    let m = shifted.len();
    let words: Vec<Vec<usize>> = (0..m.pow(p as u32))
        .map(|mut x| {
            let mut w = vec![0; p];
            for slot in w.iter_mut() {
                *slot = x % m;
                x /= m;
            }
            w
        })
        .collect();
    let index: BTreeMap<&Vec<usize>, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut triplets = Vec::new();
    let mut row = 0;
    for w in &words {
        for r in 1..p {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for mask in 0u32..(1 << p) {
                if mask.count_ones() as usize != r {
                    continue;
                }
                let (u, v) = (&w[..r], &w[r..]);
                let mut out = Vec::with_capacity(p);
                let (mut a, mut b) = (0, 0);
                let mut sign = 1;
                for pos in 0..p {
                    if mask & (1 << pos) != 0 {
                        // u[a] jumps over the v letters already placed.
                        for x in &v[..b] {
                            if (shifted[u[a]] * shifted[*x]) % 2 != 0 {
                                sign = -sign;
                            }
                        }
                        out.push(u[a]);
                        a += 1;
                    } else {
                        out.push(v[b]);
                        b += 1;
                    }
                }
                *acc.entry(index[&out]).or_default() += sign;
            }
            for (c, x) in acc {
                if x != 0 {
                    triplets.push((row, c, x));
                }
            }
            row += 1;
        }
    }
    let m = RationalSparseMatrix::from_int_triplets(row.max(1), words.len(), triplets).unwrap();
    words.len() - rank(&m)
}

fn zero_product_algebra(degrees: &[i64]) -> GradedAlgebraPresentation {
    let mut a = GradedAlgebraPresentation::new();
    for (i, d) in degrees.iter().enumerate() {
        a.add_generator(format!("x{i}"), *d, *d, 1).unwrap();
    }
    a
}

fn total_in_arity(t: &HcomTable, p: usize) -> usize {
    t.cells.iter().filter(|c| c.p == p).map(|c| c.dim).sum()
}

#[test]
fn shuffle_quotient_matches_brute_force() {
    for degrees in [vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 1], vec![0, 0, 1]] {
        let a = zero_product_algebra(&degrees);
        let table = hcom_table(&a, 5).unwrap();
        let shifted: Vec<i64> = degrees.iter().map(|d| d + 1).collect();
        for p in 1..=5 {
            if degrees.len().pow(p as u32) > 300 {
                continue;
            }
            assert_eq!(
                total_in_arity(&table, p),
                brute_shuffle_quotient(&shifted, p),
                "degrees {degrees:?} arity {p}"
            );
        }
    }
}

#[test]
fn one_dimensional_zero_product() {
    let table = hcom_table(&zero_product_algebra(&[0]), 6).unwrap();
    let dims: Vec<usize> = (1..=6).map(|p| total_in_arity(&table, p)).collect();
    assert_eq!(dims, vec![1, 1, 0, 0, 0, 0]);
    let odd = hcom_table(&zero_product_algebra(&[1]), 6).unwrap();
    let dims: Vec<usize> = (1..=6).map(|p| total_in_arity(&odd, p)).collect();
    assert_eq!(dims, vec![1, 0, 0, 0, 0, 0]);
}

#[test]
fn necklace_counts_for_even_shifted_letters() {
    // Letters of odd degree shift to even degree: the quotient is the free Lie
    // algebra count (1/p) Σ_{d|p} μ(d) m^{p/d}.
    let mobius = |n: usize| -> i64 {
        let (mut n, mut k, mut mu) = (n, 2, 1);
        while k * k <= n {
            if n % k == 0 {
                n /= k;
                if n % k == 0 {
                    return 0;
                }
                mu = -mu;
            }
            k += 1;
        }
        if n > 1 {
            -mu
        } else {
            mu
        }
    };
    let witt = |m: i64, p: usize| -> usize {
        let s: i64 = (1..=p)
            .filter(|d| p % d == 0)
            .map(|d| mobius(d) * m.pow((p / d) as u32))
            .sum();
        (s / p as i64) as usize
    };
    let table = hcom_table(&zero_product_algebra(&[1, 1]), 5).unwrap();
    for p in 1..=5 {
        assert_eq!(total_in_arity(&table, p), witt(2, p), "arity {p}");
    }
}

fn truncated_polynomial(top: u32) -> GradedAlgebraPresentation {
    let mut a = GradedAlgebraPresentation::new();
    for k in 1..=top {
        a.add_generator(format!("x^{k}"), 0, 0, k).unwrap();
    }
    for i in 1..=top {
        for j in i..=top {
            if i + j <= top {
                a.set_product((i - 1) as usize, (j - 1) as usize, vec![((i + j - 1) as usize, q(1))])
                    .unwrap();
            }
        }
    }
    a
}

#[test]
fn polynomial_algebra_has_only_its_generator() {
    let a = truncated_polynomial(5);
    a.check().unwrap();
    let table = hcom_table(&a, 5).unwrap();
    assert_eq!(
        table.cells,
        vec![HcomCell {
            p: 1,
            q: 0,
            w: 1,
            dim: 1
        }]
    );
    assert!(koszul_report(&[table], 5).is_empty());
}

#[test]
fn cubic_truncation_is_not_koszul() {
    // ℚ[x]/(x³) without unit: the cubic relation is a class in arity 2, weight 3.
    let mut a = GradedAlgebraPresentation::new();
    let x = a.add_generator("x", 0, 0, 1).unwrap();
    let x2 = a.add_generator("x2", 0, 0, 2).unwrap();
    a.set_product(x, x, vec![(x2, q(1))]).unwrap();
    let table = hcom_table(&a, 4).unwrap();
    assert_eq!(table.get(1, 0, 1), 1);
    assert_eq!(table.get(2, 0, 3), 1);
    let report = koszul_report(&[table], 4);
    assert!(report.iter().any(|c| (c.p, c.w) == (2, 3)));
    assert!(report.iter().all(|c| c.p != c.w as usize));
}

#[test]
fn zero_product_has_no_differential() {
    let a = zero_product_algebra(&[0, 2]);
    for w in 1..=4 {
        for qq in 0..=8 {
            let cx = harrison_complex(&a, qq, w).unwrap();
            for p in 2..=w as i64 {
                assert!(cx.differential(p).is_zero());
            }
        }
    }
}

#[test]
fn algebra_presentations_are_validated() {
    let mut a = GradedAlgebraPresentation::new();
    assert!(matches!(
        a.add_generator("z", 0, 0, 0),
        Err(HarrisonError::ZeroWeight(_))
    ));
    let x = a.add_generator("x", 1, 0, 1).unwrap();
    let y = a.add_generator("y", 2, 0, 2).unwrap();
    let z = a.add_generator("z", 0, 0, 2).unwrap();
    assert!(matches!(
        a.set_product(x, x, vec![(y, q(1))]),
        Err(HarrisonError::NotCommutative(..))
    ));
    assert!(matches!(
        a.set_product(x, x, vec![(z, q(1))]),
        Err(HarrisonError::Inhomogeneous(..))
    ));
    assert!(a.set_product(x, x, vec![(z, q(5))]).is_err());
    assert!(matches!(
        a.set_product(x, 7, vec![]),
        Err(HarrisonError::IndexOutOfRange(7))
    ));

    // a·a = b and b·e = d, but a·e = 0, so (a·a)·e ≠ a·(a·e).
    let mut bad = GradedAlgebraPresentation::new();
    let a1 = bad.add_generator("a", 0, 0, 1).unwrap();
    let e1 = bad.add_generator("e", 0, 0, 1).unwrap();
    let b1 = bad.add_generator("b", 0, 0, 2).unwrap();
    let d1 = bad.add_generator("d", 0, 0, 3).unwrap();
    bad.set_product(a1, a1, vec![(b1, q(1))]).unwrap();
    bad.set_product(b1, e1, vec![(d1, q(1))]).unwrap();
    assert!(matches!(bad.check(), Err(HarrisonError::NotAssociative(..))));
}

#[test]
fn lowest_weight_of_z1_is_indecomposable() {
    let t = hcom_species(&Species::z(1), &FiniteSetObject::range(3), 1).unwrap();
    assert_eq!(
        t.cells,
        vec![HcomCell {
            p: 1,
            q: 1,
            w: 1,
            dim: 1
        }]
    );
    let json = serde_json::to_value(&t).unwrap();
    assert_eq!(json["family"], "Z1");
    assert_eq!(json["S"], serde_json::json!([1, 2, 3]));
    assert_eq!(json["cells"][0]["dim"], 1);
}

#[test]
fn species_complexes_square_to_zero() {
    for sp in [
        Species::z(1),
        Species::e(1),
        Species::e_mod_kappa2(),
        Species::z(2),
        Species::e(2),
    ] {
        for s in 0..=3 {
            for w in 1..=3 {
                harrison_species_complex(&sp, &FiniteSetObject::range(s), w)
                    .unwrap_or_else(|e| panic!("{sp:?} |S|={s} w={w}: {e}"));
            }
        }
    }
}

#[test]
fn harrison_homology_matches_connected_graphs() {
    for n in [1, 2] {
        for s in 0..=3 {
            for w in 1..=3 {
                let set = FiniteSetObject::range(s);
                let table = hcom_species(&Species::z(n), &set, w).unwrap();
                let graphs = build_complex(GraphFamily::RbConn, Variant::Z, n, &set, w)
                    .unwrap()
                    .homology_by_p()
                    .unwrap();
                for p in 1..=(w as usize + 1) {
                    let from_graphs = graphs.get(&(p as i64)).copied().unwrap_or(0);
                    assert_eq!(
                        table.get(p, (n * w) as i64, w),
                        from_graphs,
                        "n={n} |S|={s} w={w} p={p}"
                    );
                }
            }
        }
    }
}

#[test]
fn z1_and_e1_are_diagonal_on_small_sets() {
    let mut tables = Vec::new();
    for s in 0..=2 {
        for sp in [Species::z(1), Species::e(1)] {
            tables.push(hcom_species(&sp, &FiniteSetObject::range(s), 3).unwrap());
        }
    }
    assert_eq!(koszul_report(&tables, 3), vec![]);
}

#[test]
fn relative_homology_of_z1_and_e1() {
    for s in 0..=2 {
        let t = relative_hcom(1, &FiniteSetObject::range(s), 3).unwrap();
        let expected = if s == 1 {
            vec![HcomCell {
                p: 2,
                q: 1,
                w: 1,
                dim: 1,
            }]
        } else {
            vec![]
        };
        assert_eq!(t.cells, expected, "|S|={s}");
    }
}

fn free_lie_two_generators() -> GradedLieAlgebra {
    let mut l = GradedLieAlgebra::new();
    let x = l.add_generator("x", 1).unwrap();
    let y = l.add_generator("y", 1).unwrap();
    let xy = l.add_generator("[x,y]", 2).unwrap();
    let xxy = l.add_generator("[x,[x,y]]", 3).unwrap();
    let yxy = l.add_generator("[y,[x,y]]", 3).unwrap();
    l.set_bracket(x, y, vec![(xy, q(1))]).unwrap();
    l.set_bracket(x, xy, vec![(xxy, q(1))]).unwrap();
    l.set_bracket(y, xy, vec![(yxy, q(1))]).unwrap();
    l
}

#[test]
fn abelian_lie_algebra_gives_exterior_powers() {
    let mut l = GradedLieAlgebra::new();
    l.add_generator("a", 1).unwrap();
    l.add_generator("b", 1).unwrap();
    let t = hlie_table(&l, 3).unwrap();
    assert_eq!(
        t.cells,
        vec![
            HcomCell {
                p: 1,
                q: 0,
                w: 1,
                dim: 2
            },
            HcomCell {
                p: 2,
                q: 0,
                w: 2,
                dim: 1
            }
        ]
    );
}

#[test]
fn truncated_free_lie_algebra_is_concentrated_in_degree_one() {
    let t = hlie_table(&free_lie_two_generators(), 3).unwrap();
    assert_eq!(
        t.cells,
        vec![HcomCell {
            p: 1,
            q: 0,
            w: 1,
            dim: 2
        }]
    );
}

#[test]
fn quadratic_relations_are_the_second_homology() {
    // Lie(a, b, c)/([a,b]) through weight 2: H₁ = W and H₂ in weight 2 = Q.
    let mut l = GradedLieAlgebra::new();
    let a = l.add_generator("a", 1).unwrap();
    let b = l.add_generator("b", 1).unwrap();
    let c = l.add_generator("c", 1).unwrap();
    let ac = l.add_generator("[a,c]", 2).unwrap();
    let bc = l.add_generator("[b,c]", 2).unwrap();
    l.set_bracket(a, c, vec![(ac, q(1))]).unwrap();
    l.set_bracket(b, c, vec![(bc, q(1))]).unwrap();
    let t = hlie_table(&l, 2).unwrap();
    assert_eq!(t.get(1, 0, 1), 3);
    assert_eq!(t.get(2, 0, 2), 1);
    let cx = ce_complex(&l, 2).unwrap();
    let classes = cx.homology_basis(2).unwrap();
    assert_eq!(classes.len(), 1);
    let labels = cx.labels(2);
    let support: Vec<&str> = classes[0].iter().map(|(i, _)| labels[*i].as_str()).collect();
    assert_eq!(support, vec!["a^b"]);
}

#[test]
fn jacobi_failures_are_reported() {
    let mut l = GradedLieAlgebra::new();
    let a = l.add_generator("a", 1).unwrap();
    let b = l.add_generator("b", 1).unwrap();
    let f = l.add_generator("f", 1).unwrap();
    let c = l.add_generator("c", 2).unwrap();
    let d = l.add_generator("d", 3).unwrap();
    l.set_bracket(a, b, vec![(c, q(1))]).unwrap();
    l.set_bracket(f, c, vec![(d, q(1))]).unwrap();
    assert!(matches!(l.check(), Err(HarrisonError::Jacobi(..))));
    assert!(ce_complex(&l, 3).is_err());
    assert!(matches!(
        l.set_bracket(a, a, vec![(c, q(1))]),
        Err(HarrisonError::NotAntisymmetric(..))
    ));
    assert!(matches!(
        l.set_bracket(a, c, vec![(c, q(1))]),
        Err(HarrisonError::Inhomogeneous(..))
    ));
}

#[test]
fn koszul_report_lists_exactly_the_off_diagonal_cells() {
    let mut t = HcomTable::new("synthetic", vec![1], 1);
    t.cells = vec![
        HcomCell {
            p: 1,
            q: 1,
            w: 1,
            dim: 3,
        },
        HcomCell {
            p: 1,
            q: 2,
            w: 2,
            dim: 1,
        },
        HcomCell {
            p: 3,
            q: 4,
            w: 4,
            dim: 2,
        },
    ];
    let report = koszul_report(std::slice::from_ref(&t), 3);
    assert_eq!(report.len(), 1);
    assert_eq!((report[0].p, report[0].w, report[0].set.clone()), (1, 2, vec![1]));
    assert_eq!(koszul_report(&[t], 4).len(), 2);
}

fn monomial_algebra(degrees: Vec<i64>, top: u32) -> GradedAlgebraPresentation {
    // Monomials of positive total degree ≤ top in generators of even degree.
    let m = degrees.len();
    let mut monomials: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..m {
        monomials = monomials
            .into_iter()
            .flat_map(|e| (0..=top).map(move |k| [e.clone(), vec![k]].concat()))
            .collect();
    }
    monomials.retain(|e| {
        let t: u32 = e.iter().sum();
        (1..=top).contains(&t)
    });
    let mut a = GradedAlgebraPresentation::new();
    for e in &monomials {
        let d: i64 = e.iter().zip(&degrees).map(|(k, d)| *k as i64 * d).sum();
        a.add_generator(format!("{e:?}"), d, d, e.iter().sum()).unwrap();
    }
    for (i, u) in monomials.iter().enumerate() {
        for (j, v) in monomials.iter().enumerate().skip(i) {
            let prod: Vec<u32> = u.iter().zip(v).map(|(x, y)| x + y).collect();
            if let Some(k) = monomials.iter().position(|e| *e == prod) {
                a.set_product(i, j, vec![(k, q(1))]).unwrap();
            }
        }
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn square_zero_chains_match_brute_force(degrees in prop::collection::vec(0i64..3, 1..=2), p in 1usize..=4) {
        let a = zero_product_algebra(&degrees);
        let table = hcom_table(&a, p as u32).unwrap();
        let shifted: Vec<i64> = degrees.iter().map(|d| d + 1).collect();
        prop_assert_eq!(total_in_arity(&table, p), brute_shuffle_quotient(&shifted, p));
    }

    #[test]
    fn polynomial_algebras_are_koszul(
        degrees in prop::collection::vec(prop::sample::select(vec![0i64, 2]), 1..=2),
        top in 2u32..=3,
    ) {
        let a = monomial_algebra(degrees.clone(), top);
        a.check().unwrap();
        let table = hcom_table(&a, top).unwrap();
        prop_assert!(koszul_report(std::slice::from_ref(&table), top).is_empty());
        let generators: usize = table.cells.iter().filter(|c| c.p == 1).map(|c| c.dim).sum();
        prop_assert_eq!(generators, degrees.len());
    }

    #[test]
    fn tables_round_trip_through_json(cells in prop::collection::vec((1usize..5, -3i64..8, 1u32..5, 1usize..9), 0..6)) {
        let mut t = HcomTable::new("Z1", vec![1, 2], 1);
        t.cells = cells.into_iter().map(|(p, q, w, dim)| HcomCell { p, q, w, dim }).collect();
        let back: HcomTable = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        prop_assert_eq!(back, t);
    }
}

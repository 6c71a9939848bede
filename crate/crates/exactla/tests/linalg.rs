use exactla::{
    mapping_cone, modular_check, nullspace_basis, q, rank, ChainComplex, ChainMap, ExactlaError, Grading,
    RationalSparseMatrix, Q,
};
use proptest::prelude::*;

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("b{i}")).collect()
}

#[test]
fn rank_examples() {
    assert_eq!(rank(&RationalSparseMatrix::identity(3)), 3);
    assert_eq!(rank(&RationalSparseMatrix::from_dense(&[vec![1, 2], vec![2, 4]])), 1);
    assert_eq!(rank(&RationalSparseMatrix::zero(4, 7)), 0);
}

#[test]
fn nullspace_examples() {
    assert_eq!(nullspace_basis(&RationalSparseMatrix::zero(2, 2)).len(), 2);
    assert!(nullspace_basis(&RationalSparseMatrix::identity(3)).is_empty());
    let m = RationalSparseMatrix::from_dense(&[vec![1, 1], vec![1, 1]]);
    let k = nullspace_basis(&m);
    assert_eq!(k.len(), 1);
    let v = &k[0];
    assert_eq!(v.len(), 2);
    assert_eq!(&v[0].1 + &v[1].1, q(0));
}

#[test]
fn identity_complex_is_acyclic() {
    let mut c = ChainComplex::new();
    c.set_basis(0, labels(1), None);
    c.set_basis(1, labels(1), None);
    c.set_differential(1, RationalSparseMatrix::identity(1));
    assert!(c.homology_dims().unwrap().is_zero());
}

#[test]
fn zero_differentials_give_chain_dims() {
    let mut c = ChainComplex::new();
    c.set_basis(0, labels(2), None);
    c.set_basis(1, labels(3), None);
    c.set_basis(2, labels(1), None);
    let h = c.homology_dims().unwrap();
    assert_eq!((h.total(0), h.total(1), h.total(2)), (2, 3, 1));
}

/// Simplicial chains of the boundary of the 3-simplex, built from the
/// alternating face formula.
fn sphere() -> ChainComplex {
    let subsets = |k: usize| -> Vec<Vec<usize>> {
        (0u32..16)
            .filter(|m| m.count_ones() as usize == k + 1)
            .map(|m| (0..4).filter(|i| m & (1 << i) != 0).collect())
            .collect()
    };
    let mut c = ChainComplex::new();
    for k in 0..=2 {
        c.set_basis(k as i64, subsets(k).iter().map(|s| format!("{s:?}")).collect(), None);
    }
    for k in 1..=2usize {
        let src = subsets(k);
        let tgt = subsets(k - 1);
        let mut trip = Vec::new();
        for (j, s) in src.iter().enumerate() {
            for drop in 0..s.len() {
                let mut face = s.clone();
                face.remove(drop);
                let i = tgt.iter().position(|t| *t == face).unwrap();
                trip.push((i, j, if drop % 2 == 0 { 1 } else { -1 }));
            }
        }
        let d = RationalSparseMatrix::from_int_triplets(tgt.len(), src.len(), trip).unwrap();
        c.set_differential(k as i64, d);
    }
    c
}

#[test]
fn sphere_homology() {
    let h = sphere().homology_dims().unwrap();
    assert_eq!((h.total(0), h.total(1), h.total(2)), (1, 0, 1));
    let reps = sphere().homology_basis(2).unwrap();
    assert_eq!(reps.len(), 1);
}

#[test]
fn nonzero_square_reports_degree() {
    let mut c = ChainComplex::new();
    for k in 0..3 {
        c.set_basis(k, labels(1), None);
    }
    c.set_differential(1, RationalSparseMatrix::identity(1));
    c.set_differential(2, RationalSparseMatrix::identity(1));
    match c.homology_dims() {
        Err(ExactlaError::NonzeroSquare {
            degree: 1, upper: 2, ..
        }) => {}
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn gradings_split_blocks_and_are_checked() {
    let mut c = ChainComplex::new();
    let g = |q, w| Grading::new(q, w);
    c.set_basis(0, labels(2), Some(vec![g(1, 1), g(2, 2)]));
    c.set_basis(1, labels(2), Some(vec![g(1, 1), g(2, 2)]));
    c.set_differential(1, RationalSparseMatrix::from_dense(&[vec![1, 0], vec![0, 0]]));
    let h = c.homology_dims().unwrap();
    assert_eq!(h.get(0, Some(g(1, 1))), 0);
    assert_eq!(h.get(0, Some(g(2, 2))), 1);
    assert_eq!(h.get(1, Some(g(2, 2))), 1);

    c.set_differential(1, RationalSparseMatrix::from_dense(&[vec![0, 1], vec![0, 0]]));
    assert!(matches!(
        c.homology_dims(),
        Err(ExactlaError::GradingNotPreserved { degree: 1, .. })
    ));
}

#[test]
fn cone_of_identity_is_acyclic() {
    let s = sphere();
    let mut f = ChainMap::default();
    for k in 0..=2 {
        f.maps.insert(k, RationalSparseMatrix::identity(s.dim(k)));
    }
    let cone = mapping_cone(&s, &s, &f).unwrap();
    cone.check_square_zero().unwrap();
    assert!(cone.homology_dims().unwrap().is_zero());
}

#[test]
fn cone_of_zero_map_is_sum_with_shift() {
    let s = sphere();
    let cone = mapping_cone(&s, &s, &ChainMap::default()).unwrap();
    let h = cone.homology_dims().unwrap();
    // H(cone) = H(B) ⊕ H(A)[1].
    assert_eq!((h.total(0), h.total(1), h.total(2), h.total(3)), (1, 1, 1, 1));
}

#[test]
fn rational_entries() {
    let half = Q::new(1.into(), 2.into());
    let m = RationalSparseMatrix::from_triplets(
        2,
        2,
        vec![(0, 0, half.clone()), (0, 1, q(1)), (1, 0, q(1)), (1, 1, q(2))],
    )
    .unwrap();
    assert_eq!(rank(&m), 1);
    let r = modular_check(&m, &[3, 5, 7]).unwrap();
    assert!(r.consistent && r.confirmed);
}

fn small_matrix() -> impl Strategy<Value = RationalSparseMatrix> {
    (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
        proptest::collection::vec((0..r, 0..c, -3i64..4, 1i64..4), 0..20).prop_map(move |t| {
            RationalSparseMatrix::from_triplets(
                r,
                c,
                t.into_iter().map(|(i, j, n, d)| (i, j, Q::new(n.into(), d.into()))),
            )
            .unwrap()
        })
    })
}

proptest! {
    #[test]
    fn rank_is_transpose_invariant(m in small_matrix()) {
        prop_assert_eq!(rank(&m), rank(&m.transpose()));
    }

    #[test]
    fn rank_nullity(m in small_matrix()) {
        let k = nullspace_basis(&m);
        prop_assert_eq!(k.len() + rank(&m), m.cols());
        for v in &k {
            prop_assert!(m.apply(v).is_empty());
        }
    }

    #[test]
    fn modular_ranks_bounded(m in small_matrix()) {
        // Denominators are < 4, so these primes are always admissible.
        let r = modular_check(&m, &[5, 7, 1_000_003]).unwrap();
        prop_assert!(r.consistent);
        prop_assert_eq!(r.per_prime[2].rank, r.rational_rank);
    }

    #[test]
    fn rank_ignores_entry_order(m in small_matrix(), seed in 0u64..1000) {
        let mut t: Vec<_> = m.entries().map(|(i, j, v)| (i, j, v.clone())).collect();
        let n = t.len().max(1);
        t.rotate_left((seed as usize) % n);
        t.reverse();
        let m2 = RationalSparseMatrix::from_triplets(m.rows(), m.cols(), t).unwrap();
        prop_assert_eq!(rank(&m), rank(&m2));
    }
}

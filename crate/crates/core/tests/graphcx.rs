use std::collections::{BTreeMap, BTreeSet};

use exactla::q;
use koszul_core::brauer::{compose, hom_basis, FiniteSetObject, Label};
use koszul_core::graphcx::{
    act, build_complex, deg_cgp, deg_cgp_from_degrees, differential, differential_of, enumerate, parse_graph,
    relative_g_homology, transfer_pi, transfer_t, GraphFamily, GraphVector, OrientationClass, RbGraph, Variant,
};
use koszul_core::permutations;
use koszul_core::species::zn_basis;
use proptest::prelude::*;

fn graph(w: Vec<u32>, legs: Vec<(Label, usize)>, black: Vec<(usize, usize)>, red: Vec<(usize, usize)>) -> RbGraph {
    RbGraph::new(w, legs, black, red).unwrap()
}

fn single(g: &RbGraph) -> GraphVector {
    let (c, s) = g.canonicalize().unwrap().into_option().unwrap();
    GraphVector::from([(c, q(i64::from(s)))])
}

#[test]
fn canonicalize_examples() {
    let theta = graph(vec![0, 0], vec![], vec![(0, 1), (0, 1), (0, 1)], vec![]);
    assert_eq!(theta.canonicalize().unwrap(), OrientationClass::Zero);

    let lone = graph(vec![2], vec![], vec![], vec![]);
    assert_eq!(
        lone.canonicalize().unwrap(),
        OrientationClass::Nonzero {
            graph: lone.clone(),
            sign: 1
        }
    );

    // Two black loops exchanged by the vertex swap.
    let dumbbell = graph(vec![0, 0], vec![], vec![(0, 0), (0, 1), (1, 1)], vec![]);
    assert_eq!(dumbbell.canonicalize().unwrap(), OrientationClass::Zero);

    assert!(graph(vec![0], vec![(1, 0)], vec![], vec![]).canonicalize().is_err());
}

/// Two vertices, a black loop at the first, one red and two black edges
/// between them, legs 1 and 2 at the second.
fn double_edge_graph(ga: u32, gb: u32) -> RbGraph {
    graph(
        vec![ga, gb],
        vec![(1, 1), (2, 1)],
        vec![(0, 0), (0, 1), (0, 1)],
        vec![(0, 1)],
    )
}

#[test]
fn double_edge_graph_vanishes_and_its_terms_cancel() {
    for (ga, gb) in [(0, 0), (1, 0), (2, 3)] {
        let g = double_edge_graph(ga, gb);
        assert_eq!(g.canonicalize().unwrap(), OrientationClass::Zero);
        // Recoloring either parallel edge gives one graph with opposite signs.
        let r1 = g.recolor(1).canonicalize().unwrap().into_option().unwrap();
        let r2 = g.recolor(2).canonicalize().unwrap().into_option().unwrap();
        assert_eq!(r1.0, r2.0);
        // Term i carries (−1)^i, so equal orientations mean cancellation.
        assert_eq!(r1.1, r2.1);
        let c1 = g.contract(1, Variant::E).unwrap().canonicalize().unwrap();
        let c2 = g.contract(2, Variant::E).unwrap().canonicalize().unwrap();
        assert_eq!(c1, c2);
        assert!(differential(&g, Variant::E, GraphFamily::Rb).unwrap().is_empty());
    }
}

#[test]
fn loop_contraction() {
    let g = graph(vec![0], vec![(1, 0)], vec![(0, 0)], vec![]);
    assert!(g.contract(0, Variant::Z).is_none());
    let c = g.contract(0, Variant::E).unwrap();
    assert_eq!(c.weights(), &[1]);
    assert!(c.black().is_empty());
    let d = differential(&g, Variant::Z, GraphFamily::G).unwrap();
    assert!(d.is_empty());
    let d = differential(&g, Variant::E, GraphFamily::G).unwrap();
    assert_eq!(d, single(&c));
}

// ---------------------------------------------------------------------------
// Brute-force oracle: labeled graphs up to all vertex permutations.

type Raw = (Vec<u32>, Vec<(Label, usize)>, Vec<(usize, usize)>, Vec<(usize, usize)>);

fn relabel(g: &Raw, p: &[usize]) -> (Raw, Vec<usize>) {
    let mut w = vec![0; g.0.len()];
    for (v, x) in g.0.iter().enumerate() {
        w[p[v]] = *x;
    }
    let e = |(a, b): (usize, usize)| if p[a] <= p[b] { (p[a], p[b]) } else { (p[b], p[a]) };
    let mut legs: Vec<_> = g.1.iter().map(|(l, v)| (*l, p[*v])).collect();
    legs.sort_unstable();
    let black: Vec<_> = g.2.iter().map(|x| e(*x)).collect();
    let mut order: Vec<usize> = (0..black.len()).collect();
    order.sort_by_key(|&i| black[i]);
    let sorted = order.iter().map(|&i| black[i]).collect();
    let mut red: Vec<_> = g.3.iter().map(|x| e(*x)).collect();
    red.sort_unstable();
    ((w, legs, sorted, red), order)
}

fn parity(p: &[usize]) -> i32 {
    let mut s = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

/// `None` for a zero class; otherwise the orbit's minimal form.
fn oracle_class(g: &Raw) -> Option<Raw> {
    let black: BTreeSet<_> = g.2.iter().collect();
    if black.len() < g.2.len() {
        return None;
    }
    let nv = g.0.len();
    let (base, base_order) = relabel(g, &(0..nv).collect::<Vec<_>>());
    let base_sign = parity(&base_order);
    let mut best = None;
    for p in permutations(nv) {
        let (h, order) = relabel(g, &p);
        if h == base && parity(&order) != base_sign {
            return None;
        }
        if best.as_ref().map_or(true, |b| h < *b) {
            best = Some(h);
        }
    }
    best
}

/// Connected/black-connected multigraphs with a fixed species weight, with
/// no pruning beyond admissibility.
fn oracle_generators(family: GraphFamily, variant: Variant, legs: &[Label], w: u32) -> BTreeSet<Raw> {
    let mut out = BTreeSet::new();
    for nv in 1..=w as usize {
        let types: Vec<(usize, usize)> = (0..nv).flat_map(|a| (a..nv).map(move |b| (a, b))).collect();
        let weight_choices: Vec<Vec<u32>> = if variant == Variant::Z {
            vec![vec![0; nv]]
        } else {
            let mut all = vec![vec![]];
            for _ in 0..nv {
                all = all
                    .into_iter()
                    .flat_map(|v: Vec<u32>| (0..=w).map(move |x| [v.clone(), vec![x]].concat()))
                    .collect();
            }
            all
        };
        for ws in weight_choices {
            let total_w: u32 = ws.iter().sum();
            let twice_e = w as i64 + 2 * nv as i64 - 2 * total_w as i64 - legs.len() as i64;
            if twice_e < 0 || twice_e % 2 == 1 {
                continue;
            }
            let ne = (twice_e / 2) as usize;
            let mut placements = vec![vec![]];
            for &l in legs {
                placements = placements
                    .into_iter()
                    .flat_map(|v: Vec<(Label, usize)>| (0..nv).map(move |x| [v.clone(), vec![(l, x)]].concat()))
                    .collect();
            }
            // Multisets of colored edges of size ne.
            let colored: Vec<((usize, usize), bool)> = types.iter().flat_map(|t| [(*t, true), (*t, false)]).collect();
            let mut multisets: Vec<Vec<usize>> = vec![vec![]];
            for _ in 0..ne {
                multisets = multisets
                    .into_iter()
                    .flat_map(|m: Vec<usize>| {
                        let start = m.last().copied().unwrap_or(0);
                        (start..colored.len()).map(move |i| [m.clone(), vec![i]].concat())
                    })
                    .collect();
            }
            for legs in &placements {
                for m in &multisets {
                    let black: Vec<_> = m.iter().filter(|&&i| colored[i].1).map(|&i| colored[i].0).collect();
                    let red: Vec<_> = m.iter().filter(|&&i| !colored[i].1).map(|&i| colored[i].0).collect();
                    let g = RbGraph::new(ws.clone(), legs.clone(), black.clone(), red.clone()).unwrap();
                    if g.check_admissible().is_err() || !g.family_admits(family) {
                        continue;
                    }
                    if let Some(c) = oracle_class(&(ws.clone(), legs.clone(), black, red)) {
                        out.insert(c);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn enumeration_matches_brute_force() {
    let cases: Vec<(GraphFamily, Variant, Vec<Label>, u32)> = vec![
        (GraphFamily::G, Variant::Z, vec![], 2),
        (GraphFamily::G, Variant::Z, vec![], 4),
        (GraphFamily::G, Variant::E, vec![], 2),
        (GraphFamily::G, Variant::E, vec![], 3),
        (GraphFamily::G, Variant::Z, vec![1], 3),
        (GraphFamily::RbConn, Variant::Z, vec![1, 2], 2),
        (GraphFamily::RbConn, Variant::E, vec![1], 2),
        (GraphFamily::Rb, Variant::Z, vec![1, 2, 3], 3),
        (GraphFamily::Rb, Variant::E, vec![], 3),
    ];
    for (family, variant, legs, w) in cases {
        let set = FiniteSetObject::new(legs.iter().copied()).unwrap();
        let ours = enumerate(family, variant, &set, w).unwrap();
        let oracle = oracle_generators(family, variant, &legs, w);
        assert_eq!(ours.len(), oracle.len(), "{family:?} {variant:?} {legs:?} w={w}");
    }
}

#[test]
fn black_graphs_without_legs() {
    // Trivalent-or-more connected black graphs: nothing survives in weight 2.
    let set = FiniteSetObject::empty();
    assert!(enumerate(GraphFamily::G, Variant::Z, &set, 2).unwrap().is_empty());
    for w in 1..=4 {
        for g in enumerate(GraphFamily::G, Variant::Z, &set, w).unwrap() {
            assert!(g.red().is_empty() && g.connected());
            assert!((0..g.vertex_count()).all(|v| g.valence(v) >= 3));
        }
    }
}

fn all_windows() -> Vec<(GraphFamily, Variant, u32, usize, u32)> {
    let mut out = Vec::new();
    for family in [GraphFamily::Rb, GraphFamily::RbConn, GraphFamily::G] {
        for variant in [Variant::Z, Variant::E] {
            for n in [1, 2] {
                for s in 0..=3 {
                    for w in 0..=3 {
                        out.push((family, variant, n, s, w));
                    }
                }
            }
        }
    }
    out
}

#[test]
fn differential_squares_to_zero() {
    for (family, variant, n, s, w) in all_windows() {
        let gc = build_complex(family, variant, n, &FiniteSetObject::range(s), w).unwrap();
        gc.complex.check_square_zero().unwrap();
        gc.complex.check_gradings().unwrap();
    }
}

#[test]
fn rb_resolves_z_and_e() {
    for s in 0..=3 {
        let set = FiniteSetObject::range(s);
        for w in 0..=3 {
            for n in [1, 2] {
                let gc = build_complex(GraphFamily::Rb, Variant::Z, n, &set, w).unwrap();
                let h = gc.homology().unwrap();
                let expected = zn_basis(&set, w, n).len();
                let qd = i64::from(n * w);
                assert_eq!(h.total(qd), expected, "|S|={s} w={w} n={n}");
                let elsewhere: usize = gc.bases.keys().filter(|&&k| k != qd).map(|&k| h.total(k)).sum();
                assert_eq!(elsewhere, 0);
            }
            let gc = build_complex(GraphFamily::Rb, Variant::E, 1, &set, w).unwrap();
            let expected = koszul_core::species::en_basis(&set, w, 1).len();
            assert_eq!(gc.homology().unwrap().total(i64::from(w)), expected, "E |S|={s} w={w}");
        }
    }
}

#[test]
fn harrison_degree_counts_black_edges() {
    let gc = build_complex(GraphFamily::RbConn, Variant::Z, 1, &FiniteSetObject::range(2), 2).unwrap();
    for (k, b) in &gc.bases {
        for g in b {
            assert_eq!(gc.p_of(*k), g.black().len() as i64 + 1);
        }
    }
}

#[test]
fn transfer_maps() {
    for variant in [Variant::Z, Variant::E] {
        for n in [1, 2] {
            for w in 1..=4 {
                let empty = FiniteSetObject::empty();
                let gens = enumerate(GraphFamily::G, variant, &empty, w).unwrap();
                for g in gens {
                    let x = GraphVector::from([(g.clone(), q(1))]);
                    let tx = transfer_t(&x, n).unwrap();
                    let ptx = transfer_pi(&tx).unwrap();
                    let expected: GraphVector = x.iter().map(|(h, c)| (h.clone(), c * q(g.deg_int(n)))).collect();
                    assert_eq!(ptx, expected);
                    let lhs = differential_of(&tx, variant, GraphFamily::G).unwrap();
                    let rhs = transfer_t(&differential_of(&x, variant, GraphFamily::G).unwrap(), n).unwrap();
                    assert_eq!(lhs, rhs);
                }
                for g in enumerate(GraphFamily::G, variant, &FiniteSetObject::range(1), w).unwrap() {
                    let x = GraphVector::from([(g, q(1))]);
                    let lhs = differential_of(&transfer_pi(&x).unwrap(), variant, GraphFamily::G).unwrap();
                    let rhs = transfer_pi(&differential_of(&x, variant, GraphFamily::G).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
    // A single weight-2 vertex: π(t(Γ)) = 2n·Γ.
    let lone = graph(vec![2], vec![], vec![], vec![]);
    for n in [1, 2, 3] {
        let x = single(&lone);
        let got = transfer_pi(&transfer_t(&x, n).unwrap()).unwrap();
        assert_eq!(got, GraphVector::from([(lone.clone(), q(2 * i64::from(n)))]));
    }
}

#[test]
fn deleting_a_leg_at_a_trivalent_vertex_is_zero() {
    let g = graph(vec![0, 1, 2], vec![(1, 0)], vec![(0, 1), (0, 2)], vec![]);
    assert!(transfer_pi(&single(&g)).unwrap().is_empty());
    let x: GraphVector = BTreeMap::new();
    assert!(transfer_t(&x, 1).unwrap().is_empty());
}

#[test]
fn cgp_degrees() {
    let lone = graph(vec![2], vec![], vec![], vec![]);
    assert_eq!(deg_cgp(&lone).unwrap(), -4);
    let mut checked = 0;
    for variant in [Variant::Z, Variant::E] {
        for s in 0..=2 {
            for w in 1..=4 {
                for g in enumerate(GraphFamily::G, variant, &FiniteSetObject::range(s), w).unwrap() {
                    for n in [1, 2, 3] {
                        assert_eq!(q(deg_cgp(&g).unwrap()), deg_cgp_from_degrees(&g, n).unwrap());
                        let genus = g.genus().unwrap();
                        assert_eq!(g.deg_int(n), i64::from(n) * (2 * genus + s as i64 - 2));
                    }
                    checked += 1;
                }
            }
        }
    }
    assert!(checked >= 50, "{checked}");
    let two = graph(vec![1, 1], vec![], vec![], vec![]);
    assert!(deg_cgp(&two).is_err());
    let red = graph(
        vec![0, 0],
        vec![(1, 0), (2, 0), (3, 1), (4, 1)],
        vec![(0, 1)],
        vec![(0, 1)],
    );
    assert!(deg_cgp(&red).is_err());
}

#[test]
fn vanishing_ranges() {
    for variant in [Variant::Z, Variant::E] {
        for n in [1u32, 2] {
            for s in 0..=2 {
                for w in 1..=3 {
                    let gc = build_complex(GraphFamily::G, variant, n, &FiniteSetObject::range(s), w).unwrap();
                    let qd = gc.q();
                    for (p, dim) in gc.homology_by_p().unwrap() {
                        let vanishes = if s > 0 {
                            i64::from(n) * (p + 1) < qd
                        } else {
                            i64::from(n) * p < qd
                        };
                        if vanishes {
                            assert_eq!(dim, 0, "{variant:?} n={n} |S|={s} p={p} q={qd}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn relative_black_homology_is_one_class() {
    let one = relative_g_homology(1, &FiniteSetObject::range(1), 1).unwrap();
    assert_eq!(one.get(&1), Some(&1));
    assert_eq!(one.values().sum::<usize>(), 1);
    for (s, w) in [(0, 1), (0, 2), (1, 2), (2, 1), (2, 2)] {
        let h = relative_g_homology(1, &FiniteSetObject::range(s), w).unwrap();
        assert_eq!(h.values().sum::<usize>(), 0, "|S|={s} w={w}");
    }
}

#[test]
fn parser_round_trip_and_errors() {
    let text = "w:0,0|legs:1@0,2@1|black:0-1,1-1|red:0-1";
    let g = parse_graph(text).unwrap();
    assert_eq!(g.to_string(), text);
    assert_eq!(parse_graph("w:|legs:|black:|red:").unwrap(), RbGraph::empty());
    for bad in [
        "",
        "w:0|legs:|black:",
        "w:0|legs:1@1|black:|red:",
        "w:0|legs:1@0,1@0|black:|red:",
        "w:x|legs:|black:|red:",
        "w:0|legs:|black:0-|red:",
        "w:0|legs:|black:0-0|red:|",
        "v:0|legs:|black:|red:",
    ] {
        assert!(parse_graph(bad).is_err(), "{bad}");
    }
}

#[test]
fn brauer_action_is_functorial() {
    for n in [1u32, 2] {
        let signed = n % 2 == 1;
        for s in [2usize, 4] {
            let set = FiniteSetObject::range(s);
            let graphs = enumerate(GraphFamily::Rb, Variant::Z, &set, 2).unwrap();
            for t in (0..=s).rev().step_by(2) {
                for u in (0..=t).rev().step_by(2) {
                    if t == s && u == t && s == 4 {
                        continue;
                    }
                    let fs = hom_basis(&set, &FiniteSetObject::range(t), signed);
                    let gs = hom_basis(&FiniteSetObject::range(t), &FiniteSetObject::range(u), signed);
                    for f in &fs {
                        for g in &gs {
                            let fg = compose(f, g).unwrap();
                            for x in graphs.iter().take(12) {
                                let direct = act(&fg, x, n).unwrap();
                                let stepwise = act(f, x, n)
                                    .unwrap()
                                    .and_then(|(y, s1)| act(g, &y, n).unwrap().map(|(z, s2)| (z, s1 * s2)));
                                assert_eq!(direct, stepwise, "n={n} f={f} g={g} x={x}");
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn brauer_action_commutes_with_the_differential() {
    for n in [1u32, 2] {
        let signed = n % 2 == 1;
        let set = FiniteSetObject::range(4);
        for x in enumerate(GraphFamily::Rb, Variant::E, &set, 2).unwrap() {
            for m in hom_basis(&set, &FiniteSetObject::range(2), signed).iter().take(6) {
                let apply = |v: &GraphVector| -> GraphVector {
                    let mut out = GraphVector::new();
                    for (g, c) in v {
                        if let Some((h, s)) = act(m, g, n).unwrap() {
                            koszul_core::graphcx::add_graph(&mut out, &h, &(c * q(i64::from(s)))).unwrap();
                        }
                    }
                    out
                };
                let v = GraphVector::from([(x.clone(), q(1))]);
                let lhs = differential_of(&apply(&v), Variant::E, GraphFamily::Rb).unwrap();
                let rhs = apply(&differential_of(&v, Variant::E, GraphFamily::Rb).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }
}

fn any_generator() -> impl Strategy<Value = RbGraph> {
    let pool: Vec<RbGraph> = [(0usize, 3u32), (1, 3), (2, 2), (3, 3)]
        .iter()
        .flat_map(|&(s, w)| {
            let set = FiniteSetObject::range(s);
            [Variant::Z, Variant::E]
                .into_iter()
                .flat_map(move |v| enumerate(GraphFamily::Rb, v, &set, w).unwrap())
        })
        .collect();
    proptest::sample::select(pool)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn canonical_form_is_relabeling_invariant(g in any_generator(), seed in any::<u64>()) {
        let nv = g.vertex_count();
        let perms = permutations(nv);
        let p = &perms[(seed as usize) % perms.len()];
        let eperms = permutations(g.black().len());
        let ep = &eperms[((seed / 7) as usize) % eperms.len()];
        let black: Vec<(usize, usize)> = ep.iter().map(|&i| {
            let (a, b) = g.black()[i];
            (p[a], p[b])
        }).collect();
        let mut w = vec![0; nv];
        for (v, x) in g.weights().iter().enumerate() {
            w[p[v]] = *x;
        }
        let legs = g.legs().iter().map(|(l, v)| (*l, p[*v])).collect();
        let red = g.red().iter().map(|(a, b)| (p[*a], p[*b])).collect();
        let h = RbGraph::new(w, legs, black, red).unwrap();
        let cg = g.canonicalize().unwrap().into_option();
        let ch = h.canonicalize().unwrap().into_option();
        match (cg, ch) {
            (Some((a, sa)), Some((b, sb))) => {
                prop_assert_eq!(a, b);
                let esign = if ep.iter().enumerate().flat_map(|(i, x)| ep[i + 1..].iter().map(move |y| x > y)).filter(|b| *b).count() % 2 == 0 { 1 } else { -1 };
                prop_assert_eq!(sa * esign, sb);
            }
            (None, None) => {}
            _ => prop_assert!(false, "zero classes disagree"),
        }
        let again = g.canonicalize().unwrap().into_option().unwrap();
        prop_assert_eq!(again.0.canonicalize().unwrap().into_option().unwrap(), (again.0.clone(), 1));
    }

    #[test]
    fn parser_never_panics(text in "[wlegsbackrd:|@0-9,\\-]{0,40}") {
        let _ = parse_graph(&text);
    }

    #[test]
    fn display_parse_round_trip(g in any_generator()) {
        prop_assert_eq!(parse_graph(&g.to_string()).unwrap(), g);
    }
}

//! Weighted red-and-black graph complexes `RB`, their connected quotients
//! `RB_conn`, and the black graph complexes `G`.
//!
//! A graph is stored with vertices `0..V`, a sorted leg list `(label, vertex)`,
//! black edges in orientation order and red edges as a sorted multiset. The
//! orientation line is `det(ℚ^{E_B}) ⊗ det(ℚ^L)^{⊗n}`; the leg factor is
//! trivialized by the order of the labels, so it only contributes signs when
//! legs are relabeled or glued by a Brauer morphism.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use exactla::{mapping_cone, q, ChainComplex, ChainMap, Grading, HomologyTable, RationalSparseMatrix, Q};
use num_traits::{One, Zero};
use thiserror::Error;

use crate::brauer::{BrauerMorphism, FiniteSetObject, Label};
use crate::perm::{permutation_sign, permutations};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error("leg label {0} appears twice")]
    DuplicateLeg(Label),
    #[error("vertex {0} violates 2w + val ≥ 3")]
    Inadmissible(usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph has red edges")]
    HasRedEdges,
    #[error("Z-family graphs carry weight 0 on every vertex")]
    PositiveWeight,
    #[error("morphism source {expected} does not match the legs {got}")]
    WrongLegs { expected: String, got: String },
    #[error("{0} is not a generator of the complex")]
    NotAGenerator(String),
    #[error("enumeration with {0} vertices exceeds the built-in bound")]
    TooLarge(usize),
    #[error("parse error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error(transparent)]
    Linear(#[from] exactla::ExactlaError),
}

pub type Result<T> = std::result::Result<T, GraphError>;

/// Vertex bound for enumeration; canonical labeling enumerates orderings
/// inside refinement cells, which stays cheap well past this size.
pub const MAX_VERTICES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum Variant {
    /// All weights zero; contracting a loop gives 0.
    Z,
    /// Weighted; contracting a loop raises the vertex weight.
    E,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum GraphFamily {
    Rb,
    /// Black subgraph connected and nonempty.
    RbConn,
    /// Connected, no red edges; the differential only contracts.
    G,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RbGraph {
    weights: Vec<u32>,
    legs: Vec<(Label, usize)>,
    black: Vec<(usize, usize)>,
    red: Vec<(usize, usize)>,
}

fn ordered(e: (usize, usize)) -> (usize, usize) {
    if e.0 <= e.1 {
        e
    } else {
        (e.1, e.0)
    }
}

impl RbGraph {
    /// Builds a graph; black edges keep the given order, which fixes the
    /// orientation.
    pub fn new(
        weights: Vec<u32>,
        legs: Vec<(Label, usize)>,
        black: Vec<(usize, usize)>,
        red: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let nv = weights.len();
        for &(a, b) in black.iter().chain(red.iter()) {
            for v in [a, b] {
                if v >= nv {
                    return Err(GraphError::VertexOutOfRange(v));
                }
            }
        }
        let mut legs = legs;
        legs.sort_unstable();
        for w in legs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(GraphError::DuplicateLeg(w[0].0));
            }
        }
        if let Some(&(_, v)) = legs.iter().find(|(_, v)| *v >= nv) {
            return Err(GraphError::VertexOutOfRange(v));
        }
        let mut red: Vec<(usize, usize)> = red.into_iter().map(ordered).collect();
        red.sort_unstable();
        Ok(Self {
            weights,
            legs,
            black: black.into_iter().map(ordered).collect(),
            red,
        })
    }

    /// The graph with no vertices: the unit of `RB`.
    pub fn empty() -> Self {
        Self {
            weights: Vec::new(),
            legs: Vec::new(),
            black: Vec::new(),
            red: Vec::new(),
        }
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn legs(&self) -> &[(Label, usize)] {
        &self.legs
    }

    pub fn black(&self) -> &[(usize, usize)] {
        &self.black
    }

    pub fn red(&self) -> &[(usize, usize)] {
        &self.red
    }

    pub fn vertex_count(&self) -> usize {
        self.weights.len()
    }

    pub fn leg_labels(&self) -> FiniteSetObject {
        FiniteSetObject::new(self.legs.iter().map(|(l, _)| *l)).expect("leg labels are distinct")
    }

    pub fn valence(&self, v: usize) -> usize {
        let ends = |e: &&(usize, usize)| usize::from(e.0 == v) + usize::from(e.1 == v);
        self.legs.iter().filter(|(_, x)| *x == v).count()
            + self.black.iter().map(|e| ends(&e)).sum::<usize>()
            + self.red.iter().map(|e| ends(&e)).sum::<usize>()
    }

    /// `2w(v) + val(v) − 2`.
    pub fn excess(&self, v: usize) -> i64 {
        2 * i64::from(self.weights[v]) + self.valence(v) as i64 - 2
    }

    pub fn check_admissible(&self) -> Result<()> {
        match (0..self.vertex_count()).find(|&v| self.excess(v) < 1) {
            Some(v) => Err(GraphError::Inadmissible(v)),
            None => Ok(()),
        }
    }

    /// `Σ_v (2w(v) + val(v) − 2)`, the species weight of the graph.
    pub fn weight(&self) -> u32 {
        (0..self.vertex_count()).map(|v| self.excess(v)).sum::<i64>() as u32
    }

    /// `n · Σ_v (2w(v) + val(v) − 2)`.
    pub fn deg_int(&self, n: u32) -> i64 {
        i64::from(n) * i64::from(self.weight())
    }

    /// `deg_int + #E_B`.
    pub fn degree(&self, n: u32) -> i64 {
        self.deg_int(n) + self.black.len() as i64
    }

    pub fn total_weight(&self) -> u32 {
        self.weights.iter().sum()
    }

    fn components(&self, edges: &[(usize, usize)]) -> usize {
        let n = self.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut count = n;
        for &(a, b) in edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                count -= 1;
            }
        }
        count
    }

    pub fn black_connected(&self) -> bool {
        self.vertex_count() > 0 && self.components(&self.black) == 1
    }

    pub fn connected(&self) -> bool {
        let all: Vec<(usize, usize)> = self.black.iter().chain(self.red.iter()).copied().collect();
        self.vertex_count() > 0 && self.components(&all) == 1
    }

    /// `g(Γ) = b₁(Γ) + Σ w(v)` for a connected graph.
    pub fn genus(&self) -> Result<i64> {
        if !self.connected() {
            return Err(GraphError::Disconnected);
        }
        let e = (self.black.len() + self.red.len()) as i64;
        Ok(e - self.vertex_count() as i64 + 1 + i64::from(self.total_weight()))
    }

    /// Applies the vertex relabeling `v ↦ perm[v]` and sorts the black edges;
    /// returns the sign of the induced permutation of black edges.
    fn relabeled(&self, perm: &[usize]) -> (RbGraph, i32) {
        let mut weights = vec![0; self.weights.len()];
        for (v, &w) in self.weights.iter().enumerate() {
            weights[perm[v]] = w;
        }
        let mut legs: Vec<(Label, usize)> = self.legs.iter().map(|&(l, v)| (l, perm[v])).collect();
        legs.sort_unstable();
        let black: Vec<(usize, usize)> = self.black.iter().map(|&(a, b)| ordered((perm[a], perm[b]))).collect();
        let mut idx: Vec<usize> = (0..black.len()).collect();
        idx.sort_by_key(|&i| black[i]);
        let sign = permutation_sign(&idx);
        let black = idx.iter().map(|&i| black[i]).collect();
        let mut red: Vec<(usize, usize)> = self.red.iter().map(|&(a, b)| ordered((perm[a], perm[b]))).collect();
        red.sort_unstable();
        (
            RbGraph {
                weights,
                legs,
                black,
                red,
            },
            sign,
        )
    }

    /// Color refinement: returns a color per vertex, stable under
    /// isomorphism.
    fn refined_colors(&self) -> Vec<usize> {
        let n = self.vertex_count();
        let mut bmult = vec![vec![0usize; n]; n];
        let mut rmult = vec![vec![0usize; n]; n];
        for &(a, b) in &self.black {
            bmult[a][b] += 1;
            if a != b {
                bmult[b][a] += 1;
            }
        }
        for &(a, b) in &self.red {
            rmult[a][b] += 1;
            if a != b {
                rmult[b][a] += 1;
            }
        }
        let initial: Vec<(u32, Vec<Label>, usize, usize, usize, usize)> = (0..n)
            .map(|v| {
                let legs: Vec<Label> = self.legs.iter().filter(|(_, x)| *x == v).map(|(l, _)| *l).collect();
                let bdeg: usize = (0..n).filter(|&u| u != v).map(|u| bmult[v][u]).sum();
                let rdeg: usize = (0..n).filter(|&u| u != v).map(|u| rmult[v][u]).sum();
                (self.weights[v], legs, bmult[v][v], rmult[v][v], bdeg, rdeg)
            })
            .collect();
        let mut colors = rank_of(&initial);
        loop {
            let sigs: Vec<(usize, Vec<(usize, usize, usize)>)> = (0..n)
                .map(|v| {
                    let mut nb: Vec<(usize, usize, usize)> = (0..n)
                        .filter(|&u| u != v && bmult[v][u] + rmult[v][u] > 0)
                        .map(|u| (colors[u], bmult[v][u], rmult[v][u]))
                        .collect();
                    nb.sort_unstable();
                    (colors[v], nb)
                })
                .collect();
            let next = rank_of(&sigs);
            let stable = distinct(&next) == distinct(&colors);
            colors = next;
            if stable {
                return colors;
            }
        }
    }

    /// The canonical representative with its sign, or zero when an
    /// automorphism reverses the orientation.
    pub fn canonicalize(&self) -> Result<OrientationClass> {
        self.check_admissible()?;
        let mut seen = BTreeSet::new();
        for e in &self.black {
            if !seen.insert(*e) {
                // Swapping two parallel black edges reverses det(E_B).
                return Ok(OrientationClass::Zero);
            }
        }
        let colors = self.refined_colors();
        let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, &c) in colors.iter().enumerate() {
            cells.entry(c).or_default().push(v);
        }
        let cells: Vec<Vec<usize>> = cells.into_values().collect();
        let mut best: Option<(RbGraph, i32)> = None;
        let mut zero = false;
        let mut perm = vec![0usize; self.vertex_count()];
        let mut visit = |perm: &[usize]| {
            let (g, s) = self.relabeled(perm);
            match &best {
                Some((b, bs)) if *b == g => {
                    if *bs != s {
                        zero = true;
                    }
                }
                Some((b, _)) if *b < g => {}
                _ => best = Some((g, s)),
            }
        };
        assign_cells(&cells, 0, 0, &mut perm, &mut visit);
        if zero {
            return Ok(OrientationClass::Zero);
        }
        let (graph, sign) = best.expect("at least one ordering");
        Ok(OrientationClass::Nonzero { graph, sign })
    }

    /// `Γ/e_i`, or `None` when a Z-family loop is contracted. Black edge
    /// order is kept with `e_i` removed.
    pub fn contract(&self, i: usize, variant: Variant) -> Option<RbGraph> {
        let (a, b) = self.black[i];
        let mut black = self.black.clone();
        black.remove(i);
        if a == b {
            if variant == Variant::Z {
                return None;
            }
            let mut g = RbGraph {
                weights: self.weights.clone(),
                legs: self.legs.clone(),
                black,
                red: self.red.clone(),
            };
            g.weights[a] += 1;
            return Some(g);
        }
        // Merge b into a, then close the gap left by b.
        let map = |v: usize| {
            let v = if v == b { a } else { v };
            if v > b {
                v - 1
            } else {
                v
            }
        };
        let mut weights = self.weights.clone();
        weights[a] += weights[b];
        weights.remove(b);
        let legs = self.legs.iter().map(|&(l, v)| (l, map(v))).collect();
        let black = black.into_iter().map(|(x, y)| ordered((map(x), map(y)))).collect();
        let mut red: Vec<(usize, usize)> = self.red.iter().map(|&(x, y)| ordered((map(x), map(y)))).collect();
        red.sort_unstable();
        Some(RbGraph {
            weights,
            legs,
            black,
            red,
        })
    }

    /// `Γ∖e_i`: the black edge `e_i` turned red.
    pub fn recolor(&self, i: usize) -> RbGraph {
        let mut g = self.clone();
        let e = g.black.remove(i);
        g.red.push(e);
        g.red.sort_unstable();
        g
    }

    pub fn family_admits(&self, family: GraphFamily) -> bool {
        match family {
            GraphFamily::Rb => true,
            GraphFamily::RbConn => self.black_connected(),
            GraphFamily::G => self.red.is_empty() && self.black_connected(),
        }
    }
}

fn rank_of<T: Ord + Clone>(items: &[T]) -> Vec<usize> {
    let sorted: BTreeSet<T> = items.iter().cloned().collect();
    let sorted: Vec<T> = sorted.into_iter().collect();
    items
        .iter()
        .map(|x| sorted.binary_search(x).expect("present"))
        .collect()
}

fn distinct(v: &[usize]) -> usize {
    v.iter().collect::<BTreeSet<_>>().len()
}

/// Visits every vertex ordering that lists cells in order and permutes
/// vertices freely inside each cell.
fn assign_cells(cells: &[Vec<usize>], k: usize, offset: usize, perm: &mut [usize], visit: &mut dyn FnMut(&[usize])) {
    let Some(cell) = cells.get(k) else {
        visit(perm);
        return;
    };
    for p in permutations(cell.len()) {
        for (j, &v) in cell.iter().enumerate() {
            perm[v] = offset + p[j];
        }
        assign_cells(cells, k + 1, offset + cell.len(), perm, visit);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrientationClass {
    Zero,
    Nonzero { graph: RbGraph, sign: i32 },
}

impl OrientationClass {
    pub fn into_option(self) -> Option<(RbGraph, i32)> {
        match self {
            Self::Zero => None,
            Self::Nonzero { graph, sign } => Some((graph, sign)),
        }
    }
}

/// A rational combination of canonical graphs.
pub type GraphVector = BTreeMap<RbGraph, Q>;

/// Adds `c · Γ` after canonicalization; drops zero classes and zero sums.
pub fn add_graph(v: &mut GraphVector, g: &RbGraph, c: &Q) -> Result<()> {
    if let Some((canon, s)) = g.canonicalize()?.into_option() {
        let e = v.entry(canon.clone()).or_insert_with(Q::zero);
        *e += c * q(i64::from(s));
        if e.is_zero() {
            v.remove(&canon);
        }
    }
    Ok(())
}

/// `d = d_con + d_col` followed by the family's quotient.
pub fn differential(g: &RbGraph, variant: Variant, family: GraphFamily) -> Result<GraphVector> {
    let mut out = GraphVector::new();
    for i in 0..g.black.len() {
        let sign = if i % 2 == 0 { q(1) } else { q(-1) };
        if let Some(c) = g.contract(i, variant) {
            if c.family_admits(family) {
                add_graph(&mut out, &c, &sign)?;
            }
        }
        let r = g.recolor(i);
        if r.family_admits(family) {
            add_graph(&mut out, &r, &-sign)?;
        }
    }
    Ok(out)
}

pub fn differential_of(x: &GraphVector, variant: Variant, family: GraphFamily) -> Result<GraphVector> {
    let mut out = GraphVector::new();
    for (g, c) in x {
        for (h, d) in differential(g, variant, family)? {
            add_graph(&mut out, &h, &(c * d))?;
        }
    }
    Ok(out)
}

/// All canonical nonzero generators with legs `s` and species weight `w`.
pub fn enumerate(family: GraphFamily, variant: Variant, s: &FiniteSetObject, w: u32) -> Result<Vec<RbGraph>> {
    let mut found = BTreeSet::new();
    if w == 0 {
        if s.is_empty() && family == GraphFamily::Rb {
            found.insert(RbGraph::empty());
        }
        return Ok(found.into_iter().collect());
    }
    let nleg = s.len() as u32;
    for nv in 1..=w as usize {
        if nv > MAX_VERTICES {
            return Err(GraphError::TooLarge(nv));
        }
        let max_weight = if variant == Variant::Z { 0 } else { w };
        for total_w in 0..=max_weight {
            // Σ_v (2w(v) + val(v) − 2) = 2W + 2E + |S| − 2V.
            let twice_e = w as i64 + 2 * nv as i64 - 2 * total_w as i64 - nleg as i64;
            if twice_e < 0 || twice_e % 2 == 1 {
                continue;
            }
            let ne = (twice_e / 2) as usize;
            for weights in nonincreasing(total_w, nv) {
                for legs in leg_assignments(s.labels(), nv) {
                    let mut st = EdgeSearch::new(&weights, &legs, w, family);
                    st.run(0, ne, &mut |g| {
                        if let Some((c, _)) = g.canonicalize().expect("search yields admissible graphs").into_option() {
                            found.insert(c);
                        }
                    });
                }
            }
        }
    }
    Ok(found.into_iter().collect())
}

fn nonincreasing(total: u32, len: usize) -> Vec<Vec<u32>> {
    fn rec(total: u32, len: usize, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if len == 0 {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for x in (0..=cap.min(total)).rev() {
            cur.push(x);
            rec(total - x, len - 1, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, len, total, &mut Vec::new(), &mut out);
    out
}

fn leg_assignments(labels: &[Label], nv: usize) -> Vec<Vec<(Label, usize)>> {
    let mut out = vec![Vec::new()];
    for &l in labels {
        out = out
            .into_iter()
            .flat_map(|a: Vec<(Label, usize)>| {
                (0..nv).map(move |v| {
                    let mut b = a.clone();
                    b.push((l, v));
                    b
                })
            })
            .collect();
    }
    out
}

/// Depth-first choice of edge multiplicities per vertex pair.
struct EdgeSearch<'a> {
    weights: &'a [u32],
    legs: &'a [(Label, usize)],
    pairs: Vec<(usize, usize)>,
    val: Vec<usize>,
    max_val: Vec<usize>,
    black: Vec<(usize, usize)>,
    red: Vec<(usize, usize)>,
    family: GraphFamily,
}

impl<'a> EdgeSearch<'a> {
    fn new(weights: &'a [u32], legs: &'a [(Label, usize)], w: u32, family: GraphFamily) -> Self {
        let nv = weights.len();
        let pairs = (0..nv).flat_map(|a| (a..nv).map(move |b| (a, b))).collect();
        let mut val = vec![0; nv];
        for &(_, v) in legs {
            val[v] += 1;
        }
        // Every other vertex contributes at least 1 to the total weight.
        let max_val = weights
            .iter()
            .map(|&x| (w as i64 - (nv as i64 - 1) + 2 - 2 * i64::from(x)).max(0) as usize)
            .collect();
        Self {
            weights,
            legs,
            pairs,
            val,
            max_val,
            black: Vec::new(),
            red: Vec::new(),
            family,
        }
    }

    fn fits(&self) -> bool {
        self.val.iter().zip(&self.max_val).all(|(v, m)| v <= m)
    }

    fn run(&mut self, k: usize, remaining: usize, visit: &mut dyn FnMut(RbGraph)) {
        if !self.fits() {
            return;
        }
        if k == self.pairs.len() {
            if remaining > 0 {
                return;
            }
            let g = RbGraph {
                weights: self.weights.to_vec(),
                legs: {
                    let mut l = self.legs.to_vec();
                    l.sort_unstable();
                    l
                },
                black: self.black.clone(),
                red: {
                    let mut r = self.red.clone();
                    r.sort_unstable();
                    r
                },
            };
            if g.check_admissible().is_ok() && g.family_admits(self.family) {
                visit(g);
            }
            return;
        }
        let (a, b) = self.pairs[k];
        let max_red = if self.family == GraphFamily::G { 0 } else { remaining };
        for nb in 0..=1usize.min(remaining) {
            for nr in 0..=max_red.saturating_sub(nb) {
                let m = nb + nr;
                self.val[a] += m;
                self.val[b] += m;
                self.black.extend(std::iter::repeat((a, b)).take(nb));
                self.red.extend(std::iter::repeat((a, b)).take(nr));
                self.run(k + 1, remaining - m, visit);
                self.black.truncate(self.black.len() - nb);
                self.red.truncate(self.red.len() - nr);
                self.val[a] -= m;
                self.val[b] -= m;
            }
        }
    }
}

/// A generated graph complex with its generators per total degree.
#[derive(Clone, Debug)]
pub struct GraphComplex {
    pub family: GraphFamily,
    pub variant: Variant,
    pub n: u32,
    pub legs: FiniteSetObject,
    pub weight: u32,
    pub complex: ChainComplex,
    pub bases: BTreeMap<i64, Vec<RbGraph>>,
}

impl GraphComplex {
    pub fn q(&self) -> i64 {
        i64::from(self.n) * i64::from(self.weight)
    }

    /// Harrison degree of total degree `k` (`#E_B + 1`) for `RB`/`RB_conn`;
    /// `#E` for `G`.
    pub fn p_of(&self, k: i64) -> i64 {
        match self.family {
            GraphFamily::G => k - self.q(),
            _ => k - self.q() + 1,
        }
    }

    pub fn index_of(&self, k: i64, g: &RbGraph) -> Option<usize> {
        self.bases.get(&k)?.binary_search(g).ok()
    }

    pub fn homology(&self) -> Result<HomologyTable> {
        Ok(self.complex.homology_dims()?)
    }

    /// Homology as `(p, dim)` pairs, with `p` as in [`GraphComplex::p_of`].
    pub fn homology_by_p(&self) -> Result<BTreeMap<i64, usize>> {
        let table = self.homology()?;
        Ok(self.bases.keys().map(|&k| (self.p_of(k), table.total(k))).collect())
    }

    /// Coordinates of a combination of degree-`k` generators.
    pub fn coordinates(&self, k: i64, x: &GraphVector) -> Result<exactla::SparseVec> {
        let mut v = Vec::new();
        for (g, c) in x {
            let i = self
                .index_of(k, g)
                .ok_or_else(|| GraphError::NotAGenerator(g.to_string()))?;
            v.push((i, c.clone()));
        }
        v.sort_by_key(|(i, _)| *i);
        Ok(v)
    }
}

/// Generators and differential matrices of `family^{variant}_n(s)` in
/// species weight `w` (internal degree `q = n·w`).
pub fn build_complex(
    family: GraphFamily,
    variant: Variant,
    n: u32,
    s: &FiniteSetObject,
    w: u32,
) -> Result<GraphComplex> {
    let gens = enumerate(family, variant, s, w)?;
    let mut bases: BTreeMap<i64, Vec<RbGraph>> = BTreeMap::new();
    for g in gens {
        bases.entry(g.degree(n)).or_default().push(g);
    }
    let mut complex = ChainComplex::new();
    let qd = i64::from(n) * i64::from(w);
    for (k, b) in &bases {
        complex.set_basis(
            *k,
            b.iter().map(ToString::to_string).collect(),
            Some(vec![Grading::new(qd, i64::from(w)); b.len()]),
        );
    }
    let mut gc = GraphComplex {
        family,
        variant,
        n,
        legs: s.clone(),
        weight: w,
        complex,
        bases,
    };
    let degrees: Vec<i64> = gc.bases.keys().copied().collect();
    for k in degrees {
        let src = &gc.bases[&k];
        let rows = gc.bases.get(&(k - 1)).map_or(0, Vec::len);
        let mut trip = Vec::new();
        for (j, g) in src.iter().enumerate() {
            for (h, c) in differential(g, variant, family)? {
                let i = gc.index_of(k - 1, &h).expect("differential stays among generators");
                trip.push((i, j, c));
            }
        }
        let d = RationalSparseMatrix::from_triplets(rows, src.len(), trip)?;
        gc.complex.set_differential(k, d);
    }
    Ok(gc)
}

/// One homology cell of a graph complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct HomologyCell {
    pub p: i64,
    pub q: i64,
    pub w: u32,
    pub dim: usize,
}

/// `H_{p+q}(·)_q` for every weight in `weights`.
pub fn homology_table(
    family: GraphFamily,
    variant: Variant,
    n: u32,
    s: &FiniteSetObject,
    weights: impl IntoIterator<Item = u32>,
) -> Result<Vec<HomologyCell>> {
    let mut out = Vec::new();
    for w in weights {
        let gc = build_complex(family, variant, n, s, w)?;
        for (p, dim) in gc.homology_by_p()? {
            out.push(HomologyCell { p, q: gc.q(), w, dim });
        }
    }
    Ok(out)
}

/// The projection `E → Z` (graphs with a positive weight go to zero) as a
/// chain map between complexes built with the same parameters.
pub fn projection_e_to_z(e: &GraphComplex, z: &GraphComplex) -> ChainMap {
    let mut f = ChainMap::default();
    for (k, b) in &e.bases {
        let trip: Vec<(usize, usize, Q)> = b
            .iter()
            .enumerate()
            .filter_map(|(j, g)| z.index_of(*k, g).map(|i| (i, j, Q::one())))
            .collect();
        let m = RationalSparseMatrix::from_triplets(z.complex.dim(*k), b.len(), trip).expect("indices in range");
        f.maps.insert(*k, m);
    }
    f
}

/// Homology of the cone of `G^{E_n}(s) → G^{Z_n}(s)` in weight `w`, as
/// `(p, dim)` with `p = total − q`.
pub fn relative_g_homology(n: u32, s: &FiniteSetObject, w: u32) -> Result<BTreeMap<i64, usize>> {
    let e = build_complex(GraphFamily::G, Variant::E, n, s, w)?;
    let z = build_complex(GraphFamily::G, Variant::Z, n, s, w)?;
    let f = projection_e_to_z(&e, &z);
    let cone = mapping_cone(&e.complex, &z.complex, &f)?;
    let table = cone.homology_dims()?;
    let qd = i64::from(n) * i64::from(w);
    Ok(cone.degrees().into_iter().map(|k| (k - qd, table.total(k))).collect())
}

/// `t : G(∅) → G({1})`, adding a leg at each vertex with factor `χ(v)`.
pub fn transfer_t(x: &GraphVector, n: u32) -> Result<GraphVector> {
    let mut out = GraphVector::new();
    for (g, c) in x {
        if !g.legs.is_empty() {
            return Err(GraphError::WrongLegs {
                expected: "{}".into(),
                got: g.leg_labels().to_string(),
            });
        }
        for v in 0..g.vertex_count() {
            let chi = q(i64::from(n) * g.excess(v));
            let mut h = g.clone();
            h.legs.push((1, v));
            add_graph(&mut out, &h, &(c * chi))?;
        }
    }
    Ok(out)
}

/// `π : G({1}) → G(∅)`, deleting the leg; zero when the leg's vertex
/// becomes inadmissible.
pub fn transfer_pi(x: &GraphVector) -> Result<GraphVector> {
    let mut out = GraphVector::new();
    for (g, c) in x {
        if g.legs.len() != 1 {
            return Err(GraphError::WrongLegs {
                expected: "{1}".into(),
                got: g.leg_labels().to_string(),
            });
        }
        let mut h = g.clone();
        h.legs.clear();
        if h.check_admissible().is_ok() {
            add_graph(&mut out, &h, c)?;
        }
    }
    Ok(out)
}

/// The transfer identities on `G^{variant}_n(∅)` in weight `w`, against
/// `G^{variant}_n({1})` in weight `w + 1`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct TransferCheck {
    pub variant: Variant,
    pub n: u32,
    pub w: u32,
    pub q: i64,
    pub generators: usize,
    /// Generators with `π(t(Γ)) ≠ q·Γ`.
    pub pi_t_failures: usize,
    /// Generators of `G(∅)` with `d t ≠ t d`.
    pub t_chain_failures: usize,
    /// Generators of `G({1})` with `d π ≠ π d`.
    pub pi_chain_failures: usize,
    /// `dim H(G(∅))_q` over all degrees.
    pub classes: usize,
    /// Rank of the image of those classes in `H(G({1}))_{q+n}`.
    pub injected: usize,
}

impl TransferCheck {
    pub fn passed(&self) -> bool {
        self.pi_t_failures == 0
            && self.t_chain_failures == 0
            && self.pi_chain_failures == 0
            && self.injected == self.classes
    }
}

fn scaled(x: &GraphVector, k: i64) -> GraphVector {
    x.iter()
        .map(|(g, c)| (g.clone(), c * q(k)))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

pub fn transfer_check(variant: Variant, n: u32, w: u32) -> Result<TransferCheck> {
    let empty = FiniteSetObject::empty();
    let one = FiniteSetObject::range(1);
    let source = build_complex(GraphFamily::G, variant, n, &empty, w)?;
    let target = build_complex(GraphFamily::G, variant, n, &one, w + 1)?;
    let qd = source.q();
    let mut out = TransferCheck {
        variant,
        n,
        w,
        q: qd,
        generators: 0,
        pi_t_failures: 0,
        t_chain_failures: 0,
        pi_chain_failures: 0,
        classes: 0,
        injected: 0,
    };
    for g in source.bases.values().flatten() {
        out.generators += 1;
        let x = GraphVector::from([(g.clone(), Q::one())]);
        let tx = transfer_t(&x, n)?;
        if transfer_pi(&tx)? != scaled(&x, qd) {
            out.pi_t_failures += 1;
        }
        if differential_of(&tx, variant, GraphFamily::G)?
            != transfer_t(&differential_of(&x, variant, GraphFamily::G)?, n)?
        {
            out.t_chain_failures += 1;
        }
    }
    for g in target.bases.values().flatten() {
        let x = GraphVector::from([(g.clone(), Q::one())]);
        let dp = differential_of(&transfer_pi(&x)?, variant, GraphFamily::G)?;
        if dp != transfer_pi(&differential_of(&x, variant, GraphFamily::G)?)? {
            out.pi_chain_failures += 1;
        }
    }
    // Images of class representatives, independent modulo boundaries.
    for (&k, gens) in &source.bases {
        let reps = source.complex.homology_basis(k)?;
        out.classes += reps.len();
        let mut images = Vec::new();
        for z in &reps {
            let x: GraphVector = z.iter().map(|(i, c)| (gens[*i].clone(), c.clone())).collect();
            images.push(transfer_t(&x, n)?);
        }
        let Some(kt) = images.iter().filter_map(|y| y.keys().next()).find_map(|g| {
            target
                .bases
                .keys()
                .copied()
                .find(|kt| target.index_of(*kt, g).is_some())
        }) else {
            continue;
        };
        let dim = target.complex.dim(kt);
        let boundaries = target.complex.differential(kt + 1).column_vectors();
        let mut all = boundaries.clone();
        for y in &images {
            all.push(target.coordinates(kt, y)?);
        }
        out.injected += exactla::rank_of_rows(&all, dim) - exactla::rank_of_rows(&boundaries, dim);
    }
    Ok(out)
}

/// `#E − 2g(Γ)` for a connected black graph.
pub fn deg_cgp(g: &RbGraph) -> Result<i64> {
    if !g.red.is_empty() {
        return Err(GraphError::HasRedEdges);
    }
    Ok(g.black.len() as i64 - 2 * g.genus()?)
}

/// `deg(Γ) − (1 + 1/n)·deg_int(Γ) + |S| − 2`, the same number computed from
/// the graded degrees.
pub fn deg_cgp_from_degrees(g: &RbGraph, n: u32) -> Result<Q> {
    if !g.red.is_empty() {
        return Err(GraphError::HasRedEdges);
    }
    if !g.connected() {
        return Err(GraphError::Disconnected);
    }
    let n = q(i64::from(n));
    let deg_int = q(g.deg_int(1)) * &n;
    let deg = &deg_int + q(g.black.len() as i64);
    Ok(deg - (Q::one() + Q::one() / &n) * deg_int + q(g.legs.len() as i64) - q(2))
}

/// The Brauer action: each matched pair of legs becomes a red edge, and the
/// remaining legs are relabeled along the injection.
pub fn act(m: &BrauerMorphism, g: &RbGraph, n: u32) -> Result<Option<(RbGraph, i32)>> {
    if m.source() != &g.leg_labels() {
        return Err(GraphError::WrongLegs {
            expected: m.source().to_string(),
            got: g.leg_labels().to_string(),
        });
    }
    let vertex_of = |l: Label| {
        g.legs
            .iter()
            .find(|(x, _)| *x == l)
            .map(|(_, v)| *v)
            .expect("leg exists")
    };
    let mut order: Vec<usize> = Vec::new();
    let pos = |l: Label| m.source().position(l).expect("label in source");
    let mut h = g.clone();
    for &(a, b) in m.matching() {
        order.push(pos(a));
        order.push(pos(b));
        h.red.push(ordered((vertex_of(a), vertex_of(b))));
    }
    h.red.sort_unstable();
    h.legs.clear();
    for (t, s) in m.injection() {
        order.push(pos(s));
        h.legs.push((t, vertex_of(s)));
    }
    h.legs.sort_unstable();
    let mut sign = i32::from(m.sign());
    if n % 2 == 1 {
        sign *= permutation_sign(&order);
    }
    Ok(h.canonicalize()?.into_option().map(|(c, s)| (c, s * sign)))
}

impl fmt::Display for RbGraph {
    /// `w:0,0|legs:1@0,2@1|black:0-1,1-1|red:0-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |items: Vec<String>| items.join(",");
        write!(
            f,
            "w:{}|legs:{}|black:{}|red:{}",
            join(self.weights.iter().map(ToString::to_string).collect()),
            join(self.legs.iter().map(|(l, v)| format!("{l}@{v}")).collect()),
            join(self.black.iter().map(|(a, b)| format!("{a}-{b}")).collect()),
            join(self.red.iter().map(|(a, b)| format!("{a}-{b}")).collect()),
        )
    }
}

fn parse_err(pos: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        pos,
        message: message.into(),
    }
}

fn parse_number<T: std::str::FromStr>(tok: &str, pos: usize) -> Result<T> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(parse_err(pos, format!("expected a number, found `{tok}`")));
    }
    tok.parse()
        .map_err(|_| parse_err(pos, format!("number `{tok}` out of range")))
}

/// Parses the text form written by `Display`. Structural validity is
/// checked; admissibility is left to [`RbGraph::canonicalize`].
pub fn parse_graph(text: &str) -> Result<RbGraph> {
    let text = text.trim();
    let sections: Vec<&str> = text.split('|').collect();
    let names = ["w:", "legs:", "black:", "red:"];
    if sections.len() != names.len() {
        return Err(parse_err(0, "expected four `|`-separated sections"));
    }
    let mut offset = 0;
    let mut fields: Vec<(usize, &str)> = Vec::new();
    for (sec, name) in sections.iter().zip(names) {
        let body = sec
            .strip_prefix(name)
            .ok_or_else(|| parse_err(offset, format!("expected `{name}`")))?;
        fields.push((offset + name.len(), body));
        offset += sec.len() + 1;
    }
    let items = |(pos, body): (usize, &str)| -> Vec<(usize, String)> {
        if body.is_empty() {
            return Vec::new();
        }
        let mut p = pos;
        body.split(',')
            .map(|t| {
                let r = (p, t.to_string());
                p += t.len() + 1;
                r
            })
            .collect()
    };
    let weights = items(fields[0])
        .into_iter()
        .map(|(p, t)| parse_number::<u32>(&t, p))
        .collect::<Result<Vec<_>>>()?;
    let pair = |(p, t): (usize, String), sep: char| -> Result<(String, String, usize)> {
        let (a, b) = t
            .split_once(sep)
            .ok_or_else(|| parse_err(p, format!("expected `{sep}` in `{t}`")))?;
        Ok((a.to_string(), b.to_string(), p))
    };
    let legs = items(fields[1])
        .into_iter()
        .map(|it| {
            let (a, b, p) = pair(it, '@')?;
            Ok((parse_number::<Label>(&a, p)?, parse_number::<usize>(&b, p)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let edges = |f: (usize, &str)| -> Result<Vec<(usize, usize)>> {
        items(f)
            .into_iter()
            .map(|it| {
                let (a, b, p) = pair(it, '-')?;
                Ok((parse_number(&a, p)?, parse_number(&b, p)?))
            })
            .collect()
    };
    let black = edges(fields[2])?;
    let red = edges(fields[3])?;
    RbGraph::new(weights, legs, black, red)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonincreasing_weights() {
        assert_eq!(nonincreasing(2, 2), vec![vec![2, 0], vec![1, 1]]);
        assert_eq!(nonincreasing(0, 3), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn contraction_merges_and_reindexes() {
        let g = RbGraph::new(vec![0, 1, 0], vec![(1, 2)], vec![(0, 1), (1, 2)], vec![(0, 2)]).unwrap();
        let c = g.contract(0, Variant::E).unwrap();
        assert_eq!(c.weights, vec![1, 0]);
        assert_eq!(c.black, vec![(0, 1)]);
        assert_eq!(c.red, vec![(0, 1)]);
        assert_eq!(c.legs, vec![(1, 1)]);
    }
}

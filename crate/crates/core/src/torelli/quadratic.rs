//! Quadratic data `(V, S ⊂ Λ²V)` and their duals under a declared pairing.
//!
//! Generators carry torus weights; the pairing must pair weight `μ` with
//! weight `−μ`, so `Λ²V` splits into weight blocks and annihilators are
//! computed block by block: the annihilator in block `ν` only sees the
//! relations in block `−ν`.

use std::collections::BTreeMap;

use exactla::{q, rank_of_rows, Echelon, SparseVec};
use rayon::prelude::*;

use super::{Result, TorelliError};
use crate::repchar::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum DatumKind {
    /// `A(V, S) = Λ*[V[1]]/(S)`, graded commutative on degree-one generators.
    Commutative,
    /// `L(W, R) = Lie(W)/(R)`.
    Lie,
}

impl DatumKind {
    pub fn opposite(self) -> Self {
        match self {
            DatumKind::Commutative => DatumKind::Lie,
            DatumKind::Lie => DatumKind::Commutative,
        }
    }
}

/// Index of `a ∧ b` (`a < b`) among pairs of `0..n`.
pub fn pair_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

/// `a ∧ b` as `(index, sign)`; `None` when `a = b`.
pub fn wedge2(n: usize, a: usize, b: usize) -> Option<(usize, i64)> {
    match a.cmp(&b) {
        std::cmp::Ordering::Less => Some((pair_index(n, a, b), 1)),
        std::cmp::Ordering::Greater => Some((pair_index(n, b, a), -1)),
        std::cmp::Ordering::Equal => None,
    }
}

fn add_weights(a: &[i64], b: &[i64]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn negate(a: &[i64]) -> Weight {
    a.iter().map(|x| -x).collect()
}

#[derive(Clone, Debug)]
pub struct QuadraticDatum {
    kind: DatumKind,
    weights: Vec<Weight>,
    /// Rows of the Gram matrix of the pairing on `V`: `(b, ⟨a, b⟩)`.
    pairing: Vec<Vec<(usize, i64)>>,
    pairs: Vec<(usize, usize)>,
    blocks: BTreeMap<Weight, Vec<usize>>,
    /// Block-local echelon bases of the relation span.
    relations: BTreeMap<Weight, Echelon>,
}

impl QuadraticDatum {
    /// `relations` are vectors in `Λ²V` indexed by [`pair_index`].
    pub fn new(
        kind: DatumKind,
        weights: Vec<Weight>,
        pairing: Vec<Vec<(usize, i64)>>,
        relations: impl IntoIterator<Item = SparseVec>,
    ) -> Result<Self> {
        let n = weights.len();
        if pairing.len() != n {
            return Err(TorelliError::DegeneratePairing);
        }
        for (a, row) in pairing.iter().enumerate() {
            for (b, c) in row {
                if *b >= n {
                    return Err(TorelliError::DegeneratePairing);
                }
                if *c != 0 && weights[a].iter().zip(&weights[*b]).any(|(x, y)| x + y != 0) {
                    return Err(TorelliError::PairingNotWeightPreserving(a, *b));
                }
            }
        }
        let gram: Vec<SparseVec> = pairing
            .iter()
            .map(|row| {
                let mut r: Vec<(usize, i64)> = row.iter().copied().filter(|(_, c)| *c != 0).collect();
                r.sort_unstable();
                r.into_iter().map(|(b, c)| (b, q(c))).collect()
            })
            .collect();
        if rank_of_rows(&gram, n) != n {
            return Err(TorelliError::DegeneratePairing);
        }
        let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        let mut blocks: BTreeMap<Weight, Vec<usize>> = BTreeMap::new();
        for a in 0..n {
            for b in a + 1..n {
                blocks
                    .entry(add_weights(&weights[a], &weights[b]))
                    .or_default()
                    .push(pairs.len());
                pairs.push((a, b));
            }
        }
        let mut datum = Self {
            kind,
            weights,
            pairing,
            pairs,
            blocks,
            relations: BTreeMap::new(),
        };
        let mut grouped: BTreeMap<Weight, Vec<SparseVec>> = BTreeMap::new();
        for r in relations {
            if r.is_empty() {
                continue;
            }
            let w = datum.pair_weight(r[0].0);
            if r.iter().any(|(i, _)| datum.pair_weight(*i) != w) {
                return Err(TorelliError::NotHomogeneous);
            }
            grouped.entry(w).or_default().push(r);
        }
        datum.relations = grouped
            .into_par_iter()
            .map(|(w, rs)| {
                let local = datum.localize(&w, &rs);
                (w, Echelon::from_vectors(local.iter()))
            })
            .collect();
        Ok(datum)
    }

    pub fn kind(&self) -> DatumKind {
        self.kind
    }

    pub fn generators(&self) -> usize {
        self.weights.len()
    }

    pub fn generator_weight(&self, a: usize) -> &Weight {
        &self.weights[a]
    }

    pub fn pair(&self, index: usize) -> (usize, usize) {
        self.pairs[index]
    }

    pub fn pair_weight(&self, index: usize) -> Weight {
        let (a, b) = self.pairs[index];
        add_weights(&self.weights[a], &self.weights[b])
    }

    /// `dim Λ²V`.
    pub fn quadratic_dim(&self) -> usize {
        self.pairs.len()
    }

    /// Weights of the nonzero blocks of `Λ²V`.
    pub fn block_weights(&self) -> impl Iterator<Item = &Weight> + '_ {
        self.blocks.keys()
    }

    pub fn block_dim(&self, w: &[i64]) -> usize {
        self.blocks.get(w).map_or(0, Vec::len)
    }

    /// Global pair indices of a block, in increasing order.
    pub fn block_basis(&self, w: &[i64]) -> &[usize] {
        self.blocks.get(w).map_or(&[], Vec::as_slice)
    }

    fn localize(&self, w: &[i64], vs: &[SparseVec]) -> Vec<SparseVec> {
        let basis = self.block_basis(w);
        vs.iter()
            .map(|v| {
                v.iter()
                    .map(|(i, c)| (basis.binary_search(i).expect("vector lies in its block"), c.clone()))
                    .collect()
            })
            .collect()
    }

    fn globalize(&self, w: &[i64], v: &SparseVec) -> SparseVec {
        let basis = self.block_basis(w);
        v.iter().map(|(i, c)| (basis[*i], c.clone())).collect()
    }

    pub fn relation_rank(&self) -> usize {
        self.relations.values().map(Echelon::rank).sum()
    }

    pub fn relation_rank_in(&self, w: &[i64]) -> usize {
        self.relations.get(w).map_or(0, Echelon::rank)
    }

    /// Echelon basis of the relations in block `w`, in global coordinates.
    pub fn relations_in(&self, w: &[i64]) -> Vec<SparseVec> {
        self.relations
            .get(w)
            .map(|e| e.basis().map(|v| self.globalize(w, v)).collect())
            .unwrap_or_default()
    }

    /// Whether `v` (global coordinates, homogeneous) lies in the relation span.
    pub fn contains(&self, v: &SparseVec) -> Result<bool> {
        if v.is_empty() {
            return Ok(true);
        }
        let w = self.pair_weight(v[0].0);
        if v.iter().any(|(i, _)| self.pair_weight(*i) != w) {
            return Err(TorelliError::NotHomogeneous);
        }
        let local = self.localize(&w, std::slice::from_ref(v));
        Ok(self.relations.get(&w).is_some_and(|e| e.contains(&local[0])))
    }

    /// `dim Λ²V/S` in weight 2, the same for both kinds.
    pub fn weight_two_dim(&self) -> usize {
        self.quadratic_dim() - self.relation_rank()
    }

    /// The functional `x ↦ ⟨x, r⟩` on `Λ²V` for `r ∈ Λ²V`, with the induced
    /// determinant pairing `⟨a∧b, c∧d⟩ = ⟨a,c⟩⟨b,d⟩ − ⟨a,d⟩⟨b,c⟩`.
    fn functional(&self, columns: &[Vec<(usize, i64)>], r: &SparseVec) -> SparseVec {
        let n = self.generators();
        let mut acc: BTreeMap<usize, exactla::Q> = BTreeMap::new();
        for (idx, coeff) in r {
            let (a, b) = self.pairs[*idx];
            for (c, pca) in &columns[a] {
                for (d, pdb) in &columns[b] {
                    if let Some((k, s)) = wedge2(n, *c, *d) {
                        *acc.entry(k).or_insert_with(|| q(0)) += coeff * q(s * pca * pdb);
                    }
                }
            }
        }
        acc.into_iter().filter(|(_, c)| *c != q(0)).collect()
    }

    /// Gram matrix columns: `columns[a] = [(c, ⟨c, a⟩)]`.
    fn columns(&self) -> Vec<Vec<(usize, i64)>> {
        let mut cols = vec![Vec::new(); self.generators()];
        for (c, row) in self.pairing.iter().enumerate() {
            for (a, x) in row {
                if *x != 0 {
                    cols[*a].push((c, *x));
                }
            }
        }
        cols
    }

    /// Annihilator of the relations inside block `w`, in global coordinates.
    pub fn annihilator_in(&self, w: &[i64]) -> Vec<SparseVec> {
        let cols = self.columns();
        self.annihilator_with(&cols, w)
    }

    fn annihilator_with(&self, cols: &[Vec<(usize, i64)>], w: &[i64]) -> Vec<SparseVec> {
        let dual_w = negate(w);
        let functionals: Vec<SparseVec> = self
            .relations_in(&dual_w)
            .iter()
            .map(|r| self.functional(cols, r))
            .collect();
        let local = self.localize(w, &functionals);
        Echelon::from_vectors(local.iter())
            .kernel(self.block_dim(w))
            .iter()
            .map(|v| self.globalize(w, v))
            .collect()
    }

    /// The dual datum `(V^∨, S^⊥)` with `V^∨` identified with `V` through the
    /// pairing, so that dualizing twice lands in the same coordinates.
    pub fn dual(&self) -> Self {
        let cols = self.columns();
        let weights: Vec<Weight> = self.blocks.keys().cloned().collect();
        let relations: BTreeMap<Weight, Echelon> = weights
            .par_iter()
            .map(|w| {
                let ann = self.annihilator_with(&cols, w);
                (w.clone(), Echelon::from_vectors(self.localize(w, &ann).iter()))
            })
            .filter(|(_, e)| e.rank() > 0)
            .collect();
        Self {
            kind: self.kind.opposite(),
            weights: self.weights.clone(),
            pairing: self.pairing.clone(),
            pairs: self.pairs.clone(),
            blocks: self.blocks.clone(),
            relations,
        }
    }

    /// Equality of relation spans, block by block.
    pub fn same_relations(&self, other: &Self) -> bool {
        if self.pairs != other.pairs {
            return false;
        }
        self.blocks.keys().all(|w| {
            let (a, b) = (self.relations.get(w), other.relations.get(w));
            let ra = a.map_or(0, Echelon::rank);
            let rb = b.map_or(0, Echelon::rank);
            ra == rb && a.is_none_or(|a| a.basis().all(|v| b.is_some_and(|b| b.contains(v))))
        })
    }

    /// `dim S_w` on dominant block weights, ready for a character.
    pub fn dominant_relation_dims(&self) -> Vec<(Weight, i64)> {
        self.blocks
            .keys()
            .filter(|w| crate::repchar::dominant_rep(w) == **w)
            .map(|w| (w.clone(), self.relation_rank_in(w) as i64))
            .collect()
    }
}

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;

use crate::echelon::Echelon;
use crate::elim::rank;
use crate::error::{ExactlaError, Result};
use crate::matrix::{RationalSparseMatrix, SparseVec};
use crate::Q;

/// Secondary grading of a generator: internal degree `q` and weight `w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Grading {
    pub q: i64,
    pub w: i64,
}

impl Grading {
    pub fn new(q: i64, w: i64) -> Self {
        Self { q, w }
    }
}

/// A bounded chain complex of finite-dimensional ℚ-vector spaces.
///
/// `d_k : C_k → C_{k−1}` is stored as a `dim C_{k−1} × dim C_k` matrix;
/// missing differentials are zero.
#[derive(Clone, Debug, Default)]
pub struct ChainComplex {
    labels: BTreeMap<i64, Vec<String>>,
    gradings: BTreeMap<i64, Vec<Grading>>,
    differentials: BTreeMap<i64, RationalSparseMatrix>,
}

/// Homology dimensions per (degree, grading block).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HomologyTable {
    pub cells: BTreeMap<(i64, Option<Grading>), usize>,
}

impl HomologyTable {
    pub fn get(&self, degree: i64, grading: Option<Grading>) -> usize {
        self.cells.get(&(degree, grading)).copied().unwrap_or(0)
    }

    /// Total dimension in `degree`, summed over grading blocks.
    pub fn total(&self, degree: i64) -> usize {
        self.cells
            .iter()
            .filter(|((k, _), _)| *k == degree)
            .map(|(_, d)| *d)
            .sum()
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (i64, Option<Grading>, usize)> + '_ {
        self.cells
            .iter()
            .filter(|(_, d)| **d > 0)
            .map(|((k, g), d)| (*k, *g, *d))
    }

    pub fn is_zero(&self) -> bool {
        self.nonzero().next().is_none()
    }
}

impl ChainComplex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets the basis of `C_k`. Gradings, if given, must align with labels.
    pub fn set_basis(&mut self, k: i64, labels: Vec<String>, gradings: Option<Vec<Grading>>) {
        if let Some(g) = gradings {
            assert_eq!(g.len(), labels.len(), "one grading per label");
            self.gradings.insert(k, g);
        }
        self.labels.insert(k, labels);
    }

    pub fn set_differential(&mut self, k: i64, d: RationalSparseMatrix) {
        self.differentials.insert(k, d);
    }

    pub fn dim(&self, k: i64) -> usize {
        self.labels.get(&k).map_or(0, Vec::len)
    }

    pub fn labels(&self, k: i64) -> &[String] {
        self.labels.get(&k).map_or(&[], Vec::as_slice)
    }

    pub fn gradings(&self, k: i64) -> Option<&[Grading]> {
        self.gradings.get(&k).map(Vec::as_slice)
    }

    /// Degrees with a nonzero chain group.
    pub fn degrees(&self) -> Vec<i64> {
        self.labels
            .iter()
            .filter(|(_, l)| !l.is_empty())
            .map(|(k, _)| *k)
            .collect()
    }

    pub fn differential(&self, k: i64) -> RationalSparseMatrix {
        self.differentials
            .get(&k)
            .cloned()
            .unwrap_or_else(|| RationalSparseMatrix::zero(self.dim(k - 1), self.dim(k)))
    }

    fn check_shapes(&self) -> Result<()> {
        for (&k, d) in &self.differentials {
            let expected = (self.dim(k - 1), self.dim(k));
            if (d.rows(), d.cols()) != expected {
                return Err(ExactlaError::ShapeMismatch {
                    degree: k,
                    got: (d.rows(), d.cols()),
                    expected,
                });
            }
        }
        Ok(())
    }

    /// Verifies `d_k ∘ d_{k+1} = 0` exactly in every degree.
    pub fn check_square_zero(&self) -> Result<()> {
        self.check_shapes()?;
        for &k in self.differentials.keys() {
            let Some(upper) = self.differentials.get(&(k + 1)) else {
                continue;
            };
            let comp = self.differentials[&k].mul(upper);
            if !comp.is_zero() {
                return Err(ExactlaError::NonzeroSquare {
                    degree: k,
                    upper: k + 1,
                    nonzero: comp.nnz(),
                });
            }
        }
        Ok(())
    }

    fn grading_of(&self, k: i64, i: usize) -> Option<Grading> {
        self.gradings.get(&k).map(|g| g[i])
    }

    /// Verifies that every differential maps each graded block into itself.
    pub fn check_gradings(&self) -> Result<()> {
        for (&k, d) in &self.differentials {
            for (r, c, _) in d.entries() {
                let from = self.grading_of(k, c);
                let to = self.grading_of(k - 1, r);
                if from != to {
                    let unpack = |g: Option<Grading>| g.map_or((i64::MIN, i64::MIN), |g| (g.q, g.w));
                    return Err(ExactlaError::GradingNotPreserved {
                        degree: k,
                        from: unpack(from),
                        to: unpack(to),
                    });
                }
            }
        }
        Ok(())
    }

    fn blocks(&self, k: i64) -> BTreeMap<Option<Grading>, Vec<usize>> {
        let mut out: BTreeMap<Option<Grading>, Vec<usize>> = BTreeMap::new();
        for i in 0..self.dim(k) {
            out.entry(self.grading_of(k, i)).or_default().push(i);
        }
        out
    }

    /// Ranks of `d_k` restricted to each graded block.
    fn block_ranks(&self, k: i64) -> BTreeMap<Option<Grading>, usize> {
        let Some(d) = self.differentials.get(&k) else {
            return BTreeMap::new();
        };
        let src = self.blocks(k);
        let tgt = self.blocks(k - 1);
        let mut pos_src = vec![0usize; self.dim(k)];
        for idx in src.values() {
            for (p, i) in idx.iter().enumerate() {
                pos_src[*i] = p;
            }
        }
        let mut pos_tgt = vec![0usize; self.dim(k - 1)];
        for idx in tgt.values() {
            for (p, i) in idx.iter().enumerate() {
                pos_tgt[*i] = p;
            }
        }
        let mut trip: BTreeMap<Option<Grading>, Vec<(usize, usize, Q)>> = BTreeMap::new();
        for (r, c, v) in d.entries() {
            trip.entry(self.grading_of(k, c))
                .or_default()
                .push((pos_tgt[r], pos_src[c], v.clone()));
        }
        trip.into_iter()
            .map(|(g, t)| {
                let rows = tgt.get(&g).map_or(0, Vec::len);
                let cols = src.get(&g).map_or(0, Vec::len);
                let m = RationalSparseMatrix::from_triplets(rows, cols, t).expect("block indices are in range");
                (g, rank(&m))
            })
            .collect()
    }

    /// dim H_k = dim ker d_k − rank d_{k+1}, per degree and graded block.
    ///
    /// Fails with the offending degree if `d∘d ≠ 0`.
    pub fn homology_dims(&self) -> Result<HomologyTable> {
        self.check_square_zero()?;
        self.check_gradings()?;
        let mut table = HomologyTable::default();
        let degrees: BTreeSet<i64> = self.labels.keys().copied().collect();
        let mut ranks: BTreeMap<i64, BTreeMap<Option<Grading>, usize>> = BTreeMap::new();
        for &k in degrees.iter() {
            ranks.insert(k, self.block_ranks(k));
            ranks.insert(k + 1, self.block_ranks(k + 1));
        }
        for &k in degrees.iter() {
            for (g, idx) in self.blocks(k) {
                let out_rank = ranks[&k].get(&g).copied().unwrap_or(0);
                let in_rank = ranks[&(k + 1)].get(&g).copied().unwrap_or(0);
                table.cells.insert((k, g), idx.len() - out_rank - in_rank);
            }
        }
        Ok(table)
    }

    /// Cycles in `C_k` whose classes form a basis of `H_k`.
    pub fn homology_basis(&self, k: i64) -> Result<Vec<SparseVec>> {
        self.check_square_zero()?;
        let d = self.differential(k);
        let cycles = crate::echelon::nullspace_basis(&d);
        let up = self.differential(k + 1);
        let mut span = Echelon::new();
        for b in up.column_vectors() {
            span.insert(&b);
        }
        let mut reps = Vec::new();
        for z in cycles {
            if span.insert(&z) {
                reps.push(z);
            }
        }
        Ok(reps)
    }
}

/// A degree-preserving map of chain complexes, `f_k : A_k → B_k`.
#[derive(Clone, Debug, Default)]
pub struct ChainMap {
    pub maps: BTreeMap<i64, RationalSparseMatrix>,
}

impl ChainMap {
    pub fn component(&self, k: i64, a: &ChainComplex, b: &ChainComplex) -> RationalSparseMatrix {
        self.maps
            .get(&k)
            .cloned()
            .unwrap_or_else(|| RationalSparseMatrix::zero(b.dim(k), a.dim(k)))
    }

    /// Checks `d^B_k f_k = f_{k−1} d^A_k` in every degree.
    pub fn check(&self, a: &ChainComplex, b: &ChainComplex) -> Result<()> {
        let degrees: BTreeSet<i64> = a.degrees().into_iter().chain(b.degrees()).collect();
        for k in degrees {
            let lhs = b.differential(k).mul(&self.component(k, a, b));
            let rhs = self.component(k - 1, a, b).mul(&a.differential(k));
            if lhs != rhs {
                return Err(ExactlaError::NotChainMap { degree: k });
            }
        }
        Ok(())
    }
}

/// Mapping cone of `f : A → B`: `Cone_k = A_{k−1} ⊕ B_k` with
/// `d(a, b) = (−d a, f a + d b)`.
pub fn mapping_cone(a: &ChainComplex, b: &ChainComplex, f: &ChainMap) -> Result<ChainComplex> {
    f.check(a, b)?;
    let mut degrees: BTreeSet<i64> = b.degrees().into_iter().collect();
    degrees.extend(a.degrees().into_iter().map(|k| k + 1));
    let mut cone = ChainComplex::new();
    let graded = !a.gradings.is_empty() || !b.gradings.is_empty();
    let lo = degrees.iter().next().copied().unwrap_or(0);
    let hi = degrees.iter().next_back().copied().unwrap_or(0);
    for k in lo..=hi {
        let mut labels: Vec<String> = a.labels(k - 1).iter().map(|l| format!("A:{l}")).collect();
        labels.extend(b.labels(k).iter().map(|l| format!("B:{l}")));
        let gradings = graded.then(|| {
            let mut g: Vec<Grading> = (0..a.dim(k - 1))
                .map(|i| a.grading_of(k - 1, i).expect("graded complexes carry gradings"))
                .collect();
            g.extend((0..b.dim(k)).map(|i| b.grading_of(k, i).expect("graded complexes carry gradings")));
            g
        });
        cone.set_basis(k, labels, gradings);
    }
    for k in lo..=hi {
        let (a1, b0) = (a.dim(k - 1), b.dim(k));
        let (a2, b1) = (a.dim(k - 2), b.dim(k - 1));
        if a1 + b0 == 0 || a2 + b1 == 0 {
            continue;
        }
        let neg_da = a.differential(k - 1).scaled(&-Q::one());
        let fa = f.component(k - 1, a, b);
        let db = b.differential(k);
        let m = RationalSparseMatrix::assemble(a2 + b1, a1 + b0, &[(0, 0, &neg_da), (a2, 0, &fa), (a2, a1, &db)])?;
        cone.set_differential(k, m);
    }
    Ok(cone)
}

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::matrix::{RationalSparseMatrix, SparseVec};
use crate::Q;

/// Incrementally built row-echelon basis of a subspace of ℚ^cols.
///
/// Each stored row has leading coefficient 1 at its pivot column; pivots are
/// distinct. Reducing a vector against the basis clears every pivot column,
/// so the remainder gives canonical coordinates in the quotient by the span
/// (supported on non-pivot columns).
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vectors<'a, I: IntoIterator<Item = &'a SparseVec>>(vs: I) -> Self {
        let mut e = Self::new();
        for v in vs {
            e.insert(v);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    /// Remainder of `v` modulo the span; zero at every pivot column.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut acc: BTreeMap<usize, Q> = v.iter().cloned().collect();
        let mut cursor = 0usize;
        loop {
            let next = acc
                .range(cursor..)
                .find(|(c, _)| self.rows.contains_key(c))
                .map(|(c, x)| (*c, x.clone()));
            let Some((c, x)) = next else { break };
            for (j, y) in &self.rows[&c] {
                let e = acc.entry(*j).or_insert_with(Q::zero);
                *e -= &x * y;
                if e.is_zero() {
                    acc.remove(j);
                }
            }
            cursor = c + 1;
        }
        acc.into_iter().collect()
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the span. Returns `true` if the rank grew.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let r = self.reduce(v);
        let Some((p, lead)) = r.first().cloned() else {
            return false;
        };
        let inv = Q::one() / lead;
        let row = r.into_iter().map(|(c, x)| (c, x * &inv)).collect();
        self.rows.insert(p, row);
        true
    }

    /// Brings the basis to reduced row-echelon form (each pivot column is zero
    /// in every other row) and returns the rows keyed by pivot.
    pub fn reduced(&self) -> BTreeMap<usize, SparseVec> {
        let mut out: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for (&p, row) in self.rows.iter().rev() {
            let mut acc: BTreeMap<usize, Q> = row.iter().cloned().collect();
            let later: Vec<usize> = acc.keys().copied().filter(|c| *c != p && out.contains_key(c)).collect();
            for c in later {
                let Some(x) = acc.get(&c).cloned() else { continue };
                for (j, y) in &out[&c] {
                    let e = acc.entry(*j).or_insert_with(Q::zero);
                    *e -= &x * y;
                    if e.is_zero() {
                        acc.remove(j);
                    }
                }
            }
            out.insert(p, acc.into_iter().collect());
        }
        out
    }

    /// Basis of `{x : row · x = 0 for every basis row}`, i.e. the kernel of
    /// any matrix whose rows span this subspace.
    pub fn kernel(&self, ncols: usize) -> Vec<SparseVec> {
        let red = self.reduced();
        let mut kernel = Vec::new();
        for f in (0..ncols).filter(|c| !red.contains_key(c)) {
            let mut v: BTreeMap<usize, Q> = BTreeMap::new();
            v.insert(f, Q::one());
            for (&p, row) in &red {
                if let Ok(k) = row.binary_search_by_key(&f, |(c, _)| *c) {
                    v.insert(p, -row[k].1.clone());
                }
            }
            kernel.push(v.into_iter().collect());
        }
        kernel
    }

    pub fn basis(&self) -> impl Iterator<Item = &SparseVec> {
        self.rows.values()
    }
}

/// Basis of ker(M) as sparse rational vectors, `cols − rank(M)` of them.
pub fn nullspace_basis(m: &RationalSparseMatrix) -> Vec<SparseVec> {
    let rows = m.row_vectors();
    Echelon::from_vectors(rows.iter()).kernel(m.cols())
}

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{ExactlaError, Result};
use crate::Q;

/// A sparse vector: strictly increasing indices, no stored zeros.
pub type SparseVec = Vec<(usize, Q)>;

/// Sparse rational matrix in coordinate form.
///
/// Entries are kept sorted by `(row, col)` with no duplicates and no zeros, so
/// two matrices are equal exactly when they represent the same linear map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Q)>,
}

impl RationalSparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            entries: (0..n).map(|i| (i, i, Q::one())).collect(),
        }
    }

    /// Builds a matrix from triplets, summing repeated positions and dropping zeros.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Q)>,
    {
        let mut acc: BTreeMap<(usize, usize), Q> = BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(ExactlaError::IndexOutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            if v.is_zero() {
                continue;
            }
            *acc.entry((r, c)).or_insert_with(Q::zero) += v;
        }
        let entries = acc
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|((r, c), v)| (r, c, v))
            .collect();
        Ok(Self { rows, cols, entries })
    }

    /// Integer-valued convenience constructor.
    pub fn from_int_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, i64)>,
    {
        Self::from_triplets(rows, cols, triplets.into_iter().map(|(r, c, v)| (r, c, crate::q(v))))
    }

    /// Dense row-major integer matrix; handy in tests.
    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let trip = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v)));
        Self::from_int_triplets(rows.len(), cols, trip).expect("dense rows are in range")
    }

    /// Matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Result<Self> {
        let trip = columns
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |(i, v)| (*i, j, v.clone())));
        Self::from_triplets(rows, columns.len(), trip)
    }

    /// Matrix whose `i`-th row is `row_vecs[i]`.
    pub fn from_rows(cols: usize, row_vecs: &[SparseVec]) -> Result<Self> {
        let trip = row_vecs
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(j, v)| (i, *j, v.clone())));
        Self::from_triplets(row_vecs.len(), cols, trip)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Q)> {
        self.entries.iter().map(|(r, c, v)| (*r, *c, v))
    }

    pub fn get(&self, row: usize, col: usize) -> Q {
        self.entries
            .binary_search_by(|(r, c, _)| (*r, *c).cmp(&(row, col)))
            .map(|k| self.entries[k].2.clone())
            .unwrap_or_else(|_| Q::zero())
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|(r, c, v)| (*c, *r, v.clone())).collect();
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// Rows as sparse vectors.
    pub fn row_vectors(&self) -> Vec<SparseVec> {
        let mut out = vec![Vec::new(); self.rows];
        for (r, c, v) in &self.entries {
            out[*r].push((*c, v.clone()));
        }
        out
    }

    /// Columns as sparse vectors.
    pub fn column_vectors(&self) -> Vec<SparseVec> {
        let mut out = vec![Vec::new(); self.cols];
        for (r, c, v) in &self.entries {
            out[*c].push((*r, v.clone()));
        }
        out
    }

    /// Product `self · rhs`.
    ///
    /// # Panics
    /// If the inner dimensions disagree.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let rhs_rows = rhs.row_vectors();
        let mut acc: BTreeMap<(usize, usize), Q> = BTreeMap::new();
        for (r, k, a) in &self.entries {
            for (c, b) in &rhs_rows[*k] {
                *acc.entry((*r, *c)).or_insert_with(Q::zero) += a * b;
            }
        }
        let entries = acc
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|((r, c), v)| (r, c, v))
            .collect();
        Self {
            rows: self.rows,
            cols: rhs.cols,
            entries,
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let cols = self.column_vectors();
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (j, x) in v {
            for (i, a) in &cols[*j] {
                *acc.entry(*i).or_insert_with(Q::zero) += a * x;
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    /// Scales every entry by `s`.
    pub fn scaled(&self, s: &Q) -> Self {
        if s.is_zero() {
            return Self::zero(self.rows, self.cols);
        }
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|(r, c, v)| (*r, *c, v * s)).collect(),
        }
    }

    /// Builds a `rows × cols` matrix from blocks given as `(row offset, col offset, block)`.
    pub fn assemble(rows: usize, cols: usize, blocks: &[(usize, usize, &RationalSparseMatrix)]) -> Result<Self> {
        let trip = blocks
            .iter()
            .flat_map(|(ro, co, m)| m.entries.iter().map(move |(r, c, v)| (r + ro, c + co, v.clone())));
        Self::from_triplets(rows, cols, trip)
    }
}

//! Fraction-free sparse elimination for ranks.
//!
//! Rows are scaled to primitive integer vectors. Elimination runs first with
//! checked `i64` arithmetic and restarts with [`BigInt`] if anything
//! overflows, so the answer is always exact. Pivots follow a Markowitz-style
//! rule: the shortest remaining row, then within it the column touching the
//! fewest rows, with ties broken by smallest index.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::matrix::{RationalSparseMatrix, SparseVec};

trait Coef: Clone + PartialEq + Sized {
    fn is_zero(&self) -> bool;
    fn mul(&self, other: &Self) -> Option<Self>;
    fn sub(&self, other: &Self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, other: &Self) -> Self;
    fn is_unit(&self) -> bool;
}

impl Coef for i64 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        self.checked_mul(*other)
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        self.checked_sub(*other)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, other: &Self) -> Self {
        self / other
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
}

impl Coef for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        Some(self - other)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, other: &Self) -> Self {
        self / other
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
}

type Row<T> = Vec<(usize, T)>;

struct Overflow;

/// `a·r − b·p`, made primitive. `None` on overflow.
fn combine<T: Coef>(r: &Row<T>, a: &T, p: &Row<T>, b: &T) -> Option<Row<T>> {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        if j >= p.len() || (i < r.len() && r[i].0 < p[j].0) {
            out.push((r[i].0, r[i].1.mul(a)?));
            i += 1;
        } else if i >= r.len() || p[j].0 < r[i].0 {
            let v = p[j].1.mul(b)?;
            out.push((p[j].0, zero_sub(&v)?));
            j += 1;
        } else {
            let v = r[i].1.mul(a)?.sub(&p[j].1.mul(b)?)?;
            if !v.is_zero() {
                out.push((r[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    make_primitive(&mut out);
    Some(out)
}

fn zero_sub<T: Coef>(v: &T) -> Option<T> {
    // 0 − v using only the trait surface.
    let z = v.sub(v)?;
    z.sub(v)
}

fn make_primitive<T: Coef>(row: &mut Row<T>) {
    let Some(first) = row.first() else { return };
    let mut g = first.1.clone();
    for (_, v) in row.iter().skip(1) {
        if g.is_unit() {
            return;
        }
        g = g.gcd(v);
    }
    if g.is_unit() || g.is_zero() {
        return;
    }
    for (_, v) in row.iter_mut() {
        *v = v.div_exact(&g);
    }
}

fn eliminate<T: Coef>(mut rows: Vec<Row<T>>, ncols: usize) -> Result<usize, Overflow> {
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); ncols];
    let mut queue: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (i, r) in rows.iter().enumerate() {
        for (c, _) in r {
            col_rows[*c].push(i);
        }
        if !r.is_empty() {
            queue.insert((r.len(), i));
        }
    }
    let mut done = vec![false; rows.len()];
    let mut rank = 0;
    while let Some(&(len, pr)) = queue.iter().next() {
        queue.remove(&(len, pr));
        done[pr] = true;
        let pivot_row = std::mem::take(&mut rows[pr]);
        let (pc, pv) = pivot_row
            .iter()
            .min_by_key(|(c, v)| (col_rows[*c].len(), !v.is_unit(), *c))
            .map(|(c, v)| (*c, v.clone()))
            .expect("queued rows are nonempty");
        rank += 1;
        let touching = std::mem::take(&mut col_rows[pc]);
        for ri in touching {
            if done[ri] {
                continue;
            }
            let Ok(pos) = rows[ri].binary_search_by_key(&pc, |(c, _)| *c) else {
                continue;
            };
            let rv = rows[ri][pos].1.clone();
            let g = pv.gcd(&rv);
            let a = pv.div_exact(&g);
            let b = rv.div_exact(&g);
            let old_len = rows[ri].len();
            let new_row = combine(&rows[ri], &a, &pivot_row, &b).ok_or(Overflow)?;
            queue.remove(&(old_len, ri));
            for (c, _) in &new_row {
                if *c != pc && rows[ri].binary_search_by_key(c, |(cc, _)| *cc).is_err() {
                    col_rows[*c].push(ri);
                }
            }
            if !new_row.is_empty() {
                queue.insert((new_row.len(), ri));
            }
            rows[ri] = new_row;
        }
        // Stale references to finished rows are skipped above; prune occasionally.
        if rank % 64 == 0 {
            for list in col_rows.iter_mut() {
                list.retain(|r| !done[*r]);
            }
        }
    }
    Ok(rank)
}

/// Scales a rational sparse vector to a primitive integer vector.
pub(crate) fn integer_row(v: &SparseVec) -> Row<BigInt> {
    let mut l = BigInt::one();
    for (_, x) in v {
        l = l.lcm(x.denom());
    }
    let mut row: Row<BigInt> = v.iter().map(|(c, x)| (*c, x.numer() * (&l / x.denom()))).collect();
    make_primitive(&mut row);
    row
}

fn to_small(rows: &[Row<BigInt>]) -> Option<Vec<Row<i64>>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|(c, v)| v.to_i64().map(|x| (*c, x)))
                .collect::<Option<Row<i64>>>()
        })
        .collect()
}

/// Rank of a list of sparse rational rows with column indices `< ncols`.
pub fn rank_of_rows(rows: &[SparseVec], ncols: usize) -> usize {
    let int_rows: Vec<Row<BigInt>> = rows.iter().map(integer_row).collect();
    if let Some(small) = to_small(&int_rows) {
        if let Ok(r) = eliminate(small, ncols) {
            return r;
        }
    }
    match eliminate(int_rows, ncols) {
        Ok(r) => r,
        Err(Overflow) => unreachable!("big integers do not overflow"),
    }
}

/// Rank over ℚ.
pub fn rank(m: &RationalSparseMatrix) -> usize {
    if m.is_zero() {
        return 0;
    }
    // Eliminate along the shorter dimension's vectors; rank is transpose-invariant.
    if m.rows() <= m.cols() {
        rank_of_rows(&m.row_vectors(), m.cols())
    } else {
        rank_of_rows(&m.column_vectors(), m.rows())
    }
}

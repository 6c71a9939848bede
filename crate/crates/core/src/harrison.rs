//! Harrison complexes of nonunital graded commutative algebras, plain and over
//! the Brauer categories, Chevalley–Eilenberg complexes of graded Lie
//! algebras, and the diagonal check on the resulting tables.
//!
//! Harrison chains of arity `p` are words of length `p` in the suspended
//! algebra modulo the span of all nontrivial signed shuffles. A letter of
//! homological degree `d` counts as `d + 1`; every sign below (shuffles and
//! the bar differential alike) is computed from these shifted degrees. The
//! chain complexes are indexed by arity, so degree `p` of the complex is the
//! Harrison degree `p`.

use std::collections::BTreeMap;

use exactla::{
    mapping_cone, q, ChainComplex, ChainMap, Echelon, ExactlaError, Grading, RationalSparseMatrix, SparseVec, Q,
};
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::brauer::{FiniteSetObject, Label};
use crate::perm::shuffles;
use crate::species::{day_tensor_basis, DayWord, Family, Species, SpeciesError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HarrisonError {
    #[error(transparent)]
    Linear(#[from] ExactlaError),
    #[error(transparent)]
    Species(#[from] SpeciesError),
    #[error("basis index {0} is out of range")]
    IndexOutOfRange(usize),
    #[error("generator {0} has weight 0; weights must be positive")]
    ZeroWeight(String),
    #[error("product of {0} and {1} is not homogeneous")]
    Inhomogeneous(usize, usize),
    #[error("product of {0} and {1} is not graded commutative")]
    NotCommutative(usize, usize),
    #[error("product is not associative on ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("bracket of {0} and {1} is not antisymmetric")]
    NotAntisymmetric(usize, usize),
    #[error("Jacobi identity fails on ({0}, {1}, {2})")]
    Jacobi(usize, usize, usize),
    #[error("arity {arity} has {count} words, above the limit {limit}")]
    TooLarge { arity: usize, count: usize, limit: usize },
    #[error("word {0} is missing from the enumerated basis")]
    MissingWord(String),
}

pub type Result<T> = std::result::Result<T, HarrisonError>;

/// Resource guard on the number of words in one arity.
pub const WORD_LIMIT: usize = 60_000;

fn sparse(acc: BTreeMap<usize, Q>) -> SparseVec {
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

fn add_to(acc: &mut BTreeMap<usize, Q>, k: usize, c: &Q) {
    let e = acc.entry(k).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        acc.remove(&k);
    }
}

// ---------------------------------------------------------------------------
// Plain algebras.

/// A finite-dimensional nonunital commutative algebra on a homogeneous basis.
///
/// Each basis element has a homological degree, an internal degree and a
/// positive weight. Commutativity carries the Koszul sign of the homological
/// degrees only.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedAlgebraPresentation {
    labels: Vec<String>,
    degree: Vec<i64>,
    internal: Vec<i64>,
    weight: Vec<u32>,
    products: BTreeMap<(usize, usize), SparseVec>,
}

impl GradedAlgebraPresentation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_generator(
        &mut self,
        label: impl Into<String>,
        degree: i64,
        internal: i64,
        weight: u32,
    ) -> Result<usize> {
        let label = label.into();
        if weight == 0 {
            return Err(HarrisonError::ZeroWeight(label));
        }
        self.labels.push(label);
        self.degree.push(degree);
        self.internal.push(internal);
        self.weight.push(weight);
        Ok(self.labels.len() - 1)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degree[i]
    }

    pub fn internal(&self, i: usize) -> i64 {
        self.internal[i]
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.weight[i]
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.dim() {
            Ok(())
        } else {
            Err(HarrisonError::IndexOutOfRange(i))
        }
    }

    /// Sets `x_i · x_j = v`, and `x_j · x_i` by graded commutativity.
    pub fn set_product(&mut self, i: usize, j: usize, v: SparseVec) -> Result<()> {
        self.check_index(i)?;
        self.check_index(j)?;
        let mut acc = BTreeMap::new();
        for (k, c) in &v {
            self.check_index(*k)?;
            add_to(&mut acc, *k, c);
        }
        let v = sparse(acc);
        for (k, _) in &v {
            if self.degree[*k] != self.degree[i] + self.degree[j]
                || self.internal[*k] != self.internal[i] + self.internal[j]
                || self.weight[*k] != self.weight[i] + self.weight[j]
            {
                return Err(HarrisonError::Inhomogeneous(i, j));
            }
        }
        let odd = (self.degree[i] * self.degree[j]) % 2 != 0;
        if i == j && odd && !v.is_empty() {
            return Err(HarrisonError::NotCommutative(i, j));
        }
        let swapped: SparseVec = if odd {
            v.iter().map(|(k, c)| (*k, -c.clone())).collect()
        } else {
            v.clone()
        };
        self.products.insert((i, j), v);
        self.products.insert((j, i), swapped);
        Ok(())
    }

    pub fn product(&self, i: usize, j: usize) -> SparseVec {
        self.products.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn multiply(&self, u: &SparseVec, v: &SparseVec) -> SparseVec {
        let mut acc = BTreeMap::new();
        for (i, a) in u {
            for (j, b) in v {
                for (k, c) in self.products.get(&(*i, *j)).into_iter().flatten() {
                    add_to(&mut acc, *k, &(a * b * c));
                }
            }
        }
        sparse(acc)
    }

    /// Verifies graded commutativity and associativity on all basis triples.
    pub fn check(&self) -> Result<()> {
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let sign = if (self.degree[i] * self.degree[j]) % 2 != 0 {
                    -1
                } else {
                    1
                };
                let ij = self.product(i, j);
                let ji: SparseVec = self.product(j, i).into_iter().map(|(k, c)| (k, c * q(sign))).collect();
                if ij != ji {
                    return Err(HarrisonError::NotCommutative(i, j));
                }
            }
        }
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let ij = self.product(i, j);
                for k in 0..self.dim() {
                    let left = self.multiply(&ij, &vec![(k, q(1))]);
                    let right = self.multiply(&vec![(i, q(1))], &self.product(j, k));
                    if left != right {
                        return Err(HarrisonError::NotAssociative(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Word models and shuffle quotients.

/// A tensor-power model: bases of the `p`-fold tensor powers, the symmetric
/// group action on factors, and multiplication of adjacent factors.
trait WordModel: Sync {
    type Word: Clone + Ord + Send + Sync;

    fn words(&self, p: usize) -> Vec<Self::Word>;
    fn label(&self, w: &Self::Word) -> String;
    fn grading(&self, w: &Self::Word) -> Grading;
    /// Shifted degrees `d_i + 1` of the factors.
    fn shifted(&self, w: &Self::Word) -> Vec<i64>;
    /// Factor `perm[k]` moves to position `k`; `None` if the result is zero.
    fn permute(&self, w: &Self::Word, perm: &[usize]) -> Result<Option<(Self::Word, i32)>>;
    /// Product of factors `i` and `i + 1`, without the bar sign.
    fn merge(&self, w: &Self::Word, i: usize) -> Result<Vec<(Self::Word, Q)>>;
}

struct PlainWords<'a> {
    algebra: &'a GradedAlgebraPresentation,
    internal: Option<i64>,
    weight: u32,
}

impl WordModel for PlainWords<'_> {
    type Word = Vec<usize>;

    fn words(&self, p: usize) -> Vec<Vec<usize>> {
        let a = self.algebra;
        let mut out = Vec::new();
        fn rec(a: &GradedAlgebraPresentation, p: usize, left: u32, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == p {
                if left == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            // Every remaining letter has weight at least one.
            let still = (p - cur.len() - 1) as u32;
            for i in 0..a.dim() {
                if a.weight[i] + still <= left {
                    cur.push(i);
                    rec(a, p, left - a.weight[i], cur, out);
                    cur.pop();
                }
            }
        }
        rec(a, p, self.weight, &mut Vec::new(), &mut out);
        if let Some(qq) = self.internal {
            out.retain(|w| w.iter().map(|i| a.internal[*i]).sum::<i64>() == qq);
        }
        out
    }

    fn label(&self, w: &Vec<usize>) -> String {
        w.iter()
            .map(|i| self.algebra.labels[*i].as_str())
            .collect::<Vec<_>>()
            .join("|")
    }

    fn grading(&self, w: &Vec<usize>) -> Grading {
        let a = self.algebra;
        Grading::new(
            w.iter().map(|i| a.internal[*i]).sum(),
            w.iter().map(|i| a.weight[*i] as i64).sum(),
        )
    }

    fn shifted(&self, w: &Vec<usize>) -> Vec<i64> {
        w.iter().map(|i| self.algebra.degree[*i] + 1).collect()
    }

    fn permute(&self, w: &Vec<usize>, perm: &[usize]) -> Result<Option<(Vec<usize>, i32)>> {
        let e = self.shifted(w);
        let mut inv = vec![0; perm.len()];
        for (k, old) in perm.iter().enumerate() {
            inv[*old] = k;
        }
        let mut sign = 1;
        for i in 0..perm.len() {
            for j in (i + 1)..perm.len() {
                if inv[i] > inv[j] && (e[i] * e[j]) % 2 != 0 {
                    sign = -sign;
                }
            }
        }
        Ok(Some((perm.iter().map(|k| w[*k]).collect(), sign)))
    }

    fn merge(&self, w: &Vec<usize>, i: usize) -> Result<Vec<(Vec<usize>, Q)>> {
        Ok(self
            .algebra
            .product(w[i], w[i + 1])
            .into_iter()
            .map(|(k, c)| {
                let mut v = Vec::with_capacity(w.len() - 1);
                v.extend_from_slice(&w[..i]);
                v.push(k);
                v.extend_from_slice(&w[i + 2..]);
                (v, c)
            })
            .collect())
    }
}

struct SpeciesWords<'a> {
    species: Species,
    set: &'a FiniteSetObject,
    weight: u32,
}

impl WordModel for SpeciesWords<'_> {
    type Word = DayWord;

    fn words(&self, p: usize) -> Vec<DayWord> {
        day_tensor_basis(&self.species, p, self.set, self.weight)
    }

    fn label(&self, w: &DayWord) -> String {
        w.to_string()
    }

    fn grading(&self, w: &DayWord) -> Grading {
        let wt = w.weight() as i64;
        Grading::new(self.species.n as i64 * wt, wt)
    }

    fn shifted(&self, w: &DayWord) -> Vec<i64> {
        w.blocks
            .iter()
            .map(|b| (self.species.n * b.weight()) as i64 + 1)
            .collect()
    }

    fn permute(&self, w: &DayWord, perm: &[usize]) -> Result<Option<(DayWord, i32)>> {
        let (moved, s) = w.permute_blocks(perm, self.species.n);
        Ok(moved.canonical(&self.species).map(|(c, t)| (c, s * t)))
    }

    fn merge(&self, w: &DayWord, i: usize) -> Result<Vec<(DayWord, Q)>> {
        let Some((merged, s)) = w.merge_adjacent(i, &self.species)? else {
            return Ok(Vec::new());
        };
        Ok(merged
            .canonical(&self.species)
            .map(|(c, t)| (c, q((s * t) as i64)))
            .into_iter()
            .collect())
    }
}

/// The arity-`p` words modulo nontrivial shuffles. The quotient basis is the
/// set of words that are not pivots of the relation echelon.
struct ShuffleQuotient<W> {
    words: Vec<W>,
    index: BTreeMap<W, usize>,
    relations: Echelon,
    basis: Vec<usize>,
    position: BTreeMap<usize, usize>,
}

impl<W: Ord + Clone> ShuffleQuotient<W> {
    fn build<M: WordModel<Word = W>>(model: &M, p: usize) -> Result<Self> {
        let words = model.words(p);
        if words.len() > WORD_LIMIT {
            return Err(HarrisonError::TooLarge {
                arity: p,
                count: words.len(),
                limit: WORD_LIMIT,
            });
        }
        let index: BTreeMap<W, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let splits: Vec<Vec<Vec<usize>>> = (1..p).map(|r| shuffles(r, p - r)).collect();
        let mut relations = Echelon::new();
        for word in &words {
            for family in &splits {
                let mut acc = BTreeMap::new();
                for sh in family {
                    if let Some((w2, s)) = model.permute(word, sh)? {
                        let j = *index
                            .get(&w2)
                            .ok_or_else(|| HarrisonError::MissingWord(model.label(&w2)))?;
                        add_to(&mut acc, j, &q(s as i64));
                    }
                }
                relations.insert(&sparse(acc));
            }
        }
        let basis: Vec<usize> = (0..words.len()).filter(|i| !relations.is_pivot(*i)).collect();
        let position = basis.iter().enumerate().map(|(k, i)| (*i, k)).collect();
        Ok(Self {
            words,
            index,
            relations,
            basis,
            position,
        })
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates in the quotient basis of a vector of words.
    fn coordinates(&self, v: BTreeMap<usize, Q>) -> SparseVec {
        let r = self.relations.reduce(&sparse(v));
        r.into_iter().map(|(i, c)| (self.position[&i], c)).collect()
    }

    fn lookup(&self, w: &W) -> Option<usize> {
        self.index.get(w).copied()
    }
}

fn bar_signs(shifted: &[i64]) -> Vec<i32> {
    let mut acc = 0i64;
    shifted
        .iter()
        .map(|e| {
            acc += e;
            if acc % 2 == 0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

fn build_from_model<M: WordModel>(model: &M, max_p: usize) -> Result<(ChainComplex, Vec<ShuffleQuotient<M::Word>>)> {
    let quotients: Vec<ShuffleQuotient<M::Word>> = (1..=max_p)
        .into_par_iter()
        .map(|p| ShuffleQuotient::build(model, p))
        .collect::<Result<_>>()?;
    let mut complex = ChainComplex::new();
    for (k, quot) in quotients.iter().enumerate() {
        let labels = quot.basis.iter().map(|i| model.label(&quot.words[*i])).collect();
        let gradings = quot.basis.iter().map(|i| model.grading(&quot.words[*i])).collect();
        complex.set_basis(k as i64 + 1, labels, Some(gradings));
    }
    for p in 2..=max_p {
        let (src, dst) = (&quotients[p - 1], &quotients[p - 2]);
        if src.dim() == 0 || dst.dim() == 0 {
            continue;
        }
        let columns: Vec<SparseVec> = src
            .basis
            .par_iter()
            .map(|i| {
                let word = &src.words[*i];
                let signs = bar_signs(&model.shifted(word));
                let mut acc = BTreeMap::new();
                for (pos, sign) in signs.iter().take(p - 1).enumerate() {
                    for (w2, c) in model.merge(word, pos)? {
                        let j = dst
                            .lookup(&w2)
                            .ok_or_else(|| HarrisonError::MissingWord(model.label(&w2)))?;
                        add_to(&mut acc, j, &(c * q(*sign as i64)));
                    }
                }
                Ok(dst.coordinates(acc))
            })
            .collect::<Result<_>>()?;
        complex.set_differential(p as i64, RationalSparseMatrix::from_columns(dst.dim(), &columns)?);
    }
    complex.check_square_zero()?;
    complex.check_gradings()?;
    Ok((complex, quotients))
}

// ---------------------------------------------------------------------------
// Tables.

/// One nonzero homology cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HcomCell {
    pub p: usize,
    pub q: i64,
    pub w: u32,
    pub dim: usize,
}

/// Nonzero homology cells of one algebra on one set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HcomTable {
    pub family: String,
    #[serde(rename = "S")]
    pub set: Vec<Label>,
    pub n: u32,
    pub cells: Vec<HcomCell>,
}

impl HcomTable {
    pub fn new(family: impl Into<String>, set: Vec<Label>, n: u32) -> Self {
        Self {
            family: family.into(),
            set,
            n,
            cells: Vec::new(),
        }
    }

    pub fn get(&self, p: usize, q: i64, w: u32) -> usize {
        self.cells
            .iter()
            .find(|c| c.p == p && c.q == q && c.w == w)
            .map_or(0, |c| c.dim)
    }

    fn absorb(&mut self, complex: &ChainComplex) -> Result<()> {
        for (k, g, dim) in complex.homology_dims()?.nonzero() {
            let g = g.expect("Harrison complexes are graded");
            self.cells.push(HcomCell {
                p: k as usize,
                q: g.q,
                w: g.w as u32,
                dim,
            });
        }
        self.cells.sort();
        Ok(())
    }
}

fn species_name(sp: &Species) -> String {
    match sp.family {
        Family::Z => format!("Z{}", sp.n),
        Family::E => format!("E{}", sp.n),
        Family::EModKappa2 => "E1/(kappa_e2)".to_string(),
    }
}

/// Harrison complex of `a` in internal degree `q` and weight `w`.
pub fn harrison_complex(a: &GradedAlgebraPresentation, internal: i64, weight: u32) -> Result<ChainComplex> {
    let model = PlainWords {
        algebra: a,
        internal: Some(internal),
        weight,
    };
    Ok(build_from_model(&model, weight as usize)?.0)
}

/// Harrison homology of `a` in weights `1..=max_w`, every internal degree.
pub fn hcom_table(a: &GradedAlgebraPresentation, max_w: u32) -> Result<HcomTable> {
    a.check()?;
    let mut table = HcomTable::new("algebra", Vec::new(), 0);
    for w in 1..=max_w {
        let model = PlainWords {
            algebra: a,
            internal: None,
            weight: w,
        };
        table.absorb(&build_from_model(&model, w as usize)?.0)?;
    }
    Ok(table)
}

/// Harrison complex of the augmentation ideal of `sp` evaluated on `s`, in
/// weight `w`, built from Day tensor powers.
pub fn harrison_species_complex(sp: &Species, s: &FiniteSetObject, w: u32) -> Result<ChainComplex> {
    let model = SpeciesWords {
        species: *sp,
        set: s,
        weight: w,
    };
    Ok(build_from_model(&model, w as usize)?.0)
}

/// Harrison homology of `sp` on `s` in weights `1..=max_w`.
pub fn hcom_species(sp: &Species, s: &FiniteSetObject, max_w: u32) -> Result<HcomTable> {
    let mut table = HcomTable::new(species_name(sp), s.labels().to_vec(), sp.n);
    for w in 1..=max_w {
        table.absorb(&harrison_species_complex(sp, s, w)?)?;
    }
    Ok(table)
}

/// Mapping cone of the map `Harr(E_n) → Harr(Z_n)` on `s` in weight `w`. A
/// class coming from arity `r` of `E_n` sits in degree `r + 1`.
pub fn relative_species_complex(n: u32, s: &FiniteSetObject, w: u32) -> Result<ChainComplex> {
    let (ze, zz) = (Species::e(n), Species::z(n));
    let e_model = SpeciesWords {
        species: ze,
        set: s,
        weight: w,
    };
    let z_model = SpeciesWords {
        species: zz,
        set: s,
        weight: w,
    };
    let (e_cx, e_q) = build_from_model(&e_model, w as usize)?;
    let (z_cx, z_q) = build_from_model(&z_model, w as usize)?;
    let mut f = ChainMap::default();
    for (k, (src, dst)) in e_q.iter().zip(z_q.iter()).enumerate() {
        if src.dim() == 0 || dst.dim() == 0 {
            continue;
        }
        let mut columns = Vec::with_capacity(src.dim());
        for i in &src.basis {
            let mut acc = BTreeMap::new();
            if let Some((c, sign)) = src.words[*i].to_z().and_then(|z| z.canonical(&zz)) {
                let j = dst
                    .lookup(&c)
                    .ok_or_else(|| HarrisonError::MissingWord(c.to_string()))?;
                add_to(&mut acc, j, &q(sign as i64));
            }
            columns.push(dst.coordinates(acc));
        }
        f.maps
            .insert(k as i64 + 1, RationalSparseMatrix::from_columns(dst.dim(), &columns)?);
    }
    let cone = mapping_cone(&e_cx, &z_cx, &f)?;
    cone.check_square_zero()?;
    Ok(cone)
}

/// Relative Harrison homology of `(Z_n, E_n)` on `s` in weights `1..=max_w`.
pub fn relative_hcom(n: u32, s: &FiniteSetObject, max_w: u32) -> Result<HcomTable> {
    let mut table = HcomTable::new(format!("(Z{n},E{n})"), s.labels().to_vec(), n);
    for w in 1..=max_w {
        table.absorb(&relative_species_complex(n, s, w)?)?;
    }
    Ok(table)
}

// ---------------------------------------------------------------------------
// Lie algebras.

/// A finite-dimensional Lie algebra in homological degree 0, graded by
/// positive weights.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedLieAlgebra {
    labels: Vec<String>,
    weight: Vec<u32>,
    brackets: BTreeMap<(usize, usize), SparseVec>,
}

impl GradedLieAlgebra {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_generator(&mut self, label: impl Into<String>, weight: u32) -> Result<usize> {
        let label = label.into();
        if weight == 0 {
            return Err(HarrisonError::ZeroWeight(label));
        }
        self.labels.push(label);
        self.weight.push(weight);
        Ok(self.labels.len() - 1)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.weight[i]
    }

    /// Sets `[x_i, x_j] = v` and `[x_j, x_i] = −v`.
    pub fn set_bracket(&mut self, i: usize, j: usize, v: SparseVec) -> Result<()> {
        for k in [i, j].into_iter().chain(v.iter().map(|(k, _)| *k)) {
            if k >= self.dim() {
                return Err(HarrisonError::IndexOutOfRange(k));
            }
        }
        let mut acc = BTreeMap::new();
        for (k, c) in &v {
            add_to(&mut acc, *k, c);
        }
        let v = sparse(acc);
        if v.iter()
            .any(|(k, _)| self.weight[*k] != self.weight[i] + self.weight[j])
        {
            return Err(HarrisonError::Inhomogeneous(i, j));
        }
        if i == j && !v.is_empty() {
            return Err(HarrisonError::NotAntisymmetric(i, j));
        }
        let neg = v.iter().map(|(k, c)| (*k, -c.clone())).collect();
        self.brackets.insert((i, j), v);
        self.brackets.insert((j, i), neg);
        Ok(())
    }

    pub fn bracket(&self, i: usize, j: usize) -> SparseVec {
        self.brackets.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn bracket_vectors(&self, u: &SparseVec, v: &SparseVec) -> SparseVec {
        let mut acc = BTreeMap::new();
        for (i, a) in u {
            for (j, b) in v {
                for (k, c) in self.brackets.get(&(*i, *j)).into_iter().flatten() {
                    add_to(&mut acc, *k, &(a * b * c));
                }
            }
        }
        sparse(acc)
    }

    /// Verifies antisymmetry and the Jacobi identity on basis triples.
    pub fn check(&self) -> Result<()> {
        for ((i, j), v) in &self.brackets {
            let back: SparseVec = self.bracket(*j, *i).into_iter().map(|(k, c)| (k, -c)).collect();
            if *v != back {
                return Err(HarrisonError::NotAntisymmetric(*i, *j));
            }
        }
        let e = |i: usize| vec![(i, q(1))];
        for i in 0..self.dim() {
            for j in (i + 1)..self.dim() {
                for k in (j + 1)..self.dim() {
                    let mut acc = BTreeMap::new();
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for (t, x) in self.bracket_vectors(&e(a), &self.bracket(b, c)) {
                            add_to(&mut acc, t, &x);
                        }
                    }
                    if !acc.is_empty() {
                        return Err(HarrisonError::Jacobi(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Strictly increasing index tuples of length `p` and total weight `w`.
fn wedge_words(l: &GradedLieAlgebra, p: usize, w: u32) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(l: &GradedLieAlgebra, p: usize, start: usize, left: u32, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for i in start..l.dim() {
            if l.weight[i] <= left {
                cur.push(i);
                rec(l, p, i + 1, left - l.weight[i], cur, out);
                cur.pop();
            }
        }
    }
    rec(l, p, 0, w, &mut Vec::new(), &mut out);
    out
}

/// Chevalley–Eilenberg complex of `l` in weight `w`: exterior powers in
/// degrees `p = 1..=w`, `d(x_1∧⋯∧x_p) = Σ_{i<j} (−1)^{i+j} [x_i,x_j]∧⋯`.
pub fn ce_complex(l: &GradedLieAlgebra, w: u32) -> Result<ChainComplex> {
    l.check()?;
    let max_p = w as usize;
    let bases: Vec<Vec<Vec<usize>>> = (1..=max_p).map(|p| wedge_words(l, p, w)).collect();
    let mut complex = ChainComplex::new();
    for (k, basis) in bases.iter().enumerate() {
        let labels = basis
            .iter()
            .map(|t| t.iter().map(|i| l.labels[*i].as_str()).collect::<Vec<_>>().join("^"))
            .collect();
        complex.set_basis(k as i64 + 1, labels, Some(vec![Grading::new(0, w as i64); basis.len()]));
    }
    for p in 2..=max_p {
        let (src, dst) = (&bases[p - 1], &bases[p - 2]);
        if src.is_empty() || dst.is_empty() {
            continue;
        }
        let index: BTreeMap<&Vec<usize>, usize> = dst.iter().enumerate().map(|(k, t)| (t, k)).collect();
        let columns: Vec<SparseVec> = src
            .iter()
            .map(|t| {
                let mut acc = BTreeMap::new();
                for i in 0..p {
                    for j in (i + 1)..p {
                        let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                        let rest: Vec<usize> = (0..p).filter(|k| *k != i && *k != j).map(|k| t[k]).collect();
                        for (k, c) in l.bracket(t[i], t[j]) {
                            let Err(at) = rest.binary_search(&k) else { continue };
                            let mut word = rest.clone();
                            word.insert(at, k);
                            let s = if at % 2 == 0 { sign } else { -sign };
                            add_to(&mut acc, index[&word], &(c * q(s)));
                        }
                    }
                }
                sparse(acc)
            })
            .collect();
        complex.set_differential(p as i64, RationalSparseMatrix::from_columns(dst.len(), &columns)?);
    }
    complex.check_square_zero()?;
    complex.check_gradings()?;
    Ok(complex)
}

/// Lie algebra homology of `l` in weights `1..=max_w`; cells carry `q = 0`.
pub fn hlie_table(l: &GradedLieAlgebra, max_w: u32) -> Result<HcomTable> {
    let mut table = HcomTable::new("lie", Vec::new(), 0);
    for w in 1..=max_w {
        table.absorb(&ce_complex(l, w)?)?;
    }
    Ok(table)
}

// ---------------------------------------------------------------------------
// Diagonal check.

/// A nonzero cell off the diagonal `p = w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OffDiagonalCell {
    pub family: String,
    #[serde(rename = "S")]
    pub set: Vec<Label>,
    pub p: usize,
    pub q: i64,
    pub w: u32,
    pub dim: usize,
}

/// Every nonzero cell with `p ≠ w` and `w ≤ max_w`. Empty exactly when the
/// tables are Koszul in weight `≤ max_w` on their windows.
pub fn koszul_report(tables: &[HcomTable], max_w: u32) -> Vec<OffDiagonalCell> {
    tables
        .iter()
        .flat_map(|t| {
            t.cells
                .iter()
                .filter(|c| c.w <= max_w && c.p != c.w as usize && c.dim > 0)
                .map(move |c| OffDiagonalCell {
                    family: t.family.clone(),
                    set: t.set.clone(),
                    p: c.p,
                    q: c.q,
                    w: c.w,
                    dim: c.dim,
                })
        })
        .collect()
}

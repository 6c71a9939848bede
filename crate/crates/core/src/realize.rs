//! Realization `K^∨ ⊗^{d(s)Br} F` of the species at finite genus `g`.
//!
//! `H(g) = ℚ^{2g}` has basis `e_1…e_g, f_1…f_g` and the ε-symmetric form `λ`
//! with `λ(e_i, f_j) = δ_ij`: skew for odd `n` (group `Sp`), symmetric for
//! even `n` (group `O`). The coend is computed as coinvariants of decorated
//! species elements (a partition of `0..k` whose legs carry basis vectors of
//! `H`, modulo relabeling) divided by the relations
//! `(ω inserted at legs x, y) ⊗ P ~ F(contract x, y)(P)`.
//! Relations preserve torus weight, so every space splits into torus-weight
//! blocks; only dominant blocks are computed and characters are rebuilt from
//! them.

use std::collections::HashMap;
use std::fmt;

use exactla::{nullspace_basis, q, rank, rank_of_rows, RationalSparseMatrix, SparseVec, Q};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::brauer::{perfect_matchings, BrauerMorphism, FiniteSetObject, Label};
use crate::perm::permutation_sign;
use crate::repchar::{
    decompose, trivial_multiplicity, CharacterVector, GroupType, PartitionLabel, RepcharError, Weight,
};
use crate::species::{act_partition, basis, Part, Partition, Species, SpeciesError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealizeError {
    #[error("genus must be at least 1")]
    ZeroGenus,
    #[error("|S| + |T| = {0} is odd, no matchings exist")]
    OddArity(usize),
    #[error("{what} = {value} exceeds the resource guard {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error(transparent)]
    Species(#[from] SpeciesError),
    #[error(transparent)]
    Repchar(#[from] RepcharError),
    #[error(transparent)]
    Linear(#[from] exactla::ExactlaError),
}

pub type Result<T> = std::result::Result<T, RealizeError>;

/// Decorated generators per torus-weight block.
pub const GENERATOR_LIMIT: usize = 400_000;

/// `|S|` bound for the character-based surjectivity check in [`matching_rank`].
pub const SURJECTIVITY_LIMIT: usize = 4;

/// The hyperbolic space `H(g)` with its form `λ` and dual element `ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperbolicSpace {
    g: usize,
    ty: GroupType,
    form: Vec<Vec<i64>>,
    dual: Vec<Vec<i64>>,
}

impl HyperbolicSpace {
    pub fn new(g: usize, ty: GroupType) -> Result<Self> {
        if g == 0 {
            return Err(RealizeError::ZeroGenus);
        }
        let n = 2 * g;
        let mut form = vec![vec![0; n]; n];
        for i in 0..g {
            form[i][g + i] = 1;
            form[g + i][i] = match ty {
                GroupType::Sp => -1,
                GroupType::O => 1,
            };
        }
        // `(λ ⊗ id)(x ⊗ ω) = x` says the coefficient matrix of `ω` is the
        // inverse of the Gram matrix of `λ`; a signed permutation matrix is
        // inverted by its transpose.
        let dual = (0..n).map(|i| (0..n).map(|j| form[j][i]).collect()).collect();
        Ok(Self { g, ty, form, dual })
    }

    /// `Sp` for odd `n`, `O` for even `n`.
    pub fn for_species(g: usize, sp: &Species) -> Result<Self> {
        Self::new(g, group_for(sp))
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn group(&self) -> GroupType {
        self.ty
    }

    pub fn dim(&self) -> usize {
        2 * self.g
    }

    /// `λ(h_i, h_j)`.
    pub fn form(&self, i: usize, j: usize) -> i64 {
        self.form[i][j]
    }

    /// Coefficient of `h_i ⊗ h_j` in `ω`.
    pub fn dual(&self, i: usize, j: usize) -> i64 {
        self.dual[i][j]
    }

    /// Nonzero terms `(i, j, c)` of `ω = Σ c h_i ⊗ h_j`.
    pub fn omega_terms(&self) -> Vec<(usize, usize, i64)> {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| self.dual[*i][*j] != 0)
            .map(|(i, j)| (i, j, self.dual[i][j]))
            .collect()
    }

    /// Contracts `λ` against `ω` in the first slot and checks that the
    /// result is the identity.
    pub fn check_dual(&self) -> bool {
        let n = self.dim();
        (0..n).all(|x| {
            (0..n).all(|j| {
                let v: i64 = (0..n).map(|i| self.form[x][i] * self.dual[i][j]).sum();
                v == i64::from(x == j)
            })
        })
    }

    /// Torus weight of a basis vector: `+ε_i` for `e_i`, `−ε_i` for `f_i`.
    pub fn torus_weight(&self, i: usize) -> Weight {
        let mut w = vec![0; self.g];
        if i < self.g {
            w[i] = 1;
        } else {
            w[i - self.g] = -1;
        }
        w
    }

    pub fn label(&self, i: usize) -> String {
        if i < self.g {
            format!("e{}", i + 1)
        } else {
            format!("f{}", i - self.g + 1)
        }
    }

    fn step(&self, i: usize) -> (usize, i64) {
        if i < self.g {
            (i, 1)
        } else {
            (i - self.g, -1)
        }
    }

    /// All words of length `k` in the basis whose torus weight is `mu`.
    pub fn words(&self, k: usize, mu: &[i64]) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(k);
        let mut rest: Vec<i64> = mu.to_vec();
        self.words_rec(k, &mut rest, &mut cur, &mut out);
        out
    }

    fn words_rec(&self, k: usize, rest: &mut [i64], cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        let need: i64 = rest.iter().map(|x| x.abs()).sum();
        let left = (k - cur.len()) as i64;
        if need > left || (left - need) % 2 != 0 {
            return;
        }
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in 0..self.dim() {
            let (c, s) = self.step(i);
            rest[c] -= s;
            cur.push(i as u8);
            self.words_rec(k, rest, cur, out);
            cur.pop();
            rest[c] += s;
        }
    }
}

pub fn group_for(sp: &Species) -> GroupType {
    if sp.signed() {
        GroupType::Sp
    } else {
        GroupType::O
    }
}

/// A decorated species element in normal form: a partition of `0..k` and
/// the basis vector sitting on each leg.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Decorated {
    pub idx: Vec<u8>,
    pub parts: Partition,
}

impl Decorated {
    /// Normal form of `h_idx ⊗ P` in the coinvariants, with its sign, or
    /// `None` when an odd automorphism kills the class.
    ///
    /// Parts are ordered by `(genus, decoration)`, legs inside a part by
    /// their vector. Remaining ties are automorphisms of the decorated
    /// element: equal vectors inside one part, and identical parts.
    pub fn normalize(odd: bool, idx: &[u8], p: &Partition) -> Option<(Decorated, i32)> {
        let mut keyed: Vec<(u32, Vec<u8>, Vec<Label>)> = Vec::with_capacity(p.parts().len());
        for part in p.parts() {
            let mut legs = part.elems.clone();
            legs.sort_by_key(|l| idx[*l as usize]);
            let decor: Vec<u8> = legs.iter().map(|l| idx[*l as usize]).collect();
            if odd && decor.windows(2).any(|w| w[0] == w[1]) {
                return None;
            }
            keyed.push((part.g, decor, legs));
        }
        keyed.sort_by(|a, b| (a.0, a.1.len(), &a.1).cmp(&(b.0, b.1.len(), &b.1)));
        if odd
            && keyed
                .windows(2)
                .any(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1 && w[0].1.len() % 2 == 1)
        {
            return None;
        }
        let order: Vec<usize> = keyed.iter().flat_map(|k| k.2.iter().map(|l| *l as usize)).collect();
        let mut sigma = vec![0u32; idx.len()];
        for (pos, l) in order.iter().enumerate() {
            sigma[*l] = pos as u32;
        }
        let new_idx: Vec<u8> = order.iter().map(|l| idx[*l]).collect();
        let parts = p.relabel(|l| sigma[l as usize]);
        let sign = if odd { permutation_sign(&order) } else { 1 };
        Some((Decorated { idx: new_idx, parts }, sign))
    }

    pub fn display(&self, space: &HyperbolicSpace) -> String {
        let mut out = String::new();
        for part in self.parts.parts() {
            out.push('(');
            let names: Vec<String> = part
                .elems
                .iter()
                .map(|l| space.label(self.idx[*l as usize] as usize))
                .collect();
            out.push_str(&names.join(" "));
            out.push_str(&format!(";{})", part.g));
        }
        if out.is_empty() {
            out.push('1');
        }
        out
    }
}

/// The leg set `{0, …, k−1}`.
fn legs(k: usize) -> FiniteSetObject {
    FiniteSetObject::new(0..k as Label).expect("distinct labels")
}

/// Dominant weights `μ₁ ≥ … ≥ μ_g ≥ 0` with `Σμ ≤ max`.
fn dominant_weights(g: usize, max: usize) -> Vec<Weight> {
    fn rec(g: usize, left: i64, cap: i64, cur: &mut Weight, out: &mut Vec<Weight>) {
        if cur.len() == g {
            out.push(cur.clone());
            return;
        }
        for x in 0..=cap.min(left) {
            cur.push(x);
            rec(g, left - x, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(g, max as i64, max as i64, &mut Vec::new(), &mut out);
    out
}

/// Columns and relation rows of one torus-weight block of the coend.
struct Block {
    index: HashMap<Decorated, usize>,
    cols: Vec<Decorated>,
    rows: Vec<SparseVec>,
}

impl Block {
    fn col(&mut self, d: Decorated) -> usize {
        if let Some(c) = self.index.get(&d) {
            return *c;
        }
        let c = self.cols.len();
        self.index.insert(d.clone(), c);
        self.cols.push(d);
        c
    }

    fn vector(&mut self, odd: bool, terms: impl IntoIterator<Item = (Vec<u8>, Partition, i64)>) -> SparseVec {
        let mut acc: HashMap<usize, i64> = HashMap::new();
        for (idx, p, c) in terms {
            if let Some((d, s)) = Decorated::normalize(odd, &idx, &p) {
                let col = self.col(d);
                *acc.entry(col).or_insert(0) += c * i64::from(s);
            }
        }
        let mut v: SparseVec = acc
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(i, c)| (i, q(c)))
            .collect();
        v.sort_by_key(|(i, _)| *i);
        v
    }

    fn build(sp: &Species, space: &HyperbolicSpace, w: u32, mu: &[i64]) -> Result<Self> {
        let odd = sp.signed();
        let mut block = Block {
            index: HashMap::new(),
            cols: Vec::new(),
            rows: Vec::new(),
        };
        let kmax = 3 * w as usize;
        for k in 0..=kmax {
            let set = legs(k);
            let ps = basis(sp, &set, w);
            if ps.is_empty() {
                continue;
            }
            let words = space.words(k, mu);
            for word in &words {
                for p in &ps {
                    if let Some((d, _)) = Decorated::normalize(odd, word, p) {
                        block.col(d);
                    }
                }
                if block.cols.len() > GENERATOR_LIMIT {
                    return Err(RealizeError::TooLarge {
                        what: "decorated generators",
                        value: block.cols.len(),
                        limit: GENERATOR_LIMIT,
                    });
                }
            }
            if k < 2 {
                continue;
            }
            let target = legs(k - 2);
            let inj: Vec<(Label, Label)> = (0..(k - 2) as Label).map(|t| (t, t)).collect();
            let pair = ((k - 2) as Label, (k - 1) as Label);
            let m = BrauerMorphism::new(set.clone(), target, &inj, &[pair], odd)
                .expect("contraction of the last two legs is a valid morphism");
            let omega = space.omega_terms();
            let etas = space.words(k - 2, mu);
            for p in &ps {
                let image = act_partition(sp, &m, p);
                for eta in &etas {
                    let mut terms: Vec<(Vec<u8>, Partition, i64)> = omega
                        .iter()
                        .map(|(i, j, c)| {
                            let mut idx = eta.clone();
                            idx.push(*i as u8);
                            idx.push(*j as u8);
                            (idx, p.clone(), *c)
                        })
                        .collect();
                    if let Some((img, s)) = &image {
                        terms.push((eta.clone(), img.clone(), -i64::from(*s)));
                    }
                    let row = block.vector(odd, terms);
                    if !row.is_empty() {
                        block.rows.push(row);
                    }
                }
            }
        }
        Ok(block)
    }
}

/// One dominant torus-weight block of a realization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RealizationBlock {
    pub weight: Weight,
    pub generators: usize,
    pub relations: usize,
    pub rank: usize,
    pub dim: usize,
}

/// The weight-`w` piece of the realization of a species at genus `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub species: Species,
    pub g: usize,
    pub ty: GroupType,
    pub w: u32,
    pub blocks: Vec<RealizationBlock>,
}

impl Realization {
    pub fn dim(&self) -> i64 {
        self.blocks
            .iter()
            .map(|b| b.dim as i64 * crate::repchar::orbit_size(&b.weight))
            .sum()
    }

    pub fn character(&self) -> Result<CharacterVector> {
        Ok(CharacterVector::from_dominant(
            self.g,
            self.blocks.iter().map(|b| (b.weight.clone(), b.dim as i64)),
        )?)
    }

    pub fn decomposition(&self) -> Result<Vec<(PartitionLabel, i64)>> {
        Ok(decompose(&self.character()?, self.ty)?)
    }
}

/// Realization of `sp` in weight `w` at genus `g`.
pub fn realize(sp: &Species, g: usize, w: u32) -> Result<Realization> {
    let space = HyperbolicSpace::for_species(g, sp)?;
    let weights = dominant_weights(g, 3 * w as usize);
    let blocks = weights
        .par_iter()
        .map(|mu| {
            let b = Block::build(sp, &space, w, mu)?;
            let r = rank_of_rows(&b.rows, b.cols.len());
            Ok(RealizationBlock {
                weight: mu.clone(),
                generators: b.cols.len(),
                relations: b.rows.len(),
                rank: r,
                dim: b.cols.len() - r,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Realization {
        species: *sp,
        g,
        ty: space.group(),
        w,
        blocks: blocks.into_iter().filter(|b| b.generators > 0).collect(),
    })
}

/// Coset representatives of one dominant block, as printable monomials.
pub fn block_representatives(sp: &Species, g: usize, w: u32, mu: &[i64]) -> Result<Vec<String>> {
    let space = HyperbolicSpace::for_species(g, sp)?;
    let b = Block::build(sp, &space, w, mu)?;
    let ech = exactla::Echelon::from_vectors(b.rows.iter());
    Ok((0..b.cols.len())
        .filter(|c| !ech.is_pivot(*c))
        .map(|c| b.cols[c].display(&space))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimEntry {
    pub deg: u32,
    pub w: u32,
    pub dim: i64,
}

/// Realization report `{g, type, window, dims: [{deg, w, dim}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RealizationReport {
    pub g: usize,
    #[serde(rename = "type")]
    pub ty: String,
    pub window: u32,
    pub dims: Vec<DimEntry>,
}

pub fn realize_dims(sp: &Species, g: usize, max_w: u32) -> Result<(RealizationReport, Vec<Realization>)> {
    let reals = (0..=max_w).map(|w| realize(sp, g, w)).collect::<Result<Vec<_>>>()?;
    let report = RealizationReport {
        g,
        ty: group_for(sp).to_string(),
        window: max_w,
        dims: reals
            .iter()
            .map(|r| DimEntry {
                deg: sp.n * r.w,
                w: r.w,
                dim: r.dim(),
            })
            .collect(),
    };
    Ok((report, reals))
}

/// Outcome of comparing `Θ = Σ κ₁(a_i a_j a_k)·κ₁(a_i^# a_j^# a_k^#)` with
/// `κ_{e²}` inside the weight-2, torus-weight-0 block of the realization of
/// `E₁`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaCheck {
    pub g: usize,
    pub theta_zero: bool,
    pub kappa_zero: bool,
    pub theta_is_minus_kappa: bool,
    pub theta_is_plus_kappa: bool,
}

pub fn theta_check(g: usize) -> Result<ThetaCheck> {
    let sp = Species::e(1);
    let space = HyperbolicSpace::for_species(g, &sp)?;
    let mut b = Block::build(&sp, &space, 2, &vec![0; g])?;
    let omega = space.omega_terms();
    let p = Partition::new(vec![Part::new(vec![0, 1, 2], 0), Part::new(vec![3, 4, 5], 0)]);
    let mut terms = Vec::new();
    for (a, a2, c1) in &omega {
        for (b2, b3, c2) in &omega {
            for (c, c3, c4) in &omega {
                let idx = vec![*a as u8, *b2 as u8, *c as u8, *a2 as u8, *b3 as u8, *c3 as u8];
                terms.push((idx, p.clone(), c1 * c2 * c4));
            }
        }
    }
    let theta = b.vector(true, terms);
    let kappa = b.vector(true, [(Vec::new(), Partition::new(vec![Part::new(vec![], 2)]), 1)]);
    let ncols = b.cols.len();
    let base = rank_of_rows(&b.rows, ncols);
    let in_span = |v: &SparseVec| {
        let mut rows = b.rows.clone();
        rows.push(v.clone());
        rank_of_rows(&rows, ncols) == base
    };
    let combine = |s: i64| -> SparseVec {
        let mut acc: HashMap<usize, Q> = HashMap::new();
        for (i, c) in theta.iter() {
            *acc.entry(*i).or_insert_with(|| q(0)) += c;
        }
        for (i, c) in kappa.iter() {
            *acc.entry(*i).or_insert_with(|| q(0)) += c * q(s);
        }
        let mut v: SparseVec = acc.into_iter().filter(|(_, c)| *c != q(0)).collect();
        v.sort_by_key(|(i, _)| *i);
        v
    };
    Ok(ThetaCheck {
        g,
        theta_zero: in_span(&theta),
        kappa_zero: in_span(&kappa),
        theta_is_minus_kappa: in_span(&combine(1)),
        theta_is_plus_kappa: in_span(&combine(-1)),
    })
}

/// Rank of `dsBr(T, S) → [H_{[S]} ⊗ K(T)^∨]^G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchingRank {
    pub s: usize,
    pub t: usize,
    pub g: usize,
    /// Number of basis morphisms `T → S`.
    pub domain: usize,
    pub rank: usize,
    pub injective: bool,
    /// Dimension of the invariant space from characters, when computed.
    pub target: Option<usize>,
    pub surjective: Option<bool>,
}

/// `φ_m(ω_{m'})`: the functional applying `λ` to the ordered pairs of `m`,
/// evaluated on `ω` placed along the ordered pairs of `m'`. Each cycle of
/// `m ∪ m'` contributes the trace of a product of the matrices of `λ`, `ω`
/// and their transposes.
pub fn contract_matchings(space: &HyperbolicSpace, m: &[(Label, Label)], m2: &[(Label, Label)]) -> i64 {
    let size = 2 * m.len();
    let mut first: HashMap<Label, (Label, bool)> = HashMap::with_capacity(size);
    for (a, b) in m {
        first.insert(*a, (*b, true));
        first.insert(*b, (*a, false));
    }
    let mut second: HashMap<Label, (Label, bool)> = HashMap::with_capacity(size);
    for (a, b) in m2 {
        second.insert(*a, (*b, true));
        second.insert(*b, (*a, false));
    }
    let n = space.dim();
    let matrix = |forward: bool, lam: bool| -> Vec<Vec<i64>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let (r, c) = if forward { (i, j) } else { (j, i) };
                        if lam {
                            space.form(r, c)
                        } else {
                            space.dual(r, c)
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let mul = |a: &[Vec<i64>], b: &[Vec<i64>]| -> Vec<Vec<i64>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
            .collect()
    };
    let mut seen: std::collections::HashSet<Label> = std::collections::HashSet::new();
    let mut value = 1i64;
    let mut starts: Vec<Label> = first.keys().copied().collect();
    starts.sort_unstable();
    for start in starts {
        if seen.contains(&start) {
            continue;
        }
        let mut acc: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        let mut cur = start;
        loop {
            seen.insert(cur);
            let (v, fwd) = first[&cur];
            acc = mul(&acc, &matrix(fwd, true));
            seen.insert(v);
            let (u, fwd2) = second[&v];
            acc = mul(&acc, &matrix(fwd2, false));
            cur = u;
            if cur == start {
                break;
            }
        }
        value *= (0..n).map(|i| acc[i][i]).sum::<i64>();
        if value == 0 {
            return 0;
        }
    }
    value
}

fn gram_rank(space: &HyperbolicSpace, rows: &[&Vec<(Label, Label)>], all: &[Vec<(Label, Label)>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let dense: Vec<Vec<i64>> = rows
        .iter()
        .map(|m| all.iter().map(|m2| contract_matchings(space, m, m2)).collect())
        .collect();
    rank(&RationalSparseMatrix::from_dense(&dense))
}

/// Rank of the matching map for `|S| = s`, `|T| = t`.
///
/// Invariants of `H^{⊗S} ⊗ K(T)^∨` are spanned by matchings of `S ⊔ T`;
/// those with a pair inside `S` span the kernel of the projection to
/// `H_{[S]}`, and the remaining ones are the images of basis morphisms
/// `T → S`. Span dimensions are Gram ranks against all matching tensors.
pub fn matching_rank(s: usize, t: usize, g: usize, ty: GroupType) -> Result<MatchingRank> {
    if (s + t) % 2 == 1 {
        return Err(RealizeError::OddArity(s + t));
    }
    let space = HyperbolicSpace::new(g, ty)?;
    let labels: Vec<Label> = (0..(s + t) as Label).collect();
    let all = perfect_matchings(&labels);
    let inside_s = |m: &Vec<(Label, Label)>| m.iter().any(|(a, b)| (*a as usize) < s && (*b as usize) < s);
    let internal: Vec<&Vec<(Label, Label)>> = all.iter().filter(|m| inside_s(m)).collect();
    let domain = all.len() - internal.len();
    let every: Vec<&Vec<(Label, Label)>> = all.iter().collect();
    let r = gram_rank(&space, &every, &all) - gram_rank(&space, &internal, &all);
    let target = if ty == GroupType::Sp && s <= SURJECTIVITY_LIMIT {
        let coinv = coinvariant_tensor_character(&space, s)?;
        let mut ch = coinv;
        for _ in 0..t {
            ch = ch.tensor(&CharacterVector::standard(g))?;
        }
        Some(trivial_multiplicity(&ch, ty)? as usize)
    } else {
        None
    };
    Ok(MatchingRank {
        s,
        t,
        g,
        domain,
        rank: r,
        injective: r == domain,
        target,
        surjective: target.map(|d| d == r),
    })
}

fn insertion_rows(space: &HyperbolicSpace, qd: usize, mu: &[i64], index: &HashMap<Vec<u8>, usize>) -> Vec<SparseVec> {
    if qd < 2 {
        return Vec::new();
    }
    let omega = space.omega_terms();
    let mut rows = Vec::new();
    for eta in space.words(qd - 2, mu) {
        for a in 0..qd {
            for b in a + 1..qd {
                let mut v: SparseVec = omega
                    .iter()
                    .map(|(i, j, c)| {
                        let mut word = Vec::with_capacity(qd);
                        let mut rest = eta.iter();
                        for pos in 0..qd {
                            if pos == a {
                                word.push(*i as u8);
                            } else if pos == b {
                                word.push(*j as u8);
                            } else {
                                word.push(*rest.next().expect("η fills the other slots"));
                            }
                        }
                        (index[&word], q(*c))
                    })
                    .collect();
                v.sort_by_key(|(i, _)| *i);
                rows.push(v);
            }
        }
    }
    rows
}

/// Character of `H_{[q]} = H^{⊗q} / (ω-insertions)`.
pub fn coinvariant_tensor_character(space: &HyperbolicSpace, qd: usize) -> Result<CharacterVector> {
    let mut out = Vec::new();
    for mu in dominant_weights(space.genus(), qd) {
        let words = space.words(qd, &mu);
        if words.is_empty() {
            continue;
        }
        let index: HashMap<Vec<u8>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let rows = insertion_rows(space, qd, &mu, &index);
        let r = rank_of_rows(&rows, words.len());
        out.push((mu, (words.len() - r) as i64));
    }
    Ok(CharacterVector::from_dominant(space.genus(), out)?)
}

/// Dimensions of `H^{⊗q}`, of the `ω`-insertion image, of the traceless
/// tensors `H^{[q]}` and of their sum, in one dominant torus-weight block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TensorSplitBlock {
    pub weight: Weight,
    pub total: usize,
    pub insertions: usize,
    pub traceless: usize,
    pub sum: usize,
}

pub fn tensor_split(space: &HyperbolicSpace, qd: usize) -> Result<Vec<TensorSplitBlock>> {
    let mut out = Vec::new();
    for mu in dominant_weights(space.genus(), qd) {
        let words = space.words(qd, &mu);
        if words.is_empty() {
            continue;
        }
        let index: HashMap<Vec<u8>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let ins = insertion_rows(space, qd, &mu, &index);
        let ins_rank = rank_of_rows(&ins, words.len());
        // Contractions `λ` on each pair of slots, stacked.
        let mut triplets = Vec::new();
        let mut out_index: HashMap<(usize, usize, Vec<u8>), usize> = HashMap::new();
        for (col, word) in words.iter().enumerate() {
            for a in 0..qd {
                for b in a + 1..qd {
                    let c = space.form(word[a] as usize, word[b] as usize);
                    if c == 0 {
                        continue;
                    }
                    let rest: Vec<u8> = (0..qd).filter(|p| *p != a && *p != b).map(|p| word[p]).collect();
                    let n = out_index.len();
                    let row = *out_index.entry((a, b, rest)).or_insert(n);
                    triplets.push((row, col, c));
                }
            }
        }
        let cm = RationalSparseMatrix::from_int_triplets(out_index.len(), words.len(), triplets)?;
        let kernel = nullspace_basis(&cm);
        let mut both = ins;
        both.extend(kernel.iter().cloned());
        out.push(TensorSplitBlock {
            weight: mu,
            total: words.len(),
            insertions: ins_rank,
            traceless: kernel.len(),
            sum: rank_of_rows(&both, words.len()),
        });
    }
    Ok(out)
}

/// `dim [H_{[S]} ⊗ X]^G` for `|S| = s`, from characters.
pub fn trivial_and_isotypic_multiplicity(s: usize, x: &CharacterVector, space: &HyperbolicSpace) -> Result<i64> {
    let ch = coinvariant_tensor_character(space, s)?.tensor(x)?;
    Ok(trivial_multiplicity(&ch, space.group())?)
}

impl fmt::Display for RealizationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "g = {}, {}, weights ≤ {}", self.g, self.ty, self.window)?;
        for d in &self.dims {
            writeln!(f, "  w = {}  deg = {}  dim = {}", d.w, d.deg, d.dim)?;
        }
        Ok(())
    }
}

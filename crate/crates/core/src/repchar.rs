//! Characters of `Sp(2g)` and `O(g,g)` as weight-multiplicity functions.
//!
//! Weights are integer vectors in the `ε`-basis of the maximal torus. Both
//! groups' characters are invariant under all signed permutations (for
//! `O(g,g)` the reflection `ε_g ↦ −ε_g` is realized inside the group), so a
//! character is stored on dominant representatives `μ₁ ≥ ⋯ ≥ μ_g ≥ 0`.
//! Irreducible characters come from Freudenthal's recursion in exact integer
//! arithmetic; plethysms from Adams operations and Newton's identities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use exactla::Q;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepcharError {
    #[error("partition {0} has more than g = {1} parts")]
    TooLong(String, usize),
    #[error("partition parts must be weakly decreasing: {0:?}")]
    NotAPartition(Vec<u32>),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("weight {0:?} has length {1}, expected {2}")]
    WeightLength(Vec<i64>, usize, usize),
    #[error("multiplicities are not constant on the orbit of {0:?}")]
    NotInvariant(Vec<i64>),
    #[error("negative multiplicity {mult} at highest weight {lambda}; the input is virtual")]
    NegativeMultiplicity { lambda: String, mult: i64 },
    #[error("inexact division in the {0} recursion")]
    Inexact(&'static str),
    #[error("parse error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },
}

pub type Result<T> = std::result::Result<T, RepcharError>;

/// `Sp(2g)` on the symplectic hyperbolic space, `O(g,g)` on the symmetric one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupType {
    Sp,
    O,
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupType::Sp => "Sp",
            GroupType::O => "O",
        })
    }
}

/// A partition `λ₁ ≥ ⋯ ≥ λ_k ≥ 1`; trailing zeros are dropped on input.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartitionLabel(Vec<u32>);

impl PartitionLabel {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.contains(&0) {
            return Err(RepcharError::NotAPartition(parts));
        }
        Ok(Self(parts))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// The weight `(λ₁, …, λ_k, 0, …, 0)` of length `g`.
    pub fn weight(&self, g: usize) -> Result<Vec<i64>> {
        if self.len() > g {
            return Err(RepcharError::TooLong(self.to_string(), g));
        }
        let mut w: Vec<i64> = self.0.iter().map(|x| *x as i64).collect();
        w.resize(g, 0);
        Ok(w)
    }
}

impl fmt::Display for PartitionLabel {
    /// Exponent notation: `0`, `1^3`, `2,1^2`, `2^2,1^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let mut j = i;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            if !first {
                f.write_str(",")?;
            }
            first = false;
            if j - i == 1 {
                write!(f, "{}", self.0[i])?;
            } else {
                write!(f, "{}^{}", self.0[i], j - i)?;
            }
            i = j;
        }
        Ok(())
    }
}

pub type Weight = Vec<i64>;

/// Sorted absolute values: the representative of a signed-permutation orbit.
pub fn dominant_rep(w: &[i64]) -> Weight {
    let mut v: Weight = w.iter().map(|x| x.abs()).collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

fn distinct_permutations(v: &[i64]) -> Vec<Weight> {
    let mut cur = v.to_vec();
    cur.sort_unstable();
    let mut out = Vec::new();
    loop {
        out.push(cur.clone());
        let n = cur.len();
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// Every signed permutation of a dominant weight, each once.
pub fn orbit(mu: &[i64]) -> Vec<Weight> {
    let mut out = Vec::new();
    for p in distinct_permutations(mu) {
        let nonzero: Vec<usize> = (0..p.len()).filter(|i| p[*i] != 0).collect();
        for mask in 0u64..(1 << nonzero.len()) {
            let mut w = p.clone();
            for (bit, i) in nonzero.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    w[*i] = -w[*i];
                }
            }
            out.push(w);
        }
    }
    out
}

pub fn orbit_size(mu: &[i64]) -> i64 {
    let g = mu.len();
    let mut counts: BTreeMap<i64, i64> = BTreeMap::new();
    for x in mu {
        *counts.entry(x.abs()).or_default() += 1;
    }
    let fact = |n: i64| (1..=n).product::<i64>();
    let nonzero = mu.iter().filter(|x| **x != 0).count() as u32;
    fact(g as i64) / counts.values().map(|c| fact(*c)).product::<i64>() * 2i64.pow(nonzero)
}

/// A finitely supported Weyl-invariant multiplicity function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterVector {
    g: usize,
    mults: BTreeMap<Weight, i64>,
}

impl CharacterVector {
    pub fn zero(g: usize) -> Self {
        Self {
            g,
            mults: BTreeMap::new(),
        }
    }

    pub fn trivial(g: usize) -> Self {
        let mut c = Self::zero(g);
        c.mults.insert(vec![0; g], 1);
        c
    }

    /// The defining representation `H(g)`, weights `±ε_i`.
    pub fn standard(g: usize) -> Self {
        let mut c = Self::zero(g);
        let mut e = vec![0; g];
        if g > 0 {
            e[0] = 1;
        }
        c.mults.insert(e, 1);
        c
    }

    /// Builds a character from the full weight multiset, checking that it is
    /// invariant under signed permutations.
    pub fn from_weights(g: usize, weights: impl IntoIterator<Item = (Weight, i64)>) -> Result<Self> {
        let mut full: BTreeMap<Weight, i64> = BTreeMap::new();
        for (w, m) in weights {
            if w.len() != g {
                return Err(RepcharError::WeightLength(w.clone(), w.len(), g));
            }
            *full.entry(w).or_default() += m;
        }
        full.retain(|_, m| *m != 0);
        let mut reps: BTreeMap<Weight, (i64, i64)> = BTreeMap::new();
        for (w, m) in &full {
            let rep = dominant_rep(w);
            let e = reps.entry(rep.clone()).or_insert((*m, 0));
            if e.0 != *m {
                return Err(RepcharError::NotInvariant(rep));
            }
            e.1 += 1;
        }
        let mut c = Self::zero(g);
        for (rep, (m, seen)) in reps {
            if seen != orbit_size(&rep) {
                return Err(RepcharError::NotInvariant(rep));
            }
            c.mults.insert(rep, m);
        }
        Ok(c)
    }

    /// Builds a character from multiplicities on dominant weights only.
    pub fn from_dominant(g: usize, weights: impl IntoIterator<Item = (Weight, i64)>) -> Result<Self> {
        let mut c = Self::zero(g);
        for (w, m) in weights {
            if w.len() != g {
                return Err(RepcharError::WeightLength(w.clone(), w.len(), g));
            }
            if dominant_rep(&w) != w {
                return Err(RepcharError::NotInvariant(w));
            }
            c.add_at(w, m);
        }
        Ok(c)
    }

    pub fn rank(&self) -> usize {
        self.g
    }

    /// Multiplicity of an arbitrary weight.
    pub fn get(&self, w: &[i64]) -> i64 {
        self.mults.get(&dominant_rep(w)).copied().unwrap_or(0)
    }

    /// Nonzero multiplicities on dominant weights.
    pub fn dominant(&self) -> impl Iterator<Item = (&Weight, i64)> + '_ {
        self.mults.iter().map(|(w, m)| (w, *m))
    }

    /// Every weight with its multiplicity.
    pub fn full_weights(&self) -> Vec<(Weight, i64)> {
        self.mults
            .iter()
            .flat_map(|(w, m)| orbit(w).into_iter().map(move |v| (v, *m)))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.mults.is_empty()
    }

    pub fn dim(&self) -> i64 {
        self.mults.iter().map(|(w, m)| m * orbit_size(w)).sum()
    }

    fn check_rank(&self, other: &Self) -> Result<()> {
        if self.g == other.g {
            Ok(())
        } else {
            Err(RepcharError::RankMismatch(self.g, other.g))
        }
    }

    fn add_at(&mut self, w: Weight, m: i64) {
        let e = self.mults.entry(w.clone()).or_insert(0);
        *e += m;
        if *e == 0 {
            self.mults.remove(&w);
        }
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let mut c = self.clone();
        for (w, m) in &other.mults {
            c.add_at(w.clone(), *m);
        }
        Ok(c)
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.plus(&other.scaled(-1))
    }

    pub fn scaled(&self, k: i64) -> Self {
        let mut c = Self::zero(self.g);
        if k != 0 {
            c.mults = self.mults.iter().map(|(w, m)| (w.clone(), m * k)).collect();
        }
        c
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let a = self.full_weights();
        let b = other.full_weights();
        let mut acc: BTreeMap<Weight, i64> = BTreeMap::new();
        for (u, m) in &a {
            for (v, n) in &b {
                let s: Weight = u.iter().zip(v).map(|(x, y)| x + y).collect();
                if is_dominant(&s) {
                    *acc.entry(s).or_default() += m * n;
                }
            }
        }
        acc.retain(|_, m| *m != 0);
        Ok(Self { g: self.g, mults: acc })
    }

    /// The Adams operation `ψ^j`: every weight multiplied by `j ≥ 1`.
    pub fn adams(&self, j: i64) -> Self {
        Self {
            g: self.g,
            mults: self
                .mults
                .iter()
                .map(|(w, m)| (w.iter().map(|x| x * j).collect(), *m))
                .collect(),
        }
    }

    /// `Λ^k` by Newton's identity `k·Λ^k = Σ_j (−1)^{j−1} ψ^j · Λ^{k−j}`.
    pub fn exterior_power(&self, k: u32) -> Result<Self> {
        self.newton(k, true)
    }

    /// `Sym^k` by `k·S^k = Σ_j ψ^j · S^{k−j}`.
    pub fn symmetric_power(&self, k: u32) -> Result<Self> {
        self.newton(k, false)
    }

    fn newton(&self, k: u32, alternating: bool) -> Result<Self> {
        let mut powers = vec![Self::trivial(self.g)];
        for m in 1..=k {
            let mut acc = Self::zero(self.g);
            for j in 1..=m {
                let term = self.adams(j as i64).tensor(&powers[(m - j) as usize])?;
                let sign = if alternating && j % 2 == 0 { -1 } else { 1 };
                acc = acc.plus(&term.scaled(sign))?;
            }
            if acc.mults.values().any(|x| x % m as i64 != 0) {
                return Err(RepcharError::Inexact("Newton"));
            }
            acc.mults.values_mut().for_each(|x| *x /= m as i64);
            powers.push(acc);
        }
        Ok(powers.pop().expect("k + 1 entries"))
    }
}

fn is_dominant(w: &[i64]) -> bool {
    w.windows(2).all(|p| p[0] >= p[1]) && w.last().map_or(true, |x| *x >= 0)
}

// ---------------------------------------------------------------------------
// Freudenthal's recursion for types C_g and D_g.

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    C,
    D,
}

fn positive_roots(kind: Kind, g: usize) -> Vec<Weight> {
    let mut roots = Vec::new();
    for i in 0..g {
        for j in (i + 1)..g {
            let mut a = vec![0; g];
            a[i] = 1;
            a[j] = -1;
            roots.push(a.clone());
            a[j] = 1;
            roots.push(a);
        }
        if kind == Kind::C {
            let mut a = vec![0; g];
            a[i] = 2;
            roots.push(a);
        }
    }
    roots
}

fn rho(kind: Kind, g: usize) -> Weight {
    (0..g)
        .map(|i| match kind {
            Kind::C => (g - i) as i64,
            Kind::D => (g - 1 - i) as i64,
        })
        .collect()
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Representative of the Weyl orbit: sorted absolute values, and for `D` the
/// last entry carries the product of signs unless some entry is zero.
fn kind_rep(kind: Kind, w: &[i64]) -> Weight {
    let mut v = dominant_rep(w);
    if kind == Kind::D && !w.contains(&0) {
        let negatives = w.iter().filter(|x| **x < 0).count();
        if negatives % 2 == 1 {
            let last = v.len() - 1;
            v[last] = -v[last];
        }
    }
    v
}

/// Height of `λ − μ` in simple roots, if it is a nonnegative combination.
fn height_below(kind: Kind, lambda: &[i64], mu: &[i64]) -> Option<i64> {
    let g = lambda.len();
    let d: Vec<i64> = lambda.iter().zip(mu).map(|(a, b)| a - b).collect();
    let mut partial = Vec::with_capacity(g);
    let mut s = 0;
    for x in &d {
        s += x;
        partial.push(s);
    }
    let total = partial[g - 1];
    if total < 0 || total % 2 != 0 {
        return None;
    }
    match kind {
        Kind::C => {
            if partial[..g - 1].iter().any(|x| *x < 0) {
                return None;
            }
            Some(partial[..g - 1].iter().sum::<i64>() + total / 2)
        }
        Kind::D => {
            if g == 1 {
                return (d[0] == 0).then_some(0);
            }
            if partial[..g - 2].iter().any(|x| *x < 0) {
                return None;
            }
            let b = total / 2;
            let a = partial[g - 2] - b;
            if a < 0 {
                return None;
            }
            Some(partial[..g - 2].iter().sum::<i64>() + a + b)
        }
    }
}

fn dominant_candidates(kind: Kind, g: usize, top: i64) -> Vec<Weight> {
    let mut out = Vec::new();
    fn rec(kind: Kind, g: usize, bound: i64, cur: &mut Weight, out: &mut Vec<Weight>) {
        if cur.len() == g {
            out.push(cur.clone());
            return;
        }
        let last = cur.len() + 1 == g;
        let low = if kind == Kind::D && last && g > 1 { -bound } else { 0 };
        for x in low..=bound {
            cur.push(x);
            rec(kind, g, if last { 0 } else { x }, cur, out);
            cur.pop();
        }
    }
    rec(kind, g, top, &mut Vec::new(), &mut out);
    out
}

/// Multiplicities of `V_λ` on dominant weights of the given type.
fn freudenthal(kind: Kind, lambda: &[i64]) -> Result<BTreeMap<Weight, i64>> {
    let g = lambda.len();
    let top = lambda.iter().map(|x| x.abs()).max().unwrap_or(0);
    let mut levels: Vec<(i64, Weight)> = dominant_candidates(kind, g, top)
        .into_iter()
        .filter_map(|mu| height_below(kind, lambda, &mu).map(|h| (h, mu)))
        .collect();
    levels.sort();
    let inside: BTreeSet<Weight> = levels.iter().map(|(_, m)| m.clone()).collect();
    let roots = positive_roots(kind, g);
    let r = rho(kind, g);
    let shifted = |w: &[i64]| -> Weight { w.iter().zip(&r).map(|(a, b)| a + b).collect() };
    let lr = shifted(lambda);
    let norm_top = dot(&lr, &lr);
    let mut mult: BTreeMap<Weight, i64> = BTreeMap::new();
    for (_, mu) in levels {
        if mu == lambda {
            mult.insert(mu, 1);
            continue;
        }
        let mut num = 0i64;
        for alpha in &roots {
            let mut k = 1;
            loop {
                let nu: Weight = mu.iter().zip(alpha).map(|(a, b)| a + k * b).collect();
                let rep = kind_rep(kind, &nu);
                if !inside.contains(&rep) {
                    break;
                }
                num += mult.get(&rep).copied().unwrap_or(0) * dot(&nu, alpha);
                k += 1;
            }
        }
        let mr = shifted(&mu);
        let den = norm_top - dot(&mr, &mr);
        if den <= 0 || (2 * num) % den != 0 {
            return Err(RepcharError::Inexact("Freudenthal"));
        }
        let m = 2 * num / den;
        if m != 0 {
            mult.insert(mu, m);
        }
    }
    Ok(mult)
}

/// Character of the irreducible `V_λ` of `Sp(2g)` or `O(g,g)`.
///
/// For `O(g,g)` with `λ_g > 0` the restriction to the identity component is
/// `V_λ ⊕ V_{λ'}` with `λ'` the last entry negated; both pieces are summed.
pub fn irreducible_character(lambda: &PartitionLabel, g: usize, ty: GroupType) -> Result<CharacterVector> {
    if g == 0 {
        return Err(RepcharError::ZeroRank);
    }
    let top = lambda.weight(g)?;
    let mut c = CharacterVector::zero(g);
    match ty {
        GroupType::Sp => {
            c.mults = freudenthal(Kind::C, &top)?;
        }
        GroupType::O if g == 1 => {
            c.mults.insert(top, 1);
        }
        GroupType::O => {
            let d = freudenthal(Kind::D, &top)?;
            let split = top[g - 1] > 0;
            for mu in dominant_candidates(Kind::C, g, top[0]) {
                let mut flipped = mu.clone();
                flipped[g - 1] = -flipped[g - 1];
                let mut m = d.get(&mu).copied().unwrap_or(0);
                if split {
                    m += d.get(&flipped).copied().unwrap_or(0);
                }
                if m != 0 {
                    c.mults.insert(mu, m);
                }
            }
        }
    }
    Ok(c)
}

/// Weyl's dimension formula, independent of the multiplicity recursion.
pub fn weyl_dimension(lambda: &PartitionLabel, g: usize, ty: GroupType) -> Result<i64> {
    if g == 0 {
        return Err(RepcharError::ZeroRank);
    }
    let top = lambda.weight(g)?;
    let kind = match ty {
        GroupType::Sp => Kind::C,
        GroupType::O => Kind::D,
    };
    let r = rho(kind, g);
    let lr: Weight = top.iter().zip(&r).map(|(a, b)| a + b).collect();
    let mut d = Q::one();
    for alpha in positive_roots(kind, g) {
        d *= Q::new(dot(&lr, &alpha).into(), dot(&r, &alpha).into());
    }
    let d = d.to_integer().to_i64().ok_or(RepcharError::Inexact("Weyl"))?;
    Ok(if ty == GroupType::O && top[g - 1] > 0 { 2 * d } else { d })
}

/// One irreducible constituent of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionEntry {
    pub lambda: Vec<u32>,
    pub mult: i64,
    pub dim: i64,
}

/// Highest-weight peeling. Constituents are listed in lexicographic order of
/// their partitions.
pub fn decompose(ch: &CharacterVector, ty: GroupType) -> Result<Vec<(PartitionLabel, i64)>> {
    let mut rest = ch.clone();
    let mut out = Vec::new();
    while let Some((top, m)) = rest.mults.iter().next_back().map(|(w, m)| (w.clone(), *m)) {
        let label = PartitionLabel::new(top.iter().map(|x| *x as u32).collect())?;
        if m < 0 {
            return Err(RepcharError::NegativeMultiplicity {
                lambda: label.to_string(),
                mult: m,
            });
        }
        rest = rest.minus(&irreducible_character(&label, ch.g, ty)?.scaled(m))?;
        out.push((label, m));
    }
    out.sort();
    Ok(out)
}

pub fn decomposition_report(
    parts: &[(PartitionLabel, i64)],
    g: usize,
    ty: GroupType,
) -> Result<Vec<DecompositionEntry>> {
    parts
        .iter()
        .map(|(l, m)| {
            Ok(DecompositionEntry {
                lambda: l.parts().to_vec(),
                mult: *m,
                dim: weyl_dimension(l, g, ty)?,
            })
        })
        .collect()
}

/// `2V_0 + 3V_{1^2} + V_{2,1^2}`.
pub fn format_decomposition(parts: &[(PartitionLabel, i64)]) -> String {
    if parts.is_empty() {
        return "0".to_string();
    }
    parts
        .iter()
        .map(|(l, m)| {
            let label = l.to_string();
            let name = if label.len() == 1 {
                format!("V_{label}")
            } else {
                format!("V_{{{label}}}")
            };
            if *m == 1 {
                name
            } else {
                format!("{m}{name}")
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn trivial_multiplicity(ch: &CharacterVector, ty: GroupType) -> Result<i64> {
    Ok(decompose(ch, ty)?
        .into_iter()
        .find(|(l, _)| l.is_empty())
        .map_or(0, |(_, m)| m))
}

// ---------------------------------------------------------------------------
// Plethysm expressions: `wedge2(wedge3(std))`, `sym2(std) + V(1,1)`, `2*std`.

const MAX_DEPTH: usize = 64;
const MAX_POWER: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Std,
    Triv,
    Int(i64),
    Irrep(PartitionLabel),
    Wedge(u32, Box<Expr>),
    Sym(u32, Box<Expr>),
    Tensor(Box<Expr>, Box<Expr>),
    Sum(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn evaluate(&self, g: usize, ty: GroupType) -> Result<CharacterVector> {
        Ok(match self {
            Expr::Std => CharacterVector::standard(g),
            Expr::Triv => CharacterVector::trivial(g),
            Expr::Int(k) => CharacterVector::trivial(g).scaled(*k),
            Expr::Irrep(l) => irreducible_character(l, g, ty)?,
            Expr::Wedge(k, e) => e.evaluate(g, ty)?.exterior_power(*k)?,
            Expr::Sym(k, e) => e.evaluate(g, ty)?.symmetric_power(*k)?,
            Expr::Tensor(a, b) => a.evaluate(g, ty)?.tensor(&b.evaluate(g, ty)?)?,
            Expr::Sum(a, b) => a.evaluate(g, ty)?.plus(&b.evaluate(g, ty)?)?,
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Std => f.write_str("std"),
            Expr::Triv => f.write_str("triv"),
            Expr::Int(k) => write!(f, "{k}"),
            Expr::Irrep(l) => {
                let parts: Vec<String> = l.parts().iter().map(|x| x.to_string()).collect();
                write!(f, "V({})", parts.join(","))
            }
            Expr::Wedge(k, e) => write!(f, "wedge{k}({e})"),
            Expr::Sym(k, e) => write!(f, "sym{k}({e})"),
            Expr::Tensor(a, b) => write!(f, "tensor({a},{b})"),
            Expr::Sum(a, b) => write!(f, "({a}+{b})"),
        }
    }
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(RepcharError::Parse {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.text.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(word.as_bytes()) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let s = std::str::from_utf8(&self.text[start..self.pos]).expect("ASCII digits");
        s.parse::<u64>().or_else(|_| self.err("number out of range"))
    }

    fn power(&mut self) -> Result<u32> {
        let k = self.number()?;
        if k > MAX_POWER as u64 {
            return self.err(format!("power above {MAX_POWER}"));
        }
        Ok(k as u32)
    }

    fn expr(&mut self) -> Result<Expr> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.err("expression nested too deeply");
        }
        let mut e = self.term()?;
        while self.eat(b'+') {
            e = Expr::Sum(Box::new(e), Box::new(self.term()?));
        }
        self.depth -= 1;
        Ok(e)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.atom()?;
        while self.eat(b'*') {
            e = Expr::Tensor(Box::new(e), Box::new(self.atom()?));
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr> {
        self.skip_ws();
        if self.eat(b'(') {
            let e = self.expr()?;
            self.expect(b')')?;
            return Ok(e);
        }
        if self.keyword("std") {
            return Ok(Expr::Std);
        }
        if self.keyword("triv") {
            return Ok(Expr::Triv);
        }
        if self.keyword("tensor") {
            self.expect(b'(')?;
            let a = self.expr()?;
            self.expect(b',')?;
            let b = self.expr()?;
            self.expect(b')')?;
            return Ok(Expr::Tensor(Box::new(a), Box::new(b)));
        }
        if self.keyword("wedge") || self.keyword("sym") {
            let wedge = self.text[..self.pos].ends_with(b"wedge");
            let k = self.power()?;
            self.expect(b'(')?;
            let e = self.expr()?;
            self.expect(b')')?;
            return Ok(if wedge {
                Expr::Wedge(k, Box::new(e))
            } else {
                Expr::Sym(k, Box::new(e))
            });
        }
        if self.keyword("V") {
            self.expect(b'(')?;
            let mut parts = Vec::new();
            if !self.eat(b')') {
                loop {
                    let x = self.number()?;
                    parts.push(u32::try_from(x).or_else(|_| self.err("part out of range"))?);
                    if self.eat(b')') {
                        break;
                    }
                    self.expect(b',')?;
                }
            }
            return PartitionLabel::new(parts).map(Expr::Irrep);
        }
        if self.text.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            let k = self.number()?;
            return i64::try_from(k)
                .map(Expr::Int)
                .or_else(|_| self.err("number out of range"));
        }
        self.err("expected std, triv, V(..), wedgeK(..), symK(..), tensor(..,..), a number or '('")
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
        depth: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.text.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_sizes_match_enumeration() {
        for mu in [
            vec![0, 0, 0],
            vec![1, 0, 0],
            vec![2, 1, 1],
            vec![3, 2, 1],
            vec![1, 1, 1],
        ] {
            assert_eq!(orbit(&mu).len() as i64, orbit_size(&mu));
        }
    }

    #[test]
    fn heights_below_the_highest_weight() {
        assert_eq!(height_below(Kind::C, &[1, 1, 1], &[1, 0, 0]), Some(2));
        assert_eq!(height_below(Kind::C, &[1, 0, 0], &[0, 0, 0]), None);
        assert_eq!(height_below(Kind::D, &[1, 1, 0], &[0, 0, 0]), Some(3));
    }
}

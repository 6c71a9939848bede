//! The commutative algebra objects `Z_n`, `E_n` and `E₁/(κ_{e²})` over the
//! downward (signed) Brauer category.
//!
//! A basis element of `Z_n(S)` is an admissible partition of `S` tensored
//! with `det(ℚ^S)^{⊗n}`; for `E_n` parts also carry a genus `g`. Elements are
//! stored with the determinant written in the sorted order of `S`, so a basis
//! element is just a [`Partition`] and reorderings are folded into the
//! coefficient.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use exactla::{q, Q};
use num_traits::{One, Zero};
use thiserror::Error;

use crate::brauer::{self, BrauerError, BrauerMorphism, FiniteSetObject, Label};
use crate::perm::{permutation_sign, permutations};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpeciesError {
    #[error("element lives on {found}, expected {expected}")]
    WrongSet { expected: String, found: String },
    #[error("part {0} is not admissible for this family")]
    Inadmissible(String),
    #[error("parts do not partition the ordered set")]
    NotAPartition,
    #[error("species mismatch: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Brauer(#[from] BrauerError),
    #[error("parse error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },
}

pub type Result<T> = std::result::Result<T, SpeciesError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Admissible partitions, parts of size ≥ 3.
    Z,
    /// Weighted partitions.
    E,
    /// `E₁/(κ_{e²})`: weighted partitions without a `(∅, 2)` part.
    EModKappa2,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Z => "Z",
            Family::E => "E",
            Family::EModKappa2 => "E/(kappa_e2)",
        })
    }
}

/// A family together with the twist `n`; degrees are `n·weight`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Species {
    pub family: Family,
    pub n: u32,
}

impl Species {
    pub fn new(family: Family, n: u32) -> Self {
        Self { family, n }
    }

    pub fn z(n: u32) -> Self {
        Self::new(Family::Z, n)
    }

    pub fn e(n: u32) -> Self {
        Self::new(Family::E, n)
    }

    pub fn e_mod_kappa2() -> Self {
        Self::new(Family::EModKappa2, 1)
    }

    /// Morphisms act through `dsBr` for odd `n` and through `dBr` otherwise.
    pub fn signed(&self) -> bool {
        self.n % 2 == 1
    }

    pub fn admits(&self, part: &Part) -> bool {
        let k = part.elems.len();
        match self.family {
            Family::Z => part.g == 0 && k >= 3,
            Family::E => part.g >= min_genus(k),
            Family::EModKappa2 => part.g >= min_genus(k) && !(k == 0 && part.g == 2),
        }
    }
}

fn min_genus(size: usize) -> u32 {
    match size {
        0 => 2,
        1 | 2 => 1,
        _ => 0,
    }
}

/// One part `(S_α, g_α)`; elements sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Part {
    pub elems: Vec<Label>,
    pub g: u32,
}

impl Part {
    pub fn new(mut elems: Vec<Label>, g: u32) -> Self {
        elems.sort_unstable();
        Self { elems, g }
    }

    /// `2g + |S_α| − 2`.
    pub fn weight(&self) -> u32 {
        (2 * self.g + self.elems.len() as u32).saturating_sub(2)
    }
}

/// A (weighted) partition in normal form: parts sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<Part>);

impl Partition {
    pub fn new(mut parts: Vec<Part>) -> Self {
        for p in parts.iter_mut() {
            p.elems.sort_unstable();
        }
        parts.sort();
        Self(parts)
    }

    pub fn unit() -> Self {
        Self(Vec::new())
    }

    pub fn parts(&self) -> &[Part] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(Part::weight).sum()
    }

    pub fn labels(&self) -> Vec<Label> {
        let mut v: Vec<Label> = self.0.iter().flat_map(|p| p.elems.iter().copied()).collect();
        v.sort_unstable();
        v
    }

    pub fn part_of(&self, l: Label) -> Option<&Part> {
        self.0.iter().find(|p| p.elems.contains(&l))
    }

    pub fn is_admissible(&self, sp: &Species) -> bool {
        self.0.iter().all(|p| sp.admits(p))
    }

    pub fn has_positive_genus(&self) -> bool {
        self.0.iter().any(|p| p.g > 0)
    }

    /// Disjoint union of two partitions on disjoint label sets.
    pub fn union(&self, other: &Self) -> Self {
        Self::new(self.0.iter().chain(other.0.iter()).cloned().collect())
    }

    /// Relabels every element through `f`.
    pub fn relabel(&self, f: impl Fn(Label) -> Label) -> Self {
        Self::new(
            self.0
                .iter()
                .map(|p| Part::new(p.elems.iter().map(|l| f(*l)).collect(), p.g))
                .collect(),
        )
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "(")?;
            for (j, l) in p.elems.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{l}")?;
            }
            write!(f, ";{})", p.g)?;
        }
        write!(f, "}}")
    }
}

/// Applies a morphism to one basis partition. Returns the image partition and
/// its sign, or `None` when the image is zero.
pub fn act_partition(sp: &Species, m: &BrauerMorphism, p: &Partition) -> Option<(Partition, i32)> {
    let sorted = m.source().labels();
    let mut order: Vec<Label> = Vec::with_capacity(sorted.len());
    for (a, b) in m.matching() {
        order.push(*a);
        order.push(*b);
    }
    let images: Vec<(Label, Label)> = m.injection().collect();
    order.extend(images.iter().map(|(_, s)| *s));
    let positions: Vec<usize> = order
        .iter()
        .map(|l| m.source().position(*l).expect("morphism labels lie in the source"))
        .collect();
    let mut sign = i32::from(m.sign());
    if sp.n % 2 == 1 {
        sign *= permutation_sign(&positions);
    }

    let mut parts: Vec<Part> = p.parts().to_vec();
    for (x, y) in m.matching() {
        let ix = parts.iter().position(|q| q.elems.contains(x))?;
        let iy = parts.iter().position(|q| q.elems.contains(y))?;
        if ix == iy {
            if sp.family == Family::Z {
                return None;
            }
            let part = &mut parts[ix];
            part.elems.retain(|l| l != x && l != y);
            part.g += 1;
        } else {
            let (lo, hi) = (ix.min(iy), ix.max(iy));
            let b = parts.remove(hi);
            let a = parts.remove(lo);
            let elems = a
                .elems
                .iter()
                .chain(b.elems.iter())
                .copied()
                .filter(|l| l != x && l != y)
                .collect();
            parts.push(Part::new(elems, a.g + b.g));
        }
    }
    let back: BTreeMap<Label, Label> = images.iter().map(|(t, s)| (*s, *t)).collect();
    let out = Partition::new(parts).relabel(|l| back[&l]);
    if !out.is_admissible(sp) {
        return None;
    }
    Some((out, sign))
}

/// A homogeneous linear combination of basis partitions of `F(S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpeciesElement {
    pub species: Species,
    pub set: FiniteSetObject,
    terms: BTreeMap<Partition, Q>,
}

impl SpeciesElement {
    pub fn zero(species: Species, set: FiniteSetObject) -> Self {
        Self {
            species,
            set,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(species: Species, set: FiniteSetObject, p: Partition) -> Result<Self> {
        let mut x = Self::zero(species, set);
        x.add_term(p, Q::one())?;
        Ok(x)
    }

    /// The unit: the empty partition of `∅`.
    pub fn unit(species: Species) -> Self {
        let mut x = Self::zero(species, FiniteSetObject::empty());
        x.terms.insert(Partition::unit(), Q::one());
        x
    }

    /// `κ_{e^j} = (∅, j) ∈ E_n(∅)`.
    pub fn kappa(species: Species, j: u32) -> Result<Self> {
        Self::basis(
            species,
            FiniteSetObject::empty(),
            Partition::new(vec![Part::new(vec![], j)]),
        )
    }

    pub fn add_term(&mut self, p: Partition, c: Q) -> Result<()> {
        if p.labels() != self.set.labels() {
            return Err(SpeciesError::WrongSet {
                expected: self.set.to_string(),
                found: format!("{p}"),
            });
        }
        if !p.is_admissible(&self.species) {
            return Err(SpeciesError::Inadmissible(p.to_string()));
        }
        let e = self.terms.entry(p).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
        Ok(())
    }

    pub fn terms(&self) -> &BTreeMap<Partition, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: &Partition) -> Q {
        self.terms.get(p).cloned().unwrap_or_else(Q::zero)
    }

    pub fn scaled(&self, c: &Q) -> Self {
        let mut out = Self::zero(self.species, self.set.clone());
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(p, v)| (p.clone(), v * c)).collect();
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.species != other.species || self.set != other.set {
            return Err(SpeciesError::Mismatch("sum of elements on different sets".into()));
        }
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c.clone())?;
        }
        Ok(out)
    }

    /// Weights occurring in the element.
    pub fn weights(&self) -> BTreeSet<u32> {
        self.terms.keys().map(Partition::weight).collect()
    }
}

/// `F(m)(x)` for `m : S → T`.
pub fn act(m: &BrauerMorphism, x: &SpeciesElement) -> Result<SpeciesElement> {
    if m.source() != &x.set {
        return Err(SpeciesError::WrongSet {
            expected: m.source().to_string(),
            found: x.set.to_string(),
        });
    }
    if m.is_signed() != x.species.signed() {
        return Err(SpeciesError::Mismatch(
            "odd n acts through dsBr, even n through dBr".into(),
        ));
    }
    let mut out = SpeciesElement::zero(x.species, m.target().clone());
    for (p, c) in &x.terms {
        if let Some((img, s)) = act_partition(&x.species, m, p) {
            out.add_term(img, c * q(s as i64))?;
        }
    }
    Ok(out)
}

/// Sign of rewriting `det` in the order (sorted `S1`, sorted `S2`) as the
/// sorted order of `S1 ⊔ S2`, raised to the `n`.
fn concat_sign(s1: &FiniteSetObject, s2: &FiniteSetObject, n: u32) -> i32 {
    if n % 2 == 0 {
        return 1;
    }
    let inversions: usize = s1
        .labels()
        .iter()
        .map(|a| s2.labels().iter().filter(|b| *b < a).count())
        .sum();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// External product `F(S1) ⊗ F(S2) → F(S1 ⊔ S2)` for disjoint label sets.
pub fn external_product(x: &SpeciesElement, y: &SpeciesElement) -> Result<SpeciesElement> {
    if x.species != y.species {
        return Err(SpeciesError::Mismatch("product of different species".into()));
    }
    if !x.set.is_disjoint(&y.set) {
        return Err(BrauerError::OverlappingBlocks.into());
    }
    let set = x.set.union(&y.set)?;
    let s = concat_sign(&x.set, &y.set, x.species.n);
    let mut out = SpeciesElement::zero(x.species, set);
    for (p, a) in &x.terms {
        for (r, b) in &y.terms {
            let u = p.union(r);
            if u.is_admissible(&x.species) {
                out.add_term(u, a * b * q(s as i64))?;
            }
        }
    }
    Ok(out)
}

/// `glue ∘ (x ⊗ y)`, the product in the Day-convolution monoidal structure.
pub fn multiply(x: &SpeciesElement, y: &SpeciesElement, glue: &BrauerMorphism) -> Result<SpeciesElement> {
    act(glue, &external_product(x, y)?)
}

/// `E_n → Z_n`: parts of positive genus are sent to zero.
pub fn en_to_zn(x: &SpeciesElement) -> Result<SpeciesElement> {
    if x.species.family == Family::Z {
        return Err(SpeciesError::Mismatch("en_to_zn expects an E_n element".into()));
    }
    let mut out = SpeciesElement::zero(Species::z(x.species.n), x.set.clone());
    for (p, c) in &x.terms {
        if !p.has_positive_genus() {
            out.add_term(p.clone(), c.clone())?;
        }
    }
    Ok(out)
}

/// Augmentation `F → ℚ`: only the empty partition of `∅` survives.
pub fn augmentation(x: &SpeciesElement) -> Q {
    if x.set.is_empty() {
        x.coefficient(&Partition::unit())
    } else {
        Q::zero()
    }
}

/// Set partitions of `labels` (restricted growth strings).
pub fn set_partitions(labels: &[Label]) -> Vec<Vec<Vec<Label>>> {
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<Label>> = Vec::new();
    fn rec(rest: &[Label], blocks: &mut Vec<Vec<Label>>, out: &mut Vec<Vec<Vec<Label>>>) {
        let Some((&l, tail)) = rest.split_first() else {
            out.push(blocks.clone());
            return;
        };
        for i in 0..blocks.len() {
            blocks[i].push(l);
            rec(tail, blocks, out);
            blocks[i].pop();
        }
        blocks.push(vec![l]);
        rec(tail, blocks, out);
        blocks.pop();
    }
    rec(labels, &mut blocks, &mut out);
    out
}

/// Multisets of genera `g ≥ lo` (non-increasing lists) of empty parts with
/// total weight `w`, each part weighing `2g − 2`.
fn empty_part_genera(w: u32, lo: u32, max: u32) -> Vec<Vec<u32>> {
    if w == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for g in (lo..=max).rev() {
        let pw = 2 * g - 2;
        if pw > w {
            continue;
        }
        for mut rest in empty_part_genera(w - pw, lo, g) {
            rest.insert(0, g);
            out.push(rest);
        }
    }
    out
}

/// Basis of the weight-`w` part of `F(S)`, sorted.
pub fn basis(sp: &Species, s: &FiniteSetObject, w: u32) -> Vec<Partition> {
    fn genera(sp: &Species, block: &[Label], w: u32) -> Vec<u32> {
        let k = block.len() as u32;
        (0..=w / 2 + 1)
            .filter(|g| 2 * g + k >= 3 && 2 * g + k - 2 <= w)
            .filter(|g| sp.admits(&Part::new(block.to_vec(), *g)))
            .collect()
    }
    fn rec(sp: &Species, blocks: &[Vec<Label>], budget: u32, cur: &mut Vec<Part>, out: &mut BTreeSet<Partition>) {
        let Some((b, tail)) = blocks.split_first() else {
            let lo = match sp.family {
                Family::Z if budget > 0 => return,
                Family::Z | Family::E => 2,
                Family::EModKappa2 => 3,
            };
            for gens in empty_part_genera(budget, lo, budget / 2 + 1) {
                let mut all = cur.clone();
                all.extend(gens.into_iter().map(|g| Part::new(vec![], g)));
                out.insert(Partition::new(all));
            }
            return;
        };
        for g in genera(sp, b, budget) {
            let p = Part::new(b.clone(), g);
            let pw = p.weight();
            cur.push(p);
            rec(sp, tail, budget - pw, cur, out);
            cur.pop();
        }
    }
    let mut out = BTreeSet::new();
    for blocks in set_partitions(s.labels()) {
        rec(sp, &blocks, w, &mut Vec::new(), &mut out);
    }
    out.into_iter().collect()
}

pub fn zn_basis(s: &FiniteSetObject, w: u32, n: u32) -> Vec<Partition> {
    basis(&Species::z(n), s, w)
}

pub fn en_basis(s: &FiniteSetObject, w: u32, n: u32) -> Vec<Partition> {
    basis(&Species::e(n), s, w)
}

/// Bases of the ideal `(κ_{e²})·E₁(S)` and of the quotient `E₁/(κ_{e²})` in
/// weight `w`. The ideal basis is `κ_{e²}` times the weight `w − 2` basis.
pub fn quotient_ideal_basis(s: &FiniteSetObject, w: u32) -> (Vec<Partition>, Vec<Partition>) {
    let e1 = Species::e(1);
    let kappa = Part::new(vec![], 2);
    let ideal: Vec<Partition> = if w >= 2 {
        basis(&e1, s, w - 2)
            .into_iter()
            .map(|p| p.union(&Partition::new(vec![kappa.clone()])))
            .collect()
    } else {
        Vec::new()
    };
    let quotient = basis(&Species::e_mod_kappa2(), s, w);
    (ideal, quotient)
}

/// Reads back the serialized form of a basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionBasisElement {
    pub parts: Vec<Part>,
    pub order: Vec<Label>,
    pub coeff: Q,
}

impl PartitionBasisElement {
    /// Folds the determinant order into the coefficient.
    pub fn normalize(&self, sp: &Species) -> Result<(FiniteSetObject, Partition, Q)> {
        let set = FiniteSetObject::new(self.order.iter().copied())?;
        let p = Partition::new(self.parts.clone());
        if p.labels() != set.labels() {
            return Err(SpeciesError::NotAPartition);
        }
        if let Some(bad) = p.parts().iter().find(|x| !sp.admits(x)) {
            return Err(SpeciesError::Inadmissible(format!("{:?}", bad.elems)));
        }
        let positions: Vec<usize> = self
            .order
            .iter()
            .map(|l| set.position(*l).expect("order is a permutation of the set"))
            .collect();
        let mut c = self.coeff.clone();
        if sp.n % 2 == 1 && permutation_sign(&positions) < 0 {
            c = -c;
        }
        Ok((set, p, c))
    }

    pub fn into_element(&self, sp: &Species) -> Result<SpeciesElement> {
        let (set, p, c) = self.normalize(sp)?;
        let mut x = SpeciesElement::zero(*sp, set);
        x.add_term(p, c)?;
        Ok(x)
    }
}

impl fmt::Display for PartitionBasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Label]| v.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{{parts:[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{elems:[{}],g:{}}}", list(&p.elems), p.g)?;
        }
        write!(
            f,
            "],order:[{}],coeff:{}/{}}}",
            list(&self.order),
            self.coeff.numer(),
            self.coeff.denom()
        )
    }
}

/// Serialized forms of every term of `x`, with the sorted order.
pub fn serialize(x: &SpeciesElement) -> Vec<String> {
    x.terms
        .iter()
        .map(|(p, c)| {
            PartitionBasisElement {
                parts: p.parts().to_vec(),
                order: x.set.labels().to_vec(),
                coeff: c.clone(),
            }
            .to_string()
        })
        .collect()
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> SpeciesError {
        SpeciesError::Parse {
            pos: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        let n = self.text[self.pos..].len() - self.text[self.pos..].trim_start().len();
        self.pos += n;
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{s}`")))
        }
    }

    fn int_token(&mut self, signed: bool) -> Result<&'a str> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let sign = usize::from(signed && rest.starts_with('-'));
        let digits = rest[sign..].bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(self.err("expected an integer"));
        }
        let tok = &rest[..sign + digits];
        self.pos += sign + digits;
        Ok(tok)
    }

    fn number<T: std::str::FromStr>(&mut self) -> Result<T> {
        let tok = self.int_token(false)?;
        tok.parse().map_err(|_| self.err(format!("`{tok}` out of range")))
    }

    fn label_list(&mut self) -> Result<Vec<Label>> {
        self.expect("[")?;
        let mut v = Vec::new();
        if self.eat("]") {
            return Ok(v);
        }
        loop {
            v.push(self.number()?);
            if self.eat("]") {
                return Ok(v);
            }
            self.expect(",")?;
        }
    }
}

/// Parses `{parts:[{elems:[...],g:k}],order:[...],coeff:num/den}`.
pub fn parse_basis_element(text: &str) -> Result<PartitionBasisElement> {
    let mut c = Cursor { text, pos: 0 };
    c.expect("{")?;
    c.expect("parts:")?;
    c.expect("[")?;
    let mut parts = Vec::new();
    if !c.eat("]") {
        loop {
            c.expect("{")?;
            c.expect("elems:")?;
            let elems = c.label_list()?;
            c.expect(",")?;
            c.expect("g:")?;
            let g = c.number()?;
            c.expect("}")?;
            parts.push(Part::new(elems, g));
            if c.eat("]") {
                break;
            }
            c.expect(",")?;
        }
    }
    c.expect(",")?;
    c.expect("order:")?;
    let order = c.label_list()?;
    c.expect(",")?;
    c.expect("coeff:")?;
    let num: exactla::BigInt = c.int_token(true)?.parse().map_err(|_| c.err("bad numerator"))?;
    let den: exactla::BigInt = if c.eat("/") {
        c.int_token(false)?.parse().map_err(|_| c.err("bad denominator"))?
    } else {
        One::one()
    };
    if den.is_zero() {
        return Err(c.err("zero denominator"));
    }
    c.expect("}")?;
    c.skip_ws();
    if c.pos != text.len() {
        return Err(c.err("trailing input"));
    }
    let mut sorted = order.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(SpeciesError::NotAPartition);
    }
    Ok(PartitionBasisElement {
        parts,
        order,
        coeff: Q::new(num, den),
    })
}

// ---------------------------------------------------------------------------
// Day words: bases of r-fold Day powers of the augmentation ideal.

/// Where a leg of a block goes: to an external label of `S`, or to a leg of
/// another block (a pair of the gluing morphism).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Leg {
    Ext(Label),
    Int { block: usize, leg: usize },
}

/// One tensor factor `x_i ∈ F̄(A_i)` with `A_i = {0, …, a_i − 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DayBlock {
    pub legs: Vec<Leg>,
    pub partition: Partition,
}

impl DayBlock {
    pub fn weight(&self) -> u32 {
        self.partition.weight()
    }

    fn part_shape(&self, leg: usize) -> (usize, u32) {
        let p = self.partition.part_of(leg as Label).expect("every leg lies in a part");
        (p.elems.len(), p.g)
    }
}

/// An element `x_1 ⊗ ⋯ ⊗ x_r` of `F̄^{⊛r}(S)`, glued by a morphism with no
/// pair inside one block. Pairs are oriented from the lower block to the
/// higher one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DayWord {
    pub blocks: Vec<DayBlock>,
}

type LegKey = (u8, u64, u64, (usize, u32), (usize, u32));

impl DayWord {
    pub fn arity(&self) -> usize {
        self.blocks.len()
    }

    pub fn weight(&self) -> u32 {
        self.blocks.iter().map(DayBlock::weight).sum()
    }

    /// Sort key of a leg of block `b` once the blocks before `b` are ordered
    /// (`fixed[j][old] = new` for `j < b`).
    fn leg_key(&self, b: usize, l: usize, fixed: &[Vec<usize>]) -> LegKey {
        let blk = &self.blocks[b];
        let own = blk.part_shape(l);
        match blk.legs[l] {
            Leg::Ext(s) => (0, s as u64, 0, own, (0, 0)),
            Leg::Int { block, leg } if block < b => (1, block as u64, fixed[block][leg] as u64, own, (0, 0)),
            Leg::Int { block, leg } => (2, block as u64, 0, own, self.blocks[block].part_shape(leg)),
        }
    }

    /// Relabels legs: `orders[b][k]` is the old index of the leg placed at
    /// position `k` of block `b`. Returns the word and the sign `∏ sgn^n`.
    fn relabeled(&self, orders: &[Vec<usize>], n: u32) -> (DayWord, i32) {
        let new_index: Vec<Vec<usize>> = orders
            .iter()
            .map(|o| {
                let mut inv = vec![0; o.len()];
                for (k, old) in o.iter().enumerate() {
                    inv[*old] = k;
                }
                inv
            })
            .collect();
        let mut sign = 1;
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(b, blk)| {
                if n % 2 == 1 {
                    sign *= permutation_sign(&orders[b]);
                }
                let legs = orders[b]
                    .iter()
                    .map(|old| match blk.legs[*old] {
                        Leg::Ext(s) => Leg::Ext(s),
                        Leg::Int { block, leg } => Leg::Int {
                            block,
                            leg: new_index[block][leg],
                        },
                    })
                    .collect();
                let partition = blk.partition.relabel(|l| new_index[b][l as usize] as Label);
                DayBlock { legs, partition }
            })
            .collect();
        (DayWord { blocks }, sign)
    }

    /// Canonical representative under independent relabeling of the legs of
    /// each block. `None` if the word is zero (an odd self-relabeling).
    pub fn canonical(&self, sp: &Species) -> Option<(DayWord, i32)> {
        let mut search = CanonSearch {
            word: self,
            n: sp.n,
            orders: Vec::with_capacity(self.blocks.len()),
            fixed: Vec::with_capacity(self.blocks.len()),
            best: None,
            conflict: false,
        };
        search.run();
        if search.conflict {
            None
        } else {
            search.best
        }
    }

    /// Reorders blocks: block `perm[k]` of `self` moves to position `k`.
    ///
    /// The sign collects the Koszul sign of the shifted degrees `n·w_i + 1`
    /// and `(−1)^n` for every pair whose orientation flips.
    pub fn permute_blocks(&self, perm: &[usize], n: u32) -> (DayWord, i32) {
        let r = self.blocks.len();
        let mut inv = vec![0; r];
        for (k, old) in perm.iter().enumerate() {
            inv[*old] = k;
        }
        let shifted: Vec<u32> = self.blocks.iter().map(|b| n * b.weight() + 1).collect();
        let mut sign = 1i32;
        for i in 0..r {
            for j in (i + 1)..r {
                if inv[i] > inv[j] {
                    if (shifted[i] * shifted[j]) % 2 == 1 {
                        sign = -sign;
                    }
                    if n % 2 == 1 {
                        let pairs = self.blocks[i]
                            .legs
                            .iter()
                            .filter(|l| matches!(l, Leg::Int { block, .. } if *block == j))
                            .count();
                        if pairs % 2 == 1 {
                            sign = -sign;
                        }
                    }
                }
            }
        }
        let blocks = perm
            .iter()
            .map(|old| {
                let b = &self.blocks[*old];
                DayBlock {
                    legs: b
                        .legs
                        .iter()
                        .map(|l| match *l {
                            Leg::Int { block, leg } => Leg::Int { block: inv[block], leg },
                            e => e,
                        })
                        .collect(),
                    partition: b.partition.clone(),
                }
            })
            .collect();
        (DayWord { blocks }, sign)
    }

    /// Multiplies blocks `i` and `i+1`, contracting the pairs between them.
    pub fn merge_adjacent(&self, i: usize, sp: &Species) -> Result<Option<(DayWord, i32)>> {
        let (a, b) = (&self.blocks[i], &self.blocks[i + 1]);
        let (na, nb) = (a.legs.len(), b.legs.len());
        let shift = na as Label;
        let joint = a.partition.union(&b.partition.relabel(|l| l + shift));
        let source = FiniteSetObject::range(na + nb);
        // Local labels are 0-based here; FiniteSetObject::range is 1-based.
        let source = FiniteSetObject::new(source.labels().iter().map(|l| l - 1))?;
        let mut matching = Vec::new();
        let mut survivors: Vec<(usize, usize)> = Vec::new();
        for (l, leg) in a.legs.iter().enumerate() {
            match leg {
                Leg::Int { block, leg } if *block == i + 1 => {
                    matching.push((l as Label, *leg as Label + shift));
                }
                _ => survivors.push((0, l)),
            }
        }
        for (l, leg) in b.legs.iter().enumerate() {
            if !matches!(leg, Leg::Int { block, .. } if *block == i) {
                survivors.push((1, l));
            }
        }
        let target = FiniteSetObject::new(0..survivors.len() as Label)?;
        let inj: Vec<(Label, Label)> = survivors
            .iter()
            .enumerate()
            .map(|(k, (side, l))| (k as Label, *l as Label + if *side == 0 { 0 } else { shift }))
            .collect();
        let m = BrauerMorphism::new(source, target, &inj, &matching, sp.signed())?;
        let Some((partition, sign)) = act_partition(sp, &m, &joint) else {
            return Ok(None);
        };
        let mut new_pos: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (k, (side, l)) in survivors.iter().enumerate() {
            new_pos.insert((i + side, *l), k);
        }
        let remap = |leg: &Leg| -> Leg {
            match *leg {
                Leg::Ext(s) => Leg::Ext(s),
                Leg::Int { block, leg } if block == i || block == i + 1 => Leg::Int {
                    block: i,
                    leg: new_pos[&(block, leg)],
                },
                Leg::Int { block, leg } => Leg::Int {
                    block: if block > i + 1 { block - 1 } else { block },
                    leg,
                },
            }
        };
        let merged_legs: Vec<Leg> = survivors
            .iter()
            .map(|(side, l)| remap(&self.blocks[i + side].legs[*l]))
            .collect();
        let mut blocks = Vec::with_capacity(self.blocks.len() - 1);
        for (j, blk) in self.blocks.iter().enumerate() {
            if j == i {
                blocks.push(DayBlock {
                    legs: merged_legs.clone(),
                    partition: partition.clone(),
                });
            } else if j != i + 1 {
                blocks.push(DayBlock {
                    legs: blk.legs.iter().map(remap).collect(),
                    partition: blk.partition.clone(),
                });
            }
        }
        Ok(Some((DayWord { blocks }, sign)))
    }

    /// Applies `E_n → Z_n` blockwise.
    pub fn to_z(&self) -> Option<DayWord> {
        if self.blocks.iter().any(|b| b.partition.has_positive_genus()) {
            None
        } else {
            Some(self.clone())
        }
    }

    /// External labels, sorted.
    pub fn external_labels(&self) -> Vec<Label> {
        let mut v: Vec<Label> = self
            .blocks
            .iter()
            .flat_map(|b| b.legs.iter())
            .filter_map(|l| match l {
                Leg::Ext(s) => Some(*s),
                Leg::Int { .. } => None,
            })
            .collect();
        v.sort_unstable();
        v
    }
}

/// Blocks are ordered one at a time. Legs of the current block are sorted by
/// a key that sees the final positions of partners in earlier blocks, and
/// only ties are enumerated. The candidate set is defined invariantly, so its
/// minimum is canonical and an odd automorphism shows up as a sign conflict.
struct CanonSearch<'a> {
    word: &'a DayWord,
    n: u32,
    orders: Vec<Vec<usize>>,
    fixed: Vec<Vec<usize>>,
    best: Option<(DayWord, i32)>,
    conflict: bool,
}

impl CanonSearch<'_> {
    fn run(&mut self) {
        let b = self.orders.len();
        if b == self.word.blocks.len() {
            let (w, s) = self.word.relabeled(&self.orders, self.n);
            match &self.best {
                None => self.best = Some((w, s)),
                Some((bw, bs)) => match w.cmp(bw) {
                    std::cmp::Ordering::Less => {
                        self.best = Some((w, s));
                        self.conflict = false;
                    }
                    std::cmp::Ordering::Equal => {
                        if s != *bs {
                            self.conflict = true;
                        }
                    }
                    std::cmp::Ordering::Greater => {}
                },
            }
            return;
        }
        let legs = self.word.blocks[b].legs.len();
        let keys: Vec<LegKey> = (0..legs).map(|l| self.word.leg_key(b, l, &self.fixed)).collect();
        let mut idx: Vec<usize> = (0..legs).collect();
        idx.sort_by_key(|l| keys[*l]);
        let mut runs: Vec<Vec<usize>> = Vec::new();
        for l in idx {
            match runs.last_mut() {
                Some(run) if keys[run[0]] == keys[l] => run.push(l),
                _ => runs.push(vec![l]),
            }
        }
        let mut candidates: Vec<Vec<usize>> = vec![Vec::with_capacity(legs)];
        for run in &runs {
            if run.len() == 1 {
                for c in candidates.iter_mut() {
                    c.push(run[0]);
                }
                continue;
            }
            let perms = permutations(run.len());
            let mut next = Vec::with_capacity(candidates.len() * perms.len());
            for c in &candidates {
                for p in &perms {
                    let mut c2 = c.clone();
                    c2.extend(p.iter().map(|i| run[*i]));
                    next.push(c2);
                }
            }
            candidates = next;
        }
        for order in candidates {
            let mut inv = vec![0; order.len()];
            for (k, old) in order.iter().enumerate() {
                inv[*old] = k;
            }
            self.orders.push(order);
            self.fixed.push(inv);
            self.run();
            self.orders.pop();
            self.fixed.pop();
        }
    }
}

impl fmt::Display for DayWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, blk) in self.blocks.iter().enumerate() {
            if b > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{}[", blk.partition)?;
            for (k, l) in blk.legs.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                match l {
                    Leg::Ext(s) => write!(f, "{s}")?,
                    Leg::Int { block, leg } => write!(f, "{block}.{leg}")?,
                }
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// Shapes of one block: weighted partitions of `{0, …, a−1}` of weight `w`,
/// one per multiset of part shapes.
fn block_shapes(sp: &Species, w: u32) -> Vec<Partition> {
    // Part shapes (size, g) of weight between 1 and w, excluding weight-0
    // parts, which are never admissible.
    let mut shapes: Vec<(usize, u32)> = Vec::new();
    for size in 0..=(w as usize + 2) {
        for g in 0..=(w / 2 + 1) {
            let p = Part::new((0..size as Label).collect(), g);
            if sp.admits(&p) && p.weight() >= 1 && p.weight() <= w {
                shapes.push((size, g));
            }
        }
    }
    let mut out = Vec::new();
    fn rec(
        shapes: &[(usize, u32)],
        start: usize,
        w: u32,
        cur: &mut Vec<(usize, u32)>,
        out: &mut Vec<Vec<(usize, u32)>>,
    ) {
        if w == 0 {
            out.push(cur.clone());
            return;
        }
        for k in start..shapes.len() {
            let (s, g) = shapes[k];
            let pw = (2 * g + s as u32).saturating_sub(2);
            if pw <= w {
                cur.push((s, g));
                rec(shapes, k, w - pw, cur, out);
                cur.pop();
            }
        }
    }
    let mut multisets = Vec::new();
    rec(&shapes, 0, w, &mut Vec::new(), &mut multisets);
    for ms in multisets {
        let mut next: Label = 0;
        let parts = ms
            .iter()
            .map(|(s, g)| {
                let elems = (next..next + *s as Label).collect();
                next += *s as Label;
                Part::new(elems, *g)
            })
            .collect();
        out.push(Partition::new(parts));
    }
    out
}

fn compositions(w: u32, r: usize) -> Vec<Vec<u32>> {
    if r == 0 {
        return if w == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=w {
        for mut rest in compositions(w - first, r - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Basis of the weight-`w` part of `F̄^{⊛r}(S)`: canonical Day words.
pub fn day_tensor_basis(sp: &Species, r: usize, s: &FiniteSetObject, w: u32) -> Vec<DayWord> {
    let mut out: BTreeSet<DayWord> = BTreeSet::new();
    for weights in compositions(w, r) {
        let shape_lists: Vec<Vec<Partition>> = weights.iter().map(|wi| block_shapes(sp, *wi)).collect();
        let mut choice = vec![0usize; r];
        if shape_lists.iter().any(Vec::is_empty) {
            continue;
        }
        loop {
            let parts: Vec<&Partition> = choice.iter().enumerate().map(|(b, c)| &shape_lists[b][*c]).collect();
            glue_words(sp, &parts, s, &mut out);
            let mut k = 0;
            while k < r {
                choice[k] += 1;
                if choice[k] < shape_lists[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == r {
                break;
            }
        }
    }
    out.into_iter().collect()
}

/// Every gluing of the given blocks onto `S`, canonicalized into `out`.
fn glue_words(sp: &Species, parts: &[&Partition], s: &FiniteSetObject, out: &mut BTreeSet<DayWord>) {
    let sizes: Vec<usize> = parts.iter().map(|p| p.labels().len()).collect();
    let total: usize = sizes.iter().sum();
    if total < s.len() || (total - s.len()) % 2 == 1 {
        return;
    }
    let global: Vec<(usize, usize)> = sizes
        .iter()
        .enumerate()
        .flat_map(|(b, n)| (0..*n).map(move |l| (b, l)))
        .collect();
    let ids: Vec<Label> = (0..global.len() as Label).collect();
    let s_labels = s.labels();
    let mut used = vec![false; global.len()];
    let mut chosen: Vec<usize> = Vec::new();
    let mut emit = |chosen: &[usize], used: &[bool]| {
        let rest: Vec<Label> = ids.iter().copied().filter(|i| !used[*i as usize]).collect();
        for m in brauer::perfect_matchings(&rest) {
            if m.iter().any(|(x, y)| global[*x as usize].0 == global[*y as usize].0) {
                continue;
            }
            let mut blocks: Vec<DayBlock> = parts
                .iter()
                .zip(sizes.iter())
                .map(|(p, n)| DayBlock {
                    legs: vec![Leg::Ext(0); *n],
                    partition: (*p).clone(),
                })
                .collect();
            for (k, g) in chosen.iter().enumerate() {
                let (b, l) = global[*g];
                blocks[b].legs[l] = Leg::Ext(s_labels[k]);
            }
            for (x, y) in &m {
                let (bx, lx) = global[*x as usize];
                let (by, ly) = global[*y as usize];
                blocks[bx].legs[lx] = Leg::Int { block: by, leg: ly };
                blocks[by].legs[ly] = Leg::Int { block: bx, leg: lx };
            }
            if let Some((w, _)) = (DayWord { blocks }).canonical(sp) {
                out.insert(w);
            }
        }
    };
    fn rec(k: usize, n: usize, used: &mut Vec<bool>, chosen: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize], &[bool])) {
        if chosen.len() == k {
            emit(chosen, used);
            return;
        }
        for g in 0..n {
            if !used[g] {
                used[g] = true;
                chosen.push(g);
                rec(k, n, used, chosen, emit);
                chosen.pop();
                used[g] = false;
            }
        }
    }
    rec(s.len(), global.len(), &mut used, &mut chosen, &mut emit);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_partition_counts_are_bell_numbers() {
        let bell: Vec<usize> = (0..6)
            .map(|n| set_partitions(&(0..n as Label).collect::<Vec<_>>()).len())
            .collect();
        assert_eq!(bell, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn block_shapes_of_small_weight() {
        assert_eq!(block_shapes(&Species::z(1), 1).len(), 1);
        // (3;0), (1;1) in weight 1; E in weight 2 adds (4;0), (2;1), (;2) and pairs.
        assert_eq!(block_shapes(&Species::e(1), 1).len(), 2);
        assert_eq!(block_shapes(&Species::e(1), 2).len(), 3 + 3);
        assert_eq!(block_shapes(&Species::e_mod_kappa2(), 2).len(), 2 + 3);
    }
}

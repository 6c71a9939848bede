//! The downward Brauer category `dBr` and its signed variant `dsBr`.
//!
//! A morphism `S → T` is an injection `f : T ↪ S` together with a perfect
//! matching of `S ∖ f(T)`. In `dsBr` the matching pairs are ordered and
//! reversing a pair multiplies the morphism by −1; we store every pair with
//! its smaller label first and keep the accumulated sign separately.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub type Label = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BrauerError {
    #[error("label {0} appears twice")]
    DuplicateLabel(Label),
    #[error("label {0} is not in the source set")]
    UnknownSourceLabel(Label),
    #[error("label {0} is not in the target set")]
    UnknownTargetLabel(Label),
    #[error("injection must be defined on every target label")]
    IncompleteInjection,
    #[error("labels of the source are neither matched nor hit exactly once")]
    NotAPartition,
    #[error("composition needs target {left} to equal source {right}")]
    NotComposable { left: String, right: String },
    #[error("cannot mix signed and unsigned morphisms")]
    MixedSignedness,
    #[error("blocks of a Day product must be disjoint")]
    OverlappingBlocks,
    #[error("parse error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },
}

pub type Result<T> = std::result::Result<T, BrauerError>;

/// A finite set of labels, kept sorted; the sorted order is the canonical
/// order used for orientations.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteSetObject(Vec<Label>);

impl FiniteSetObject {
    pub fn new(labels: impl IntoIterator<Item = Label>) -> Result<Self> {
        let mut v: Vec<Label> = labels.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(BrauerError::DuplicateLabel(w[0]));
        }
        Ok(Self(v))
    }

    /// The set `{1, …, n}`.
    pub fn range(n: usize) -> Self {
        Self((1..=n as Label).collect())
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, l: Label) -> bool {
        self.0.binary_search(&l).is_ok()
    }

    pub fn position(&self, l: Label) -> Option<usize> {
        self.0.binary_search(&l).ok()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.0.iter().all(|l| !other.contains(*l))
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        Self::new(self.0.iter().chain(other.0.iter()).copied())
    }
}

impl fmt::Display for FiniteSetObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

/// A basis morphism `S → T` of `dBr` or `dsBr`, with a sign.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BrauerMorphism {
    source: FiniteSetObject,
    target: FiniteSetObject,
    /// `injection[i]` is the source label hit by `target.labels()[i]`.
    injection: Vec<Label>,
    matching: Vec<(Label, Label)>,
    signed: bool,
    sign: i8,
}

impl BrauerMorphism {
    /// Validates and normalizes. `injection` lists `(t, f(t))` pairs.
    pub fn new(
        source: FiniteSetObject,
        target: FiniteSetObject,
        injection: &[(Label, Label)],
        matching: &[(Label, Label)],
        signed: bool,
    ) -> Result<Self> {
        let map: BTreeMap<Label, Label> = injection.iter().copied().collect();
        if map.len() != injection.len() {
            return Err(BrauerError::DuplicateLabel(injection[0].0));
        }
        for t in map.keys() {
            if !target.contains(*t) {
                return Err(BrauerError::UnknownTargetLabel(*t));
            }
        }
        if map.len() != target.len() {
            return Err(BrauerError::IncompleteInjection);
        }
        let inj: Vec<Label> = target.labels().iter().map(|t| map[t]).collect();
        let mut seen = BTreeSet::new();
        for l in inj.iter().chain(matching.iter().flat_map(|(a, b)| [a, b])) {
            if !source.contains(*l) {
                return Err(BrauerError::UnknownSourceLabel(*l));
            }
            if !seen.insert(*l) {
                return Err(BrauerError::NotAPartition);
            }
        }
        if seen.len() != source.len() {
            return Err(BrauerError::NotAPartition);
        }
        let mut m = Self {
            source,
            target,
            injection: inj,
            matching: matching.to_vec(),
            signed,
            sign: 1,
        };
        m.normalize();
        Ok(m)
    }

    pub fn identity(s: &FiniteSetObject, signed: bool) -> Self {
        Self {
            source: s.clone(),
            target: s.clone(),
            injection: s.labels().to_vec(),
            matching: Vec::new(),
            signed,
            sign: 1,
        }
    }

    /// Orients every pair smaller-label-first (flipping the sign in `dsBr`)
    /// and sorts the pairs.
    fn normalize(&mut self) {
        for p in self.matching.iter_mut() {
            if p.0 > p.1 {
                *p = (p.1, p.0);
                if self.signed {
                    self.sign = -self.sign;
                }
            }
        }
        self.matching.sort_unstable();
    }

    pub fn source(&self) -> &FiniteSetObject {
        &self.source
    }

    pub fn target(&self) -> &FiniteSetObject {
        &self.target
    }

    pub fn matching(&self) -> &[(Label, Label)] {
        &self.matching
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn negated(mut self) -> Self {
        self.sign = -self.sign;
        self
    }

    /// Source label hit by the target label `t`.
    pub fn image_of(&self, t: Label) -> Option<Label> {
        self.target.position(t).map(|i| self.injection[i])
    }

    /// `(t, f(t))` pairs in target order.
    pub fn injection(&self) -> impl Iterator<Item = (Label, Label)> + '_ {
        self.target.labels().iter().copied().zip(self.injection.iter().copied())
    }

    /// Same underlying diagram, ignoring the sign.
    pub fn same_diagram(&self, other: &Self) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.injection == other.injection
            && self.matching == other.matching
    }

    /// `g ∘ self` for `self : S → T` and `g : T → U`.
    pub fn then(&self, g: &Self) -> Result<Self> {
        compose(self, g)
    }
}

/// `g ∘ f` for `f : S → T`, `g : T → U`.
///
/// The injection is `f ∘ g` on labels; the matching is the matching of `f`
/// together with the `f`-image of the matching of `g`.
pub fn compose(f: &BrauerMorphism, g: &BrauerMorphism) -> Result<BrauerMorphism> {
    if f.signed != g.signed {
        return Err(BrauerError::MixedSignedness);
    }
    if f.target != g.source {
        return Err(BrauerError::NotComposable {
            left: f.target.to_string(),
            right: g.source.to_string(),
        });
    }
    let fi = |t: Label| f.image_of(t).expect("composable morphisms share labels");
    let injection = g.injection.iter().map(|&t| fi(t)).collect();
    let mut matching = f.matching.clone();
    matching.extend(g.matching.iter().map(|&(a, b)| (fi(a), fi(b))));
    let mut m = BrauerMorphism {
        source: f.source.clone(),
        target: g.target.clone(),
        injection,
        matching,
        signed: f.signed,
        sign: f.sign * g.sign,
    };
    m.normalize();
    Ok(m)
}

/// `f ⊔ g : S ⊔ S' → T ⊔ T'` for label-disjoint morphisms.
pub fn disjoint_union(f: &BrauerMorphism, g: &BrauerMorphism) -> Result<BrauerMorphism> {
    if f.signed != g.signed {
        return Err(BrauerError::MixedSignedness);
    }
    if !f.source.is_disjoint(&g.source) || !f.target.is_disjoint(&g.target) {
        return Err(BrauerError::OverlappingBlocks);
    }
    let source = f.source.union(&g.source)?;
    let target = f.target.union(&g.target)?;
    let inj: Vec<(Label, Label)> = f.injection().chain(g.injection()).collect();
    let matching: Vec<(Label, Label)> = f.matching.iter().chain(g.matching.iter()).copied().collect();
    let m = BrauerMorphism::new(source, target, &inj, &matching, f.signed)?;
    Ok(if f.sign * g.sign < 0 { m.negated() } else { m })
}

/// All perfect matchings of `labels` with pairs oriented smaller-first.
pub fn perfect_matchings(labels: &[Label]) -> Vec<Vec<(Label, Label)>> {
    if labels.len() % 2 == 1 {
        return Vec::new();
    }
    let mut sorted = labels.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    matchings_rec(&sorted, &mut cur, &mut out);
    out
}

fn matchings_rec(rest: &[Label], cur: &mut Vec<(Label, Label)>, out: &mut Vec<Vec<(Label, Label)>>) {
    let Some((&a, tail)) = rest.split_first() else {
        out.push(cur.clone());
        return;
    };
    for i in 0..tail.len() {
        cur.push((a, tail[i]));
        let remaining: Vec<Label> = tail
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, l)| *l)
            .collect();
        matchings_rec(&remaining, cur, out);
        cur.pop();
    }
}

/// Ordered selections of `k` distinct elements of `from`.
fn injections(from: &[Label], k: usize) -> Vec<Vec<Label>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    let mut used = vec![false; from.len()];
    fn rec(from: &[Label], k: usize, used: &mut [bool], cur: &mut Vec<Label>, out: &mut Vec<Vec<Label>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..from.len() {
            if !used[i] {
                used[i] = true;
                cur.push(from[i]);
                rec(from, k, used, cur, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(from, k, &mut used, &mut cur, &mut out);
    out
}

/// Basis of `Hom(S, T)`: every injection `T ↪ S` with every perfect matching
/// of the complement, all with sign +1.
pub fn hom_basis(s: &FiniteSetObject, t: &FiniteSetObject, signed: bool) -> Vec<BrauerMorphism> {
    if t.len() > s.len() || (s.len() - t.len()) % 2 == 1 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for img in injections(s.labels(), t.len()) {
        let rest: Vec<Label> = s.labels().iter().copied().filter(|l| !img.contains(l)).collect();
        for m in perfect_matchings(&rest) {
            let inj: Vec<(Label, Label)> = t.labels().iter().copied().zip(img.iter().copied()).collect();
            out.push(
                BrauerMorphism::new(s.clone(), t.clone(), &inj, &m, signed).expect("enumerated morphisms are valid"),
            );
        }
    }
    out
}

/// Morphisms `S_1 ⊔ … ⊔ S_r → S` none of whose pairs lies inside one block.
pub fn day_summands_multi(
    blocks: &[FiniteSetObject],
    s: &FiniteSetObject,
    signed: bool,
) -> Result<Vec<BrauerMorphism>> {
    let mut union = FiniteSetObject::empty();
    for b in blocks {
        if !union.is_disjoint(b) {
            return Err(BrauerError::OverlappingBlocks);
        }
        union = union.union(b)?;
    }
    let block_of = |l: Label| blocks.iter().position(|b| b.contains(l));
    Ok(hom_basis(&union, s, signed)
        .into_iter()
        .filter(|m| m.matching.iter().all(|(a, b)| block_of(*a) != block_of(*b)))
        .collect())
}

/// Summands of the Day convolution `(F ⊛ G)(S)` indexed by `S_1 ⊔ S_2 → S`.
pub fn day_summands(
    s1: &FiniteSetObject,
    s2: &FiniteSetObject,
    s: &FiniteSetObject,
    signed: bool,
) -> Result<Vec<BrauerMorphism>> {
    day_summands_multi(&[s1.clone(), s2.clone()], s, signed)
}

impl fmt::Display for BrauerMorphism {
    /// `src|tgt|inj:a->b,...|match:(a,b),...|sign:±1`, with `a` in the
    /// target and `b = f(a)` in the source.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}|inj:", self.source, self.target)?;
        for (i, (t, s)) in self.injection().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}->{s}")?;
        }
        write!(f, "|match:")?;
        for (i, (a, b)) in self.matching.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({a},{b})")?;
        }
        write!(f, "|sign:{}", if self.sign > 0 { "+1" } else { "-1" })
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> BrauerError {
        BrauerError::Parse {
            pos: self.pos,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
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

    fn label(&mut self) -> Result<Label> {
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(self.err("expected a label"));
        }
        let tok = &self.rest()[..digits];
        let v = tok
            .parse()
            .map_err(|_| self.err(format!("label `{tok}` out of range")))?;
        self.pos += digits;
        Ok(v)
    }

    fn set(&mut self) -> Result<FiniteSetObject> {
        self.expect("{")?;
        let mut labels = Vec::new();
        if !self.eat("}") {
            loop {
                labels.push(self.label()?);
                if self.eat("}") {
                    break;
                }
                self.expect(",")?;
            }
        }
        FiniteSetObject::new(labels)
    }
}

/// Parses the text form written by `Display`. `→` is accepted for `->`.
pub fn parse_morphism(text: &str, signed: bool) -> Result<BrauerMorphism> {
    let normalized = text.trim().replace('→', "->");
    let mut c = Cursor {
        text: &normalized,
        pos: 0,
    };
    let source = c.set()?;
    c.expect("|")?;
    let target = c.set()?;
    c.expect("|inj:")?;
    let mut inj = Vec::new();
    while !c.rest().starts_with('|') {
        if !inj.is_empty() {
            c.expect(",")?;
        }
        let t = c.label()?;
        c.expect("->")?;
        inj.push((t, c.label()?));
    }
    c.expect("|match:")?;
    let mut matching = Vec::new();
    while !c.rest().starts_with('|') {
        if !matching.is_empty() {
            c.expect(",")?;
        }
        c.expect("(")?;
        let a = c.label()?;
        c.expect(",")?;
        let b = c.label()?;
        c.expect(")")?;
        matching.push((a, b));
    }
    c.expect("|sign:")?;
    let negative = if c.eat("+1") {
        false
    } else if c.eat("-1") {
        true
    } else {
        return Err(c.err("sign must be +1 or -1"));
    };
    if !c.rest().is_empty() {
        return Err(c.err("trailing input"));
    }
    if negative && !signed {
        return Err(c.err("unsigned morphisms carry sign +1"));
    }
    let m = BrauerMorphism::new(source, target, &inj, &matching, signed)?;
    Ok(if negative { m.negated() } else { m })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matchings_count_is_double_factorial() {
        let counts: Vec<usize> = (0..=8)
            .step_by(2)
            .map(|n| {
                let l: Vec<Label> = (0..n as Label).collect();
                perfect_matchings(&l).len()
            })
            .collect();
        assert_eq!(counts, vec![1, 1, 3, 15, 105]);
        assert!(perfect_matchings(&[1, 2, 3]).is_empty());
    }

    #[test]
    fn display_round_trip() {
        let s = FiniteSetObject::range(4);
        for m in hom_basis(&s, &FiniteSetObject::range(2), true) {
            let text = m.to_string();
            assert_eq!(parse_morphism(&text, true).unwrap(), m);
            let neg = m.clone().negated();
            assert_eq!(parse_morphism(&neg.to_string(), true).unwrap(), neg);
        }
    }
}

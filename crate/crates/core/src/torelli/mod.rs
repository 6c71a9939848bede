//! The quadratic presentation of the Torelli Lie algebra at genus `g`, its
//! quadratic dual, the symplectic derivation Lie algebra `𝔥_{g,1}` and the
//! Johnson homomorphism.
//!
//! `W = Λ³H` with `H = H(g)` symplectic. The relation space `R ⊂ Λ²W` is
//! spanned by the IH vectors
//! `Σ κ(v₁ v₂ a_i)·κ(a_i^# v₅ v₆) − Σ κ(v₁ v₅ a_i)·κ(a_i^# v₆ v₂)` over basis
//! quadruples and the invariant `Θ = Σ κ(a_i a_j a_k)·κ(a_i^# a_j^# a_k^#)`,
//! where `Σ a_i ⊗ a_i^#` is the dual element `ω` of [`HyperbolicSpace`].
//! `Λ²W` is paired with itself through the determinant pairings induced by
//! `λ`, and the Torelli Lie algebra is `Lie(W)/(R^⊥)`.

pub mod lie;
pub mod quadratic;

use std::collections::{BTreeMap, HashMap};

use exactla::{nullspace_basis, q, rank_of_rows, Echelon, RationalSparseMatrix, SparseVec, Q};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::harrison::{ce_complex, GradedLieAlgebra, HarrisonError};
use crate::perm::permutation_sign;
use crate::realize::{realize, HyperbolicSpace, RealizeError};
use crate::repchar::{
    decompose, dominant_rep, format_decomposition, parse_expr, CharacterVector, GroupType, PartitionLabel,
    RepcharError, Weight,
};
use crate::species::Species;
use lie::{act_on_derivation, lyndon_words, necklace_count, standard_bracketing, Derivation, Tensor};
pub use quadratic::{pair_index, wedge2, DatumKind, QuadraticDatum};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorelliError {
    #[error("{op} needs g ≥ {min}, got g = {g}")]
    GenusTooSmall { op: &'static str, g: usize, min: usize },
    #[error("the declared pairing is degenerate")]
    DegeneratePairing,
    #[error("pairing entry ({0}, {1}) does not pair opposite torus weights")]
    PairingNotWeightPreserving(usize, usize),
    #[error("relation vector is not homogeneous in the torus weight")]
    NotHomogeneous,
    #[error("{what} = {value} exceeds the resource guard {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("weight {0} is outside the supported window 1..=3")]
    WeightOutOfRange(usize),
    #[error("τ does not vanish on R^⊥ ({0} relation vectors survive): pairing convention mismatch")]
    TauNotWellDefined(usize),
    #[error("integer overflow while clearing denominators")]
    Overflow,
    #[error(transparent)]
    Realize(#[from] RealizeError),
    #[error(transparent)]
    Repchar(#[from] RepcharError),
    #[error(transparent)]
    Harrison(#[from] HarrisonError),
    #[error(transparent)]
    Linear(#[from] exactla::ExactlaError),
}

pub type Result<T> = std::result::Result<T, TorelliError>;

/// Largest genus for the full weight-2 and weight-3 Johnson runs.
pub const TAU_GENUS_LIMIT: usize = 4;
/// Largest genus for weight-3 quotient dimensions.
pub const WEIGHT_THREE_GENUS_LIMIT: usize = 4;
/// Unknowns `2g·ℓ_{w+1}` allowed in [`der_omega_basis`].
pub const DERIVATION_LIMIT: usize = 20_000;

fn add(a: &[i64], b: &[i64]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn is_dominant(w: &[i64]) -> bool {
    dominant_rep(w) == w
}

/// Scales a rational vector to a primitive-free integer vector with the same span.
fn integerize(v: &SparseVec) -> Result<Vec<(usize, i64)>> {
    let lcm = v
        .iter()
        .fold(num_bigint::BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    v.iter()
        .map(|(i, c)| {
            let x = c.numer() * (&lcm / c.denom());
            x.to_i64().map(|x| (*i, x)).ok_or(TorelliError::Overflow)
        })
        .collect()
}

fn sparse_from_map<K: Into<usize> + Copy>(acc: &BTreeMap<K, i64>) -> SparseVec {
    acc.iter()
        .filter(|(_, c)| **c != 0)
        .map(|(i, c)| ((*i).into(), q(*c)))
        .collect()
}

fn derivation_vector(d: &Derivation) -> SparseVec {
    let mut coords = d.coordinates();
    coords.sort_unstable();
    coords.into_iter().map(|(i, c)| (i as usize, q(c))).collect()
}

/// Basis `h_a ∧ h_b ∧ h_c` (`a < b < c`) of `W = Λ³H`.
#[derive(Clone, Debug)]
pub struct ThreeForms {
    g: usize,
    triples: Vec<[usize; 3]>,
    index: HashMap<[usize; 3], usize>,
    weights: Vec<Weight>,
}

impl ThreeForms {
    pub fn new(space: &HyperbolicSpace) -> Self {
        let n = space.dim();
        let mut triples = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    triples.push([a, b, c]);
                }
            }
        }
        let index = triples.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let weights = triples
            .iter()
            .map(|t| {
                let mut w = vec![0; space.genus()];
                for x in t {
                    w = add(&w, &space.torus_weight(*x));
                }
                w
            })
            .collect();
        Self {
            g: space.genus(),
            triples,
            index,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triple(&self, i: usize) -> [usize; 3] {
        self.triples[i]
    }

    pub fn weight(&self, i: usize) -> &Weight {
        &self.weights[i]
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    /// `h_a ∧ h_b ∧ h_c` as `(index, sign)`; `None` on a repeated vector.
    pub fn wedge(&self, a: usize, b: usize, c: usize) -> Option<(usize, i64)> {
        if a == b || b == c || a == c {
            return None;
        }
        let mut t = [a, b, c];
        let sign = permutation_sign(&t) as i64;
        t.sort_unstable();
        Some((self.index[&t], sign))
    }

    pub fn label(&self, space: &HyperbolicSpace, i: usize) -> String {
        self.triples[i]
            .iter()
            .map(|x| space.label(*x))
            .collect::<Vec<_>>()
            .join("^")
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    /// Determinant pairing `⟨a∧b∧c, x∧y∧z⟩ = det λ(·,·)` as sparse Gram rows.
    pub fn pairing(&self, space: &HyperbolicSpace) -> Vec<Vec<(usize, i64)>> {
        let n = space.dim();
        let partner = |x: usize| (0..n).find(|y| space.form(x, *y) != 0).expect("λ is nondegenerate");
        self.triples
            .iter()
            .map(|t| {
                let mut u = [partner(t[0]), partner(t[1]), partner(t[2])];
                u.sort_unstable();
                let det: i64 = crate::perm::permutations(3)
                    .iter()
                    .map(|s| permutation_sign(s) as i64 * (0..3).map(|i| space.form(t[i], u[s[i]])).product::<i64>())
                    .sum();
                vec![(self.index[&u], det)]
            })
            .collect()
    }

    /// `X·(a∧b∧c)` for a matrix acting on `H` (column `j` = image of `h_j`).
    pub fn act(&self, x: &[Vec<i64>], i: usize) -> BTreeMap<usize, i64> {
        let t = self.triples[i];
        let mut acc = BTreeMap::new();
        for slot in 0..3 {
            for (r, row) in x.iter().enumerate() {
                let c = row[t[slot]];
                if c == 0 {
                    continue;
                }
                let mut u = t;
                u[slot] = r;
                if let Some((k, s)) = self.wedge(u[0], u[1], u[2]) {
                    *acc.entry(k).or_insert(0) += c * s;
                }
            }
        }
        acc.retain(|_, c| *c != 0);
        acc
    }

    /// Contraction `a∧b∧c ↦ λ(a,b)c − λ(a,c)b + λ(b,c)a` into `H`.
    pub fn contraction(&self, space: &HyperbolicSpace, i: usize) -> BTreeMap<usize, i64> {
        let [a, b, c] = self.triples[i];
        let mut acc = BTreeMap::new();
        for (coef, v) in [(space.form(a, b), c), (-space.form(a, c), b), (space.form(b, c), a)] {
            if coef != 0 {
                *acc.entry(v).or_insert(0) += coef;
            }
        }
        acc.retain(|_, c| *c != 0);
        acc
    }
}

/// `X` acting on `Λ²W` as a derivation, on an integer vector in pair coordinates.
fn act_on_pairs(
    forms: &ThreeForms,
    images: &[BTreeMap<usize, i64>],
    v: &[(usize, i64)],
    pairs: &dyn Fn(usize) -> (usize, usize),
) -> BTreeMap<usize, i64> {
    let n = forms.len();
    let mut acc = BTreeMap::new();
    for (idx, c) in v {
        let (a, b) = pairs(*idx);
        for (x, y) in [(a, b), (b, a)] {
            for (u, d) in &images[x] {
                // X acts on the slot holding `x`; keep the original order.
                let (l, r) = if x == a { (*u, y) } else { (y, *u) };
                if let Some((k, s)) = wedge2(n, l, r) {
                    *acc.entry(k).or_insert(0) += c * d * s;
                }
            }
        }
    }
    acc.retain(|_, c| *c != 0);
    acc
}

/// `n` random elements of `sp_{2g}(ℤ)`, `X = −Λ S` with `Λ` the Gram matrix of
/// `λ` and `S` symmetric with entries in `−2..=2`.
pub fn random_sp_elements(space: &HyperbolicSpace, count: usize, seed: u64) -> Vec<Vec<Vec<i64>>> {
    let n = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut s = vec![vec![0i64; n]; n];
            for i in 0..n {
                for j in i..n {
                    let x = rng.gen_range(-2..=2);
                    s[i][j] = x;
                    s[j][i] = x;
                }
            }
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| -(0..n).map(|k| space.form(i, k) * s[k][j]).sum::<i64>())
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// `λ(Xu, v) + λ(u, Xv) = 0` on basis vectors.
pub fn is_symplectic_derivation(space: &HyperbolicSpace, x: &[Vec<i64>]) -> bool {
    let n = space.dim();
    (0..n).all(|u| {
        (0..n).all(|v| {
            let a: i64 = (0..n).map(|i| x[i][u] * space.form(i, v)).sum();
            let b: i64 = (0..n).map(|i| x[i][v] * space.form(u, i)).sum();
            a + b == 0
        })
    })
}

/// `R = span(IH, Θ) ⊂ Λ²W` with its annihilator.
#[derive(Debug)]
pub struct TorelliPresentation {
    g: usize,
    space: HyperbolicSpace,
    forms: ThreeForms,
    relations: QuadraticDatum,
    theta: SparseVec,
    theta_independent: bool,
    perp: std::sync::OnceLock<QuadraticDatum>,
}

/// IH vectors of all basis quadruples (zero vectors dropped).
pub fn ih_vectors(space: &HyperbolicSpace, forms: &ThreeForms) -> Vec<SparseVec> {
    let n = space.dim();
    let nw = forms.len();
    let omega = space.omega_terms();
    let quads: Vec<[usize; 4]> = (0..n)
        .flat_map(|a| (0..n).flat_map(move |b| (0..n).flat_map(move |c| (0..n).map(move |d| [a, b, c, d]))))
        .collect();
    let term = |acc: &mut BTreeMap<usize, i64>, x: [usize; 2], y: [usize; 2], sign: i64| {
        for (i, j, c) in &omega {
            let (Some((p, s1)), Some((r, s2))) = (forms.wedge(x[0], x[1], *i), forms.wedge(*j, y[0], y[1])) else {
                continue;
            };
            if let Some((k, s3)) = wedge2(nw, p, r) {
                *acc.entry(k).or_insert(0) += sign * c * s1 * s2 * s3;
            }
        }
    };
    quads
        .par_iter()
        .filter_map(|[v1, v2, v5, v6]| {
            let mut acc = BTreeMap::new();
            term(&mut acc, [*v1, *v2], [*v5, *v6], 1);
            term(&mut acc, [*v1, *v5], [*v6, *v2], -1);
            let v = sparse_from_map(&acc);
            (!v.is_empty()).then_some(v)
        })
        .collect()
}

/// `Θ = Σ κ(a_i a_j a_k) ∧ κ(a_i^# a_j^# a_k^#)`.
pub fn theta_vector(space: &HyperbolicSpace, forms: &ThreeForms) -> SparseVec {
    let nw = forms.len();
    let omega = space.omega_terms();
    let mut acc = BTreeMap::new();
    for (a, a2, c1) in &omega {
        for (b, b2, c2) in &omega {
            for (c, c3, c4) in &omega {
                let (Some((p, s1)), Some((r, s2))) = (forms.wedge(*a, *b, *c), forms.wedge(*a2, *b2, *c3)) else {
                    continue;
                };
                if let Some((k, s3)) = wedge2(nw, p, r) {
                    *acc.entry(k).or_insert(0) += c1 * c2 * c4 * s1 * s2 * s3;
                }
            }
        }
    }
    sparse_from_map(&acc)
}

impl TorelliPresentation {
    /// Builds `R` from every basis quadruple and `Θ`.
    pub fn build(g: usize) -> Result<Self> {
        if g < 2 {
            return Err(TorelliError::GenusTooSmall {
                op: "build_relations",
                g,
                min: 2,
            });
        }
        let space = HyperbolicSpace::new(g, GroupType::Sp)?;
        let forms = ThreeForms::new(&space);
        let ih = ih_vectors(&space, &forms);
        let theta = theta_vector(&space, &forms);
        let pairing = forms.pairing(&space);
        let ih_datum = QuadraticDatum::new(
            DatumKind::Commutative,
            forms.weights().to_vec(),
            pairing.clone(),
            ih.iter().filter(|v| forms_pair_weight_is_zero(&forms, v)).cloned(),
        )?;
        let theta_independent = !ih_datum.contains(&theta)?;
        let relations = QuadraticDatum::new(
            DatumKind::Commutative,
            forms.weights().to_vec(),
            pairing,
            ih.into_iter().chain(std::iter::once(theta.clone())),
        )?;
        Ok(Self {
            g,
            space,
            forms,
            relations,
            theta,
            theta_independent,
            perp: std::sync::OnceLock::new(),
        })
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn space(&self) -> &HyperbolicSpace {
        &self.space
    }

    pub fn forms(&self) -> &ThreeForms {
        &self.forms
    }

    /// `(W, R)` as a commutative quadratic datum.
    pub fn relations(&self) -> &QuadraticDatum {
        &self.relations
    }

    /// `(W, R^⊥)` as a Lie quadratic datum, computed on first use.
    pub fn perp(&self) -> &QuadraticDatum {
        self.perp.get_or_init(|| self.relations.dual())
    }

    pub fn theta(&self) -> &SparseVec {
        &self.theta
    }

    /// Whether `Θ` lies outside the span of the IH vectors.
    pub fn theta_independent(&self) -> bool {
        self.theta_independent
    }

    pub fn rank(&self) -> usize {
        self.relations.relation_rank()
    }

    /// Character of `Λ²W`.
    pub fn wedge_character(&self) -> Result<CharacterVector> {
        Ok(parse_expr("wedge2(wedge3(std))")?.evaluate(self.g, GroupType::Sp)?)
    }

    /// Character of `R`, from its dominant weight blocks.
    pub fn relation_character(&self) -> Result<CharacterVector> {
        Ok(CharacterVector::from_dominant(
            self.g,
            self.relations.dominant_relation_dims(),
        )?)
    }

    /// Character of `R^⊥`, from explicit annihilators of the dominant blocks.
    pub fn perp_character(&self) -> Result<CharacterVector> {
        let dims: Vec<(Weight, i64)> = self
            .relations
            .block_weights()
            .filter(|w| is_dominant(w))
            .cloned()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|w| {
                let d = self.relations.annihilator_in(&w).len() as i64;
                (w, d)
            })
            .collect();
        Ok(CharacterVector::from_dominant(self.g, dims)?)
    }

    pub fn relation_decomposition(&self) -> Result<Vec<(PartitionLabel, i64)>> {
        Ok(decompose(&self.relation_character()?, GroupType::Sp)?)
    }

    pub fn perp_decomposition(&self) -> Result<Vec<(PartitionLabel, i64)>> {
        Ok(decompose(&self.perp_character()?, GroupType::Sp)?)
    }

    /// `(R^⊥)^⊥ = R`, every block.
    pub fn double_annihilator_holds(&self) -> bool {
        self.perp().dual().same_relations(&self.relations)
    }

    /// Number of pairs `(X, r)` (`r` in an echelon basis of `R`) with `X·r ∉ R`.
    pub fn sp_stability_defect(&self, xs: &[Vec<Vec<i64>>]) -> Result<usize> {
        let datum = &self.relations;
        let pairs = |i: usize| datum.pair(i);
        let mut defect = 0;
        for x in xs {
            let images: Vec<BTreeMap<usize, i64>> = (0..self.forms.len()).map(|i| self.forms.act(x, i)).collect();
            for w in datum.block_weights() {
                for r in datum.relations_in(w) {
                    let moved = act_on_pairs(&self.forms, &images, &integerize(&r)?, &pairs);
                    if !contains_split(datum, &moved)? {
                        defect += 1;
                    }
                }
            }
        }
        Ok(defect)
    }
}

fn forms_pair_weight_is_zero(forms: &ThreeForms, v: &SparseVec) -> bool {
    v.first().is_some_and(|(i, _)| {
        let (a, b) = pair_of(forms.len(), *i);
        add(forms.weight(a), forms.weight(b)).iter().all(|x| *x == 0)
    })
}

/// Membership of a possibly inhomogeneous vector, one weight block at a time.
fn contains_split(datum: &QuadraticDatum, v: &BTreeMap<usize, i64>) -> Result<bool> {
    let mut parts: BTreeMap<Weight, SparseVec> = BTreeMap::new();
    for (i, c) in v {
        parts.entry(datum.pair_weight(*i)).or_default().push((*i, q(*c)));
    }
    for part in parts.values() {
        if !datum.contains(part)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `build_relations(g)`.
pub fn build_relations(g: usize) -> Result<TorelliPresentation> {
    TorelliPresentation::build(g)
}

/// Quadratic dual of a datum with respect to its declared pairing.
pub fn quadratic_dual(d: &QuadraticDatum) -> QuadraticDatum {
    d.dual()
}

/// `ω = Σ [e_i, f_i]` in the tensor algebra on `H`.
pub fn omega_lie(g: usize) -> Tensor {
    let n = 2 * g;
    let mut t = Tensor::zero(2);
    for i in 0..g {
        t.add_scaled(&Tensor::letter(i).bracket(&Tensor::letter(g + i), n), 1);
    }
    t
}

/// An element of `𝔥_{g,1}`: a derivation of `Lie(H)` of weight `w` and torus weight `torus`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationElement {
    pub g: usize,
    pub w: usize,
    pub torus: Weight,
    pub derivation: Derivation,
}

impl DerivationElement {
    /// `D(ω) = 0`.
    pub fn is_symplectic(&self) -> bool {
        self.derivation.apply(&omega_lie(self.g)).is_zero()
    }
}

fn letter_weight(space: &HyperbolicSpace, word: &[usize]) -> Weight {
    word.iter()
        .fold(vec![0; space.genus()], |acc, x| add(&acc, &space.torus_weight(*x)))
}

struct DerivationBlocks {
    space: HyperbolicSpace,
    tensors: Vec<Tensor>,
    /// Unknowns `(letter, lyndon index)` grouped by torus weight.
    blocks: BTreeMap<Weight, Vec<(usize, usize)>>,
}

impl DerivationBlocks {
    fn new(g: usize, w: usize) -> Result<Self> {
        let space = HyperbolicSpace::new(g, GroupType::Sp)?;
        let n = space.dim();
        let unknowns = n as u64 * necklace_count(n, w + 1);
        if unknowns > DERIVATION_LIMIT as u64 {
            return Err(TorelliError::TooLarge {
                what: "derivation unknowns",
                value: unknowns as usize,
                limit: DERIVATION_LIMIT,
            });
        }
        let lyndon = lyndon_words(n, w + 1);
        let tensors: Vec<Tensor> = lyndon.iter().map(|l| standard_bracketing(l).tensor(n)).collect();
        let mut blocks: BTreeMap<Weight, Vec<(usize, usize)>> = BTreeMap::new();
        for x in 0..n {
            for (k, l) in lyndon.iter().enumerate() {
                blocks
                    .entry(sub(&letter_weight(&space, l), &space.torus_weight(x)))
                    .or_default()
                    .push((x, k));
            }
        }
        Ok(Self { space, tensors, blocks })
    }

    /// `D(ω)` for the derivation sending letter `x` to tensor `t`, others to 0.
    fn omega_image(&self, x: usize, t: &Tensor) -> Tensor {
        let g = self.space.genus();
        let n = self.space.dim();
        if x < g {
            t.bracket(&Tensor::letter(g + x), n)
        } else {
            Tensor::letter(x - g).bracket(t, n)
        }
    }

    fn kernel(&self, torus: &[i64]) -> Vec<SparseVec> {
        let Some(unknowns) = self.blocks.get(torus) else {
            return Vec::new();
        };
        let columns: Vec<(Vec<(u64, i64)>,)> = unknowns
            .iter()
            .map(|(x, k)| (self.omega_image(*x, &self.tensors[*k]).terms.into_iter().collect(),))
            .collect();
        let mut codes: Vec<u64> = columns.iter().flat_map(|(c,)| c.iter().map(|(w, _)| *w)).collect();
        codes.sort_unstable();
        codes.dedup();
        let cols: Vec<SparseVec> = columns
            .iter()
            .map(|(c,)| {
                let mut v: SparseVec = c
                    .iter()
                    .map(|(w, x)| (codes.binary_search(w).expect("code collected"), q(*x)))
                    .collect();
                v.sort_by_key(|(i, _)| *i);
                v
            })
            .collect();
        let m = RationalSparseMatrix::from_columns(codes.len(), &cols).expect("indices in range");
        nullspace_basis(&m)
    }

    fn nullity(&self, torus: &[i64]) -> usize {
        let Some(unknowns) = self.blocks.get(torus) else {
            return 0;
        };
        let n = unknowns.len();
        let mut codes: BTreeMap<u64, usize> = BTreeMap::new();
        let columns: Vec<Tensor> = unknowns
            .iter()
            .map(|(x, k)| self.omega_image(*x, &self.tensors[*k]))
            .collect();
        for t in &columns {
            for w in t.terms.keys() {
                let next = codes.len();
                codes.entry(*w).or_insert(next);
            }
        }
        let cols: Vec<SparseVec> = columns
            .iter()
            .map(|t| {
                let mut v: SparseVec = t.terms.iter().map(|(w, x)| (codes[w], q(*x))).collect();
                v.sort_by_key(|(i, _)| *i);
                v
            })
            .collect();
        n - rank_of_rows(&cols, codes.len())
    }

    fn element(&self, torus: &[i64], v: &SparseVec, w: usize) -> Result<DerivationElement> {
        let unknowns = &self.blocks[torus];
        let n = self.space.dim();
        let mut d = Derivation::zero(n, w);
        for (i, c) in integerize(v)? {
            let (x, k) = unknowns[i];
            d.images[x].add_scaled(&self.tensors[k], c);
        }
        Ok(DerivationElement {
            g: self.space.genus(),
            w,
            torus: torus.to_vec(),
            derivation: d,
        })
    }
}

/// Basis of the weight-`w` part of `𝔥_{g,1}`, the kernel of `D ↦ D(ω)` on
/// `H^∨ ⊗ Lie_{w+1}(H)`, block by torus weight.
pub fn der_omega_basis(g: usize, w: usize) -> Result<Vec<DerivationElement>> {
    if g == 0 {
        return Err(TorelliError::GenusTooSmall {
            op: "der_omega_basis",
            g,
            min: 1,
        });
    }
    if w == 0 {
        return Err(TorelliError::WeightOutOfRange(w));
    }
    let blocks = DerivationBlocks::new(g, w)?;
    let torus: Vec<Weight> = blocks.blocks.keys().cloned().collect();
    let kernels: Vec<(Weight, Vec<SparseVec>)> = torus
        .into_par_iter()
        .map(|t| {
            let k = blocks.kernel(&t);
            (t, k)
        })
        .collect();
    let mut out = Vec::new();
    for (t, vs) in kernels {
        for v in vs {
            out.push(blocks.element(&t, &v, w)?);
        }
    }
    Ok(out)
}

/// Character of `(𝔥_{g,1})_w` from the dominant blocks.
pub fn der_omega_character(g: usize, w: usize) -> Result<CharacterVector> {
    if g == 0 {
        return Err(TorelliError::GenusTooSmall {
            op: "der_omega_character",
            g,
            min: 1,
        });
    }
    if w == 0 {
        return Err(TorelliError::WeightOutOfRange(w));
    }
    let blocks = DerivationBlocks::new(g, w)?;
    let dominant: Vec<Weight> = blocks.blocks.keys().filter(|t| is_dominant(t)).cloned().collect();
    let dims: Vec<(Weight, i64)> = dominant
        .into_par_iter()
        .map(|t| {
            let d = blocks.nullity(&t) as i64;
            (t, d)
        })
        .collect();
    Ok(CharacterVector::from_dominant(g, dims)?)
}

/// `2g·ℓ_{w+1} − ℓ_{w+2}` with `ℓ_k = dim Lie_k(ℚ^{2g})`.
pub fn der_omega_expected_dim(g: usize, w: usize) -> i64 {
    let n = 2 * g;
    n as i64 * necklace_count(n, w + 1) as i64 - necklace_count(n, w + 2) as i64
}

/// `τ(a∧b∧c)(x) = λ(x,a)[b,c] + λ(x,b)[c,a] + λ(x,c)[a,b]`.
pub fn johnson_image(space: &HyperbolicSpace, t: [usize; 3]) -> Derivation {
    let n = space.dim();
    let [a, b, c] = t;
    let br = |u: usize, v: usize| Tensor::letter(u).bracket(&Tensor::letter(v), n);
    let mut d = Derivation::zero(n, 1);
    for x in 0..n {
        for (p, (u, v)) in [(a, (b, c)), (b, (c, a)), (c, (a, b))] {
            let coef = space.form(x, p);
            if coef != 0 {
                d.images[x].add_scaled(&br(u, v), coef);
            }
        }
    }
    d
}

/// The weight-1 Johnson map on the basis of `Λ³H`.
pub fn johnson_weight1(g: usize) -> Result<Vec<Derivation>> {
    if g < 2 {
        return Err(TorelliError::GenusTooSmall {
            op: "johnson_weight1",
            g,
            min: 2,
        });
    }
    let space = HyperbolicSpace::new(g, GroupType::Sp)?;
    let forms = ThreeForms::new(&space);
    Ok((0..forms.len())
        .map(|i| johnson_image(&space, forms.triple(i)))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JohnsonWeightOneReport {
    pub g: usize,
    pub source_dim: usize,
    pub rank: usize,
    pub injective: bool,
    pub omega_annihilated: bool,
    pub samples: usize,
    pub equivariance_defect: usize,
}

/// Injectivity, `D(ω) = 0` and equivariance under `samples` random elements
/// of `sp_{2g}` drawn from `seed`.
pub fn johnson_weight1_report(g: usize, samples: usize, seed: u64) -> Result<JohnsonWeightOneReport> {
    let images = johnson_weight1(g)?;
    let space = HyperbolicSpace::new(g, GroupType::Sp)?;
    let forms = ThreeForms::new(&space);
    let omega = omega_lie(g);
    let omega_annihilated = images.iter().all(|d| d.apply(&omega).is_zero());
    let vectors: Vec<SparseVec> = images.iter().map(derivation_vector).collect();
    let ncols = 2 * g * (2 * g).pow(2);
    let rank = rank_of_rows(&vectors, ncols);
    let mut defect = 0;
    for x in random_sp_elements(&space, samples, seed) {
        debug_assert!(is_symplectic_derivation(&space, &x));
        for (i, d) in images.iter().enumerate() {
            let mut lhs = Derivation::zero(2 * g, 1);
            for (j, c) in forms.act(&x, i) {
                lhs.add_scaled(&images[j], c);
            }
            let rhs = act_on_derivation(&x, d);
            if derivation_vector(&lhs) != derivation_vector(&rhs) {
                defect += 1;
            }
        }
    }
    Ok(JohnsonWeightOneReport {
        g,
        source_dim: forms.len(),
        rank,
        injective: rank == forms.len(),
        omega_annihilated,
        samples,
        equivariance_defect: defect,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LieQuotientDims {
    pub g: usize,
    /// `dims[w-1] = dim (Lie(W)/(R^⊥))_w`.
    pub dims: Vec<i64>,
}

/// Tensor of a weight-2 Lie element `Σ c [A, B]` over the alphabet `W`.
fn pair_tensor(datum: &QuadraticDatum, v: &[(usize, i64)]) -> Tensor {
    let n = datum.generators();
    let mut t = Tensor::zero(2);
    for (i, c) in v {
        let (a, b) = datum.pair(*i);
        t.add_scaled(&Tensor::letter(a).bracket(&Tensor::letter(b), n), *c);
    }
    t
}

/// The weight-3 slice of the ideal `(R^⊥)` in torus block `nu`: brackets
/// `[y, r]` with `y ∈ W` and `r ∈ R^⊥`, as tensors over `W`.
fn ideal_slice3(p: &TorelliPresentation, nu: &[i64]) -> Result<Vec<Tensor>> {
    let perp = p.perp();
    let forms = p.forms();
    let n = forms.len();
    let mut out = Vec::new();
    for y in 0..n {
        let rest = sub(nu, forms.weight(y));
        for r in perp.relations_in(&rest) {
            let t = Tensor::letter(y).bracket(&pair_tensor(perp, &integerize(&r)?), n);
            if !t.is_zero() {
                out.push(t);
            }
        }
    }
    Ok(out)
}

/// Tensors as sparse rows over a shared compressed column index.
struct TensorRows {
    codes: BTreeMap<u64, usize>,
}

impl TensorRows {
    fn new() -> Self {
        Self { codes: BTreeMap::new() }
    }

    fn row(&mut self, t: &Tensor) -> SparseVec {
        let mut v: SparseVec = t
            .terms
            .iter()
            .map(|(w, c)| {
                let next = self.codes.len();
                (*self.codes.entry(*w).or_insert(next), q(*c))
            })
            .collect();
        v.sort_by_key(|(i, _)| *i);
        v
    }

    fn cols(&self) -> usize {
        self.codes.len()
    }
}

fn lyndon3_by_weight(forms: &ThreeForms) -> BTreeMap<Weight, Vec<Vec<usize>>> {
    let mut out: BTreeMap<Weight, Vec<Vec<usize>>> = BTreeMap::new();
    for l in lyndon_words(forms.len(), 3) {
        let w = l
            .iter()
            .fold(vec![0; forms.genus()], |acc, x| add(&acc, forms.weight(*x)));
        out.entry(w).or_default().push(l);
    }
    out
}

/// `dim (Lie(W)/(R^⊥))_w` for `w ≤ max_w ≤ 3`.
pub fn lie_quotient_dims(p: &TorelliPresentation, max_w: usize) -> Result<LieQuotientDims> {
    if !(1..=3).contains(&max_w) {
        return Err(TorelliError::WeightOutOfRange(max_w));
    }
    if max_w == 3 && p.genus() > WEIGHT_THREE_GENUS_LIMIT {
        return Err(TorelliError::TooLarge {
            what: "genus for weight 3",
            value: p.genus(),
            limit: WEIGHT_THREE_GENUS_LIMIT,
        });
    }
    let mut dims = vec![p.forms().len() as i64];
    if max_w >= 2 {
        dims.push(p.perp().weight_two_dim() as i64);
    }
    if max_w >= 3 {
        dims.push(weight_three_quotient_character(p)?.dim());
    }
    Ok(LieQuotientDims { g: p.genus(), dims })
}

/// Character of `(Lie(W)/(R^⊥))_3`, from dominant blocks.
pub fn weight_three_quotient_character(p: &TorelliPresentation) -> Result<CharacterVector> {
    let lyndon = lyndon3_by_weight(p.forms());
    let dominant: Vec<(Weight, usize)> = lyndon
        .iter()
        .filter(|(w, _)| is_dominant(w))
        .map(|(w, ls)| (w.clone(), ls.len()))
        .collect();
    let dims: Vec<(Weight, i64)> = dominant
        .into_par_iter()
        .map(|(w, count)| {
            let slice = ideal_slice3(p, &w)?;
            let mut rows = TensorRows::new();
            let vs: Vec<SparseVec> = slice.iter().map(|t| rows.row(t)).collect();
            Ok((w, (count - rank_of_rows(&vs, rows.cols())) as i64))
        })
        .collect::<Result<_>>()?;
    Ok(CharacterVector::from_dominant(p.genus(), dims)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TauWeight {
    pub w: usize,
    pub dim_t: i64,
    pub dim_h: i64,
    pub dim_ker: i64,
    pub ker_trivial: bool,
    /// `None` when centrality would need weight `w + 1` beyond the window.
    pub ker_central: Option<bool>,
    pub ker_decomposition: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TauReport {
    pub g: usize,
    pub weights: Vec<TauWeight>,
    /// Value expected only as `g → ∞`; recorded for comparison, not checked.
    pub stable_expectation: String,
}

fn kernel_entry(w: usize, dim_t: i64, dim_h: i64, ker: &CharacterVector, central: Option<bool>) -> Result<TauWeight> {
    let parts = decompose(ker, GroupType::Sp)?;
    Ok(TauWeight {
        w,
        dim_t,
        dim_h,
        dim_ker: ker.dim(),
        ker_trivial: parts.iter().all(|(l, _)| l.is_empty()),
        ker_central: central,
        ker_decomposition: format_decomposition(&parts),
    })
}

/// Matrix of `τ` on the weight-`w` quotient with a kernel report, `w ≤ max_w ≤ 3`.
///
/// Weight 2 runs on every torus block: `τ(R^⊥) = 0` is asserted, kernel
/// representatives are tested for sp-triviality directly (random `X` with
/// `X·k ∈ R^⊥`) and for centrality (`[x, k]` in the weight-3 ideal slice for
/// generators `x` of dominant weight, which reach every irreducible summand
/// of `W`). Weight 3 uses dominant blocks and characters only.
pub fn johnson_tau(p: &TorelliPresentation, max_w: usize, force: bool) -> Result<TauReport> {
    let g = p.genus();
    if !(1..=3).contains(&max_w) {
        return Err(TorelliError::WeightOutOfRange(max_w));
    }
    if max_w >= 2 && g > TAU_GENUS_LIMIT && !force {
        return Err(TorelliError::TooLarge {
            what: "genus for τ beyond weight 1",
            value: g,
            limit: TAU_GENUS_LIMIT,
        });
    }
    let space = p.space();
    let forms = p.forms();
    let tau1: Vec<Derivation> = (0..forms.len())
        .map(|i| johnson_image(space, forms.triple(i)))
        .collect();
    let mut weights = Vec::new();

    let vectors: Vec<SparseVec> = tau1.iter().map(derivation_vector).collect();
    let rank1 = rank_of_rows(&vectors, 2 * g * (2 * g).pow(2));
    let h1 = der_omega_character(g, 1)?;
    let w_char = parse_expr("wedge3(std)")?.evaluate(g, GroupType::Sp)?;
    let ker1 = if rank1 == forms.len() {
        CharacterVector::zero(g)
    } else {
        w_char.clone()
    };
    weights.push(kernel_entry(1, forms.len() as i64, h1.dim(), &ker1, Some(true))?);

    if max_w >= 2 {
        weights.push(tau_weight_two(p, &tau1)?);
    }
    if max_w >= 3 {
        weights.push(tau_weight_three(p, &tau1)?);
    }
    Ok(TauReport {
        g,
        weights,
        stable_expectation: "weight 2: kernel ≅ V_0, central (stable range only)".into(),
    })
}

fn tau_weight_two(p: &TorelliPresentation, tau1: &[Derivation]) -> Result<TauWeight> {
    let g = p.genus();
    let perp = p.perp();
    let forms = p.forms();
    let ncoords = 2 * g * (2 * g).pow(3);
    let blocks: Vec<Weight> = perp.block_weights().cloned().collect();
    struct BlockResult {
        weight: Weight,
        survivors: usize,
        kernel_reps: Vec<SparseVec>,
    }
    let results: Vec<BlockResult> = blocks
        .par_iter()
        .map(|w| {
            let basis = perp.block_basis(w);
            let columns: Vec<SparseVec> = basis
                .iter()
                .map(|i| {
                    let (a, b) = perp.pair(*i);
                    derivation_vector(&tau1[a].bracket(&tau1[b]))
                })
                .collect();
            let m = RationalSparseMatrix::from_columns(ncoords, &columns).expect("coordinates in range");
            let kernel = nullspace_basis(&m);
            let ker = Echelon::from_vectors(kernel.iter());
            let local_perp: Vec<SparseVec> = perp
                .relations_in(w)
                .iter()
                .map(|v| {
                    v.iter()
                        .map(|(i, c)| (basis.binary_search(i).expect("in block"), c.clone()))
                        .collect()
                })
                .collect();
            let survivors = local_perp.iter().filter(|v| !ker.contains(v)).count();
            let mut quotient = Echelon::from_vectors(local_perp.iter());
            let mut reps = Vec::new();
            for k in &kernel {
                if quotient.insert(k) {
                    reps.push(k.iter().map(|(i, c)| (basis[*i], c.clone())).collect());
                }
            }
            BlockResult {
                weight: w.clone(),
                survivors,
                kernel_reps: reps,
            }
        })
        .collect();
    let survivors: usize = results.iter().map(|r| r.survivors).sum();
    if survivors > 0 {
        return Err(TorelliError::TauNotWellDefined(survivors));
    }
    let ker_char = CharacterVector::from_dominant(
        g,
        results
            .iter()
            .filter(|r| is_dominant(&r.weight))
            .map(|r| (r.weight.clone(), r.kernel_reps.len() as i64)),
    )?;
    let reps: Vec<SparseVec> = results.into_iter().flat_map(|r| r.kernel_reps).collect();

    // Direct sp-triviality: X·k ∈ R^⊥ for every representative.
    let pairs = |i: usize| perp.pair(i);
    let mut trivial_direct = true;
    for x in random_sp_elements(p.space(), 5, 0x5eed) {
        let images: Vec<BTreeMap<usize, i64>> = (0..forms.len()).map(|i| forms.act(&x, i)).collect();
        for k in &reps {
            let moved = act_on_pairs(forms, &images, &integerize(k)?, &pairs);
            if !contains_split(perp, &moved)? {
                trivial_direct = false;
            }
        }
    }

    // Centrality: [x, k] lies in the weight-3 ideal slice.
    let n = forms.len();
    let mut central = true;
    let mut slices: HashMap<Weight, (TensorRows, Echelon)> = HashMap::new();
    for k in &reps {
        let kw = perp.pair_weight(k[0].0);
        let kt = pair_tensor(perp, &integerize(k)?);
        for x in (0..n).filter(|x| is_dominant(forms.weight(*x))) {
            let target = add(forms.weight(x), &kw);
            if !slices.contains_key(&target) {
                let mut rows = TensorRows::new();
                let vs: Vec<SparseVec> = ideal_slice3(p, &target)?.iter().map(|t| rows.row(t)).collect();
                let ech = Echelon::from_vectors(vs.iter());
                slices.insert(target.clone(), (rows, ech));
            }
            let (rows, ech) = slices.get_mut(&target).expect("inserted above");
            let before = rows.cols();
            let v = rows.row(&Tensor::letter(x).bracket(&kt, n));
            let outside = v.iter().any(|(i, _)| *i >= before);
            if outside || !ech.contains(&v) {
                central = false;
            }
        }
    }

    let h2 = der_omega_character(g, 2)?;
    let mut entry = kernel_entry(2, perp.weight_two_dim() as i64, h2.dim(), &ker_char, Some(central))?;
    entry.ker_trivial = entry.ker_trivial && trivial_direct;
    Ok(entry)
}

fn tau_weight_three(p: &TorelliPresentation, tau1: &[Derivation]) -> Result<TauWeight> {
    let g = p.genus();
    let lyndon = lyndon3_by_weight(p.forms());
    let ncoords = 2 * g * (2 * g).pow(4);
    let dominant: Vec<(Weight, Vec<Vec<usize>>)> = lyndon.into_iter().filter(|(w, _)| is_dominant(w)).collect();
    let per_block: Vec<(Weight, i64, i64)> = dominant
        .into_par_iter()
        .map(|(w, words)| {
            let columns: Vec<SparseVec> = words
                .iter()
                .map(|l| {
                    let d = standard_bracketing(l)
                        .fold(&|i| tau1[i].clone(), &|a: &Derivation, b: &Derivation| a.bracket(b));
                    derivation_vector(&d)
                })
                .collect();
            let rank_tau = rank_of_rows(&columns, ncoords);
            let mut rows = TensorRows::new();
            let slice: Vec<SparseVec> = ideal_slice3(p, &w)?.iter().map(|t| rows.row(t)).collect();
            let rank_ideal = rank_of_rows(&slice, rows.cols());
            let quotient = (words.len() - rank_ideal) as i64;
            let kernel = (words.len() - rank_tau) as i64 - rank_ideal as i64;
            Ok((w, quotient, kernel))
        })
        .collect::<Result<_>>()?;
    let t_char = CharacterVector::from_dominant(g, per_block.iter().map(|(w, d, _)| (w.clone(), *d)))?;
    let k_char = CharacterVector::from_dominant(g, per_block.iter().map(|(w, _, k)| (w.clone(), *k)))?;
    let h3 = der_omega_character(g, 3)?;
    kernel_entry(3, t_char.dim(), h3.dim(), &k_char, None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CeDualityReport {
    pub g: usize,
    /// `dim H_1` of the weight-≤2 truncation in weights 1 and 2.
    pub h1: [usize; 2],
    /// `dim H_2` in weight 2.
    pub h2: usize,
    /// Degree-2 cycles span exactly `R^⊥`.
    pub cycles_are_perp: bool,
    /// `ker(Λ²H¹ → H²)`, the annihilator of the cycles, equals `R`.
    pub cup_kernel_is_r: bool,
}

/// `Lie(W)/(R^⊥)` truncated above weight 2, on `W` plus a complement of
/// `R^⊥` in `Λ²W`.
pub fn truncated_quotient_lie(p: &TorelliPresentation) -> Result<GradedLieAlgebra> {
    let perp = p.perp();
    let forms = p.forms();
    let n = forms.len();
    let mut l = GradedLieAlgebra::new();
    for i in 0..n {
        l.add_generator(forms.label(p.space(), i), 1)?;
    }
    // Weight-2 generators: pairs that are not pivots of the R^⊥ echelon.
    let mut quotient_index: HashMap<usize, usize> = HashMap::new();
    let mut reducers: HashMap<Weight, (Vec<usize>, Echelon)> = HashMap::new();
    for w in perp.block_weights() {
        let basis = perp.block_basis(w).to_vec();
        let local: Vec<SparseVec> = perp
            .relations_in(w)
            .iter()
            .map(|v| {
                v.iter()
                    .map(|(i, c)| (basis.binary_search(i).expect("in block"), c.clone()))
                    .collect()
            })
            .collect();
        let ech = Echelon::from_vectors(local.iter());
        for (k, idx) in basis.iter().enumerate() {
            if !ech.is_pivot(k) {
                let (a, b) = perp.pair(*idx);
                let id = l.add_generator(format!("[{a},{b}]"), 2)?;
                quotient_index.insert(*idx, id);
            }
        }
        reducers.insert(w.clone(), (basis, ech));
    }
    for a in 0..n {
        for b in a + 1..n {
            let idx = pair_index(n, a, b);
            let (basis, ech) = &reducers[&perp.pair_weight(idx)];
            let k = basis.binary_search(&idx).expect("in block");
            let reduced = ech.reduce(&vec![(k, Q::one())]);
            let v: SparseVec = reduced
                .into_iter()
                .map(|(i, c)| (quotient_index[&basis[i]], c))
                .collect();
            let mut v = v;
            v.sort_by_key(|(i, _)| *i);
            l.set_bracket(a, b, v)?;
        }
    }
    Ok(l)
}

/// Chevalley–Eilenberg check of the duality between `Lie(W)/(R^⊥)` and
/// `Λ[W]/(R)` in weights ≤ 2.
pub fn ce_duality_check(p: &TorelliPresentation) -> Result<CeDualityReport> {
    let perp = p.perp();
    let forms = p.forms();
    let l = truncated_quotient_lie(p)?;
    let c1 = ce_complex(&l, 1)?;
    let c2 = ce_complex(&l, 2)?;
    let h1w1 = c1.homology_dims()?.total(1);
    let t2 = c2.homology_dims()?;
    let cycles: Vec<SparseVec> = c2.homology_basis(2)?;
    let cycle_datum = QuadraticDatum::new(
        DatumKind::Lie,
        forms.weights().to_vec(),
        forms.pairing(p.space()),
        split_by_weight(perp, &cycles),
    )?;
    Ok(CeDualityReport {
        g: p.genus(),
        h1: [h1w1, t2.total(1)],
        h2: t2.total(2),
        cycles_are_perp: cycle_datum.same_relations(perp),
        cup_kernel_is_r: cycle_datum.dual().same_relations(p.relations()),
    })
}

fn split_by_weight(datum: &QuadraticDatum, vs: &[SparseVec]) -> Vec<SparseVec> {
    let mut out = Vec::new();
    for v in vs {
        let mut parts: BTreeMap<Weight, SparseVec> = BTreeMap::new();
        for (i, c) in v {
            parts.entry(datum.pair_weight(*i)).or_default().push((*i, c.clone()));
        }
        out.extend(parts.into_values());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityBridge {
    pub g: usize,
    /// Realized dims of `E₁/(κ_{e²})` in weights 1 and 2.
    pub realized: [i64; 2],
    /// `dim (Lie(W)/(R^⊥))_w` in weights 1 and 2.
    pub lie: [i64; 2],
    /// `dim Λ²W`.
    pub wedge: i64,
    /// Realized weight-2 character equals `ch Λ²W − ch R`.
    pub characters_match: bool,
    /// `realized₁ = lie₁` and `realized₂ + lie₂ = dim Λ²W`.
    pub holds: bool,
}

/// Compares the realization of `E₁/(κ_{e²})` with the quadratic dual of the
/// Torelli presentation in weights ≤ 2: the realized algebra is `Λ[W]/(R)`
/// there, and `(Lie(W)/(R^⊥))_2 = Λ²W/R^⊥` has dimension `dim R`.
pub fn duality_bridge(p: &TorelliPresentation) -> Result<DualityBridge> {
    let g = p.genus();
    let sp = Species::e_mod_kappa2();
    let r1 = realize(&sp, g, 1)?;
    let r2 = realize(&sp, g, 2)?;
    let dims = lie_quotient_dims(p, 2)?;
    let wedge = p.relations().quadratic_dim() as i64;
    let expected = p.wedge_character()?.minus(&p.relation_character()?)?;
    let characters_match = r2.character()? == expected;
    let realized = [r1.dim(), r2.dim()];
    let lie = [dims.dims[0], dims.dims[1]];
    Ok(DualityBridge {
        g,
        realized,
        lie,
        wedge,
        characters_match,
        holds: realized[0] == lie[0] && realized[1] + lie[1] == wedge,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZVariantReport {
    pub g: usize,
    /// `dim W' = dim Λ³H/(H∧ω)`.
    pub generators: usize,
    /// Rank of the primitive part of `Λ³H` mapped to `W'`.
    pub primitive_rank: usize,
    pub weight_one_injective: bool,
    /// `R' = ⟨IH⟩` projected to `Λ²W'`.
    pub relations: String,
    pub relations_dim: i64,
    pub perp: String,
}

/// The IH-only presentation on `W' = Λ³H/(H∧ω) ≅ V_{1³}`, by dominant blocks.
///
/// `R'^⊥` is reported through `ch Λ²W' − ch R'`: a nondegenerate invariant
/// pairing makes the two agree, and `−1` lies in the Weyl group.
pub fn z_variant(g: usize) -> Result<ZVariantReport> {
    if g < 2 {
        return Err(TorelliError::GenusTooSmall {
            op: "z_variant",
            g,
            min: 2,
        });
    }
    let space = HyperbolicSpace::new(g, GroupType::Sp)?;
    let forms = ThreeForms::new(&space);
    let nw = forms.len();
    // Insertions h ∧ ω, ω = Σ e_i ∧ f_i.
    let insertions: Vec<SparseVec> = (0..space.dim())
        .map(|h| {
            let mut acc = BTreeMap::new();
            for i in 0..g {
                if let Some((k, s)) = forms.wedge(h, i, g + i) {
                    *acc.entry(k).or_insert(0) += s;
                }
            }
            sparse_from_map(&acc)
        })
        .collect();
    let ech = Echelon::from_vectors(insertions.iter());
    let free: Vec<usize> = (0..nw).filter(|i| !ech.is_pivot(*i)).collect();
    let position: HashMap<usize, usize> = free.iter().enumerate().map(|(k, i)| (*i, k)).collect();
    let project = |i: usize| -> Vec<(usize, Q)> {
        ech.reduce(&vec![(i, Q::one())])
            .into_iter()
            .map(|(j, c)| (position[&j], c))
            .collect()
    };
    let projections: Vec<Vec<(usize, Q)>> = (0..nw).map(project).collect();
    let np = free.len();

    // Primitive part: kernel of the contraction Λ³H → H, then projected.
    let contraction_rows: Vec<SparseVec> = {
        let mut rows: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); space.dim()];
        for i in 0..nw {
            for (h, c) in forms.contraction(&space, i) {
                *rows[h].entry(i).or_insert(0) += c;
            }
        }
        rows.iter().map(sparse_from_map).collect()
    };
    let primitive = Echelon::from_vectors(contraction_rows.iter()).kernel(nw);
    let projected: Vec<SparseVec> = primitive
        .iter()
        .map(|v| {
            let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
            for (i, c) in v {
                for (j, d) in &projections[*i] {
                    *acc.entry(*j).or_insert_with(Q::zero) += c * d;
                }
            }
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
        })
        .collect();
    let primitive_rank = rank_of_rows(&projected, np);

    // Projected IH vectors on dominant blocks.
    let weights: Vec<Weight> = free.iter().map(|i| forms.weight(*i).clone()).collect();
    let ih = ih_vectors(&space, &forms);
    let mut blocks: BTreeMap<Weight, Vec<SparseVec>> = BTreeMap::new();
    for v in &ih {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (idx, c) in v {
            let (a, b) = pair_of(nw, *idx);
            for (x, cx) in &projections[a] {
                for (y, cy) in &projections[b] {
                    if let Some((k, s)) = wedge2(np, *x, *y) {
                        *acc.entry(k).or_insert_with(Q::zero) += c * cx * cy * q(s);
                    }
                }
            }
        }
        let pv: SparseVec = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if let Some((first, _)) = pv.first() {
            let (a, b) = pair_of(np, *first);
            let w = add(&weights[a], &weights[b]);
            if is_dominant(&w) {
                blocks.entry(w).or_default().push(pv);
            }
        }
    }
    let dims: Vec<(Weight, i64)> = blocks
        .into_par_iter()
        .map(|(w, vs)| {
            let r = rank_of_rows(&vs, np * (np - 1) / 2) as i64;
            (w, r)
        })
        .collect();
    let r_char = CharacterVector::from_dominant(g, dims)?;
    let wedge = parse_expr("wedge2(V(1,1,1))")?.evaluate(g, GroupType::Sp)?;
    let perp_char = wedge.minus(&r_char)?;
    Ok(ZVariantReport {
        g,
        generators: np,
        primitive_rank,
        weight_one_injective: primitive_rank == primitive.len() && primitive.len() == np,
        relations: format_decomposition(&decompose(&r_char, GroupType::Sp)?),
        relations_dim: r_char.dim(),
        perp: format_decomposition(&decompose(&perp_char, GroupType::Sp)?),
    })
}

/// Inverse of [`pair_index`].
pub fn pair_of(n: usize, mut idx: usize) -> (usize, usize) {
    let mut a = 0;
    while idx >= n - a - 1 {
        idx -= n - a - 1;
        a += 1;
    }
    (a, a + 1 + idx)
}

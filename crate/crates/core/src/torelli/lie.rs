//! Free Lie algebras embedded in tensor algebras: Lyndon bases, standard
//! bracketings, and derivations given by their values on letters.

use std::collections::BTreeMap;

/// A homogeneous tensor of word length `len` over an alphabet of size `n`.
/// Words are encoded base `n`, most significant letter first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tensor {
    pub len: usize,
    pub terms: BTreeMap<u64, i64>,
}

impl Tensor {
    pub fn zero(len: usize) -> Self {
        Self {
            len,
            terms: BTreeMap::new(),
        }
    }

    pub fn letter(i: usize) -> Self {
        Self {
            len: 1,
            terms: BTreeMap::from([(i as u64, 1)]),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_scaled(&mut self, other: &Tensor, c: i64) {
        if c == 0 {
            return;
        }
        if self.terms.is_empty() {
            self.len = other.len;
        }
        debug_assert!(other.terms.is_empty() || other.len == self.len);
        for (w, x) in &other.terms {
            let e = self.terms.entry(*w).or_insert(0);
            *e += c * x;
            if *e == 0 {
                self.terms.remove(w);
            }
        }
    }

    pub fn scaled(&self, c: i64) -> Self {
        let mut out = Self::zero(self.len);
        out.add_scaled(self, c);
        out
    }

    /// Concatenation product.
    pub fn mul(&self, other: &Tensor, n: usize) -> Tensor {
        let shift = (n as u64).pow(other.len as u32);
        let mut out = Tensor::zero(self.len + other.len);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                *out.terms.entry(a * shift + b).or_insert(0) += x * y;
            }
        }
        out.terms.retain(|_, v| *v != 0);
        out
    }

    /// `ab − ba`.
    pub fn bracket(&self, other: &Tensor, n: usize) -> Tensor {
        let mut out = self.mul(other, n);
        out.add_scaled(&other.mul(self, n), -1);
        out.len = self.len + other.len;
        out
    }
}

/// Letters of an encoded word.
pub fn decode(mut code: u64, len: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = (code % n as u64) as usize;
        code /= n as u64;
    }
    out
}

pub fn encode(word: &[usize], n: usize) -> u64 {
    word.iter().fold(0u64, |acc, x| acc * n as u64 + *x as u64)
}

/// A word is Lyndon iff it is strictly smaller than each of its proper suffixes.
pub fn is_lyndon(w: &[usize]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &w[i..])
}

/// Lyndon words of length exactly `k` over `0..n`, in lexicographic order
/// (Duval's generation algorithm).
pub fn lyndon_words(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 || k == 0 {
        return out;
    }
    let mut w: Vec<usize> = vec![0];
    loop {
        if w.len() == k {
            out.push(w.clone());
        }
        let m = w.len();
        while w.len() < k {
            let c = w[w.len() - m];
            w.push(c);
        }
        while w.last() == Some(&(n - 1)) {
            w.pop();
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => return out,
        }
    }
}

/// Number of Lyndon words of length `k` on `n` letters, `dim Lie_k(ℚ^n)`.
pub fn necklace_count(n: usize, k: usize) -> u64 {
    let mobius = |m: usize| -> i64 {
        let mut m = m;
        let mut out = 1;
        let mut p = 2;
        while p * p <= m {
            if m % p == 0 {
                m /= p;
                if m % p == 0 {
                    return 0;
                }
                out = -out;
            }
            p += 1;
        }
        if m > 1 {
            out = -out;
        }
        out
    };
    let total: i64 = (1..=k)
        .filter(|d| k % d == 0)
        .map(|d| mobius(d) * (n as i64).pow((k / d) as u32))
        .sum();
    (total / k as i64) as u64
}

/// Bracket tree over letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bracket {
    Leaf(usize),
    Node(Box<Bracket>, Box<Bracket>),
}

impl Bracket {
    pub fn node(a: Bracket, b: Bracket) -> Self {
        Bracket::Node(Box::new(a), Box::new(b))
    }

    pub fn tensor(&self, n: usize) -> Tensor {
        match self {
            Bracket::Leaf(i) => Tensor::letter(*i),
            Bracket::Node(a, b) => a.tensor(n).bracket(&b.tensor(n), n),
        }
    }

    /// Folds the tree with a leaf map and a bracket operation.
    pub fn fold<T>(&self, leaf: &impl Fn(usize) -> T, node: &impl Fn(&T, &T) -> T) -> T {
        match self {
            Bracket::Leaf(i) => leaf(*i),
            Bracket::Node(a, b) => node(&a.fold(leaf, node), &b.fold(leaf, node)),
        }
    }
}

/// Standard bracketing of a Lyndon word: `P(w) = [P(u), P(v)]` where `v` is
/// the longest proper Lyndon suffix.
pub fn standard_bracketing(w: &[usize]) -> Bracket {
    if w.len() == 1 {
        return Bracket::Leaf(w[0]);
    }
    let split = (1..w.len())
        .find(|&i| is_lyndon(&w[i..]))
        .expect("the last letter is Lyndon");
    Bracket::node(standard_bracketing(&w[..split]), standard_bracketing(&w[split..]))
}

/// A derivation of the free Lie algebra on `n` letters, stored by its values
/// on the letters (each a tensor of length `w + 1` for a weight-`w` derivation).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub n: usize,
    pub images: Vec<Tensor>,
}

impl Derivation {
    pub fn zero(n: usize, w: usize) -> Self {
        Self {
            n,
            images: vec![Tensor::zero(w + 1); n],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Tensor::is_zero)
    }

    /// Weight: image length minus one (`None` for the zero derivation).
    pub fn weight(&self) -> Option<usize> {
        self.images.iter().find(|t| !t.is_zero()).map(|t| t.len - 1)
    }

    /// Extension to the tensor algebra as a derivation.
    pub fn apply(&self, t: &Tensor) -> Tensor {
        let n = self.n;
        let mut out = Tensor::zero(0);
        for (code, c) in &t.terms {
            let word = decode(*code, t.len, n);
            for (i, x) in word.iter().enumerate() {
                let img = &self.images[*x];
                if img.is_zero() {
                    continue;
                }
                let prefix = Tensor {
                    len: i,
                    terms: BTreeMap::from([(encode(&word[..i], n), 1)]),
                };
                let suffix = Tensor {
                    len: word.len() - i - 1,
                    terms: BTreeMap::from([(encode(&word[i + 1..], n), 1)]),
                };
                out.add_scaled(&prefix.mul(img, n).mul(&suffix, n), *c);
            }
        }
        out
    }

    /// `[D₁, D₂](x) = D₁(D₂ x) − D₂(D₁ x)`.
    pub fn bracket(&self, other: &Derivation) -> Derivation {
        let images = (0..self.n)
            .map(|x| {
                let mut t = self.apply(&other.images[x]);
                t.add_scaled(&other.apply(&self.images[x]), -1);
                t
            })
            .collect();
        Derivation { n: self.n, images }
    }

    pub fn add_scaled(&mut self, other: &Derivation, c: i64) {
        for (a, b) in self.images.iter_mut().zip(&other.images) {
            a.add_scaled(b, c);
        }
    }

    /// Flattens to coordinates `x · n^{len} + word`.
    pub fn coordinates(&self) -> Vec<(u64, i64)> {
        let mut out = Vec::new();
        for (x, t) in self.images.iter().enumerate() {
            let shift = (self.n as u64).pow(t.len as u32);
            out.extend(t.terms.iter().map(|(w, c)| (x as u64 * shift + w, *c)));
        }
        out
    }
}

/// A matrix `X` (column `j` = image of letter `j`) as a weight-0 derivation.
pub fn matrix_derivation(x: &[Vec<i64>]) -> Derivation {
    let n = x.len();
    let images = (0..n)
        .map(|j| {
            let mut img = Tensor::zero(1);
            for (i, row) in x.iter().enumerate() {
                if row[j] != 0 {
                    img.terms.insert(i as u64, row[j]);
                }
            }
            img
        })
        .collect();
    Derivation { n, images }
}

/// `X(x₁⋯x_k) = Σ x₁⋯X(x_i)⋯x_k`.
pub fn act_on_tensor(x: &[Vec<i64>], t: &Tensor) -> Tensor {
    matrix_derivation(x).apply(t)
}

/// `(X·D)(y) = X(D(y)) − D(X y)`.
pub fn act_on_derivation(x: &[Vec<i64>], d: &Derivation) -> Derivation {
    let n = d.n;
    let xd = matrix_derivation(x);
    let images = (0..n)
        .map(|j| {
            let mut out = xd.apply(&d.images[j]);
            for (i, row) in x.iter().enumerate() {
                if row[j] != 0 {
                    out.add_scaled(&d.images[i], -row[j]);
                }
            }
            out
        })
        .collect();
    Derivation { n, images }
}

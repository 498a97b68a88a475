//! Classical oracle: portraits of the finite tree automorphism groups
//! `Aut(X^[d])`, finitely constrained groups `G_P`, and exact evaluation of
//! expressions as functions on these groups via `f_{u,v}(g) = [g·v = u]`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::engine::{Element, Generator, Interpretation, Monomial};
use crate::fincon::wreath::{WreathElement, WreathMonomial, WreathSymbol};
use crate::linalg::Echelon;
use crate::lincomb::Q;
use crate::tensor::{Leg, TensorElement};
use crate::words::{Alphabet, Word};

/// Largest group enumerated exhaustively.
pub const MAX_ENUMERATION: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassicalError {
    #[error("not a permutation of 0..{k}: {images:?}")]
    NotPermutation { k: usize, images: Vec<u8> },
    #[error("word {word} longer than portrait depth {depth}")]
    TooDeep { word: Word, depth: usize },
    #[error("depth mismatch: {0} vs {1}")]
    DepthMismatch(usize, usize),
    #[error("enumeration of {0} portraits exceeds the cap of {MAX_ENUMERATION}")]
    CapExceeded(u128),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("unknown subgroup preset {0:?}")]
    UnknownPreset(String),
    #[error("portrait set is not a group")]
    NotAGroup,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<u8>);

impl std::fmt::Debug for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Permutation {
    pub fn new(images: Vec<u8>) -> Result<Self, ClassicalError> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &x in &images {
            if (x as usize) >= k || std::mem::replace(&mut seen[x as usize], true) {
                return Err(ClassicalError::NotPermutation { k, images });
            }
        }
        Ok(Permutation(images))
    }

    pub fn identity(k: usize) -> Self {
        Permutation((0..k as u8).collect())
    }

    /// The k-cycle `x ↦ x+1 mod k`.
    pub fn cycle(k: usize) -> Self {
        Permutation((0..k as u8).map(|x| (x + 1) % k as u8).collect())
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, x: u8) -> u8 {
        self.0[x as usize]
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y as usize] = x as u8;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u8 == x)
    }

    /// All permutations of `0..k` in lexicographic order of image arrays.
    pub fn all(k: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (0..k as u8).collect();
        loop {
            out.push(Permutation(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..k).rev().find(|&j| cur[j] > cur[i]).expect("exists");
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }
}

/// A subgroup of Sym(X), given by elements or by generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubgroupSpec {
    Elements(Vec<Permutation>),
    Generators(Vec<Permutation>),
}

impl SubgroupSpec {
    /// Named presets: `trivial`, `full`, `cyclic` (the k-cycle), `klein` (k=4).
    pub fn preset(name: &str, k: usize) -> Result<SubgroupSpec, ClassicalError> {
        let p = |v: &[u8]| Permutation(v.to_vec());
        match name {
            "trivial" => Ok(SubgroupSpec::Elements(vec![Permutation::identity(k)])),
            "full" => Ok(SubgroupSpec::Elements(Permutation::all(k))),
            "cyclic" => Ok(SubgroupSpec::Generators(vec![Permutation::cycle(k)])),
            "klein" if k == 4 => {
                Ok(SubgroupSpec::Elements(vec![p(&[0, 1, 2, 3]), p(&[1, 0, 3, 2]), p(&[2, 3, 0, 1]), p(&[3, 2, 1, 0])]))
            }
            _ => Err(ClassicalError::UnknownPreset(name.to_string())),
        }
    }

    /// The subgroup as a sorted element list; element lists must already be
    /// closed, generator lists are closed under composition.
    pub fn elements(&self, k: usize) -> Result<Vec<Permutation>, ClassicalError> {
        match self {
            SubgroupSpec::Elements(list) => {
                let set: BTreeSet<Permutation> = list.iter().cloned().collect();
                if set.iter().any(|p| p.k() != k) {
                    return Err(ClassicalError::NotSubgroup("wrong degree".into()));
                }
                if !set.contains(&Permutation::identity(k)) {
                    return Err(ClassicalError::NotSubgroup("missing identity".into()));
                }
                for a in &set {
                    if !set.contains(&a.inverse()) {
                        return Err(ClassicalError::NotSubgroup(format!("{a:?} has no inverse")));
                    }
                    for b in &set {
                        if !set.contains(&a.compose(b)) {
                            return Err(ClassicalError::NotSubgroup(format!("{a:?}∘{b:?} missing")));
                        }
                    }
                }
                Ok(set.into_iter().collect())
            }
            SubgroupSpec::Generators(gens) => {
                let mut set: BTreeSet<Permutation> = BTreeSet::new();
                set.insert(Permutation::identity(k));
                let mut frontier: Vec<Permutation> = vec![Permutation::identity(k)];
                while let Some(p) = frontier.pop() {
                    for g in gens {
                        if g.k() != k {
                            return Err(ClassicalError::NotSubgroup("wrong degree".into()));
                        }
                        let q = g.compose(&p);
                        if set.insert(q.clone()) {
                            frontier.push(q);
                        }
                    }
                }
                Ok(set.into_iter().collect())
            }
        }
    }
}

fn node_offset(k: usize, n: usize) -> usize {
    (k.pow(n as u32) - 1) / (k - 1)
}

/// A depth-`d` tree automorphism: a permutation label at every word of
/// length `< d`. Labels are stored flat, node-major in shortlex order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Portrait {
    k: u8,
    depth: u8,
    labels: Vec<u8>,
}

impl std::fmt::Debug for Portrait {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Portrait(k={}, d={}, {:?})", self.k, self.depth, self.labels)
    }
}

impl Portrait {
    pub fn identity(k: usize, depth: usize) -> Portrait {
        let nodes = node_offset(k, depth);
        let labels = (0..nodes).flat_map(|_| 0..k as u8).collect();
        Portrait { k: k as u8, depth: depth as u8, labels }
    }

    /// Builds a portrait from labels listed node by node in shortlex order.
    pub fn from_labels(k: usize, depth: usize, labels: &[Permutation]) -> Result<Portrait, ClassicalError> {
        if labels.len() != node_offset(k, depth) {
            return Err(ClassicalError::DepthMismatch(labels.len(), node_offset(k, depth)));
        }
        let mut flat = Vec::with_capacity(labels.len() * k);
        for p in labels {
            if p.k() != k {
                return Err(ClassicalError::NotPermutation { k, images: p.0.clone() });
            }
            flat.extend_from_slice(&p.0);
        }
        Ok(Portrait { k: k as u8, depth: depth as u8, labels: flat })
    }

    pub fn from_map(k: usize, depth: usize, map: &BTreeMap<Word, Permutation>) -> Result<Portrait, ClassicalError> {
        let alphabet = Alphabet::new(k).map_err(|_| ClassicalError::NotAGroup)?;
        let mut labels = Vec::new();
        for w in alphabet.words_up_to(depth.saturating_sub(1)) {
            if depth == 0 {
                break;
            }
            labels.push(map.get(&w).cloned().unwrap_or_else(|| Permutation::identity(k)));
        }
        Portrait::from_labels(k, depth, &labels)
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn depth(&self) -> usize {
        self.depth as usize
    }

    fn node(&self, w: Word) -> usize {
        node_offset(self.k(), w.len()) + w.index(self.k())
    }

    pub fn label(&self, w: Word) -> Permutation {
        let k = self.k();
        let i = self.node(w) * k;
        Permutation(self.labels[i..i + k].to_vec())
    }

    fn image_letter(&self, node: usize, x: u8) -> u8 {
        self.labels[node * self.k() + x as usize]
    }

    /// `g·w`: each letter is moved by the label at its (domain) prefix.
    pub fn act(&self, w: Word) -> Result<Word, ClassicalError> {
        if w.len() > self.depth() {
            return Err(ClassicalError::TooDeep { word: w, depth: self.depth() });
        }
        let mut out = Word::EMPTY;
        let mut prefix = Word::EMPTY;
        for x in w.letters() {
            out = out.push(self.image_letter(self.node(prefix), x));
            prefix = prefix.push(x);
        }
        Ok(out)
    }

    /// The restriction `g|_w`: labels `v ↦ label(wv)`.
    pub fn section(&self, w: Word) -> Result<Portrait, ClassicalError> {
        if w.len() > self.depth() {
            return Err(ClassicalError::TooDeep { word: w, depth: self.depth() });
        }
        let k = self.k();
        let depth = self.depth() - w.len();
        let alphabet = Alphabet::new(k).expect("valid k");
        let mut labels = Vec::with_capacity(node_offset(k, depth) * k);
        for n in 0..depth {
            for v in alphabet.words(n) {
                let i = self.node(w.concat(v)) * k;
                labels.extend_from_slice(&self.labels[i..i + k]);
            }
        }
        Ok(Portrait { k: self.k, depth: depth as u8, labels })
    }

    /// `compose(g, h)` acts as `w ↦ g·(h·w)`.
    pub fn compose(&self, h: &Portrait) -> Result<Portrait, ClassicalError> {
        if self.depth != h.depth || self.k != h.k {
            return Err(ClassicalError::DepthMismatch(self.depth(), h.depth()));
        }
        let k = self.k();
        let alphabet = Alphabet::new(k).expect("valid k");
        let mut labels = Vec::with_capacity(self.labels.len());
        for n in 0..self.depth() {
            for v in alphabet.words(n) {
                let hv = h.act(v)?;
                let (gn, hn) = (self.node(hv), h.node(v));
                for x in 0..k as u8 {
                    labels.push(self.image_letter(gn, h.image_letter(hn, x)));
                }
            }
        }
        Ok(Portrait { k: self.k, depth: self.depth, labels })
    }

    pub fn invert(&self) -> Portrait {
        let k = self.k();
        let mut labels = vec![0u8; self.labels.len()];
        let alphabet = Alphabet::new(k).expect("valid k");
        for n in 0..self.depth() {
            for v in alphabet.words(n) {
                let gv = self.act(v).expect("within depth");
                let (src, dst) = (self.node(v), self.node(gv));
                for x in 0..k as u8 {
                    let y = self.image_letter(src, x);
                    labels[dst * k + y as usize] = x;
                }
            }
        }
        Portrait { k: self.k, depth: self.depth, labels }
    }

    pub fn is_identity(&self) -> bool {
        *self == Portrait::identity(self.k(), self.depth())
    }

    pub fn labels_in(&self, allowed: &BTreeSet<Permutation>) -> bool {
        self.labels.chunks(self.k()).all(|c| allowed.contains(&Permutation(c.to_vec())))
    }

    /// Truncation to a smaller depth.
    pub fn truncate(&self, depth: usize) -> Portrait {
        let depth = depth.min(self.depth());
        let n = node_offset(self.k(), depth) * self.k();
        Portrait { k: self.k, depth: depth as u8, labels: self.labels[..n].to_vec() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let alphabet = Alphabet::new(self.k()).expect("valid k");
        let mut map = serde_json::Map::new();
        for w in alphabet.words_up_to(self.depth().saturating_sub(1)) {
            if self.depth() == 0 {
                break;
            }
            map.insert(w.to_string(), serde_json::json!(self.label(w).0));
        }
        serde_json::Value::Object(map)
    }

    pub fn random(k: usize, depth: usize, allowed: &[Permutation], rng: &mut impl Rng) -> Portrait {
        let nodes = node_offset(k, depth);
        let labels: Vec<Permutation> = (0..nodes).map(|_| allowed[rng.gen_range(0..allowed.len())].clone()).collect();
        Portrait::from_labels(k, depth, &labels).expect("well-formed")
    }

    /// Images of all words of each length, for fast repeated evaluation.
    pub fn action_table(&self) -> ActionTable {
        let k = self.k();
        let alphabet = Alphabet::new(k).expect("valid k");
        let levels = (0..=self.depth())
            .map(|n| {
                alphabet.words(n).into_iter().map(|w| self.act(w).expect("within depth").index(k) as u32).collect()
            })
            .collect();
        ActionTable { k, levels }
    }
}

/// `levels[n][i]` is the index of `g·w` for the `i`-th word `w` of length `n`.
#[derive(Debug, Clone)]
pub struct ActionTable {
    k: usize,
    levels: Vec<Vec<u32>>,
}

impl ActionTable {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn indicator(&self, g: Generator) -> Result<bool, ClassicalError> {
        let n = g.depth();
        if n > self.depth() {
            return Err(ClassicalError::TooDeep { word: g.col(), depth: self.depth() });
        }
        Ok(self.levels[n][g.col().index(self.k)] as usize == g.row().index(self.k))
    }

    pub fn eval_monomial(&self, m: &Monomial) -> Result<bool, ClassicalError> {
        for &g in m.factors() {
            if !self.indicator(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn eval(&self, e: &Element) -> Result<Q, ClassicalError> {
        let mut acc = Q::zero();
        for (m, c) in e.iter() {
            if self.eval_monomial(m)? {
                acc += c;
            }
        }
        Ok(acc)
    }
}

/// Enumerates portraits with every label drawn from `allowed`, in
/// lexicographic order of the label sequence.
fn enumerate_with(k: usize, depth: usize, allowed: &[Permutation]) -> Result<Vec<Portrait>, ClassicalError> {
    let nodes = node_offset(k, depth) as u32;
    let total = (allowed.len() as u128).checked_pow(nodes).unwrap_or(u128::MAX);
    if total > MAX_ENUMERATION as u128 {
        return Err(ClassicalError::CapExceeded(total));
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut digits = vec![0usize; nodes as usize];
    loop {
        let labels: Vec<Permutation> = digits.iter().map(|&i| allowed[i].clone()).collect();
        out.push(Portrait::from_labels(k, depth, &labels)?);
        let Some(pos) = (0..digits.len()).rev().find(|&i| digits[i] + 1 < allowed.len()) else {
            break;
        };
        digits[pos] += 1;
        for d in &mut digits[pos + 1..] {
            *d = 0;
        }
    }
    Ok(out)
}

/// All of `Aut(X^[d])`.
pub fn enumerate_aut(k: usize, d: usize) -> Result<Vec<Portrait>, ClassicalError> {
    enumerate_with(k, d, &Permutation::all(k))
}

/// The truncation `r_n(G_P)`: depth-`n` portraits with all labels in `P`.
pub fn enumerate_gp(p: &SubgroupSpec, k: usize, n: usize) -> Result<Vec<Portrait>, ClassicalError> {
    enumerate_with(k, n, &p.elements(k)?)
}

/// `|Aut(X^[d])| = (k!)^{(k^d−1)/(k−1)}`.
pub fn aut_order(k: usize, d: usize) -> u128 {
    let fact: u128 = (1..=k as u128).product();
    fact.pow(node_offset(k, d) as u32)
}

/// `|r_n(G_P)| = |P|^{(k^n−1)/(k−1)}`.
pub fn gp_order(p_order: usize, k: usize, n: usize) -> u128 {
    (p_order as u128).pow(node_offset(k, n) as u32)
}

pub fn indicator_eval(g: Generator, p: &Portrait) -> Result<u8, ClassicalError> {
    Ok((p.act(g.col())? == g.row()) as u8)
}

/// Evaluation into rationals at a single portrait.
pub struct PointEval<'a>(pub &'a Portrait);

impl Interpretation for PointEval<'_> {
    type Value = Q;
    fn unit(&self) -> Q {
        Q::one()
    }
    fn zero(&self) -> Q {
        Q::zero()
    }
    fn image(&self, g: Generator) -> Option<Q> {
        indicator_eval(g, self.0).ok().map(|b| Q::from_integer(b.into()))
    }
    fn add(&self, a: &Q, b: &Q) -> Q {
        a + b
    }
    fn mul(&self, a: &Q, b: &Q) -> Q {
        a * b
    }
    fn scale(&self, a: &Q, c: &Q) -> Q {
        a * c
    }
}

pub fn abelian_eval(e: &Element, p: &Portrait) -> Result<Q, ClassicalError> {
    p.action_table().eval(e)
}

/// `P[x,y](g) = [σ(y) = x]` with `σ` the root label, and
/// `N_x(m)(g) = m(g|_y)` where `g·y = x`.
pub fn wreath_eval_monomial(m: &WreathMonomial, p: &Portrait) -> Result<bool, ClassicalError> {
    if p.depth() == 0 {
        return Err(ClassicalError::TooDeep { word: Word::letter_word(0), depth: 0 });
    }
    let root = p.label(Word::EMPTY);
    let inv = root.inverse();
    for s in m.symbols() {
        let ok = match s {
            WreathSymbol::P(x, y) => root.apply(*y) == *x,
            WreathSymbol::Nu(x, base) => {
                let y = inv.apply(*x);
                p.section(Word::letter_word(y))?.action_table().eval_monomial(base)?
            }
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn wreath_eval(e: &WreathElement, p: &Portrait) -> Result<Q, ClassicalError> {
    let mut acc = Q::zero();
    for (m, c) in e.iter() {
        if wreath_eval_monomial(m, p)? {
            acc += c;
        }
    }
    Ok(acc)
}

/// A point for tensor evaluation: a group element per algebra leg, a leaf
/// word per function leg.
#[derive(Debug, Clone)]
pub enum LegPoint<'a> {
    Group(&'a Portrait, &'a ActionTable),
    Word(Word),
}

pub fn tensor_eval(t: &TensorElement, point: &[LegPoint<'_>]) -> Result<Q, ClassicalError> {
    let mut acc = Q::zero();
    'terms: for (key, c) in t.terms().iter() {
        for (leg, pt) in key.legs().iter().zip(point) {
            let ok = match (leg, pt) {
                (Leg::Tree(m), LegPoint::Group(_, table)) => table.eval_monomial(m)?,
                (Leg::Wreath(m), LegPoint::Group(p, _)) => wreath_eval_monomial(m, p)?,
                (Leg::Fun(w), LegPoint::Word(z)) => w == z,
                _ => panic!("tensor point does not match the signature"),
            };
            if !ok {
                continue 'terms;
            }
        }
        acc += c;
    }
    Ok(acc)
}

pub fn is_group(portraits: &[Portrait]) -> bool {
    let Some(first) = portraits.first() else { return false };
    let set: BTreeSet<&Portrait> = portraits.iter().collect();
    if !set.contains(&Portrait::identity(first.k(), first.depth())) {
        return false;
    }
    portraits.iter().all(|g| {
        set.contains(&g.invert()) && portraits.iter().all(|h| g.compose(h).map(|gh| set.contains(&gh)).unwrap_or(false))
    })
}

/// Indicator vectors of every generator of depth `1..=d` over `group`.
pub fn indicator_vectors(group: &[Portrait], d: usize) -> Vec<Vec<bool>> {
    let Some(first) = group.first() else { return vec![] };
    let alphabet = Alphabet::new(first.k()).expect("valid k");
    let tables: Vec<ActionTable> = group.iter().map(Portrait::action_table).collect();
    Generator::all_up_to(alphabet, d)
        .into_iter()
        .map(|g| tables.iter().map(|t| t.indicator(g).expect("within depth")).collect())
        .collect()
}

/// Rank of the span of all pointwise products of depth-`≤d` indicators on
/// `group` (the unit included).
pub fn indicator_span_rank(group: &[Portrait], d: usize) -> usize {
    let gens = indicator_vectors(group, d);
    let ones = vec![true; group.len()];
    let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
    let mut queue = vec![ones.clone()];
    seen.insert(ones);
    let mut echelon = Echelon::new();
    while let Some(v) = queue.pop() {
        let sparse = v.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| (i, Q::one())).collect();
        if !echelon.insert(sparse) {
            continue;
        }
        for g in &gens {
            let w: Vec<bool> = v.iter().zip(g).map(|(a, b)| *a && *b).collect();
            if w.iter().any(|&b| b) && seen.insert(w.clone()) {
                queue.push(w);
            }
        }
    }
    echelon.rank()
}

mod suite;

pub use suite::{verify_abelianization, verify_duality, verify_gp};

#[cfg(test)]
mod tests;

//! The free *-algebra on the projections `a[u,v]` with exact rational
//! coefficients, and the reduction engine for the quantum tree relations:
//!
//! 1. `a[e,e] = 1`,
//! 2. `a[u,v]* = a[u,v]² = a[u,v]`,
//! 3. `a[u,v] = Σ_y a[ux,vy] = Σ_z a[uz,vx]` for every letter `x`.
//!
//! Monomials are normalized locally (see [`rules`]); sums of sibling terms are
//! folded back into their parent by the collapse pass of [`crate::rewrite`].
//! The procedure is sound but incomplete: `Irreducible` only means no rule
//! applies.

pub mod rules;

use std::fmt;

use num_traits::{One, Zero};
use smallvec::SmallVec;
use thiserror::Error;

use crate::lincomb::{Basis, LinComb, Q};
use crate::rewrite::{
    self, Certificate, Collapsible, Ctx, HandleKind, ReductionBudget, ReductionOutcome, RuleCounts, Site,
};
use crate::words::{Alphabet, Word};

pub use rules::{normalize_factors, pair_rule, PairRule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("generator a[{0},{1}] has words of unequal length")]
    UnequalLengths(Word, Word),
    #[error("cannot refine to depth {target}: element has a factor of depth {depth}")]
    RefineTooShallow { target: usize, depth: usize },
    #[error("no image for generator {0}")]
    MissingImage(Generator),
}

/// The projection `a[row, col]`; depth zero is the unit.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    row: Word,
    col: Word,
}

impl Generator {
    pub const UNIT: Generator = Generator { row: Word::EMPTY, col: Word::EMPTY };

    pub fn new(row: Word, col: Word) -> Result<Generator, EngineError> {
        if row.len() != col.len() {
            return Err(EngineError::UnequalLengths(row, col));
        }
        Ok(Generator { row, col })
    }

    /// Panics on unequal lengths; for internal construction from equal-length words.
    pub fn of(row: Word, col: Word) -> Generator {
        assert_eq!(row.len(), col.len(), "unequal generator words {row},{col}");
        Generator { row, col }
    }

    pub fn row(self) -> Word {
        self.row
    }

    pub fn col(self) -> Word {
        self.col
    }

    pub fn depth(self) -> usize {
        self.row.len()
    }

    pub fn is_unit(self) -> bool {
        self.row.is_empty()
    }

    /// Drops the last letter of both words.
    pub fn parent(self) -> Generator {
        Generator { row: self.row.parent(), col: self.col.parent() }
    }

    pub fn transpose(self) -> Generator {
        Generator { row: self.col, col: self.row }
    }

    pub fn vanishes(self, ctx: &Ctx) -> bool {
        (0..self.depth()).any(|i| ctx.pair_vanishes(self.row.letter(i), self.col.letter(i)))
    }

    /// All generators of depth `n`, row-major.
    pub fn all(alphabet: Alphabet, n: usize) -> Vec<Generator> {
        let words = alphabet.words(n);
        let mut out = Vec::with_capacity(words.len() * words.len());
        for &u in &words {
            for &v in &words {
                out.push(Generator { row: u, col: v });
            }
        }
        out
    }

    /// All generators of depth `1..=d`.
    pub fn all_up_to(alphabet: Alphabet, d: usize) -> Vec<Generator> {
        (1..=d).flat_map(|n| Generator::all(alphabet, n)).collect()
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a[{},{}]", self.row, self.col)
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite product of generators; the empty product is the unit.
/// Ordered by length, then lexicographically by factors.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[Generator; 4]>);

impl Monomial {
    pub fn unit() -> Monomial {
        Monomial(SmallVec::new())
    }

    pub fn from_raw(factors: SmallVec<[Generator; 4]>) -> Monomial {
        Monomial(factors)
    }

    pub fn from_factors(factors: &[Generator]) -> Monomial {
        Monomial(factors.iter().copied().filter(|g| !g.is_unit()).collect())
    }

    pub fn generator(g: Generator) -> Monomial {
        Monomial::from_factors(&[g])
    }

    pub fn factors(&self) -> &[Generator] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn max_depth(&self) -> usize {
        self.0.iter().map(|g| g.depth()).max().unwrap_or(0)
    }

    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut f = self.0.clone();
        f.extend_from_slice(&other.0);
        Monomial(f)
    }

    pub fn reversed(&self) -> Monomial {
        Monomial(self.0.iter().rev().copied().collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Basis for Monomial {
    fn is_unit(&self) -> bool {
        self.0.is_empty()
    }
}

/// Emits both collapse handles of every factor of `factors`.
pub(crate) fn generator_sites(factors: &[Generator], mut emit: impl FnMut(usize, Generator, HandleKind, u8, u8)) {
    for (i, g) in factors.iter().enumerate() {
        if g.is_unit() {
            continue;
        }
        let parent = g.parent();
        let (r, c) = (g.row.last().unwrap(), g.col.last().unwrap());
        emit(i, parent, HandleKind::Row, r, c);
        emit(i, parent, HandleKind::Col, c, r);
    }
}

impl Collapsible for Monomial {
    fn sites(&self, _ctx: &Ctx, emit: &mut dyn FnMut(Self, Site, u8)) {
        generator_sites(&self.0, |i, parent, kind, fixed, member| {
            let mut f = self.0.clone();
            f[i] = parent;
            let site = Site { leg: 0, pos: i as u8, inner: 0, kind, fixed };
            emit(Monomial(f), site, member);
        });
    }

    fn normalize(self, ctx: &Ctx, counts: &mut RuleCounts) -> Option<Self> {
        normalize_factors(self.0, ctx, counts)
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

/// Linear combination of monomials.
pub type Element = LinComb<Monomial>;

pub fn one() -> Element {
    Element::basis(Monomial::unit())
}

pub fn scalar(c: Q) -> Element {
    Element::from_term(Monomial::unit(), c)
}

pub fn gen(g: Generator) -> Element {
    Element::basis(Monomial::generator(g))
}

/// `a[u,v]` as an element; panics on unequal lengths.
pub fn a(u: Word, v: Word) -> Element {
    gen(Generator::of(u, v))
}

pub fn from_monomial(m: Monomial) -> Element {
    Element::basis(m)
}

/// Concatenation product without reduction.
pub fn product(x: &Element, y: &Element) -> Element {
    x.bilinear(y, |m, n| Element::basis(m.concat(n)))
}

pub fn product_all<'a>(xs: impl IntoIterator<Item = &'a Element>) -> Element {
    xs.into_iter().fold(one(), |acc, x| product(&acc, x))
}

/// Product followed by reduction.
pub fn multiply(x: &Element, y: &Element, ctx: &Ctx) -> Element {
    reduce(&product(x, y), ctx, &ReductionBudget::default()).result
}

/// Reverses every monomial; generators are self-adjoint, rationals real.
pub fn adjoint(x: &Element) -> Element {
    x.iter().map(|(m, c)| (m.reversed(), c.clone())).collect()
}

pub fn max_depth(x: &Element) -> usize {
    x.iter().map(|(m, _)| m.max_depth()).max().unwrap_or(0)
}

pub fn max_degree(x: &Element) -> usize {
    x.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
}

pub fn reduce(x: &Element, ctx: &Ctx, budget: &ReductionBudget) -> ReductionOutcome<Element> {
    rewrite::reduce_terms(x, ctx, budget)
}

/// Local normal form of each monomial, no collapsing.
pub fn normalize(x: &Element, ctx: &Ctx) -> Element {
    rewrite::normalize_terms(x, ctx)
}

/// `a[u,v]` at depth `d ≥ |u|`, as the average `k^{-(d-|u|)} Σ a[us,vt]` over
/// all suffix pairs of length `d − |u|`.
pub fn refine_generator(g: Generator, d: usize, alphabet: Alphabet) -> Element {
    let extra = d - g.depth();
    if extra == 0 {
        return gen(g);
    }
    let suffixes = alphabet.words(extra);
    let weight = Q::new(1.into(), (alphabet.count(extra) as i64).into());
    let mut out = Element::zero();
    for &s in &suffixes {
        for &t in &suffixes {
            out.add_term(Monomial::generator(Generator::of(g.row.concat(s), g.col.concat(t))), weight.clone());
        }
    }
    out
}

/// Rewrites every factor (and the unit) at depth exactly `d`.
pub fn refine(x: &Element, d: usize, alphabet: Alphabet) -> Result<Element, EngineError> {
    let depth = max_depth(x);
    if d < depth {
        return Err(EngineError::RefineTooShallow { target: d, depth });
    }
    let unit = refine_generator(Generator::UNIT, d, alphabet);
    Ok(x.flat_map(|m| {
        if m.degree() == 0 {
            return unit.clone();
        }
        m.factors().iter().map(|&g| refine_generator(g, d, alphabet)).fold(one(), |acc, e| product(&acc, &e))
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchPolicy {
    pub budget: ReductionBudget,
    /// How far beyond the element's own depth refinement may go.
    pub extra_depth: usize,
}

impl Default for SearchPolicy {
    fn default() -> Self {
        SearchPolicy { budget: ReductionBudget::default(), extra_depth: 1 }
    }
}

impl SearchPolicy {
    pub fn with_budget(max_steps: u64) -> Self {
        SearchPolicy { budget: ReductionBudget::steps(max_steps), ..Default::default() }
    }
}

/// Collapse-first reduction, then refinement to each depth from the
/// element's own depth up to the policy limit.
pub fn prove_zero(x: &Element, ctx: &Ctx, policy: &SearchPolicy) -> ReductionOutcome<Element> {
    let first = reduce(x, ctx, &policy.budget);
    if first.is_zero() {
        return first;
    }
    let mut counts = first.counts;
    let mut exhausted = first.certificate == Certificate::BudgetExhausted;
    let start = max_depth(&first.result);
    for d in start.max(1)..=start + policy.extra_depth {
        let Ok(refined) = refine(&first.result, d, ctx.alphabet) else { continue };
        let out = reduce(&refined, ctx, &policy.budget);
        counts.absorb_counts(&out.counts);
        if out.is_zero() {
            return ReductionOutcome { counts, ..out };
        }
        exhausted |= out.certificate == Certificate::BudgetExhausted;
    }
    let certificate = if exhausted { Certificate::BudgetExhausted } else { Certificate::Irreducible };
    ReductionOutcome { result: first.result, certificate, counts, trace: first.trace }
}

/// A target algebra for [`substitute`].
pub trait Interpretation {
    type Value: Clone;
    fn unit(&self) -> Self::Value;
    fn zero(&self) -> Self::Value;
    fn image(&self, g: Generator) -> Option<Self::Value>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn scale(&self, a: &Self::Value, c: &Q) -> Self::Value;
}

/// The multiplicative-linear extension of generator images.
pub fn substitute<I: Interpretation>(x: &Element, interp: &I) -> Result<I::Value, EngineError> {
    let mut acc = interp.zero();
    for (m, c) in x.iter() {
        let mut v = interp.unit();
        for &g in m.factors() {
            let img = interp.image(g).ok_or(EngineError::MissingImage(g))?;
            v = interp.mul(&v, &img);
        }
        acc = interp.add(&acc, &interp.scale(&v, c));
    }
    Ok(acc)
}

/// Substitution into the free algebra itself, via a generator map.
pub struct ElementMap<F: Fn(Generator) -> Element>(pub F);

impl<F: Fn(Generator) -> Element> Interpretation for ElementMap<F> {
    type Value = Element;
    fn unit(&self) -> Element {
        one()
    }
    fn zero(&self) -> Element {
        Element::zero()
    }
    fn image(&self, g: Generator) -> Option<Element> {
        Some((self.0)(g))
    }
    fn add(&self, a: &Element, b: &Element) -> Element {
        a.add(b)
    }
    fn mul(&self, a: &Element, b: &Element) -> Element {
        product(a, b)
    }
    fn scale(&self, a: &Element, c: &Q) -> Element {
        a.scale(c)
    }
}

/// Applies a generator map multiplicatively (no reduction).
pub fn map_generators(x: &Element, f: impl Fn(Generator) -> Element) -> Element {
    substitute(x, &ElementMap(f)).expect("element maps are total")
}

pub fn is_unit_scalar(x: &Element, c: &Q) -> bool {
    if c.is_zero() {
        return x.is_zero();
    }
    x.len() == 1 && x.coefficient(&Monomial::unit()) == *c
}

pub fn unit_coefficient(x: &Element) -> Q {
    x.coefficient(&Monomial::unit())
}

pub fn is_one(x: &Element) -> bool {
    is_unit_scalar(x, &Q::one())
}

/// Defining relations up to depth `d`, each as an element that must vanish:
/// idempotence and self-adjointness of every generator, and both sum
/// relations for every parent of depth `< d`.
pub fn defining_relations(alphabet: Alphabet, d: usize) -> Vec<(String, Element)> {
    let mut out = vec![];
    out.push(("unit a[e,e]".to_string(), gen(Generator::UNIT).sub(&one())));
    for g in Generator::all_up_to(alphabet, d) {
        if g.is_unit() {
            continue;
        }
        let x = gen(g);
        out.push((format!("idempotent {g}"), product(&x, &x).sub(&x)));
        out.push((format!("self-adjoint {g}"), adjoint(&x).sub(&x)));
    }
    for n in 0..d {
        for g in Generator::all(alphabet, n) {
            for x in alphabet.letters() {
                let mut row = gen(g);
                let mut col = gen(g);
                for y in alphabet.letters() {
                    row = row.sub(&gen(Generator::of(g.row().push(x), g.col().push(y))));
                    col = col.sub(&gen(Generator::of(g.row().push(y), g.col().push(x))));
                }
                out.push((format!("row sum {g} x={x}"), row));
                out.push((format!("column sum {g} x={x}"), col));
            }
        }
    }
    out
}

/// The orthogonality and depth-one absorption families derived from the
/// sum relations, for generators of depth `1..=d`, each as a vanishing element.
pub fn absorption_relations(alphabet: Alphabet, d: usize) -> Vec<(String, Element)> {
    let mut out = vec![];
    for n in 1..=d {
        let words = alphabet.words(n);
        for &w in &words {
            for &u in &words {
                for &u2 in &words {
                    if u == u2 {
                        continue;
                    }
                    out.push((format!("column orthogonal a[{u},{w}]a[{u2},{w}]"), product(&a(u, w), &a(u2, w))));
                    out.push((format!("row orthogonal a[{w},{u}]a[{w},{u2}]"), product(&a(w, u), &a(w, u2))));
                }
            }
        }
        for g in Generator::all(alphabet, n) {
            for x in alphabet.letters() {
                for y in alphabet.letters() {
                    let p = a(Word::letter_word(x), Word::letter_word(y));
                    let (hit_row, hit_col) = (g.row().letter(0) == x, g.col().letter(0) == y);
                    let target = if hit_row && hit_col {
                        gen(g)
                    } else if hit_row != hit_col {
                        Element::zero()
                    } else {
                        continue;
                    };
                    out.push((format!("absorb left a[{x},{y}]{g}"), product(&p, &gen(g)).sub(&target)));
                    out.push((format!("absorb right {g}a[{x},{y}]"), product(&gen(g), &p).sub(&target)));
                }
            }
        }
    }
    out
}

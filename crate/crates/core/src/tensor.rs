//! Multi-leg tensors mixing algebra legs (tree algebra or wreath algebra)
//! with function legs `C(X^n)` in the minimal-projection basis `p[w]`.

use std::fmt;

use num_traits::{One, Zero};
use smallvec::SmallVec;
use thiserror::Error;

use crate::engine::{self, normalize_factors, Element, Monomial, SearchPolicy};
use crate::fincon::wreath::{normalize_symbols, WreathElement, WreathMonomial};
use crate::lincomb::{Basis, LinComb, Q};
use crate::rewrite::{self, Certificate, Collapsible, Ctx, ReductionBudget, ReductionOutcome, RuleCounts, Site};
use crate::words::{Alphabet, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error("signature mismatch: {0:?} vs {1:?}")]
    Signature(Vec<LegKind>, Vec<LegKind>),
    #[error("leg {0} out of range")]
    LegIndex(usize),
    #[error("leg kind mismatch at leg {leg}: expected {expected:?}, found {found:?}")]
    Kind { leg: usize, expected: LegKind, found: LegKind },
    #[error("invalid permutation {0:?}")]
    Permutation(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LegKind {
    Tree,
    Wreath,
    Fun(usize),
}

#[allow(clippy::large_enum_variant)]
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Leg {
    Tree(Monomial),
    Wreath(WreathMonomial),
    Fun(Word),
}

impl Leg {
    pub fn kind(&self) -> LegKind {
        match self {
            Leg::Tree(_) => LegKind::Tree,
            Leg::Wreath(_) => LegKind::Wreath,
            Leg::Fun(w) => LegKind::Fun(w.len()),
        }
    }

    pub fn unit(kind: LegKind) -> Option<Leg> {
        match kind {
            LegKind::Tree => Some(Leg::Tree(Monomial::unit())),
            LegKind::Wreath => Some(Leg::Wreath(WreathMonomial::unit())),
            LegKind::Fun(_) => None,
        }
    }

    fn adjoint(&self) -> Leg {
        match self {
            Leg::Tree(m) => Leg::Tree(m.reversed()),
            Leg::Wreath(m) => Leg::Wreath(m.adjoint()),
            Leg::Fun(w) => Leg::Fun(*w),
        }
    }
}

impl fmt::Display for Leg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Leg::Tree(m) => write!(f, "{m}"),
            Leg::Wreath(m) => write!(f, "{m}"),
            Leg::Fun(w) => write!(f, "p[{w}]"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TensorKey(pub SmallVec<[Leg; 3]>);

impl TensorKey {
    pub fn legs(&self) -> &[Leg] {
        &self.0
    }

    fn splice(&self, start: usize, len: usize, inner: &TensorKey) -> TensorKey {
        let mut legs: SmallVec<[Leg; 3]> = SmallVec::new();
        legs.extend(self.0[..start].iter().cloned());
        legs.extend(inner.0.iter().cloned());
        legs.extend(self.0[start + len..].iter().cloned());
        TensorKey(legs)
    }
}

impl fmt::Display for TensorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ox ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TensorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Basis for TensorKey {
    fn is_unit(&self) -> bool {
        self.0.is_empty()
    }
}

fn normalize_leg(leg: Leg, ctx: &Ctx, counts: &mut RuleCounts) -> Option<Leg> {
    match leg {
        Leg::Tree(m) => normalize_factors(m.factors().iter().copied(), ctx, counts).map(Leg::Tree),
        Leg::Wreath(m) => normalize_symbols(m.symbols().iter().cloned(), ctx, counts).map(Leg::Wreath),
        Leg::Fun(w) => Some(Leg::Fun(w)),
    }
}

impl Collapsible for TensorKey {
    fn sites(&self, ctx: &Ctx, emit: &mut dyn FnMut(Self, Site, u8)) {
        for (j, leg) in self.0.iter().enumerate() {
            let mut wrap = |inner: Leg, site: Site, member: u8| {
                let mut legs = self.0.clone();
                legs[j] = inner;
                emit(TensorKey(legs), Site { leg: j as u8, ..site }, member);
            };
            match leg {
                Leg::Tree(m) => m.sites(ctx, &mut |p, s, x| wrap(Leg::Tree(p), s, x)),
                Leg::Wreath(m) => m.sites(ctx, &mut |p, s, x| wrap(Leg::Wreath(p), s, x)),
                Leg::Fun(_) => {}
            }
        }
    }

    fn normalize(self, ctx: &Ctx, counts: &mut RuleCounts) -> Option<Self> {
        let mut legs = SmallVec::new();
        for leg in self.0 {
            legs.push(normalize_leg(leg, ctx, counts)?);
        }
        Some(TensorKey(legs))
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

/// A linear combination of leg tuples with a fixed signature. The empty
/// signature holds scalars.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorElement {
    signature: Vec<LegKind>,
    terms: LinComb<TensorKey>,
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.terms)
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.signature, self.terms)
    }
}

/// A linear map on a consecutive run of legs, given on basis tuples.
pub struct LegMap<F: Fn(&[Leg]) -> LinComb<TensorKey>> {
    pub inputs: Vec<LegKind>,
    pub outputs: Vec<LegKind>,
    pub f: F,
}

impl TensorElement {
    pub fn zero(signature: Vec<LegKind>) -> Self {
        TensorElement { signature, terms: LinComb::zero() }
    }

    pub fn from_terms(signature: Vec<LegKind>, terms: LinComb<TensorKey>) -> Self {
        debug_assert!(terms
            .iter()
            .all(|(k, _)| { k.0.len() == signature.len() && k.0.iter().zip(&signature).all(|(l, s)| l.kind() == *s) }));
        TensorElement { signature, terms }
    }

    pub fn scalar(c: Q) -> Self {
        TensorElement { signature: vec![], terms: LinComb::from_term(TensorKey::default(), c) }
    }

    pub fn from_element(e: &Element) -> Self {
        let terms = e.iter().map(|(m, c)| (key([Leg::Tree(m.clone())]), c.clone())).collect();
        TensorElement { signature: vec![LegKind::Tree], terms }
    }

    pub fn from_wreath(e: &WreathElement) -> Self {
        let terms = e.iter().map(|(m, c)| (key([Leg::Wreath(m.clone())]), c.clone())).collect();
        TensorElement { signature: vec![LegKind::Wreath], terms }
    }

    /// The minimal projection `p_w` in `C(X^{|w|})`.
    pub fn function(w: Word) -> Self {
        TensorElement { signature: vec![LegKind::Fun(w.len())], terms: LinComb::basis(key([Leg::Fun(w)])) }
    }

    /// `1_n = Σ_{|w|=n} p_w`.
    pub fn function_unit(alphabet: Alphabet, n: usize) -> Self {
        TensorElement {
            signature: vec![LegKind::Fun(n)],
            terms: alphabet.words(n).into_iter().map(|w| (key([Leg::Fun(w)]), Q::one())).collect(),
        }
    }

    /// The unit of an arbitrary signature.
    pub fn unit(signature: &[LegKind], alphabet: Alphabet) -> Self {
        signature.iter().fold(TensorElement::scalar(Q::one()), |acc, &kind| {
            let leg = match kind {
                LegKind::Fun(n) => TensorElement::function_unit(alphabet, n),
                LegKind::Tree => TensorElement::from_element(&engine::one()),
                LegKind::Wreath => TensorElement::from_wreath(&crate::fincon::wreath::wreath_one()),
            };
            tensor_product(&acc, &leg)
        })
    }

    pub fn signature(&self) -> &[LegKind] {
        &self.signature
    }

    pub fn terms(&self) -> &LinComb<TensorKey> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        self.check_same(other)?;
        Ok(TensorElement { signature: self.signature.clone(), terms: self.terms.add(&other.terms) })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.check_same(other)?;
        Ok(TensorElement { signature: self.signature.clone(), terms: self.terms.sub(&other.terms) })
    }

    pub fn scale(&self, c: &Q) -> Self {
        TensorElement { signature: self.signature.clone(), terms: self.terms.scale(c) }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, c: &Q) -> Result<(), TensorError> {
        self.check_same(other)?;
        self.terms.add_scaled(&other.terms, c);
        Ok(())
    }

    fn check_same(&self, other: &Self) -> Result<(), TensorError> {
        if self.signature != other.signature {
            return Err(TensorError::Signature(self.signature.clone(), other.signature.clone()));
        }
        Ok(())
    }

    /// Single tree leg back to an element.
    pub fn to_element(&self) -> Option<Element> {
        match self.signature.as_slice() {
            [LegKind::Tree] => Some(
                self.terms
                    .iter()
                    .map(|(k, c)| match &k.0[0] {
                        Leg::Tree(m) => (m.clone(), c.clone()),
                        _ => unreachable!(),
                    })
                    .collect(),
            ),
            [] => Some(engine::scalar(self.terms.coefficient(&TensorKey::default()))),
            _ => None,
        }
    }

    pub fn to_wreath(&self) -> Option<WreathElement> {
        match self.signature.as_slice() {
            [LegKind::Wreath] => Some(
                self.terms
                    .iter()
                    .map(|(k, c)| match &k.0[0] {
                        Leg::Wreath(m) => (m.clone(), c.clone()),
                        _ => unreachable!(),
                    })
                    .collect(),
            ),
            _ => None,
        }
    }

    pub fn adjoint(&self) -> Self {
        TensorElement {
            signature: self.signature.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (TensorKey(k.0.iter().map(Leg::adjoint).collect()), c.clone()))
                .collect(),
        }
    }

    /// Applies a leg map to legs `start..start + map.inputs.len()`.
    pub fn apply_on_legs<F: Fn(&[Leg]) -> LinComb<TensorKey>>(
        &self,
        start: usize,
        map: &LegMap<F>,
    ) -> Result<Self, TensorError> {
        let r = map.inputs.len();
        if start + r > self.signature.len() {
            return Err(TensorError::LegIndex(start + r));
        }
        for (i, expected) in map.inputs.iter().enumerate() {
            let found = self.signature[start + i];
            if found != *expected {
                return Err(TensorError::Kind { leg: start + i, expected: *expected, found });
            }
        }
        let mut signature = self.signature[..start].to_vec();
        signature.extend_from_slice(&map.outputs);
        signature.extend_from_slice(&self.signature[start + r..]);
        let mut terms = LinComb::zero();
        for (k, c) in self.terms.iter() {
            let image = (map.f)(&k.0[start..start + r]);
            for (inner, d) in image.iter() {
                terms.add_term(k.splice(start, r, inner), c * d);
            }
        }
        Ok(TensorElement { signature, terms })
    }

    /// Single-leg convenience wrapper around [`TensorElement::apply_on_legs`].
    pub fn apply_on_leg<F: Fn(&[Leg]) -> LinComb<TensorKey>>(
        &self,
        i: usize,
        map: &LegMap<F>,
    ) -> Result<Self, TensorError> {
        self.apply_on_legs(i, map)
    }

    /// Leg `j` of the result is leg `perm[j]` of `self`.
    pub fn permute_legs(&self, perm: &[usize]) -> Result<Self, TensorError> {
        let n = self.signature.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(TensorError::Permutation(perm.to_vec()));
        }
        let signature = perm.iter().map(|&p| self.signature[p]).collect();
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (TensorKey(perm.iter().map(|&p| k.0[p].clone()).collect()), c.clone()))
            .collect();
        Ok(TensorElement { signature, terms })
    }

    /// Multiplies legs `i` and `i+1` (both tree legs) into one.
    pub fn multiply_legs(&self, i: usize) -> Result<Self, TensorError> {
        let map = LegMap {
            inputs: vec![LegKind::Tree, LegKind::Tree],
            outputs: vec![LegKind::Tree],
            f: |legs: &[Leg]| match (&legs[0], &legs[1]) {
                (Leg::Tree(a), Leg::Tree(b)) => LinComb::basis(key([Leg::Tree(a.concat(b))])),
                _ => unreachable!(),
            },
        };
        self.apply_on_legs(i, &map)
    }

    /// Identifies `C(X^m) ⊗ C(X^n)` with `C(X^{m+n})` on legs `i`, `i+1`.
    pub fn merge_function_legs(&self, i: usize) -> Result<Self, TensorError> {
        let (m, n) = match (self.signature.get(i), self.signature.get(i + 1)) {
            (Some(LegKind::Fun(m)), Some(LegKind::Fun(n))) => (*m, *n),
            _ => return Err(TensorError::LegIndex(i)),
        };
        let map = LegMap {
            inputs: vec![LegKind::Fun(m), LegKind::Fun(n)],
            outputs: vec![LegKind::Fun(m + n)],
            f: |legs: &[Leg]| match (&legs[0], &legs[1]) {
                (Leg::Fun(a), Leg::Fun(b)) => LinComb::basis(key([Leg::Fun(a.concat(*b))])),
                _ => unreachable!(),
            },
        };
        self.apply_on_legs(i, &map)
    }

    pub fn max_tree_depth(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|(k, _)| k.0.iter())
            .map(|l| match l {
                Leg::Tree(m) => m.max_depth(),
                Leg::Wreath(m) => crate::fincon::wreath::wreath_depth(m),
                Leg::Fun(_) => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// Refines every tree leg, and the base monomials of every wreath leg,
    /// to depth `d` (see [`engine::refine`]).
    pub fn refine_tree_legs(&self, d: usize, alphabet: Alphabet) -> Self {
        let mut out = self.clone();
        for (i, kind) in self.signature.iter().enumerate() {
            if *kind == LegKind::Wreath {
                let map = LegMap {
                    inputs: vec![LegKind::Wreath],
                    outputs: vec![LegKind::Wreath],
                    f: |legs: &[Leg]| match &legs[0] {
                        Leg::Wreath(m) => crate::fincon::wreath::refine_wreath_monomial(m, d, alphabet)
                            .iter()
                            .map(|(m, c)| (key([Leg::Wreath(m.clone())]), c.clone()))
                            .collect(),
                        _ => unreachable!(),
                    },
                };
                out = out.apply_on_legs(i, &map).expect("kind checked");
                continue;
            }
            if *kind != LegKind::Tree {
                continue;
            }
            let map = LegMap {
                inputs: vec![LegKind::Tree],
                outputs: vec![LegKind::Tree],
                f: |legs: &[Leg]| match &legs[0] {
                    Leg::Tree(m) => {
                        let e = engine::refine(&engine::from_monomial(m.clone()), d, alphabet)
                            .expect("depth bound checked");
                        e.iter().map(|(m, c)| (key([Leg::Tree(m.clone())]), c.clone())).collect()
                    }
                    _ => unreachable!(),
                },
            };
            out = out.apply_on_legs(i, &map).expect("kind checked");
        }
        out
    }
}

pub fn key<const N: usize>(legs: [Leg; N]) -> TensorKey {
    TensorKey(legs.into_iter().collect())
}

/// Outer product; signatures concatenate.
pub fn tensor_product(x: &TensorElement, y: &TensorElement) -> TensorElement {
    let mut signature = x.signature.clone();
    signature.extend_from_slice(&y.signature);
    let terms = x.terms.bilinear(&y.terms, |a, b| {
        let mut legs = a.0.clone();
        legs.extend(b.0.iter().cloned());
        LinComb::basis(TensorKey(legs))
    });
    TensorElement { signature, terms }
}

pub fn tensor_all(parts: &[TensorElement]) -> TensorElement {
    parts.iter().fold(TensorElement::scalar(Q::one()), |acc, p| tensor_product(&acc, p))
}

/// Leg-wise product of two basis tuples with local normalization.
pub fn multiply_keys(a: &TensorKey, b: &TensorKey, ctx: &Ctx) -> Option<TensorKey> {
    let mut counts = RuleCounts::default();
    let mut legs = SmallVec::new();
    for (l, r) in a.0.iter().zip(&b.0) {
        let leg = match (l, r) {
            (Leg::Tree(p), Leg::Tree(q)) => {
                Leg::Tree(normalize_factors(p.factors().iter().chain(q.factors()).copied(), ctx, &mut counts)?)
            }
            (Leg::Wreath(p), Leg::Wreath(q)) => {
                Leg::Wreath(normalize_symbols(p.symbols().iter().chain(q.symbols()).cloned(), ctx, &mut counts)?)
            }
            (Leg::Fun(v), Leg::Fun(w)) => {
                if v != w {
                    return None;
                }
                Leg::Fun(*v)
            }
            _ => unreachable!("signatures checked"),
        };
        legs.push(leg);
    }
    Some(TensorKey(legs))
}

/// Leg-wise product: algebra legs concatenate (locally normalized), function
/// legs multiply as orthogonal idempotents.
pub fn multiply_pointwise(x: &TensorElement, y: &TensorElement, ctx: &Ctx) -> Result<TensorElement, TensorError> {
    if x.signature.is_empty() {
        return Ok(y.scale(&x.terms.coefficient(&TensorKey::default())));
    }
    if y.signature.is_empty() {
        return Ok(x.scale(&y.terms.coefficient(&TensorKey::default())));
    }
    x.check_same(y)?;
    let mut terms = LinComb::zero();
    for (a, c) in x.terms.iter() {
        for (b, d) in y.terms.iter() {
            if let Some(k) = multiply_keys(a, b, ctx) {
                terms.add_term(k, c * d);
            }
        }
    }
    Ok(TensorElement { signature: x.signature.clone(), terms })
}

pub fn reduce_tensor(x: &TensorElement, ctx: &Ctx, budget: &ReductionBudget) -> ReductionOutcome<TensorElement> {
    let out = rewrite::reduce_terms(&x.terms, ctx, budget);
    ReductionOutcome {
        result: TensorElement { signature: x.signature.clone(), terms: out.result },
        certificate: out.certificate,
        counts: out.counts,
        trace: out.trace,
    }
}

/// Collapse-first, then refinement of the tree legs.
pub fn prove_zero_tensor(x: &TensorElement, ctx: &Ctx, policy: &SearchPolicy) -> ReductionOutcome<TensorElement> {
    let first = reduce_tensor(x, ctx, &policy.budget);
    let refinable = first.result.signature.iter().any(|k| matches!(k, LegKind::Tree | LegKind::Wreath));
    if first.is_zero() || !refinable {
        return first;
    }
    let mut counts = first.counts;
    let mut exhausted = first.certificate == Certificate::BudgetExhausted;
    let start = first.result.max_tree_depth();
    for d in start.max(1)..=start + policy.extra_depth {
        let refined = first.result.refine_tree_legs(d, ctx.alphabet);
        let out = reduce_tensor(&refined, ctx, &policy.budget);
        counts.absorb_counts(&out.counts);
        if out.is_zero() {
            return ReductionOutcome { counts, ..out };
        }
        exhausted |= out.certificate == Certificate::BudgetExhausted;
    }
    let certificate = if exhausted { Certificate::BudgetExhausted } else { Certificate::Irreducible };
    ReductionOutcome { result: first.result, certificate, counts, trace: first.trace }
}

pub fn scalar_value(x: &TensorElement) -> Option<Q> {
    if x.signature.is_empty() {
        Some(x.terms.coefficient(&TensorKey::default()))
    } else if x.is_zero() {
        Some(Q::zero())
    } else {
        None
    }
}

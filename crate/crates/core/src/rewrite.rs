//! Shared rewriting machinery: rule counters, budgets, certificates and the
//! sum-collapse pass that folds `k` sibling terms into their parent.
//!
//! A term type opts in through [`Collapsible`]: it lists its collapse sites,
//! each giving the term with one factor replaced by the factor's parent and
//! the letter that varies across the sibling group. Terms with equal parent,
//! site and coefficient whose varying letters cover the whole alphabet are
//! replaced by the (renormalized) parent term.

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::lincomb::{LinComb, Q};
use crate::words::Alphabet;

/// Default rewrite step limit per call.
pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

/// Rule application counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RuleCounts {
    pub unit: u64,
    pub idempotent: u64,
    pub absorb: u64,
    pub orthogonal: u64,
    pub collapse: u64,
    pub commute: u64,
    pub merge: u64,
    pub vanish: u64,
}

impl RuleCounts {
    pub fn total(&self) -> u64 {
        self.unit
            + self.idempotent
            + self.absorb
            + self.orthogonal
            + self.collapse
            + self.commute
            + self.merge
            + self.vanish
    }

    pub fn absorb_counts(&mut self, other: &RuleCounts) {
        self.unit += other.unit;
        self.idempotent += other.idempotent;
        self.absorb += other.absorb;
        self.orthogonal += other.orthogonal;
        self.collapse += other.collapse;
        self.commute += other.commute;
        self.merge += other.merge;
        self.vanish += other.vanish;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Certificate {
    ProvedZero,
    Irreducible,
    BudgetExhausted,
    /// A numerical representation refuted the identity.
    FailedNumeric,
    /// A required witness was unavailable; nothing was checked.
    Unverified,
    /// Checked exactly by the classical oracle rather than the rewriter.
    Verified,
    /// The classical oracle found a counterexample.
    Refuted,
}

impl Certificate {
    pub fn is_pass(self) -> bool {
        matches!(self, Certificate::ProvedZero | Certificate::Verified)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionBudget {
    pub max_steps: u64,
    pub trace: bool,
}

impl Default for ReductionBudget {
    fn default() -> Self {
        ReductionBudget { max_steps: DEFAULT_MAX_STEPS, trace: false }
    }
}

impl ReductionBudget {
    pub fn steps(max_steps: u64) -> Self {
        ReductionBudget { max_steps, trace: false }
    }
}

#[derive(Debug, Clone)]
pub struct ReductionOutcome<E> {
    pub result: E,
    pub certificate: Certificate,
    pub counts: RuleCounts,
    /// Collapse steps in application order, when tracing was requested.
    pub trace: Option<Vec<String>>,
}

impl<E> ReductionOutcome<E> {
    pub fn is_zero(&self) -> bool {
        self.certificate == Certificate::ProvedZero
    }
}

/// Rewriting context: the alphabet plus depth-1 pairs `(x, y)` whose
/// generators are killed (a generator vanishes when any of its letter
/// positions carries a vanishing pair).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ctx {
    pub alphabet: Alphabet,
    vanish: u128,
}

impl Ctx {
    pub fn new(alphabet: Alphabet) -> Self {
        Ctx { alphabet, vanish: 0 }
    }

    pub fn with_vanishing(alphabet: Alphabet, pairs: &[(u8, u8)]) -> Self {
        let mut vanish = 0u128;
        for &(x, y) in pairs {
            vanish |= 1u128 << (x as u32 * 10 + y as u32);
        }
        Ctx { alphabet, vanish }
    }

    pub fn k(&self) -> u8 {
        self.alphabet.size() as u8
    }

    pub fn has_vanishing(&self) -> bool {
        self.vanish != 0
    }

    pub fn pair_vanishes(&self, x: u8, y: u8) -> bool {
        self.vanish & (1u128 << (x as u32 * 10 + y as u32)) != 0
    }

    pub fn vanishing_pairs(&self) -> Vec<(u8, u8)> {
        let k = self.k();
        let mut out = Vec::new();
        for x in 0..k {
            for y in 0..k {
                if self.pair_vanishes(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HandleKind {
    /// Row word fixed, last column letter varies.
    Row,
    /// Column word fixed, last row letter varies.
    Col,
}

/// Where a collapse happens inside a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub leg: u8,
    pub pos: u8,
    pub inner: u8,
    pub kind: HandleKind,
    pub fixed: u8,
}

pub trait Collapsible: Clone + Ord + Hash + Eq {
    /// Calls `emit(parent_term, site, varying_letter)` for every site.
    fn sites(&self, ctx: &Ctx, emit: &mut dyn FnMut(Self, Site, u8));

    /// Local normal form; `None` means the term is zero.
    fn normalize(self, ctx: &Ctx, counts: &mut RuleCounts) -> Option<Self>;

    /// Human-readable rendering for traces.
    fn render(&self) -> String;
}

type BucketKey<T> = (T, Site, Q);

/// One collapse pass; `None` when no complete sibling group exists.
pub fn collapse_pass<T: Collapsible>(
    x: &LinComb<T>,
    ctx: &Ctx,
    counts: &mut RuleCounts,
    trace: Option<&mut Vec<String>>,
) -> Option<LinComb<T>> {
    let k = ctx.k() as usize;
    let terms: Vec<(&T, &Q)> = x.iter().collect();
    let mut buckets: HashMap<BucketKey<T>, Vec<usize>> = HashMap::new();
    for (idx, (t, c)) in terms.iter().enumerate() {
        t.sites(ctx, &mut |parent, site, _member| {
            buckets.entry((parent, site, (*c).clone())).or_default().push(idx);
        });
    }
    // siblings killed by a vanishing pair are already absent
    let live = |site: &Site| {
        (0..k as u8)
            .filter(|&m| match site.kind {
                HandleKind::Row => !ctx.pair_vanishes(site.fixed, m),
                HandleKind::Col => !ctx.pair_vanishes(m, site.fixed),
            })
            .count()
    };
    let mut complete: Vec<(BucketKey<T>, Vec<usize>)> =
        buckets.into_iter().filter(|((_, site, _), v)| v.len() == live(site)).collect();
    if complete.is_empty() {
        return None;
    }
    complete.sort_by(|a, b| a.0.cmp(&b.0));
    let mut consumed = vec![false; terms.len()];
    let mut parents = Vec::new();
    for ((parent, _site, c), members) in complete {
        if members.iter().any(|&i| consumed[i]) {
            continue;
        }
        for &i in &members {
            consumed[i] = true;
        }
        parents.push((parent, c, members));
    }
    let mut out = LinComb::zero();
    for (i, (t, c)) in terms.iter().enumerate() {
        if !consumed[i] {
            out.add_term((*t).clone(), (*c).clone());
        }
    }
    let mut trace = trace;
    for (parent, c, members) in parents {
        counts.collapse += 1;
        if let Some(log) = trace.as_deref_mut() {
            let group: Vec<String> = members.iter().map(|&i| terms[i].0.render()).collect();
            log.push(format!("collapse {} -> {}", group.join(" + "), parent.render()));
        }
        if let Some(p) = parent.normalize(ctx, counts) {
            out.add_term(p, c);
        }
    }
    Some(out)
}

/// Normalizes every term, then collapses to a fixpoint within the budget.
pub fn reduce_terms<T: Collapsible>(
    x: &LinComb<T>,
    ctx: &Ctx,
    budget: &ReductionBudget,
) -> ReductionOutcome<LinComb<T>> {
    let mut counts = RuleCounts::default();
    let mut trace = budget.trace.then(Vec::new);
    let exhausted = |result: LinComb<T>, counts: RuleCounts, trace: Option<Vec<String>>| ReductionOutcome {
        result,
        certificate: Certificate::BudgetExhausted,
        counts,
        trace,
    };
    let mut cur = LinComb::zero();
    for (t, c) in x.iter() {
        if let Some(n) = t.clone().normalize(ctx, &mut counts) {
            cur.add_term(n, c.clone());
        }
        if counts.total() > budget.max_steps {
            return exhausted(x.clone(), counts, trace);
        }
    }
    while !cur.is_zero() {
        match collapse_pass(&cur, ctx, &mut counts, trace.as_mut()) {
            None => break,
            Some(next) => cur = next,
        }
        if counts.total() > budget.max_steps {
            return exhausted(cur, counts, trace);
        }
    }
    let certificate = if cur.is_zero() { Certificate::ProvedZero } else { Certificate::Irreducible };
    ReductionOutcome { result: cur, certificate, counts, trace }
}

/// Normalizes every term without collapsing.
pub fn normalize_terms<T: Collapsible>(x: &LinComb<T>, ctx: &Ctx) -> LinComb<T> {
    let mut counts = RuleCounts::default();
    let mut out = LinComb::zero();
    for (t, c) in x.iter() {
        if let Some(n) = t.clone().normalize(ctx, &mut counts) {
            out.add_term(n, c.clone());
        }
    }
    out
}

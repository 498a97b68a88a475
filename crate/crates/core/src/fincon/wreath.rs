//! The free wreath product `A ∗_w ℙ`: words in the symbols `P[x,y]` (the
//! depth-1 magic unitary of ℙ) and `N_x(m)` (the copy `ν_x(m)` of a base
//! monomial `m` for the letter `x`).
//!
//! Normal form rules: monomials inside `N_x` are normalized by the base
//! engine; `N_x(m)·N_x(m') → N_x(m·m')`; `N_x(1) → 1`; `P[x,y]` moves left
//! past every `N_x(·)` (the defining commutation); adjacent `P`s obey the
//! magic-square rules (for two letters `P[1,y]` is rewritten to `P[0,1-y]`);
//! `P[x,y]` vanishes when `(x,y)` is a vanishing pair.

use std::fmt;

use smallvec::SmallVec;

use crate::engine::{self, generator_sites, normalize_factors, Monomial};
use crate::lincomb::{Basis, LinComb};
use crate::rewrite::{Collapsible, Ctx, HandleKind, RuleCounts, Site};
use crate::words::Alphabet;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WreathSymbol {
    P(u8, u8),
    Nu(u8, Monomial),
}

impl fmt::Display for WreathSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WreathSymbol::P(x, y) => write!(f, "P[{x},{y}]"),
            WreathSymbol::Nu(x, m) => write!(f, "N{x}({m})"),
        }
    }
}

impl fmt::Debug for WreathSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct WreathMonomial(SmallVec<[WreathSymbol; 4]>);

impl WreathMonomial {
    pub fn unit() -> Self {
        WreathMonomial(SmallVec::new())
    }

    pub fn from_symbols(symbols: impl IntoIterator<Item = WreathSymbol>) -> Self {
        WreathMonomial(symbols.into_iter().collect())
    }

    pub fn symbols(&self) -> &[WreathSymbol] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn concat(&self, other: &WreathMonomial) -> WreathMonomial {
        let mut s = self.0.clone();
        s.extend(other.0.iter().cloned());
        WreathMonomial(s)
    }

    /// The adjoint: symbols reversed, base monomials reversed inside `N`.
    pub fn adjoint(&self) -> WreathMonomial {
        WreathMonomial(
            self.0
                .iter()
                .rev()
                .map(|s| match s {
                    WreathSymbol::P(x, y) => WreathSymbol::P(*x, *y),
                    WreathSymbol::Nu(x, m) => WreathSymbol::Nu(*x, m.reversed()),
                })
                .collect(),
        )
    }
}

impl Ord for WreathMonomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl PartialOrd for WreathMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for WreathMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for WreathMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Basis for WreathMonomial {
    fn is_unit(&self) -> bool {
        self.0.is_empty()
    }
}

pub type WreathElement = LinComb<WreathMonomial>;

pub fn wreath_one() -> WreathElement {
    WreathElement::basis(WreathMonomial::unit())
}

pub fn pgen(x: u8, y: u8) -> WreathElement {
    WreathElement::basis(WreathMonomial::from_symbols([WreathSymbol::P(x, y)]))
}

/// `ν_x` applied to a base element (linear; `ν_x(1) = 1`).
pub fn nu(x: u8, e: &crate::engine::Element) -> WreathElement {
    e.iter()
        .map(|(m, c)| {
            let w = if m.degree() == 0 {
                WreathMonomial::unit()
            } else {
                WreathMonomial::from_symbols([WreathSymbol::Nu(x, m.clone())])
            };
            (w, c.clone())
        })
        .collect()
}

pub fn wreath_product(x: &WreathElement, y: &WreathElement) -> WreathElement {
    x.bilinear(y, |m, n| WreathElement::basis(m.concat(n)))
}

pub fn wreath_adjoint(x: &WreathElement) -> WreathElement {
    x.iter().map(|(m, c)| (m.adjoint(), c.clone())).collect()
}

/// Largest generator depth inside any `N` symbol.
pub fn wreath_depth(m: &WreathMonomial) -> usize {
    m.0.iter()
        .map(|s| match s {
            WreathSymbol::Nu(_, m) => m.max_depth(),
            WreathSymbol::P(..) => 0,
        })
        .max()
        .unwrap_or(0)
}

/// Rewrites every base monomial inside an `N` symbol at depth exactly `d`.
pub fn refine_wreath_monomial(m: &WreathMonomial, d: usize, alphabet: Alphabet) -> WreathElement {
    m.0.iter().fold(wreath_one(), |acc, s| {
        let image = match s {
            WreathSymbol::P(..) => WreathElement::basis(WreathMonomial::from_symbols([s.clone()])),
            WreathSymbol::Nu(x, inner) => {
                let e =
                    engine::refine(&engine::from_monomial(inner.clone()), d, alphabet).expect("depth bound checked");
                nu(*x, &e)
            }
        };
        wreath_product(&acc, &image)
    })
}

pub fn refine_wreath(e: &WreathElement, d: usize, alphabet: Alphabet) -> WreathElement {
    e.flat_map(|m| refine_wreath_monomial(m, d, alphabet))
}

type Stack = SmallVec<[WreathSymbol; 4]>;

fn push_symbol(stack: &mut Stack, s: WreathSymbol, ctx: &Ctx, counts: &mut RuleCounts) -> bool {
    match s {
        WreathSymbol::Nu(x, m) => {
            let Some(m) = normalize_factors(m.factors().iter().copied(), ctx, counts) else {
                return false;
            };
            if m.degree() == 0 {
                counts.unit += 1;
                return true;
            }
            if let Some(WreathSymbol::Nu(x2, _)) = stack.last() {
                if *x2 == x {
                    let Some(WreathSymbol::Nu(_, prev)) = stack.pop() else { unreachable!() };
                    counts.merge += 1;
                    return push_symbol(stack, WreathSymbol::Nu(x, prev.concat(&m)), ctx, counts);
                }
            }
            stack.push(WreathSymbol::Nu(x, m));
            true
        }
        WreathSymbol::P(x, y) => {
            if ctx.pair_vanishes(x, y) {
                counts.vanish += 1;
                return false;
            }
            // a 2×2 magic unitary has P[1,y] = P[0,1-y]
            let (x, y) = if ctx.k() == 2 && x == 1 { (0, 1 - y) } else { (x, y) };
            if ctx.pair_vanishes(x, y) {
                counts.vanish += 1;
                return false;
            }
            let mut j = stack.len();
            // for two letters P[0,y] = P[1,1-y] commutes with both N_0 and N_1
            while j > 0 && matches!(stack[j - 1], WreathSymbol::Nu(x2, _) if x2 == x || ctx.k() == 2) {
                j -= 1;
            }
            counts.commute += (stack.len() - j) as u64;
            if j > 0 {
                match &stack[j - 1] {
                    WreathSymbol::P(x2, y2) => {
                        let (x2, y2) = (*x2, *y2);
                        if x2 == x && y2 == y {
                            counts.idempotent += 1;
                            return true;
                        }
                        if (x2 == x) != (y2 == y) {
                            counts.orthogonal += 1;
                            return false;
                        }
                    }
                    WreathSymbol::Nu(x2, _) => {
                        // A P[x2,·] sitting left of an N_{x2} run can travel
                        // right to meet the new symbol.
                        let x2 = *x2;
                        let mut l = j - 1;
                        while l > 0 && matches!(stack[l - 1], WreathSymbol::Nu(x3, _) if x3 == x2) {
                            l -= 1;
                        }
                        if l > 0 {
                            if let WreathSymbol::P(x3, y3) = stack[l - 1] {
                                if x3 == x2 && y3 == y {
                                    counts.orthogonal += 1;
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
            stack.insert(j, WreathSymbol::P(x, y));
            true
        }
    }
}

/// Normal form of a symbol sequence, or `None` if it vanishes.
pub fn normalize_symbols(
    symbols: impl IntoIterator<Item = WreathSymbol>,
    ctx: &Ctx,
    counts: &mut RuleCounts,
) -> Option<WreathMonomial> {
    let mut stack = Stack::new();
    for s in symbols {
        if !push_symbol(&mut stack, s, ctx, counts) {
            return None;
        }
    }
    Some(WreathMonomial(stack))
}

impl Collapsible for WreathMonomial {
    fn sites(&self, _ctx: &Ctx, emit: &mut dyn FnMut(Self, Site, u8)) {
        for (i, s) in self.0.iter().enumerate() {
            match s {
                WreathSymbol::P(x, y) => {
                    let mut rest = self.0.clone();
                    rest.remove(i);
                    let row = Site { leg: 0, pos: i as u8, inner: 0, kind: HandleKind::Row, fixed: *x };
                    let col = Site { kind: HandleKind::Col, fixed: *y, ..row };
                    emit(WreathMonomial(rest.clone()), row, *y);
                    emit(WreathMonomial(rest), col, *x);
                }
                WreathSymbol::Nu(x, m) => {
                    generator_sites(m.factors(), |j, parent, kind, fixed, member| {
                        let mut f: SmallVec<[_; 4]> = m.factors().iter().copied().collect();
                        f[j] = parent;
                        let mut symbols = self.0.clone();
                        symbols[i] = WreathSymbol::Nu(*x, Monomial::from_raw(f));
                        let site = Site { leg: 0, pos: i as u8, inner: j as u8 + 1, kind, fixed };
                        emit(WreathMonomial(symbols), site, member);
                    });
                }
            }
        }
    }

    fn normalize(self, ctx: &Ctx, counts: &mut RuleCounts) -> Option<Self> {
        normalize_symbols(self.0, ctx, counts)
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

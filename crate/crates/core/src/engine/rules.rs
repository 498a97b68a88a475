//! Local monomial rewriting: unit removal, idempotency and the prefix
//! absorption/orthogonality rule.
//!
//! Prefix rule for adjacent factors `a[p,q]·a[u,v]` with `m = min(|p|,|u|)`:
//! let `i < m` be the first position where `(p_i, q_i) ≠ (u_i, v_i)`.
//!
//! * No such `i`: one generator is a prefix pair of the other, say
//!   `a[p,q]` and `a[ps,qt]`. Iterating the sum relation with the row
//!   extension fixed gives `a[p,q] = Σ_{t'} a[ps,qt']`, and equal-depth row
//!   orthogonality kills every `t' ≠ t`, so the deeper factor absorbs the
//!   shorter one on either side.
//! * Exactly one of `p_i ≠ u_i`, `q_i ≠ v_i`: absorb `a[p_{..=i}, q_{..=i}]`
//!   on the right of the first factor and `a[u_{..=i}, v_{..=i}]` on the left
//!   of the second. These two share a row or a column and differ in the other
//!   index, so the product is zero.
//! * Both differ: nothing applies.

use smallvec::SmallVec;

use super::{Generator, Monomial};
use crate::rewrite::{Ctx, RuleCounts};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairRule {
    Keep,
    Zero,
    /// `g·h = g`.
    KeepLeft,
    /// `g·h = h`.
    KeepRight,
}

pub fn pair_rule(g: Generator, h: Generator) -> PairRule {
    let (p, q) = (g.row(), g.col());
    let (u, v) = (h.row(), h.col());
    let m = p.len().min(u.len());
    let dr = p.first_difference(u, m);
    let dc = q.first_difference(v, m);
    match (dr, dc) {
        (None, None) => {
            if p.len() >= u.len() {
                PairRule::KeepLeft
            } else {
                PairRule::KeepRight
            }
        }
        (Some(i), Some(j)) if i == j => PairRule::Keep,
        _ => PairRule::Zero,
    }
}

/// Normal form of a factor sequence, or `None` if it vanishes.
pub fn normalize_factors(
    factors: impl IntoIterator<Item = Generator>,
    ctx: &Ctx,
    counts: &mut RuleCounts,
) -> Option<Monomial> {
    let mut stack: SmallVec<[Generator; 4]> = SmallVec::new();
    for g in factors {
        if g.is_unit() {
            counts.unit += 1;
            continue;
        }
        if ctx.has_vanishing() && g.vanishes(ctx) {
            counts.vanish += 1;
            return None;
        }
        loop {
            let Some(&top) = stack.last() else {
                stack.push(g);
                break;
            };
            match pair_rule(top, g) {
                PairRule::Keep => {
                    stack.push(g);
                    break;
                }
                PairRule::Zero => {
                    counts.orthogonal += 1;
                    return None;
                }
                PairRule::KeepLeft => {
                    if top == g {
                        counts.idempotent += 1;
                    } else {
                        counts.absorb += 1;
                    }
                    break;
                }
                PairRule::KeepRight => {
                    counts.absorb += 1;
                    stack.pop();
                }
            }
        }
    }
    Some(Monomial::from_raw(stack))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;

    fn g(s: &str) -> Generator {
        let (r, c) = s.split_once(',').unwrap();
        Generator::new(r.parse().unwrap(), c.parse().unwrap()).unwrap()
    }

    #[test]
    fn pair_rule_cases() {
        assert_eq!(pair_rule(g("0,1"), g("0,1")), PairRule::KeepLeft);
        assert_eq!(pair_rule(g("0,1"), g("1,1")), PairRule::Zero);
        assert_eq!(pair_rule(g("0,1"), g("01,10")), PairRule::KeepRight);
        assert_eq!(pair_rule(g("01,10"), g("0,1")), PairRule::KeepLeft);
        assert_eq!(pair_rule(g("00,00"), g("01,00")), PairRule::Zero);
        assert_eq!(pair_rule(g("0,0"), g("00,01")), PairRule::KeepRight);
        assert_eq!(pair_rule(g("0,0"), g("00,10")), PairRule::Zero);
        assert_eq!(pair_rule(g("0,0"), g("11,11")), PairRule::Keep);
        assert_eq!(pair_rule(g("01,00"), g("02,01")), PairRule::Keep);
        assert_eq!(pair_rule(g("01,00"), g("02,00")), PairRule::Zero);
    }

    #[test]
    fn stack_normalization_reprocesses_after_absorption() {
        let ctx = Ctx::new(Alphabet::new(2).unwrap());
        let mut counts = RuleCounts::default();
        // a[00,00]·a[0,0]·a[01,01]: the middle factor is absorbed, then the
        // outer pair shares row prefix 0 and column prefix 0 but differs in
        // both second letters, so it stays.
        let m = normalize_factors([g("00,00"), g("0,0"), g("01,01")], &ctx, &mut counts);
        assert_eq!(m.unwrap().factors(), &[g("00,00"), g("01,01")]);
        let m = normalize_factors([g("0,0"), g("00,01"), g("0,0")], &ctx, &mut counts);
        assert_eq!(m.unwrap().factors(), &[g("00,01")]);
    }
}

//! Hopf structure of the tree algebra: comultiplication `Δ`, counit `ε`,
//! antipode `κ`, the coactions `γ_n` on level-`n` functions and the
//! inclusions `i_{m,n}`, with the suites checking their laws.

use std::time::Instant;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::engine::{self, Element, Generator, Monomial};
use crate::lincomb::{LinComb, Q};
use crate::report::{Identity, VerificationReport, Verifier};
use crate::rewrite::Ctx;
use crate::suites::{random_monomials, RunConfig};
use crate::tensor::{key, multiply_keys, Leg, LegKind, LegMap, TensorElement, TensorError, TensorKey};
use crate::words::{Alphabet, Word};

/// `Δ(a[u,v]) = Σ_w a[u,w] ⊗ a[w,v]`.
pub fn delta_generator(g: Generator, alphabet: Alphabet) -> LinComb<TensorKey> {
    if g.is_unit() {
        return LinComb::basis(key([Leg::Tree(Monomial::unit()), Leg::Tree(Monomial::unit())]));
    }
    alphabet
        .words(g.depth())
        .into_iter()
        .map(|w| {
            let l = Monomial::generator(Generator::of(g.row(), w));
            let r = Monomial::generator(Generator::of(w, g.col()));
            (key([Leg::Tree(l), Leg::Tree(r)]), Q::one())
        })
        .collect()
}

/// Products of basis tuples with leg-wise local normalization.
pub fn multiply_combos(x: &LinComb<TensorKey>, y: &LinComb<TensorKey>, ctx: &Ctx) -> LinComb<TensorKey> {
    let mut out = LinComb::zero();
    for (a, c) in x.iter() {
        for (b, d) in y.iter() {
            if let Some(k) = multiply_keys(a, b, ctx) {
                out.add_term(k, c * d);
            }
        }
    }
    out
}

/// `Δ` of a monomial: the product of the factors' images, normalized leg-wise.
pub fn delta_monomial(m: &Monomial, ctx: &Ctx) -> LinComb<TensorKey> {
    m.factors().iter().fold(delta_generator(Generator::UNIT, ctx.alphabet), |acc, &g| {
        multiply_combos(&acc, &delta_generator(g, ctx.alphabet), ctx)
    })
}

pub fn delta(x: &Element, ctx: &Ctx) -> TensorElement {
    let terms = x.flat_map(|m| delta_monomial(m, ctx));
    TensorElement::from_terms(vec![LegKind::Tree, LegKind::Tree], terms)
}

fn tree_leg(legs: &[Leg]) -> &Monomial {
    match &legs[0] {
        Leg::Tree(m) => m,
        _ => unreachable!("leg kind checked"),
    }
}

/// `Δ` applied to tree leg `i`, which splits into legs `i`, `i+1`.
pub fn delta_on_leg(t: &TensorElement, i: usize, ctx: &Ctx) -> Result<TensorElement, TensorError> {
    let map = LegMap {
        inputs: vec![LegKind::Tree],
        outputs: vec![LegKind::Tree, LegKind::Tree],
        f: |legs: &[Leg]| delta_monomial(tree_leg(legs), ctx),
    };
    t.apply_on_legs(i, &map)
}

pub fn counit_monomial(m: &Monomial) -> Q {
    if m.factors().iter().all(|g| g.row() == g.col()) {
        Q::one()
    } else {
        Q::zero()
    }
}

/// Multiplicative-linear extension of `ε(a[u,v]) = δ_{u,v}`.
pub fn counit(x: &Element) -> Q {
    x.iter().filter(|(m, _)| !counit_monomial(m).is_zero()).map(|(_, c)| c.clone()).sum()
}

/// `ε` on tree leg `i`; the leg disappears.
pub fn counit_on_leg(t: &TensorElement, i: usize) -> Result<TensorElement, TensorError> {
    let map = LegMap {
        inputs: vec![LegKind::Tree],
        outputs: vec![],
        f: |legs: &[Leg]| LinComb::from_term(TensorKey::default(), counit_monomial(tree_leg(legs))),
    };
    t.apply_on_legs(i, &map)
}

pub fn antipode_monomial(m: &Monomial) -> Monomial {
    let f: Vec<Generator> = m.factors().iter().rev().map(|g| g.transpose()).collect();
    Monomial::from_factors(&f)
}

/// Anti-homomorphic extension of `κ(a[u,v]) = a[v,u]`.
pub fn antipode(x: &Element) -> Element {
    x.iter().map(|(m, c)| (antipode_monomial(m), c.clone())).collect()
}

pub fn antipode_on_leg(t: &TensorElement, i: usize) -> Result<TensorElement, TensorError> {
    let map = LegMap {
        inputs: vec![LegKind::Tree],
        outputs: vec![LegKind::Tree],
        f: |legs: &[Leg]| LinComb::basis(key([Leg::Tree(antipode_monomial(tree_leg(legs)))])),
    };
    t.apply_on_legs(i, &map)
}

/// `γ_n(p_w) = Σ_{w'} a[w,w'] ⊗ p_{w'}` on a single basis word.
pub fn gamma_word(w: Word, alphabet: Alphabet) -> LinComb<TensorKey> {
    alphabet
        .words(w.len())
        .into_iter()
        .map(|w2| (key([Leg::Tree(Monomial::generator(Generator::of(w, w2))), Leg::Fun(w2)]), Q::one()))
        .collect()
}

/// `γ_n` on function leg `i` (of kind `Fun(n)`), producing legs `Tree, Fun(n)`.
pub fn gamma_on_leg(t: &TensorElement, i: usize, alphabet: Alphabet) -> Result<TensorElement, TensorError> {
    let n = match t.signature().get(i) {
        Some(LegKind::Fun(n)) => *n,
        Some(&found) => return Err(TensorError::Kind { leg: i, expected: LegKind::Fun(0), found }),
        None => return Err(TensorError::LegIndex(i)),
    };
    let map = LegMap {
        inputs: vec![LegKind::Fun(n)],
        outputs: vec![LegKind::Tree, LegKind::Fun(n)],
        f: |legs: &[Leg]| match &legs[0] {
            Leg::Fun(w) => gamma_word(*w, alphabet),
            _ => unreachable!(),
        },
    };
    t.apply_on_legs(i, &map)
}

/// The coaction `γ_n : C(X^n) → A ⊗ C(X^n)`.
pub fn gamma(f: &TensorElement, alphabet: Alphabet) -> Result<TensorElement, TensorError> {
    match f.signature() {
        [LegKind::Fun(_)] => gamma_on_leg(f, 0, alphabet),
        other => Err(TensorError::Signature(other.to_vec(), vec![LegKind::Fun(0)])),
    }
}

/// `i_{m,n}(p_w) = Σ_{|w'| = n−m} p_{ww'}` on function leg `i`.
pub fn inclusion_on_leg(
    t: &TensorElement,
    i: usize,
    n: usize,
    alphabet: Alphabet,
) -> Result<TensorElement, TensorError> {
    let m = match t.signature().get(i) {
        Some(LegKind::Fun(m)) if *m <= n => *m,
        Some(&found) => return Err(TensorError::Kind { leg: i, expected: LegKind::Fun(n), found }),
        None => return Err(TensorError::LegIndex(i)),
    };
    let tails = alphabet.words(n - m);
    let map = LegMap {
        inputs: vec![LegKind::Fun(m)],
        outputs: vec![LegKind::Fun(n)],
        f: |legs: &[Leg]| match &legs[0] {
            Leg::Fun(w) => tails.iter().map(|&t| (key([Leg::Fun(w.concat(t))]), Q::one())).collect(),
            _ => unreachable!(),
        },
    };
    t.apply_on_legs(i, &map)
}

pub fn inclusion(f: &TensorElement, n: usize, alphabet: Alphabet) -> Result<TensorElement, TensorError> {
    inclusion_on_leg(f, 0, n, alphabet)
}

fn tree(x: &Element) -> TensorElement {
    TensorElement::from_element(x)
}

fn run(v: &Verifier, ids: Vec<Identity>) -> Vec<crate::report::IdentityRecord> {
    ids.par_iter().map(|id| v.check(id)).collect()
}

/// Coassociativity identities for a list of named elements.
pub fn coassociativity_identities(items: &[(String, Element)], ctx: &Ctx) -> Vec<Identity> {
    items
        .iter()
        .map(|(name, x)| {
            let d = delta(x, ctx);
            let lhs = delta_on_leg(&d, 0, ctx).expect("tree leg");
            let rhs = delta_on_leg(&d, 1, ctx).expect("tree leg");
            Identity::new(format!("coassociativity {name}"), lhs, rhs)
                .formulas(format!("(Δ⊗id)Δ({name})"), format!("(id⊗Δ)Δ({name})"))
        })
        .collect()
}

/// `Σ_w a[u,w]a[v,w] = δ_{u,v}` and `Σ_w a[w,u]a[w,v] = δ_{u,v}` for `|u| = |v| = n`.
pub fn unitarity_identities(alphabet: Alphabet, n: usize) -> Vec<Identity> {
    let words = alphabet.words(n);
    let mut out = vec![];
    for &u in &words {
        for &v in &words {
            let delta = if u == v { engine::one() } else { Element::zero() };
            let rows: Element = words
                .iter()
                .map(|&w| (Monomial::from_factors(&[Generator::of(u, w), Generator::of(v, w)]), Q::one()))
                .collect();
            let cols: Element = words
                .iter()
                .map(|&w| (Monomial::from_factors(&[Generator::of(w, u), Generator::of(w, v)]), Q::one()))
                .collect();
            out.push(Identity::new(format!("unitarity a·a^T [{u},{v}]"), tree(&rows), tree(&delta)));
            out.push(Identity::new(format!("unitarity a^T·a [{u},{v}]"), tree(&cols), tree(&delta)));
        }
    }
    out
}

/// `(ε⊗id)Δ(a) = a = (id⊗ε)Δ(a)`.
pub fn counit_identities(g: Generator, ctx: &Ctx) -> Vec<Identity> {
    let x = engine::gen(g);
    let d = delta(&x, ctx);
    vec![
        Identity::new(format!("counit left {g}"), counit_on_leg(&d, 0).expect("tree"), tree(&x)),
        Identity::new(format!("counit right {g}"), counit_on_leg(&d, 1).expect("tree"), tree(&x)),
    ]
}

/// `m(κ⊗id)Δ(a) = ε(a)1 = m(id⊗κ)Δ(a)`.
pub fn antipode_identities(g: Generator, ctx: &Ctx) -> Vec<Identity> {
    let x = engine::gen(g);
    let d = delta(&x, ctx);
    let eps = tree(&engine::scalar(counit(&x)));
    let left = antipode_on_leg(&d, 0).and_then(|t| t.multiply_legs(0)).expect("tree legs");
    let right = antipode_on_leg(&d, 1).and_then(|t| t.multiply_legs(0)).expect("tree legs");
    vec![
        Identity::new(format!("antipode left {g}"), left, eps.clone()),
        Identity::new(format!("antipode right {g}"), right, eps),
    ]
}

pub fn verify_cqg_axioms(cfg: &RunConfig, v: &Verifier) -> VerificationReport {
    let started = Instant::now();
    let alphabet = cfg.alphabet();
    let ctx = &v.ctx;
    let mut items: Vec<(String, Element)> =
        Generator::all_up_to(alphabet, cfg.depth).into_iter().map(|g| (g.to_string(), engine::gen(g))).collect();
    for (i, m) in random_monomials(alphabet, cfg.depth, cfg.degree, cfg.samples, cfg.seed).into_iter().enumerate() {
        items.push((format!("#{i:03} {m}"), engine::from_monomial(m)));
    }
    let mut ids = coassociativity_identities(&items, ctx);
    for n in 1..=cfg.depth {
        ids.extend(unitarity_identities(alphabet, n));
    }
    for g in Generator::all_up_to(alphabet, cfg.depth) {
        ids.extend(counit_identities(g, ctx));
        ids.extend(antipode_identities(g, ctx));
    }
    let mut report = cfg.report("cqg-axioms");
    report.extend(run(v, ids));
    report.finish(cfg.timings.then_some(started))
}

pub fn verify_hopf_laws(cfg: &RunConfig, v: &Verifier) -> VerificationReport {
    let started = Instant::now();
    let alphabet = cfg.alphabet();
    let mut ids = vec![];
    for g in Generator::all_up_to(alphabet, cfg.depth) {
        ids.extend(counit_identities(g, &v.ctx));
        ids.extend(antipode_identities(g, &v.ctx));
    }
    let mut report = cfg.report("hopf-laws");
    report.extend(run(v, ids));
    report.finish(cfg.timings.then_some(started))
}

/// `(Δ⊗id)γ_n(p_w) = (id⊗γ_n)γ_n(p_w)`.
pub fn coaction_identity(w: Word, ctx: &Ctx) -> Identity {
    let g = gamma(&TensorElement::function(w), ctx.alphabet).expect("function leg");
    let lhs = delta_on_leg(&g, 0, ctx).expect("tree leg");
    let rhs = gamma_on_leg(&g, 1, ctx.alphabet).expect("function leg");
    Identity::new(format!("coaction p[{w}]"), lhs, rhs).formulas(format!("(Δ⊗id)γ(p[{w}])"), format!("(id⊗γ)γ(p[{w}])"))
}

/// `Σ_u γ_n(p_u)(a[u,v]⊗1) = 1⊗p_v`.
pub fn podles_identity(v: Word, ctx: &Ctx) -> Identity {
    let n = v.len();
    let sig = vec![LegKind::Tree, LegKind::Fun(n)];
    let mut lhs = TensorElement::zero(sig.clone());
    let one_n = TensorElement::function_unit(ctx.alphabet, n);
    for u in ctx.alphabet.words(n) {
        let g = gamma(&TensorElement::function(u), ctx.alphabet).expect("function leg");
        let right = crate::tensor::tensor_product(&tree(&engine::a(u, v)), &one_n);
        let prod = crate::tensor::multiply_pointwise(&g, &right, ctx).expect("same signature");
        lhs.add_assign_scaled(&prod, &Q::one()).expect("same signature");
    }
    let rhs = crate::tensor::tensor_product(&tree(&engine::one()), &TensorElement::function(v));
    Identity::new(format!("podles p[{v}]"), lhs, rhs).formulas(format!("Σ_u γ(p_u)(a[u,{v}]⊗1)"), format!("1⊗p[{v}]"))
}

/// `γ_n(i_{m,n}(p_w)) = (id⊗i_{m,n})γ_m(p_w)`.
pub fn inclusion_identity(w: Word, n: usize, ctx: &Ctx) -> Identity {
    let f = TensorElement::function(w);
    let lhs = gamma(&inclusion(&f, n, ctx.alphabet).expect("m ≤ n"), ctx.alphabet).expect("function leg");
    let g = gamma(&f, ctx.alphabet).expect("function leg");
    let rhs = inclusion_on_leg(&g, 1, n, ctx.alphabet).expect("m ≤ n");
    let m = w.len();
    Identity::new(format!("inclusion i_{{{m},{n}}} p[{w}]"), lhs, rhs)
        .formulas(format!("γ_{n}(i_{{{m},{n}}}(p[{w}]))"), format!("(id⊗i_{{{m},{n}}})γ_{m}(p[{w}])"))
}

/// Coaction identity and Podleś span identity at level `n = depth`, and
/// `i_{m,n}` compatibility for all `1 ≤ m < n ≤ depth`.
pub fn verify_coaction(cfg: &RunConfig, v: &Verifier) -> VerificationReport {
    let started = Instant::now();
    let alphabet = cfg.alphabet();
    let ctx = &v.ctx;
    let mut ids = vec![];
    for n in 1..=cfg.depth {
        for w in alphabet.words(n) {
            ids.push(coaction_identity(w, ctx));
            ids.push(podles_identity(w, ctx));
        }
        for m in 1..n {
            for w in alphabet.words(m) {
                ids.push(inclusion_identity(w, n, ctx));
            }
        }
    }
    let mut report = cfg.report("coaction");
    report.extend(run(v, ids));
    report.finish(cfg.timings.then_some(started))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{enumerate_aut, tensor_eval, LegPoint, Portrait};
    use crate::engine::SearchPolicy;
    use crate::lincomb::q;
    use crate::parse::{parse_element, parse_tensor};
    use crate::tensor::prove_zero_tensor;
    use proptest::prelude::*;

    fn k(n: usize) -> Alphabet {
        Alphabet::new(n).unwrap()
    }

    fn el(s: &str, n: usize) -> Element {
        parse_element(s, k(n)).unwrap()
    }

    fn t(s: &str, n: usize) -> TensorElement {
        parse_tensor(s, k(n), None).unwrap()
    }

    fn zero(x: &TensorElement, n: usize) -> bool {
        prove_zero_tensor(x, &Ctx::new(k(n)), &SearchPolicy::default()).is_zero()
    }

    #[test]
    fn delta_examples() {
        let c = Ctx::new(k(2));
        assert_eq!(delta(&el("a[0,1]", 2), &c), t("a[0,0] ox a[0,1] + a[0,1] ox a[1,1]", 2));
        assert_eq!(delta(&engine::one(), &c), t("1 ox 1", 2));
        let prod = delta(&el("a[0,1]*a[1,0]", 2), &c);
        let raw =
            crate::tensor::multiply_pointwise(&delta(&el("a[0,1]", 2), &c), &delta(&el("a[1,0]", 2), &c), &c).unwrap();
        assert_eq!(prod, raw);
        let d = delta(&el("a[0,1]", 2), &c);
        let applied = delta_on_leg(
            &crate::tensor::tensor_product(&tree(&el("a[0,1]", 2)), &TensorElement::function("0".parse().unwrap())),
            0,
            &c,
        )
        .unwrap();
        assert_eq!(applied, crate::tensor::tensor_product(&d, &TensorElement::function("0".parse().unwrap())));
    }

    #[test]
    fn counit_examples() {
        assert_eq!(counit(&el("a[01,01]", 2)), q(1));
        assert_eq!(counit(&el("a[01,10]", 2)), q(0));
        assert_eq!(counit(&el("a[0,0]*a[01,01] - 3", 2)), q(-2));
    }

    #[test]
    fn antipode_examples() {
        assert_eq!(antipode(&el("a[01,10]", 2)), el("a[10,01]", 2));
        assert_eq!(antipode(&el("a[0,1]*a[01,11]", 2)), el("a[11,01]*a[1,0]", 2));
    }

    #[test]
    fn gamma_examples() {
        let a2 = k(2);
        assert_eq!(gamma(&t("p[0]", 2), a2).unwrap(), t("a[0,0] ox p[0] + a[0,1] ox p[1]", 2));
        let g1 = gamma(&TensorElement::function_unit(a2, 1), a2).unwrap();
        let unit = crate::tensor::tensor_product(&tree(&engine::one()), &TensorElement::function_unit(a2, 1));
        assert!(zero(&g1.sub(&unit).unwrap(), 2));
        assert_eq!(gamma(&t("p[01]", 2), a2).unwrap().len(), 4);
        let inc = inclusion_on_leg(&t("1 ox p[0]", 2), 1, 2, a2).unwrap();
        assert_eq!(inc, t("1 ox p[00] + 1 ox p[01]", 2));
    }

    #[test]
    fn spec_tensor_identities() {
        let c = Ctx::new(k(2));
        let lhs = coassociativity_identities(&[("a[0,1]".into(), el("a[0,1]", 2))], &c).remove(0);
        assert!(zero(&lhs.lhs.sub(&lhs.rhs).unwrap(), 2));
        let p = podles_identity("0".parse().unwrap(), &c);
        assert!(zero(&p.lhs.sub(&p.rhs).unwrap(), 2));
        let i = inclusion_identity("0".parse().unwrap(), 2, &c);
        assert!(zero(&i.lhs.sub(&i.rhs).unwrap(), 2));
    }

    #[test]
    fn antipode_law_instance() {
        let c = Ctx::new(k(2));
        let d = delta(&el("a[0,1]", 2), &c);
        let m = antipode_on_leg(&d, 0).unwrap().multiply_legs(0).unwrap();
        assert_eq!(m.to_element().unwrap(), el("a[0,0]*a[0,1] + a[1,0]*a[1,1]", 2));
        assert!(zero(&m, 2));
    }

    /// Δ, κ and ε dualize multiplication, inversion and the identity.
    #[test]
    fn structure_maps_dualize_group_operations() {
        let c = Ctx::new(k(2));
        let group: Vec<Portrait> = enumerate_aut(2, 2).unwrap();
        let tables: Vec<_> = group.iter().map(Portrait::action_table).collect();
        for g in Generator::all_up_to(k(2), 2) {
            let x = engine::gen(g);
            let d = delta(&x, &c);
            for (i, a) in group.iter().enumerate() {
                let ta = &tables[i];
                assert_eq!(tables[i].eval(&antipode(&x)).unwrap(), a.invert().action_table().eval(&x).unwrap());
                for (j, b) in group.iter().enumerate() {
                    let point = [LegPoint::Group(a, ta), LegPoint::Group(b, &tables[j])];
                    let lhs = tensor_eval(&d, &point).unwrap();
                    assert_eq!(lhs, a.compose(b).unwrap().action_table().eval(&x).unwrap());
                }
            }
            assert_eq!(counit(&x), Portrait::identity(2, 2).action_table().eval(&x).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn delta_is_multiplicative(i in 0usize..20, j in 0usize..20) {
            let c = Ctx::new(k(2));
            let gens = Generator::all_up_to(k(2), 2);
            let (x, y) = (engine::gen(gens[i]), engine::gen(gens[j]));
            let lhs = delta(&engine::product(&x, &y), &c);
            let rhs = crate::tensor::multiply_pointwise(&delta(&x, &c), &delta(&y, &c), &c).unwrap();
            prop_assert_eq!(lhs.clone(), rhs);
            prop_assert_eq!(delta(&engine::adjoint(&engine::product(&x, &y)), &c), lhs.adjoint());
        }

        #[test]
        fn counit_antipode_compatible(i in 0usize..20, j in 0usize..20) {
            let gens = Generator::all_up_to(k(2), 2);
            let x = engine::product(&engine::gen(gens[i]), &engine::gen(gens[j]));
            prop_assert_eq!(counit(&antipode(&x)), counit(&x));
            prop_assert_eq!(antipode(&antipode(&x)), x.clone());
            let y = engine::gen(gens[j]);
            prop_assert_eq!(antipode(&engine::product(&x, &y)), engine::product(&antipode(&y), &antipode(&x)));
        }
    }
}

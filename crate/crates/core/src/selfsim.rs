//! Restriction homomorphisms `ρ_x`, `ρ_w`, their mirror images `σ_x`, the
//! map `ψ : C(X) ⊗ A → A ⊗ C(X)` and the suites checking self-similarity.

use std::time::Instant;

use num_traits::One;
use rayon::prelude::*;

use crate::engine::{self, normalize_factors, Element, Generator, Monomial};
use crate::hopf::{antipode, delta, delta_on_leg};
use crate::lincomb::{LinComb, Q};
use crate::report::{Identity, IdentityRecord, VerificationReport, Verifier};
use crate::rewrite::{Ctx, RuleCounts};
use crate::suites::{random_monomials, RunConfig};
use crate::tensor::{
    key, multiply_pointwise, tensor_product, Leg, LegKind, LegMap, TensorElement, TensorError, TensorKey,
};
use crate::words::{Alphabet, Word};

/// `ρ_w(a[u,v]) = Σ_{|z|=|w|} a[zu, wv]`; the unit is fixed.
pub fn rho_generator(w: Word, g: Generator, alphabet: Alphabet) -> Element {
    if g.is_unit() || w.is_empty() {
        return engine::gen(g);
    }
    alphabet
        .words(w.len())
        .into_iter()
        .map(|z| (Monomial::generator(Generator::of(z.concat(g.row()), w.concat(g.col()))), Q::one()))
        .collect()
}

/// `σ_x(a[u,v]) = Σ_y a[xu, yv]`.
pub fn sigma_generator(x: u8, g: Generator, alphabet: Alphabet) -> Element {
    if g.is_unit() {
        return engine::one();
    }
    alphabet
        .letters()
        .map(|y| (Monomial::generator(Generator::of(g.row().prepend(x), g.col().prepend(y))), Q::one()))
        .collect()
}

fn extend(x: &Element, ctx: &Ctx, f: impl Fn(Generator) -> Element) -> Element {
    engine::normalize(&engine::map_generators(x, f), ctx)
}

/// The homomorphism `ρ_x`.
pub fn rho(x: u8, e: &Element, ctx: &Ctx) -> Element {
    rho_word(Word::letter_word(x), e, ctx)
}

/// `ρ_w`, computed generator-wise from the closed form.
pub fn rho_word(w: Word, e: &Element, ctx: &Ctx) -> Element {
    extend(e, ctx, |g| rho_generator(w, g, ctx.alphabet))
}

/// `ρ_{w₁} ∘ … ∘ ρ_{wₙ}`, one letter at a time starting from the last.
pub fn rho_word_composed(w: Word, e: &Element, ctx: &Ctx) -> Element {
    w.letters().collect::<Vec<_>>().iter().rev().fold(e.clone(), |acc, &x| rho(x, &acc, ctx))
}

pub fn sigma(x: u8, e: &Element, ctx: &Ctx) -> Element {
    extend(e, ctx, |g| sigma_generator(x, g, ctx.alphabet))
}

fn tree_monomial(legs: &[Leg]) -> &Monomial {
    match &legs[0] {
        Leg::Tree(m) => m,
        _ => unreachable!("leg kind checked"),
    }
}

fn element_keys(e: &Element) -> LinComb<TensorKey> {
    e.iter().map(|(m, c)| (key([Leg::Tree(m.clone())]), c.clone())).collect()
}

/// `ρ_w` on tree leg `i`.
pub fn rho_on_leg(t: &TensorElement, i: usize, w: Word, ctx: &Ctx) -> Result<TensorElement, TensorError> {
    let map = LegMap {
        inputs: vec![LegKind::Tree],
        outputs: vec![LegKind::Tree],
        f: |legs: &[Leg]| element_keys(&rho_word(w, &engine::from_monomial(tree_monomial(legs).clone()), ctx)),
    };
    t.apply_on_legs(i, &map)
}

/// `ψ(p_x ⊗ g₁⋯g_r) = Σ_y Π_i a[x u_i, y v_i] ⊗ p_y`, with `ψ(p_x ⊗ 1) = Σ_y a[x,y] ⊗ p_y`.
pub fn psi_basis(x: u8, m: &Monomial, ctx: &Ctx) -> LinComb<TensorKey> {
    let mut out = LinComb::zero();
    let mut counts = RuleCounts::default();
    for y in ctx.alphabet.letters() {
        let factors: Vec<Generator> = if m.degree() == 0 {
            vec![Generator::of(Word::letter_word(x), Word::letter_word(y))]
        } else {
            m.factors().iter().map(|g| Generator::of(g.row().prepend(x), g.col().prepend(y))).collect()
        };
        if let Some(n) = normalize_factors(factors, ctx, &mut counts) {
            out.add_term(key([Leg::Tree(n), Leg::Fun(Word::letter_word(y))]), Q::one());
        }
    }
    out
}

/// `ψ` on legs `i, i+1` of kinds `Fun(1), Tree`, producing `Tree, Fun(1)`.
pub fn psi_on_legs(t: &TensorElement, i: usize, ctx: &Ctx) -> Result<TensorElement, TensorError> {
    let map = LegMap {
        inputs: vec![LegKind::Fun(1), LegKind::Tree],
        outputs: vec![LegKind::Tree, LegKind::Fun(1)],
        f: |legs: &[Leg]| match (&legs[0], &legs[1]) {
            (Leg::Fun(w), Leg::Tree(m)) => psi_basis(w.letter(0), m, ctx),
            _ => unreachable!("leg kinds checked"),
        },
    };
    t.apply_on_legs(i, &map)
}

/// `ψ : C(X) ⊗ A → A ⊗ C(X)`.
pub fn psi(t: &TensorElement, ctx: &Ctx) -> Result<TensorElement, TensorError> {
    match t.signature() {
        [LegKind::Fun(1), LegKind::Tree] => psi_on_legs(t, 0, ctx),
        other => Err(TensorError::Signature(other.to_vec(), vec![LegKind::Fun(1), LegKind::Tree])),
    }
}

fn tree(e: &Element) -> TensorElement {
    TensorElement::from_element(e)
}

/// `(Δ⊗id)ψ(p_x⊗a) = (id⊗ψ)(ψ⊗id)(id⊗Δ)(p_x⊗a)`.
pub fn exchange_identity(x: u8, name: &str, a: &Element, ctx: &Ctx) -> Identity {
    let input = tensor_product(&TensorElement::function(Word::letter_word(x)), &tree(a));
    let lhs = delta_on_leg(&psi(&input, ctx).expect("signature"), 0, ctx).expect("tree leg");
    let split = delta_on_leg(&input, 1, ctx).expect("tree leg");
    let rhs = psi_on_legs(&psi_on_legs(&split, 0, ctx).expect("legs"), 1, ctx).expect("legs");
    Identity::new(format!("exchange p[{x}] {name}"), lhs, rhs)
        .formulas(format!("(Δ⊗id)ψ(p[{x}]⊗{name})"), format!("(id⊗ψ)(ψ⊗id)(id⊗Δ)(p[{x}]⊗{name})"))
}

/// `ψ(1⊗a) = Σ_x ρ_x(a) ⊗ p_x`.
pub fn psi_restriction_identity(name: &str, a: &Element, ctx: &Ctx) -> Identity {
    let input = tensor_product(&TensorElement::function_unit(ctx.alphabet, 1), &tree(a));
    let lhs = psi(&input, ctx).expect("signature");
    let mut rhs = TensorElement::zero(vec![LegKind::Tree, LegKind::Fun(1)]);
    for x in ctx.alphabet.letters() {
        let term = tensor_product(&tree(&rho(x, a, ctx)), &TensorElement::function(Word::letter_word(x)));
        rhs.add_assign_scaled(&term, &Q::one()).expect("signature");
    }
    Identity::new(format!("psi restricts {name}"), lhs, rhs)
        .formulas(format!("ψ(1⊗{name})"), format!("Σ_x ρ_x({name})⊗p[x]"))
}

/// `Δ(ρ_w(a)) = Σ_{|y|=|w|} (1⊗a[y,w])(ρ_y⊗ρ_w)Δ(a)`.
pub fn delta_rho_identity(w: Word, name: &str, a: &Element, ctx: &Ctx) -> Identity {
    let lhs = delta(&rho_word(w, a, ctx), ctx);
    let d = delta(a, ctx);
    let rho_w = rho_on_leg(&d, 1, w, ctx).expect("tree leg");
    let mut rhs = TensorElement::zero(vec![LegKind::Tree, LegKind::Tree]);
    for y in ctx.alphabet.words(w.len()) {
        let both = rho_on_leg(&rho_w, 0, y, ctx).expect("tree leg");
        let factor = tensor_product(&tree(&engine::one()), &tree(&engine::a(y, w)));
        let term = multiply_pointwise(&factor, &both, ctx).expect("signature");
        rhs.add_assign_scaled(&term, &Q::one()).expect("signature");
    }
    Identity::new(format!("delta-rho w={w} {name}"), lhs, rhs)
        .formulas(format!("Δ(ρ_{w}({name}))"), format!("Σ_y (1⊗a[y,{w}])(ρ_y⊗ρ_{w})Δ({name})"))
}

/// Generators of depth `1..=depth` together with seeded random monomials.
pub fn test_elements(cfg: &RunConfig) -> Vec<(String, Element)> {
    let alphabet = cfg.alphabet();
    let mut items: Vec<(String, Element)> = Generator::all_up_to(alphabet, cfg.depth)
        .into_iter()
        .filter(|g| !g.is_unit())
        .map(|g| (g.to_string(), engine::gen(g)))
        .collect();
    if cfg.degree > 1 {
        let seed = cfg.seed.wrapping_add(0x5e1f);
        for m in random_monomials(alphabet, cfg.depth, cfg.degree, cfg.samples, seed) {
            items.push((m.to_string(), engine::from_monomial(m)));
        }
    }
    items.sort_by(|a, b| a.0.cmp(&b.0));
    items.dedup_by(|a, b| a.0 == b.0);
    items
}

fn run(v: &Verifier, ids: Vec<Identity>) -> Vec<IdentityRecord> {
    ids.par_iter().map(|id| v.check(id)).collect()
}

fn tensor(e: &Element) -> TensorElement {
    TensorElement::from_element(e)
}

/// ρ_x on relations, the closed form of ρ_w against composition, and the
/// exact three-letter instance when `k = 3`.
pub fn verify_restriction(cfg: &RunConfig, v: &Verifier) -> VerificationReport {
    let started = Instant::now();
    let ctx = &v.ctx;
    let alphabet = cfg.alphabet();
    let mut report = cfg.report("restriction");
    let mut ids = vec![];
    if cfg.k == 3 {
        let w = |s: &str| s.parse::<Word>().expect("word");
        let got = rho(1, &engine::a(w("1"), w("2")), ctx);
        let want = engine::a(w("01"), w("12")).add(&engine::a(w("11"), w("12"))).add(&engine::a(w("21"), w("12")));
        report.push(v.exact("rho_1(a[1,2])", got.to_string(), want.to_string(), got == want));
    }
    for x in alphabet.letters() {
        let got = rho(x, &engine::one(), ctx);
        report.push(v.exact(format!("rho_{x}(1)"), got.to_string(), "1".into(), engine::is_one(&got)));
    }
    let mut relations = engine::defining_relations(alphabet, cfg.depth);
    relations.extend(engine::absorption_relations(alphabet, cfg.depth));
    for (name, r) in &relations {
        for x in alphabet.letters() {
            let image = tensor(&rho(x, r, ctx));
            ids.push(
                Identity::new(format!("rho_{x} preserves {name}"), image, TensorElement::zero(vec![LegKind::Tree]))
                    .formulas(format!("ρ_{x}({name})"), "0"),
            );
        }
    }
    let items = test_elements(cfg);
    for n in 0..=cfg.word_len {
        for w in alphabet.words(n) {
            for (name, a) in &items {
                ids.push(
                    Identity::new(
                        format!("closed form w={w} {name}"),
                        tensor(&rho_word_composed(w, a, ctx)),
                        tensor(&rho_word(w, a, ctx)),
                    )
                    .formulas(format!("ρ_{w}({name}) by composition"), format!("ρ_{w}({name}) closed form")),
                );
            }
        }
    }
    report.extend(run(v, ids));
    report.finish(cfg.timings.then_some(started))
}

/// `σ_x = κ∘ρ_x∘κ` on generators and sampled monomials.
pub fn verify_sigma_kappa(cfg: &RunConfig, v: &Verifier) -> VerificationReport {
    let started = Instant::now();
    let ctx = &v.ctx;
    let mut ids = vec![];
    for (name, a) in test_elements(cfg) {
        for x in cfg.alphabet().letters() {
            let lhs = tensor(&sigma(x, &a, ctx));
            let rhs = tensor(&antipode(&rho(x, &antipode(&a), ctx)));
            ids.push(
                Identity::new(format!("sigma_{x} {name}"), lhs, rhs)
                    .formulas(format!("σ_{x}({name})"), format!("κρ_{x}κ({name})")),
            );
        }
    }
    let mut report = cfg.report("sigma-kappa");
    report.extend(run(v, ids));
    report.finish(cfg.timings.then_some(started))
}

/// The exchange axiom for `ψ` and its compatibility with the restrictions.
pub fn verify_psi_axiom(cfg: &RunConfig, v: &Verifier) -> VerificationReport {
    let started = Instant::now();
    let ctx = &v.ctx;
    let mut items = test_elements(cfg);
    items.insert(0, ("1".into(), engine::one()));
    let mut ids = vec![];
    for (name, a) in &items {
        for x in cfg.alphabet().letters() {
            ids.push(exchange_identity(x, name, a, ctx));
        }
        ids.push(psi_restriction_identity(name, a, ctx));
    }
    let mut report = cfg.report("psi-axiom");
    report.extend(run(v, ids));
    report.finish(cfg.timings.then_some(started))
}

/// The factorization of `Δ∘ρ_w` for `1 ≤ |w| ≤ word_len`.
pub fn verify_delta_rho(cfg: &RunConfig, v: &Verifier) -> VerificationReport {
    let started = Instant::now();
    let ctx = &v.ctx;
    let mut ids = vec![];
    let items = test_elements(cfg);
    for n in 1..=cfg.word_len {
        for w in cfg.alphabet().words(n) {
            for (name, a) in &items {
                ids.push(delta_rho_identity(w, name, a, ctx));
            }
        }
    }
    let mut report = cfg.report("delta-rho");
    report.extend(run(v, ids));
    report.finish(cfg.timings.then_some(started))
}

/// All self-similarity suites merged into one report.
pub fn verify_selfsimilarity(cfg: &RunConfig, v: &Verifier) -> VerificationReport {
    let started = Instant::now();
    let parts = vec![
        verify_restriction(cfg, v),
        verify_sigma_kappa(cfg, v),
        verify_psi_axiom(cfg, v),
        verify_delta_rho(cfg, v),
    ];
    let mut out = VerificationReport::merge("selfsimilarity", parts);
    out.millis = cfg.timings.then(|| started.elapsed().as_millis() as u64);
    out
}

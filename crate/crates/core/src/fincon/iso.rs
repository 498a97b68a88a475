//! The comparison maps between `A_ℙ` and `A_ℙ ∗_w ℙ`:
//! `π(a[xu,yv]) = P[x,y]·N_x(a[u,v])` and its inverse
//! `φ(N_x(a)) = σ_x(a)`, `φ(P[x,y]) = a[x,y]`, together with the
//! comultiplication `Φ_w` of the wreath product.

use std::time::Instant;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::wreath::{
    nu, pgen, refine_wreath, wreath_depth, wreath_one, wreath_product, WreathElement, WreathMonomial, WreathSymbol,
};
use super::{quotient_reduce, slice_member, Canon, FinconError, QuotientBounds, RelatorSet, Slice};
use crate::classical::{enumerate_gp, gp_order, indicator_span_rank, SubgroupSpec};
use crate::engine::{self, Element, Generator, Monomial, SearchPolicy};
use crate::hopf::delta;
use crate::lincomb::{LinComb, Q};
use crate::report::{Identity, IdentityRecord, VerificationReport, Verifier};
use crate::rewrite::{self, Certificate, Ctx, ReductionOutcome};
use crate::selfsim::{rho_word, sigma};
use crate::suites::{random_monomials, RunConfig};
use crate::tensor::{
    key, multiply_pointwise, prove_zero_tensor, tensor_product, Leg, LegKind, LegMap, TensorElement, TensorError,
    TensorKey,
};
use crate::words::{Alphabet, Word};

pub fn pi_generator(g: Generator) -> WreathElement {
    if g.is_unit() {
        return wreath_one();
    }
    let (x, y) = (g.row().letter(0), g.col().letter(0));
    if g.depth() == 1 {
        return pgen(x, y);
    }
    let inner = engine::a(g.row().drop_prefix(1), g.col().drop_prefix(1));
    wreath_product(&pgen(x, y), &nu(x, &inner))
}

fn pi_monomial(m: &Monomial) -> WreathElement {
    m.factors().iter().fold(wreath_one(), |acc, &g| wreath_product(&acc, &pi_generator(g)))
}

/// `π` extended multiplicatively and linearly.
pub fn pi_map(e: &Element) -> WreathElement {
    e.flat_map(pi_monomial)
}

fn phi_symbol(s: &WreathSymbol, ctx: &Ctx) -> Element {
    match s {
        WreathSymbol::P(x, y) => engine::a(Word::letter_word(*x), Word::letter_word(*y)),
        WreathSymbol::Nu(x, m) => sigma(*x, &engine::from_monomial(m.clone()), ctx),
    }
}

fn phi_monomial(m: &WreathMonomial, ctx: &Ctx) -> Element {
    m.symbols().iter().fold(engine::one(), |acc, s| engine::product(&acc, &phi_symbol(s, ctx)))
}

/// `φ` extended multiplicatively and linearly, in local normal form.
pub fn phi_map(e: &WreathElement, ctx: &Ctx) -> Element {
    engine::normalize(&e.flat_map(|m| phi_monomial(m, ctx)), ctx)
}

fn wreath_keys(e: &WreathElement) -> LinComb<TensorKey> {
    e.iter().map(|(m, c)| (key([Leg::Wreath(m.clone())]), c.clone())).collect()
}

fn tree_keys(e: &Element) -> LinComb<TensorKey> {
    e.iter().map(|(m, c)| (key([Leg::Tree(m.clone())]), c.clone())).collect()
}

/// `π` on tree leg `i`.
pub fn pi_on_leg(t: &TensorElement, i: usize) -> Result<TensorElement, TensorError> {
    let map = LegMap {
        inputs: vec![LegKind::Tree],
        outputs: vec![LegKind::Wreath],
        f: |legs: &[Leg]| match &legs[0] {
            Leg::Tree(m) => wreath_keys(&pi_monomial(m)),
            _ => unreachable!("leg kind checked"),
        },
    };
    t.apply_on_legs(i, &map)
}

/// `φ` on wreath leg `i`.
pub fn phi_on_leg(t: &TensorElement, i: usize, ctx: &Ctx) -> Result<TensorElement, TensorError> {
    let map = LegMap {
        inputs: vec![LegKind::Wreath],
        outputs: vec![LegKind::Tree],
        f: |legs: &[Leg]| match &legs[0] {
            Leg::Wreath(m) => tree_keys(&engine::normalize(&phi_monomial(m, ctx), ctx)),
            _ => unreachable!("leg kind checked"),
        },
    };
    t.apply_on_legs(i, &map)
}

/// `ν_x` on tree leg `i`.
fn nu_on_leg(t: &TensorElement, i: usize, x: u8) -> TensorElement {
    let map = LegMap {
        inputs: vec![LegKind::Tree],
        outputs: vec![LegKind::Wreath],
        f: |legs: &[Leg]| match &legs[0] {
            Leg::Tree(m) => wreath_keys(&nu(x, &engine::from_monomial(m.clone()))),
            _ => unreachable!("leg kind checked"),
        },
    };
    t.apply_on_legs(i, &map).expect("tree leg")
}

fn wreath(e: &WreathElement) -> TensorElement {
    TensorElement::from_wreath(e)
}

/// `Φ_w(P[x,y]) = Σ_z P[x,z]⊗P[z,y]` and
/// `Φ_w(N_x(m)) = Σ_z (ν_x⊗ν_z)(Δm)·(P[x,z]⊗1)`.
pub fn delta_w_symbol(s: &WreathSymbol, ctx: &Ctx) -> TensorElement {
    let alphabet = ctx.alphabet;
    let mut out = TensorElement::zero(vec![LegKind::Wreath, LegKind::Wreath]);
    match s {
        WreathSymbol::P(x, y) => {
            for z in alphabet.letters() {
                out.add_assign_scaled(&tensor_product(&wreath(&pgen(*x, z)), &wreath(&pgen(z, *y))), &Q::one())
                    .expect("signature");
            }
        }
        WreathSymbol::Nu(x, m) => {
            let d = delta(&engine::from_monomial(m.clone()), &Ctx::new(alphabet));
            let left = nu_on_leg(&d, 0, *x);
            for z in alphabet.letters() {
                let both = nu_on_leg(&left, 1, z);
                let p = tensor_product(&wreath(&pgen(*x, z)), &wreath(&wreath_one()));
                let term = multiply_pointwise(&both, &p, ctx).expect("signature");
                out.add_assign_scaled(&term, &Q::one()).expect("signature");
            }
        }
    }
    out
}

fn delta_w_monomial(m: &WreathMonomial, ctx: &Ctx) -> TensorElement {
    let unit = TensorElement::unit(&[LegKind::Wreath, LegKind::Wreath], ctx.alphabet);
    m.symbols().iter().fold(unit, |acc, s| multiply_pointwise(&acc, &delta_w_symbol(s, ctx), ctx).expect("signature"))
}

/// `Φ_w`, multiplicative over the symbols of each monomial.
pub fn delta_w(e: &WreathElement, ctx: &Ctx) -> TensorElement {
    let mut out = TensorElement::zero(vec![LegKind::Wreath, LegKind::Wreath]);
    for (m, c) in e.iter() {
        out.add_assign_scaled(&delta_w_monomial(m, ctx), c).expect("signature");
    }
    out
}

/// `Φ_w` on wreath leg `i`.
pub fn delta_w_on_leg(t: &TensorElement, i: usize, ctx: &Ctx) -> Result<TensorElement, TensorError> {
    let map = LegMap {
        inputs: vec![LegKind::Wreath],
        outputs: vec![LegKind::Wreath, LegKind::Wreath],
        f: |legs: &[Leg]| match &legs[0] {
            Leg::Wreath(m) => delta_w_monomial(m, ctx).terms().clone(),
            _ => unreachable!("leg kind checked"),
        },
    };
    t.apply_on_legs(i, &map)
}

/// Reduction in `A_ℙ ∗_w ℙ`: the wreath rules with `ℙ`'s vanishing pairs,
/// then elimination against the images of the remaining relators, both on
/// `P` symbols and inside every `N_x`.
pub fn wreath_reduce(
    e: &WreathElement,
    set: &RelatorSet,
    bounds: &QuotientBounds,
    policy: &SearchPolicy,
) -> ReductionOutcome<WreathElement> {
    let ctx = set.ctx();
    let first = prove_zero_tensor(&wreath(e), &ctx, policy);
    let relators = set.slice_generators();
    let wrap = |out: ReductionOutcome<TensorElement>| ReductionOutcome {
        result: out.result.to_wreath().expect("single wreath leg"),
        certificate: out.certificate,
        counts: out.counts,
        trace: out.trace,
    };
    if first.is_zero() || relators.is_empty() {
        return wrap(first);
    }
    let alphabet = set.alphabet;
    let top = e.iter().map(|(m, _)| wreath_depth(m)).max().unwrap_or(0).max(1);
    let plain = Ctx::new(alphabet);
    let mut gens: Vec<WreathElement> = Vec::new();
    for r in &relators {
        if engine::max_depth(r) == 1 {
            gens.push(pi_map(r));
        }
        let rd = engine::max_depth(r);
        for n in 0..=bounds.word_len.min(top.saturating_sub(rd)) {
            for w in alphabet.words(n) {
                let image = rho_word(w, r, &plain);
                for x in alphabet.letters() {
                    gens.push(nu(x, &image));
                }
            }
        }
    }
    let mut cofactors: Vec<WreathElement> = Vec::new();
    for x in alphabet.letters() {
        for y in alphabet.letters() {
            if !ctx.pair_vanishes(x, y) {
                cofactors.push(pgen(x, y));
            }
        }
        for g in (1..=bounds.cofactor_depth).flat_map(|n| Generator::all(alphabet, n)) {
            if !g.vanishes(&ctx) {
                cofactors.push(nu(x, &engine::gen(g)));
            }
        }
    }
    let depth = top.max(bounds.cofactor_depth);
    let plain = |x: &WreathElement| rewrite::normalize_terms(x, &ctx);
    let refined = |x: &WreathElement| rewrite::normalize_terms(&refine_wreath(x, depth, alphabet), &ctx);
    let canons = [Canon { f: &plain, max_level: 2 }, Canon { f: &refined, max_level: 1 }];
    let mul = |x: &WreathElement, y: &WreathElement| wreath_product(x, y);
    let first = wrap(first);
    let done = |result, certificate| ReductionOutcome { result, certificate, counts: first.counts, trace: None };
    match slice_member(e, &gens, &cofactors, bounds, &mul, &canons) {
        Slice::Member => done(WreathElement::zero(), Certificate::ProvedZero),
        Slice::TooLarge => done(first.result.clone(), Certificate::BudgetExhausted),
        Slice::Outside(rest) => {
            let again = wrap(prove_zero_tensor(&wreath(&rest), &ctx, policy));
            if again.is_zero() {
                again
            } else {
                done(rest, again.certificate)
            }
        }
    }
}

/// Seeded random wreath monomials with `N` symbols over generators of depth
/// `1..=depth`.
pub fn random_wreath_monomials(
    alphabet: Alphabet,
    depth: usize,
    degree: usize,
    count: usize,
    seed: u64,
) -> Vec<WreathMonomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = alphabet.size();
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=degree.max(1));
            WreathMonomial::from_symbols((0..len).map(|_| {
                let x = rng.gen_range(0..k) as u8;
                if depth == 0 || rng.gen_bool(0.5) {
                    WreathSymbol::P(x, rng.gen_range(0..k) as u8)
                } else {
                    let n = rng.gen_range(1..=depth);
                    let c = alphabet.count(n);
                    let g = Generator::of(
                        Word::from_index(k, n, rng.gen_range(0..c)),
                        Word::from_index(k, n, rng.gen_range(0..c)),
                    );
                    WreathSymbol::Nu(x, Monomial::generator(g))
                }
            }))
        })
        .collect()
}

fn tree(e: &Element) -> TensorElement {
    TensorElement::from_element(e)
}

fn zero_tree() -> TensorElement {
    tree(&Element::zero())
}

/// A checker routing single-leg identities through the quotient provers.
struct Checker<'a, 'b> {
    v: &'b Verifier<'a>,
    set: &'b RelatorSet,
    bounds: QuotientBounds,
}

impl Checker<'_, '_> {
    fn check(&self, id: &Identity) -> IdentityRecord {
        let ctx = self.set.ctx();
        self.v.check_by(id, |diff| match diff.signature() {
            [LegKind::Tree] => {
                let out = quotient_reduce(&diff.to_element().expect("tree"), self.set, &self.bounds, &self.v.policy);
                ReductionOutcome {
                    result: tree(&out.result),
                    certificate: out.certificate,
                    counts: out.counts,
                    trace: None,
                }
            }
            [LegKind::Wreath] => {
                let out = wreath_reduce(&diff.to_wreath().expect("wreath"), self.set, &self.bounds, &self.v.policy);
                ReductionOutcome {
                    result: wreath(&out.result),
                    certificate: out.certificate,
                    counts: out.counts,
                    trace: None,
                }
            }
            _ => prove_zero_tensor(diff, &ctx, &self.v.policy),
        })
    }

    fn run(&self, ids: Vec<Identity>) -> Vec<IdentityRecord> {
        ids.par_iter().map(|id| self.check(id)).collect()
    }
}

fn require_depth_one(set: &RelatorSet) -> Result<(), FinconError> {
    if set.depth != 1 {
        return Err(FinconError::NotDepthOne(set.depth));
    }
    Ok(())
}

/// `N_x(a[u,v])` for `1 ≤ |u| ≤ depth` and all `P[x,y]`.
fn wreath_generators(alphabet: Alphabet, depth: usize) -> Vec<(String, WreathElement)> {
    let mut out = Vec::new();
    for x in alphabet.letters() {
        for y in alphabet.letters() {
            out.push((format!("P[{x},{y}]"), pgen(x, y)));
        }
        for n in 1..=depth {
            for g in Generator::all(alphabet, n) {
                out.push((format!("N{x}({g})"), nu(x, &engine::gen(g))));
            }
        }
    }
    out
}

/// Entries of `a^{(λ,X)}`, its inverse `b` and the inverse `c` of its
/// transpose, for `a^λ` the depth-`n` generator matrix.
fn block_entry(kind: char, n: (Word, u8), m: (Word, u8)) -> WreathElement {
    let ((i, x), (j, y)) = (n, m);
    match kind {
        'a' => wreath_product(&nu(x, &engine::a(i, j)), &pgen(x, y)),
        'b' => wreath_product(&pgen(y, x), &nu(y, &engine::a(j, i))),
        _ => wreath_product(&pgen(x, y), &nu(x, &engine::a(i, j))),
    }
}

fn matrix_identities(alphabet: Alphabet, depth: usize) -> Vec<Identity> {
    let mut out = Vec::new();
    let letters: Vec<u8> = alphabet.letters().collect();
    for &x in &letters {
        for &y in &letters {
            let delta_xy = if x == y { wreath_one() } else { WreathElement::zero() };
            let mut aat = WreathElement::zero();
            let mut ata = WreathElement::zero();
            for &z in &letters {
                aat = aat.add(&wreath_product(&pgen(x, z), &pgen(y, z)));
                ata = ata.add(&wreath_product(&pgen(z, x), &pgen(z, y)));
            }
            out.push(Identity::new(format!("aX aX^T {x},{y}"), wreath(&aat), wreath(&delta_xy)));
            out.push(Identity::new(format!("aX^T aX {x},{y}"), wreath(&ata), wreath(&delta_xy)));
        }
    }
    for n in 1..depth {
        let index: Vec<(Word, u8)> =
            alphabet.words(n).into_iter().flat_map(|w| letters.iter().map(move |&x| (w, x))).collect();
        for &p in &index {
            for &q in &index {
                let unit = if p == q { wreath_one() } else { WreathElement::zero() };
                let sum = |f: &dyn Fn((Word, u8)) -> WreathElement| {
                    index.iter().fold(WreathElement::zero(), |acc, &r| acc.add(&f(r)))
                };
                let ab = sum(&|r| wreath_product(&block_entry('a', p, r), &block_entry('b', r, q)));
                let ba = sum(&|r| wreath_product(&block_entry('b', p, r), &block_entry('a', r, q)));
                let atc = sum(&|r| wreath_product(&block_entry('a', r, p), &block_entry('c', r, q)));
                let cat = sum(&|r| wreath_product(&block_entry('c', p, r), &block_entry('a', q, r)));
                let tag = format!("n={n} ({},{}),({},{})", p.0, p.1, q.0, q.1);
                out.push(Identity::new(format!("ab {tag}"), wreath(&ab), wreath(&unit)));
                out.push(Identity::new(format!("ba {tag}"), wreath(&ba), wreath(&unit)));
                out.push(Identity::new(format!("a^T c {tag}"), wreath(&atc), wreath(&unit)));
                out.push(Identity::new(format!("c a^T {tag}"), wreath(&cat), wreath(&unit)));
            }
        }
    }
    out
}

/// The isomorphism `A_ℙ ≅ A_ℙ ∗_w ℙ` at bounded depth: `π` preserves the
/// defining relations and kills `J`, `φ` kills the wreath relators, the two
/// maps are mutually inverse, `π` intertwines the comultiplications, the
/// block matrices are invertible, and for classical `P` the indicator span
/// of `A_ℙ` has the size of `G_P`.
pub fn verify_wreath_iso(cfg: &RunConfig, set: &RelatorSet, v: &Verifier) -> Result<VerificationReport, FinconError> {
    require_depth_one(set)?;
    let started = Instant::now();
    let alphabet = set.alphabet;
    let ctx = set.ctx();
    let plain = Ctx::new(alphabet);
    let d = cfg.depth.max(1);
    let checker = Checker { v, set, bounds: QuotientBounds { word_len: cfg.word_len, ..Default::default() } };
    let mut ids = Vec::new();

    for (name, rel) in engine::defining_relations(alphabet, d) {
        ids.push(Identity::new(format!("pi preserves {name}"), wreath(&pi_map(&rel)), wreath(&WreathElement::zero())));
    }
    for r in set
        .slice_generators()
        .iter()
        .chain(set.vanishing.iter().map(|&(u, v)| engine::a(u, v)).collect::<Vec<_>>().iter())
    {
        for n in 0..d {
            for w in alphabet.words(n) {
                let image = pi_map(&rho_word(w, r, &plain));
                ids.push(Identity::new(
                    format!("pi kills rho_{w}({r})"),
                    wreath(&image),
                    wreath(&WreathElement::zero()),
                ));
            }
        }
    }

    let bases: Vec<Generator> = (1..d).flat_map(|n| Generator::all(alphabet, n)).collect();
    for x in alphabet.letters() {
        for y in alphabet.letters() {
            for &g in &bases {
                let a = nu(x, &engine::gen(g));
                let p = pgen(x, y);
                let rel = wreath_product(&a, &p).sub(&wreath_product(&p, &a));
                ids.push(
                    Identity::new(
                        format!("phi commutation N{x}({g}) P[{x},{y}]"),
                        tree(&phi_map(&rel, &plain)),
                        zero_tree(),
                    )
                    .formulas(format!("φ(N{x}({g})P[{x},{y}] − P[{x},{y}]N{x}({g}))"), "0"),
                );
            }
        }
    }
    for r in &set.relators {
        if engine::max_depth(r) == 1 {
            let image = phi_map(&pi_map(r), &plain);
            ids.push(Identity::new(format!("phi kills P-relator {r}"), tree(&image), zero_tree()));
        }
        for x in alphabet.letters() {
            ids.push(Identity::new(format!("phi kills N{x}({r})"), tree(&phi_map(&nu(x, r), &plain)), zero_tree()));
        }
    }

    let mut items: Vec<(String, Element)> = Generator::all_up_to(alphabet, d)
        .into_iter()
        .filter(|g| !g.is_unit())
        .map(|g| (g.to_string(), engine::gen(g)))
        .collect();
    if cfg.degree > 1 {
        for m in random_monomials(alphabet, d, cfg.degree, cfg.samples, cfg.seed.wrapping_add(0x91)) {
            items.push((m.to_string(), engine::from_monomial(m)));
        }
    }
    items.sort_by(|a, b| a.0.cmp(&b.0));
    items.dedup_by(|a, b| a.0 == b.0);
    for (name, e) in &items {
        ids.push(
            Identity::new(format!("phi pi {name}"), tree(&phi_map(&pi_map(e), &plain)), tree(e))
                .formulas(format!("φ(π({name}))"), name.clone()),
        );
    }
    let mut witems = wreath_generators(alphabet, d - 1);
    if cfg.degree > 1 {
        for m in random_wreath_monomials(alphabet, d - 1, cfg.degree, cfg.samples, cfg.seed.wrapping_add(0x92)) {
            witems.push((m.to_string(), WreathElement::basis(m)));
        }
    }
    witems.sort_by(|a, b| a.0.cmp(&b.0));
    witems.dedup_by(|a, b| a.0 == b.0);
    for (name, e) in &witems {
        ids.push(
            Identity::new(format!("pi phi {name}"), wreath(&pi_map(&phi_map(e, &plain))), wreath(e))
                .formulas(format!("π(φ({name}))"), name.clone()),
        );
    }

    for g in Generator::all_up_to(alphabet, d).into_iter().filter(|g| !g.is_unit()) {
        let lhs = delta_w(&pi_map(&engine::gen(g)), &ctx);
        let rhs = pi_on_leg(&pi_on_leg(&delta(&engine::gen(g), &plain), 0)?, 1)?;
        ids.push(
            Identity::new(format!("delta-pi {g}"), lhs, rhs).formulas(format!("Φ_w(π({g}))"), format!("(π⊗π)Δ({g})")),
        );
    }

    ids.extend(matrix_identities(alphabet, d));

    let mut report = cfg.report("wreath-iso").param("relators", &set.name);
    report.extend(checker.run(ids));
    if let Some(group) = &set.classical {
        let spec = SubgroupSpec::Elements(group.clone());
        for n in 1..=d {
            let points = enumerate_gp(&spec, alphabet.size(), n)?;
            let rank = indicator_span_rank(&points, n);
            let order = gp_order(group.len(), alphabet.size(), n);
            report.push(v.exact(
                format!("indicator rank n={n}"),
                format!("rank {rank}"),
                format!("|r_{n}(G_P)| = {order}"),
                rank as u128 == order && points.len() as u128 == order,
            ));
        }
    }
    Ok(report.finish(cfg.timings.then_some(started)))
}

/// `Φ_w` is well defined and coassociative, and the block matrices
/// `a^{(λ,X)}` are corepresentations.
pub fn verify_wreath_comult(
    cfg: &RunConfig,
    set: &RelatorSet,
    v: &Verifier,
) -> Result<VerificationReport, FinconError> {
    require_depth_one(set)?;
    let started = Instant::now();
    let alphabet = set.alphabet;
    let ctx = set.ctx();
    let d = cfg.depth.max(1);
    let checker = Checker { v, set, bounds: QuotientBounds { word_len: cfg.word_len, ..Default::default() } };
    let bases: Vec<Generator> = (1..d).flat_map(|n| Generator::all(alphabet, n)).collect();
    let mut ids = Vec::new();
    for x in alphabet.letters() {
        for y in alphabet.letters() {
            for &g in &bases {
                let a = nu(x, &engine::gen(g));
                let p = pgen(x, y);
                ids.push(Identity::new(
                    format!("Phi_w commutation N{x}({g}) P[{x},{y}]"),
                    delta_w(&wreath_product(&a, &p), &ctx),
                    delta_w(&wreath_product(&p, &a), &ctx),
                ));
            }
        }
    }
    let pairs =
        random_monomials(alphabet, d.saturating_sub(1).max(1), 2, cfg.samples.min(64), cfg.seed.wrapping_add(0x93));
    for (i, m) in pairs.iter().enumerate() {
        let x = (i % alphabet.size()) as u8;
        let whole = WreathElement::basis(WreathMonomial::from_symbols([WreathSymbol::Nu(x, m.clone())]));
        let split = WreathElement::basis(WreathMonomial::from_symbols(
            m.factors().iter().map(|&g| WreathSymbol::Nu(x, Monomial::generator(g))),
        ));
        ids.push(Identity::new(
            format!("Phi_w multiplicative N{x}({m})"),
            delta_w(&whole, &ctx),
            delta_w(&split, &ctx),
        ));
    }
    for (name, e) in wreath_generators(alphabet, d - 1) {
        let once = delta_w(&e, &ctx);
        ids.push(Identity::new(
            format!("Phi_w coassociative {name}"),
            delta_w_on_leg(&once, 1, &ctx)?,
            delta_w_on_leg(&once, 0, &ctx)?,
        ));
    }
    let letters: Vec<u8> = alphabet.letters().collect();
    for n in 1..d {
        let index: Vec<(Word, u8)> =
            alphabet.words(n).into_iter().flat_map(|w| letters.iter().map(move |&x| (w, x))).collect();
        for &p in &index {
            for &q in &index {
                let lhs = delta_w(&block_entry('a', p, q), &ctx);
                let mut rhs = TensorElement::zero(vec![LegKind::Wreath, LegKind::Wreath]);
                for &r in &index {
                    rhs.add_assign_scaled(
                        &tensor_product(&wreath(&block_entry('a', p, r)), &wreath(&block_entry('a', r, q))),
                        &Q::one(),
                    )?;
                }
                ids.push(Identity::new(format!("Phi_w block n={n} ({},{}),({},{})", p.0, p.1, q.0, q.1), lhs, rhs));
            }
        }
    }
    let mut report = cfg.report("wreath-comult").param("relators", &set.name);
    report.extend(checker.run(ids));
    Ok(report.finish(cfg.timings.then_some(started)))
}

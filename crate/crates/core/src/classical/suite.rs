//! Exact classical suites: the abelianization relations and span, duality of
//! the structure maps with the group operations, and the counts and closure
//! of the truncations of `G_P`.

use std::collections::BTreeSet;
use std::time::Instant;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    aut_order, enumerate_aut, enumerate_gp, gp_order, indicator_span_rank, is_group, tensor_eval, ActionTable,
    ClassicalError, LegPoint, Portrait, SubgroupSpec,
};
use crate::engine::{self, Element, Generator};
use crate::hopf::{antipode, counit, delta};
use crate::report::{VerificationReport, Verifier};
use crate::rewrite::Ctx;
use crate::selfsim::rho;
use crate::suites::RunConfig;
use crate::words::{Alphabet, Word};

/// Pairs `(g, h)` checked exhaustively up to this many, sampled above.
pub const MAX_PAIRS: usize = 4096;

fn with_tables(group: Vec<Portrait>) -> Vec<(Portrait, ActionTable)> {
    group
        .into_iter()
        .map(|p| {
            let t = p.action_table();
            (p, t)
        })
        .collect()
}

/// Every generator of depth `1..=d`, the unit, and all products of two generators.
fn duality_elements(alphabet: Alphabet, d: usize) -> Vec<(String, Element)> {
    let gens: Vec<Generator> = Generator::all_up_to(alphabet, d).into_iter().filter(|g| !g.is_unit()).collect();
    let mut out = vec![("1".to_string(), engine::one())];
    for &g in &gens {
        out.push((g.to_string(), engine::gen(g)));
    }
    for &g in &gens {
        for &h in &gens {
            out.push((format!("{g}*{h}"), engine::product(&engine::gen(g), &engine::gen(h))));
        }
    }
    out
}

/// Defining and absorption relations of depth `≤ d` evaluated on every
/// portrait of `Aut(X^[d])`, and the rank of the span of indicator products.
pub fn verify_abelianization(cfg: &RunConfig, v: &Verifier) -> Result<VerificationReport, ClassicalError> {
    let started = Instant::now();
    let alphabet = cfg.alphabet();
    let group = with_tables(enumerate_aut(cfg.k, cfg.depth)?);
    let mut report = cfg.report("abelianization");
    let mut relations = engine::defining_relations(alphabet, cfg.depth);
    relations.extend(engine::absorption_relations(alphabet, cfg.depth));
    for (name, r) in &relations {
        let mut holds = true;
        for (_, t) in &group {
            holds &= t.eval(r)?.is_zero();
        }
        report.push(v.exact(format!("pointwise {name}"), format!("{r}"), "0".into(), holds));
    }
    let portraits: Vec<Portrait> = group.into_iter().map(|(p, _)| p).collect();
    let rank = indicator_span_rank(&portraits, cfg.depth);
    report.push(v.exact(
        format!("indicator span rank k={} d={}", cfg.k, cfg.depth),
        rank.to_string(),
        portraits.len().to_string(),
        rank == portraits.len() && portraits.len() as u128 == aut_order(cfg.k, cfg.depth),
    ));
    Ok(report.finish(cfg.timings.then_some(started)))
}

/// `Δ`, `κ`, `ε` and `ρ_x` against multiplication, inversion, the identity
/// and sections, under evaluation at group elements.
pub fn verify_duality(cfg: &RunConfig, v: &Verifier) -> Result<VerificationReport, ClassicalError> {
    let started = Instant::now();
    let alphabet = cfg.alphabet();
    let ctx = Ctx::new(alphabet);
    let group = with_tables(enumerate_aut(cfg.k, cfg.depth)?);
    let n = group.len();
    let pairs: Vec<(usize, usize)> = if n * n <= MAX_PAIRS {
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xd0a1);
        (0..MAX_PAIRS).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect()
    };
    let products: Vec<ActionTable> = pairs
        .iter()
        .map(|&(i, j)| group[i].0.compose(&group[j].0).map(|gh| gh.action_table()))
        .collect::<Result<_, _>>()?;
    let inverses: Vec<ActionTable> = group.iter().map(|(g, _)| g.invert().action_table()).collect();
    let identity = Portrait::identity(cfg.k, cfg.depth).action_table();
    let mut report = cfg.report("duality");
    for (name, a) in duality_elements(alphabet, cfg.depth) {
        let d = delta(&a, &ctx);
        let mut holds = true;
        for (&(i, j), gh) in pairs.iter().zip(&products) {
            let point = [LegPoint::Group(&group[i].0, &group[i].1), LegPoint::Group(&group[j].0, &group[j].1)];
            holds &= tensor_eval(&d, &point)? == gh.eval(&a)?;
        }
        report.push(v.exact(format!("delta {name}"), format!("Δ({name})(g,h)"), format!("{name}(gh)"), holds));
        let k = antipode(&a);
        let mut holds = true;
        for ((_, t), inv) in group.iter().zip(&inverses) {
            holds &= t.eval(&k)? == inv.eval(&a)?;
        }
        report.push(v.exact(format!("antipode {name}"), format!("κ({name})(g)"), format!("{name}(g⁻¹)"), holds));
        let holds = counit(&a) == identity.eval(&a)?;
        report.push(v.exact(format!("counit {name}"), format!("ε({name})"), format!("{name}(e)"), holds));
        if engine::max_depth(&a) < cfg.depth {
            for x in alphabet.letters() {
                let r = rho(x, &a, &ctx);
                let mut holds = true;
                for (g, t) in &group {
                    let section = g.section(Word::letter_word(x))?.action_table();
                    holds &= t.eval(&r)? == section.eval(&a)?;
                }
                report.push(v.exact(
                    format!("rho_{x} {name}"),
                    format!("ρ_{x}({name})(g)"),
                    format!("{name}(g|_{x})"),
                    holds,
                ));
            }
        }
    }
    Ok(report.finish(cfg.timings.then_some(started)))
}

/// `|r_n(G_P)| = |P|^{(k^n−1)/(k−1)}` by enumeration for `n ≤ depth`, and
/// closure of each truncation under composition, inversion and sections.
pub fn verify_gp(cfg: &RunConfig, name: &str, v: &Verifier) -> Result<VerificationReport, ClassicalError> {
    let started = Instant::now();
    let spec = SubgroupSpec::preset(name, cfg.k)?;
    let p = spec.elements(cfg.k)?;
    let allowed: BTreeSet<_> = p.iter().cloned().collect();
    let mut report = cfg.report("gp").param("subgroup", name);
    for n in 1..=cfg.depth {
        let set = enumerate_gp(&spec, cfg.k, n)?;
        let want = gp_order(p.len(), cfg.k, n);
        report.push(v.exact(
            format!("count {name} n={n}"),
            set.len().to_string(),
            want.to_string(),
            set.len() as u128 == want,
        ));
        report.push(v.exact(format!("group {name} n={n}"), format!("r_{n}(G_P)"), "a group".into(), is_group(&set)));
        let mut closed = true;
        for g in &set {
            for x in Alphabet::new(cfg.k).expect("valid k").letters() {
                closed &= g.section(Word::letter_word(x))?.labels_in(&allowed);
            }
        }
        report.push(v.exact(format!("sections {name} n={n}"), "g|_x".into(), format!("r_{}(G_P)", n - 1), closed));
    }
    Ok(report.finish(cfg.timings.then_some(started)))
}

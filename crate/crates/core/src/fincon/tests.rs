use super::iso::*;
use super::wreath::*;
use super::*;
use crate::classical::{abelian_eval, enumerate_gp};
use crate::parse::{parse_element, parse_wreath};
use crate::report::Verifier;
use crate::selfsim::sigma;
use crate::suites::random_monomials;
use num_traits::Zero;
use proptest::prelude::*;

fn alph(k: usize) -> Alphabet {
    Alphabet::new(k).unwrap()
}

fn el(s: &str, k: usize) -> Element {
    parse_element(s, alph(k)).unwrap()
}

fn wr(s: &str, k: usize) -> WreathElement {
    parse_wreath(s, alph(k)).unwrap()
}

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

fn policy() -> SearchPolicy {
    SearchPolicy::default()
}

fn in_j(e: &Element, set: &RelatorSet) -> bool {
    quotient_reduce(e, set, &QuotientBounds::default(), &policy()).is_zero()
}

#[test]
fn classical_presets() {
    let t = RelatorSet::preset("trivial", alph(2)).unwrap();
    assert_eq!(t.vanishing, vec![(w("0"), w("1")), (w("1"), w("0"))]);
    assert!(t.relators.is_empty());
    let full = RelatorSet::preset("full", alph(2)).unwrap();
    assert!(full.is_zero());
    assert!(RelatorSet::preset("cyclic2", alph(2)).unwrap().is_zero());
    assert!(RelatorSet::preset("cyclic3", alph(2)).is_err());
    assert!(RelatorSet::preset("bogus", alph(2)).is_err());
    let c = RelatorSet::preset("cyclic", alph(3)).unwrap();
    // three classes of three identified generators
    assert_eq!(c.relators.len(), 6);
    assert!(c.vanishing.is_empty());
    assert!(c.in_span(&el("a[0,1] - a[2,0]", 3)));
    assert!(!c.in_span(&el("a[0,1] - a[1,0]", 3)));
    let klein = RelatorSet::preset("klein", alph(4)).unwrap();
    assert_eq!(klein.vanishing.len(), 0);
    assert!(klein.relators.iter().any(|r| engine::max_degree(r) == 2));
}

#[test]
fn relators_vanish_on_the_group() {
    for (name, k) in [("trivial", 2), ("cyclic", 3), ("trivial", 3), ("klein", 4)] {
        let set = RelatorSet::preset(name, alph(k)).unwrap();
        let spec = SubgroupSpec::Elements(set.classical.clone().unwrap());
        for p in enumerate_gp(&spec, k, 1).unwrap() {
            for (_, r) in set.generators() {
                assert_eq!(abelian_eval(&r, &p).unwrap(), Q::zero(), "{name} {r}");
            }
        }
    }
}

#[test]
fn relator_files() {
    let text = r#"{"name": "demo", "depth": 1, "relators": ["a[0,0] - a[1,1]"], "vanishing": [["0","1"]],
        "witnesses": [{"relator": 0, "terms": [["a[0,0]", "a[0,1]", "right"], ["a[0,1]", "a[1,1]", "left"]]}]}"#;
    let set = RelatorSet::from_json(text, alph(2)).unwrap();
    assert_eq!(set.name, "demo");
    assert_eq!(set.generators().len(), 2);
    assert_eq!(set.coideal_witness(0).unwrap().len(), 2);
    let deep = r#"{"depth": 1, "relators": ["a[00,01]"]}"#;
    assert!(matches!(RelatorSet::from_json(deep, alph(2)), Err(FinconError::TooDeep { .. })));
    assert!(RelatorSet::from_json(r#"{"depth": 1, "extra": 1}"#, alph(2)).is_err());
}

#[test]
fn witnesses_for_classical_relators() {
    let t = RelatorSet::preset("trivial", alph(2)).unwrap();
    let wit = t.coideal_witness(0).unwrap();
    // Δ(a[0,1]) = a[0,0]⊗a[0,1] + a[0,1]⊗a[1,1]
    assert_eq!(wit.len(), 2);
    let c = RelatorSet::preset("cyclic", alph(3)).unwrap();
    let plain = Ctx::new(alph(3));
    for (i, (name, r)) in c.generators().iter().enumerate() {
        let terms = c.coideal_witness(i).unwrap_or_else(|| panic!("no witness for {name}"));
        let id = witness_identity(name, r, &terms, &plain);
        let diff = id.lhs.sub(&id.rhs).unwrap();
        assert!(crate::tensor::prove_zero_tensor(&diff, &plain, &policy()).is_zero());
        for t in &terms {
            assert!(match t.ideal {
                Side::Left => c.in_span(&t.left),
                Side::Right => c.in_span(&t.right),
            });
        }
    }
}

#[test]
fn quotient_membership() {
    let c = RelatorSet::preset("cyclic", alph(3)).unwrap();
    let plain = Ctx::new(alph(3));
    let r = el("a[0,1] - a[1,2]", 3);
    assert!(in_j(&rho_word(w("0"), &r, &plain), &c));
    let both = engine::product(&engine::product(&el("a[1,2]", 3), &rho_word(w("2"), &r, &plain)), &el("a[0,0]", 3));
    assert!(in_j(&both, &c));
    // σ_z(r) needs left cofactors a[z,t] against ρ_t(r)
    assert!(in_j(&sigma(1, &r, &plain), &c));
    assert!(!in_j(&el("a[0,1]", 3), &c));
    assert!(!in_j(&el("a[0,1] - a[1,0]", 3), &c));
    let t = RelatorSet::preset("trivial", alph(2)).unwrap();
    assert!(in_j(&el("a[10,01]", 2), &t));
    // a[00,11] = a[0,1]a[00,11] and ρ_0(a[0,1]) = a[00,01] + a[10,01]
    assert!(in_j(&el("a[00,11]", 2), &t));
    assert!(in_j(&el("a[00,01]", 2), &t));
    // the counit is a character killing J
    assert!(!in_j(&el("a[00,00]", 2), &t));
}

#[test]
fn woronowicz_small_suites() {
    let cfg = RunConfig { k: 2, word_len: 1, ..Default::default() };
    for name in ["none", "trivial"] {
        let set = RelatorSet::preset(name, alph(2)).unwrap();
        let v = Verifier::new(set.ctx(), policy());
        let r = verify_woronowicz_ideal(&cfg, &set, &v);
        assert!(r.pass, "{name}: {:?}", r.failures().map(|f| &f.name).collect::<Vec<_>>());
    }
    let cfg = RunConfig { k: 3, word_len: 1, ..Default::default() };
    let set = RelatorSet::preset("cyclic", alph(3)).unwrap();
    let r = verify_woronowicz_ideal(&cfg, &set, &Verifier::new(set.ctx(), policy()));
    assert!(r.pass, "{:?}", r.failures().map(|f| (&f.name, &f.residual)).collect::<Vec<_>>());
    assert!(r.identities.iter().any(|i| i.name.starts_with("woronowicz w=2 ")));
}

#[test]
fn missing_witness_is_unverified() {
    // a relator whose coproduct has no decomposition in the depth-1 slice
    let set = RelatorSet::from_json(r#"{"depth": 1, "relators": ["a[0,0]"]}"#, alph(3)).unwrap();
    let cfg = RunConfig { k: 3, word_len: 0, ..Default::default() };
    let r = verify_woronowicz_ideal(&cfg, &set, &Verifier::new(set.ctx(), policy()));
    assert!(!r.pass);
    assert!(r.identities.iter().any(|i| i.certificate == Certificate::Unverified));
}

#[test]
fn wreath_reduce_examples() {
    let zero = RelatorSet::zero(alph(2));
    let b = QuotientBounds::default();
    let comm = wr("N0(a[0,1])*P[0,1] - P[0,1]*N0(a[0,1])", 2);
    assert!(wreath_reduce(&comm, &zero, &b, &policy()).is_zero());
    assert!(wreath_reduce(&wr("P[0,0]*P[0,1]", 2), &zero, &b, &policy()).is_zero());
    let free = wr("N0(a[0,1])*N1(a[0,1])", 2);
    let out = wreath_reduce(&free, &zero, &b, &policy());
    assert_eq!(out.certificate, Certificate::Irreducible);
    assert_eq!(out.result.iter().next().unwrap().0.degree(), 2);
    let t = RelatorSet::preset("trivial", alph(2)).unwrap();
    assert!(wreath_reduce(&wr("P[1,0]", 2), &t, &b, &policy()).is_zero());
    assert!(wreath_reduce(&wr("N1(a[00,10])", 2), &t, &b, &policy()).is_zero());
    let c = RelatorSet::preset("cyclic", alph(3)).unwrap();
    assert!(wreath_reduce(&wr("P[0,1] - P[1,2]", 3), &c, &b, &policy()).is_zero());
    assert!(wreath_reduce(&wr("N2(a[0,1]) - N2(a[1,2])", 3), &c, &b, &policy()).is_zero());
    assert!(!wreath_reduce(&wr("P[0,1]", 3), &c, &b, &policy()).is_zero());
}

#[test]
fn pi_and_phi_examples() {
    let ctx = Ctx::new(alph(2));
    assert_eq!(pi_map(&el("a[01,10]", 2)), wr("P[0,1]*N0(a[1,0])", 2));
    assert_eq!(pi_map(&el("a[0,1]", 2)), wr("P[0,1]", 2));
    assert_eq!(pi_map(&engine::one()), wreath_one());
    assert_eq!(phi_map(&wr("N0(a[1,0])", 2), &ctx), el("a[01,00] + a[01,10]", 2));
    assert_eq!(phi_map(&wr("P[0,1]", 2), &ctx), el("a[0,1]", 2));
    let back = phi_map(&pi_map(&el("a[01,10]", 2)), &ctx);
    assert!(engine::prove_zero(&back.sub(&el("a[01,10]", 2)), &ctx, &policy()).is_zero());
}

#[test]
fn delta_w_examples() {
    let ctx = Ctx::new(alph(2));
    let d = delta_w(&wr("P[0,1]", 2), &ctx);
    assert_eq!(d.to_string(), "P[0,0] ox P[0,1] + P[0,1] ox P[0,0]");
    // Φ_w(N0(a[0,1])) = Σ_{z,w} N0(a[0,w])P[0,z] ⊗ N_z(a[w,1])
    let d = delta_w(&wr("N0(a[0,1])", 2), &ctx);
    assert_eq!(d.len(), 4);
}

#[test]
fn small_iso_suites() {
    let cfg = RunConfig { k: 2, depth: 2, degree: 2, samples: 8, word_len: 1, ..Default::default() };
    for name in ["none", "trivial", "full"] {
        let set = RelatorSet::preset(name, alph(2)).unwrap();
        let v = Verifier::new(set.ctx(), policy());
        let r = verify_wreath_iso(&cfg, &set, &v).unwrap();
        assert!(r.pass, "{name}: {:?}", r.failures().map(|f| (&f.name, &f.residual)).collect::<Vec<_>>());
        let r = verify_wreath_comult(&cfg, &set, &v).unwrap();
        assert!(r.pass, "{name}: {:?}", r.failures().map(|f| (&f.name, &f.residual)).collect::<Vec<_>>());
    }
    let deep = RelatorSet::from_json(r#"{"depth": 2, "relators": []}"#, alph(2)).unwrap();
    let v = Verifier::new(deep.ctx(), policy());
    assert!(matches!(verify_wreath_iso(&cfg, &deep, &v), Err(FinconError::NotDepthOne(2))));
}

#[test]
fn iso_includes_the_classical_rank() {
    let cfg = RunConfig { k: 2, depth: 2, degree: 1, word_len: 1, ..Default::default() };
    let set = RelatorSet::preset("trivial", alph(2)).unwrap();
    let r = verify_wreath_iso(&cfg, &set, &Verifier::new(set.ctx(), policy())).unwrap();
    let rank = r.identities.iter().find(|i| i.name == "indicator rank n=2").unwrap();
    assert_eq!(rank.certificate, Certificate::Verified);
}

#[test]
fn membership_suite() {
    let cfg = RunConfig { k: 3, word_len: 1, ..Default::default() };
    let set = RelatorSet::preset("cyclic", alph(3)).unwrap();
    let r = verify_membership(&cfg, &set, &Verifier::new(set.ctx(), policy()));
    assert!(r.pass);
    assert!(!r.identities.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn phi_inverts_pi(seed in any::<u64>()) {
        let ctx = Ctx::new(alph(2));
        for m in random_monomials(alph(2), 2, 3, 4, seed) {
            let e = engine::from_monomial(m);
            let back = phi_map(&pi_map(&e), &ctx);
            prop_assert!(engine::prove_zero(&back.sub(&e), &ctx, &policy()).is_zero());
        }
    }

    #[test]
    fn pi_inverts_phi(seed in any::<u64>()) {
        let ctx = Ctx::new(alph(2));
        let zero = RelatorSet::zero(alph(2));
        for m in random_wreath_monomials(alph(2), 1, 3, 4, seed) {
            let e = WreathElement::basis(m);
            let back = pi_map(&phi_map(&e, &ctx));
            let out = wreath_reduce(&back.sub(&e), &zero, &QuotientBounds::default(), &policy());
            prop_assert!(out.is_zero(), "{} -> {}", e, out.result);
            prop_assert!(wreath_reduce(&back.sub(&e), &zero, &QuotientBounds::default(), &policy()).is_zero());
        }
    }

    #[test]
    fn two_sided_multiples_of_relators_lie_in_j(seed in any::<u64>()) {
        let set = RelatorSet::preset("cyclic", alph(3)).unwrap();
        let plain = Ctx::new(alph(3));
        let cof = random_monomials(alph(3), 1, 1, 2, seed);
        let r = &set.relators[(seed % set.relators.len() as u64) as usize];
        let x = (seed % 3) as u8;
        let e = engine::product(
            &engine::product(&engine::from_monomial(cof[0].clone()), &rho_word(Word::letter_word(x), r, &plain)),
            &engine::from_monomial(cof[1].clone()),
        );
        prop_assert!(in_j(&e, &set));
    }
}

use super::*;
use crate::classical::enumerate_aut;
use crate::hopf::{antipode, counit, delta};
use crate::parse::parse_element;
use crate::rewrite::Ctx;
use proptest::prelude::*;
use std::f64::consts::FRAC_PI_4;

fn el(s: &str, k: usize) -> Element {
    parse_element(s, Alphabet::new(k).unwrap()).unwrap()
}

#[test]
fn two_projection_relations_and_commutator() {
    for theta in [0.3, 0.7, 1.1, FRAC_PI_4] {
        let r = two_projection_rep(theta, false).unwrap();
        let report = r.relation_report(3);
        assert!(report.max_residual < 1e-12, "{theta}: {}", report.max_residual);
        assert!(report.pass);
    }
    let r = two_projection_rep(FRAC_PI_4, false).unwrap();
    let comm = r.eval(&el("a[00,00]*a[10,10] - a[10,10]*a[00,00]", 2));
    assert!((op_norm(&comm) - 0.5).abs() < 1e-12);
    let p = r.generator_matrix(Generator::of(w("00"), w("00")));
    assert_eq!(r.generator_matrix(Generator::of(w("00"), w("01"))), identity(2) - p);
    assert_eq!(r.eval(&engine::one()), identity(2));
    assert!(matches!(two_projection_rep(0.0, false), Err(RepError::DegenerateAngle(_))));
    assert!(two_projection_rep(0.0, true).is_ok());
}

#[test]
fn delta_extension_below_stored_depth() {
    let r = two_projection_rep(0.5, false).unwrap();
    assert_eq!(r.generator_matrix(Generator::of(w("100"), w("101"))), Mat::zeros(2, 2));
    assert_eq!(
        r.generator_matrix(Generator::of(w("101"), w("111"))),
        r.generator_matrix(Generator::of(w("10"), w("11")))
    );
}

#[test]
fn classical_rep_examples() {
    let group = enumerate_aut(2, 1).unwrap();
    let r = classical_rep(&group).unwrap();
    // the swap comes second in enumeration order
    let m = r.generator_matrix(Generator::of(w("0"), w("1")));
    assert_eq!(m, Mat::from_diagonal(&Vector::from_vec(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)])));
    assert_eq!(r.relation_report(3).max_residual, 0.0);
    let not_group = vec![Portrait::random(2, 1, &Permutation::all(2), &mut ChaCha8Rng::seed_from_u64(1)); 1];
    if !not_group[0].is_identity() {
        assert!(matches!(classical_rep(&not_group), Err(RepError::NotAGroup)));
    }
}

/// Under the Kronecker pairing the diagonal image of `Δa` at `(g,h)` is the
/// value of `a` at `gh`.
#[test]
fn classical_rep_dualizes_multiplication() {
    let group = enumerate_aut(2, 2).unwrap();
    let r = classical_rep(&group).unwrap();
    let ctx = Ctx::new(Alphabet::new(2).unwrap());
    let n = group.len();
    for g in Generator::all_up_to(Alphabet::new(2).unwrap(), 2) {
        let d = numeric_eval_tensor(&delta(&engine::gen(g), &ctx), &r).unwrap();
        for (i, a) in group.iter().enumerate() {
            for (j, b) in group.iter().enumerate() {
                let expected = a.compose(b).unwrap().action_table().indicator(g).unwrap() as i64 as f64;
                assert_eq!(d[(i * n + j, i * n + j)].re, expected);
            }
        }
    }
    let _ = (antipode, counit);
}

#[test]
fn random_wreath_reps_are_representations() {
    for (k, depth, dim) in [(2, 3, 12), (3, 2, 18), (4, 2, 16)] {
        let r = random_wreath_rep(k, depth, dim, &Permutation::all(k), 7);
        let report = r.relation_report(depth + 1);
        assert!(report.max_residual < 1e-10, "k={k}: {}", report.max_residual);
    }
    let cyc = SubgroupSpec::preset("cyclic", 3).unwrap().elements(3).unwrap();
    let r = random_wreath_rep(3, 2, 18, &cyc, 3);
    assert!(r.relation_report(3).pass);
    // a[0,1] vanishes classically for the trivial label group
    let r = random_wreath_rep(2, 2, 8, &[Permutation::identity(2)], 3);
    assert_eq!(op_norm(&r.generator_matrix(Generator::of(w("0"), w("1")))), 0.0);
}

#[test]
fn random_wreath_reps_are_noncommutative() {
    let r = random_wreath_rep(2, 3, 12, &Permutation::all(2), 11);
    let comm = r.eval(&el("a[00,00]*a[10,10] - a[10,10]*a[00,00]", 2));
    assert!(op_norm(&comm) > 1e-3);
    let r = random_wreath_rep(3, 2, 18, &Permutation::all(3), 11);
    // depth one is commutative for k ≤ 3
    let comm = r.eval(&el("a[00,00]*a[11,11] - a[11,11]*a[00,00]", 3));
    assert!(op_norm(&comm) > 1e-3);
}

#[test]
fn wreath_symbols_commute_and_match_tree_images() {
    let r = random_wreath_rep(2, 2, 12, &Permutation::all(2), 5);
    let m = Monomial::generator(Generator::of(w("0"), w("1")));
    for x in 0..2u8 {
        let nu = r.wreath_symbol(&WreathSymbol::Nu(x, m.clone())).unwrap();
        for y in 0..2u8 {
            let p = r.wreath_symbol(&WreathSymbol::P(x, y)).unwrap();
            assert!(op_norm(&(&p * &nu - &nu * &p)) < 1e-12);
            let tree = r.generator_matrix(Generator::of(
                Word::letter_word(x).concat(w("0")),
                Word::letter_word(y).concat(w("1")),
            ));
            assert!(op_norm(&(&p * &nu - tree)) < 1e-12);
        }
    }
    assert!(two_projection_rep(0.4, false).unwrap().wreath_symbol(&WreathSymbol::P(0, 0)).is_err());
}

#[test]
fn refute_examples() {
    let reps = vec![two_projection_rep(FRAC_PI_4, false).unwrap()];
    match refute(&el("a[00,00]*a[11,11]", 2), &el("a[11,11]*a[00,00]", 2), &reps) {
        Refutation::Refuted { norm, .. } => assert!((norm - 0.5).abs() < 1e-9),
        other => panic!("{other:?}"),
    }
    let x = el("a[0,1]*a[10,11]", 2);
    assert_eq!(refute(&x, &x, &reps), Refutation::Inconclusive);
    let all = vec![two_projection_rep(FRAC_PI_4, false).unwrap(), random_wreath_rep(2, 3, 12, &Permutation::all(2), 1)];
    assert_eq!(refute(&el("a[00,00] + a[01,00]", 2), &el("a[0,0]", 2), &all), Refutation::Inconclusive);
}

#[test]
fn magic_rep_is_noncommutative() {
    let r = magic_unitary_rep(0.6).unwrap();
    assert!(r.relation_report(2).pass);
    let comm = r.eval(&el("a[0,0]*a[1,1] - a[1,1]*a[0,0]", 4));
    assert!(op_norm(&comm) > 0.1);
}

#[test]
fn probes_agree_with_kronecker() {
    let ctx = Ctx::new(Alphabet::new(2).unwrap());
    let r = two_projection_rep(0.9, false).unwrap();
    let t = delta(&el("a[00,01]*a[10,11] + 2*a[0,1]", 2), &ctx);
    let full = numeric_eval_tensor(&t, &r).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let probes: Vec<(Vector, Vector)> =
        (0..2).map(|_| (random_unit_vector(2, &mut rng), random_unit_vector(2, &mut rng))).collect();
    let x = probes[0].0.kronecker(&probes[1].0);
    let y = probes[0].1.kronecker(&probes[1].1);
    let expected = x.dotc(&(full * y));
    assert!((probe_value(&t, &r, &probes).unwrap() - expected).norm() < 1e-12);
}

#[test]
fn oracle_flags_false_identities() {
    let oracle = StandardOracle::new(2, None, 0).unwrap();
    let good = TensorElement::from_element(&el("a[00,10] + a[00,11] - a[0,1]", 2));
    assert!(oracle.check(&good).ok);
    let bad = TensorElement::from_element(&el("a[00,10] + a[01,11] - a[0,1]", 2));
    let s = oracle.check(&bad);
    assert!(!s.ok && !s.abelian_zero);
    // classically true but noncommutative
    let comm = TensorElement::from_element(&el("a[00,00]*a[11,11] - a[11,11]*a[00,00]", 2));
    let s = oracle.check(&comm);
    assert!(s.abelian_zero && !s.ok);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_reps_satisfy_relations(seed in any::<u64>(), k in 2usize..4) {
        let r = random_wreath_rep(k, 2, 3 * k, &Permutation::all(k), seed);
        prop_assert!(r.relation_report(3).max_residual < 1e-10);
    }

    #[test]
    fn eval_is_multiplicative(seed in any::<u64>()) {
        let r = random_wreath_rep(2, 2, 8, &Permutation::all(2), seed);
        let ms = crate::suites::random_monomials(Alphabet::new(2).unwrap(), 3, 2, 2, seed);
        let (a, b) = (engine::from_monomial(ms[0].clone()), engine::from_monomial(ms[1].clone()));
        let lhs = r.eval(&engine::product(&a, &b));
        let rhs = r.eval(&a) * r.eval(&b);
        prop_assert!(op_norm(&(lhs - rhs)) < 1e-10);
    }
}

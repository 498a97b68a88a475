use super::*;
use crate::engine::SearchPolicy;
use crate::engine::{self, Generator};
use crate::report::Verifier;
use crate::rewrite::Ctx;
use crate::suites::RunConfig;
use crate::words::Alphabet;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

fn perm(v: &[u8]) -> Permutation {
    Permutation::new(v.to_vec()).unwrap()
}

fn sample_portrait() -> Portrait {
    // root swaps, node 0 swaps, node 1 fixed
    Portrait::from_labels(2, 2, &[perm(&[1, 0]), perm(&[1, 0]), perm(&[0, 1])]).unwrap()
}

/// Brute-force action: the image of every leaf, computed letter by letter
/// from the stored labels without going through `act`.
fn leaf_images(g: &Portrait) -> Vec<Word> {
    let alphabet = Alphabet::new(g.k()).unwrap();
    alphabet
        .words(g.depth())
        .into_iter()
        .map(|leaf| {
            let mut out = vec![];
            for i in 0..leaf.len() {
                out.push(g.label(leaf.prefix(i)).apply(leaf.letter(i)));
            }
            Word::from_letters(&out).unwrap()
        })
        .collect()
}

#[test]
fn permutation_basics() {
    assert!(Permutation::new(vec![0, 0]).is_err());
    assert_eq!(Permutation::all(3).len(), 6);
    let c = Permutation::cycle(3);
    assert_eq!(c.images(), &[1, 2, 0]);
    assert!(c.compose(&c.inverse()).is_identity());
    let s = perm(&[1, 0, 2]);
    assert_eq!(s.compose(&c).apply(0), s.apply(c.apply(0)));
}

#[test]
fn act_examples() {
    let id = Portrait::identity(2, 2);
    for leaf in Alphabet::new(2).unwrap().words_up_to(2) {
        assert_eq!(id.act(leaf).unwrap(), leaf);
    }
    let swap = Portrait::from_labels(2, 1, &[perm(&[1, 0])]).unwrap();
    assert_eq!(swap.act(w("0")).unwrap(), w("1"));
    let g = sample_portrait();
    assert_eq!(g.act(w("00")).unwrap(), w("11"));
    assert!(g.act(w("000")).is_err());
}

#[test]
fn section_examples() {
    let g = sample_portrait();
    assert_eq!(g.section(w("0")).unwrap().label(Word::EMPTY), perm(&[1, 0]));
    assert_eq!(g.section(Word::EMPTY).unwrap(), g);
    let id = Portrait::identity(3, 2);
    assert!(id.section(w("2")).unwrap().is_identity());
    // defining identity: g·(wv) = (g·w)(g|_w·v)
    let alphabet = Alphabet::new(2).unwrap();
    for prefix in alphabet.words_up_to(2) {
        let s = g.section(prefix).unwrap();
        for v in alphabet.words(2 - prefix.len()) {
            let lhs = g.act(prefix.concat(v)).unwrap();
            let rhs = g.act(prefix).unwrap().concat(s.act(v).unwrap());
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn act_matches_label_recursion() {
    for g in enumerate_aut(2, 3).unwrap() {
        let leaves = Alphabet::new(2).unwrap().words(3);
        let images: Vec<Word> = leaves.iter().map(|&l| g.act(l).unwrap()).collect();
        assert_eq!(images, leaf_images(&g));
    }
}

#[test]
fn aut_counts_follow_wreath_recursion() {
    let mut n = 1u128;
    for d in 1..=4 {
        n = n.pow(2) * 2;
        let all = enumerate_aut(2, d).unwrap();
        assert_eq!(all.len() as u128, n);
        assert_eq!(aut_order(2, d), n);
        if d <= 3 {
            let tables: HashSet<Vec<Word>> = all.iter().map(leaf_images).collect();
            assert_eq!(tables.len(), all.len(), "distinct action tables");
        }
    }
    assert_eq!(enumerate_aut(2, 1).unwrap().len(), 2);
    assert_eq!(enumerate_aut(3, 2).unwrap().len(), 1296);
    assert!(matches!(enumerate_aut(3, 3), Err(ClassicalError::CapExceeded(_))));
}

#[test]
fn group_axioms_exhaustive() {
    for d in 1..=3 {
        let all = enumerate_aut(2, d).unwrap();
        let id = Portrait::identity(2, d);
        for g in &all {
            assert!(g.compose(&g.invert()).unwrap().is_identity());
            assert_eq!(&g.invert().invert(), g);
            assert_eq!(&g.compose(&id).unwrap(), g);
        }
        if d <= 2 {
            for g in &all {
                for h in &all {
                    let gh = g.compose(h).unwrap();
                    for l in &all {
                        assert_eq!(gh.compose(l).unwrap(), g.compose(&h.compose(l).unwrap()).unwrap());
                    }
                }
            }
        }
        assert!(is_group(&all));
    }
}

#[test]
fn compose_acts_right_to_left() {
    let all = enumerate_aut(2, 2).unwrap();
    for g in &all {
        for h in &all {
            let gh = g.compose(h).unwrap();
            for v in Alphabet::new(2).unwrap().words(2) {
                assert_eq!(gh.act(v).unwrap(), g.act(h.act(v).unwrap()).unwrap());
            }
        }
    }
}

#[test]
fn section_law_exhaustive() {
    let all = enumerate_aut(2, 2).unwrap();
    let words = Alphabet::new(2).unwrap().words_up_to(2);
    for g in &all {
        for h in &all {
            let gh = g.compose(h).unwrap();
            for &x in &words {
                let lhs = gh.section(x).unwrap();
                let rhs = g.section(h.act(x).unwrap()).unwrap().compose(&h.section(x).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn gp_counts_and_closure() {
    let trivial = SubgroupSpec::preset("trivial", 2).unwrap();
    let full = SubgroupSpec::preset("full", 2).unwrap();
    for n in 1..=3 {
        assert_eq!(enumerate_gp(&trivial, 2, n).unwrap().len(), 1);
        let gp = enumerate_gp(&full, 2, n).unwrap();
        assert_eq!(gp, enumerate_aut(2, n).unwrap());
        assert_eq!(gp.len() as u128, gp_order(2, 2, n));
    }
    let cyclic = SubgroupSpec::preset("cyclic", 3).unwrap();
    assert_eq!(cyclic.elements(3).unwrap().len(), 3);
    let gp = enumerate_gp(&cyclic, 3, 2).unwrap();
    assert_eq!(gp.len(), 81);
    assert_eq!(gp_order(3, 3, 2), 81);
    assert!(is_group(&gp));
    let allowed: BTreeSet<Permutation> = cyclic.elements(3).unwrap().into_iter().collect();
    for g in &gp {
        for x in 0..3 {
            assert!(g.section(Word::letter_word(x)).unwrap().labels_in(&allowed));
        }
    }
}

#[test]
fn subgroup_validation() {
    let bad = SubgroupSpec::Elements(vec![Permutation::identity(3), Permutation::cycle(3)]);
    assert!(matches!(bad.elements(3), Err(ClassicalError::NotSubgroup(_))));
    assert!(SubgroupSpec::preset("klein", 3).is_err());
    let klein = SubgroupSpec::preset("klein", 4).unwrap();
    assert_eq!(klein.elements(4).unwrap().len(), 4);
    assert!(SubgroupSpec::preset("nope", 2).is_err());
}

#[test]
fn indicator_examples() {
    let id = Portrait::identity(2, 2);
    assert_eq!(indicator_eval(Generator::of(w("01"), w("01")), &id).unwrap(), 1);
    assert_eq!(indicator_eval(Generator::of(w("01"), w("10")), &id).unwrap(), 0);
    let swap = Portrait::from_labels(2, 1, &[perm(&[1, 0])]).unwrap();
    assert_eq!(indicator_eval(Generator::of(w("1"), w("0")), &swap).unwrap(), 1);
    assert!(indicator_eval(Generator::of(w("11"), w("00")), &swap).is_err());
}

#[test]
fn substitute_into_oracle() {
    // a[0,1] + a[1,0] evaluates to [g·1=0] + [g·0=1]
    let x = engine::a(w("0"), w("1")).add(&engine::a(w("1"), w("0")));
    for g in enumerate_aut(2, 1).unwrap() {
        let expected = (g.act(w("1")).unwrap() == w("0")) as i64 + (g.act(w("0")).unwrap() == w("1")) as i64;
        assert_eq!(abelian_eval(&x, &g).unwrap(), Q::from_integer(expected.into()));
        assert_eq!(engine::substitute(&x, &PointEval(&g)).unwrap(), Q::from_integer(expected.into()));
    }
    assert_eq!(engine::substitute(&engine::one(), &PointEval(&Portrait::identity(2, 0))).unwrap(), Q::one());
}

#[test]
fn abelianization_spans_group_algebra() {
    for d in 1..=3 {
        let all = enumerate_aut(2, d).unwrap();
        assert_eq!(indicator_span_rank(&all, d), all.len());
    }
    let all = enumerate_aut(3, 1).unwrap();
    assert_eq!(indicator_span_rank(&all, 1), 6);
}

#[test]
fn relation_spot_check() {
    // Σ_y f_{0y,10} = f_{0,1}
    let lhs = engine::a(w("00"), w("10")).add(&engine::a(w("01"), w("10")));
    let rhs = engine::a(w("0"), w("1"));
    for g in enumerate_aut(2, 2).unwrap() {
        assert_eq!(abelian_eval(&lhs, &g).unwrap(), abelian_eval(&rhs, &g).unwrap());
    }
}

#[test]
fn portrait_json_round_trip() {
    let g = sample_portrait();
    let json = g.to_json();
    assert_eq!(json["e"], serde_json::json!([1, 0]));
    assert_eq!(json["0"], serde_json::json!([1, 0]));
    let map: BTreeMap<Word, Permutation> = json
        .as_object()
        .unwrap()
        .iter()
        .map(|(k, v)| {
            let images: Vec<u8> = serde_json::from_value(v.clone()).unwrap();
            (k.parse().unwrap(), Permutation::new(images).unwrap())
        })
        .collect();
    assert_eq!(Portrait::from_map(2, 2, &map).unwrap(), g);
}

proptest! {
    #[test]
    fn random_portraits_form_group(seed in any::<u64>(), k in 2usize..5, d in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all = Permutation::all(k);
        let g = Portrait::random(k, d, &all, &mut rng);
        let h = Portrait::random(k, d, &all, &mut rng);
        prop_assert!(g.compose(&g.invert()).unwrap().is_identity());
        let gh = g.compose(&h).unwrap();
        for v in Alphabet::new(k).unwrap().words(d) {
            prop_assert_eq!(gh.act(v).unwrap(), g.act(h.act(v).unwrap()).unwrap());
        }
        prop_assert_eq!(gh.truncate(d.saturating_sub(1)), g.truncate(d.saturating_sub(1)).compose(&h.truncate(d.saturating_sub(1))).unwrap());
    }
}

#[test]
fn exact_suites_pass() {
    let v = Verifier::new(Ctx::new(Alphabet::new(2).unwrap()), SearchPolicy::default());
    let cfg = RunConfig { k: 2, depth: 2, ..Default::default() };
    let ab = verify_abelianization(&cfg, &v).unwrap();
    assert!(ab.pass);
    assert!(ab.identities.iter().any(|r| r.name == "indicator span rank k=2 d=2" && r.lhs == "8"));
    let du = verify_duality(&cfg, &v).unwrap();
    assert!(du.pass, "{:?}", du.failures().map(|f| &f.name).collect::<Vec<_>>());
    assert!(du.identities.iter().any(|r| r.name == "rho_1 a[0,1]*a[1,1]"));
    let cfg3 = RunConfig { k: 3, depth: 2, ..Default::default() };
    let gp = verify_gp(&cfg3, "cyclic", &v).unwrap();
    assert!(gp.pass);
    assert!(gp.identities.iter().any(|r| r.name == "count cyclic n=2" && r.lhs == "81"));
    assert!(verify_gp(&cfg3, "klein", &v).is_err());
}

#[test]
fn duality_detects_a_wrong_map() {
    // the transpose is not the coinverse of a[0,1]*a[00,10]
    let g = enumerate_aut(2, 2).unwrap();
    let a = engine::product(&engine::a(w("0"), w("1")), &engine::a(w("00"), w("10")));
    let wrong = engine::product(&engine::a(w("1"), w("0")), &engine::a(w("10"), w("01")));
    let differs = g.iter().any(|p| abelian_eval(&wrong, p).unwrap() != abelian_eval(&a, &p.invert()).unwrap());
    assert!(differs);
}

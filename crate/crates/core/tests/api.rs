use qtree::engine::{self, SearchPolicy};
use qtree::fincon::RelatorSet;
use qtree::parse::parse_element;
use qtree::report::Verifier;
use qtree::suites::{run_suite, RunConfig};
use qtree::{hopf, Alphabet, Certificate, Ctx, ReductionBudget};

fn alph(k: usize) -> Alphabet {
    Alphabet::new(k).unwrap()
}

#[test]
fn parse_reduce_round_trip() {
    let ctx = Ctx::new(alph(3));
    let x = parse_element("a[0,1]*a[0,1] + 2*a[01,12] - a[1,2]*a[1,2]", alph(3)).unwrap();
    let out = engine::reduce(&x, &ctx, &ReductionBudget::default());
    let again = parse_element(&out.result.to_string(), alph(3)).unwrap();
    assert_eq!(engine::reduce(&again, &ctx, &ReductionBudget::default()).result, out.result);
    let zero = parse_element("a[0,1]*a[0,2]", alph(3)).unwrap();
    assert_eq!(engine::reduce(&zero, &ctx, &ReductionBudget::default()).certificate, Certificate::ProvedZero);
}

#[test]
fn relator_file_drives_quotient_suites() {
    let dir = std::env::temp_dir().join(format!("qtree-api-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("trivial.json");
    let text = r#"{"name": "diagonal", "depth": 1, "relators": ["a[0,1]"], "vanishing": [["1", "0"]]}"#;
    std::fs::write(&path, text).unwrap();
    let set = RelatorSet::load(path.to_str().unwrap(), alph(2)).unwrap();
    assert_eq!(set.name, "diagonal");
    assert!(set.classical.is_none());
    let cfg = RunConfig { preset: Some(path.to_str().unwrap().into()), word_len: 1, ..RunConfig::default() };
    let report = run_suite("woronowicz-ideal", &cfg).unwrap();
    assert!(report.pass, "{}", report.to_json());
    assert!(report.identities.iter().all(|i| i.soundness.is_none()));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn suites_are_deterministic() {
    let cfg = RunConfig { k: 3, depth: 1, samples: 30, seed: 11, ..RunConfig::default() };
    let a = run_suite("cqg-axioms", &cfg).unwrap().to_json();
    let b = run_suite("cqg-axioms", &cfg).unwrap().to_json();
    assert_eq!(a, b);
    assert!(a.contains("\"seed\": 11"));
}

#[test]
fn verifier_without_oracle_still_certifies() {
    let cfg = RunConfig::default();
    let v = Verifier::new(Ctx::new(alph(2)), SearchPolicy::default());
    let report = hopf::verify_hopf_laws(&cfg, &v);
    assert!(report.pass);
    assert!(report.identities.iter().all(|i| i.soundness.is_none() && i.certificate == Certificate::ProvedZero));
}

//! Acceptance gate: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qtree::classical::{self, enumerate_aut, enumerate_gp, gp_order, SubgroupSpec};
use qtree::engine::{self, SearchPolicy};
use qtree::report::{Identity, IdentityRecord, VerificationReport, Verifier};
use qtree::reps::{op_norm, two_projection_rep, StandardOracle};
use qtree::selfsim::rho;
use qtree::suites::{run_suite, RunConfig};
use qtree::{Alphabet, Certificate, Ctx, Generator, LegKind, TensorElement, Word};

const SOUNDNESS_TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn cfg(k: usize, depth: usize) -> RunConfig {
    RunConfig { k, depth, ..RunConfig::default() }
}

fn suite(name: &str, c: &RunConfig) -> VerificationReport {
    run_suite(name, c).unwrap_or_else(|e| panic!("suite {name}: {e}"))
}

fn w(s: &str) -> Word {
    s.parse().expect("word")
}

/// Every record proved or verified exactly, with all ProvedZero records rewritten.
fn all_proved(reports: &[VerificationReport]) -> (bool, String) {
    let mut records = 0;
    let mut failures = vec![];
    for r in reports {
        records += r.identities.len();
        failures.extend(r.failures().map(|f| format!("{}/{} {:?}", r.suite, f.name, f.certificate)));
    }
    let detail = if failures.is_empty() {
        format!("{records} records")
    } else {
        format!("{records} records, {} failing, first {}", failures.len(), failures[0])
    };
    (failures.is_empty() && records > 0, detail)
}

fn only_proved_zero(reports: &[VerificationReport]) -> bool {
    reports.iter().flat_map(|r| &r.identities).all(|i| i.certificate == Certificate::ProvedZero)
}

struct Gate {
    proved: Vec<IdentityRecord>,
    lines: Vec<(usize, bool, String)>,
}

impl Gate {
    fn run(
        &mut self,
        n: usize,
        title: &str,
        limit: Option<Duration>,
        f: impl FnOnce(&mut Vec<IdentityRecord>) -> Outcome,
    ) {
        let started = Instant::now();
        let out = f(&mut self.proved);
        let took = started.elapsed();
        let in_time = limit.is_none_or(|l| took <= l);
        let pass = out.pass && in_time;
        let timing = match limit {
            Some(l) => format!("{:.1}s of {}s", took.as_secs_f64(), l.as_secs()),
            None => format!("{:.1}s", took.as_secs_f64()),
        };
        let line =
            format!("{} criterion {n:>2}: {title}: {} ({timing})", if pass { "PASS" } else { "FAIL" }, out.detail);
        println!("{line}");
        self.lines.push((n, pass, line));
    }
}

fn keep(sink: &mut Vec<IdentityRecord>, reports: &[VerificationReport]) {
    for r in reports {
        sink.extend(r.identities.iter().filter(|i| i.certificate == Certificate::ProvedZero).cloned());
    }
}

fn engine_relations(sink: &mut Vec<IdentityRecord>) -> Outcome {
    let mut total = 0;
    let mut bad = vec![];
    for k in [2, 3] {
        let alphabet = Alphabet::new(k).expect("k");
        let oracle = StandardOracle::new(k, None, 0).expect("oracle");
        let v = Verifier::new(Ctx::new(alphabet), SearchPolicy::default()).with_oracle(&oracle);
        let mut relations = engine::defining_relations(alphabet, 2);
        relations.extend(engine::absorption_relations(alphabet, 2));
        for (name, r) in relations {
            let id = Identity::new(
                format!("k={k} {name}"),
                TensorElement::from_element(&r),
                TensorElement::zero(vec![LegKind::Tree]),
            );
            let rec = v.check(&id);
            total += 1;
            if rec.certificate != Certificate::ProvedZero {
                bad.push(rec.name.clone());
            }
            sink.push(rec);
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!("{total} relations, {} not ProvedZero {:?}", bad.len(), bad.first()),
    }
}

fn soundness(proved: &[IdentityRecord]) -> Outcome {
    let mut missing = 0;
    let mut bad = vec![];
    let mut worst = 0.0f64;
    for r in proved {
        match &r.soundness {
            None => missing += 1,
            Some(s) => {
                worst = worst.max(s.max_numeric);
                if !(s.abelian_zero && s.max_numeric < SOUNDNESS_TOL && s.numeric_reps > 0) {
                    bad.push(r.name.clone());
                }
            }
        }
    }
    Outcome {
        pass: missing == 0 && bad.is_empty() && !proved.is_empty(),
        detail: format!(
            "{} ProvedZero records, {missing} unchecked, {} unsound, max numeric {worst:.2e}",
            proved.len(),
            bad.len()
        ),
    }
}

fn main() -> ExitCode {
    let mut gate = Gate { proved: vec![], lines: vec![] };
    let secs = Duration::from_secs;

    gate.run(1, "relation engine ground truth", Some(secs(10)), engine_relations);

    gate.run(2, "coassociativity and unitarity", Some(secs(120)), |sink| {
        let reports: Vec<_> = [2, 3].iter().map(|&k| suite("cqg-axioms", &cfg(k, 2))).collect();
        keep(sink, &reports);
        let (ok, detail) = all_proved(&reports);
        Outcome { pass: ok && only_proved_zero(&reports), detail }
    });

    gate.run(3, "Hopf laws", None, |sink| {
        let reports: Vec<_> = [2, 3].iter().map(|&k| suite("hopf-laws", &cfg(k, 2))).collect();
        keep(sink, &reports);
        let (ok, detail) = all_proved(&reports);
        Outcome { pass: ok && only_proved_zero(&reports), detail }
    });

    gate.run(4, "tree action", None, |sink| {
        let reports = vec![suite("coaction", &cfg(2, 3))];
        keep(sink, &reports);
        let pairs: Vec<String> = reports[0]
            .identities
            .iter()
            .filter_map(|i| i.name.strip_prefix("inclusion ").and_then(|s| s.split(' ').next()).map(str::to_string))
            .collect();
        let covered = ["i_{1,2}", "i_{1,3}", "i_{2,3}"].iter().all(|p| pairs.iter().any(|q| q == p));
        let (ok, detail) = all_proved(&reports);
        Outcome { pass: ok && covered && only_proved_zero(&reports), detail }
    });

    gate.run(5, "restriction maps", None, |sink| {
        let ctx = Ctx::new(Alphabet::new(3).expect("k"));
        let got = rho(1, &engine::a(w("1"), w("2")), &ctx).to_string();
        let exact = got == "a[01,12] + a[11,12] + a[21,12]";
        let mut reports = vec![suite("restriction", &cfg(3, 1))];
        let verbatim =
            reports[0].identities.iter().any(|i| i.name == "rho_1(a[1,2])" && i.certificate == Certificate::Verified);
        let two = RunConfig { word_len: 2, ..cfg(2, 2) };
        reports.push(suite("restriction", &two));
        reports.push(suite("sigma-kappa", &two));
        keep(sink, &reports);
        let (ok, detail) = all_proved(&reports);
        Outcome { pass: exact && verbatim && ok, detail: format!("rho_1(a[1,2]) = {got}; {detail}") }
    });

    gate.run(6, "psi axiom and delta-rho factorization", Some(secs(300)), |sink| {
        let two = RunConfig { word_len: 2, ..cfg(2, 2) };
        let reports = vec![suite("psi-axiom", &two), suite("delta-rho", &two)];
        keep(sink, &reports);
        let (ok, detail) = all_proved(&reports);
        Outcome { pass: ok && only_proved_zero(&reports), detail }
    });

    gate.run(7, "classical oracle", None, |_| {
        let mut counts = vec![];
        let mut pass = true;
        for (k, d, want) in [(2, 1, 2usize), (2, 2, 8), (2, 3, 128), (2, 4, 32768), (3, 2, 1296)] {
            let n = enumerate_aut(k, d).map(|g| g.len()).unwrap_or(0);
            pass &= n == want && classical::aut_order(k, d) == want as u128;
            counts.push(format!("k={k} d={d}: {n}"));
        }
        let reports: Vec<_> = (1..=3).map(|d| suite("abelianization", &cfg(2, d))).collect();
        let (ok, detail) = all_proved(&reports);
        Outcome { pass: pass && ok, detail: format!("{}; abelianization {detail}", counts.join(", ")) }
    });

    gate.run(8, "duality", None, |_| {
        let reports = vec![suite("duality", &cfg(2, 2))];
        let (ok, detail) = all_proved(&reports);
        Outcome { pass: ok, detail }
    });

    gate.run(9, "G_P counts", None, |_| {
        let mut reports = vec![];
        for p in ["trivial", "full"] {
            reports.push(suite("gp", &RunConfig { preset: Some(p.into()), ..cfg(2, 3) }));
        }
        reports.push(suite("gp", &RunConfig { preset: Some("cyclic".into()), ..cfg(3, 2) }));
        let cyclic = SubgroupSpec::preset("cyclic", 3).expect("preset");
        let n = enumerate_gp(&cyclic, 3, 2).map(|g| g.len()).unwrap_or(0);
        let (ok, detail) = all_proved(&reports);
        Outcome { pass: ok && n == 81 && gp_order(3, 3, 2) == 81, detail: format!("cyclic k=3 n=2: {n}; {detail}") }
    });

    gate.run(10, "Woronowicz ideal", None, |sink| {
        let mut reports = vec![];
        for k in [2, 3] {
            for p in ["none", "trivial", "cyclic"] {
                reports
                    .push(suite("woronowicz-ideal", &RunConfig { preset: Some(p.into()), word_len: 2, ..cfg(k, 2) }));
            }
        }
        keep(sink, &reports);
        let (ok, detail) = all_proved(&reports);
        Outcome { pass: ok, detail }
    });

    gate.run(11, "free wreath isomorphism", Some(secs(600)), |sink| {
        let mut reports = vec![];
        for p in ["none", "trivial", "full"] {
            let c = RunConfig { preset: Some(p.into()), ..cfg(2, 2) };
            reports.push(suite("wreath-iso", &c));
            reports.push(suite("wreath-comult", &c));
        }
        keep(sink, &reports);
        let symbolic = reports
            .iter()
            .flat_map(|r| &r.identities)
            .filter(|i| !i.name.starts_with("indicator rank"))
            .all(|i| i.certificate == Certificate::ProvedZero);
        let (ok, detail) = all_proved(&reports);
        Outcome { pass: ok && symbolic, detail }
    });

    gate.run(12, "noncommutativity witness", None, |_| {
        let rep = match two_projection_rep(std::f64::consts::FRAC_PI_4, false) {
            Ok(r) => r,
            Err(e) => return Outcome { pass: false, detail: e.to_string() },
        };
        let report = rep.relation_report(3);
        let b = |u: &str, v: &str| rep.generator_matrix(Generator::of(w(u), w(v)));
        let (x, y) = (b("00", "00"), b("10", "10"));
        let norm = op_norm(&(&x * &y - &y * &x));
        Outcome {
            pass: report.max_residual < 1e-10 && (norm - 0.5).abs() < 1e-10,
            detail: format!("max residual {:.2e}, commutator norm {norm:.12}", report.max_residual),
        }
    });

    let proved = std::mem::take(&mut gate.proved);
    gate.run(13, "engine soundness", None, |_| soundness(&proved));

    let failed = gate.lines.iter().filter(|l| !l.1).count();
    println!("{} of {} criteria pass", gate.lines.len() - failed, gate.lines.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

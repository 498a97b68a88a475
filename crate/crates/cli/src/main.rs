//! `qtree`: reduction, verification suites, classical enumeration and
//! numerical representation checks from the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qtree::classical::{self, enumerate_aut, enumerate_gp, SubgroupSpec};
use qtree::engine;
use qtree::parse::{parse_element, parse_tensor};
use qtree::report::VerificationReport;
use qtree::reps::{op_norm, two_projection_rep, DEFAULT_TOL};
use qtree::rewrite::{Certificate, DEFAULT_MAX_STEPS};
use qtree::selfsim;
use qtree::suites::{run_suite, RunConfig};
use qtree::tensor::reduce_tensor;
use qtree::{Alphabet, Ctx, ReductionBudget, Word};

/// Listings longer than this are refused by `classical enumerate`.
const MAX_LISTING: usize = 100_000;

#[derive(Parser)]
#[command(name = "qtree", version, about = "Symbolic verification for quantum automorphism groups of rooted trees")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Alphabet size.
    #[arg(short = 'k', long, global = true, default_value_t = 2)]
    k: usize,
    /// Depth bound.
    #[arg(short = 'd', long, global = true, default_value_t = 2)]
    depth: usize,
    /// Monomial degree bound.
    #[arg(short = 'g', long, global = true, default_value_t = 2)]
    degree: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Rewrite step budget.
    #[arg(long, global = true, env = "QTREE_BUDGET", default_value_t = DEFAULT_MAX_STEPS)]
    budget: u64,
    /// Relator preset name or relator file.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Also write the JSON output here.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce an expression to canonical form.
    Reduce { expr: String },
    /// Run a named verification suite (`all` runs every suite).
    Verify {
        suite: String,
        /// Bound on |w| for the maps rho_w.
        #[arg(long, default_value_t = 2)]
        word_len: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Record wall-clock times (reports are then no longer reproducible byte for byte).
        #[arg(long)]
        timings: bool,
    },
    /// Exact computations with finite tree automorphism groups.
    Classical {
        #[arg(value_enum)]
        action: ClassicalAction,
    },
    /// Numerical representation checks.
    Rep {
        #[command(subcommand)]
        action: RepAction,
    },
    /// Apply rho_w to an expression.
    Rho {
        #[arg(long)]
        word: String,
        expr: String,
    },
    /// Apply sigma_x to an expression.
    Sigma {
        #[arg(long)]
        letter: u8,
        expr: String,
    },
    /// Apply psi to a tensor `p[x] ox a`.
    Psi { expr: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassicalAction {
    Enumerate,
    Count,
    Crosscheck,
}

#[derive(Subcommand)]
enum RepAction {
    /// Check the relations in a named representation family.
    Check {
        #[arg(long, value_enum, default_value_t = Family::TwoProjection)]
        family: Family,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
        theta: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    TwoProjection,
}

enum Failure {
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn alphabet(g: &Global) -> Result<Alphabet, Failure> {
    Ok(Alphabet::new(g.k)?)
}

fn ctx(g: &Global) -> Result<Ctx, Failure> {
    let alphabet = alphabet(g)?;
    match &g.preset {
        Some(p) => Ok(qtree::fincon::RelatorSet::load(p, alphabet)?.ctx()),
        None => Ok(Ctx::new(alphabet)),
    }
}

fn emit(g: &Global, value: &serde_json::Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value)?;
    println!("{text}");
    if let Some(path) = &g.json {
        std::fs::write(path, text + "\n")?;
    }
    Ok(())
}

fn verdict(pass: bool) -> u8 {
    if pass {
        0
    } else {
        1
    }
}

fn report_code(r: &VerificationReport) -> u8 {
    if r.pass {
        0
    } else if r.budget_exhausted() {
        3
    } else {
        1
    }
}

fn reduce(g: &Global, expr: &str) -> Result<u8, Failure> {
    let c = ctx(g)?;
    let x = parse_element(expr, c.alphabet)?;
    let out = engine::reduce(&x, &c, &ReductionBudget::steps(g.budget));
    println!("{}", out.result);
    println!("{:?}", out.certificate);
    if let Some(path) = &g.json {
        let value = json!({ "input": expr, "result": out.result.to_string(), "certificate": out.certificate });
        std::fs::write(path, serde_json::to_string_pretty(&value)? + "\n")?;
    }
    Ok(if out.certificate == Certificate::BudgetExhausted { 3 } else { 0 })
}

fn verify(g: &Global, suite: &str, word_len: usize, samples: usize, timings: bool) -> Result<u8, Failure> {
    let cfg = RunConfig {
        k: g.k,
        depth: g.depth,
        degree: g.degree,
        word_len,
        samples,
        seed: g.seed,
        tol: g.tol,
        budget: g.budget,
        preset: g.preset.clone(),
        timings,
    };
    let report = run_suite(suite, &cfg)?;
    println!("{}", report.to_json());
    if let Some(path) = &g.json {
        std::fs::write(path, report.to_json() + "\n")?;
    }
    for f in report.failures() {
        eprintln!("FAIL {}: {:?}", f.name, f.certificate);
    }
    Ok(report_code(&report))
}

fn classical_cmd(g: &Global, action: ClassicalAction) -> Result<u8, Failure> {
    let spec = match g.preset.as_deref() {
        None => None,
        Some(name) => Some(SubgroupSpec::preset(name, g.k)?),
    };
    let enumerate = || match &spec {
        None => enumerate_aut(g.k, g.depth),
        Some(s) => enumerate_gp(s, g.k, g.depth),
    };
    let subgroup = g.preset.clone().unwrap_or_else(|| "full".into());
    match action {
        ClassicalAction::Count => {
            let n = enumerate()?.len() as u128;
            let expected = match &spec {
                None => classical::aut_order(g.k, g.depth),
                Some(s) => classical::gp_order(s.elements(g.k)?.len(), g.k, g.depth),
            };
            let value = json!({ "k": g.k, "depth": g.depth, "subgroup": subgroup, "count": n, "formula": expected });
            emit(g, &value)?;
            Ok(verdict(n == expected))
        }
        ClassicalAction::Enumerate => {
            let expected = match &spec {
                None => classical::aut_order(g.k, g.depth),
                Some(s) => classical::gp_order(s.elements(g.k)?.len(), g.k, g.depth),
            };
            if expected > MAX_LISTING as u128 {
                return Err(Failure::Usage(format!("{expected} portraits exceed the listing cap {MAX_LISTING}")));
            }
            let portraits: Vec<_> = enumerate()?.iter().map(|p| p.to_json()).collect();
            emit(g, &json!({ "k": g.k, "depth": g.depth, "subgroup": subgroup, "portraits": portraits }))?;
            Ok(0)
        }
        ClassicalAction::Crosscheck => {
            let cfg = RunConfig { k: g.k, depth: g.depth, seed: g.seed, budget: g.budget, ..RunConfig::default() };
            cfg.validate()?;
            let v = qtree::report::Verifier::new(Ctx::new(alphabet(g)?), cfg.policy());
            let report = classical::verify_abelianization(&cfg, &v)?;
            println!("{}", report.to_json());
            if let Some(path) = &g.json {
                std::fs::write(path, report.to_json() + "\n")?;
            }
            Ok(report_code(&report))
        }
    }
}

fn rep_cmd(g: &Global, action: RepAction) -> Result<u8, Failure> {
    match action {
        RepAction::Check { family: Family::TwoProjection, theta } => {
            let rep = two_projection_rep(theta, true)?;
            let mut report = rep.relation_report(g.depth);
            report.tol = g.tol;
            report.pass = report.max_residual <= g.tol;
            let b = |u: &str, v: &str| -> Result<_, Failure> {
                Ok(rep.generator_matrix(qtree::Generator::of(w(u)?, w(v)?)))
            };
            let (x, y) = (b("00", "00")?, b("10", "10")?);
            let commutator = op_norm(&(&x * &y - &y * &x));
            let value = json!({ "theta": theta, "relations": report, "commutator_norm": commutator });
            emit(g, &value)?;
            Ok(verdict(report.pass))
        }
    }
}

fn w(s: &str) -> Result<Word, Failure> {
    Ok(s.parse::<Word>()?)
}

fn transform(g: &Global, command: Command) -> Result<u8, Failure> {
    let c = ctx(g)?;
    let text = match command {
        Command::Rho { word, expr } => {
            let x = parse_element(&expr, c.alphabet)?;
            engine::normalize(&selfsim::rho_word(w(&word)?, &x, &c), &c).to_string()
        }
        Command::Sigma { letter, expr } => {
            if letter as usize >= g.k {
                return Err(Failure::Usage(format!("letter {letter} is outside the alphabet of size {}", g.k)));
            }
            let x = parse_element(&expr, c.alphabet)?;
            engine::normalize(&selfsim::sigma(letter, &x, &c), &c).to_string()
        }
        Command::Psi { expr } => {
            let t = parse_tensor(&expr, c.alphabet, None)?;
            let out = selfsim::psi(&t, &c)?;
            reduce_tensor(&out, &c, &ReductionBudget::steps(g.budget)).result.to_string()
        }
        _ => unreachable!("transformers only"),
    };
    println!("{text}");
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let g = cli.global;
    match cli.command {
        Command::Reduce { expr } => reduce(&g, &expr),
        Command::Verify { suite, word_len, samples, timings } => verify(&g, &suite, word_len, samples, timings),
        Command::Classical { action } => classical_cmd(&g, action),
        Command::Rep { action } => rep_cmd(&g, action),
        other => transform(&g, other),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

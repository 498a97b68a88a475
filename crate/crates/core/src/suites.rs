//! Suite configuration and dispatch by name.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::classical::{self, ClassicalError, SubgroupSpec};
use crate::engine::{Generator, Monomial, SearchPolicy};
use crate::fincon::{self, FinconError, RelatorSet};
use crate::hopf;
use crate::report::{VerificationReport, Verifier};
use crate::reps::{RepError, StandardOracle};
use crate::rewrite::Ctx;
use crate::selfsim;
use crate::words::{Alphabet, Word, MAX_ALPHABET};

pub const MAX_DEPTH: usize = 4;
pub const MAX_DEGREE: usize = 3;
pub const MAX_WORD_LEN: usize = 3;
pub const MAX_SAMPLES: usize = 10_000;

/// Suites run by `all`, in order.
pub const ALL_SUITES: [&str; 12] = [
    "cqg-axioms",
    "coaction",
    "hopf-laws",
    "restriction",
    "sigma-kappa",
    "psi-axiom",
    "delta-rho",
    "woronowicz-ideal",
    "wreath-iso",
    "wreath-comult",
    "abelianization",
    "duality",
];

/// Every accepted suite name.
pub const SUITES: [&str; 15] = [
    "cqg-axioms",
    "coaction",
    "hopf-laws",
    "restriction",
    "sigma-kappa",
    "psi-axiom",
    "delta-rho",
    "woronowicz-ideal",
    "wreath-iso",
    "wreath-comult",
    "abelianization",
    "duality",
    "gp",
    "membership",
    "all",
];

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown suite {0:?}; expected one of {list}", list = SUITES.join(", "))]
    UnknownSuite(String),
    #[error("{0}")]
    Cap(String),
    #[error(transparent)]
    Fincon(#[from] FinconError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// Parameters shared by all suites.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub k: usize,
    pub depth: usize,
    pub degree: usize,
    /// Bound on `|w|` for the maps `ρ_w`.
    pub word_len: usize,
    /// Number of seeded random monomials per sampled family.
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub budget: u64,
    /// Relator preset name or file path for the quotient suites.
    pub preset: Option<String>,
    #[serde(skip)]
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            k: 2,
            depth: 2,
            degree: 2,
            word_len: 2,
            samples: 200,
            seed: 0,
            tol: 1e-10,
            budget: crate::rewrite::DEFAULT_MAX_STEPS,
            preset: None,
            timings: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), SuiteError> {
        let cap = |what: &str, got: usize, lo: usize, hi: usize| {
            if got < lo || got > hi {
                Err(SuiteError::Cap(format!("{what} = {got} is outside {lo}..={hi}")))
            } else {
                Ok(())
            }
        };
        cap("k", self.k, 2, MAX_ALPHABET)?;
        cap("depth", self.depth, 1, MAX_DEPTH)?;
        cap("degree", self.degree, 1, MAX_DEGREE)?;
        cap("word length", self.word_len, 0, MAX_WORD_LEN)?;
        cap("samples", self.samples, 0, MAX_SAMPLES)?;
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(SuiteError::Cap(format!("tolerance {} must be positive", self.tol)));
        }
        Ok(())
    }

    pub fn policy(&self) -> SearchPolicy {
        SearchPolicy::with_budget(self.budget)
    }

    /// The relator set named by `preset`, `none` when unset.
    pub fn relators(&self) -> Result<RelatorSet, FinconError> {
        RelatorSet::load(self.preset.as_deref().unwrap_or("none"), self.alphabet())
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.k).expect("validated alphabet size")
    }

    /// An empty report carrying this configuration as parameters.
    pub fn report(&self, suite: &str) -> VerificationReport {
        let mut r = VerificationReport::new(suite)
            .param("k", self.k)
            .param("depth", self.depth)
            .param("degree", self.degree)
            .param("word_len", self.word_len)
            .param("samples", self.samples)
            .param("seed", self.seed)
            .param("budget", self.budget);
        if let Some(p) = &self.preset {
            r = r.param("preset", p);
        }
        r
    }
}

/// Seeded random monomials of degree `1..=degree` in generators of depth `1..=depth`.
pub fn random_monomials(alphabet: Alphabet, depth: usize, degree: usize, count: usize, seed: u64) -> Vec<Monomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = alphabet.size();
    (0..count)
        .map(|_| {
            let g = rng.gen_range(1..=degree.max(1));
            let factors: Vec<Generator> = (0..g)
                .map(|_| {
                    let n = rng.gen_range(1..=depth.max(1));
                    let count = alphabet.count(n);
                    let u = Word::from_index(k, n, rng.gen_range(0..count));
                    let v = Word::from_index(k, n, rng.gen_range(0..count));
                    Generator::of(u, v)
                })
                .collect();
            Monomial::from_factors(&factors)
        })
        .collect()
}

/// The soundness oracle matching a relator set: representations labelled by
/// `P` for classical presets, unrestricted ones for `I = 0`, none otherwise.
fn oracle_for(cfg: &RunConfig, set: &RelatorSet) -> Result<Option<StandardOracle>, RepError> {
    if let Some(group) = &set.classical {
        let spec = SubgroupSpec::Elements(group.clone());
        return StandardOracle::new(cfg.k, Some(&spec), cfg.seed).map(Some);
    }
    if set.is_zero() {
        return StandardOracle::new(cfg.k, None, cfg.seed).map(Some);
    }
    Ok(None)
}

/// Runs a named suite.
pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<VerificationReport, SuiteError> {
    if !SUITES.contains(&name) {
        return Err(SuiteError::UnknownSuite(name.to_string()));
    }
    cfg.validate()?;
    if name == "all" {
        let started = Instant::now();
        let parts = ALL_SUITES.iter().map(|s| run_suite(s, cfg)).collect::<Result<Vec<_>, _>>()?;
        let mut out = VerificationReport::merge("all", parts);
        out.millis = cfg.timings.then(|| started.elapsed().as_millis() as u64);
        return Ok(out);
    }
    let quotient = matches!(name, "woronowicz-ideal" | "wreath-iso" | "wreath-comult" | "membership");
    let set = if quotient { cfg.relators()? } else { RelatorSet::zero(cfg.alphabet()) };
    let ctx = if quotient { set.ctx() } else { Ctx::new(cfg.alphabet()) };
    let oracle = oracle_for(cfg, &set)?;
    let mut v = Verifier::new(ctx, cfg.policy()).with_timings(cfg.timings);
    if let Some(o) = &oracle {
        v = v.with_oracle(o);
    }
    let report = match name {
        "cqg-axioms" => hopf::verify_cqg_axioms(cfg, &v),
        "coaction" => hopf::verify_coaction(cfg, &v),
        "hopf-laws" => hopf::verify_hopf_laws(cfg, &v),
        "restriction" => selfsim::verify_restriction(cfg, &v),
        "sigma-kappa" => selfsim::verify_sigma_kappa(cfg, &v),
        "psi-axiom" => selfsim::verify_psi_axiom(cfg, &v),
        "delta-rho" => selfsim::verify_delta_rho(cfg, &v),
        "woronowicz-ideal" => fincon::verify_woronowicz_ideal(cfg, &set, &v),
        "membership" => fincon::verify_membership(cfg, &set, &v),
        "wreath-iso" => fincon::iso::verify_wreath_iso(cfg, &set, &v)?,
        "wreath-comult" => fincon::iso::verify_wreath_comult(cfg, &set, &v)?,
        "abelianization" => classical::verify_abelianization(cfg, &v)?,
        "duality" => classical::verify_duality(cfg, &v)?,
        "gp" => classical::verify_gp(cfg, cfg.preset.as_deref().unwrap_or("full"), &v)?,
        _ => unreachable!("suite names checked"),
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    #[test]
    fn dispatch_rejects_bad_input() {
        let cfg = RunConfig::default();
        assert!(matches!(run_suite("nope", &cfg), Err(SuiteError::UnknownSuite(_))));
        let wide = RunConfig { k: 11, ..RunConfig::default() };
        assert!(matches!(run_suite("hopf-laws", &wide), Err(SuiteError::Cap(_))));
        let deep = RunConfig { depth: 5, ..RunConfig::default() };
        assert!(matches!(run_suite("hopf-laws", &deep), Err(SuiteError::Cap(_))));
        let bad = RunConfig { preset: Some("klein".into()), ..RunConfig::default() };
        assert!(matches!(run_suite("woronowicz-ideal", &bad), Err(SuiteError::Fincon(_))));
        assert!(matches!(run_suite("gp", &bad), Err(SuiteError::Classical(_))));
    }

    #[test]
    fn dispatch_runs_named_suites() {
        let cfg = RunConfig { samples: 10, ..RunConfig::default() };
        for name in ["hopf-laws", "coaction", "gp"] {
            let r = run_suite(name, &cfg).unwrap();
            assert_eq!(r.suite, name);
            assert!(r.pass, "{name}");
        }
        let trivial = RunConfig { preset: Some("trivial".into()), ..cfg };
        let r = run_suite("woronowicz-ideal", &trivial).unwrap();
        assert!(r.pass);
        assert!(r.identities.iter().all(|i| i.soundness.as_ref().is_none_or(|s| s.ok)));
    }

    #[test]
    fn all_covers_every_suite() {
        let cfg = RunConfig { samples: 5, ..RunConfig::default() };
        let r = run_suite("all", &cfg).unwrap();
        assert!(r.pass);
        let seen: BTreeSet<&str> = r.identities.iter().map(|i| i.name.split('/').next().unwrap()).collect();
        assert_eq!(seen, ALL_SUITES.iter().copied().collect());
        let sorted = r.identities.windows(2).all(|w| w[0].name <= w[1].name);
        assert!(sorted);
    }
}

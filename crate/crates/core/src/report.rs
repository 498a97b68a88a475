//! Verification reports: one record per checked identity, serialized to JSON
//! with deterministic ordering.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::engine::SearchPolicy;
use crate::lincomb::fmt_rational;
use crate::rewrite::{Certificate, Ctx, ReductionOutcome};
use crate::tensor::{prove_zero_tensor, TensorElement};

/// Sides with more terms than this are reported by formula, not verbatim.
pub const VERBATIM_LIMIT: usize = 200;

/// Outcome of the independent oracle checks on an identity's difference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Soundness {
    /// Classical points at which the difference was evaluated exactly.
    pub abelian_points: usize,
    pub abelian_zero: bool,
    /// Numerical representations consulted.
    pub numeric_reps: usize,
    /// Largest observed magnitude over all numerical evaluations.
    pub max_numeric: f64,
    pub ok: bool,
}

/// Independent evaluation of a difference that the rewriter claims is zero.
pub trait SoundnessOracle: Sync {
    fn check(&self, diff: &TensorElement) -> Soundness;
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityRecord {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub certificate: Certificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
    /// What the rewriter was left with, when it did not reach zero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub soundness: Option<Soundness>,
}

impl IdentityRecord {
    pub fn passed(&self) -> bool {
        self.certificate.is_pass() && self.soundness.as_ref().is_none_or(|s| s.ok)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub identities: Vec<IdentityRecord>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

impl VerificationReport {
    pub fn new(suite: &str) -> Self {
        VerificationReport {
            suite: suite.to_string(),
            params: BTreeMap::new(),
            identities: vec![],
            pass: true,
            millis: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
        self
    }

    pub fn push(&mut self, record: IdentityRecord) {
        self.pass &= record.passed();
        self.identities.push(record);
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = IdentityRecord>) {
        for r in records {
            self.push(r);
        }
    }

    /// Sorts identities by name and recomputes the verdict.
    pub fn finish(mut self, started: Option<Instant>) -> Self {
        self.identities.sort_by(|a, b| a.name.cmp(&b.name));
        self.pass = self.identities.iter().all(IdentityRecord::passed);
        self.millis = started.map(|t| t.elapsed().as_millis() as u64);
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityRecord> {
        self.identities.iter().filter(|r| !r.passed())
    }

    pub fn count(&self, c: Certificate) -> usize {
        self.identities.iter().filter(|r| r.certificate == c).count()
    }

    pub fn budget_exhausted(&self) -> bool {
        self.identities.iter().any(|r| r.certificate == Certificate::BudgetExhausted)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Merges several reports into one under a new suite name.
    pub fn merge(suite: &str, parts: Vec<VerificationReport>) -> VerificationReport {
        let mut out = VerificationReport::new(suite);
        let mut millis = None;
        for p in parts {
            for (k, v) in p.params {
                out.params.insert(format!("{}.{}", p.suite, k), v);
            }
            for mut r in p.identities {
                r.name = format!("{}/{}", p.suite, r.name);
                out.push(r);
            }
            if let Some(m) = p.millis {
                millis = Some(millis.unwrap_or(0) + m);
            }
        }
        let mut out = out.finish(None);
        out.millis = millis;
        out
    }
}

/// An identity `lhs = rhs` with formula descriptions for large sides.
#[derive(Debug, Clone)]
pub struct Identity {
    pub name: String,
    pub lhs: TensorElement,
    pub rhs: TensorElement,
    pub lhs_formula: String,
    pub rhs_formula: String,
}

impl Identity {
    pub fn new(name: impl Into<String>, lhs: TensorElement, rhs: TensorElement) -> Self {
        Identity { name: name.into(), lhs, rhs, lhs_formula: String::new(), rhs_formula: String::new() }
    }

    pub fn formulas(mut self, lhs: impl Into<String>, rhs: impl Into<String>) -> Self {
        self.lhs_formula = lhs.into();
        self.rhs_formula = rhs.into();
        self
    }
}

pub fn render_side(t: &TensorElement, formula: &str) -> String {
    if t.len() <= VERBATIM_LIMIT || formula.is_empty() {
        if t.signature().is_empty() {
            return fmt_rational(&t.terms().coefficient(&Default::default()));
        }
        t.to_string()
    } else {
        formula.to_string()
    }
}

/// Checks identities with the rewriter and, on success, with the oracle.
pub struct Verifier<'a> {
    pub ctx: Ctx,
    pub policy: SearchPolicy,
    pub timings: bool,
    pub oracle: Option<&'a dyn SoundnessOracle>,
}

impl<'a> Verifier<'a> {
    pub fn new(ctx: Ctx, policy: SearchPolicy) -> Self {
        Verifier { ctx, policy, timings: false, oracle: None }
    }

    pub fn with_oracle(mut self, oracle: &'a dyn SoundnessOracle) -> Self {
        self.oracle = Some(oracle);
        self
    }

    pub fn with_timings(mut self, on: bool) -> Self {
        self.timings = on;
        self
    }

    pub fn check(&self, id: &Identity) -> IdentityRecord {
        self.check_by(id, |d| prove_zero_tensor(d, &self.ctx, &self.policy))
    }

    /// Checks with a custom prover for the difference `lhs − rhs`.
    pub fn check_by(
        &self,
        id: &Identity,
        prover: impl FnOnce(&TensorElement) -> ReductionOutcome<TensorElement>,
    ) -> IdentityRecord {
        let start = Instant::now();
        let (certificate, residual, soundness) = match id.lhs.sub(&id.rhs) {
            Err(e) => (Certificate::Unverified, Some(e.to_string()), None),
            Ok(diff) => {
                let out = prover(&diff);
                let residual = (!out.is_zero()).then(|| truncate(&out.result.to_string()));
                let soundness = if out.is_zero() { self.oracle.map(|o| o.check(&diff)) } else { None };
                (out.certificate, residual, soundness)
            }
        };
        IdentityRecord {
            name: id.name.clone(),
            lhs: render_side(&id.lhs, &id.lhs_formula),
            rhs: render_side(&id.rhs, &id.rhs_formula),
            certificate,
            millis: self.timings.then(|| start.elapsed().as_millis() as u64),
            residual,
            soundness,
        }
    }

    /// A record for an identity decided exactly outside the rewriter.
    pub fn exact(&self, name: impl Into<String>, lhs: String, rhs: String, holds: bool) -> IdentityRecord {
        IdentityRecord {
            name: name.into(),
            lhs,
            rhs,
            certificate: if holds { Certificate::Verified } else { Certificate::Refuted },
            millis: None,
            residual: None,
            soundness: None,
        }
    }
}

fn truncate(s: &str) -> String {
    const MAX: usize = 2000;
    if s.len() <= MAX {
        return s.to_string();
    }
    let mut end = MAX;
    while !s.is_char_boundary(end) {
        end -= 1;
    }
    format!("{} …", &s[..end])
}

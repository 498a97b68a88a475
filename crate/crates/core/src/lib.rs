//! Symbolic computation and verification for the quantum automorphism group
//! of a homogeneous rooted tree, its restriction maps and self-similar
//! quantum subgroups, with a classical portrait oracle and numerical
//! matrix representations as independent checks.

pub mod classical;
pub mod engine;
pub mod fincon;
pub mod hopf;
pub mod linalg;
pub mod lincomb;
pub mod parse;
pub mod report;
pub mod reps;
pub mod rewrite;
pub mod selfsim;
pub mod suites;
pub mod tensor;
pub mod words;

pub use engine::{Element, Generator, Monomial};
pub use lincomb::{LinComb, Q};
pub use rewrite::{Certificate, Ctx, ReductionBudget, ReductionOutcome};
pub use tensor::{LegKind, TensorElement};
pub use words::{Alphabet, Word};

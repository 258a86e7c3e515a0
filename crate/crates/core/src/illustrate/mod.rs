//! Proof to GCL: walks the proof on a numeric model of the premises and
//! emits one construction call per interpreted step.

mod branch;
mod compile;
mod document;
mod exists;

use thiserror::Error;

use crate::gcl::GclError;
use crate::interp::InterpError;
use crate::prover::Unprovable;

pub use branch::{evaluate_fact, is_contradictory, select_branch, BranchPolicy, Fallback};
pub use compile::{compile, CompileOptions, LemmaSource, ProvingLemmas, MAX_LEMMA_DEPTH};
pub use document::GclDocument;
pub use exists::{exists_procedure_text, realize_by_proof, Realized};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IllustrateError {
    #[error("the premises are contradictory, so there is nothing to illustrate")]
    AllContradictory,
    #[error("cases {0:?} all hold in the model")]
    AmbiguousBranch(Vec<usize>),
    #[error("no open case holds in the model")]
    NoMatchingBranch,
    #[error("no proof of the existence conjecture: {0}")]
    ExistenceUnprovable(Unprovable),
    #[error("lemma {axiom} cannot be expanded: {reason}")]
    Lemma { axiom: String, reason: String },
    #[error("lemma expansion deeper than {0}")]
    TooDeep(usize),
    #[error("proof has no conclusion on the illustrated path")]
    Unfinished,
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error("{context}: {source}")]
    Gcl { context: String, source: GclError },
}

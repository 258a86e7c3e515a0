//! Cartesian side of the method: primitives, draw operations, the registry
//! of construction procedures and the numeric model built from proof steps.

pub mod draw;
pub mod geom;
mod model;
mod registry;

use thiserror::Error;

use crate::gcl::GclError;

pub use model::{
    apply_step, check_nondegenerate, ncol_premises, premises_conjecture, realize_from_gcl, step_call, GeoModel,
    Nondegeneracy,
};
pub use registry::{InterpProcedure, InterpRegistry, DEFAULT_MANIFEST};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InterpError {
    #[error("no visual interpretation for axiom {0}, which introduces witnesses")]
    MissingInterpretation(String),
    #[error("procedure {0} not found")]
    MissingProcedure(String),
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("procedure {procedure} takes {found} parameters, manifest declares {expected}")]
    ProcedureArity {
        procedure: String,
        expected: usize,
        found: usize,
    },
    #[error("{axiom}: manifest declares {expected} outputs, step has {found} witnesses")]
    OutputCount {
        axiom: String,
        expected: usize,
        found: usize,
    },
    #[error("{axiom}: input {var} not bound by the instantiation")]
    UnboundInput { axiom: String, var: String },
    #[error("{axiom}: procedure did not assign {output}")]
    OutputNotAssigned { axiom: String, output: String },
    #[error("constant {0} has no point in the model")]
    UnmappedConstant(String),
    #[error("degenerate model: {0}")]
    DegenerateModel(String),
    #[error("{context}: {source}")]
    Gcl { context: String, source: GclError },
}

//! A subset of the GCL construction language: parser, evaluator and SVG
//! renderer.
//!
//! Beyond the GCLC commands, the subset accepts `random n lo hi`,
//! `drawrightangle v a b`, `drawparallel a b c d` and the animated form of
//! `point n x y x2 y2`.

mod ast;
mod eval;
mod parse;
mod svg;

use thiserror::Error;

use crate::interp::geom::GeomError;

pub use ast::{GclProgram, MarkStyle, Num, Procedure, Stmt};
pub use eval::{evaluate, Frame, Machine, Obj, Scene};
pub use parse::{parse_file, parse_gcl, Chain, DirResolver, NoIncludes, Resolver};
pub use svg::{render_svg, RenderStyle};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GclError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown command `{command}`")]
    UnknownCommand { line: usize, command: String },
    #[error("include cycle through {0}")]
    IncludeCycle(String),
    #[error("cannot resolve include {0}")]
    MissingInclude(String),
    #[error("in {file}: {source}")]
    InFile { file: String, source: Box<GclError> },
    #[error("procedure {0} defined twice")]
    DuplicateProcedure(String),
    #[error("call to {procedure} with {found} arguments, expected {expected}")]
    Arity {
        procedure: String,
        expected: usize,
        found: usize,
    },
    #[error("undefined procedure {0}")]
    UndefinedProcedure(String),
    #[error("`{command}`: undefined name {name}")]
    UndefinedName { name: String, command: String },
    #[error("`{command}`: {name} is not a {expected}")]
    WrongKind {
        name: String,
        expected: &'static str,
        command: String,
    },
    #[error("`{command}`: {source}")]
    Geometry { command: String, source: GeomError },
    #[error("procedure calls nested too deeply at {0}")]
    TooDeep(String),
}

impl GclError {
    pub fn in_file(self, file: &str) -> GclError {
        GclError::InFile {
            file: file.to_string(),
            source: Box::new(self),
        }
    }
}

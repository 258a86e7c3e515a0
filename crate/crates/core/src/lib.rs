//! Coherent-logic theorem proving for Euclidean geometry, with proofs
//! compiled into animated ruler-and-compass illustrations.

pub mod cli;
pub mod exec;
pub mod formula;
pub mod gcl;
pub mod illustrate;
pub mod interp;
pub mod proofdoc;
pub mod prover;
pub mod semantics;
pub mod tptp;

//! TPTP FOF subset: parsing, translation to coherent form, and support axioms.

mod coherentize;
mod parse;
mod support;

use thiserror::Error;

use crate::formula::{CoherentFormula, FormulaError, Signature, Theory, EQ, NEQ};

pub use coherentize::coherentize;
pub use parse::{parse_tptp, AnnotatedFormula, Fof, Role};
pub use support::{generate_support_axioms, SupportAxiomOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TptpError {
    #[error("syntax error at {line}:{column}: expected {expected}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
    },
    #[error("formula {0}: only axiom and conjecture roles are supported")]
    UnsupportedRole(String),
    #[error("formula {0}: function symbols are not supported")]
    FunctionSymbolsUnsupported(String),
    #[error("formula {formula}: variable {var} is not bound by a quantifier")]
    UnboundVariable { formula: String, var: String },
    #[error("formula {name} is not coherent: {reason}")]
    NotCoherent { name: String, reason: String },
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// A translated problem file: axioms plus support kit, and the conjectures.
#[derive(Debug, Clone)]
pub struct Problem {
    pub theory: Theory,
    pub conjectures: Vec<CoherentFormula>,
}

impl Problem {
    /// The named conjecture, or the sole one when `name` is `None`.
    pub fn conjecture(&self, name: Option<&str>) -> Option<&CoherentFormula> {
        match name {
            Some(n) => self.conjectures.iter().find(|c| c.name == n),
            None if self.conjectures.len() == 1 => self.conjectures.first(),
            None => None,
        }
    }
}

/// Parses and translates every entry, then appends the support axioms.
pub fn load_problem(text: &str, opts: &SupportAxiomOptions) -> Result<Problem, TptpError> {
    let entries = parse_tptp(text)?;
    let mut sig = Signature::new();
    let mut axioms = Vec::new();
    let mut conjectures = Vec::new();
    for e in &entries {
        let (fs, next) = coherentize(e, &sig)?;
        sig = next;
        match e.role {
            Role::Axiom => axioms.extend(fs),
            Role::Conjecture => conjectures.extend(fs),
        }
    }
    let support = generate_support_axioms(&mut sig, opts)?;
    let mut theory = Theory::new(sig, axioms)?;
    for ax in support {
        theory.push_support(ax)?;
    }
    Ok(Problem {
        theory,
        conjectures,
    })
}

fn literal_text(a: &crate::formula::Atom, sig: &Signature) -> String {
    match a.pred.as_str() {
        EQ => format!("({} = {})", a.args[0].name(), a.args[1].name()),
        NEQ => format!("({} != {})", a.args[0].name(), a.args[1].name()),
        p if sig.is_complement_name(p) => {
            let pos = sig.complement(p).unwrap_or(p);
            let inner = crate::formula::Atom::new(pos, a.args.clone());
            format!("~ ({inner})")
        }
        _ => a.to_string(),
    }
}

/// Writes a coherent formula back as a TPTP entry.
pub fn to_tptp(f: &CoherentFormula, role: Role, sig: &Signature) -> String {
    let join = |atoms: &[crate::formula::Atom], op: &str| {
        if atoms.is_empty() {
            return "$true".to_string();
        }
        atoms
            .iter()
            .map(|a| literal_text(a, sig))
            .collect::<Vec<_>>()
            .join(op)
    };
    let concl = if f.disjuncts.is_empty() {
        "$false".to_string()
    } else {
        f.disjuncts
            .iter()
            .map(|d| format!("({})", join(&d.0, " & ")))
            .collect::<Vec<_>>()
            .join(" | ")
    };
    let mut body = if f.premises.is_empty() {
        format!("({concl})")
    } else {
        format!("(({}) => ({concl}))", join(&f.premises, " & "))
    };
    if !f.existentials.is_empty() {
        body = format!("(? [{}] : {body})", f.existentials.join(","));
    }
    if !f.universals.is_empty() {
        body = format!("(! [{}] : {body})", f.universals.join(","));
    }
    format!("fof({}, {role}, {body}).\n", f.name)
}

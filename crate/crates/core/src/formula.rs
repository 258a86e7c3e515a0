//! Coherent-logic sentences: terms, atoms, substitutions and theories.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const EQ: &str = "eq";
pub const NEQ: &str = "neq";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("predicate {name} used with arity {found}, declared with {declared}")]
    ArityMismatch {
        name: String,
        declared: usize,
        found: usize,
    },
    #[error("duplicate axiom name {0}")]
    DuplicateAxiom(String),
    #[error("malformed atom {0:?}")]
    MalformedAtom(String),
    #[error("formula {name}: {reason}")]
    Invariant { name: String, reason: String },
}

/// TPTP convention: an uppercase-initial identifier is a variable.
pub fn is_variable_name(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn parse(name: &str) -> Term {
        if is_variable_name(name) {
            Term::Var(name.to_string())
        } else {
            Term::Const(name.to_string())
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            pred: pred.into(),
            args,
        }
    }

    /// Ground atom from constant names.
    pub fn ground(pred: impl Into<String>, args: &[&str]) -> Self {
        Atom::new(
            pred,
            args.iter().map(|a| Term::Const(a.to_string())).collect(),
        )
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_var())
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            Term::Const(_) => None,
        })
    }

    pub fn consts(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Const(c) => Some(c.as_str()),
            Term::Var(_) => None,
        })
    }

    pub fn apply(&self, s: &Substitution) -> Result<Atom, FormulaError> {
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Const(_) => Ok(t.clone()),
                Term::Var(v) => s
                    .get(v)
                    .map(|c| Term::Const(c.to_string()))
                    .ok_or_else(|| FormulaError::UnboundVariable(v.clone())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Atom {
            pred: self.pred.clone(),
            args,
        })
    }

    /// Replaces variables bound in `s`, leaving the others in place.
    pub fn apply_partial(&self, s: &Substitution) -> Atom {
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => match s.get(v) {
                    Some(c) => Term::Const(c.to_string()),
                    None => t.clone(),
                },
                Term::Const(_) => t.clone(),
            })
            .collect();
        Atom {
            pred: self.pred.clone(),
            args,
        }
    }

    pub fn rename_vars(&self, map: &BTreeMap<String, String>) -> Atom {
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
                Term::Const(_) => t.clone(),
            })
            .collect();
        Atom {
            pred: self.pred.clone(),
            args,
        }
    }
}

/// Compact syntax `pred(a,b,c)`, the same form the TPTP reader accepts for atoms.
impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.pred)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(a.name())?;
        }
        f.write_str(")")
    }
}

impl std::str::FromStr for Atom {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FormulaError::MalformedAtom(s.to_string());
        let s = s.trim();
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let pred = s[..open].trim();
        if pred.is_empty() || !pred.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(bad());
        }
        let inner = &s[open + 1..s.len() - 1];
        let args = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|a| {
                    let a = a.trim();
                    if a.is_empty() || !a.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                        Err(bad())
                    } else {
                        Ok(Term::parse(a))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?
        };
        Ok(Atom::new(pred, args))
    }
}

impl Serialize for Atom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A conjunction of atoms. Empty only when it stands for `⊤` in an existence goal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Conjunction(pub Vec<Atom>);

impl Conjunction {
    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn apply(&self, s: &Substitution) -> Result<Conjunction, FormulaError> {
        self.0
            .iter()
            .map(|a| a.apply(s))
            .collect::<Result<Vec<_>, _>>()
            .map(Conjunction)
    }
}

/// Variable → constant-name bindings.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Substitution(pub IndexMap<String, String>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        Substitution(
            pairs
                .into_iter()
                .map(|(v, c)| (v.to_string(), c.to_string()))
                .collect(),
        )
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.get(var).map(String::as_str)
    }

    pub fn bind(&mut self, var: impl Into<String>, constant: impl Into<String>) {
        self.0.insert(var.into(), constant.into());
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(v, c)| (v.as_str(), c.as_str()))
    }

    /// Union of two substitutions; bindings in `other` win on overlap.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut out = self.clone();
        for (v, c) in other.iter() {
            out.bind(v, c);
        }
        out
    }
}

/// `∀x⃗ (A₀ ∧ … ∧ Aₙ₋₁ ⇒ ∃y⃗ (B₀ ∨ … ∨ Bₘ₋₁))`. Empty premises mean `⊤`,
/// empty disjuncts mean `⊥`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoherentFormula {
    pub name: String,
    pub universals: Vec<String>,
    pub premises: Vec<Atom>,
    pub existentials: Vec<String>,
    pub disjuncts: Vec<Conjunction>,
}

impl CoherentFormula {
    pub fn is_horn(&self) -> bool {
        self.existentials.is_empty() && self.disjuncts.len() <= 1
    }

    pub fn concludes_bottom(&self) -> bool {
        self.disjuncts.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.premises
            .iter()
            .chain(self.disjuncts.iter().flat_map(|d| d.0.iter()))
    }

    pub fn validate(&self) -> Result<(), FormulaError> {
        let err = |reason: String| FormulaError::Invariant {
            name: self.name.clone(),
            reason,
        };
        let uni: BTreeSet<&str> = self.universals.iter().map(String::as_str).collect();
        let ex: BTreeSet<&str> = self.existentials.iter().map(String::as_str).collect();
        if uni.len() != self.universals.len() || ex.len() != self.existentials.len() {
            return Err(err("duplicate quantified variable".into()));
        }
        if let Some(v) = uni.intersection(&ex).next() {
            return Err(err(format!("{v} is both universal and existential")));
        }
        for a in &self.premises {
            if let Some(v) = a.vars().find(|v| !uni.contains(v)) {
                return Err(err(format!("premise variable {v} is not universal")));
            }
        }
        for d in &self.disjuncts {
            for a in &d.0 {
                if let Some(v) = a.vars().find(|v| !uni.contains(v) && !ex.contains(v)) {
                    return Err(err(format!("conclusion variable {v} is unbound")));
                }
            }
        }
        Ok(())
    }

    /// Alpha-renames bound variables away from `avoid`, appending the smallest
    /// unused numeric suffix.
    pub fn rename_apart(&self, avoid: &BTreeSet<String>) -> CoherentFormula {
        let mut taken: BTreeSet<String> = avoid.clone();
        taken.extend(self.universals.iter().cloned());
        taken.extend(self.existentials.iter().cloned());
        let mut map = BTreeMap::new();
        for v in self.universals.iter().chain(&self.existentials) {
            if avoid.contains(v) {
                let mut k = 1;
                let fresh = loop {
                    let cand = format!("{v}{k}");
                    if !taken.contains(&cand) {
                        break cand;
                    }
                    k += 1;
                };
                taken.insert(fresh.clone());
                map.insert(v.clone(), fresh);
            }
        }
        let ren = |v: &String| map.get(v).cloned().unwrap_or_else(|| v.clone());
        CoherentFormula {
            name: self.name.clone(),
            universals: self.universals.iter().map(ren).collect(),
            premises: self.premises.iter().map(|a| a.rename_vars(&map)).collect(),
            existentials: self.existentials.iter().map(ren).collect(),
            disjuncts: self
                .disjuncts
                .iter()
                .map(|d| Conjunction(d.0.iter().map(|a| a.rename_vars(&map)).collect()))
                .collect(),
        }
    }
}

/// Anything with variables in a defined scan order.
pub trait FreeVariables {
    fn free_variables(&self) -> IndexSet<String>;
}

impl FreeVariables for Atom {
    fn free_variables(&self) -> IndexSet<String> {
        self.vars().map(str::to_string).collect()
    }
}

impl FreeVariables for Conjunction {
    fn free_variables(&self) -> IndexSet<String> {
        self.0.iter().flat_map(|a| a.vars().map(str::to_string)).collect()
    }
}

impl FreeVariables for CoherentFormula {
    /// Universals and existentials that actually occur, in first-occurrence order.
    fn free_variables(&self) -> IndexSet<String> {
        self.atoms()
            .flat_map(|a| a.vars().map(str::to_string))
            .collect()
    }
}

pub fn apply_substitution(a: &Atom, s: &Substitution) -> Result<Atom, FormulaError> {
    a.apply(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    predicates: BTreeMap<String, usize>,
    /// Ordered (positive, complement) pairs.
    complements: Vec<(String, String)>,
}

impl Default for Signature {
    fn default() -> Self {
        Self::new()
    }
}

impl Signature {
    pub fn new() -> Self {
        let mut predicates = BTreeMap::new();
        predicates.insert(EQ.to_string(), 2);
        predicates.insert(NEQ.to_string(), 2);
        Signature {
            predicates,
            complements: vec![(EQ.to_string(), NEQ.to_string())],
        }
    }

    pub fn arity(&self, pred: &str) -> Option<usize> {
        self.predicates.get(pred).copied()
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&str, usize)> {
        self.predicates.iter().map(|(p, a)| (p.as_str(), *a))
    }

    pub fn declare(&mut self, pred: &str, arity: usize) -> Result<(), FormulaError> {
        match self.predicates.get(pred) {
            Some(&a) if a != arity => Err(FormulaError::ArityMismatch {
                name: pred.to_string(),
                declared: a,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.predicates.insert(pred.to_string(), arity);
                Ok(())
            }
        }
    }

    pub fn complement(&self, pred: &str) -> Option<&str> {
        self.complements.iter().find_map(|(p, n)| {
            if p == pred {
                Some(n.as_str())
            } else if n == pred {
                Some(p.as_str())
            } else {
                None
            }
        })
    }

    pub fn is_complement_name(&self, pred: &str) -> bool {
        self.complements.iter().any(|(_, n)| n == pred)
    }

    pub fn complement_pairs(&self) -> &[(String, String)] {
        &self.complements
    }

    /// Returns the complement of `pred`, registering `n<pred>` if none exists yet.
    pub fn ensure_complement(&mut self, pred: &str) -> Result<String, FormulaError> {
        if let Some(c) = self.complement(pred) {
            return Ok(c.to_string());
        }
        let arity = self
            .arity(pred)
            .ok_or_else(|| FormulaError::MalformedAtom(pred.to_string()))?;
        let name = format!("n{pred}");
        self.declare(&name, arity)?;
        self.complements.push((pred.to_string(), name.clone()));
        Ok(name)
    }

    pub fn check_atom(&mut self, a: &Atom) -> Result<(), FormulaError> {
        self.declare(&a.pred, a.args.len())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theory {
    pub signature: Signature,
    pub axioms: Vec<CoherentFormula>,
    /// Names of generated support axioms (complement, equality kit).
    #[serde(default)]
    pub support: BTreeSet<String>,
}

impl Theory {
    pub fn new(signature: Signature, axioms: Vec<CoherentFormula>) -> Result<Self, FormulaError> {
        let mut t = Theory {
            signature,
            axioms: Vec::new(),
            support: BTreeSet::new(),
        };
        for ax in axioms {
            t.push(ax)?;
        }
        Ok(t)
    }

    pub fn push(&mut self, ax: CoherentFormula) -> Result<(), FormulaError> {
        if self.axiom(&ax.name).is_some() {
            return Err(FormulaError::DuplicateAxiom(ax.name));
        }
        ax.validate()?;
        for a in ax.atoms() {
            self.signature.check_atom(a)?;
        }
        self.axioms.push(ax);
        Ok(())
    }

    pub fn push_support(&mut self, ax: CoherentFormula) -> Result<(), FormulaError> {
        let name = ax.name.clone();
        self.push(ax)?;
        self.support.insert(name);
        Ok(())
    }

    pub fn axiom(&self, name: &str) -> Option<&CoherentFormula> {
        self.axioms.iter().find(|a| a.name == name)
    }

    pub fn is_support(&self, name: &str) -> bool {
        self.support.contains(name)
    }

    /// Constants mentioned in any axiom, first-occurrence order.
    pub fn constants(&self) -> IndexSet<String> {
        self.axioms
            .iter()
            .flat_map(|ax| ax.atoms())
            .flat_map(|a| a.consts().map(str::to_string))
            .collect()
    }
}

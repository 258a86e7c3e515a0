//! Axiom name → construction procedure, loaded from a manifest plus one GCL
//! file per procedure.
//!
//! Manifest records look like
//! `interp lemma_extension inputs(A,B,P,Q) outputs(X) = lemma_extension`;
//! the procedure is read from `lemma_extension.gcl` and takes the inputs
//! followed by the outputs as parameters.

use indexmap::{IndexMap, IndexSet};

use super::InterpError;
use crate::gcl::{parse_file, Procedure, Resolver, Stmt};

#[derive(Debug, Clone, PartialEq)]
pub struct InterpProcedure {
    /// Name of the GCL procedure to call.
    pub procedure: String,
    /// Axiom universals bound from the MP instantiation.
    pub inputs: Vec<String>,
    /// Axiom existentials, bound to the witnesses.
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct InterpRegistry {
    entries: IndexMap<String, InterpProcedure>,
    procedures: IndexMap<String, Procedure>,
    /// File name (`<procedure>.gcl`) → text.
    sources: IndexMap<String, String>,
}

const BUILTIN: &[(&str, &str)] = &[
    ("lemma_extension.gcl", include_str!("../../assets/interp/lemma_extension.gcl")),
    ("proposition_01.gcl", include_str!("../../assets/interp/proposition_01.gcl")),
    ("defrightangle2.gcl", include_str!("../../assets/interp/defrightangle2.gcl")),
    (
        "lemma_midpoint_existence.gcl",
        include_str!("../../assets/interp/lemma_midpoint_existence.gcl"),
    ),
    ("two_distinct_points.gcl", include_str!("../../assets/interp/two_distinct_points.gcl")),
    (
        "triangle_mid_par_strict.gcl",
        include_str!("../../assets/interp/triangle_mid_par_strict.gcl"),
    ),
    ("lemma_par2_pg.gcl", include_str!("../../assets/interp/lemma_par2_pg.gcl")),
];

pub const DEFAULT_MANIFEST: &str = include_str!("../../assets/interp/default.manifest");

struct Builtin;

impl Resolver for Builtin {
    fn resolve(&self, name: &str) -> Option<String> {
        BUILTIN.iter().find(|(n, _)| *n == name).map(|(_, t)| t.to_string())
    }
}

fn var_list(s: &str, key: &str) -> Option<Vec<String>> {
    let inner = s.strip_prefix(key)?.strip_prefix('(')?.strip_suffix(')')?;
    Some(
        inner
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(str::to_string)
            .collect(),
    )
}

fn called(stmts: &[Stmt], out: &mut Vec<String>) {
    for s in stmts {
        match s {
            Stmt::Call { name, .. } => out.push(name.clone()),
            Stmt::Procedure(p) => called(&p.body, out),
            _ => {}
        }
    }
}

impl InterpRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The shipped interpretations.
    pub fn builtin() -> Self {
        Self::from_manifest(DEFAULT_MANIFEST, &Builtin).expect("builtin manifest is valid")
    }

    pub fn from_manifest(text: &str, files: &dyn Resolver) -> Result<Self, InterpError> {
        let mut reg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| InterpError::Manifest {
                line: i + 1,
                message: msg.to_string(),
            };
            let (lhs, proc_name) = line.split_once('=').ok_or_else(|| bad("missing `= procedure`"))?;
            let mut words = lhs.split_whitespace();
            if words.next() != Some("interp") {
                return Err(bad("record must start with `interp`"));
            }
            let axiom = words.next().ok_or_else(|| bad("missing axiom name"))?;
            let rest: String = words.collect();
            let split = rest.find("outputs").ok_or_else(|| bad("missing outputs(...)"))?;
            let inputs = var_list(&rest[..split], "inputs").ok_or_else(|| bad("malformed inputs(...)"))?;
            let outputs = var_list(&rest[split..], "outputs").ok_or_else(|| bad("malformed outputs(...)"))?;
            let procedure = proc_name.trim().to_string();
            reg.load_procedure(&procedure, files)?;
            let entry = InterpProcedure {
                procedure,
                inputs,
                outputs,
            };
            reg.check_arity(&entry)?;
            reg.entries.insert(axiom.to_string(), entry);
        }
        Ok(reg)
    }

    /// Loads `<name>.gcl` and, transitively, the procedures it calls.
    fn load_procedure(&mut self, name: &str, files: &dyn Resolver) -> Result<(), InterpError> {
        if self.procedures.contains_key(name) {
            return Ok(());
        }
        let file = format!("{name}.gcl");
        let text = files
            .resolve(&file)
            .ok_or_else(|| InterpError::MissingProcedure(name.to_string()))?;
        let stmts = parse_file(&text).map_err(|e| InterpError::Gcl {
            context: file.clone(),
            source: e.in_file(&file),
        })?;
        let mut found = false;
        let mut deps = Vec::new();
        for s in &stmts {
            if let Stmt::Procedure(p) = s {
                found |= p.name == name;
                self.procedures.insert(p.name.clone(), p.clone());
            }
        }
        if !found {
            return Err(InterpError::MissingProcedure(name.to_string()));
        }
        called(&stmts, &mut deps);
        self.sources.insert(file, text);
        for d in deps {
            self.load_procedure(&d, files)?;
        }
        Ok(())
    }

    fn check_arity(&self, e: &InterpProcedure) -> Result<(), InterpError> {
        let p = &self.procedures[&e.procedure];
        if p.params.len() != e.inputs.len() + e.outputs.len() {
            return Err(InterpError::ProcedureArity {
                procedure: e.procedure.clone(),
                expected: e.inputs.len() + e.outputs.len(),
                found: p.params.len(),
            });
        }
        Ok(())
    }

    /// Entries of `other` replace ours.
    pub fn merge(&mut self, other: InterpRegistry) {
        self.procedures.extend(other.procedures);
        self.sources.extend(other.sources);
        self.entries.extend(other.entries);
    }

    /// Registers a generated procedure for `axiom`.
    pub fn insert(&mut self, axiom: &str, entry: InterpProcedure, procedure: Procedure) -> Result<(), InterpError> {
        let text = format!("{}\n", Stmt::Procedure(procedure.clone()));
        self.sources.insert(format!("{}.gcl", procedure.name), text);
        self.procedures.insert(procedure.name.clone(), procedure);
        self.check_arity(&entry)?;
        self.entries.insert(axiom.to_string(), entry);
        Ok(())
    }

    /// Makes a procedure callable without tying it to an axiom.
    pub fn add_procedure(&mut self, p: Procedure) {
        self.procedures.insert(p.name.clone(), p);
    }

    pub fn lookup(&self, axiom: &str) -> Option<&InterpProcedure> {
        self.entries.get(axiom)
    }

    pub fn axioms(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn procedures(&self) -> impl Iterator<Item = &Procedure> {
        self.procedures.values()
    }

    /// File text of `<procedure>.gcl`.
    pub fn source(&self, procedure: &str) -> Option<&str> {
        self.sources.get(&format!("{procedure}.gcl")).map(String::as_str)
    }

    /// `name` followed by the procedures it calls, depth first.
    pub fn with_dependencies(&self, name: &str) -> IndexSet<String> {
        fn go(reg: &InterpRegistry, name: &str, out: &mut IndexSet<String>) {
            if !out.insert(name.to_string()) {
                return;
            }
            if let Some(p) = reg.procedures.get(name) {
                let mut deps = Vec::new();
                called(&p.body, &mut deps);
                for d in deps {
                    go(reg, &d, out);
                }
            }
        }
        let mut out = IndexSet::new();
        go(self, name, &mut out);
        out
    }
}

impl Resolver for InterpRegistry {
    fn resolve(&self, name: &str) -> Option<String> {
        self.sources.get(name).cloned()
    }
}

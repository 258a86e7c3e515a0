use indexmap::IndexSet;

use super::branch::{is_contradictory, select_branch, BranchPolicy};
use super::document::GclDocument;
use super::IllustrateError;
use crate::formula::{CoherentFormula, Substitution, Theory};
use crate::gcl::{parse_file, MarkStyle, Procedure, Stmt};
use crate::interp::{apply_step, step_call, GeoModel, InterpError, InterpProcedure, InterpRegistry};
use crate::prover::{prove, Proof, ProofStep, SearchLimits};

pub const MAX_LEMMA_DEPTH: usize = 8;

/// Proofs of axioms that have no registered procedure of their own.
pub trait LemmaSource {
    /// The theory used, the axiom as a conjecture and its proof.
    fn lemma_proof(&self, axiom: &str) -> Option<(Theory, CoherentFormula, Proof)>;
}

/// Proves an axiom from the rest of the theory.
#[derive(Debug, Clone)]
pub struct ProvingLemmas {
    pub theory: Theory,
    pub limits: SearchLimits,
}

impl LemmaSource for ProvingLemmas {
    fn lemma_proof(&self, axiom: &str) -> Option<(Theory, CoherentFormula, Proof)> {
        if self.theory.is_support(axiom) {
            return None;
        }
        let ax = self.theory.axiom(axiom)?.clone();
        let mut t = self.theory.clone();
        t.axioms.retain(|a| a.name != axiom);
        let p = prove(&t, &ax, &self.limits).ok()?;
        Some((t, ax, p))
    }
}

#[derive(Clone, Copy, Default)]
pub struct CompileOptions<'a> {
    /// Emit `layer` lines and the animation header.
    pub animate: bool,
    pub policy: BranchPolicy,
    pub lemmas: Option<&'a dyn LemmaSource>,
}

struct Walker<'a> {
    theory: &'a Theory,
    reg: InterpRegistry,
    opts: CompileOptions<'a>,
    depth: usize,
    layered: bool,
    body: Vec<Stmt>,
    witnesses: Vec<String>,
    used: IndexSet<String>,
}

fn gcl_err(context: impl Into<String>) -> impl FnOnce(crate::gcl::GclError) -> IllustrateError {
    let context = context.into();
    move |source| IllustrateError::Gcl { context, source }
}

impl<'a> Walker<'a> {
    fn new(theory: &'a Theory, reg: InterpRegistry, opts: CompileOptions<'a>, depth: usize, layered: bool) -> Self {
        Walker {
            theory,
            reg,
            opts,
            depth,
            layered,
            body: Vec::new(),
            witnesses: Vec::new(),
            used: IndexSet::new(),
        }
    }

    /// Follows the selected path; returns the goal instantiation it ends with.
    fn walk(&mut self, steps: &[ProofStep], model: &mut GeoModel) -> Result<Substitution, IllustrateError> {
        for s in steps {
            match s {
                ProofStep::Mp { axiom, witnesses, .. } => self.mp(s, axiom, witnesses, model)?,
                ProofStep::CaseSplit { cases, .. } => {
                    let k = select_branch(cases, model, self.opts.policy, &self.theory.signature)?;
                    self.body.push(Stmt::Comment(format!(" --- Illustration for branch {}", k + 1)));
                    return self.walk(&cases[k].steps, model);
                }
                ProofStep::QedAssumption { instantiation, .. } => return Ok(instantiation.clone()),
                ProofStep::QedContradiction => return Err(IllustrateError::AllContradictory),
                ProofStep::QedCaseSplit => return Err(IllustrateError::Unfinished),
            }
        }
        Err(IllustrateError::Unfinished)
    }

    fn emit(&mut self, s: Stmt, layer: usize) {
        if self.layered {
            self.body.push(Stmt::Layer(layer));
        }
        self.body.push(s);
    }

    fn mp(
        &mut self,
        step: &ProofStep,
        axiom: &str,
        witnesses: &[String],
        model: &mut GeoModel,
    ) -> Result<(), IllustrateError> {
        if self.reg.lookup(axiom).is_none() && !witnesses.is_empty() {
            self.expand_lemma(step, axiom, model)?;
        }
        let Some(call) = step_call(step, &self.reg)? else {
            return Ok(());
        };
        if let Stmt::Call { name, .. } = &call {
            self.used.insert(name.clone());
        }
        let layer = model.next_layer;
        *model = apply_step(model.clone(), step, &self.reg)?;
        self.emit(call, layer);
        for w in witnesses {
            let layer = model.next_layer;
            model.mark(w, &self.reg).map_err(gcl_err(format!("mark {w}")))?;
            self.emit(Stmt::Mark(MarkStyle::MarkT, w.clone()), layer);
            self.witnesses.push(w.clone());
        }
        Ok(())
    }

    /// Compiles the proof of `axiom` into a procedure and registers it.
    fn expand_lemma(&mut self, step: &ProofStep, axiom: &str, model: &GeoModel) -> Result<(), IllustrateError> {
        let Some(source) = self.opts.lemmas else {
            return Ok(());
        };
        if self.depth >= MAX_LEMMA_DEPTH {
            return Err(IllustrateError::TooDeep(MAX_LEMMA_DEPTH));
        }
        let fail = |reason: &str| IllustrateError::Lemma {
            axiom: axiom.to_string(),
            reason: reason.to_string(),
        };
        let ProofStep::Mp { instantiation, .. } = step else {
            return Ok(());
        };
        let (theory, conj, proof) = source.lemma_proof(axiom).ok_or_else(|| fail("no proof found"))?;
        let mut sub = GeoModel::new(0);
        sub.rng = model.rng.clone();
        sub.tol_branch = model.tol_branch;
        sub.tol_check = model.tol_check;
        for (v, k) in conj.universals.iter().zip(&proof.intro.constants) {
            let caller = instantiation.get(v).ok_or_else(|| fail("input not instantiated"))?;
            let p = model
                .points
                .get(caller)
                .ok_or_else(|| InterpError::UnmappedConstant(caller.to_string()))?;
            sub.points.insert(k.clone(), *p);
        }
        let mut inner = Walker::new(&theory, self.reg.clone(), self.opts, self.depth + 1, false);
        let goal = inner.walk(&proof.body, &mut sub)?;
        let mut params = proof.intro.constants.clone();
        for v in &conj.existentials {
            let w = goal.get(v).ok_or_else(|| fail("existential not instantiated"))?;
            if params.iter().any(|p| p == w) {
                return Err(fail("witness coincides with another parameter"));
            }
            params.push(w.to_string());
        }
        self.reg = inner.reg;
        let procedure = Procedure {
            name: axiom.to_string(),
            params,
            body: inner.body,
        };
        let entry = InterpProcedure {
            procedure: axiom.to_string(),
            inputs: conj.universals.clone(),
            outputs: conj.existentials.clone(),
        };
        self.reg.insert(axiom, entry, procedure)?;
        Ok(())
    }
}

fn calls_in(stmts: &[Stmt], out: &mut Vec<String>) {
    for s in stmts {
        match s {
            Stmt::Call { name, .. } => out.push(name.clone()),
            Stmt::Procedure(p) => calls_in(&p.body, out),
            _ => {}
        }
    }
}

/// Compiles `proof` against a model of its premises. `exists_text` must
/// define `<conjecture>_exists` over the premise constants.
pub fn compile(
    proof: &Proof,
    theory: &Theory,
    mut model: GeoModel,
    reg: &InterpRegistry,
    exists_text: &str,
    opts: CompileOptions<'_>,
) -> Result<(GclDocument, GeoModel), IllustrateError> {
    if is_contradictory(&proof.body) {
        return Err(IllustrateError::AllContradictory);
    }
    for c in &proof.intro.constants {
        if !model.points.contains_key(c) {
            return Err(InterpError::UnmappedConstant(c.clone()).into());
        }
    }
    let mut w = Walker::new(theory, reg.clone(), opts, 0, opts.animate);
    w.walk(&proof.body, &mut model)?;
    let name = proof.conjecture.clone();
    let exists_name = format!("{name}_exists");
    let mut procs = IndexSet::new();
    let mut exists_calls = Vec::new();
    calls_in(&parse_file(exists_text).map_err(gcl_err(&exists_name))?, &mut exists_calls);
    for p in exists_calls.iter().chain(&w.used) {
        if *p != exists_name {
            procs.extend(w.reg.with_dependencies(p));
        }
    }
    let procedure_files = procs
        .iter()
        .filter_map(|p| w.reg.source(p).map(|t| (format!("{p}.gcl"), t.to_string())))
        .collect();
    let mut params = proof.intro.constants.clone();
    params.extend(w.witnesses);
    let doc = GclDocument {
        theorem: Procedure {
            name,
            params,
            body: w.body,
        },
        exists_name,
        exists_text: exists_text.to_string(),
        constants: proof.intro.constants.clone(),
        procedures: procs.into_iter().collect(),
        procedure_files,
        frames: opts.animate.then_some(model.next_layer as u32 + 1),
    };
    Ok((doc, model))
}

/// Walks `proof` on `model` without emitting layers; returns the goal instantiation.
pub(crate) fn walk_path(
    proof: &Proof,
    theory: &Theory,
    model: &mut GeoModel,
    reg: &InterpRegistry,
    policy: BranchPolicy,
) -> Result<Substitution, IllustrateError> {
    if is_contradictory(&proof.body) {
        return Err(IllustrateError::AllContradictory);
    }
    let opts = CompileOptions {
        policy,
        ..CompileOptions::default()
    };
    Walker::new(theory, reg.clone(), opts, 0, false).walk(&proof.body, model)
}

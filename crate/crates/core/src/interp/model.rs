use indexmap::IndexMap;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::draw::DrawOp;
use super::geom::{area2, GeoPoint, TOL_BRANCH, TOL_CHECK};
use super::registry::InterpRegistry;
use super::InterpError;
use crate::formula::{Atom, CoherentFormula, Conjunction, Signature, Term, NEQ};
use crate::gcl::{parse_gcl, Chain, GclError, Machine, MarkStyle, Obj, Resolver, Stmt};
use crate::prover::ProofStep;

/// Cartesian model of the constants introduced so far, with the drawing.
#[derive(Debug, Clone, Serialize)]
pub struct GeoModel {
    pub points: IndexMap<String, GeoPoint>,
    pub ops: Vec<DrawOp>,
    pub next_layer: usize,
    #[serde(skip)]
    pub rng: ChaCha8Rng,
    pub tol_branch: f64,
    pub tol_check: f64,
}

impl GeoModel {
    pub fn new(seed: u64) -> Self {
        GeoModel {
            points: IndexMap::new(),
            ops: Vec::new(),
            next_layer: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            tol_branch: TOL_BRANCH,
            tol_check: TOL_CHECK,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// Largest distance between two mapped points, at least 1.
    pub fn scale(&self) -> f64 {
        let pts: Vec<GeoPoint> = self.points.values().copied().collect();
        let mut d: f64 = 1.0;
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                d = d.max(p.dist(*q));
            }
        }
        d
    }

    /// Runs statements with every model point in scope. New top-level points
    /// join the model; draw ops land on `next_layer`, which then advances.
    pub fn exec(&mut self, stmts: &[Stmt], reg: &InterpRegistry) -> Result<(), GclError> {
        let rng = std::mem::replace(&mut self.rng, ChaCha8Rng::seed_from_u64(0));
        let mut m = Machine::new(reg.procedures().cloned(), rng);
        for (name, p) in &self.points {
            m.define(name, Obj::Point(*p));
        }
        m.layer = self.next_layer;
        let r = m.run(stmts);
        self.rng = m.rng.clone();
        r?;
        for (name, obj) in m.globals() {
            if let (Obj::Point(p), false) = (obj, self.points.contains_key(&name)) {
                self.points.insert(name, p);
            }
        }
        self.ops.append(&mut m.ops);
        self.next_layer += 1;
        Ok(())
    }

    /// Adds a label-only mark for `name` on its own layer.
    pub fn mark(&mut self, name: &str, reg: &InterpRegistry) -> Result<(), GclError> {
        self.exec(&[Stmt::Mark(MarkStyle::MarkT, name.to_string())], reg)
    }
}

/// The `call` statement interpreting an MP step, or `None` for an
/// unregistered witness-free step.
pub fn step_call(step: &ProofStep, reg: &InterpRegistry) -> Result<Option<Stmt>, InterpError> {
    let ProofStep::Mp {
        axiom,
        instantiation,
        witnesses,
        ..
    } = step
    else {
        return Ok(None);
    };
    let Some(entry) = reg.lookup(axiom) else {
        return if witnesses.is_empty() {
            Ok(None)
        } else {
            Err(InterpError::MissingInterpretation(axiom.clone()))
        };
    };
    if entry.outputs.len() != witnesses.len() {
        return Err(InterpError::OutputCount {
            axiom: axiom.clone(),
            expected: entry.outputs.len(),
            found: witnesses.len(),
        });
    }
    let mut args = Vec::new();
    for v in &entry.inputs {
        let c = instantiation.get(v).ok_or_else(|| InterpError::UnboundInput {
            axiom: axiom.clone(),
            var: v.clone(),
        })?;
        args.push(c.to_string());
    }
    args.extend(witnesses.iter().cloned());
    Ok(Some(Stmt::Call {
        name: entry.procedure.clone(),
        args,
    }))
}

/// Interprets one MP step on the model.
pub fn apply_step(mut model: GeoModel, step: &ProofStep, reg: &InterpRegistry) -> Result<GeoModel, InterpError> {
    let Some(call) = step_call(step, reg)? else {
        return Ok(model);
    };
    let ProofStep::Mp { axiom, witnesses, .. } = step else {
        unreachable!("step_call only builds calls for MP steps")
    };
    for c in step_inputs(&call, witnesses.len()) {
        if !model.points.contains_key(c) {
            return Err(InterpError::UnmappedConstant(c.to_string()));
        }
    }
    model.exec(std::slice::from_ref(&call), reg).map_err(|e| InterpError::Gcl {
        context: format!("step using {axiom}"),
        source: e,
    })?;
    for w in witnesses {
        if !model.points.contains_key(w) {
            return Err(InterpError::OutputNotAssigned {
                axiom: axiom.clone(),
                output: w.clone(),
            });
        }
    }
    Ok(model)
}

fn step_inputs(call: &Stmt, outputs: usize) -> &[String] {
    match call {
        Stmt::Call { args, .. } => &args[..args.len() - outputs],
        _ => &[],
    }
}

/// Extra atoms for the existence conjecture.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nondegeneracy {
    /// Pairwise `neq` over the point variables.
    pub distinct: bool,
    /// Variable triples required to be non-collinear.
    pub ncol: Vec<[String; 3]>,
}

impl Default for Nondegeneracy {
    fn default() -> Self {
        Nondegeneracy {
            distinct: true,
            ncol: Vec::new(),
        }
    }
}

fn ncol_name(sig: &Signature) -> &str {
    sig.complement("col").unwrap_or("ncol")
}

/// `⊤ ⇒ ∃x⃗ (premises ∧ extra)`, named `<name>_exists`.
pub fn premises_conjecture(c: &CoherentFormula, opts: &Nondegeneracy, sig: &Signature) -> CoherentFormula {
    let mut atoms: Vec<Atom> = c.premises.clone();
    let var = |v: &str| Term::Var(v.to_string());
    if opts.distinct {
        for (i, x) in c.universals.iter().enumerate() {
            for y in &c.universals[i + 1..] {
                let (a, b) = (Atom::new(NEQ, vec![var(x), var(y)]), Atom::new(NEQ, vec![var(y), var(x)]));
                if !atoms.contains(&a) && !atoms.contains(&b) {
                    atoms.push(a);
                }
            }
        }
    }
    for t in &opts.ncol {
        let a = Atom::new(ncol_name(sig), t.iter().map(|v| var(v)).collect());
        if !atoms.contains(&a) {
            atoms.push(a);
        }
    }
    CoherentFormula {
        name: format!("{}_exists", c.name),
        universals: Vec::new(),
        premises: Vec::new(),
        existentials: c.universals.clone(),
        disjuncts: vec![Conjunction(atoms)],
    }
}

/// Numeric non-degeneracy: distinct points, and non-collinear triples.
pub fn check_nondegenerate(
    model: &GeoModel,
    constants: &[String],
    ncol: &[[String; 3]],
    distinct: bool,
) -> Result<(), InterpError> {
    let pt = |c: &String| {
        model
            .points
            .get(c)
            .copied()
            .ok_or_else(|| InterpError::UnmappedConstant(c.clone()))
    };
    if distinct {
        for (i, x) in constants.iter().enumerate() {
            for y in &constants[i + 1..] {
                if pt(x)?.dist(pt(y)?) <= model.tol_branch {
                    return Err(InterpError::DegenerateModel(format!("{x} = {y}")));
                }
            }
        }
    }
    let s = model.scale();
    for [a, b, c] in ncol {
        if area2(pt(a)?, pt(b)?, pt(c)?).abs() / 2.0 <= model.tol_branch * s * s {
            return Err(InterpError::DegenerateModel(format!("col({a},{b},{c})")));
        }
    }
    Ok(())
}

/// Ground non-collinearity premises of `c`, as triples of its Skolem constants.
pub fn ncol_premises(premises: &[Atom], sig: &Signature) -> Vec<[String; 3]> {
    let name = ncol_name(sig);
    premises
        .iter()
        .filter(|a| a.pred == name && a.args.len() == 3)
        .map(|a| [0, 1, 2].map(|i| a.args[i].name().to_string()))
        .collect()
}

/// Runs a hand-written existence procedure: `text` must define `procedure`,
/// whose parameters are bound to `constants`. Its drawing goes to layer 0.
pub fn realize_from_gcl(
    text: &str,
    procedure: &str,
    constants: &[String],
    reg: &InterpRegistry,
    seed: u64,
) -> Result<GeoModel, InterpError> {
    let gcl = |e: GclError| InterpError::Gcl {
        context: procedure.to_string(),
        source: e,
    };
    let resolver: Chain = Chain(vec![reg as &dyn Resolver]);
    let prog = parse_gcl(text, &resolver).map_err(gcl)?;
    let mut extended = reg.clone();
    let mut defined = false;
    for p in prog.procedures().values() {
        defined |= p.name == procedure;
        extended.add_procedure((*p).clone());
    }
    if !defined {
        return Err(InterpError::MissingProcedure(procedure.to_string()));
    }
    let mut model = GeoModel::new(seed);
    let call = Stmt::Call {
        name: procedure.to_string(),
        args: constants.to_vec(),
    };
    model.exec(&[call], &extended).map_err(gcl)?;
    for c in constants {
        if !model.points.contains_key(c) {
            return Err(InterpError::UnmappedConstant(c.clone()));
        }
    }
    Ok(model)
}

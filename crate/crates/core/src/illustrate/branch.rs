use super::IllustrateError;
use crate::formula::{Atom, Signature, EQ, NEQ};
use crate::interp::geom::{area2, GeoPoint};
use crate::interp::GeoModel;
use crate::prover::{Case, ProofStep};

/// What to do when the model cannot tell open cases apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fallback {
    /// The first case stating a `neq` or complement atom.
    #[default]
    PreferComplement,
    FirstOpen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BranchPolicy {
    pub fallback: Fallback,
}

/// Whether a branch ends, possibly through nested splits, in contradiction.
pub fn is_contradictory(steps: &[ProofStep]) -> bool {
    match steps.last() {
        Some(ProofStep::QedContradiction) => true,
        Some(ProofStep::QedCaseSplit) => steps.iter().any(|s| match s {
            ProofStep::CaseSplit { cases, .. } => cases.iter().all(|c| is_contradictory(&c.steps)),
            _ => false,
        }),
        _ => false,
    }
}

/// Numeric truth of a ground atom, if the predicate is one we can judge.
pub fn evaluate_fact(a: &Atom, model: &GeoModel, sig: &Signature) -> Option<bool> {
    let pts: Option<Vec<_>> = a.args.iter().map(|t| model.points.get(t.name()).copied()).collect();
    let pts = pts?;
    let tol = model.tol_branch;
    let (base, positive) = match sig.complement(&a.pred) {
        Some(p) if sig.is_complement_name(&a.pred) => (p, false),
        _ => (a.pred.as_str(), true),
    };
    let s = model.scale();
    let col = |p: &[GeoPoint]| area2(p[0], p[1], p[2]).abs() / 2.0 <= tol * s * s;
    let v = match (base, pts.len()) {
        (EQ, 2) => pts[0].dist(pts[1]) <= tol,
        (NEQ, 2) => return Some(pts[0].dist(pts[1]) > tol),
        ("col", 3) => col(&pts),
        ("betS", 3) => {
            let (a, b, c) = (pts[0], pts[1], pts[2]);
            col(&pts) && b.sub(a).dot(c.sub(b)) > 0.0 && a.dist(b) > tol && b.dist(c) > tol
        }
        _ => return None,
    };
    Some(v == positive)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Holds,
    Fails,
    Unknown,
}

fn status(c: &Case, model: &GeoModel, sig: &Signature) -> Status {
    let vals: Vec<Option<bool>> = c.facts.atoms().iter().map(|a| evaluate_fact(a, model, sig)).collect();
    if vals.contains(&Some(false)) {
        Status::Fails
    } else if !vals.is_empty() && vals.iter().all(|v| *v == Some(true)) {
        Status::Holds
    } else {
        Status::Unknown
    }
}

/// Index of the case to illustrate.
pub fn select_branch(
    cases: &[Case],
    model: &GeoModel,
    policy: BranchPolicy,
    sig: &Signature,
) -> Result<usize, IllustrateError> {
    let open: Vec<usize> = (0..cases.len()).filter(|&i| !is_contradictory(&cases[i].steps)).collect();
    match open.len() {
        0 => return Err(IllustrateError::AllContradictory),
        1 => return Ok(open[0]),
        _ => {}
    }
    let st: Vec<(usize, Status)> = open.iter().map(|&i| (i, status(&cases[i], model, sig))).collect();
    let holding: Vec<usize> = st.iter().filter(|(_, s)| *s == Status::Holds).map(|(i, _)| *i).collect();
    match holding.len() {
        1 => return Ok(holding[0]),
        0 => {}
        _ => return Err(IllustrateError::AmbiguousBranch(holding.iter().map(|i| i + 1).collect())),
    }
    let candidates: Vec<usize> = st.iter().filter(|(_, s)| *s != Status::Fails).map(|(i, _)| *i).collect();
    let Some(&first) = candidates.first() else {
        return Err(IllustrateError::NoMatchingBranch);
    };
    if candidates.len() == 1 || policy.fallback == Fallback::FirstOpen {
        return Ok(first);
    }
    let negative = |i: &&usize| {
        cases[**i]
            .facts
            .atoms()
            .iter()
            .any(|a| a.pred == NEQ || sig.is_complement_name(&a.pred))
    };
    Ok(*candidates.iter().find(negative).unwrap_or(&first))
}

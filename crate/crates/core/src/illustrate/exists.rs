use super::compile::walk_path;
use super::{BranchPolicy, IllustrateError};
use crate::formula::{CoherentFormula, Theory};
use crate::gcl::{MarkStyle, Num, Procedure, Stmt};
use crate::interp::geom::GeoPoint;
use crate::interp::{
    check_nondegenerate, ncol_premises, premises_conjecture, realize_from_gcl, GeoModel, InterpError, InterpRegistry,
    Nondegeneracy,
};
use crate::prover::{prove, skolemize_conjecture, Proof, SearchLimits};

/// A premise model found through a proof of the existence conjecture.
#[derive(Debug, Clone)]
pub struct Realized {
    pub model: GeoModel,
    pub exists_text: String,
    pub conjecture: CoherentFormula,
    pub proof: Proof,
}

/// `procedure <name> { constants } { point ... cmark_t ... }`.
pub fn exists_procedure_text(name: &str, constants: &[String], points: &[GeoPoint]) -> String {
    let mut body: Vec<Stmt> = constants
        .iter()
        .zip(points)
        .map(|(c, p)| Stmt::Point {
            name: c.clone(),
            x: Num::Lit(p.x),
            y: Num::Lit(p.y),
            to: None,
        })
        .collect();
    body.extend(constants.iter().map(|c| Stmt::Mark(MarkStyle::CmarkT, c.clone())));
    let p = Procedure {
        name: name.to_string(),
        params: constants.to_vec(),
        body,
    };
    format!("{}\n", Stmt::Procedure(p))
}

/// Proves that the premises of `c` are satisfiable, interprets that proof and
/// fixes the resulting coordinates as the existence procedure.
pub fn realize_by_proof(
    theory: &Theory,
    c: &CoherentFormula,
    nd: &Nondegeneracy,
    reg: &InterpRegistry,
    policy: BranchPolicy,
    seed: u64,
    limits: &SearchLimits,
) -> Result<Realized, IllustrateError> {
    let conjecture = premises_conjecture(c, nd, &theory.signature);
    let proof = prove(theory, &conjecture, limits).map_err(IllustrateError::ExistenceUnprovable)?;
    let mut found = GeoModel::new(seed);
    let goal = walk_path(&proof, theory, &mut found, reg, policy)?;
    let (intro, _) = skolemize_conjecture(c);
    let mut points = Vec::new();
    for v in &c.universals {
        let k = goal.get(v).ok_or_else(|| InterpError::UnmappedConstant(v.to_lowercase()))?;
        points.push(*found.points.get(k).ok_or_else(|| InterpError::UnmappedConstant(k.to_string()))?);
    }
    let exists_text = exists_procedure_text(&conjecture.name, &intro.constants, &points);
    let model = realize_from_gcl(&exists_text, &conjecture.name, &intro.constants, reg, seed)?;
    let rename = |v: &String| {
        let i = c.universals.iter().position(|u| u == v);
        i.map_or_else(|| v.clone(), |i| intro.constants[i].clone())
    };
    let mut ncol = ncol_premises(&intro.assumed, &theory.signature);
    ncol.extend(nd.ncol.iter().map(|t| [0, 1, 2].map(|i| rename(&t[i]))));
    check_nondegenerate(&model, &intro.constants, &ncol, nd.distinct)?;
    Ok(Realized {
        model,
        exists_text,
        conjecture,
        proof,
    })
}

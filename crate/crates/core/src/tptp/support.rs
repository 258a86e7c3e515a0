use std::collections::BTreeSet;

use crate::formula::{Atom, CoherentFormula, Conjunction, Signature, Term, EQ, NEQ};

use super::TptpError;

/// Which support axioms accompany a translated theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportAxiomOptions {
    pub excluded_middle_for: BTreeSet<String>,
    pub substitution_axioms: bool,
    pub symmetry_for_neq: bool,
}

impl Default for SupportAxiomOptions {
    fn default() -> Self {
        SupportAxiomOptions {
            excluded_middle_for: [EQ.to_string()].into(),
            substitution_axioms: true,
            symmetry_for_neq: true,
        }
    }
}

/// `A, B, C, …` skipping `X`, which names the substituted position.
fn vars(n: usize) -> Vec<String> {
    ('A'..='Z')
        .filter(|&c| c != 'X')
        .take(n)
        .map(|c| c.to_string())
        .collect()
}

fn atom(pred: &str, vs: &[String]) -> Atom {
    Atom::new(pred, vs.iter().map(|v| Term::Var(v.clone())).collect())
}

fn horn(name: String, universals: Vec<String>, premises: Vec<Atom>, concl: Vec<Atom>) -> CoherentFormula {
    CoherentFormula {
        name,
        universals,
        premises,
        existentials: Vec::new(),
        disjuncts: if concl.is_empty() {
            Vec::new()
        } else {
            vec![Conjunction(concl)]
        },
    }
}

/// Complement contradiction/excluded-middle axioms and the equality kit.
pub fn generate_support_axioms(
    sig: &mut Signature,
    opts: &SupportAxiomOptions,
) -> Result<Vec<CoherentFormula>, TptpError> {
    for p in &opts.excluded_middle_for {
        if sig.arity(p).is_none() {
            return Err(TptpError::UnknownPredicate(p.clone()));
        }
    }
    for p in &opts.excluded_middle_for {
        sig.ensure_complement(p)?;
    }

    let ab = vars(2);
    let mut out = vec![
        horn(
            "eq_reflexive".into(),
            vec!["A".into()],
            vec![],
            vec![atom(EQ, &["A".into(), "A".into()])],
        ),
        horn(
            "eq_symmetric".into(),
            ab.clone(),
            vec![atom(EQ, &ab)],
            vec![atom(EQ, &[ab[1].clone(), ab[0].clone()])],
        ),
    ];
    if opts.symmetry_for_neq {
        out.push(horn(
            "neq_symmetric".into(),
            ab.clone(),
            vec![atom(NEQ, &ab)],
            vec![atom(NEQ, &[ab[1].clone(), ab[0].clone()])],
        ));
    }
    let pairs: Vec<(String, String)> = sig.complement_pairs().to_vec();
    for (pos, neg) in &pairs {
        let vs = vars(sig.arity(pos).unwrap_or(0));
        out.push(horn(
            format!("{pos}_neg_contradiction"),
            vs.clone(),
            vec![atom(pos, &vs), atom(neg, &vs)],
            vec![],
        ));
    }
    for (pos, neg) in &pairs {
        if !opts.excluded_middle_for.contains(pos) {
            continue;
        }
        let vs = vars(sig.arity(pos).unwrap_or(0));
        out.push(CoherentFormula {
            name: format!("{pos}_excluded_middle"),
            universals: vs.clone(),
            premises: vec![],
            existentials: vec![],
            disjuncts: vec![
                Conjunction(vec![atom(pos, &vs)]),
                Conjunction(vec![atom(neg, &vs)]),
            ],
        });
    }
    if opts.substitution_axioms {
        let preds: Vec<(String, usize)> = sig
            .predicates()
            .filter(|(p, _)| *p != EQ && *p != NEQ)
            .map(|(p, a)| (p.to_string(), a))
            .collect();
        for (p, arity) in preds {
            let vs = vars(arity);
            for i in 0..arity {
                let mut replaced = vs.clone();
                replaced[i] = "X".into();
                let mut universals = vs.clone();
                universals.push("X".into());
                out.push(horn(
                    format!("{p}_eqsub_{}", i + 1),
                    universals,
                    vec![atom(&p, &vs), atom(EQ, &[vs[i].clone(), "X".into()])],
                    vec![atom(&p, &replaced)],
                ));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_signature_kit() {
        let mut sig = Signature::new();
        let names: BTreeSet<String> = generate_support_axioms(&mut sig, &Default::default())
            .unwrap()
            .into_iter()
            .map(|a| a.name)
            .collect();
        let expected: BTreeSet<String> = [
            "eq_reflexive",
            "eq_symmetric",
            "neq_symmetric",
            "eq_neg_contradiction",
            "eq_excluded_middle",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        assert_eq!(names, expected);
    }

    #[test]
    fn col_eqsub_third_position() {
        let mut sig = Signature::new();
        sig.declare("col", 3).unwrap();
        let axs = generate_support_axioms(&mut sig, &Default::default()).unwrap();
        let ax = axs.iter().find(|a| a.name == "col_eqsub_3").unwrap();
        let prem: Vec<String> = ax.premises.iter().map(|a| a.to_string()).collect();
        assert_eq!(prem, ["col(A,B,C)", "eq(C,X)"]);
        assert_eq!(ax.disjuncts[0].0[0].to_string(), "col(A,B,X)");
        assert!(axs.iter().all(|a| a.validate().is_ok()));
    }

    #[test]
    fn unknown_excluded_middle_predicate() {
        let mut sig = Signature::new();
        let opts = SupportAxiomOptions {
            excluded_middle_for: ["foo".to_string()].into(),
            ..Default::default()
        };
        assert_eq!(
            generate_support_axioms(&mut sig, &opts).unwrap_err(),
            TptpError::UnknownPredicate("foo".into())
        );
    }

    #[test]
    fn opt_in_excluded_middle_registers_complement() {
        let mut sig = Signature::new();
        sig.declare("col", 3).unwrap();
        let opts = SupportAxiomOptions {
            excluded_middle_for: ["eq".to_string(), "col".to_string()].into(),
            substitution_axioms: false,
            symmetry_for_neq: false,
        };
        let axs = generate_support_axioms(&mut sig, &opts).unwrap();
        assert!(axs.iter().any(|a| a.name == "col_excluded_middle"));
        assert!(axs.iter().any(|a| a.name == "col_neg_contradiction"));
        assert!(!axs.iter().any(|a| a.name == "neq_symmetric"));
    }
}

use std::collections::BTreeSet;

use crate::formula::{Atom, CoherentFormula, Conjunction, Signature, Term, EQ, NEQ};

use super::parse::{AnnotatedFormula, Fof};
use super::TptpError;

struct Ctx<'a> {
    name: &'a str,
    sig: Signature,
}

impl Ctx<'_> {
    fn not_coherent(&self, reason: &str) -> TptpError {
        TptpError::NotCoherent {
            name: self.name.to_string(),
            reason: reason.to_string(),
        }
    }

    fn literal(&mut self, f: &Fof, positive: bool) -> Result<Option<Atom>, TptpError> {
        let atom = match f {
            Fof::Atom(a) => {
                self.sig.check_atom(a)?;
                if positive {
                    a.clone()
                } else {
                    let comp = self.sig.ensure_complement(&a.pred)?;
                    Atom::new(comp, a.args.clone())
                }
            }
            Fof::Eq(s, t) | Fof::Neq(s, t) => {
                let is_eq = matches!(f, Fof::Eq(..)) == positive;
                Atom::new(if is_eq { EQ } else { NEQ }, vec![s.clone(), t.clone()])
            }
            _ => return Ok(None),
        };
        Ok(Some(atom))
    }

    /// Premise must flatten to a conjunction of literals.
    fn premise(&mut self, f: &Fof, positive: bool, out: &mut Vec<Atom>) -> Result<(), TptpError> {
        if let Some(a) = self.literal(f, positive)? {
            if !out.contains(&a) {
                out.push(a);
            }
            return Ok(());
        }
        match (f, positive) {
            (Fof::True, true) | (Fof::False, false) => Ok(()),
            (Fof::True | Fof::False, _) => Err(self.not_coherent("falsum in premise")),
            (Fof::Not(x), _) => self.premise(x, !positive, out),
            (Fof::And(xs), true) | (Fof::Or(xs), false) => {
                xs.iter().try_for_each(|x| self.premise(x, positive, out))
            }
            (Fof::And(_), false) | (Fof::Or(_), true) => Err(self.not_coherent("premise disjunction")),
            (Fof::Implies(..), _) => Err(self.not_coherent("nested implication")),
            (Fof::Forall(..) | Fof::Exists(..), true) => {
                Err(self.not_coherent("quantifier inside premise"))
            }
            _ => Err(self.not_coherent("negation over a quantifier")),
        }
    }

    /// Disjunctive normal form of the conclusion, collecting existentials.
    fn dnf(
        &mut self,
        f: &Fof,
        positive: bool,
        exvars: &mut Vec<String>,
        taken: &mut BTreeSet<String>,
        renames: &mut Vec<(String, String)>,
    ) -> Result<Vec<Vec<Atom>>, TptpError> {
        if let Some(a) = self.literal(f, positive)? {
            let a = rename_atom(&a, renames);
            return Ok(vec![vec![a]]);
        }
        match (f, positive) {
            (Fof::True, true) | (Fof::False, false) => Ok(vec![Vec::new()]),
            (Fof::True | Fof::False, _) => Ok(Vec::new()),
            (Fof::Not(x), _) => self.dnf(x, !positive, exvars, taken, renames),
            (Fof::Or(xs), true) | (Fof::And(xs), false) => {
                let mut out = Vec::new();
                for x in xs {
                    out.extend(self.dnf(x, positive, exvars, taken, renames)?);
                }
                Ok(out)
            }
            (Fof::And(xs), true) | (Fof::Or(xs), false) => {
                let mut acc: Vec<Vec<Atom>> = vec![Vec::new()];
                for x in xs {
                    let part = self.dnf(x, positive, exvars, taken, renames)?;
                    let mut next = Vec::with_capacity(acc.len() * part.len());
                    for a in &acc {
                        for p in &part {
                            let mut c = a.clone();
                            for atom in p {
                                if !c.contains(atom) {
                                    c.push(atom.clone());
                                }
                            }
                            next.push(c);
                        }
                    }
                    acc = next;
                }
                Ok(acc)
            }
            (Fof::Exists(vs, body), true) => {
                let mark = renames.len();
                for v in vs {
                    let fresh = if taken.contains(v) {
                        let mut k = 1;
                        loop {
                            let cand = format!("{v}{k}");
                            if !taken.contains(&cand) {
                                break cand;
                            }
                            k += 1;
                        }
                    } else {
                        v.clone()
                    };
                    taken.insert(fresh.clone());
                    exvars.push(fresh.clone());
                    renames.push((v.clone(), fresh));
                }
                let r = self.dnf(body, positive, exvars, taken, renames);
                renames.truncate(mark);
                r
            }
            (Fof::Forall(..), true) => Err(self.not_coherent("universal quantifier in conclusion")),
            (Fof::Implies(..), _) => Err(self.not_coherent("nested implication")),
            _ => Err(self.not_coherent("negation over a quantifier")),
        }
    }
}

fn rename_atom(a: &Atom, renames: &[(String, String)]) -> Atom {
    let args = a
        .args
        .iter()
        .map(|t| match t {
            Term::Var(v) => match renames.iter().rev().find(|(from, _)| from == v) {
                Some((_, to)) => Term::Var(to.clone()),
                None => t.clone(),
            },
            Term::Const(_) => t.clone(),
        })
        .collect();
    Atom::new(a.pred.clone(), args)
}

/// Translates one parsed entry into coherent form, registering complement
/// predicates for negated atoms in the returned signature.
pub fn coherentize(
    f: &AnnotatedFormula,
    sig: &Signature,
) -> Result<(Vec<CoherentFormula>, Signature), TptpError> {
    let mut ctx = Ctx {
        name: &f.name,
        sig: sig.clone(),
    };
    let mut body = &f.body;
    let mut universals: Vec<String> = Vec::new();
    while let Fof::Forall(vs, b) = body {
        for v in vs {
            if !universals.contains(v) {
                universals.push(v.clone());
            }
        }
        body = b;
    }
    let mut hoisted: Vec<String> = Vec::new();
    let mut inner = body;
    while let Fof::Exists(vs, b) = inner {
        hoisted.extend(vs.iter().cloned());
        inner = b;
    }

    let (premise_fof, conclusion) = match inner {
        Fof::Implies(p, c) => (Some(&**p), &**c),
        _ => (None, body),
    };
    let mut premises = Vec::new();
    if let Some(p) = premise_fof {
        ctx.premise(p, true, &mut premises)?;
        for a in &premises {
            if let Some(v) = a.vars().find(|v| hoisted.iter().any(|h| h == v)) {
                return Err(ctx.not_coherent(&format!(
                    "existential {v} occurs in the premise"
                )));
            }
        }
    }
    // With an implication, the hoisted prefix moves into the conclusion.
    let conclusion_owned;
    let conclusion = if premise_fof.is_some() && !hoisted.is_empty() {
        conclusion_owned = Fof::Exists(hoisted.clone(), Box::new(conclusion.clone()));
        &conclusion_owned
    } else {
        conclusion
    };

    let mut exvars = Vec::new();
    let mut taken: BTreeSet<String> = universals.iter().cloned().collect();
    let mut renames = Vec::new();
    let dnf = ctx.dnf(conclusion, true, &mut exvars, &mut taken, &mut renames)?;

    let mut disjuncts: Vec<Conjunction> = Vec::new();
    let dnf = if dnf.iter().any(Vec::is_empty) {
        vec![Vec::new()]
    } else {
        dnf
    };
    for d in dnf {
        let c = Conjunction(d);
        if !disjuncts.contains(&c) {
            disjuncts.push(c);
        }
    }
    let used: BTreeSet<&str> = disjuncts
        .iter()
        .flat_map(|d| d.0.iter().flat_map(|a| a.vars()))
        .collect();
    let existentials: Vec<String> = exvars
        .iter()
        .filter(|v| used.contains(v.as_str()))
        .cloned()
        .collect();

    let out = CoherentFormula {
        name: f.name.clone(),
        universals,
        premises,
        existentials,
        disjuncts,
    };
    out.validate()?;
    for a in out.atoms() {
        ctx.sig.check_atom(a)?;
    }
    Ok((vec![out], ctx.sig))
}

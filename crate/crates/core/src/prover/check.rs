//! Replays a proof step by step against the theory, sharing no state with
//! the search engine.

use std::collections::HashSet;

use indexmap::IndexSet;

use crate::formula::{Atom, CoherentFormula, Conjunction, Substitution, Theory};

use super::{skolemize_avoiding, Goal, Proof, ProofStep};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckResult {
    Valid,
    /// `step_index` counts steps in pre-order across the whole tree.
    Invalid { step_index: usize, reason: String },
}

struct Checker<'a> {
    theory: &'a Theory,
    goal: &'a Goal,
    counter: usize,
}

type Verdict = Result<(), (usize, String)>;

fn ground_all(atoms: &[Atom], s: &Substitution) -> Result<Vec<Atom>, String> {
    atoms
        .iter()
        .map(|a| a.apply(s).map_err(|e| e.to_string()))
        .collect()
}

impl Checker<'_> {
    fn branch(
        &mut self,
        steps: &[ProofStep],
        facts: &mut HashSet<Atom>,
        consts: &mut IndexSet<String>,
    ) -> Verdict {
        let mut bottom = false;
        let mut pending: Option<(usize, Vec<Conjunction>)> = None;
        if steps.is_empty() {
            return Err((self.counter, "branch ends without a closing step".into()));
        }
        for (i, step) in steps.iter().enumerate() {
            let idx = self.counter;
            self.counter += 1;
            let fail = |r: String| Err((idx, r));
            if step.is_qed() && i + 1 != steps.len() {
                return fail("closing step is not last in its branch".into());
            }
            if let Some((from, _)) = &pending {
                if !matches!(step, ProofStep::CaseSplit { from_step, .. } if from_step == from) {
                    return fail(format!("disjunctive step {from} is not followed by its case split"));
                }
            }
            match step {
                ProofStep::Mp {
                    axiom,
                    instantiation,
                    witnesses,
                    concluded,
                } => {
                    let Some(ax) = self.theory.axiom(axiom) else {
                        return fail(format!("unknown axiom {axiom}"));
                    };
                    if let Err(r) = self.mp(ax, instantiation, witnesses, concluded, facts, consts) {
                        return fail(r);
                    }
                    match concluded.len() {
                        0 => bottom = true,
                        1 => facts.extend(concluded[0].0.iter().cloned()),
                        _ => pending = Some((i, concluded.clone())),
                    }
                }
                ProofStep::CaseSplit { from_step, cases } => {
                    let Some((_, disjuncts)) = pending.take() else {
                        return fail(format!("case split refers to step {from_step}, which is not disjunctive"));
                    };
                    if cases.len() != disjuncts.len() {
                        return fail(format!(
                            "{} cases for {} disjuncts",
                            cases.len(),
                            disjuncts.len()
                        ));
                    }
                    for (case, d) in cases.iter().zip(&disjuncts) {
                        if &case.facts != d {
                            return fail(format!("case assumes {:?}, expected {:?}", case.facts, d));
                        }
                        let mut f = facts.clone();
                        f.extend(case.facts.0.iter().cloned());
                        let mut c = consts.clone();
                        self.branch(&case.steps, &mut f, &mut c)?;
                    }
                    match steps.get(i + 1) {
                        Some(ProofStep::QedCaseSplit) => {}
                        _ => return fail("case split is not closed by QEDcs".into()),
                    }
                }
                ProofStep::QedAssumption {
                    disjunct,
                    instantiation,
                } => {
                    let Some(d) = self.goal.disjuncts.get(*disjunct) else {
                        return fail(format!("goal has no disjunct {disjunct}"));
                    };
                    let keys: Vec<&str> = instantiation.iter().map(|(k, _)| k).collect();
                    let wanted: Vec<&str> = self.goal.existentials.iter().map(String::as_str).collect();
                    if keys != wanted {
                        return fail("instantiation does not cover the goal existentials".into());
                    }
                    if let Some((_, c)) = instantiation.iter().find(|(_, c)| !consts.contains(*c)) {
                        return fail(format!("constant {c} not in scope"));
                    }
                    let need = match ground_all(&d.0, instantiation) {
                        Ok(x) => x,
                        Err(r) => return fail(r),
                    };
                    if let Some(a) = need.iter().find(|a| !facts.contains(*a)) {
                        return fail(format!("goal atom {a} not established"));
                    }
                }
                ProofStep::QedContradiction => {
                    if !bottom {
                        return fail("no contradiction derived".into());
                    }
                }
                ProofStep::QedCaseSplit => {
                    if !matches!(i.checked_sub(1).map(|j| &steps[j]), Some(ProofStep::CaseSplit { .. })) {
                        return fail("QEDcs without a preceding case split".into());
                    }
                }
            }
        }
        if let Some((from, _)) = pending {
            return Err((self.counter, format!("disjunctive step {from} is never split")));
        }
        if !steps.last().is_some_and(ProofStep::is_qed) {
            return Err((self.counter, "branch ends without a closing step".into()));
        }
        Ok(())
    }

    fn mp(
        &self,
        ax: &CoherentFormula,
        inst: &Substitution,
        witnesses: &[String],
        concluded: &[Conjunction],
        facts: &HashSet<Atom>,
        consts: &mut IndexSet<String>,
    ) -> Result<(), String> {
        let keys: Vec<&str> = inst.iter().map(|(k, _)| k).collect();
        let wanted: Vec<&str> = ax.universals.iter().map(String::as_str).collect();
        if keys != wanted {
            return Err(format!("instantiation keys {keys:?} differ from universals {wanted:?}"));
        }
        if let Some((_, c)) = inst.iter().find(|(_, c)| !consts.contains(*c)) {
            return Err(format!("constant {c} not in scope"));
        }
        for a in ground_all(&ax.premises, inst)? {
            if !facts.contains(&a) {
                return Err(format!("premise {a} not established"));
            }
        }
        if witnesses.len() != ax.existentials.len() {
            return Err("witness count differs from existentials".into());
        }
        let mut full = inst.clone();
        for (k, (v, w)) in ax.existentials.iter().zip(witnesses).enumerate() {
            if consts.contains(w) || witnesses[..k].contains(w) {
                return Err(format!("witness {w} is not fresh"));
            }
            full.bind(v.clone(), w.clone());
        }
        let expect: Vec<Conjunction> = ax
            .disjuncts
            .iter()
            .map(|d| d.apply(&full).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        if expect != concluded {
            return Err("concluded facts do not match the axiom instance".into());
        }
        consts.extend(witnesses.iter().cloned());
        Ok(())
    }
}

/// Independent replay of `p` for conjecture `c` in theory `t`.
pub fn check_proof(t: &Theory, c: &CoherentFormula, p: &Proof) -> CheckResult {
    let mut consts: IndexSet<String> = t.constants();
    consts.extend(c.atoms().flat_map(|a| a.consts().map(str::to_string)));
    let (intro, goal) = skolemize_avoiding(c, &consts);
    if p.intro != intro || p.goal != goal {
        return CheckResult::Invalid {
            step_index: 0,
            reason: "introduction does not match the conjecture".into(),
        };
    }
    consts.extend(intro.constants.iter().cloned());
    let mut facts: HashSet<Atom> = intro.assumed.iter().cloned().collect();
    let mut ck = Checker {
        theory: t,
        goal: &goal,
        counter: 0,
    };
    match ck.branch(&p.body, &mut facts, &mut consts) {
        Ok(()) => CheckResult::Valid,
        Err((step_index, reason)) => CheckResult::Invalid { step_index, reason },
    }
}

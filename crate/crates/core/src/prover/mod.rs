//! Forward-chaining proof search over coherent theories, and an independent
//! replay checker for the proofs it emits.

mod check;
mod engine;

use std::time::Duration;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Atom, CoherentFormula, Conjunction, Substitution, Theory};

pub use check::{check_proof, CheckResult};

/// Skolemized conjecture premises.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intro {
    pub constants: Vec<String>,
    pub assumed: Vec<Atom>,
}

/// The instantiated conclusion still to be derived; existentials stay open.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Goal {
    pub existentials: Vec<String>,
    pub disjuncts: Vec<Conjunction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub facts: Conjunction,
    pub steps: Vec<ProofStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProofStep {
    Mp {
        axiom: String,
        instantiation: Substitution,
        witnesses: Vec<String>,
        concluded: Vec<Conjunction>,
    },
    /// Opens one case per disjunct of the MP at index `from_step` in the same list.
    CaseSplit { from_step: usize, cases: Vec<Case> },
    QedAssumption {
        disjunct: usize,
        instantiation: Substitution,
    },
    QedContradiction,
    QedCaseSplit,
}

impl ProofStep {
    pub fn is_qed(&self) -> bool {
        matches!(
            self,
            ProofStep::QedAssumption { .. } | ProofStep::QedContradiction | ProofStep::QedCaseSplit
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofStats {
    /// Total MP steps in the tree.
    pub mp_count: usize,
    /// Most MP steps on any root-to-leaf path.
    pub max_depth: usize,
    /// Branching-step bound at which the deepening loop succeeded.
    pub deepening_level: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proof {
    pub conjecture: String,
    pub intro: Intro,
    pub goal: Goal,
    pub body: Vec<ProofStep>,
    pub stats: ProofStats,
}

impl Proof {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("proof serializes")
    }

    pub fn from_json(text: &str) -> Result<Proof, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Recomputes `mp_count` and `max_depth` from the tree.
    pub fn recount(&mut self) {
        fn walk(steps: &[ProofStep]) -> (usize, usize) {
            let (mut count, mut depth, mut deepest_case) = (0, 0, 0);
            for s in steps {
                match s {
                    ProofStep::Mp { .. } => {
                        count += 1;
                        depth += 1;
                    }
                    ProofStep::CaseSplit { cases, .. } => {
                        for c in cases {
                            let (n, d) = walk(&c.steps);
                            count += n;
                            deepest_case = deepest_case.max(d);
                        }
                    }
                    _ => {}
                }
            }
            (count, depth + deepest_case)
        }
        let (n, d) = walk(&self.body);
        self.stats.mp_count = n;
        self.stats.max_depth = d;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchLimits {
    /// Ceiling for the iterative-deepening bound on branching steps per path.
    pub max_mp_steps: usize,
    pub timeout: Duration,
    pub max_constants: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_mp_steps: 12,
            timeout: Duration::from_secs(60),
            max_constants: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Unprovable {
    #[error("no proof within the step limit")]
    LimitExhausted,
    #[error("proof search timed out")]
    Timeout,
    #[error("internal error: produced proof failed replay: {0}")]
    Internal(String),
}

/// Skolemizes with fresh constants named after the lowercased variables.
pub fn skolemize_conjecture(c: &CoherentFormula) -> (Intro, Goal) {
    skolemize_avoiding(c, &IndexSet::new())
}

/// As [`skolemize_conjecture`], avoiding constants already in use.
pub fn skolemize_avoiding(c: &CoherentFormula, taken: &IndexSet<String>) -> (Intro, Goal) {
    let mut used: IndexSet<String> = taken.clone();
    used.extend(c.atoms().flat_map(|a| a.consts().map(str::to_string)));
    let mut sub = Substitution::new();
    let mut constants = Vec::new();
    for v in &c.universals {
        let base = v.to_lowercase();
        let mut name = base.clone();
        let mut k = 1;
        while used.contains(&name) {
            name = format!("{base}{k}");
            k += 1;
        }
        used.insert(name.clone());
        sub.bind(v.clone(), name.clone());
        constants.push(name);
    }
    let assumed = c
        .premises
        .iter()
        .map(|a| a.apply(&sub).expect("premise variables are universal"))
        .collect();
    let disjuncts = c
        .disjuncts
        .iter()
        .map(|d| Conjunction(d.0.iter().map(|a| a.apply_partial(&sub)).collect()))
        .collect();
    (
        Intro { constants, assumed },
        Goal {
            existentials: c.existentials.clone(),
            disjuncts,
        },
    )
}

/// Ground facts plus the constants in scope, in creation order.
#[derive(Debug, Clone, Default)]
pub struct FactBase {
    pub constants: Vec<String>,
    pub facts: Vec<Atom>,
}

impl FactBase {
    pub fn new(constants: &[&str], facts: &[&str]) -> Self {
        FactBase {
            constants: constants.iter().map(|c| c.to_string()).collect(),
            facts: facts.iter().map(|f| f.parse().expect("ground atom")).collect(),
        }
    }
}

/// Every productive instance of `ax` over `fb`, ordered lexicographically by
/// the creation index of the constants bound to the axiom's universals.
pub fn applicable_instances(fb: &FactBase, ax: &CoherentFormula) -> Vec<Substitution> {
    engine::instances_of(fb, ax)
}

/// Iterative-deepening forward-chaining search.
pub fn prove(t: &Theory, c: &CoherentFormula, lim: &SearchLimits) -> Result<Proof, Unprovable> {
    let proof = engine::search(t, c, lim)?;
    match check_proof(t, c, &proof) {
        CheckResult::Valid => Ok(proof),
        CheckResult::Invalid { step_index, reason } => {
            Err(Unprovable::Internal(format!("step {step_index}: {reason}")))
        }
    }
}

/// Batch proving; fans out across conjectures with the `parallel` feature.
pub fn prove_all(
    t: &Theory,
    conjectures: &[CoherentFormula],
    lim: &SearchLimits,
    exec: crate::exec::Execution,
) -> Vec<Result<Proof, Unprovable>> {
    crate::exec::map(exec, conjectures, |c| prove(t, c, lim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tptp::{load_problem, SupportAxiomOptions};

    fn problem(src: &str) -> crate::tptp::Problem {
        load_problem(src, &SupportAxiomOptions::default()).unwrap()
    }

    const EXAMPLE1: &str = "
        fof(ax1,axiom,(! [X] : (p(X) => (r(X) | q(X))))).
        fof(ax2,axiom,(! [X] : (q(X) => $false))).
        fof(goal,conjecture,(! [X] : (p(X) => r(X)))).";

    #[test]
    fn skolemize_examples() {
        let p = problem(EXAMPLE1);
        let (intro, goal) = skolemize_conjecture(&p.conjectures[0]);
        assert_eq!(intro.constants, ["x"]);
        assert_eq!(intro.assumed[0].to_string(), "p(x)");
        assert_eq!(goal.disjuncts[0].0[0].to_string(), "r(x)");

        let p = problem("fof(c,conjecture,(? [X] : q(X))).");
        let (intro, goal) = skolemize_conjecture(&p.conjectures[0]);
        assert!(intro.constants.is_empty() && intro.assumed.is_empty());
        assert_eq!(goal.existentials, ["X"]);
    }

    #[test]
    fn skolem_names_avoid_collisions() {
        let p = problem("fof(c,conjecture,(! [A,B] : (p(a,A) => q(B)))).");
        let (intro, _) = skolemize_conjecture(&p.conjectures[0]);
        assert_eq!(intro.constants, ["a1", "b"]);
    }

    #[test]
    fn applicable_instance_examples() {
        let p = problem(
            "fof(ax1,axiom,(! [X] : (p(X) => (r(X) | q(X))))).
             fof(ax2,axiom,(! [X] : (q(X) => $false))).
             fof(ax3,axiom,(! [X] : (r(X) => (r(X) | s(X))))).",
        );
        let ax = |n: &str| p.theory.axiom(n).unwrap();
        let fb = FactBase::new(&["a"], &["p(a)"]);
        assert_eq!(
            applicable_instances(&fb, ax("ax1")),
            vec![Substitution::from_pairs([("X", "a")])]
        );
        assert!(applicable_instances(&fb, ax("ax2")).is_empty());
        let fb = FactBase::new(&["a"], &["r(a)"]);
        assert_eq!(
            applicable_instances(&fb, ax("ax3")),
            vec![Substitution::from_pairs([("X", "a")])]
        );
    }

    #[test]
    fn instances_are_lexicographic() {
        let p = problem("fof(t,axiom,(! [X,Y] : ((e(X,Y)) => f(Y,X)))).");
        let fb = FactBase::new(&["a", "b", "c"], &["e(c,a)", "e(a,b)", "e(b,a)", "e(a,c)"]);
        let got: Vec<String> = applicable_instances(&fb, p.theory.axiom("t").unwrap())
            .iter()
            .map(|s| format!("{}{}", s.get("X").unwrap(), s.get("Y").unwrap()))
            .collect();
        assert_eq!(got, ["ab", "ac", "ba", "ca"]);
    }

    #[test]
    fn example1_proof_shape() {
        let p = problem(EXAMPLE1);
        let proof = prove(&p.theory, &p.conjectures[0], &SearchLimits::default()).unwrap();
        assert_eq!(proof.body.len(), 3);
        assert!(matches!(&proof.body[0], ProofStep::Mp { axiom, .. } if axiom == "ax1"));
        let ProofStep::CaseSplit { from_step, cases } = &proof.body[1] else {
            panic!("expected case split")
        };
        assert_eq!(*from_step, 0);
        assert!(matches!(cases[0].steps[..], [ProofStep::QedAssumption { .. }]));
        assert!(matches!(
            &cases[1].steps[..],
            [ProofStep::Mp { axiom, .. }, ProofStep::QedContradiction] if axiom == "ax2"
        ));
        assert_eq!(proof.body[2], ProofStep::QedCaseSplit);
        assert_eq!(proof.stats.mp_count, 2);
    }

    #[test]
    fn nothing_derivable() {
        let p = problem("fof(c,conjecture,p(a)).");
        let lim = SearchLimits {
            max_mp_steps: 5,
            ..Default::default()
        };
        assert_eq!(
            prove(&p.theory, &p.conjectures[0], &lim).unwrap_err(),
            Unprovable::LimitExhausted
        );
    }

    #[test]
    fn json_round_trip() {
        let p = problem(EXAMPLE1);
        let proof = prove(&p.theory, &p.conjectures[0], &SearchLimits::default()).unwrap();
        let json = proof.to_json();
        assert!(json.contains("\"kind\": \"case_split\""));
        assert!(json.contains("\"instantiation\""));
        assert_eq!(Proof::from_json(&json).unwrap(), proof);
    }

    #[test]
    fn deterministic() {
        let p = problem(EXAMPLE1);
        let a = prove(&p.theory, &p.conjectures[0], &SearchLimits::default()).unwrap();
        let b = prove(&p.theory, &p.conjectures[0], &SearchLimits::default()).unwrap();
        assert_eq!(a, b);
    }
}

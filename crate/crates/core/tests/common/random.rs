use std::time::Duration;

use proptest::prelude::*;

use geoproof::prover::{check_proof, prove, CheckResult, SearchLimits};
use geoproof::semantics::find_countermodel;
use geoproof::tptp::{load_problem, SupportAxiomOptions};

const PREDS: [(&str, usize); 3] = [("p", 1), ("q", 2), ("r", 1)];

#[derive(Debug, Clone)]
enum Lit {
    Pred(bool, usize, Vec<String>),
    Eq(bool, String, String),
}

impl Lit {
    fn text(&self) -> String {
        match self {
            Lit::Pred(pos, p, args) => {
                let a = format!("{}({})", PREDS[*p].0, args.join(","));
                if *pos {
                    a
                } else {
                    format!("~ {a}")
                }
            }
            Lit::Eq(true, a, b) => format!("{a} = {b}"),
            Lit::Eq(false, a, b) => format!("{a} != {b}"),
        }
    }
}

fn term(with_w: bool) -> BoxedStrategy<String> {
    let mut pool = vec!["X", "Y", "a", "b", "c"];
    if with_w {
        pool.extend(["W", "W"]);
    }
    prop::sample::select(pool).prop_map(str::to_string).boxed()
}

fn lit(with_w: bool) -> BoxedStrategy<Lit> {
    prop_oneof![
        4 => (any::<bool>(), 0..PREDS.len(), prop::collection::vec(term(with_w), 2))
            .prop_map(|(pos, p, mut args)| {
                args.truncate(PREDS[p].1);
                Lit::Pred(pos, p, args)
            }),
        1 => (any::<bool>(), term(with_w), term(with_w)).prop_map(|(pos, a, b)| Lit::Eq(pos, a, b)),
    ]
    .boxed()
}

fn conj(lits: &[Lit]) -> String {
    lits.iter().map(Lit::text).collect::<Vec<_>>().join(" & ")
}

/// One entry as TPTP text, quantifying exactly the variables that occur.
pub fn formula(name: &'static str, role: &'static str) -> impl Strategy<Value = String> {
    let prem = prop::collection::vec(lit(false), 0..=2);
    let body = any::<bool>().prop_flat_map(|ex| {
        (
            Just(ex),
            prop::collection::vec(prop::collection::vec(lit(ex), 1..=2), 0..=2),
        )
    });
    (prem, body).prop_map(move |(prem, (ex, disj))| {
        let concl = if disj.is_empty() {
            "$false".to_string()
        } else {
            disj.iter().map(|d| format!("({})", conj(d))).collect::<Vec<_>>().join(" | ")
        };
        let has = |v: &str| {
            prem.iter().chain(disj.iter().flatten()).any(|l| match l {
                Lit::Pred(_, _, a) => a.iter().any(|t| t == v),
                Lit::Eq(_, a, b) => a == v || b == v,
            })
        };
        let mut concl = format!("({concl})");
        if ex && has("W") {
            concl = format!("(? [W] : {concl})");
        }
        let mut body = if prem.is_empty() {
            concl
        } else {
            format!("(({}) => {concl})", conj(&prem))
        };
        let univ: Vec<&str> = ["X", "Y"].into_iter().filter(|v| has(v)).collect();
        if !univ.is_empty() {
            body = format!("(! [{}] : {body})", univ.join(","));
        }
        format!("fof({name},{role},{body}).\n")
    })
}

pub fn problem_text() -> impl Strategy<Value = String> {
    const NAMES: [&str; 6] = ["ax0", "ax1", "ax2", "ax3", "ax4", "ax5"];
    (1..=6usize)
        .prop_flat_map(|n| {
            let axioms: Vec<_> = NAMES[..n].iter().map(|&name| formula(name, "axiom")).collect();
            (axioms, formula("goal", "conjecture"))
        })
        .prop_map(|(axioms, goal)| axioms.concat() + &goal)
}

pub fn limits() -> SearchLimits {
    SearchLimits {
        max_mp_steps: 3,
        timeout: Duration::from_secs(1),
        max_constants: 10,
    }
}

pub enum Outcome {
    Proved,
    Refuted,
    Open,
}

/// Proves `src`; a returned proof must check and have no countermodel of
/// size at most 3.
pub fn run(src: &str) -> Result<Outcome, String> {
    let p = load_problem(src, &SupportAxiomOptions::default()).map_err(|e| format!("{e}\n{src}"))?;
    let c = &p.conjectures[0];
    match prove(&p.theory, c, &limits()) {
        Ok(proof) => {
            let r = check_proof(&p.theory, c, &proof);
            if r != CheckResult::Valid {
                return Err(format!("{r:?}\n{src}"));
            }
            if let Some(m) = find_countermodel(&p.theory, c, 3) {
                return Err(format!("proved but refuted by {m:?}\n{src}"));
            }
            Ok(Outcome::Proved)
        }
        Err(_) if find_countermodel(&p.theory, c, 3).is_some() => Ok(Outcome::Refuted),
        Err(_) => Ok(Outcome::Open),
    }
}


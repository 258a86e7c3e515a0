use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use geoproof::formula::Term;
use geoproof::semantics::{holds, Structure};
use geoproof::tptp::{coherentize, load_problem, parse_tptp, Fof, SupportAxiomOptions};

pub fn eval(f: &Fof, m: &Structure, env: &mut Vec<(String, usize)>) -> bool {
    let elem = |t: &Term, env: &[(String, usize)]| match t {
        Term::Var(v) => env.iter().rev().find(|(n, _)| n == v).unwrap().1,
        Term::Const(c) => m.constants[c.as_str()],
    };
    match f {
        Fof::Forall(vs, body) | Fof::Exists(vs, body) => {
            let all = matches!(f, Fof::Forall(..));
            let n = vs.len() as u32;
            (0..m.size.pow(n)).fold(all, |acc, mut k| {
                if acc != all {
                    return acc;
                }
                for v in vs {
                    env.push((v.clone(), k % m.size));
                    k /= m.size;
                }
                let r = eval(body, m, env);
                env.truncate(env.len() - vs.len());
                r
            })
        }
        Fof::Implies(a, b) => !eval(a, m, env) || eval(b, m, env),
        Fof::And(xs) => xs.iter().all(|x| eval(x, m, env)),
        Fof::Or(xs) => xs.iter().any(|x| eval(x, m, env)),
        Fof::Not(x) => !eval(x, m, env),
        Fof::Atom(a) => {
            let args: Vec<usize> = a.args.iter().map(|t| elem(t, env)).collect();
            m.facts.get(&a.pred).is_some_and(|ts| ts.contains(&args))
        }
        Fof::Eq(a, b) => elem(a, env) == elem(b, env),
        Fof::Neq(a, b) => elem(a, env) != elem(b, env),
        Fof::True => true,
        Fof::False => false,
    }
}

pub fn fof_preds(f: &Fof, out: &mut BTreeMap<String, usize>) {
    match f {
        Fof::Forall(_, b) | Fof::Exists(_, b) | Fof::Not(b) => fof_preds(b, out),
        Fof::Implies(a, b) => {
            fof_preds(a, out);
            fof_preds(b, out);
        }
        Fof::And(xs) | Fof::Or(xs) => xs.iter().for_each(|x| fof_preds(x, out)),
        Fof::Atom(a) => {
            out.insert(a.pred.clone(), a.args.len());
        }
        _ => {}
    }
}

/// Each entry of `src` agrees with its coherent translation on structures of
/// one and two elements, complements read as negation. Small signatures are
/// enumerated exhaustively, larger ones sampled.
pub fn translation_agrees(src: &str) -> Result<usize, String> {
    let p = load_problem(src, &SupportAxiomOptions::default()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for e in parse_tptp(src).map_err(|e| e.to_string())? {
        let (translated, _) = coherentize(&e, &p.theory.signature).map_err(|e| e.to_string())?;
        let mut preds = BTreeMap::new();
        fof_preds(&e.body, &mut preds);
        for size in 1..=2usize {
            let slots: Vec<(String, Vec<usize>)> = preds
                .iter()
                .flat_map(|(pred, &arity)| {
                    (0..size.pow(arity as u32)).map(move |mut k| {
                        let mut args = vec![0; arity];
                        for a in args.iter_mut() {
                            *a = k % size;
                            k /= size;
                        }
                        (pred.clone(), args)
                    })
                })
                .collect();
            let exhaustive = slots.len() <= 14;
            let rounds = if exhaustive { 1u64 << slots.len() } else { 3000 };
            for round in 0..rounds {
                let mut m = Structure {
                    size,
                    constants: Default::default(),
                    facts: BTreeMap::new(),
                };
                for (i, (pred, args)) in slots.iter().enumerate() {
                    let on = if exhaustive { round >> i & 1 == 1 } else { rng.gen() };
                    if on {
                        m.facts.entry(pred.clone()).or_default().push(args.clone());
                    }
                }
                let want = eval(&e.body, &m, &mut Vec::new());
                let got = translated.iter().all(|f| holds(&p.theory, &m, f));
                if want != got {
                    return Err(format!("{} disagrees on {m:?}", e.name));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

//! Finite structures for coherent theories, and a brute-force countermodel
//! search used as an oracle against the prover.
//!
//! `eq` is identity and every complement predicate is the negation of its
//! partner, so only the positive predicates are enumerated.

use std::collections::BTreeMap;

use indexmap::IndexMap;

use crate::formula::{Atom, CoherentFormula, Term, Theory, EQ, NEQ};

/// A finite interpretation. `facts` lists the positive atoms that hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    pub size: usize,
    pub constants: IndexMap<String, usize>,
    pub facts: BTreeMap<String, Vec<Vec<usize>>>,
}

type Tv = Option<bool>;

fn and(a: Tv, b: Tv) -> Tv {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

fn or(a: Tv, b: Tv) -> Tv {
    match (a, b) {
        (Some(true), _) | (_, Some(true)) => Some(true),
        (Some(false), Some(false)) => Some(false),
        _ => None,
    }
}

struct Space<'a> {
    theory: &'a Theory,
    size: usize,
    /// Positive predicate → (arity, offset into the assignment vector).
    preds: IndexMap<String, (usize, usize)>,
    consts: IndexMap<String, usize>,
    assign: Vec<Tv>,
}

impl Space<'_> {
    fn base<'p>(&'p self, pred: &'p str) -> (&'p str, bool) {
        let sig = &self.theory.signature;
        if sig.is_complement_name(pred) {
            (sig.complement(pred).unwrap_or(pred), false)
        } else {
            (pred, true)
        }
    }

    fn elem(&self, t: &Term, env: &[(&str, usize)]) -> usize {
        match t {
            Term::Const(c) => self.consts[c.as_str()],
            Term::Var(v) => {
                env.iter()
                    .rev()
                    .find(|(n, _)| n == v)
                    .expect("bound variable")
                    .1
            }
        }
    }

    fn slot(&self, pred: &str, args: &[usize]) -> usize {
        let (_, off) = self.preds[pred];
        args.iter().fold(0, |acc, &a| acc * self.size + a) + off
    }

    fn atom(&self, a: &Atom, env: &[(&str, usize)]) -> Tv {
        let args: Vec<usize> = a.args.iter().map(|t| self.elem(t, env)).collect();
        match a.pred.as_str() {
            EQ => Some(args[0] == args[1]),
            NEQ => Some(args[0] != args[1]),
            p => {
                let (base, positive) = self.base(p);
                self.assign[self.slot(base, &args)].map(|v| v == positive)
            }
        }
    }

    fn conj(&self, atoms: &[Atom], env: &[(&str, usize)]) -> Tv {
        atoms.iter().fold(Some(true), |acc, a| and(acc, self.atom(a, env)))
    }

    /// Some disjunct holds for some choice of the existentials.
    fn conclusion<'f>(&self, f: &CoherentFormula, env: &mut Vec<(&'f str, usize)>, vars: &[&'f str]) -> Tv {
        let Some((&v, rest)) = vars.split_first() else {
            return f
                .disjuncts
                .iter()
                .fold(Some(false), |acc, d| or(acc, self.conj(&d.0, env)));
        };
        let mut acc = Some(false);
        for e in 0..self.size {
            env.push((v, e));
            acc = or(acc, self.conclusion(f, env, rest));
            env.pop();
            if acc == Some(true) {
                break;
            }
        }
        acc
    }

    fn formula(&self, f: &CoherentFormula) -> Tv {
        let univ = names(&f.universals);
        let ex = names(&f.existentials);
        let mut acc = Some(true);
        for_each_env(self.size, &univ, &mut |env: &[(&str, usize)]| {
            let prem = self.conj(&f.premises, env);
            if prem == Some(false) {
                return true;
            }
            let mut env = env.to_vec();
            let v = or(prem.map(|p| !p), self.conclusion(f, &mut env, &ex));
            acc = and(acc, v);
            acc != Some(false)
        });
        acc
    }

    /// The conjecture fails at the universals' constants.
    fn refutes<'f>(&self, c: &'f CoherentFormula, at: &[(&'f str, usize)]) -> Tv {
        let ex = names(&c.existentials);
        let mut env = at.to_vec();
        let prem = self.conj(&c.premises, &env);
        and(prem, self.conclusion(c, &mut env, &ex).map(|v| !v))
    }

    fn violated<'f>(&self, c: &'f CoherentFormula, at: &[(&'f str, usize)]) -> bool {
        self.refutes(c, at) == Some(false)
            || self
                .theory
                .axioms
                .iter()
                .any(|ax| self.formula(ax) == Some(false))
    }

    fn dfs<'f>(&mut self, i: usize, c: &'f CoherentFormula, at: &[(&'f str, usize)]) -> bool {
        if self.violated(c, at) {
            return false;
        }
        if i == self.assign.len() {
            return true;
        }
        for v in [false, true] {
            self.assign[i] = Some(v);
            if self.dfs(i + 1, c, at) {
                return true;
            }
        }
        self.assign[i] = None;
        false
    }

    fn structure(&self) -> Structure {
        let mut facts: BTreeMap<String, Vec<Vec<usize>>> = BTreeMap::new();
        for (p, &(arity, off)) in &self.preds {
            let count = self.size.pow(arity as u32);
            for k in 0..count {
                if self.assign[off + k] == Some(true) {
                    let mut args = vec![0; arity];
                    let mut r = k;
                    for a in args.iter_mut().rev() {
                        *a = r % self.size;
                        r /= self.size;
                    }
                    facts.entry(p.clone()).or_default().push(args);
                }
            }
        }
        Structure {
            size: self.size,
            constants: self.consts.clone(),
            facts,
        }
    }
}

fn names(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn for_each_env<'f>(size: usize, vars: &[&'f str], f: &mut dyn FnMut(&[(&'f str, usize)]) -> bool) {
    let mut env: Vec<(&'f str, usize)> = vars.iter().map(|&v| (v, 0)).collect();
    if size == 0 {
        return;
    }
    loop {
        if !f(&env) {
            return;
        }
        let mut k = env.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            env[k].1 += 1;
            if env[k].1 < size {
                break;
            }
            env[k].1 = 0;
        }
    }
}

/// Calls `f` with each assignment of `n` names to `0..size`, up to renaming
/// of domain elements.
fn for_each_canonical(n: usize, size: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn go(cur: &mut Vec<usize>, n: usize, size: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == n {
            return f(cur);
        }
        let top = cur.iter().map(|&x| x + 1).max().unwrap_or(0).min(size - 1);
        for e in 0..=top {
            cur.push(e);
            let stop = go(cur, n, size, f);
            cur.pop();
            if stop {
                return true;
            }
        }
        false
    }
    go(&mut Vec::new(), n, size, f)
}

/// Whether `f` is true in `m`. Panics if `m` lacks a constant of `f`.
pub fn holds(t: &Theory, m: &Structure, f: &CoherentFormula) -> bool {
    let mut s = space(t, m.size, m.constants.clone());
    for (p, tuples) in &m.facts {
        for args in tuples {
            let i = s.slot(p, args);
            s.assign[i] = Some(true);
        }
    }
    for v in s.assign.iter_mut() {
        v.get_or_insert(false);
    }
    s.formula(f) == Some(true)
}

fn space(t: &Theory, size: usize, consts: IndexMap<String, usize>) -> Space<'_> {
    let mut preds = IndexMap::new();
    let mut off = 0;
    for (p, arity) in t.signature.predicates() {
        if p == EQ || p == NEQ || t.signature.is_complement_name(p) {
            continue;
        }
        preds.insert(p.to_string(), (arity, off));
        off += size.pow(arity as u32);
    }
    Space {
        theory: t,
        size,
        preds,
        consts,
        assign: vec![None; off],
    }
}

/// A structure of at most `max_size` elements satisfying every axiom of `t`
/// but not `c`, if one exists.
pub fn find_countermodel(t: &Theory, c: &CoherentFormula, max_size: usize) -> Option<Structure> {
    let mut known: Vec<String> = t.constants().into_iter().collect();
    for a in c.atoms() {
        for k in a.consts() {
            if !known.iter().any(|n| n == k) {
                known.push(k.to_string());
            }
        }
    }
    let univ = names(&c.universals);
    for size in 1..=max_size {
        let mut found = None;
        for_each_canonical(known.len() + univ.len(), size, &mut |elems| {
            let consts: IndexMap<String, usize> = known.iter().cloned().zip(elems.iter().copied()).collect();
            let at: Vec<(&str, usize)> = univ.iter().copied().zip(elems[known.len()..].iter().copied()).collect();
            let mut s = space(t, size, consts);
            if s.dfs(0, c, &at) {
                let mut m = s.structure();
                for (v, e) in &at {
                    m.constants.insert(format!("?{v}"), *e);
                }
                found = Some(m);
                return true;
            }
            false
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tptp::{load_problem, SupportAxiomOptions};

    fn problem(src: &str) -> crate::tptp::Problem {
        load_problem(src, &SupportAxiomOptions::default()).unwrap()
    }

    #[test]
    fn unsupported_fact_has_countermodel() {
        let p = problem("fof(a,axiom,(! [X] : (q(X) => q(X)))). fof(c,conjecture,p(a)).");
        let m = find_countermodel(&p.theory, &p.conjectures[0], 2).unwrap();
        assert_eq!(m.size, 1);
        assert!(!holds(&p.theory, &m, &p.conjectures[0]));
    }

    #[test]
    fn example_one_is_valid() {
        let p = problem(
            "fof(ax1,axiom,(! [X] : (p(X) => (r(X) | q(X))))).
             fof(ax2,axiom,(! [X] : (q(X) => $false))).
             fof(c,conjecture,(! [X] : (p(X) => r(X)))).",
        );
        assert_eq!(find_countermodel(&p.theory, &p.conjectures[0], 3), None);
    }

    #[test]
    fn complements_are_negations() {
        let p = problem("fof(c,conjecture,(! [X] : (~ p(X) => p(X)))).");
        let m = find_countermodel(&p.theory, &p.conjectures[0], 1).unwrap();
        assert!(!m.facts.contains_key("p"));
    }

    #[test]
    fn existence_needs_two_elements() {
        let p = problem("fof(c,conjecture,(? [A,B] : (A != B))).");
        let m = find_countermodel(&p.theory, &p.conjectures[0], 3).unwrap();
        assert_eq!(m.size, 1);
    }
}

use std::time::Instant;

use indexmap::IndexSet;
use rustc_hash::FxHashMap as HashMap;
use smallvec::SmallVec;

use crate::formula::{Atom, CoherentFormula, Conjunction, Substitution, Term, Theory};

use super::{
    skolemize_avoiding, Case, FactBase, Goal, Intro, Proof, ProofStats, ProofStep, SearchLimits,
    Unprovable,
};

type Sym = u32;
type Args = SmallVec<[Sym; 4]>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct GAtom {
    pred: u16,
    args: Args,
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Var(u8),
    Const(Sym),
}

#[derive(Debug, Clone)]
struct PAtom {
    pred: u16,
    args: SmallVec<[Slot; 4]>,
}

#[derive(Debug)]
struct Rule {
    axiom: usize,
    n_universals: usize,
    n_vars: usize,
    premises: Vec<PAtom>,
    disjuncts: Vec<Vec<PAtom>>,
    /// Universals not fixed by any premise; enumerated over all constants.
    open: Vec<u8>,
    branching: bool,
}

#[derive(Debug, Clone)]
struct RawStep {
    rule: usize,
    binding: Vec<Sym>,
    witness_names: Vec<String>,
    premises: Vec<GAtom>,
    concl: Vec<Vec<GAtom>>,
    produced: Vec<GAtom>,
}

impl RawStep {
    fn is_bottom(&self) -> bool {
        self.concl.is_empty()
    }
}

#[derive(Debug, Clone)]
enum RawNode {
    Step(RawStep),
    Split {
        step: RawStep,
        cases: Vec<(Vec<GAtom>, Vec<RawNode>)>,
    },
    QedAs {
        disjunct: usize,
        binding: Vec<Sym>,
    },
    QedContra,
}

#[derive(Debug, Clone, Copy)]
struct Mark {
    facts: usize,
    consts: usize,
    log: usize,
    bottom: bool,
    open_eval: usize,
}

enum Stop {
    Timeout,
}

/// Interned fact base with an undo trail.
#[derive(Default)]
struct Facts {
    atoms: Vec<GAtom>,
    set: HashMap<GAtom, u32>,
    by_pred: Vec<Vec<u32>>,
    by_arg: HashMap<(u16, u8, Sym), Vec<u32>>,
}

impl Facts {
    fn contains(&self, a: &GAtom) -> bool {
        self.set.contains_key(a)
    }

    fn insert(&mut self, a: GAtom) -> bool {
        if self.set.contains_key(&a) {
            return false;
        }
        let ix = self.atoms.len() as u32;
        let p = a.pred as usize;
        if self.by_pred.len() <= p {
            self.by_pred.resize_with(p + 1, Vec::new);
        }
        self.by_pred[p].push(ix);
        for (i, &s) in a.args.iter().enumerate() {
            self.by_arg.entry((a.pred, i as u8, s)).or_default().push(ix);
        }
        self.set.insert(a.clone(), ix);
        self.atoms.push(a);
        true
    }

    fn truncate(&mut self, len: usize) {
        while self.atoms.len() > len {
            let a = self.atoms.pop().expect("non-empty");
            self.set.remove(&a);
            self.by_pred[a.pred as usize].pop();
            for (i, &s) in a.args.iter().enumerate() {
                if let Some(v) = self.by_arg.get_mut(&(a.pred, i as u8, s)) {
                    v.pop();
                }
            }
        }
    }

    fn candidates(&self, p: &PAtom, b: &[Option<Sym>]) -> &[u32] {
        for (i, slot) in p.args.iter().enumerate() {
            let fixed = match *slot {
                Slot::Const(c) => Some(c),
                Slot::Var(v) => b[v as usize],
            };
            if let Some(s) = fixed {
                return self
                    .by_arg
                    .get(&(p.pred, i as u8, s))
                    .map(Vec::as_slice)
                    .unwrap_or(&[]);
            }
        }
        self.by_pred
            .get(p.pred as usize)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

/// Binds `p` against `g`; pushes newly bound variables onto `bound`.
fn unify(p: &PAtom, g: &GAtom, b: &mut [Option<Sym>], bound: &mut SmallVec<[u8; 8]>) -> bool {
    if p.pred != g.pred {
        return false;
    }
    let start = bound.len();
    for (slot, &s) in p.args.iter().zip(g.args.iter()) {
        let ok = match *slot {
            Slot::Const(c) => c == s,
            Slot::Var(v) => match b[v as usize] {
                Some(x) => x == s,
                None => {
                    b[v as usize] = Some(s);
                    bound.push(v);
                    true
                }
            },
        };
        if !ok {
            for &v in &bound[start..] {
                b[v as usize] = None;
            }
            bound.truncate(start);
            return false;
        }
    }
    true
}

fn ground(p: &PAtom, b: &[Option<Sym>]) -> GAtom {
    GAtom {
        pred: p.pred,
        args: p
            .args
            .iter()
            .map(|s| match *s {
                Slot::Const(c) => c,
                Slot::Var(v) => b[v as usize].expect("bound variable"),
            })
            .collect(),
    }
}

struct Engine<'t> {
    theory: &'t Theory,
    preds: Vec<String>,
    pred_ix: HashMap<String, u16>,
    rules: Vec<Rule>,
    triggers: Vec<Vec<(usize, usize)>>,
    open_horn: Vec<usize>,
    branching: Vec<usize>,
    names: Vec<String>,
    name_ix: HashMap<String, Sym>,
    facts: Facts,
    log: Vec<RawStep>,
    bottom: bool,
    open_eval: usize,
    cursor: usize,
    goal: Vec<Vec<PAtom>>,
    goal_vars: usize,
    limits: SearchLimits,
    started: Instant,
    ticks: u64,
    scratch: Vec<Sym>,
}

impl<'t> Engine<'t> {
    fn new(theory: &'t Theory, limits: SearchLimits) -> Self {
        let mut e = Engine {
            theory,
            preds: Vec::new(),
            pred_ix: HashMap::default(),
            rules: Vec::new(),
            triggers: Vec::new(),
            open_horn: Vec::new(),
            branching: Vec::new(),
            names: Vec::new(),
            name_ix: HashMap::default(),
            facts: Facts::default(),
            log: Vec::new(),
            bottom: false,
            open_eval: 0,
            cursor: 0,
            goal: Vec::new(),
            goal_vars: 0,
            limits,
            started: Instant::now(),
            ticks: 0,
            scratch: Vec::new(),
        };
        for c in theory.constants() {
            e.constant(&c);
        }
        let mut em = Vec::new();
        for (i, ax) in theory.axioms.iter().enumerate() {
            let r = e.compile_rule(i, ax);
            let ix = e.rules.len();
            if r.branching {
                if ax.name.ends_with("_excluded_middle") {
                    em.push(ix);
                } else {
                    e.branching.push(ix);
                }
            } else {
                if !r.open.is_empty() || r.premises.is_empty() {
                    e.open_horn.push(ix);
                }
                for (j, p) in r.premises.iter().enumerate() {
                    let pi = p.pred as usize;
                    if e.triggers.len() <= pi {
                        e.triggers.resize_with(pi + 1, Vec::new);
                    }
                    e.triggers[pi].push((ix, j));
                }
            }
            e.rules.push(r);
        }
        e.branching.extend(em);
        e
    }

    fn pred(&mut self, name: &str) -> u16 {
        if let Some(&p) = self.pred_ix.get(name) {
            return p;
        }
        let p = self.preds.len() as u16;
        self.preds.push(name.to_string());
        self.pred_ix.insert(name.to_string(), p);
        p
    }

    fn constant(&mut self, name: &str) -> Sym {
        if let Some(&s) = self.name_ix.get(name) {
            return s;
        }
        let s = self.names.len() as Sym;
        self.names.push(name.to_string());
        self.name_ix.insert(name.to_string(), s);
        s
    }

    fn patom(&mut self, a: &Atom, vars: &[String]) -> PAtom {
        let pred = self.pred(&a.pred);
        let args = a
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => Slot::Var(
                    vars.iter()
                        .position(|x| x == v)
                        .expect("validated formula") as u8,
                ),
                Term::Const(c) => Slot::Const(self.constant(c)),
            })
            .collect();
        PAtom { pred, args }
    }

    fn compile_rule(&mut self, axiom: usize, ax: &CoherentFormula) -> Rule {
        let mut vars = ax.universals.clone();
        vars.extend(ax.existentials.iter().cloned());
        let premises: Vec<PAtom> = ax.premises.iter().map(|a| self.patom(a, &vars)).collect();
        let disjuncts = ax
            .disjuncts
            .iter()
            .map(|d| d.0.iter().map(|a| self.patom(a, &vars)).collect())
            .collect();
        let open = (0..ax.universals.len() as u8)
            .filter(|v| {
                !premises
                    .iter()
                    .any(|p| p.args.iter().any(|s| matches!(s, Slot::Var(x) if x == v)))
            })
            .collect();
        Rule {
            axiom,
            n_universals: ax.universals.len(),
            n_vars: vars.len(),
            premises,
            disjuncts,
            open,
            branching: !ax.is_horn(),
        }
    }

    fn ground_atom(&mut self, a: &Atom) -> GAtom {
        let pred = self.pred(&a.pred);
        let args = a.args.iter().map(|t| self.constant(t.name())).collect();
        GAtom { pred, args }
    }

    fn atom_of(&self, g: &GAtom, names: &[String]) -> Atom {
        Atom::new(
            self.preds[g.pred as usize].clone(),
            g.args
                .iter()
                .map(|&s| Term::Const(names[s as usize].clone()))
                .collect(),
        )
    }

    fn mark(&self) -> Mark {
        Mark {
            facts: self.facts.atoms.len(),
            consts: self.names.len(),
            log: self.log.len(),
            bottom: self.bottom,
            open_eval: self.open_eval,
        }
    }

    fn rollback(&mut self, m: Mark) {
        self.facts.truncate(m.facts);
        for n in self.names.drain(m.consts..) {
            self.name_ix.remove(&n);
        }
        self.log.truncate(m.log);
        self.bottom = m.bottom;
        self.open_eval = m.open_eval;
        self.cursor = self.cursor.min(m.facts);
    }

    fn tick(&mut self) -> Result<(), Stop> {
        self.ticks += 1;
        if self.ticks.is_multiple_of(64) && self.started.elapsed() > self.limits.timeout {
            return Err(Stop::Timeout);
        }
        Ok(())
    }

    /// Enumerates full bindings of `atoms` (except `skip`), then of `open`.
    #[allow(clippy::too_many_arguments)]
    fn join(
        &self,
        atoms: &[PAtom],
        k: usize,
        skip: Option<usize>,
        open: &[u8],
        b: &mut [Option<Sym>],
        out: &mut dyn FnMut(&[Option<Sym>]) -> bool,
    ) -> bool {
        if k == atoms.len() {
            return self.enumerate_open(open, b, out);
        }
        if Some(k) == skip {
            return self.join(atoms, k + 1, skip, open, b, out);
        }
        let p = &atoms[k];
        let mut bound: SmallVec<[u8; 8]> = SmallVec::new();
        for &ix in self.facts.candidates(p, b) {
            let g = &self.facts.atoms[ix as usize];
            if unify(p, g, b, &mut bound) {
                let go_on = self.join(atoms, k + 1, skip, open, b, out);
                for &v in &bound {
                    b[v as usize] = None;
                }
                bound.clear();
                if !go_on {
                    return false;
                }
            }
        }
        true
    }

    fn enumerate_open(
        &self,
        open: &[u8],
        b: &mut [Option<Sym>],
        out: &mut dyn FnMut(&[Option<Sym>]) -> bool,
    ) -> bool {
        let Some((&v, rest)) = open.split_first() else {
            return out(b);
        };
        if b[v as usize].is_some() {
            return self.enumerate_open(rest, b, out);
        }
        for s in 0..self.names.len() as Sym {
            b[v as usize] = Some(s);
            let go_on = self.enumerate_open(rest, b, out);
            b[v as usize] = None;
            if !go_on {
                return false;
            }
        }
        true
    }

    fn rule_bindings(&self, r: usize, seed: Option<(usize, &GAtom)>) -> Vec<Vec<Sym>> {
        let nu = self.rules[r].n_universals;
        let mut flat = Vec::new();
        let n = self.rule_bindings_flat(r, seed, &mut flat);
        (0..n).map(|i| flat[i * nu..(i + 1) * nu].to_vec()).collect()
    }

    /// Appends each binding's universals to `out`; returns the count.
    fn rule_bindings_flat(&self, r: usize, seed: Option<(usize, &GAtom)>, out: &mut Vec<Sym>) -> usize {
        let rule = &self.rules[r];
        let mut b: SmallVec<[Option<Sym>; 16]> = smallvec::smallvec![None; rule.n_vars];
        let skip = match seed {
            Some((j, g)) => {
                let mut bound = SmallVec::new();
                if !unify(&rule.premises[j], g, &mut b, &mut bound) {
                    return 0;
                }
                Some(j)
            }
            None => None,
        };
        let mut count = 0;
        self.join(&rule.premises, 0, skip, &rule.open, &mut b, &mut |b| {
            out.extend(b[..rule.n_universals].iter().map(|s| s.expect("bound")));
            count += 1;
            true
        });
        count
    }

    fn instantiate(&self, r: usize, full: &[Sym]) -> (Vec<GAtom>, Vec<Vec<GAtom>>) {
        let rule = &self.rules[r];
        let b: Vec<Option<Sym>> = full.iter().map(|&s| Some(s)).collect();
        let prem = rule.premises.iter().map(|p| ground(p, &b)).collect();
        let concl = rule
            .disjuncts
            .iter()
            .map(|d| d.iter().map(|p| ground(p, &b)).collect())
            .collect();
        (prem, concl)
    }

    /// Fires a Horn instance if productive. Returns true on new facts or `⊥`.
    fn fire_horn(&mut self, r: usize, binding: &[Sym]) -> bool {
        let rule = &self.rules[r];
        let b: SmallVec<[Option<Sym>; 8]> = binding.iter().map(|&s| Some(s)).collect();
        let mut produced: Vec<GAtom> = Vec::new();
        if let Some(d) = rule.disjuncts.first() {
            for p in d {
                let g = ground(p, &b);
                if !self.facts.contains(&g) && !produced.contains(&g) {
                    produced.push(g);
                }
            }
            if produced.is_empty() {
                return false;
            }
        }
        let (premises, concl) = self.instantiate(r, binding);
        if concl.is_empty() {
            self.bottom = true;
        }
        for a in &produced {
            self.facts.insert(a.clone());
        }
        self.log.push(RawStep {
            rule: r,
            binding: binding.to_vec(),
            witness_names: Vec::new(),
            premises,
            concl,
            produced,
        });
        true
    }

    /// Semi-naive Horn closure of everything past `self.cursor`.
    fn saturate(&mut self) -> Result<(), Stop> {
        let mut buf = std::mem::take(&mut self.scratch);
        let r = self.saturate_with(&mut buf);
        self.scratch = buf;
        r
    }

    fn fire_all(&mut self, r: usize, buf: &[Sym], n: usize) -> bool {
        let nu = self.rules[r].n_universals;
        for i in 0..n {
            if self.fire_horn(r, &buf[i * nu..(i + 1) * nu]) && self.bottom {
                return true;
            }
        }
        false
    }

    fn saturate_with(&mut self, buf: &mut Vec<Sym>) -> Result<(), Stop> {
        while !self.bottom {
            if self.open_eval < self.names.len() {
                self.open_eval = self.names.len();
                for oi in 0..self.open_horn.len() {
                    let r = self.open_horn[oi];
                    buf.clear();
                    let n = self.rule_bindings_flat(r, None, buf);
                    if self.fire_all(r, buf, n) {
                        return Ok(());
                    }
                }
                continue;
            }
            if self.cursor >= self.facts.atoms.len() {
                break;
            }
            self.tick()?;
            let g = self.facts.atoms[self.cursor].clone();
            self.cursor += 1;
            let nt = self.triggers.get(g.pred as usize).map_or(0, Vec::len);
            for t in 0..nt {
                let (r, j) = self.triggers[g.pred as usize][t];
                buf.clear();
                let n = self.rule_bindings_flat(r, Some((j, &g)), buf);
                if self.fire_all(r, buf, n) {
                    return Ok(());
                }
            }
        }
        Ok(())
    }

    fn satisfied(&self, pats: &[PAtom], prefix: &[Sym], n_vars: usize) -> bool {
        let mut b: Vec<Option<Sym>> = vec![None; n_vars];
        for (i, &s) in prefix.iter().enumerate() {
            b[i] = Some(s);
        }
        let mut hit = false;
        self.join(pats, 0, None, &[], &mut b, &mut |_| {
            hit = true;
            false
        });
        hit
    }

    /// Instances of branching rules worth trying, in search order.
    fn candidates(&self) -> Vec<(usize, Vec<Sym>)> {
        let mut out = Vec::new();
        for &r in &self.branching {
            let rule = &self.rules[r];
            let n_ex = rule.n_vars - rule.n_universals;
            if n_ex > 0 && self.names.len() + n_ex > self.limits.max_constants {
                continue;
            }
            let mut bs = self.rule_bindings(r, None);
            bs.sort();
            bs.dedup();
            for b in bs {
                if !rule
                    .disjuncts
                    .iter()
                    .any(|d| self.satisfied(d, &b, rule.n_vars))
                {
                    out.push((r, b));
                }
            }
        }
        out
    }

    fn goal_match(&self) -> Option<(usize, Vec<Sym>)> {
        let all: Vec<u8> = (0..self.goal_vars as u8).collect();
        for (i, d) in self.goal.iter().enumerate() {
            let mut best: Option<Vec<Sym>> = None;
            let mut b = vec![None; self.goal_vars];
            self.join(d, 0, None, &all, &mut b, &mut |b| {
                let cand: Vec<Sym> = b.iter().map(|s| s.expect("bound")).collect();
                if best.as_ref().is_none_or(|x| cand < *x) {
                    best = Some(cand);
                }
                true
            });
            if let Some(b) = best {
                return Some((i, b));
            }
        }
        None
    }

    /// Branching rules none of whose candidates can close the branch in one
    /// step. For each disjunct, every candidate's copy is added at once with
    /// witnesses collapsed onto shared placeholders; a real instance maps
    /// homomorphically into that state, so if some disjunct fails to close
    /// there, it fails for every instance.
    fn hopeless_rules(&mut self, cands: &[(usize, Vec<Sym>)]) -> Result<Vec<usize>, Stop> {
        let mut rules: Vec<usize> = cands.iter().map(|(r, _)| *r).collect();
        rules.dedup();
        let mut out = Vec::new();
        for r in rules {
            let n_ex = self.rules[r].n_vars - self.rules[r].n_universals;
            for d in 0..self.rules[r].disjuncts.len() {
                let mark = self.mark();
                let stars: Vec<Sym> = (0..n_ex).map(|k| self.constant(&format!("#{k}"))).collect();
                for (_, b) in cands.iter().filter(|(r2, _)| *r2 == r) {
                    let mut full = b.clone();
                    full.extend(&stars);
                    let (_, mut concl) = self.instantiate(r, &full);
                    for a in concl.swap_remove(d) {
                        self.facts.insert(a);
                    }
                }
                self.saturate()?;
                let closes = self.bottom || self.goal_match().is_some();
                self.rollback(mark);
                if !closes {
                    out.push(r);
                    break;
                }
            }
        }
        Ok(out)
    }

    fn fresh_name(&self) -> String {
        let mut k = 0;
        loop {
            let n = if k == 0 { "w".to_string() } else { format!("w{k}") };
            if !self.name_ix.contains_key(&n) {
                return n;
            }
            k += 1;
        }
    }

    fn segment(&self, from: usize, to: usize) -> Vec<RawNode> {
        self.log[from..to].iter().cloned().map(RawNode::Step).collect()
    }

    /// `sleep` holds instances that failed at an ancestor with a larger
    /// budget; re-trying them below a linear step cannot succeed.
    fn search(
        &mut self,
        budget: usize,
        from: usize,
        sleep: &[(usize, Vec<Sym>)],
    ) -> Result<Option<Vec<RawNode>>, Stop> {
        self.tick()?;
        if self.bottom {
            let mut out = self.segment(from, self.log.len());
            out.push(RawNode::QedContra);
            return Ok(Some(out));
        }
        if let Some((disjunct, binding)) = self.goal_match() {
            let mut out = self.segment(from, self.log.len());
            out.push(RawNode::QedAs { disjunct, binding });
            return Ok(Some(out));
        }
        if budget == 0 {
            return Ok(None);
        }
        let mut asleep: Vec<(usize, Vec<Sym>)> = sleep.to_vec();
        let mut cands = self.candidates();
        cands.retain(|(r, b)| !asleep.iter().any(|(r2, b2)| r2 == r && b2 == b));
        if budget == 1 {
            let hopeless = self.hopeless_rules(&cands)?;
            cands.retain(|(r, _)| !hopeless.contains(r));
        }
        for (r, binding) in cands {
            let mark = self.mark();
            let n_ex = self.rules[r].n_vars - self.rules[r].n_universals;
            let mut full = binding.clone();
            let mut witness_names = Vec::new();
            for _ in 0..n_ex {
                let n = self.fresh_name();
                full.push(self.constant(&n));
                witness_names.push(n);
            }
            let (premises, concl) = self.instantiate(r, &full);
            let key = binding.clone();
            let step_pos = self.log.len();
            if concl.len() == 1 {
                let produced: Vec<GAtom> = concl[0]
                    .iter()
                    .filter(|a| !self.facts.contains(a))
                    .cloned()
                    .collect();
                for a in &produced {
                    self.facts.insert(a.clone());
                }
                self.log.push(RawStep {
                    rule: r,
                    binding,
                    witness_names,
                    premises,
                    concl,
                    produced,
                });
                self.saturate()?;
                if let Some(rest) = self.search(budget - 1, step_pos, &asleep)? {
                    let mut out = self.segment(from, step_pos);
                    out.extend(rest);
                    return Ok(Some(out));
                }
            } else {
                let step = RawStep {
                    rule: r,
                    binding,
                    witness_names,
                    premises,
                    concl: concl.clone(),
                    produced: Vec::new(),
                };
                self.log.push(step.clone());
                let mut cases = Vec::new();
                for d in concl {
                    let m2 = self.mark();
                    for a in &d {
                        self.facts.insert(a.clone());
                    }
                    self.saturate()?;
                    let res = self.search(budget - 1, m2.log, &[])?;
                    self.rollback(m2);
                    match res {
                        Some(nodes) => cases.push((d, nodes)),
                        None => break,
                    }
                }
                if cases.len() == step.concl.len() {
                    let mut out = self.segment(from, step_pos);
                    out.push(RawNode::Split { step, cases });
                    return Ok(Some(out));
                }
            }
            self.rollback(mark);
            asleep.push((r, key));
        }
        Ok(None)
    }
}

/// Backward relevance pruning: drops Horn steps whose products are unused.
fn prune(nodes: Vec<RawNode>, rules: &[Rule], goal: &[Vec<PAtom>]) -> (Vec<RawNode>, Vec<GAtom>) {
    let mut needed: Vec<GAtom> = Vec::new();
    let mut need_bottom = false;
    let mut kept = Vec::new();
    let need = |needed: &mut Vec<GAtom>, xs: &[GAtom]| {
        for a in xs {
            if !needed.contains(a) {
                needed.push(a.clone());
            }
        }
    };
    for node in nodes.into_iter().rev() {
        match node {
            RawNode::Step(s) => {
                let keep = if s.is_bottom() {
                    need_bottom
                } else {
                    rules[s.rule].branching || s.produced.iter().any(|a| needed.contains(a))
                };
                if keep {
                    if s.is_bottom() {
                        need_bottom = false;
                    }
                    needed.retain(|a| !s.produced.contains(a));
                    need(&mut needed, &s.premises);
                    kept.push(RawNode::Step(s));
                }
            }
            RawNode::Split { step, cases } => {
                let mut pruned = Vec::new();
                for (facts, sub) in cases {
                    let (sub, mut req) = prune(sub, rules, goal);
                    req.retain(|a| !facts.contains(a));
                    need(&mut needed, &req);
                    pruned.push((facts, sub));
                }
                need(&mut needed, &step.premises);
                kept.push(RawNode::Split {
                    step,
                    cases: pruned,
                });
            }
            RawNode::QedContra => {
                need_bottom = true;
                kept.push(node);
            }
            RawNode::QedAs {
                disjunct,
                ref binding,
            } => {
                let b: Vec<Option<Sym>> = binding.iter().map(|&s| Some(s)).collect();
                let atoms: Vec<GAtom> = goal[disjunct].iter().map(|p| ground(p, &b)).collect();
                need(&mut needed, &atoms);
                kept.push(node);
            }
        }
    }
    kept.reverse();
    (kept, needed)
}

struct Emit<'a, 'e> {
    engine: &'a Engine<'e>,
    goal: &'a Goal,
}

impl Emit<'_, '_> {
    fn mp(&self, s: &RawStep, names: &mut Vec<String>) -> ProofStep {
        let rule = &self.engine.rules[s.rule];
        let ax = &self.engine.theory.axioms[rule.axiom];
        let mut inst = Substitution::new();
        for (v, &c) in ax.universals.iter().zip(&s.binding) {
            inst.bind(v.clone(), names[c as usize].clone());
        }
        names.extend(s.witness_names.iter().cloned());
        let concluded = s
            .concl
            .iter()
            .map(|d| Conjunction(d.iter().map(|g| self.engine.atom_of(g, names)).collect()))
            .collect();
        ProofStep::Mp {
            axiom: ax.name.clone(),
            instantiation: inst,
            witnesses: s.witness_names.clone(),
            concluded,
        }
    }

    fn steps(&self, nodes: &[RawNode], names: &mut Vec<String>) -> Vec<ProofStep> {
        let mut out = Vec::new();
        for node in nodes {
            match node {
                RawNode::Step(s) => out.push(self.mp(s, names)),
                RawNode::Split { step, cases } => {
                    let from_step = out.len();
                    out.push(self.mp(step, names));
                    let cases = cases
                        .iter()
                        .map(|(facts, sub)| {
                            let mut scoped = names.clone();
                            Case {
                                facts: Conjunction(
                                    facts.iter().map(|g| self.engine.atom_of(g, names)).collect(),
                                ),
                                steps: self.steps(sub, &mut scoped),
                            }
                        })
                        .collect();
                    out.push(ProofStep::CaseSplit { from_step, cases });
                    out.push(ProofStep::QedCaseSplit);
                }
                RawNode::QedAs { disjunct, binding } => {
                    let mut inst = Substitution::new();
                    for (v, &c) in self.goal.existentials.iter().zip(binding) {
                        inst.bind(v.clone(), names[c as usize].clone());
                    }
                    out.push(ProofStep::QedAssumption {
                        disjunct: *disjunct,
                        instantiation: inst,
                    });
                }
                RawNode::QedContra => out.push(ProofStep::QedContradiction),
            }
        }
        out
    }
}

fn setup<'t>(t: &'t Theory, c: &CoherentFormula, lim: &SearchLimits) -> (Engine<'t>, Intro, Goal) {
    let mut e = Engine::new(t, *lim);
    for a in c.atoms() {
        for k in a.consts() {
            e.constant(k);
        }
    }
    let taken: IndexSet<String> = e.names.iter().cloned().collect();
    let (intro, goal) = skolemize_avoiding(c, &taken);
    for k in &intro.constants {
        e.constant(k);
    }
    for a in &intro.assumed {
        let g = e.ground_atom(a);
        e.facts.insert(g);
    }
    e.goal_vars = goal.existentials.len();
    e.goal = goal
        .disjuncts
        .iter()
        .map(|d| d.0.iter().map(|a| e.patom(a, &goal.existentials)).collect())
        .collect();
    (e, intro, goal)
}

pub(super) fn search(
    t: &Theory,
    c: &CoherentFormula,
    lim: &SearchLimits,
) -> Result<Proof, Unprovable> {
    let (mut e, intro, goal) = setup(t, c, lim);
    let timeout = |_: Stop| Unprovable::Timeout;
    e.saturate().map_err(timeout)?;
    let root = e.mark();
    let root_cursor = e.cursor;
    for level in 0..=lim.max_mp_steps {
        let found = e.search(level, 0, &[]).map_err(timeout)?;
        if let Some(nodes) = found {
            let (nodes, _) = prune(nodes, &e.rules, &e.goal);
            let emit = Emit {
                engine: &e,
                goal: &goal,
            };
            let mut names = e.names[..root.consts].to_vec();
            let body = emit.steps(&nodes, &mut names);
            let mut proof = Proof {
                conjecture: c.name.clone(),
                intro,
                goal,
                body,
                stats: ProofStats {
                    deepening_level: level,
                    ..Default::default()
                },
            };
            proof.recount();
            return Ok(proof);
        }
        e.rollback(root);
        e.cursor = root_cursor;
    }
    Err(Unprovable::LimitExhausted)
}

pub(super) fn instances_of(fb: &FactBase, ax: &CoherentFormula) -> Vec<Substitution> {
    let theory = Theory {
        signature: Default::default(),
        axioms: Vec::new(),
        support: Default::default(),
    };
    let mut e = Engine::new(&theory, SearchLimits::default());
    for k in &fb.constants {
        e.constant(k);
    }
    for a in &fb.facts {
        let g = e.ground_atom(a);
        e.facts.insert(g);
    }
    let rule = e.compile_rule(0, ax);
    e.rules.push(rule);
    let rule = &e.rules[0];
    let mut bs = e.rule_bindings(0, None);
    bs.sort();
    bs.dedup();
    bs.into_iter()
        .filter(|b| {
            let full: Vec<Option<Sym>> = b.iter().map(|&s| Some(s)).collect();
            if !ax.existentials.is_empty() || rule.disjuncts.is_empty() {
                return true;
            }
            rule.disjuncts
                .iter()
                .any(|d| d.iter().any(|p| !e.facts.contains(&ground(p, &full))))
        })
        .map(|b| {
            let mut s = Substitution::new();
            for (v, &c) in ax.universals.iter().zip(&b) {
                s.bind(v.clone(), e.names[c as usize].clone());
            }
            s
        })
        .collect()
}

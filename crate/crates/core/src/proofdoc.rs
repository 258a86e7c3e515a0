//! Numbered, human-readable proof text.

use std::collections::HashMap;
use std::fmt::Write as _;

use indexmap::IndexSet;

use crate::formula::{Atom, CoherentFormula, Conjunction, Substitution, Theory, EQ, NEQ};
use crate::prover::{Case, Proof, ProofStep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    /// ASCII connectives: `=>`, `/\`, `\/`, `_|_`.
    #[default]
    Plain,
    /// LaTeX macros for the connectives; layout is unchanged.
    Latex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    pub hide_simple_axioms: bool,
    pub format: Format,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            hide_simple_axioms: true,
            format: Format::Plain,
        }
    }
}

/// One premise atom, no existentials, a single conjunctive conclusion.
pub fn is_simple_axiom(ax: &CoherentFormula) -> bool {
    ax.premises.len() == 1 && ax.existentials.is_empty() && ax.disjuncts.len() == 1
}

fn hidden(t: &Theory, name: &str) -> bool {
    name == "eq_reflexive" || t.axiom(name).is_some_and(is_simple_axiom)
}

/// Axioms applied by MP steps, in first-use order.
pub fn used_axioms(p: &Proof, t: &Theory, include_simple: bool) -> IndexSet<String> {
    fn walk(steps: &[ProofStep], t: &Theory, inc: bool, out: &mut IndexSet<String>) {
        for s in steps {
            match s {
                ProofStep::Mp { axiom, .. } => {
                    let skip = !inc
                        && (t.is_support(axiom) || t.axiom(axiom).is_some_and(is_simple_axiom));
                    if !skip {
                        out.insert(axiom.clone());
                    }
                }
                ProofStep::CaseSplit { cases, .. } => {
                    for c in cases {
                        walk(&c.steps, t, inc, out);
                    }
                }
                _ => {}
            }
        }
    }
    let mut out = IndexSet::new();
    walk(&p.body, t, include_simple, &mut out);
    out
}

struct Sym {
    and: &'static str,
    or: &'static str,
    bottom: &'static str,
    neq: &'static str,
    maps: &'static str,
    exists: &'static str,
}

const PLAIN: Sym = Sym {
    and: " /\\ ",
    or: " \\/ ",
    bottom: "_|_",
    neq: " != ",
    maps: " -> ",
    exists: "exists",
};

const LATEX: Sym = Sym {
    and: " \\wedge ",
    or: " \\vee ",
    bottom: "\\perp",
    neq: " \\neq ",
    maps: " \\mapsto ",
    exists: "\\exists",
};

#[derive(Clone)]
enum Origin {
    Cited(String),
    Hidden(Vec<Atom>),
}

struct Renderer<'a> {
    t: &'a Theory,
    opts: RenderOptions,
    sym: &'static Sym,
    out: String,
    line: usize,
}

impl Renderer<'_> {
    fn atom(&self, a: &Atom) -> String {
        let args: Vec<&str> = a.args.iter().map(|t| t.name()).collect();
        match a.pred.as_str() {
            EQ if args.len() == 2 => format!("{} = {}", args[0], args[1]),
            NEQ if args.len() == 2 => format!("{}{}{}", args[0], self.sym.neq, args[1]),
            p if args.is_empty() => p.to_string(),
            p => format!("{p}({})", args.join(", ")),
        }
    }

    fn conj(&self, c: &Conjunction) -> String {
        if c.0.is_empty() {
            return "true".into();
        }
        let parts: Vec<String> = c.0.iter().map(|a| self.atom(a)).collect();
        parts.join(self.sym.and)
    }

    fn disj(&self, ds: &[Conjunction]) -> String {
        if ds.is_empty() {
            return self.sym.bottom.into();
        }
        let parts: Vec<String> = ds.iter().map(|d| self.conj(d)).collect();
        parts.join(self.sym.or)
    }

    fn inst(&self, s: &Substitution) -> String {
        let parts: Vec<String> = s
            .iter()
            .map(|(v, c)| format!("{v}{}{c}", self.sym.maps))
            .collect();
        parts.join(", ")
    }

    fn emit(&mut self, depth: usize, text: &str) {
        self.line += 1;
        let _ = writeln!(self.out, "{}{}. {}", "  ".repeat(depth), self.line, text);
    }

    fn resolve(&self, a: &Atom, origins: &HashMap<Atom, Origin>, seen: &mut Vec<Atom>, out: &mut Vec<String>) {
        if seen.contains(a) {
            return;
        }
        seen.push(a.clone());
        match origins.get(a) {
            Some(Origin::Cited(s)) => {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
            Some(Origin::Hidden(prem)) => {
                for p in prem {
                    self.resolve(p, origins, seen, out);
                }
            }
            None => {
                let s = self.atom(a);
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
    }

    fn sources(&self, premises: &[Atom], origins: &HashMap<Atom, Origin>) -> Vec<String> {
        let mut all = Vec::new();
        for p in premises {
            let mut one = Vec::new();
            self.resolve(p, origins, &mut Vec::new(), &mut one);
            all.extend(one);
        }
        all
    }

    fn steps(&mut self, steps: &[ProofStep], depth: usize, origins: &mut HashMap<Atom, Origin>) {
        for step in steps {
            match step {
                ProofStep::Mp {
                    axiom,
                    instantiation,
                    witnesses,
                    concluded,
                } => {
                    let premises: Vec<Atom> = self
                        .t
                        .axiom(axiom)
                        .map(|ax| ax.premises.iter().filter_map(|a| a.apply(instantiation).ok()).collect())
                        .unwrap_or_default();
                    let hide = self.opts.hide_simple_axioms && concluded.len() == 1 && hidden(self.t, axiom);
                    if hide {
                        for a in &concluded[0].0 {
                            origins
                                .entry(a.clone())
                                .or_insert_with(|| Origin::Hidden(premises.clone()));
                        }
                        continue;
                    }
                    let body = self.disj(concluded);
                    let head = if witnesses.is_empty() {
                        body.clone()
                    } else {
                        format!("Let {} be such that {body}", witnesses.join(", "))
                    };
                    let srcs = self.sources(&premises, origins);
                    let mut why = String::from("(by MP, ");
                    if !srcs.is_empty() {
                        let _ = write!(why, "from {} ", srcs.join(", "));
                    }
                    let _ = write!(why, "using axiom {axiom}");
                    if !instantiation.is_empty() {
                        let _ = write!(why, "; instantiation: {}", self.inst(instantiation));
                    }
                    why.push(')');
                    self.emit(depth, &format!("{head} {why}"));
                    if concluded.len() == 1 {
                        let text = self.conj(&concluded[0]);
                        for a in &concluded[0].0 {
                            origins.entry(a.clone()).or_insert_with(|| Origin::Cited(text.clone()));
                        }
                    }
                }
                ProofStep::CaseSplit { cases, .. } => {
                    for Case { facts, steps } in cases {
                        let text = self.conj(facts);
                        self.emit(depth, &format!("Case {text}:"));
                        let mut scoped = origins.clone();
                        for a in &facts.0 {
                            scoped.entry(a.clone()).or_insert_with(|| Origin::Cited(text.clone()));
                        }
                        self.steps(steps, depth + 1, &mut scoped);
                    }
                }
                ProofStep::QedAssumption { .. } => self.emit(depth, "Proved by assumption! (by QEDas)"),
                ProofStep::QedContradiction => self.emit(depth, "Contradiction! (by QEDefq)"),
                ProofStep::QedCaseSplit => {
                    let facts: Vec<String> = match steps.iter().rev().find_map(|s| match s {
                        ProofStep::CaseSplit { cases, .. } => Some(cases),
                        _ => None,
                    }) {
                        Some(cases) => cases.iter().map(|c| self.conj(&c.facts)).collect(),
                        None => Vec::new(),
                    };
                    self.emit(
                        depth,
                        &format!("Proved by case split! (by QEDcs, by {})", facts.join(", ")),
                    );
                }
            }
        }
    }
}

/// Numbered proof text. Under `hide_simple_axioms`, steps by
/// simple axioms and reflexivity are omitted and later citations point at
/// the facts they were derived from.
pub fn render_text(p: &Proof, t: &Theory, opts: &RenderOptions) -> String {
    let sym = match opts.format {
        Format::Plain => &PLAIN,
        Format::Latex => &LATEX,
    };
    let mut r = Renderer {
        t,
        opts: *opts,
        sym,
        out: String::new(),
        line: 0,
    };
    let mut origins = HashMap::new();
    let facts: Vec<String> = p.intro.assumed.iter().map(|a| r.atom(a)).collect();
    for (a, s) in p.intro.assumed.iter().zip(&facts) {
        origins.insert(a.clone(), Origin::Cited(s.clone()));
    }
    let mut goal = r.disj(&p.goal.disjuncts);
    if !p.goal.existentials.is_empty() {
        goal = format!("{} {}: {goal}", sym.exists, p.goal.existentials.join(", "));
    }
    let mut header = String::new();
    if !p.intro.constants.is_empty() {
        let _ = write!(header, "Consider arbitrary {}", p.intro.constants.join(", "));
        if facts.is_empty() {
            header.push_str(". ");
        } else {
            let _ = write!(header, " such that: {}. ", facts.join(sym.and));
        }
    }
    let _ = writeln!(header, "It should be proved that {goal}.");
    r.out.push_str(&header);
    r.steps(&p.body, 0, &mut origins);
    r.out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prover::{prove, SearchLimits};
    use crate::tptp::{load_problem, SupportAxiomOptions};

    fn example1() -> (Proof, Theory) {
        let p = load_problem(
            include_str!("../fixtures/example1.p"),
            &SupportAxiomOptions::default(),
        )
        .unwrap();
        let proof = prove(&p.theory, &p.conjectures[0], &SearchLimits::default()).unwrap();
        (proof, p.theory)
    }

    #[test]
    fn simple_axiom_examples() {
        let p = load_problem(
            include_str!("../fixtures/euclid_i11.p"),
            &SupportAxiomOptions::default(),
        )
        .unwrap();
        let t = &p.theory;
        assert!(is_simple_axiom(t.axiom("defcollinear2e").unwrap()));
        assert!(!is_simple_axiom(t.axiom("lemma_extension").unwrap()));
        assert!(!is_simple_axiom(t.axiom("eq_excluded_middle").unwrap()));
        assert!(!is_simple_axiom(t.axiom("defrightangle2").unwrap()));
    }

    #[test]
    fn example1_text() {
        let (proof, t) = example1();
        let text = render_text(&proof, &t, &RenderOptions::default());
        let expected = "\
Consider arbitrary x such that: p(x). It should be proved that r(x).
1. r(x) \\/ q(x) (by MP, from p(x) using axiom ax1; instantiation: X -> x)
2. Case r(x):
  3. Proved by assumption! (by QEDas)
4. Case q(x):
  5. _|_ (by MP, from q(x) using axiom ax2; instantiation: X -> x)
  6. Contradiction! (by QEDefq)
7. Proved by case split! (by QEDcs, by r(x), q(x))
";
        assert_eq!(text, expected);
        assert_eq!(text, render_text(&proof, &t, &RenderOptions::default()));
    }

    #[test]
    fn example1_used_axioms() {
        let (proof, t) = example1();
        let used: Vec<String> = used_axioms(&proof, &t, false).into_iter().collect();
        assert_eq!(used, ["ax1", "ax2"]);
    }

    #[test]
    fn latex_wraps_symbols_only() {
        let (proof, t) = example1();
        let opts = RenderOptions {
            format: Format::Latex,
            ..Default::default()
        };
        let text = render_text(&proof, &t, &opts);
        assert!(text.contains("r(x) \\vee q(x)"));
        assert!(text.contains("\\perp"));
        assert_eq!(text.lines().count(), 8);
    }

    #[test]
    fn tautology_renders_one_line() {
        let p = load_problem(
            "fof(c,conjecture,(! [X] : (p(X) => p(X)))).",
            &SupportAxiomOptions::default(),
        )
        .unwrap();
        let proof = prove(&p.theory, &p.conjectures[0], &SearchLimits::default()).unwrap();
        let text = render_text(&proof, &p.theory, &RenderOptions::default());
        assert_eq!(
            text,
            "Consider arbitrary x such that: p(x). It should be proved that p(x).\n1. Proved by assumption! (by QEDas)\n"
        );
    }
}

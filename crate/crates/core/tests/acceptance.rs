mod common;

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use geoproof::cli::run;
use geoproof::formula::{Atom, Signature};
use geoproof::gcl::{evaluate, render_svg, RenderStyle, Stmt};
use geoproof::illustrate::{compile, is_contradictory, CompileOptions, GclDocument};
use geoproof::interp::draw::DrawKind;
use geoproof::interp::geom::{area2, circle_circle, midpoint, towards, GeoPoint, Which};
use geoproof::interp::{realize_from_gcl, GeoModel, InterpRegistry};
use geoproof::proofdoc::{is_simple_axiom, render_text, used_axioms, RenderOptions};
use geoproof::prover::{check_proof, prove, Case, CheckResult, Proof, ProofStep, SearchLimits};
use geoproof::tptp::{load_problem, parse_tptp, Problem, SupportAxiomOptions};

const I11: &str = include_str!("../fixtures/euclid_i11.p");
const EXAMPLE1: &str = include_str!("../fixtures/example1.p");
const VARIGNON: &str = include_str!("../fixtures/varignon.p");
const I11_EXISTS: &str = include_str!("../fixtures/proposition_11_exists.gcl");
const VARIGNON_EXISTS: &str = include_str!("../fixtures/th_varignon_exists.gcl");

const I11_ENTRIES: [&str; 20] = [
    "lemma_betweennotequal",
    "lemma_extension",
    "proposition_01",
    "defequilateral",
    "defequilateral2",
    "lemma_doublereverse",
    "lemma_congruenceflip",
    "defcollinear",
    "defcollinear2a",
    "defcollinear2b",
    "defcollinear2c",
    "defcollinear2d",
    "defcollinear2e",
    "defcollinear2f",
    "lemma_collinearorder",
    "deftriangle",
    "deftriangle2",
    "defrightangle",
    "defrightangle2",
    "proposition_11",
];

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn load(src: &str) -> Result<Problem, String> {
    load_problem(src, &SupportAxiomOptions::default()).map_err(|e| e.to_string())
}

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn near(p: GeoPoint, x: f64, y: f64, tol: f64) -> bool {
    (p.x - x).abs() <= tol && (p.y - y).abs() <= tol
}

fn splits(steps: &[ProofStep], out: &mut Vec<Vec<Case>>) {
    for s in steps {
        if let ProofStep::CaseSplit { cases, .. } = s {
            out.push(cases.clone());
            cases.iter().for_each(|c| splits(&c.steps, out));
        }
    }
}

fn example_1() -> Outcome {
    let p = load(EXAMPLE1)?;
    let start = Instant::now();
    let proof = prove(&p.theory, &p.conjectures[0], &SearchLimits::default()).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(1), format!("took {took:?}"))?;
    let ok = match proof.body.as_slice() {
        [ProofStep::Mp { .. }, ProofStep::CaseSplit { cases, .. }, ProofStep::QedCaseSplit] => {
            cases.len() == 2
                && matches!(cases[0].steps.as_slice(), [ProofStep::QedAssumption { .. }])
                && matches!(cases[1].steps.as_slice(), [ProofStep::Mp { .. }, ProofStep::QedContradiction])
        }
        _ => false,
    };
    ensure(ok, format!("unexpected shape {:?}", proof.body))?;
    let text = render_text(&proof, &p.theory, &RenderOptions::default());
    let numbered = text
        .lines()
        .filter(|l| l.trim_start().split('.').next().is_some_and(|n| n.parse::<u32>().is_ok()))
        .count();
    ensure(numbered == 7, format!("{numbered} numbered lines"))?;
    Ok(format!("1 MP, 2-case split, 7 numbered lines, {took:?}"))
}

fn i11() -> &'static Result<(Problem, Proof, Duration), String> {
    static CELL: OnceLock<Result<(Problem, Proof, Duration), String>> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = load(I11)?;
        let start = Instant::now();
        let proof = prove(&p.theory, p.conjecture(None).ok_or("no conjecture")?, &SearchLimits::default())
            .map_err(|e| e.to_string())?;
        Ok((p, proof, start.elapsed()))
    })
}

fn euclid_i11() -> Outcome {
    let names: Vec<String> = parse_tptp(I11).map_err(|e| e.to_string())?.into_iter().map(|e| e.name).collect();
    ensure(names == I11_ENTRIES, format!("entries {names:?}"))?;
    let (p, proof, took) = i11().as_ref().map_err(Clone::clone)?;
    let c = p.conjecture(None).unwrap();
    ensure(*took < Duration::from_secs(60), format!("took {took:?}"))?;
    ensure(proof.stats.deepening_level <= 12, "deepening above 12")?;
    ensure(check_proof(&p.theory, c, proof) == CheckResult::Valid, "proof does not check")?;
    let used: Vec<String> = used_axioms(proof, &p.theory, false).into_iter().collect();
    ensure(
        used == ["lemma_extension", "proposition_01", "defrightangle2"],
        format!("used {used:?}"),
    )?;
    let mut all = Vec::new();
    splits(&proof.body, &mut all);
    ensure(all.len() == 1, format!("{} splits", all.len()))?;
    let facts: Vec<String> = all[0].iter().flat_map(|c| c.facts.atoms().iter().map(Atom::to_string)).collect();
    let on_w1_c = |pred: &str| facts.contains(&format!("{pred}(w1,c)")) || facts.contains(&format!("{pred}(c,w1)"));
    ensure(on_w1_c("eq") && on_w1_c("neq"), format!("split on {facts:?}"))?;
    Ok(format!(
        "19 axioms + conjecture, level {}, {} MPs, split on {facts:?}, {took:?}",
        proof.stats.deepening_level, proof.stats.mp_count
    ))
}

fn coherentization() -> Outcome {
    let p = load(I11)?;
    let sig: &Signature = &p.theory.signature;
    ensure(sig.complement("col") == Some("ncol"), "no col/ncol complement")?;
    let clash = p.theory.axiom("col_neg_contradiction").ok_or("no col contradiction axiom")?;
    ensure(clash.disjuncts.is_empty() && clash.premises.len() == 2, "malformed contradiction axiom")?;
    for name in ["deftriangle", "deftriangle2"] {
        let ax = p.theory.axiom(name).ok_or(format!("{name} missing"))?;
        ensure(ax.atoms().any(|a| a.pred == "ncol"), format!("{name} lacks ncol"))?;
    }
    let mut checked = 0;
    for src in [I11, EXAMPLE1, VARIGNON] {
        checked += common::fof::translation_agrees(src)?;
    }
    Ok(format!("col/ncol with contradiction axiom; {checked} small interpretations agree"))
}

fn primitives() -> Outcome {
    let m = midpoint(GeoPoint::new(2.0, 5.0), GeoPoint::new(4.0, 11.0));
    ensure(m == GeoPoint::new(3.0, 8.0), format!("midpoint {m:?}"))?;
    let t = towards(GeoPoint::new(8.0, 2.0), GeoPoint::new(22.0, 7.0), 0.7);
    ensure(near(t, 17.8, 5.5, 1e-12), format!("towards {t:?}"))?;
    let (o, q) = (GeoPoint::new(0.0, 0.0), GeoPoint::new(2.0, 0.0));
    let s3 = 3f64.sqrt();
    let f = circle_circle(o, q, q, o, Which::First).map_err(|e| e.to_string())?;
    let s = circle_circle(o, q, q, o, Which::Second).map_err(|e| e.to_string())?;
    ensure(near(f, 1.0, s3, 1e-12) && near(s, 1.0, -s3, 1e-12), format!("circles {f:?} {s:?}"))?;
    Ok("midpoint exact, towards and circle_circle within 1e-12".into())
}

fn i11_doc(animate: bool) -> Result<(GclDocument, GeoModel), String> {
    let (p, proof, _) = i11().as_ref().map_err(Clone::clone)?;
    let reg = InterpRegistry::builtin();
    let model = realize_from_gcl(I11_EXISTS, "proposition_11_exists", &proof.intro.constants, &reg, 0)
        .map_err(|e| e.to_string())?;
    let opts = CompileOptions {
        animate,
        ..CompileOptions::default()
    };
    compile(proof, &p.theory, model, &reg, I11_EXISTS, opts).map_err(|e| e.to_string())
}

fn calls(body: &[Stmt]) -> Vec<(String, Vec<String>)> {
    body.iter()
        .filter_map(|s| match s {
            Stmt::Call { name, args } => Some((name.clone(), args.clone())),
            _ => None,
        })
        .collect()
}

fn registered_mps(steps: &[ProofStep], reg: &InterpRegistry, out: &mut Vec<String>) {
    for s in steps {
        match s {
            ProofStep::Mp { axiom, .. } if reg.lookup(axiom).is_some() => out.push(axiom.clone()),
            ProofStep::CaseSplit { cases, .. } => cases.iter().for_each(|c| registered_mps(&c.steps, reg, out)),
            _ => {}
        }
    }
}

fn i11_illustration() -> Outcome {
    let (doc, _) = i11_doc(false)?;
    let want = [
        ("lemma_extension", vec!["a", "c", "a", "c", "w"]),
        ("proposition_01", vec!["a", "w", "w1"]),
        ("defrightangle2", vec!["a", "c", "w1", "w"]),
    ];
    let got = calls(&doc.theorem.body);
    let want: Vec<(String, Vec<String>)> = want
        .iter()
        .map(|(n, a)| (n.to_string(), a.iter().map(|s| s.to_string()).collect()))
        .collect();
    ensure(got == want, format!("calls {got:?}"))?;
    let text = doc.theorem_text();
    for line in ["  mark_t w\n", "  mark_t w1\n", "  % --- Illustration for branch 2\n"] {
        ensure(text.contains(line), format!("missing {line:?}"))?;
    }
    let main = doc.main_stmts();
    let includes = main.iter().filter(|s| matches!(s, Stmt::Include(_))).count();
    let main_calls = calls(&main).len();
    ensure(includes == 5 && main_calls == 2, format!("{includes} includes, {main_calls} calls"))?;
    let (_, proof, _) = i11().as_ref().map_err(Clone::clone)?;
    let reg = InterpRegistry::builtin();
    let mut all = Vec::new();
    splits(&proof.body, &mut all);
    let mut closed = Vec::new();
    for c in all.iter().flatten().filter(|c| is_contradictory(&c.steps)) {
        registered_mps(&c.steps, &reg, &mut closed);
    }
    let mut open = Vec::new();
    registered_mps(&proof.body, &reg, &mut open);
    ensure(open.len() - closed.len() == got.len(), "calls do not match the open path")?;
    let (layered, _) = i11_doc(true)?;
    let emitted = layered
        .theorem
        .body
        .iter()
        .filter(|s| matches!(s, Stmt::Call { .. } | Stmt::Mark(..)))
        .count();
    let scene = evaluate(&layered.program().map_err(|e| e.to_string())?, 0).map_err(|e| e.to_string())?;
    ensure(scene.layer_count() == 1 + emitted, format!("{} layers for {emitted} statements", scene.layer_count()))?;
    for layer in 0..scene.layer_count() {
        ensure(scene.ops.iter().any(|o| o.layer == layer), format!("layer {layer} empty"))?;
    }
    Ok(format!(
        "3 calls, 2 marks, branch 2; 5 includes, 2 calls; contradictory case: {} registered steps, 0 ops",
        closed.len()
    ))
}

fn i11_geometry() -> Outcome {
    let (_, m) = i11_doc(false)?;
    let p = |n: &str| m.points.get(n).copied().ok_or(format!("{n} unmapped"));
    let (a, c, w, w1) = (p("a")?, p("c")?, p("w")?, p("w1")?);
    let (u, v) = (a.sub(c), w1.sub(c));
    let dot = u.dot(v).abs();
    ensure(dot <= 1e-6 * u.norm() * v.norm(), format!("dot {dot}"))?;
    let s = m.scale();
    let between = area2(a, c, w).abs() <= 1e-9 * s * s && c.sub(a).dot(w.sub(c)) > 0.0;
    ensure(between && a.dist(c) > 1e-9 && c.dist(w) > 1e-9, "betS(a,c,w) fails")?;
    Ok(format!("|dot| = {dot:.3e}, |w1-c| = {:.6}, betS(a,c,w) holds", v.norm()))
}

fn animation() -> Outcome {
    let (doc, _) = i11_doc(true)?;
    ensure(doc.main_stmts().contains(&Stmt::AnimationFrames(7, 1)), "no animation_frames 7 1")?;
    let scene = evaluate(&doc.program().map_err(|e| e.to_string())?, 0).map_err(|e| e.to_string())?;
    ensure(scene.layer_count() == 6, format!("{} layers", scene.layer_count()))?;
    let frames = scene.frames();
    ensure(frames.len() == 7, format!("{} frames", frames.len()))?;
    let style = RenderStyle::default();
    let svgs: Vec<String> = frames.iter().map(|f| render_svg(&scene, Some(*f), &style)).collect();
    for (i, pair) in frames.windows(2).enumerate() {
        let grows = scene.ops.iter().all(|o| !pair[0].shows(o.layer) || pair[1].shows(o.layer));
        let shapes = |s: &str| s.lines().filter(|l| l.starts_with('<') && !l.starts_with("</")).count();
        ensure(grows && shapes(&svgs[i]) <= shapes(&svgs[i + 1]), format!("frame {} shrinks", i + 2))?;
    }
    let red: Vec<bool> = svgs.iter().map(|s| s.contains("\"red\"")).collect();
    ensure(red[..6].iter().all(|r| *r) && !red[6], format!("red pattern {red:?}"))?;
    Ok("animation_frames 7 1, 6 layers, 7 monotone frames".into())
}

fn varignon() -> Outcome {
    let p = load(VARIGNON)?;
    let c = p.conjecture(None).ok_or("no conjecture")?;
    let proof = prove(&p.theory, c, &SearchLimits::default()).map_err(|e| e.to_string())?;
    ensure(check_proof(&p.theory, c, &proof) == CheckResult::Valid, "proof does not check")?;
    let mut all = Vec::new();
    splits(&proof.body, &mut all);
    ensure(all.is_empty(), "proof splits")?;
    ensure(matches!(proof.body.last(), Some(ProofStep::QedAssumption { .. })), "no QedAssumption")?;
    let visible = proof
        .body
        .iter()
        .filter(|s| match s {
            ProofStep::Mp { axiom, .. } => {
                !p.theory.is_support(axiom) && p.theory.axiom(axiom).is_some_and(|a| !is_simple_axiom(a))
            }
            _ => false,
        })
        .count();
    ensure(visible == 7, format!("{visible} visible MPs"))?;
    let reg = InterpRegistry::builtin();
    let model = realize_from_gcl(VARIGNON_EXISTS, "th_varignon_exists", &proof.intro.constants, &reg, 0)
        .map_err(|e| e.to_string())?;
    let (_, m) = compile(&proof, &p.theory, model, &reg, VARIGNON_EXISTS, CompileOptions::default())
        .map_err(|e| e.to_string())?;
    let pt = |n: &str| m.points.get(n).copied().ok_or(format!("{n} unmapped"));
    let (d1, d2) = (midpoint(pt("e")?, pt("g")?), midpoint(pt("f")?, pt("h")?));
    ensure(d1.dist(d2) <= 1e-9 * m.scale(), format!("diagonals meet at {d1:?} and {d2:?}"))?;
    ensure(d1 == GeoPoint::new(2.0, 2.0) && d2 == d1, format!("midpoints {d1:?} {d2:?}"))?;
    let ticks = m.ops.iter().filter(|o| matches!(o.kind, DrawKind::ParallelTicks { .. })).count();
    Ok(format!("7 visible MPs, no split; diagonals bisect at (2,2); {ticks} parallel marks"))
}

fn soundness() -> Outcome {
    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let strat = common::random::problem_text();
    let (mut proved, mut refuted, mut open) = (0, 0, 0);
    for _ in 0..500 {
        let src = strat.new_tree(&mut runner).map_err(|e| e.to_string())?.current();
        match common::random::run(&src)? {
            common::random::Outcome::Proved => proved += 1,
            common::random::Outcome::Refuted => refuted += 1,
            common::random::Outcome::Open => open += 1,
        }
    }
    ensure(proved > 0, "nothing proved")?;
    Ok(format!("500 theories: {proved} proved and checked, {refuted} refuted, {open} open; no unsound proof"))
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).into_iter().flatten().flatten() {
            let p = e.path();
            if p.is_dir() {
                stack.push(p);
            } else if let (Ok(rel), Ok(bytes)) = (p.strip_prefix(dir), fs::read(&p)) {
                out.insert(rel.display().to_string(), bytes);
            }
        }
    }
    out
}

fn determinism() -> Outcome {
    let tmp = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let input = fixture("euclid_i11.p");
    let out = |k: &str| tmp.path().join(k).display().to_string();
    for k in ["one", "two"] {
        let code = run(["geoproof", "illustrate", &input, "--animate", "--seed", "0", "--out", &out(k)]);
        ensure(code == 0, format!("run {k} exited {code}"))?;
    }
    let (one, two) = (tree(Path::new(&out("one"))), tree(Path::new(&out("two"))));
    ensure(!one.is_empty() && one == two, "seed 0 runs differ")?;
    let proof = format!("{}/proposition_11.proof.json", out("one"));
    let code = run([
        "geoproof", "illustrate", &input, "--animate", "--seed", "1", "--proof", &proof, "--out", &out("three"),
    ]);
    ensure(code == 0, format!("seed 1 run exited {code}"))?;
    let three = tree(Path::new(&out("three")));
    ensure(one.keys().eq(three.keys()), "seed 1 produced different files")?;
    let changed: Vec<&String> = one.keys().filter(|k| one[*k] != three[*k]).collect();
    let random_only = changed.iter().all(|k| *k == "proposition_11_exists.gcl" || k.starts_with("frames/"));
    ensure(!changed.is_empty() && random_only, format!("seed 1 changed {changed:?}"))?;
    Ok(format!("{} files identical across seed-0 runs; seed 1 changes only {} placement files", one.len(), changed.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("example 1 proof shape", example_1),
        ("Euclid I.11 proof", euclid_i11),
        ("I.11 illustration", i11_illustration),
        ("I.11 geometry", i11_geometry),
        ("animation frames", animation),
        ("Varignon first proof", varignon),
        ("soundness suite", soundness),
        ("coherentization suite", coherentization),
        ("determinism", determinism),
        ("primitive oracles", primitives),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into()))
        });
        match r {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

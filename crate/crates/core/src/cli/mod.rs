//! The `geoproof` command line: `prove`, `illustrate` and `render`.

mod args;
mod io;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::Parser;

pub use args::{Cli, Command, Emit, FallbackArg, IllustrateArgs, ProveArgs, RenderArgs, OUT_ENV};
pub use io::{write_atomic, CliError};

use crate::exec::{map_range, Execution};
use crate::formula::CoherentFormula;
use crate::gcl::{evaluate, parse_gcl, render_svg, DirResolver, Frame, RenderStyle, Scene, Stmt};
use crate::illustrate::{compile, is_contradictory, realize_by_proof, BranchPolicy, CompileOptions, IllustrateError, ProvingLemmas};
use crate::interp::{
    check_nondegenerate, ncol_premises, premises_conjecture, realize_from_gcl, InterpRegistry, Nondegeneracy,
};
use crate::proofdoc::{render_text, used_axioms, RenderOptions};
use crate::prover::{check_proof, prove, skolemize_conjecture, CheckResult, Proof, SearchLimits};
use crate::tptp::{load_problem, to_tptp, Problem, Role, SupportAxiomOptions};
use io::{input, read};

const EXISTENCE: &str = include_str!("../../assets/existence.p");

/// A proved conjecture.
#[derive(Debug, Clone)]
pub struct Proved {
    pub problem: Problem,
    pub conjecture: CoherentFormula,
    pub proof: Proof,
}

fn wants(emit: &[Emit], e: Emit) -> bool {
    emit.is_empty() || emit.contains(&e)
}

fn limits(a: &ProveArgs) -> SearchLimits {
    SearchLimits {
        max_mp_steps: a.max_steps,
        timeout: Duration::from_secs(a.timeout),
        ..SearchLimits::default()
    }
}

fn load(a: &ProveArgs) -> Result<(String, Problem, CoherentFormula), CliError> {
    let text = read(&a.input)?;
    let problem = load_problem(&text, &SupportAxiomOptions::default())
        .map_err(|e| CliError::Input(format!("{}: {e}", a.input.display())))?;
    let conjecture = problem
        .conjecture(a.conjecture.as_deref())
        .cloned()
        .ok_or_else(|| match &a.conjecture {
            Some(n) => CliError::Input(format!("no conjecture named {n}")),
            None => CliError::Input("expected exactly one conjecture; pick one with --conjecture".into()),
        })?;
    Ok((text, problem, conjecture))
}

fn write_proof(p: &Proved, a: &ProveArgs, dir: &Path) -> Result<(), CliError> {
    let name = &p.conjecture.name;
    if wants(&a.emit, Emit::ProofJson) {
        write_atomic(dir, &format!("{name}.proof.json"), &p.proof.to_json())?;
    }
    if wants(&a.emit, Emit::ProofText) {
        let opts = RenderOptions {
            hide_simple_axioms: a.hide_simple,
            ..RenderOptions::default()
        };
        write_atomic(dir, &format!("{name}.proof.txt"), &render_text(&p.proof, &p.problem.theory, &opts))?;
    }
    Ok(())
}

fn search(problem: Problem, conjecture: CoherentFormula, a: &ProveArgs) -> Result<Proved, CliError> {
    let proof = prove(&problem.theory, &conjecture, &limits(a))
        .map_err(|e| CliError::Unprovable(format!("{}: {e}", conjecture.name)))?;
    match check_proof(&problem.theory, &conjecture, &proof) {
        CheckResult::Valid => Ok(Proved {
            problem,
            conjecture,
            proof,
        }),
        bad => Err(CliError::Unprovable(format!("proof failed its check: {bad:?}"))),
    }
}

/// Proves the conjecture, checks the proof and writes it.
pub fn cmd_prove(a: &ProveArgs) -> Result<Proved, CliError> {
    let (_, problem, conjecture) = load(a)?;
    let proved = search(problem, conjecture, a)?;
    write_proof(&proved, a, &args::out_dir(&a.out))?;
    let used: Vec<String> = used_axioms(&proved.proof, &proved.problem.theory, false).into_iter().collect();
    println!("{}: proved using {}", proved.conjecture.name, used.join(", "));
    Ok(proved)
}

fn illustrate_err(e: impl std::fmt::Display) -> CliError {
    CliError::Illustrate(e.to_string())
}

fn registry(paths: &[PathBuf]) -> Result<InterpRegistry, CliError> {
    let mut reg = InterpRegistry::builtin();
    for p in paths {
        let dir = p.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
        let extra = InterpRegistry::from_manifest(&read(p)?, &DirResolver(dir))
            .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
        reg.merge(extra);
    }
    Ok(reg)
}

fn render_frames(scene: &Scene) -> Vec<String> {
    let frames = scene.frames();
    let style = RenderStyle::default();
    map_range(Execution::default(), frames.len(), |i| render_svg(scene, Some(frames[i]), &style))
}

/// Proves (or reads a proof), realizes the premises and writes the GCL
/// document, plus SVG frames when animating.
pub fn cmd_illustrate(a: &IllustrateArgs) -> Result<PathBuf, CliError> {
    let pa = &a.prove;
    let dir = args::out_dir(&pa.out);
    let (text, problem, conjecture) = load(pa)?;
    let proved = match &a.proof {
        Some(path) => {
            let proof = Proof::from_json(&read(path)?).map_err(input)?;
            if check_proof(&problem.theory, &conjecture, &proof) != CheckResult::Valid {
                return Err(CliError::Input(format!("{}: proof does not check", path.display())));
            }
            Proved {
                problem,
                conjecture,
                proof,
            }
        }
        None => search(problem, conjecture, pa)?,
    };
    write_proof(&proved, pa, &dir)?;
    if is_contradictory(&proved.proof.body) {
        return Err(illustrate_err(IllustrateError::AllContradictory));
    }
    let Proved {
        problem,
        conjecture,
        proof,
    } = proved;
    let sig = &problem.theory.signature;
    let reg = registry(&a.manifest)?;
    let nd = Nondegeneracy::default();
    let name = &conjecture.name;
    let exists_conj = premises_conjecture(&conjecture, &nd, sig);
    write_atomic(&dir, &format!("{name}_exists.tptp"), &format!("{}\n", to_tptp(&exists_conj, Role::Conjecture, sig)))?;
    let policy = BranchPolicy {
        fallback: a.fallback.into(),
    };
    let (model, exists_text) = match &a.exists {
        Some(path) => {
            let text = read(path)?;
            let (intro, _) = skolemize_conjecture(&conjecture);
            let m = realize_from_gcl(&text, &exists_conj.name, &intro.constants, &reg, a.seed).map_err(illustrate_err)?;
            let ncol = ncol_premises(&intro.assumed, sig);
            check_nondegenerate(&m, &intro.constants, &ncol, nd.distinct).map_err(illustrate_err)?;
            (m, text)
        }
        None => {
            let theory = if problem.theory.axiom("two_distinct_points").is_some() {
                problem.theory.clone()
            } else {
                load_problem(&format!("{text}\n{EXISTENCE}"), &SupportAxiomOptions::default())
                    .map_err(input)?
                    .theory
            };
            let r = realize_by_proof(&theory, &conjecture, &nd, &reg, policy, a.seed, &limits(pa))
                .map_err(illustrate_err)?;
            (r.model, r.exists_text)
        }
    };
    let lemmas = ProvingLemmas {
        theory: problem.theory.clone(),
        limits: limits(pa),
    };
    let opts = CompileOptions {
        animate: a.animate,
        policy,
        lemmas: Some(&lemmas),
    };
    let (doc, _) = compile(&proof, &problem.theory, model, &reg, &exists_text, opts).map_err(illustrate_err)?;
    if wants(&pa.emit, Emit::Gcl) {
        for (file, text) in doc.files() {
            write_atomic(&dir, &file, &text)?;
        }
    }
    if wants(&pa.emit, Emit::Svg) {
        let program = doc.program().map_err(illustrate_err)?;
        let scene = evaluate(&program, a.seed).map_err(|e| illustrate_err(IllustrateError::Gcl {
            context: doc.main_file(),
            source: e,
        }))?;
        if a.animate {
            for (i, svg) in render_frames(&scene).iter().enumerate() {
                write_atomic(&dir, &format!("frames/frame_{}.svg", i + 1), svg)?;
            }
        } else {
            write_atomic(&dir, &format!("{name}.svg"), &render_svg(&scene, None, &RenderStyle::default()))?;
        }
    }
    println!("{name}: illustration written to {}", dir.display());
    Ok(dir)
}

/// Evaluates a GCL file; writes the final picture or every frame. A file
/// holding only procedures is drawn by calling each with its parameter names.
pub fn cmd_render(a: &RenderArgs) -> Result<Vec<PathBuf>, CliError> {
    let text = read(&a.input)?;
    let base = a.input.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
    let mut program = parse_gcl(&text, &DirResolver(base))
        .map_err(|e| CliError::Input(format!("{}: {e}", a.input.display())))?;
    if program
        .stmts
        .iter()
        .all(|s| matches!(s, Stmt::Procedure(_) | Stmt::Comment(_) | Stmt::Include(_)))
    {
        let calls: Vec<Stmt> = program
            .stmts
            .iter()
            .filter_map(|s| match s {
                Stmt::Procedure(p) => Some(Stmt::Call {
                    name: p.name.clone(),
                    args: p.params.clone(),
                }),
                _ => None,
            })
            .collect();
        program.stmts.extend(calls);
    }
    let scene = evaluate(&program, a.seed).map_err(|e| CliError::Input(format!("{}: {e}", a.input.display())))?;
    let dir = args::out_dir(&a.out);
    let stem = a.input.file_stem().map_or_else(|| "figure".into(), |s| s.to_string_lossy().into_owned());
    if a.frames {
        render_frames(&scene)
            .iter()
            .enumerate()
            .map(|(i, svg)| write_atomic(&dir, &format!("frames/frame_{}.svg", i + 1), svg))
            .collect()
    } else {
        let last = Frame {
            index: scene.frame_count(),
        };
        let svg = render_svg(&scene, Some(last), &RenderStyle::default());
        Ok(vec![write_atomic(&dir, &format!("{stem}.svg"), &svg)?])
    }
}

/// Parses arguments, runs the command and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let r = match &cli.command {
        Command::Prove(a) => cmd_prove(a).map(drop),
        Command::Illustrate(a) => cmd_illustrate(a).map(drop),
        Command::Render(a) => cmd_render(a).map(drop),
    };
    match r {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

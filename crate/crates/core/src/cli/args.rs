use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::illustrate::Fallback;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "GEOPROOF_OUT";

#[derive(Debug, Parser)]
#[command(name = "geoproof", version, about = "Prove geometry conjectures and illustrate the proofs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prove a conjecture and write the proof as JSON and text.
    Prove(ProveArgs),
    /// Prove, then compile the proof into GCL files and optional SVG frames.
    Illustrate(IllustrateArgs),
    /// Evaluate a GCL file and render SVG.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Gcl,
    Svg,
    ProofText,
    ProofJson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FallbackArg {
    PreferComplement,
    FirstOpen,
}

impl From<FallbackArg> for Fallback {
    fn from(f: FallbackArg) -> Self {
        match f {
            FallbackArg::PreferComplement => Fallback::PreferComplement,
            FallbackArg::FirstOpen => Fallback::FirstOpen,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProveArgs {
    /// TPTP problem file.
    pub input: PathBuf,
    /// Conjecture to prove; defaults to the only one.
    #[arg(long)]
    pub conjecture: Option<String>,
    /// Ceiling on the iterative-deepening bound.
    #[arg(long, default_value_t = 12)]
    pub max_steps: usize,
    /// Search timeout in seconds.
    #[arg(long, default_value_t = 60)]
    pub timeout: u64,
    /// Output directory; defaults to $GEOPROOF_OUT, then `out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Leave simple-axiom steps out of the proof text.
    #[arg(long)]
    pub hide_simple: bool,
    /// Artifacts to write; all relevant ones when omitted.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub emit: Vec<Emit>,
}

#[derive(Debug, Clone, Args)]
pub struct IllustrateArgs {
    #[command(flatten)]
    pub prove: ProveArgs,
    /// Proof JSON from an earlier `prove`; skips the search.
    #[arg(long)]
    pub proof: Option<PathBuf>,
    /// Extra interpretation manifests, read after the built-in one.
    #[arg(long)]
    pub manifest: Vec<PathBuf>,
    /// Hand-written `<name>_exists` procedure for the premises.
    #[arg(long)]
    pub exists: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = FallbackArg::PreferComplement)]
    pub fallback: FallbackArg,
    /// Emit layers, the animation header and one SVG per frame.
    #[arg(long)]
    pub animate: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    /// GCL file; includes resolve relative to it.
    pub input: PathBuf,
    /// One SVG per animation frame instead of the final picture.
    #[arg(long)]
    pub frames: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `--out`, else the environment variable, else `out`.
pub fn out_dir(arg: &Option<PathBuf>) -> PathBuf {
    arg.clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

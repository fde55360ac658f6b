use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tanaka_cli::commands::{self as cmd, AlgebraFamily, CatalogItem, CliResult, FrameFamily, Output, EXIT_PASS, EXIT_USAGE};

/// Relative `--out` paths are resolved against this directory when it is set.
const OUT_DIR_VAR: &str = "TANAKA_OUT_DIR";

#[derive(Parser)]
#[command(name = "tanaka", version, about = "Tanaka prolongations, normalization conditions and rank-2 distributions in exact arithmetic")]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record wall times in verify-paper reports (breaks byte-for-byte reproducibility).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Universal Tanaka prolongation of a negatively graded algebra.
    Prolong(AlgebraArgs),
    /// Decide whether a linear invariant normalization condition exists.
    Normcheck(AlgebraArgs),
    /// Computations on polynomial frames of rank-2 distributions.
    Vf {
        #[command(subcommand)]
        op: VfOp,
    },
    /// Emit a catalog algebra, frame or eigenvalue table.
    Family {
        #[arg(value_enum)]
        item: Item,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        k: usize,
    },
    /// Run every check for one n (5..=8).
    VerifyPaper {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args)]
struct AlgebraArgs {
    #[arg(long, value_enum)]
    family: Option<AlgFam>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    k: usize,
    #[arg(long)]
    max_level: Option<usize>,
    /// Algebra file in the JSON structure-constant format.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgFam {
    Skn,
    Symp,
    Heis,
}

#[derive(Args)]
struct FrameArgs {
    #[arg(long, value_enum)]
    family: Option<FrameFam>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    k: usize,
    /// Number of chart prolongations applied before the computation.
    #[arg(long, default_value_t = 0)]
    prolong: usize,
    /// Evaluation point, e.g. `x=1/2,y=0`; a seeded point is used when absent.
    #[arg(long)]
    point: Option<String>,
    /// Frame file in the JSON polynomial format.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameFam {
    Monge1,
    Monge2,
    FlatSkn,
}

#[derive(Subcommand)]
enum VfOp {
    /// Small growth vector at a point.
    Growth(FrameArgs),
    /// Tanaka symbol at a point, optionally matched against s^{k,n}.
    Symbol {
        #[command(flatten)]
        frame: FrameArgs,
        /// `k,n`
        #[arg(long)]
        recognize: Option<String>,
    },
    /// Involutivity of the flags on a prolongation tower.
    Involutivity(FrameArgs),
    /// Print the chart prolongation tower.
    Tower(FrameArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Item {
    Heis,
    Gl2Heis,
    Skn,
    Symp,
    Monge1,
    Monge2,
    FlatSkn,
    EigenTable,
}

fn alg_family(f: AlgFam) -> AlgebraFamily {
    match f {
        AlgFam::Skn => AlgebraFamily::Skn,
        AlgFam::Symp => AlgebraFamily::Symp,
        AlgFam::Heis => AlgebraFamily::Heis,
    }
}

fn frame_family(f: FrameFam) -> FrameFamily {
    match f {
        FrameFam::Monge1 => FrameFamily::Monge1,
        FrameFam::Monge2 => FrameFamily::Monge2,
        FrameFam::FlatSkn => FrameFamily::FlatSkn,
    }
}

fn catalog_item(i: Item) -> CatalogItem {
    match i {
        Item::Heis => CatalogItem::Heis,
        Item::Gl2Heis => CatalogItem::Gl2Heis,
        Item::Skn => CatalogItem::Skn,
        Item::Symp => CatalogItem::Symp,
        Item::Monge1 => CatalogItem::Monge1,
        Item::Monge2 => CatalogItem::Monge2,
        Item::FlatSkn => CatalogItem::FlatSkn,
        Item::EigenTable => CatalogItem::EigenTable,
    }
}

fn setup(a: &FrameArgs, seed: u64) -> CliResult<cmd::VfSetup> {
    let base = cmd::load_frame(a.family.map(frame_family), a.n, a.k, a.input.as_deref())?;
    cmd::vf_setup(base, a.prolong, a.point.as_deref(), seed)
}

fn run(cli: &Cli) -> CliResult<Output> {
    let seed = cli.seed;
    match &cli.command {
        Command::Prolong(a) => {
            let g = cmd::load_algebra(a.family.map(alg_family), a.n, a.k, a.input.as_deref())?;
            cmd::cmd_prolong(g, a.max_level)
        }
        Command::Normcheck(a) => {
            let g = cmd::load_algebra(a.family.map(alg_family), a.n, a.k, a.input.as_deref())?;
            let skn = match (a.family, a.n) {
                (Some(AlgFam::Skn), Some(n)) => Some((a.k, n)),
                _ => None,
            };
            cmd::cmd_normcheck(g, a.max_level, skn)
        }
        Command::Vf { op } => match op {
            VfOp::Growth(a) => cmd::cmd_growth(&setup(a, seed)?),
            VfOp::Symbol { frame, recognize } => {
                let rec = recognize.as_deref().map(cmd::parse_pair).transpose()?;
                cmd::cmd_symbol(&setup(frame, seed)?, rec, seed)
            }
            VfOp::Involutivity(a) => cmd::cmd_involutivity(&setup(a, seed)?, seed),
            VfOp::Tower(a) => {
                let base = cmd::load_frame(a.family.map(frame_family), a.n, a.k, a.input.as_deref())?;
                cmd::cmd_tower(&base, a.prolong)
            }
        },
        Command::Family { item, n, k } => cmd::cmd_family(catalog_item(*item), *n, *k),
        Command::VerifyPaper { n } => cmd::cmd_verify_paper(*n, seed, cli.timings),
    }
}

fn out_path(p: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if p.is_relative() => Path::new(&dir).join(p),
        _ => p.to_path_buf(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { EXIT_PASS as u8 });
        }
    };
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let body = match cli.format {
        Format::Text => &out.text,
        Format::Json => &out.json,
    };
    match &cli.out {
        Some(p) => {
            let p = out_path(p);
            if let Err(e) = std::fs::write(&p, body) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(EXIT_USAGE as u8);
            }
        }
        None => print!("{body}"),
    }
    ExitCode::from(out.code as u8)
}

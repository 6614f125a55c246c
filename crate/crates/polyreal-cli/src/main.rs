use clap::{Parser, Subcommand};
use polyreal::Tolerances;
use polyreal_cli::commands::{self, ConvertTarget, GenKind, Suite};
use std::path::PathBuf;
use std::process::ExitCode;

/// Batch toolkit for transfer-function realizations over the polydisk and
/// the right polyhalfplane: generate objects, evaluate them on point grids,
/// convert between realization formats, verify class membership, and
/// reconstruct colligations from samples. All I/O is JSON.
#[derive(Parser)]
#[command(name = "polyreal", version, about)]
struct Cli {
    /// Override a tolerance, e.g. --tol gram_tol=1e-6 (repeatable).
    #[arg(long = "tol", global = true, value_name = "KEY=VALUE")]
    tol: Vec<String>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random or preset object file.
    Gen {
        /// Object type to generate.
        #[arg(long, value_enum)]
        kind: GenKind,
        /// Named preset: "shift" (schur_gr) or "one-over-w" (pencil).
        #[arg(long)]
        preset: Option<String>,
        /// Number of variables.
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// State dimension.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Input/output dimension.
        #[arg(long, default_value_t = 1)]
        q: usize,
        /// Space dimension for tuples.
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Margin from the domain boundary for tuples.
        #[arg(long, default_value_t = 0.2)]
        margin: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write to this path instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate an object on a grid of points.
    Eval {
        #[arg(long)]
        object: PathBuf,
        /// Points file (type "points" with a matching domain).
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert an object to another realization format.
    Convert {
        #[arg(long)]
        object: PathBuf,
        #[arg(long, value_enum)]
        target: ConvertTarget,
        /// Seed for the embedded consistency sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite; exit 0 iff every check passes.
    Verify {
        #[arg(long)]
        object: PathBuf,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample count for point grids and tuple draws.
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Write the JSON report here (summary always goes to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct a colligation from a samples file.
    Realize {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_tolerances(overrides: &[String]) -> anyhow::Result<Tolerances> {
    let mut tol = Tolerances::default();
    for entry in overrides {
        let (key, value) = entry
            .split_once('=')
            .ok_or_else(|| anyhow::anyhow!("--tol expects KEY=VALUE, got {entry:?}"))?;
        let parsed: f64 = value
            .parse()
            .map_err(|_| anyhow::anyhow!("--tol {key}: {value:?} is not a number"))?;
        if !tol.set_by_name(key.trim(), parsed) {
            anyhow::bail!("unknown tolerance {key:?}");
        }
    }
    Ok(tol)
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let tol = parse_tolerances(&cli.tol)?;
    match cli.cmd {
        Cmd::Gen {
            kind,
            preset,
            d,
            n,
            q,
            m,
            margin,
            seed,
            out,
        } => commands::cmd_gen(
            kind,
            preset.as_deref(),
            d,
            n,
            q,
            m,
            margin,
            seed,
            out.as_ref(),
            &tol,
        ),
        Cmd::Eval {
            object,
            points,
            out,
        } => commands::cmd_eval(&object, &points, out.as_ref(), &tol),
        Cmd::Convert {
            object,
            target,
            seed,
            out,
        } => commands::cmd_convert(&object, target, seed, out.as_ref(), &tol),
        Cmd::Verify {
            object,
            suite,
            seed,
            points,
            out,
        } => commands::cmd_verify(&object, suite, seed, points, out.as_ref(), &tol),
        Cmd::Realize { samples, out } => commands::cmd_realize(&samples, out.as_ref(), &tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code_for(&err) as u8)
        }
    }
}

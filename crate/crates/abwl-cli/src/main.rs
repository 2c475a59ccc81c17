use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod cache;
mod commands;
mod input;
mod output;
mod repro;

use input::CliError;

#[derive(Parser)]
#[command(
    name = "abwl",
    version,
    about = "Abelian power-freeness of morphisms and their fixed points"
)]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(flatten)]
    out: OutputArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct OutputArgs {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Also write the JSON report to this file.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Args, Clone, Debug)]
pub struct MorphismArgs {
    /// Morphism file: {"alphabet": ["a","b"], "images": {"a": "...", "b": "..."}}.
    #[arg(long, conflicts_with = "images")]
    morphism: Option<PathBuf>,

    /// Images inline, comma separated, for the letters a, b, c, ... in order.
    #[arg(long, value_delimiter = ',')]
    images: Option<Vec<String>>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a morphism against one of the sufficient condition sets.
    Certify(commands::CertifyArgs),
    /// Decide abelian k-power freeness of a fixed point.
    Fixedpoint(commands::FixedpointArgs),
    /// Longest binary words avoiding factors and abelian powers.
    Longest(commands::LongestArgs),
    /// Ball-box distributions and box progressions.
    Ballbox(commands::BallboxArgs),
    /// Rerun the reference suite and compare against expected values.
    Repro(repro::ReproArgs),
}

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass = 0,
    Fail = 1,
    Inconclusive = 2,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Certify(a) => commands::certify(a, &cli.out),
        Command::Fixedpoint(a) => commands::fixedpoint(a, &cli.out),
        Command::Longest(a) => commands::longest(a, &cli.out),
        Command::Ballbox(a) => commands::ballbox(a, &cli.out),
        Command::Repro(a) => repro::run(a, &cli.out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(o) => ExitCode::from(o as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

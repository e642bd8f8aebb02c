//! `dilate`: builds and verifies dilations from JSON payloads and prints a
//! JSON report. Exit status 0 means every check passed, 1 means a check
//! failed, 2 means the input or parameters were rejected.

mod commands;
mod input;
mod report;
mod triple_io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(dilation_core::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<dilation_core::Error> for CliError {
    fn from(e: dilation_core::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "dilate", version, about = "Explicit dilations of convex combinations of isometries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Residual tolerance for float-mode checks.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Seed for sampled word lists.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Words {
    /// Check every word up to this length (defaults to the guarantee).
    #[arg(long)]
    pub all_up_to: Option<usize>,
    /// Check one explicit word, labels separated by commas; repeatable.
    /// The leftmost label is applied last, as in a matrix product.
    #[arg(long)]
    pub word: Vec<String>,
    /// Sample words once the exhaustive list would exceed this many.
    #[arg(long, default_value_t = 10_000)]
    pub word_cap: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Generators {
    Perms,
    SignedPerms,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Convex,
    Subconvex,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    SignProduct,
    Staircase,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the N-dilation of a convex combination and verify its powers.
    Build {
        #[arg(long)]
        combo: PathBuf,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        p: Option<String>,
        /// Save the triple for a later `verify`.
        #[arg(long)]
        triple_out: Option<PathBuf>,
        #[command(flatten)]
        words: Words,
        #[command(flatten)]
        common: Common,
    },
    /// Verify a saved triple against its targets.
    Verify {
        #[arg(long)]
        triple: PathBuf,
        #[command(flatten)]
        words: Words,
        #[command(flatten)]
        common: Common,
    },
    /// Build one dilation serving a whole family of combinations.
    Simultaneous {
        #[arg(long)]
        family: PathBuf,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        p: Option<String>,
        /// Largest common number of equal weights tried when equalizing.
        #[arg(long, default_value_t = 24)]
        m: usize,
        #[arg(long)]
        triple_out: Option<PathBuf>,
        #[command(flatten)]
        words: Words,
        #[command(flatten)]
        common: Common,
    },
    /// Add the zero operator to a dilated family.
    ZeroAugment {
        #[arg(long)]
        combo: PathBuf,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        triple_out: Option<PathBuf>,
        #[command(flatten)]
        words: Words,
        #[command(flatten)]
        common: Common,
    },
    /// Truncated shift dilation of an l^1 contraction.
    Shift {
        #[arg(long)]
        matrix: PathBuf,
        /// Window length W; powers up to W are guaranteed.
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        triple_out: Option<PathBuf>,
        #[command(flatten)]
        words: Words,
        #[command(flatten)]
        common: Common,
    },
    /// Write a Euclidean contraction as a convex combination of orthogonal matrices.
    Decompose {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = Strategy::SignProduct)]
        strategy: Strategy,
        #[command(flatten)]
        common: Common,
    },
    /// Decide membership in the hull of (signed) permutation matrices.
    HullCheck {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = Generators::Perms)]
        generators: Generators,
        #[arg(long, value_enum, default_value_t = Mode::Convex)]
        mode: Mode,
        #[command(flatten)]
        common: Common,
    },
    /// Check the cyclic word-sum identities for all multi-indices.
    IdentityCheck {
        #[arg(long)]
        m: usize,
        #[arg(long = "N")]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Cross-check the Euclidean pipeline against a unitary N-dilation.
    Oracle {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long = "N")]
        n: usize,
        /// Snap decomposition weights to this denominator.
        #[arg(long)]
        snap: Option<u64>,
        #[arg(long, value_enum)]
        strategy: Option<Strategy>,
        #[command(flatten)]
        common: Common,
    },
    /// List the orbits of the cyclic action on multi-indices.
    Orbit {
        #[arg(long)]
        m: usize,
        #[arg(long = "N")]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.command.common().out.clone();
    let report = match commands::run(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
    text.push('\n');
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.summary.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

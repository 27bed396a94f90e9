//! `vdp`: van der Put expansions, Lipschitz checks and root lifting from the
//! command line.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use padic_vdp::Error;

#[derive(Parser)]
#[command(name = "vdp", version, about = "p-adic van der Put expansions, Lipschitz checks and root lifting")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct GlobalArgs {
    /// The prime p.
    #[arg(long, global = true)]
    pub prime: Option<u32>,
    /// Digits carried by every value.
    #[arg(long, global = true, default_value_t = 16)]
    pub precision: usize,
    /// Number of variables of an inline expression.
    #[arg(long, global = true, visible_alias = "var")]
    pub vars: Option<usize>,
    /// Expansion or enumeration level K.
    #[arg(long, global = true, default_value_t = 2)]
    pub level: usize,
    /// Lipschitz weight, one value or a comma-separated list per variable.
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Maximum number of function evaluations a command may plan.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    pub budget: u128,
    /// Inline expression, e.g. "divp(x1 - x1^7, 1)".
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub expr: Option<String>,
    /// JSON definition file: {"arity":1,"alpha":[0],"body":"..."}.
    #[arg(long, global = true)]
    pub func: Option<PathBuf>,
    /// Coefficient table written by `expand`.
    #[arg(long, global = true)]
    pub table: Option<PathBuf>,
    /// Where `expand` writes its table.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
pub enum Command {
    /// Expand a function into its van der Put coefficients up to level K.
    Expand,
    /// Evaluate a function at a point.
    Eval {
        /// Comma-separated integers or fractions.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Check a Lipschitz weight by coefficient bound, projections and pair sampling.
    Lipschitz {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Fixed-coordinate samples per projected coordinate.
        #[arg(long, default_value_t = 4)]
        projection_samples: usize,
    },
    /// List residue roots at level K.
    Roots {
        /// Enumerate roots of the projection onto this 1-based coordinate.
        #[arg(long, requires = "fixed")]
        project: Option<usize>,
        /// Values of the other coordinates for --project.
        #[arg(long, allow_hyphen_values = true)]
        fixed: Option<String>,
    },
    /// Lift a residue root to a root modulo p^N.
    Lift {
        /// Start residue, one integer per variable.
        #[arg(long)]
        start: String,
        #[arg(long, default_value_t = 1)]
        l0: usize,
        /// N; defaults to --precision.
        #[arg(long)]
        target_precision: Option<usize>,
        /// 1-based coordinate to lift along.
        #[arg(long, conflicts_with = "auto_coordinate")]
        coordinate: Option<usize>,
        /// Pick a coordinate with a complete condition set at each level.
        #[arg(long)]
        auto_coordinate: bool,
    },
    /// Probe for failed exact divisions and, in one variable, residue well-definedness.
    Wellposed {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Sampled lifts per residue for the residue check.
        #[arg(long, default_value_t = 4)]
        lifts: usize,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::PrecisionExhausted { .. } | Error::IndexOutOfRange { .. } => 4,
        Error::InexactDivision { .. }
        | Error::UndefinedMStar(_)
        | Error::LogOfZero
        | Error::BoundViolated { .. }
        | Error::ReplayFailed(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.global, &cli.command) {
        Ok(outcome) => {
            match cli.global.format {
                Format::Json => println!("{}", outcome.json),
                Format::Text => print!("{}", outcome.text),
            }
            ExitCode::from(u8::from(outcome.negative))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

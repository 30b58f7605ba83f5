//! Command-line front end: generate instances, run policy experiments,
//! validate the implementation against its oracles, or answer tests
//! interactively.
//!
//! Exit codes: 0 success, 1 failed checks or runtime errors, 2 usage errors
//! (including hyperedge-cardinality overrides below the formula value).

mod generate;
mod interactive;
mod run;
mod validate;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Scalar arithmetic for weight computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArithMode {
    /// 64-bit floats with pinned tolerances.
    Float,
    /// Exact rationals; slower, zero tolerance.
    Rational,
}

#[derive(Parser)]
#[command(
    name = "drd",
    version,
    about = "Decision region determination: adaptive test selection by hyperedge cutting"
)]
struct Cli {
    /// Suppress informational output (results and prompts still print).
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create a synthetic instance file.
    Generate(generate::GenerateArgs),
    /// Run policies against an instance and export a results table.
    Run(run::RunArgs),
    /// Run the oracle validation suite over seeded random instances.
    Validate(validate::ValidateArgs),
    /// Answer the selected tests yourself at a terminal prompt.
    Interactive(interactive::InteractiveArgs),
}

/// Failures carry the exit code they should produce.
pub struct CmdError {
    pub code: u8,
    pub message: String,
}

impl CmdError {
    pub fn usage(message: impl Into<String>) -> Self {
        CmdError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        CmdError {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<drd::Error> for CmdError {
    fn from(e: drd::Error) -> Self {
        // A cardinality override below the formula is a misuse of flags, not
        // a failed computation.
        let code = match &e {
            drd::Error::CardinalityBelowFormula { .. } => 2,
            _ => 1,
        };
        CmdError {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => generate::cmd_generate(args, cli.quiet),
        Command::Run(args) => run::cmd_run(args, cli.quiet),
        Command::Validate(args) => validate::cmd_validate(args, cli.quiet),
        Command::Interactive(args) => interactive::cmd_interactive(args, cli.quiet),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

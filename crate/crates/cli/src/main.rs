//! `rearrange-lab` command-line front end.
//!
//! Exit codes: 0 success, 1 failed check, 2 usage or parse error,
//! 3 grid geometry error, 4 invariant violation during `converge`.

// NaN must fail these comparisons
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod check;
mod converge;
mod engine;
mod options;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::engine::Failure;
use crate::options::EngineKind;

#[derive(Parser)]
#[command(
    name = "rearrange-lab",
    version,
    about = "Polarizations and symmetric decreasing rearrangement"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Polarize a function across a halfspace or lattice involution.
    Polarize {
        #[command(flatten)]
        io: FileArgs,
        /// `nu=<±1 or angle>,d=<offset>`; `c=<int>` or `identity` for lattice
        /// files; `x=<s>`, `y=<s>`, `diag-up=<s>` or `diag-down=<s>` for an
        /// exact grid reflection.
        #[arg(long, visible_alias = "involution", allow_hyphen_values = true)]
        halfspace: String,
    },
    /// Symmetric decreasing rearrangement of a function.
    Rearrange {
        #[command(flatten)]
        io: FileArgs,
    },
    /// Run the iterated polarization scheme and write the convergence series.
    Converge(converge::ConvergeArgs),
    /// Run randomized property suites.
    Check(check::CheckArgs),
    /// Print the first halfspaces of the dyadic schedule.
    Schedule {
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        dim: u8,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
    },
}

#[derive(Args)]
struct FileArgs {
    #[arg(long)]
    input: PathBuf,
    /// Written to stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Overrides the engine inferred from the file header.
    #[arg(long, value_enum)]
    engine: Option<EngineKind>,
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Polarize { io, halfspace } => {
            let input = engine::load(&io.input, io.engine)?;
            let out = input.polarize(&halfspace)?;
            engine::emit(io.output.as_deref(), &out.to_text())?;
        }
        Command::Rearrange { io } => {
            let input = engine::load(&io.input, io.engine)?;
            engine::emit(io.output.as_deref(), &input.rearrange().to_text())?;
        }
        Command::Converge(args) => return converge::run(&args),
        Command::Check(args) => return check::run(&args),
        Command::Schedule { dim, rho, count } => {
            let schedule = rearrange_lab::Schedule::new(
                dim as usize,
                rho,
                rearrange_lab::ScheduleKind::FullDyadic,
            )
            .map_err(Failure::from)?;
            let mut text = String::new();
            for h in schedule.take(count as usize) {
                text.push_str(&h.to_string());
                text.push('\n');
            }
            engine::emit(None, &text)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}

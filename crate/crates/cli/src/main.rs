use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tulczyjew_cli::problem::parse_problem;
use tulczyjew_cli::report::{convention_hash, render, Format, CONVENTIONS};
use tulczyjew_cli::run::{run, Options, RunError};

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CALIBRATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "tulczyjew",
    version,
    about = "Exact verification of Lie algebroid bracket identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks of a problem file.
    Verify {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        /// Overrides the seed declared in the file.
        #[arg(long)]
        seed: Option<u64>,
        /// Base-degree bound for spanning sets and sampled base functions.
        #[arg(long)]
        degree_bound: Option<u32>,
        /// Randomized samples per check.
        #[arg(long)]
        samples: Option<usize>,
        /// Record wall-clock times (machine reports are then no longer reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Print the sign conventions and their hash.
    Conventions,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Conventions => {
            for c in CONVENTIONS {
                println!("{c}");
            }
            println!("hash {}", convention_hash());
            ExitCode::SUCCESS
        }
        Command::Verify {
            file,
            format,
            seed,
            degree_bound,
            samples,
            timing,
        } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", file.display());
                    return ExitCode::from(EXIT_INPUT);
                }
            };
            let problem = match parse_problem(&text) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {}:{e}", file.display());
                    return ExitCode::from(EXIT_INPUT);
                }
            };
            let opts = Options {
                seed,
                degree_bound,
                samples,
                timing,
            };
            match run(&problem, &text, &opts) {
                Ok(report) => {
                    let fmt = match format {
                        FormatArg::Text => Format::Text,
                        FormatArg::Machine => Format::Machine,
                    };
                    print!("{}", render(&report, fmt));
                    if report.passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_FAIL)
                    }
                }
                Err(RunError::Input(e)) => {
                    eprintln!("error: {}:{e}", file.display());
                    ExitCode::from(EXIT_INPUT)
                }
                Err(e @ RunError::Calibration { .. }) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_CALIBRATION)
                }
            }
        }
    }
}

//! `wa-lab`: command-line front end. Every command prints one JSON object on
//! stdout. Exit codes: 0 completed, 1 usage or input error, 2 resource
//! exhaustion.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "wa-lab", version, about = "Exact analysis of rational weighted automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: GlobalOpts,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// How pumpability is decided.
    #[arg(long, value_enum, default_value_t = Method::Auto, global = true)]
    method: Method,
    #[arg(long, default_value_t = 3, global = true)]
    max_u: usize,
    #[arg(long, default_value_t = 3, global = true)]
    max_v: usize,
    #[arg(long, default_value_t = 3, global = true)]
    max_w: usize,
    /// Discovered-state budget for zeroness (default 2000000, or WA_LAB_BUDGET).
    #[arg(long, global = true)]
    state_budget: Option<usize>,
    /// Recorded in the report; no command is randomized.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Exact,
    Falsify,
    Auto,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Value of WORD.
    Eval { file: PathBuf, word: String },
    /// Whether the automaton maps every word to zero.
    Zero { file: PathBuf },
    /// Whether two automata compute the same function.
    Equiv { file1: PathBuf, file2: PathBuf },
    /// Ambiguity class.
    Classify { file: PathBuf },
    /// Restriction to useful states.
    Trim { file: PathBuf },
    /// Nonnegative-transition and/or integer-weight form.
    Normalize {
        file: PathBuf,
        #[arg(long)]
        nonneg: bool,
        #[arg(long)]
        integerize: bool,
    },
    /// Whether M(WORD) is p-triangular.
    Triangular { file: PathBuf, word: String },
    /// Twin property of an unambiguous automaton.
    Twin { file: PathBuf },
    /// Pumpability.
    Pumpable { file: PathBuf },
    /// Blind pumpability.
    BlindPumpable { file: PathBuf },
    /// Whether an equivalent unambiguous automaton exists.
    DecideUnamb { file: PathBuf },
    /// Whether an equivalent deterministic automaton exists.
    DecideDet { file: PathBuf },
    /// Prime divisors of values on short words.
    PrimeProbe {
        file: PathBuf,
        #[arg(long)]
        max_len: usize,
    },
    /// Evaluation by streaming depumping.
    DepumpEval {
        file: PathBuf,
        word: String,
        #[arg(long)]
        window: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli.command, &cli.opts) {
        Ok(report) => {
            println!("{report}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("wa-lab: {}", failure.message);
            println!("{}", json!({"error": {"kind": failure.kind, "message": failure.message}}));
            ExitCode::from(failure.code)
        }
    }
}

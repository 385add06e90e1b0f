//! `scilla-mc`: check, simulate, verify and network-run contracts.
//!
//! Exit codes:
//!
//! | code | meaning                                              |
//! |------|------------------------------------------------------|
//! | 0    | success; for `verify`, the property holds            |
//! | 1    | `verify`: the property is violated                  |
//! | 2    | the contract does not parse (also clap usage errors) |
//! | 3    | the contract fails the static checks                 |
//! | 4    | a JSON input is malformed or does not fit            |
//! | 5    | `verify`: inconclusive                               |
//! | 6    | `verify`: unknown or ill-formed predicate            |
//! | 10   | a file could not be read or written                  |

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "scilla-mc", version, about = "Interpreter and bounded model checker for a Scilla contract subset")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a contract and run the static checks.
    Check {
        contract: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a schedule against a contract and write the trace.
    Simulate(SimulateArgs),
    /// Check a property over a bounded schedule space.
    Verify(VerifyArgs),
    /// Run several contracts that call each other, starting from one message.
    Network(NetworkArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// How a contract is deployed.
#[derive(Args, Debug, Clone)]
pub struct Deploy {
    contract: PathBuf,
    /// JSON object of contract parameters, e.g. `{"owner":"A0","goal":100}`.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Address of the contract.
    #[arg(long, default_value = "C")]
    id: String,
    /// Initial balance.
    #[arg(long, default_value_t = 0)]
    balance: u64,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    deploy: Deploy,
    /// Schedule file: an array of elements, or a witness file with `start`.
    #[arg(long)]
    schedule: PathBuf,
    /// Where to write the trace (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    deploy: Deploy,
    /// Builtin property: balance_backed, donated, donation_preserved, can_claim_back.
    #[arg(long, conflicts_with = "expr", required_unless_present = "expr")]
    prop: Option<String>,
    /// State predicate to check as a safety property.
    #[arg(long)]
    expr: Option<String>,
    /// Alphabet file; defaults to the standard crowdfunding alphabet.
    #[arg(long)]
    alphabet: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Check one step from sampled states instead of exploring from the initial state.
    #[arg(long)]
    inductive: bool,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    /// Sampling seed; SCILLA_MC_SEED is used when absent.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "A1")]
    backer: String,
    #[arg(long, default_value = "5")]
    amount: String,
    /// Reach depth for donation_preserved (defaults to --depth).
    #[arg(long)]
    reach_depth: Option<usize>,
    /// Continuation depth for donation_preserved (defaults to --depth).
    #[arg(long)]
    cont_depth: Option<usize>,
    /// Where to write the witness of a violation.
    #[arg(long, default_value = "witness.json")]
    out: PathBuf,
    /// Worker threads for exhaustive safety checks.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
pub struct NetworkArgs {
    /// `ID,CONTRACT[,PARAMS]`; repeat for each contract.
    #[arg(long = "node", required = true)]
    nodes: Vec<String>,
    /// Plain account address; repeat for each account.
    #[arg(long = "account")]
    accounts: Vec<String>,
    /// JSON file holding the initial message.
    #[arg(long)]
    message: PathBuf,
    /// Maximum number of contract steps.
    #[arg(long, default_value_t = 1000)]
    budget: u64,
    /// Block number seen by every step.
    #[arg(long, default_value_t = 1)]
    block: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { contract, format } => commands::check(&contract, format),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Network(a) => commands::network(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

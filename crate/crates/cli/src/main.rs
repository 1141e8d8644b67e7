//! `multex` — run controlled programs bare or under an enforcement policy,
//! check information-flow properties on bounded inputs, enumerate
//! scheduler interleavings, and replay recorded traces.

mod commands;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit code for load/usage failures (bad files, unknown names).
pub const EXIT_LOAD_ERROR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "multex",
    version,
    about = "Multi-execution runtime enforcement of information-flow policies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a program, bare (`--policy none`) or enforced.
    Run(RunArgs),
    /// Check a property (tini, tsni, ri, di) by bounded enumeration.
    Check(CheckArgs),
    /// Enumerate all scheduler interleavings of an enforced run.
    Explore(ExploreArgs),
    /// Re-execute a recorded trace and confirm it reproduces exactly.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct InputsArgs {
    /// Program file (.ifc).
    #[arg(long)]
    program: PathBuf,
    /// Channel environment file.
    #[arg(long)]
    channels: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    inputs: InputsArgs,
    /// Input trace file (`CHANNEL=VALUE` lines or a JSON array).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Policy: a shipped name (ni, ri, di, subdi), a policy file path, or
    /// `none` for a bare run.
    #[arg(long, default_value = "none")]
    policy: String,
    /// Scheduler: lowest, round-robin, or random (with --seed).
    #[arg(long, default_value = "lowest")]
    scheduler: String,
    /// Seed for the random scheduler (implies --scheduler random).
    #[arg(long)]
    seed: Option<u64>,
    /// Step budget. Defaults to $MULTEX_BUDGET or 100000.
    #[arg(long)]
    budget: Option<u64>,
    /// Write the trace document here.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Render the time-by-channel tables.
    #[arg(long)]
    pretty: bool,
    /// Print the schedule, one transition per line.
    #[arg(long)]
    emit_schedule: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    inputs: InputsArgs,
    /// Property to check: tini, tsni, ri, or di.
    #[arg(long)]
    property: String,
    /// Maximum input-queue length (K).
    #[arg(long, default_value_t = 3)]
    max_len: usize,
    /// Alphabet for integer channels, comma separated.
    #[arg(long, default_value = "0,1")]
    alphabet: String,
    /// Step budget per run. Defaults to $MULTEX_BUDGET or 10000.
    #[arg(long)]
    budget: Option<u64>,
    /// Per-channel length cap on deletion-of-inputs corrections.
    #[arg(long)]
    di_strict: bool,
    /// Abort with an inconclusive verdict after this many runs.
    #[arg(long)]
    max_cases: Option<u64>,
    /// Where to write the witness on violation.
    #[arg(long, default_value = "witness.json")]
    witness: PathBuf,
    /// Write the full report document here.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExploreArgs {
    #[command(flatten)]
    inputs: InputsArgs,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Policy name or file (bare exploration is not meaningful).
    #[arg(long)]
    policy: String,
    /// Maximum transitions per schedule.
    #[arg(long)]
    depth: u64,
    /// Cap on distinct configurations to visit.
    #[arg(long, default_value_t = 1_000_000)]
    max_states: usize,
    /// Write the class report here.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    /// Trace document produced by `run`.
    #[arg(long)]
    trace: PathBuf,
    /// Step budget override.
    #[arg(long)]
    budget: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => commands::cmd_run(args),
        Command::Check(args) => commands::cmd_check(args),
        Command::Explore(args) => commands::cmd_explore(args),
        Command::Replay(args) => commands::cmd_replay(args),
    };
    match code {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_LOAD_ERROR)
        }
    }
}

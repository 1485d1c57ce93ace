//! `ekelab` — drive the key-exchange laboratory from the command line.
//!
//! Subcommands: `run` a protocol session, `attack` a captured transcript,
//! `mitm` a no-key exchange, `margin` the physical cost model.
//!
//! Exit codes: 0 ok, 2 configuration error, 3 protocol abort, 4 attack
//! expectation violated, 5 reference-number check failed.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ekelab::Scalar;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn abort(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }

    pub fn expectation(message: impl Into<String>) -> Self {
        Self {
            code: 4,
            message: message.into(),
        }
    }

    pub fn paper_check(message: impl Into<String>) -> Self {
        Self {
            code: 5,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "ekelab", version, about = "password-based key-exchange laboratory")]
struct Cli {
    /// JSON scenario configuration; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for transcripts and reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Master scenario seed; all randomness derives from it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for attack enumeration.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one honest two-party session and capture its transcript.
    Run(RunArgs),
    /// Run a password-guessing attack against a captured transcript.
    Attack(AttackArgs),
    /// Interpose on a no-key exchange as an active middle man.
    Mitm(MitmArgs),
    /// Evaluate the physical cost model and minimum password length.
    Margin(MarginArgs),
}

#[derive(Args, Debug, Clone)]
struct ProtocolArgs {
    /// Protocol variant: simplified-eke, generic-eke, dh-eke, enhanced-eke,
    /// a-eke, nokey, enc-nokey.
    #[arg(long)]
    variant: Option<String>,

    /// DH-EKE only: password-wrap the first flow too.
    #[arg(long)]
    encrypt_first_flow: bool,

    /// Derive a fresh prime group of this many bits (needs --seed).
    #[arg(long)]
    bits: Option<u32>,

    /// Inline prime modulus (with --g).
    #[arg(long)]
    q: Option<Scalar>,

    /// Inline generator (with --q).
    #[arg(long)]
    g: Option<Scalar>,

    /// Literal password.
    #[arg(long)]
    password: Option<String>,

    /// Draw the password from the 2^bits exhaustive space.
    #[arg(long)]
    password_bits: Option<u32>,

    /// Challenge and key-share length in bytes.
    #[arg(long)]
    challenge_bytes: Option<usize>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,

    /// Pin the transmitted key of the no-key protocols.
    #[arg(long)]
    key: Option<Scalar>,

    /// Pin the initiator's secret exponent.
    #[arg(long = "a")]
    exponent_a: Option<Scalar>,

    /// Pin the responder's secret exponent.
    #[arg(long = "b")]
    exponent_b: Option<Scalar>,
}

#[derive(Args, Debug)]
struct AttackArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,

    /// Captured transcript (JSON Lines). Session metadata is read from the
    /// sibling outcome.json unless overridden.
    #[arg(long)]
    transcript: PathBuf,

    /// Exhaustive candidate space of this many bits.
    #[arg(long)]
    space_bits: Option<u32>,

    /// Newline-delimited UTF-8 dictionary file.
    #[arg(long)]
    dictionary: Option<PathBuf>,

    /// Expectation: recover | no-recover | full-space.
    #[arg(long)]
    expect: Option<String>,

    /// Session id override (defaults to the sibling outcome.json).
    #[arg(long)]
    session_id: Option<u64>,

    /// Enhanced EKE: hex of the known old session key S (defaults to the
    /// sibling outcome.json).
    #[arg(long)]
    known_s: Option<String>,

    /// Enhanced EKE: size of the stage-1 key space.
    #[arg(long)]
    key_space_bits: Option<u32>,
}

#[derive(Args, Debug)]
struct MitmArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,

    /// The interceptor's exponent (defaults to a seeded unit mod q-1).
    #[arg(long)]
    eve_exponent: Option<Scalar>,

    /// Sanity inversion: hand the interceptor the shared password.
    #[arg(long)]
    give_eve_password: bool,
}

#[derive(Args, Debug)]
struct MarginArgs {
    /// Built-in profile (universal, ion-trap, ion-trap-literal) or a path to
    /// a profile JSON.
    #[arg(long)]
    profile: Option<String>,

    /// Number of machines the adversary runs.
    #[arg(long)]
    computers: Option<f64>,

    /// "earth": bound the fleet by Earth's surface over the footprint.
    #[arg(long)]
    fleet: Option<String>,

    /// Attack horizon in seconds (default: 100 years as 2^32).
    #[arg(long)]
    horizon_seconds: Option<u64>,

    /// Oracle calls the protocol costs per password guess (1 or 2).
    #[arg(long)]
    dlogs_per_guess: Option<u32>,

    /// Floor space per machine, m^2.
    #[arg(long)]
    footprint_m2: Option<f64>,

    /// Gate time override, decimal seconds (e.g. 2.85e-4).
    #[arg(long)]
    gate_time: Option<String>,

    /// Serial gate count override.
    #[arg(long)]
    serial_gates: Option<u64>,

    /// Assert the reference conclusions (40/68/88 bits, 2^38 and 2^66
    /// budgets); exits 5 on any mismatch.
    #[arg(long)]
    check_paper: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = dispatch(&cli);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let file = config::FileConfig::load(cli.config.as_deref())?;
    let ctx = commands::Ctx {
        file,
        out_dir: cli.out.clone(),
        seed: cli.seed,
        workers: cli.workers,
    };
    match &cli.command {
        Command::Run(args) => commands::cmd_run(&ctx, args),
        Command::Attack(args) => commands::cmd_attack(&ctx, args),
        Command::Mitm(args) => commands::cmd_mitm(&ctx, args),
        Command::Margin(args) => commands::cmd_margin(&ctx, args),
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod serve;

/// Exit statuses shared by every subcommand.
pub mod status {
    pub const OK: u8 = 0;
    pub const INPUT: u8 = 1;
    pub const BLOCKING: u8 = 2;
    pub const RUNTIME: u8 = 3;
}

/// Supervisory control synthesis and the multicopter failsafe engine.
#[derive(Debug, Parser)]
#[command(name = "sctkit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a supervisor and write it as `.aut` and `.sup`.
    Synth(SynthArgs),
    /// Check properties of an automaton.
    Check(CheckArgs),
    /// Replay a scenario file through a transition matrix.
    Run(RunArgs),
    /// Serve a live decision session over HTTP.
    Serve(ServeArgs),
    /// Write the bundled plant, specifications and examples as `.aut` files.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Plant automaton; the bundled multicopter plant when omitted.
    #[arg(long, requires = "spec")]
    pub plant: Option<PathBuf>,
    /// Specification automaton or a directory of them; repeatable.
    #[arg(long, conflicts_with = "example")]
    pub spec: Vec<PathBuf>,
    /// Use the bundled specification set of a blocking example (1-3).
    #[arg(long, conflicts_with = "plant")]
    pub example: Option<usize>,
    /// Output path stem; `.aut` and `.sup` are appended.
    #[arg(long, default_value = "supervisor")]
    pub out: PathBuf,
    /// Also write the unsupervised closed loop (plant composed with the
    /// specification) for inspection with `check`.
    #[arg(long, value_name = "PATH")]
    pub closed_loop: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub automaton: PathBuf,
    #[arg(long)]
    pub nonblocking: bool,
    /// Plant to check controllability against.
    #[arg(long, value_name = "PLANT")]
    pub controllable_against: Option<PathBuf>,
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub sup: PathBuf,
    /// JSON array of frames.
    pub scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    pub sup: PathBuf,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Decision period, seconds.
    #[arg(long, default_value_t = sctkit::runtime::DEFAULT_DELTA)]
    pub delta: f64,
    /// Sensing interval, seconds.
    #[arg(long, default_value_t = sctkit::runtime::DEFAULT_DETECT_INTERVAL)]
    pub detect_interval: f64,
    /// Where the full decision log is written on shutdown.
    #[arg(long, default_value = "session-log.json")]
    pub log: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, default_value = "model")]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SCTKIT_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => commands::synth(&a),
        Command::Check(a) => commands::check(&a),
        Command::Run(a) => commands::run(&a),
        Command::Serve(a) => serve::serve(&a),
        Command::Export(a) => commands::export(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(status::INPUT)
        }
    }
}

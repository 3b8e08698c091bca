//! `hpwin`: play the hyperplane-potential game, check the lemma suites,
//! trace systoles along the diagonal flow and scan tube coverage.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hpwin_core::adversary::BobKind;
use hpwin_core::lemmas::Suite;
use hpwin_core::strategy::Mode;

use crate::config::{CommandName, RunConfig};

/// Exit statuses besides 0 (success) and 2 (bad usage or config).
pub mod exit {
    /// A move was illegal, a suite trial failed, or a systole row failed.
    pub const FAILURE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const BUDGET: u8 = 3;
    pub const PRECISION: u8 = 4;
    pub const IO: u8 = 5;
}

#[derive(Parser, Debug)]
#[command(name = "hpwin", version, about = "Certified hyperplane-potential game toolkit")]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides HPWIN_OUT_DIR and the config).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Bit cap for certified comparisons.
    #[arg(long, global = true)]
    precision_cap: Option<u32>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Play Alice's strategy against a Bob adversary.
    Play(PlayArgs),
    /// Run a randomized lemma suite.
    Verify(VerifyArgs),
    /// Shortest-vector length along the diagonal flow.
    Systole(SystoleArgs),
    /// Grid scan of tube coverage at a fixed z.
    Scan(ScanArgs),
}

#[derive(Args, Debug, Default)]
pub struct PlayArgs {
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = parse_bob_kind)]
    pub bob: Option<BobKind>,
    /// Bob replays the balls of this transcript.
    #[arg(long)]
    pub replay: Option<PathBuf>,
    /// Largest denominator any enumeration may reach.
    #[arg(long)]
    pub q_max: Option<u64>,
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    #[arg(long)]
    pub audit: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct VerifyArgs {
    #[arg(long, value_parser = parse_suite)]
    pub suite: Option<Suite>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct SystoleArgs {
    #[arg(long)]
    pub lambda: Option<String>,
    /// `x,y,z` as rationals.
    #[arg(long)]
    pub point: Option<String>,
    #[arg(long)]
    pub t_max: Option<String>,
    #[arg(long)]
    pub steps: Option<u32>,
    #[arg(long)]
    pub bits: Option<u32>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct ScanArgs {
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub z: Option<String>,
    /// `lo,hi`
    #[arg(long)]
    pub x: Option<String>,
    /// `lo,hi`
    #[arg(long)]
    pub y: Option<String>,
    #[arg(long)]
    pub nx: Option<u32>,
    #[arg(long)]
    pub ny: Option<u32>,
    #[arg(long)]
    pub q_max: Option<u64>,
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long)]
    pub cell_budget: Option<u64>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "certified" => Ok(Mode::Certified),
        "demo" => Ok(Mode::Demo),
        _ => Err(format!("expected certified or demo, got {s:?}")),
    }
}

fn parse_bob_kind(s: &str) -> Result<BobKind, String> {
    match s {
        "random" => Ok(BobKind::Random),
        "greedy_cusp" => Ok(BobKind::GreedyCusp),
        "replay" => Ok(BobKind::Replay),
        _ => Err(format!("expected random, greedy_cusp or replay, got {s:?}")),
    }
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: hpwin_core::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(p) => match RunConfig::load(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("hpwin: {e:#}");
                return ExitCode::from(exit::USAGE);
            }
        },
        None => RunConfig::default(),
    };
    let cap = cli
        .precision_cap
        .or_else(|| cfg.budget.as_ref().and_then(|b| b.precision_cap));
    if let Some(bits) = cap {
        hpwin_core::arith::set_default_precision_cap(bits);
    }
    let out_dir = cfg.out_dir(cli.out_dir.as_deref());

    let command = match cli.command {
        Some(c) => c,
        None => match cfg.command {
            Some(CommandName::Play) => Command::Play(PlayArgs::default()),
            Some(CommandName::Verify) => Command::Verify(VerifyArgs::default()),
            Some(CommandName::Systole) => Command::Systole(SystoleArgs::default()),
            Some(CommandName::Scan) => Command::Scan(ScanArgs::default()),
            None => {
                eprintln!("hpwin: no command given on the command line or in the config");
                return ExitCode::from(exit::USAGE);
            }
        },
    };
    let result = match command {
        Command::Play(a) => commands::play(&cfg, &a, &out_dir),
        Command::Verify(a) => commands::verify(&cfg, &a, &out_dir),
        Command::Systole(a) => commands::systole(&cfg, &a, &out_dir),
        Command::Scan(a) => commands::scan(&cfg, &a, &out_dir),
    };
    match result {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("hpwin: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}

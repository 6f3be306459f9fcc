mod commands;
mod config;
mod csvio;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use otfs_core::GridShape;

use crate::commands::Direction;
use crate::config::RunConfig;
use crate::error::CliError;

/// Zak-transform OTFS toolkit: transforms, spread maps, channel simulation and
/// OFDM overlay checks. Outputs are deterministic CSV and JSON files.
#[derive(Parser)]
#[command(name = "otfs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: config `out`, then $OTFS_OUT_DIR, then `.`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with code 3 when a numerical contract is violated.
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a DZT, IDZT, ISFFT or SFFT to a CSV file.
    Transform {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        #[arg(short = 'K', long = "doppler-bins")]
        k: usize,
        #[arg(short = 'L', long = "delay-bins")]
        l: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// DD spread map of a single probe symbol, plus the Doppler kernel.
    Spread(RunArgs),
    /// Transmit, pass through the channel and receive one frame.
    Simulate(RunArgs),
    /// Biorthogonality and equivalence checks for the OFDM overlay.
    OverlayCheck(RunArgs),
}

fn output_dir(flag: Option<PathBuf>, config: Option<&Path>) -> Result<PathBuf, CliError> {
    let dir = flag
        .or_else(|| config.map(Path::to_path_buf))
        .or_else(|| std::env::var_os("OTFS_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn load(args: &RunArgs) -> Result<(RunConfig, PathBuf), CliError> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = output_dir(args.out.clone(), cfg.out.as_deref())?;
    Ok((cfg, out))
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    match cli.command {
        Command::Transform {
            input,
            direction,
            k,
            l,
            out,
        } => {
            let shape = GridShape::new(k, l)?;
            commands::transform(&input, direction, shape, &output_dir(out, None)?)
        }
        Command::Spread(args) => {
            let (cfg, out) = load(&args)?;
            commands::spread(&cfg, &out)
        }
        Command::Simulate(args) => {
            let (cfg, out) = load(&args)?;
            commands::simulate(&cfg, &out, args.strict)
        }
        Command::OverlayCheck(args) => {
            let (cfg, out) = load(&args)?;
            commands::overlay_check(&cfg, &out, args.strict)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use monowave::forward::{ContrastSpec, ForwardError, Shape};
use monowave::mono::{Direction, MonoError};
use monowave::recon::{run_reconstruction, ReconConfig, ReconError};
use monowave::theory::theory_report;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 1;

#[derive(Parser)]
#[command(name = "monowave", version, about = "Monotonicity-method defect reconstruction in an open waveguide")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep test squares and write the indicator map.
    Reconstruct(ReconstructArgs),
    /// Print the finite-dimensional theory checks as JSON.
    TheoryCheck,
}

#[derive(clap::Args)]
struct ReconstructArgs {
    /// JSON configuration file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Wavenumber.
    #[arg(long)]
    k: Option<f64>,
    /// Weight of the probe term.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum)]
    direction: Option<DirectionArg>,
    /// Sampling grid size M (M×M squares).
    #[arg(long)]
    grid: Option<usize>,
    /// Worker threads for the sweep (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Output prefix: writes <out>.csv, <out>.pgm and <out>.json.
    /// Without it the CSV goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Load near-field data instead of synthesizing it.
    #[arg(long)]
    nearfield_in: Option<PathBuf>,
    /// Save the (synthesized or loaded) near-field data.
    #[arg(long)]
    nearfield_out: Option<PathBuf>,
    /// Synthesize from a built-in defect (amplitude 1).
    #[arg(long, value_enum)]
    shape: Option<ShapeArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Inside,
    Outside,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    /// Disk of radius 0.2 at (0.5, 0.5).
    Disk,
    /// Ellipse with semi-axes (0.15, 0.3) at (0.5, 0.6).
    Ellipse,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Reconstruct(args) => reconstruct(args),
        Command::TheoryCheck => match theory_report() {
            Ok(report) => {
                println!("{}", serde_json::to_string(&report).expect("report serializes"));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_NUMERICAL)
            }
        },
    }
}

fn reconstruct(args: ReconstructArgs) -> ExitCode {
    let config = match build_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run_reconstruction(&config) {
        Ok(map) => {
            if config.out.is_none() {
                print!("{}", map.to_csv());
            }
            eprintln!(
                "{}x{} indicator map, values {}..={} (d = {}), config {}",
                map.m(),
                map.m(),
                map.values().iter().min().unwrap_or(&0),
                map.values().iter().max().unwrap_or(&0),
                map.d(),
                &config.hash()[..12]
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn build_config(args: ReconstructArgs) -> Result<ReconConfig, ReconError> {
    let mut config = match &args.config {
        Some(path) => ReconConfig::load(path)?,
        None => ReconConfig::from_json(r#"{"k": 5.0, "alpha": 10.0}"#)?,
    };
    if let Some(k) = args.k {
        config.k = k;
    }
    if let Some(alpha) = args.alpha {
        config.alpha = alpha;
    }
    if let Some(d) = args.direction {
        config.direction = match d {
            DirectionArg::Inside => Direction::Inside,
            DirectionArg::Outside => Direction::Outside,
        };
    }
    if let Some(m) = args.grid {
        config.sampling.grid = m;
    }
    if args.threads.is_some() {
        config.threads = args.threads;
    }
    if args.out.is_some() {
        config.out = args.out;
    }
    if args.nearfield_out.is_some() {
        config.near_field_out = args.nearfield_out;
    }
    if let Some(shape) = args.shape {
        let shape = match shape {
            ShapeArg::Disk => Shape::benchmark_disk(),
            ShapeArg::Ellipse => Shape::benchmark_ellipse(),
        };
        config.contrast = Some(ContrastSpec::new(shape, 1.0)?);
        config.near_field_in = None;
    }
    if let Some(path) = args.nearfield_in {
        config.near_field_in = Some(path);
        config.contrast = None;
    }
    config.validate()?;
    Ok(config)
}

fn exit_code(e: &ReconError) -> u8 {
    match e {
        ReconError::Config(_) | ReconError::MetadataMismatch(_) | ReconError::Json(_) => EXIT_CONFIG,
        ReconError::Io(_) | ReconError::Format(_) => EXIT_IO,
        ReconError::Forward(f) => match f {
            ForwardError::SingularSystem(_) | ForwardError::Linalg(_) => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        },
        ReconError::Mono(MonoError::Linalg(_)) => EXIT_NUMERICAL,
        ReconError::Mono(_) => EXIT_CONFIG,
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use relaycf_cli::{run, CliError, ModeOverride, RunOptions, Scenario};
use relaycf_core::REGION_EQ_TOL;

/// Achievable rate regions and sum rates for relay channels.
#[derive(Debug, Parser)]
#[command(name = "relaycf", version)]
struct Args {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,

    /// Output directory (default: the scenario's `out`, else `./out`).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Number of log-spaced σ² grid points.
    #[arg(long)]
    grid_points: Option<usize>,

    /// Also write the convex hull of each region.
    #[arg(long)]
    hull: bool,

    /// Containment tolerance in bits.
    #[arg(long, default_value_t = REGION_EQ_TOL, allow_negative_numbers = true)]
    tol: f64,

    /// Run a region or conditions scenario in the other of the two modes.
    #[arg(long, value_enum)]
    mode: Option<ModeOverride>,
}

fn execute(args: &Args) -> Result<Vec<PathBuf>, CliError> {
    let mut scenario = Scenario::load(&args.scenario)?;
    if let Some(mode) = args.mode {
        scenario = scenario.with_mode(mode)?;
    }
    if let Some(n) = args.grid_points {
        scenario.set_grid_points(n);
    }
    let opts = RunOptions {
        out: args.out.clone(),
        hull: args.hull,
        tol: args.tol,
    };
    let base = args.scenario.parent().unwrap_or(Path::new("."));
    let stem = args
        .scenario
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into());
    run(&scenario, &opts, base, &stem)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

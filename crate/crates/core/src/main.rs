use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hybridsim::config::Params;
use hybridsim::scenario::{run_scenario, OutputFormat, Scenario, ScenarioConfig, Verdict, OUT_DIR_ENV};
use hybridsim::Error;

/// Hybrid trapped-ion / charge-qubit simulator.
#[derive(Debug, Parser)]
#[command(name = "hybridsim", version)]
struct Cli {
    /// gate_fidelity, gate_time, noise_echo, dissipation, switch, balance or report_all
    scenario: String,

    /// Flat `key = value unit` parameter file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override one parameter, e.g. `--set "C_m=2e-16 F"`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Comma-separated seed list for randomized scenarios.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,

    /// Output directory (default: $HYBRIDSIM_OUT, then ./hybridsim-out).
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, default_value = "both")]
    format: String,

    /// Worker threads (default: hardware threads).
    #[arg(long)]
    workers: Option<usize>,
}

fn build_config(cli: Cli) -> Result<ScenarioConfig, Error> {
    let scenario: Scenario = cli.scenario.parse()?;
    let format: OutputFormat = cli.format.parse()?;
    let mut params = match &cli.config {
        Some(path) => Params::load(path)?,
        None => Params::default(),
    };
    for o in &cli.overrides {
        params.apply_override(o)?;
    }
    params.validate()?;
    let output_dir = cli
        .out
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("hybridsim-out"));
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(Error::Config { line: 0, message: "--workers must be at least 1".into() });
    }
    Ok(ScenarioConfig { scenario, params, seeds: cli.seeds, output_dir, format, workers })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let config = match build_config(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("hybridsim: {e}");
            return ExitCode::from(2);
        }
    };
    match run_scenario(&config) {
        Ok(manifest) => {
            for c in &manifest.summary {
                let tag = match c.verdict {
                    Verdict::Pass => "PASS",
                    Verdict::Fail => "FAIL",
                    Verdict::Info => "INFO",
                };
                println!("{tag} {}: {:e} (expected {}, {})", c.claim, c.reproduced, c.expected, c.tolerance);
            }
            if manifest.all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e @ Error::Config { .. }) => {
            eprintln!("hybridsim: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("hybridsim: {e}");
            ExitCode::from(1)
        }
    }
}

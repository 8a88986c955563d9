//! Command-line front end: analyze a single market or sweep a parameter.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cournot_core::analysis::{run_analyze, run_sweep, AnalysisConfig, SweepParam};
use cournot_core::Error;

const EXIT_CODE_HELP: &str = "Exit codes:
  0  success
  2  configuration or parameter error
  3  market assumption violated (mean demand must exceed marginal cost)
  4  quadrature failed to converge
  5  numeric evaluation error (out of support, zero survival, missing density)
  6  inconsistent shape verdicts
  7  io error";

#[derive(Parser)]
#[command(
    name = "cournot",
    version,
    about = "Analyze symmetric Cournot markets with stochastic demand",
    after_help = EXIT_CODE_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one full analysis: shape classification, equilibria, uniqueness
    /// certificate, log-concavity check, and (optionally) numeric oracles.
    Analyze {
        /// JSON configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Write the JSON report here (overrides the config; default stdout).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the diagnostic scan grid as CSV (overrides the config).
        #[arg(long)]
        grid_csv: Option<PathBuf>,
        /// Seed for the oracle RNG (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
        /// Run the Monte Carlo / dynamics / identity oracles even if the
        /// config does not request them.
        #[arg(long)]
        oracles: bool,
    },
    /// Re-run the analysis across a list of parameter values, emitting CSV.
    Sweep {
        /// JSON configuration file providing the base market.
        #[arg(long)]
        config: PathBuf,
        /// Parameter to vary: n, c, or scale.
        #[arg(long)]
        param: String,
        /// Comma-separated parameter values.
        #[arg(long)]
        values: String,
        /// Write the CSV here (default stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Analyze { config, report, grid_csv, seed, oracles } => {
            let mut cfg = AnalysisConfig::from_json_file(&config)?;
            if let Some(path) = report {
                cfg.outputs.report_path = Some(path);
            }
            if let Some(path) = grid_csv {
                cfg.outputs.grid_csv_path = Some(path);
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if oracles {
                cfg.run_oracles = true;
            }
            let to_stdout = cfg.outputs.report_path.is_none();
            let outcome = run_analyze(&cfg)?;
            if to_stdout {
                print!("{}", outcome.report_json);
            }
            Ok(())
        }
        Command::Sweep { config, param, values, out } => {
            let cfg = AnalysisConfig::from_json_file(&config)?;
            let param: SweepParam = param.parse()?;
            let values = parse_values(&values)?;
            let csv = run_sweep(&cfg, param, &values)?;
            match out {
                Some(path) => std::fs::write(path, csv.as_bytes())?,
                None => print!("{csv}"),
            }
            Ok(())
        }
    }
}

fn parse_values(text: &str) -> Result<Vec<f64>, Error> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::ConfigParse("sweep needs at least one value".into()));
    }
    trimmed
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>()
                .map_err(|_| Error::ConfigParse(format!("cannot parse sweep value '{tok}'")))
        })
        .collect()
}

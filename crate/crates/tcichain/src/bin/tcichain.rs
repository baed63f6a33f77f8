//! Command-line front end: `run` executes a JSON experiment config and
//! writes artifacts plus a manifest; `validate` reports defaults and
//! violations without executing. Failures print a machine-readable JSON
//! report to stderr and exit nonzero.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use tcichain::experiment::{run, validate, ExperimentConfig};

#[derive(Parser)]
#[command(name = "tcichain", version, about = "Tricritical Ising chain simulation runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the configured task and write its artifacts
    Run {
        /// Experiment config (JSON)
        #[arg(long)]
        config: PathBuf,
        /// Override the master seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report defaulted fields and constraint violations, without running
    Validate {
        /// Experiment config (JSON)
        #[arg(long)]
        config: PathBuf,
    },
}

// a consumer closing the pipe early is not our error
fn emit_out(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn emit_err(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stderr(), "{text}");
}

fn fail(kind: &str, detail: serde_json::Value) -> ExitCode {
    emit_err(&json!({ "error": kind, "detail": detail }).to_string());
    ExitCode::from(2)
}

fn load(path: &PathBuf) -> Result<ExperimentConfig, ExitCode> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail("config-io", json!(format!("{}: {e}", path.display()))))?;
    ExperimentConfig::from_json(&text).map_err(|e| fail("config-parse", json!(e.to_string())))
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, seed, out } => {
            let mut cfg = match load(&config) {
                Ok(cfg) => cfg,
                Err(code) => return code,
            };
            if let Some(seed) = seed {
                cfg.sampling.seed = Some(seed);
            }
            if let Some(out) = out {
                cfg.output = Some(out);
            }
            let report = validate(&cfg);
            if !report.is_ok() {
                return fail("invalid-config", json!(report.violations));
            }
            match run(&cfg) {
                Ok(manifest) => {
                    emit_out(&serde_json::to_string_pretty(&manifest).expect("manifest serializes"));
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    emit_err(&json!({ "error": "run-failed", "detail": e.to_string() }).to_string());
                    ExitCode::FAILURE
                }
            }
        }
        Command::Validate { config } => {
            let cfg = match load(&config) {
                Ok(cfg) => cfg,
                Err(code) => return code,
            };
            let report = validate(&cfg);
            emit_out(&serde_json::to_string_pretty(&report).expect("report serializes"));
            ExitCode::SUCCESS
        }
    }
}

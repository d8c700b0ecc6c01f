//! `balayage`: batch front-end for cleaning schedules, balayage, the
//! verifier suites, cloud classification, the converse battery and the
//! example gallery.
//!
//! Every output embeds the SHA-256 digest of the effective configuration
//! and the seed.  Exit codes: 0 success, 2 contract error, 3 a procedure
//! that did not converge within its budget.

mod commands;
mod config;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;
use failure::{Failure, EXIT_OK};

#[derive(Parser)]
#[command(name = "balayage", version, about = "Cleaning operators, balayage and cloud algebra experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a cleaning schedule and emit its convergence trace (CSV).
    Clean(Common),
    /// Compute the balayage matrix with a certified tail bound (JSON).
    Balayage(Common),
    /// Run the identity, inequality and cloud verifiers on random inputs (JSON).
    Verify(Common),
    /// Classify the instance's cloud (JSON).
    Classify(Common),
    /// Evaluate the seven converse conditions (JSON).
    Battery(Common),
    /// The gallery of worked examples.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Subcommand)]
enum ExamplesAction {
    /// List the families and their parameters.
    List(Output),
    /// Build one family member as an instance document.
    Build {
        /// Family name.
        name: String,
        /// Family parameter `key=value` (repeatable).
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct Output {
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON configuration whose fields override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed recorded in the output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct Common {
    /// Instance document (JSON).
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Gallery family to use as the instance.
    #[arg(long)]
    gallery: Option<String>,
    /// Gallery parameter `key=value` (repeatable).
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Region Λ as comma-separated site names (overrides the instance's).
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<String>>,
    /// Schedule: round_robin[:eps], full[:eps] or profiles.
    #[arg(long)]
    schedule: Option<String>,
    /// Schedule steps (clean) or series terms (battery).
    #[arg(long)]
    steps: Option<usize>,
    /// Balayage tail tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Kernel-step budget for the balayage series.
    #[arg(long)]
    max_terms: Option<usize>,
    /// Marker level cap for cloud checks.
    #[arg(long)]
    level_cap: Option<usize>,
    /// Verifier selection: all, or comma-separated names.
    #[arg(long)]
    name: Option<String>,
    /// Random input draws per verifier.
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    output: Output,
}

impl Common {
    fn config(self, operation: &str) -> Result<(ExperimentConfig, Option<PathBuf>), Failure> {
        let mut c = ExperimentConfig::new(operation);
        c.instance = self.instance;
        c.gallery = self.gallery;
        c.params = self.params;
        c.lambda = self.lambda;
        c.steps = self.steps;
        c.seed = self.output.seed;
        if let Some(v) = self.schedule {
            c.schedule = v;
        }
        if let Some(v) = self.tol {
            c.tol = v;
        }
        if let Some(v) = self.max_terms {
            c.max_terms = v;
        }
        if let Some(v) = self.level_cap {
            c.level_cap = v;
        }
        if let Some(v) = self.name {
            c.name = v;
        }
        if let Some(v) = self.samples {
            c.samples = v;
        }
        finish(c, self.output)
    }
}

/// Applies the configuration file, if any, over the flag values.
fn finish(config: ExperimentConfig, output: Output) -> Result<(ExperimentConfig, Option<PathBuf>), Failure> {
    let config = match &output.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::contract(format!("cannot read {}: {e}", path.display())))?;
            config.override_with(&text)?
        }
        None => config,
    };
    Ok((config, output.out))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (config, out) = match cli.command {
        Command::Clean(a) => a.config("clean")?,
        Command::Balayage(a) => a.config("balayage")?,
        Command::Verify(a) => a.config("verify")?,
        Command::Classify(a) => a.config("classify")?,
        Command::Battery(a) => a.config("battery")?,
        Command::Examples { action: ExamplesAction::List(o) } => {
            let mut c = ExperimentConfig::new("examples");
            c.seed = o.seed;
            finish(c, o)?
        }
        Command::Examples { action: ExamplesAction::Build { name, params, output } } => {
            let mut c = ExperimentConfig::new("examples");
            c.gallery = Some(name);
            c.params = params;
            c.seed = output.seed;
            finish(c, output)?
        }
    };
    let text = match config.operation.as_str() {
        "clean" => commands::cmd_clean(&config)?,
        "balayage" => commands::cmd_balayage(&config)?,
        "verify" => commands::cmd_verify(&config)?,
        "classify" => commands::cmd_classify(&config)?,
        "battery" => commands::cmd_battery(&config)?,
        "examples" if config.gallery.is_some() => commands::cmd_examples_build(&config)?,
        "examples" => commands::cmd_examples_list(&config)?,
        other => return Err(Failure::contract(format!("unknown operation `{other}`"))),
    };
    match out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| Failure::contract(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}

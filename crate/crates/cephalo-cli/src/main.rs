use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cephalo_cli::commands::{self, Command};

/// Facial-growth-direction prediction pipeline.
#[derive(Parser)]
#[command(name = "cephalo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct Common {
    /// Master seed; overrides the config file's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// JSON config file (flat key/value; unknown keys rejected).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if absent.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Sub {
    /// Generate a synthetic cohort, its truth table, and the landmark registry.
    Synth {
        #[command(flatten)]
        common: Common,
    },
    /// Turn a landmark CSV into a feature-matrix CSV plus a build report.
    Features {
        /// Landmark CSV (subject_id,group,age_years,landmark,x,y).
        #[arg(long)]
        input: PathBuf,
        /// Landmark registry file; defaults to the built-in 20-landmark set.
        #[arg(long)]
        registry: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run one cross-validated experiment and write its report and model.
    Evaluate {
        /// Feature-matrix CSV produced by `features`.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Staged forward feature selection with ranked per-stage tables.
    Select {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Dump one augmented training set with its scatter plot.
    Augment {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Accuracy-versus-factor curves per augmentation method.
    Sweep {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compare two prediction files against a truth table.
    Agreement {
        #[arg(long)]
        pred_a: PathBuf,
        #[arg(long)]
        pred_b: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, input, registry, pred_a, pred_b, truth, common) = match cli.command {
        Sub::Synth { common } => (Command::Synth, None, None, None, None, None, common),
        Sub::Features {
            input,
            registry,
            common,
        } => (
            Command::Features,
            Some(input),
            registry,
            None,
            None,
            None,
            common,
        ),
        Sub::Evaluate { input, common } => {
            (Command::Evaluate, Some(input), None, None, None, None, common)
        }
        Sub::Select { input, common } => {
            (Command::Select, Some(input), None, None, None, None, common)
        }
        Sub::Augment { input, common } => {
            (Command::Augment, Some(input), None, None, None, None, common)
        }
        Sub::Sweep { input, common } => {
            (Command::Sweep, Some(input), None, None, None, None, common)
        }
        Sub::Agreement {
            pred_a,
            pred_b,
            truth,
            common,
        } => (
            Command::Agreement,
            None,
            None,
            Some(pred_a),
            Some(pred_b),
            Some(truth),
            common,
        ),
    };
    match commands::dispatch(
        command,
        input,
        registry,
        pred_a,
        pred_b,
        truth,
        common.seed,
        common.config,
        common.out,
    ) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // one machine-parsable line on stderr
            eprintln!(
                "{}",
                serde_json::json!({"error": e.kind(), "message": e.to_string()})
            );
            ExitCode::FAILURE
        }
    }
}

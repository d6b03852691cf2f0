use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use tm_critical::cli::{run, Command, RunConfig, Status};

/// Trudinger–Moser critical growth experiments.
#[derive(Parser)]
#[command(name = "tmcrit", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sphere area, α_N, κ, t₀, level bound, limit constant and β threshold.
    Constants(Common),
    /// Closed-form Moser moments and the I_m recurrence against quadrature.
    MoserCheck(Common),
    /// First eigenvalue of the N-Laplacian on the ball.
    Eigen {
        #[command(flatten)]
        common: Common,
        /// Also solve at 2M, 4M, … and write a convergence table.
        #[arg(long)]
        doublings: Option<u32>,
    },
    /// Hypothesis check, j₀ search, ray curves and ring check.
    Scan(Common),
    /// Full mountain-pass pipeline.
    Solve(Common),
    /// Threshold as a function of σ₀.
    Thresholds(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run config; defaults are used for missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed for the ring directions (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Field override, e.g. `--set grid.M=1024`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn resolve(common: &Common) -> anyhow::Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => RunConfig::default(),
    };
    for item in &common.overrides {
        let (key, value) = item
            .split_once('=')
            .with_context(|| format!("override `{item}` is not KEY=VALUE"))?;
        cfg = cfg.with_override(key.trim(), value.trim())?;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common, doublings) = match &cli.command {
        Cmd::Constants(c) => (Command::Constants, c, None),
        Cmd::MoserCheck(c) => (Command::MoserCheck, c, None),
        Cmd::Eigen { common, doublings } => (Command::Eigen, common, *doublings),
        Cmd::Scan(c) => (Command::Scan, c, None),
        Cmd::Solve(c) => (Command::Solve, c, None),
        Cmd::Thresholds(c) => (Command::Thresholds, c, None),
    };
    let mut cfg = match resolve(common) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("tmcrit {}: {e:#}", cmd.name());
            let io = e.chain().any(|c| {
                matches!(c.downcast_ref::<tm_critical::error::Error>(), Some(tm_critical::error::Error::Io(_)))
            });
            let status = if io { Status::Io } else { Status::Validation };
            return ExitCode::from(status.exit_code() as u8);
        }
    };
    if let Some(k) = doublings {
        cfg.eigen.doublings = k;
    }
    match run(cmd, &cfg) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            if outcome.status == Status::HypothesisWarning {
                eprintln!("warning: hypotheses not confirmed; see {}", cfg.output_dir.display());
            }
            println!("wrote {} files to {}", outcome.files.len(), cfg.output_dir.display());
            ExitCode::from(outcome.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("tmcrit {}: {e}", cmd.name());
            ExitCode::from(e.status().exit_code() as u8)
        }
    }
}

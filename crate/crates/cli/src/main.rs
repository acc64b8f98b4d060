use std::path::PathBuf;
use std::process::ExitCode;

use acca_cli::{execute, ExperimentConfig, Scenario};
use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "acca",
    version,
    about = "Short-arc midpoint gossip on circle-valued graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run any scenario described by a config file.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Override the horizon (steps per replica).
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long)]
        replicas: Option<u64>,
        /// Number of vertices.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Monte Carlo estimate of the first-update no-crossing probability.
    CrossingProb {
        #[command(flatten)]
        common: Common,
        /// Ring size.
        #[arg(long)]
        n: Option<usize>,
        /// Edges sampled (without replacement) per replica.
        #[arg(long)]
        edges: Option<usize>,
        /// Independent rings.
        #[arg(long)]
        replicas: Option<u64>,
    },
    /// Linear sweep transport and the wrapped cyclic replay.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        /// Winding of the initial twist.
        #[arg(long)]
        winding: Option<i64>,
        /// Linear sweeps to tabulate.
        #[arg(long)]
        sweeps: Option<u64>,
        /// Step budget of the wrapped replay.
        #[arg(long)]
        steps: Option<u64>,
    },
    /// Lift, compensator and detrended-frame diagnostics on a twisted ring.
    LiftCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        /// Winding of the initial twist.
        #[arg(long)]
        winding: Option<i64>,
        /// Steps to run.
        #[arg(long)]
        horizon: Option<u64>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; replica r draws from stream r.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self, default: Option<Scenario>) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, default) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Some(s)) => ExperimentConfig::new(s),
            (None, None) => bail!("`simulate` needs --config"),
        };
        if let Some(expected) = default {
            if cfg.scenario != expected {
                bail!(
                    "config describes scenario `{}`, this subcommand runs `{}`",
                    cfg.scenario.name(),
                    expected.name()
                );
            }
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        Ok(cfg)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn configure(command: Command) -> Result<ExperimentConfig> {
    let cfg = match command {
        Command::Simulate {
            common,
            horizon,
            replicas,
            n,
        } => {
            let mut cfg = common.load(None)?;
            set(&mut cfg.horizon, horizon);
            set(&mut cfg.replicas, replicas);
            set(&mut cfg.n, n);
            cfg
        }
        Command::CrossingProb {
            common,
            n,
            edges,
            replicas,
        } => {
            let mut cfg = common.load(Some(Scenario::CrossingProbMc))?;
            set(&mut cfg.n, n);
            set(&mut cfg.edges_per_replica, edges);
            set(&mut cfg.replicas, replicas);
            cfg
        }
        Command::Sweep {
            common,
            n,
            winding,
            sweeps,
            steps,
        } => {
            let mut cfg = common.load(Some(Scenario::SweepEscape))?;
            set(&mut cfg.n, n);
            set(&mut cfg.winding, winding);
            set(&mut cfg.sweeps, sweeps);
            set(&mut cfg.horizon, steps);
            cfg
        }
        Command::LiftCheck {
            common,
            n,
            winding,
            horizon,
        } => {
            let mut cfg = common.load(Some(Scenario::CompensatorBound))?;
            set(&mut cfg.n, n);
            set(&mut cfg.winding, winding);
            set(&mut cfg.horizon, horizon);
            cfg
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure(cli.command).and_then(|cfg| {
        let (summary, files) = execute(&cfg)?;
        println!("{} -> {}", cfg.scenario.name(), cfg.output_dir.display());
        for (key, value) in summary {
            println!("  {key}: {value}");
        }
        println!("  files: {}", files.len());
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

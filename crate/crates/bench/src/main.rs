use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use relaxproj::problems::CsSetting;
use relaxproj_bench::commands::{self, GridFamily};
use relaxproj_bench::BenchConfig;

#[derive(Parser)]
#[command(name = "relaxproj-bench", version, about = "Reproducible experiments for the relaxed-projection solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML configuration; every key is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Stopping tolerance on the fixed-point residual.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    kmax: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also require the feasibility residual to be below the tolerance.
    #[arg(long, global = true)]
    gate_feasibility: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Predicted linear factors for the subspace model.
    PredictRates,
    /// Iteration counts and fitted rates on the subspace model.
    RunSubspace,
    /// Averaged iteration counts on the ball tangent to a line.
    RunBallLine,
    /// Compressed-sensing runs (toy and realistic settings).
    RunCs {
        /// Settings to run; defaults to the configured list.
        #[arg(long, value_delimiter = ',')]
        setting: Vec<String>,
    },
    /// Spectral grid-best (subspace) or iteration-count tuning (cs).
    GridSearch {
        #[arg(long, value_enum, default_value = "subspace")]
        family: Family,
        #[arg(long, value_delimiter = ',')]
        setting: Vec<String>,
    },
    /// Iterates on a single principal-angle plane.
    Trajectory,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Subspace,
    Cs,
}

fn settings(cfg: &BenchConfig, names: &[String]) -> Result<Vec<CsSetting>> {
    if names.is_empty() {
        return Ok(cfg.cs.settings.clone());
    }
    Ok(names.iter().map(|n| CsSetting::parse(n)).collect::<relaxproj::Result<_>>()?)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let c = &cli.common;
    let mut cfg = match &c.config {
        Some(p) => BenchConfig::load(p)?,
        None => BenchConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(t) = c.tol {
        cfg.tolerance = t;
        cfg.ball_line.tolerances = vec![t];
    }
    if let Some(k) = c.kmax {
        cfg.kmax = Some(k);
    }
    if let Some(o) = &c.out {
        cfg.out = o.clone();
    }
    cfg.gate_feasibility |= c.gate_feasibility;
    cfg.validate()?;

    let manifest = match &cli.command {
        Command::PredictRates => commands::predict_rates(&cfg)?,
        Command::RunSubspace => commands::run_subspace(&cfg)?,
        Command::RunBallLine => commands::run_ball_line(&cfg)?,
        Command::RunCs { setting } => commands::run_cs(&cfg, &settings(&cfg, setting)?)?,
        Command::GridSearch { family, setting } => {
            let fam = match family {
                Family::Subspace => GridFamily::Subspace,
                Family::Cs => GridFamily::Cs,
            };
            let list = if setting.is_empty() { CsSetting::REALISTIC.to_vec() } else { settings(&cfg, setting)? };
            commands::grid_search(&cfg, fam, &list)?
        }
        Command::Trajectory => commands::trajectory(&cfg)?,
    };
    println!("{}", manifest.display());
    Ok(())
}

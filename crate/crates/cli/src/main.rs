//! `arsel`: command-line front end for the simulation and order-selection
//! experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use arsel_core::harness::{self, ExperimentConfig, ExperimentKind};
use arsel_core::ArselError;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "arsel", version, about = "Autoregressive order selection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path and write it with its population quantities.
    Simulate(Common),
    /// Fit Yule-Walker models of every order.
    Fit(Common),
    /// Fit and select orders with each criterion.
    Select(Common),
    /// Efficiency ratios Q_n(k_hat) / L_n(k*) over an n-grid.
    Efficiency(Common),
    /// Physical dependence coefficients and their weighted partial sums.
    Depmeasure(Common),
    /// Average selected order curves.
    Figure {
        #[arg(value_enum)]
        which: FigureKind,
        #[command(flatten)]
        common: Common,
    },
    /// Monte-Carlo check of the coefficient CLT.
    Clt(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureKind {
    Mdep,
    Garch,
}

#[derive(Args)]
struct Common {
    /// TOML config; defaults apply when omitted.
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

fn load(kind: ExperimentKind, common: &Common) -> Result<ExperimentConfig, ArselError> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::new(kind),
    };
    if config.experiment != kind {
        return Err(ArselError::InvalidParameter {
            field: "experiment".into(),
            reason: format!(
                "config is for `{}`, command needs `{}`",
                config.experiment.name(),
                kind.name()
            ),
        });
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if common.reps.is_some() {
        config.replications = common.reps;
    }
    if common.out.is_some() {
        config.output_dir = common.out.clone();
    }
    if common.threads.is_some() {
        config.threads = common.threads;
    }
    Ok(config)
}

fn execute(command: Command) -> Result<(), ArselError> {
    let (kind, common) = match command {
        Command::Simulate(c) => (ExperimentKind::Simulate, c),
        Command::Fit(c) => (ExperimentKind::Fit, c),
        Command::Select(c) => (ExperimentKind::Select, c),
        Command::Efficiency(c) => (ExperimentKind::Efficiency, c),
        Command::Depmeasure(c) => (ExperimentKind::DepProfile, c),
        Command::Figure {
            which: FigureKind::Mdep,
            common,
        } => (ExperimentKind::FigureMdep, common),
        Command::Figure {
            which: FigureKind::Garch,
            common,
        } => (ExperimentKind::FigureGarch, common),
        Command::Clt(c) => (ExperimentKind::Clt, c),
    };
    let config = load(kind, &common)?;
    let report = harness::run(&config)?;
    for path in harness::write_outputs(&report, &config.output_dir())? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({
                "kind": e.kind(),
                "field": e.field(),
                "message": e.to_string(),
            });
            eprintln!("{line}");
            ExitCode::from(1)
        }
    }
}

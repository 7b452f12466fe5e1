//! Monte-Carlo experiment orchestration: configuration, runners, CSV and
//! plot output, and the run manifest.

mod config;
mod experiments;
mod output;
pub mod plot;

use std::time::Instant;

use serde::Serialize;

pub use config::{desk_t_grid, ExperimentConfig, ExperimentKind, DEFAULT_SEED};
pub use experiments::{
    figure_k_max, figure_replication, run_clt, run_dep_profile, run_efficiency, run_experiment, run_figure_garch,
    run_figure_mdep, run_fit, run_select, run_simulate, CltResult, EfficiencySummary, FigureData, FigureReplication,
};
pub use output::write_outputs;

use crate::criteria::SelectionResult;
use crate::depmeasure::DependenceProfile;
use crate::error::{ArselError, Result};
use crate::estimator::FitResult;
use crate::oracle::EfficiencyRecord;
use crate::popmodel::PopulationModel;
use crate::procgen::SamplePath;
use crate::stats::Summary;

/// One aggregated cell, e.g. the mean order for `m = 5` at `t = 1840`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub group: String,
    pub param: f64,
    pub x: usize,
    pub metric: String,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub wall_time_secs: f64,
    pub threads: usize,
}

/// Experiment-specific results behind the cell table.
#[derive(Debug, Clone)]
pub enum Artifacts {
    Figure(FigureData),
    Efficiency {
        records: Vec<EfficiencyRecord>,
        summaries: Vec<EfficiencySummary>,
    },
    Clt(CltResult),
    DepProfile(DependenceProfile),
    Simulate {
        path: SamplePath,
        model: PopulationModel,
    },
    Fit(FitResult),
    Select {
        fit: FitResult,
        selections: Vec<SelectionResult>,
        k_max: usize,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    /// The configuration with defaults filled in.
    pub config: ExperimentConfig,
    pub cells: Vec<Cell>,
    pub notes: Vec<String>,
    pub provenance: Provenance,
    #[serde(skip)]
    pub artifacts: Artifacts,
}

impl ExperimentReport {
    pub(crate) fn new(config: &ExperimentConfig, cells: Vec<Cell>, notes: Vec<String>, artifacts: Artifacts) -> Self {
        ExperimentReport {
            config: config.resolved(),
            cells,
            notes,
            provenance: Provenance {
                version: env!("CARGO_PKG_VERSION"),
                wall_time_secs: 0.0,
                threads: rayon::current_num_threads(),
            },
            artifacts,
        }
    }

    /// Fails unless every replicated cell holds the requested count.
    pub fn check_counts(&self) -> Result<()> {
        let expected = self.config.replications();
        let replicated = matches!(
            self.config.experiment,
            ExperimentKind::FigureMdep | ExperimentKind::FigureGarch | ExperimentKind::Efficiency | ExperimentKind::Clt
        );
        if !replicated {
            return Ok(());
        }
        match self.cells.iter().find(|c| c.summary.count != expected) {
            Some(c) => Err(ArselError::Insufficient {
                what: "replications in a report cell",
                required: expected,
                actual: c.summary.count,
            }),
            None => Ok(()),
        }
    }

    pub fn figure(&self) -> Option<&FigureData> {
        match &self.artifacts {
            Artifacts::Figure(d) => Some(d),
            _ => None,
        }
    }

    pub fn efficiency(&self) -> Option<&[EfficiencySummary]> {
        match &self.artifacts {
            Artifacts::Efficiency { summaries, .. } => Some(summaries),
            _ => None,
        }
    }

    pub fn clt(&self) -> Option<&CltResult> {
        match &self.artifacts {
            Artifacts::Clt(r) => Some(r),
            _ => None,
        }
    }

    pub fn profile(&self) -> Option<&DependenceProfile> {
        match &self.artifacts {
            Artifacts::DepProfile(p) => Some(p),
            _ => None,
        }
    }
}

/// Runs the experiment on a pool of `config.threads` workers (the global
/// pool when unset), checks cell counts and stamps the wall time.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut report = match config.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| ArselError::Config(format!("thread pool: {e}")))?;
            pool.install(|| run_experiment(config))?
        }
        None => run_experiment(config)?,
    };
    report.check_counts()?;
    report.provenance.wall_time_secs = start.elapsed().as_secs_f64();
    log::info!(
        "{} finished in {:.2}s on {} threads",
        config.experiment.name(),
        report.provenance.wall_time_secs,
        report.provenance.threads
    );
    Ok(report)
}

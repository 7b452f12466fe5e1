//! Experiment configuration, read from TOML.
//!
//! Every key except `experiment` is optional; missing keys take
//! experiment-specific defaults (see [`ExperimentConfig::resolved`]).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::criteria::Criterion;
use crate::depmeasure::{Functional, MIN_REPLICATIONS};
use crate::error::{ArselError, Result};
use crate::estimator::FitMode;
use crate::procgen::{InnovationModel, MaDesign, ProcessConfig, ProcessSpec, DEFAULT_TRUNCATION};

pub const DEFAULT_SEED: u64 = 20_231;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    FigureMdep,
    FigureGarch,
    Efficiency,
    Clt,
    DepProfile,
    Simulate,
    Fit,
    Select,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::FigureMdep => "figure_mdep",
            ExperimentKind::FigureGarch => "figure_garch",
            ExperimentKind::Efficiency => "efficiency",
            ExperimentKind::Clt => "clt",
            ExperimentKind::DepProfile => "dep_profile",
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::Fit => "fit",
            ExperimentKind::Select => "select",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<FitMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_values: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criteria: Option<Vec<Criterion>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process: Option<ProcessConfig>,
    /// Sample size for `simulate`, `fit`, `select` and `clt`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_n: Option<usize>,
    /// Fixed order for `clt`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// CSV path (`t,x`) used by `fit` and `select` instead of simulating.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lags: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<Functional>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoffs: Option<Vec<usize>>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// `41, 141, ..., 1741, 1840`.
pub fn desk_t_grid() -> Vec<usize> {
    let mut grid: Vec<usize> = (41..=1840).step_by(100).collect();
    grid.push(1840);
    grid
}

fn strictly_increasing<T: PartialOrd>(field: &str, values: &[T]) -> Result<()> {
    if values.is_empty() {
        return Err(ArselError::invalid(field, "must not be empty"));
    }
    if values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(ArselError::invalid(field, "must be strictly increasing"));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            replications: None,
            seed: DEFAULT_SEED,
            mode: None,
            t_grid: None,
            n_grid: None,
            m_values: None,
            p_values: None,
            criteria: None,
            output_dir: None,
            threads: None,
            process: None,
            n: None,
            k_max: None,
            k_n: None,
            k: None,
            input_path: None,
            lags: None,
            q: None,
            functional: None,
            alphas: None,
            cutoffs: None,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| ArselError::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| ArselError::Config(e.to_string()))
    }

    pub fn replications(&self) -> usize {
        self.replications.unwrap_or(match self.experiment {
            ExperimentKind::FigureMdep | ExperimentKind::FigureGarch => 300,
            ExperimentKind::Efficiency => 200,
            ExperimentKind::Clt => 1000,
            ExperimentKind::DepProfile => 10_000,
            _ => 1,
        })
    }

    pub fn mode(&self) -> FitMode {
        self.mode.unwrap_or(match self.experiment {
            ExperimentKind::FigureMdep | ExperimentKind::FigureGarch => FitMode::ToeplitzFull,
            _ => FitMode::PaperWindow,
        })
    }

    pub fn t_grid(&self) -> Vec<usize> {
        self.t_grid.clone().unwrap_or_else(desk_t_grid)
    }

    pub fn n_grid(&self) -> Vec<usize> {
        self.n_grid.clone().unwrap_or_else(|| vec![250, 500, 1000, 2000])
    }

    pub fn m_values(&self) -> Vec<usize> {
        self.m_values.clone().unwrap_or_else(|| vec![1, 2, 5, 10, 15, 20, 25])
    }

    pub fn p_values(&self) -> Vec<f64> {
        self.p_values.clone().unwrap_or_else(|| vec![1.5, 2.0, 2.5, 3.0, 4.0])
    }

    pub fn criteria(&self) -> Vec<Criterion> {
        self.criteria.clone().unwrap_or_else(|| match self.experiment {
            ExperimentKind::Select => Criterion::ALL.to_vec(),
            _ => vec![Criterion::AicLog],
        })
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn n(&self) -> usize {
        self.n.unwrap_or(match self.experiment {
            ExperimentKind::Clt => 4000,
            _ => 1000,
        })
    }

    pub fn k(&self) -> usize {
        self.k.unwrap_or(1)
    }

    pub fn lags(&self) -> Vec<usize> {
        self.lags.clone().unwrap_or_else(|| (0..=20).collect())
    }

    pub fn q(&self) -> f64 {
        self.q.unwrap_or(2.0)
    }

    pub fn functional(&self) -> Functional {
        self.functional.unwrap_or_default()
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.alphas.clone().unwrap_or_else(|| vec![2.5])
    }

    pub fn cutoffs(&self) -> Vec<usize> {
        self.cutoffs.clone().unwrap_or_else(|| vec![10, 20])
    }

    fn default_process(&self) -> ProcessConfig {
        let spec = match self.experiment {
            ExperimentKind::Clt => ProcessSpec::new(
                InnovationModel::IidGaussian { sd: 1.0 },
                MaDesign::Geometric {
                    phi: 0.5,
                    truncation: DEFAULT_TRUNCATION,
                },
            ),
            ExperimentKind::DepProfile => ProcessSpec::new(
                InnovationModel::IidGaussian { sd: 1.0 },
                MaDesign::PowerLaw {
                    p: 4.0,
                    truncation: DEFAULT_TRUNCATION,
                },
            ),
            _ => ProcessSpec::mdep_design(5),
        };
        spec.expect("built-in designs are valid").into()
    }

    /// The process used by single-process experiments.
    pub fn process_spec(&self) -> Result<ProcessSpec> {
        match &self.process {
            Some(p) => p.build(),
            None => self.default_process().build(),
        }
    }

    /// Checks every key the experiment uses and names the first offender.
    pub fn validate(&self) -> Result<()> {
        if self.replications == Some(0) {
            return Err(ArselError::invalid("replications", "must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(ArselError::invalid("threads", "must be at least 1"));
        }
        if let Some(p) = &self.process {
            p.build()?;
        }
        match self.experiment {
            ExperimentKind::FigureMdep | ExperimentKind::FigureGarch => {
                let grid = self.t_grid();
                strictly_increasing("t_grid", &grid)?;
                if grid[0] < 4 {
                    return Err(ArselError::invalid("t_grid", "every t must be at least 4"));
                }
                if self.experiment == ExperimentKind::FigureMdep {
                    let m = self.m_values();
                    strictly_increasing("m_values", &m)?;
                    if m[0] < 1 {
                        return Err(ArselError::invalid("m_values", "m must be at least 1"));
                    }
                } else {
                    let p = self.p_values();
                    strictly_increasing("p_values", &p)?;
                    if p.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                        return Err(ArselError::invalid("p_values", "p must be positive"));
                    }
                }
            }
            ExperimentKind::Efficiency => {
                let grid = self.n_grid();
                strictly_increasing("n_grid", &grid)?;
                if grid[0] < 16 {
                    return Err(ArselError::invalid("n_grid", "every n must be at least 16"));
                }
                if self.criteria().is_empty() {
                    return Err(ArselError::invalid("criteria", "must not be empty"));
                }
                self.process_spec()?;
            }
            ExperimentKind::Clt => {
                if self.k() < 1 {
                    return Err(ArselError::invalid("k", "must be at least 1"));
                }
                if self.n() < 16 * (self.k() + 1) {
                    return Err(ArselError::invalid("n", "too short for the requested order"));
                }
                if self.replications() < 2 {
                    return Err(ArselError::invalid("replications", "need at least 2"));
                }
                self.process_spec()?;
            }
            ExperimentKind::DepProfile => {
                strictly_increasing("lags", &self.lags())?;
                if !(self.q() >= 1.0) {
                    return Err(ArselError::invalid("q", "must be >= 1"));
                }
                if self.replications() < MIN_REPLICATIONS {
                    return Err(ArselError::invalid(
                        "replications",
                        format!("need at least {MIN_REPLICATIONS}"),
                    ));
                }
                strictly_increasing("cutoffs", &self.cutoffs())?;
                self.process_spec()?;
            }
            ExperimentKind::Simulate | ExperimentKind::Fit | ExperimentKind::Select => {
                if self.input_path.is_none() && self.n() < 4 {
                    return Err(ArselError::invalid("n", "must be at least 4"));
                }
                if self.k_max == Some(0) {
                    return Err(ArselError::invalid("k_max", "must be at least 1"));
                }
                self.process_spec()?;
            }
        }
        Ok(())
    }

    /// Copy with every default the experiment uses filled in; this is what
    /// the run manifest echoes.
    pub fn resolved(&self) -> ExperimentConfig {
        let mut c = self.clone();
        c.replications = Some(self.replications());
        c.mode = Some(self.mode());
        c.output_dir = Some(self.output_dir());
        match self.experiment {
            ExperimentKind::FigureMdep => {
                c.t_grid = Some(self.t_grid());
                c.m_values = Some(self.m_values());
                c.criteria = Some(self.criteria());
            }
            ExperimentKind::FigureGarch => {
                c.t_grid = Some(self.t_grid());
                c.p_values = Some(self.p_values());
                c.criteria = Some(self.criteria());
            }
            ExperimentKind::Efficiency => {
                c.n_grid = Some(self.n_grid());
                c.criteria = Some(self.criteria());
                c.process = Some(self.process.clone().unwrap_or_else(|| self.default_process()));
            }
            ExperimentKind::Clt => {
                c.n = Some(self.n());
                c.k = Some(self.k());
                c.process = Some(self.process.clone().unwrap_or_else(|| self.default_process()));
            }
            ExperimentKind::DepProfile => {
                c.lags = Some(self.lags());
                c.q = Some(self.q());
                c.functional = Some(self.functional());
                c.alphas = Some(self.alphas());
                c.cutoffs = Some(self.cutoffs());
                c.process = Some(self.process.clone().unwrap_or_else(|| self.default_process()));
            }
            ExperimentKind::Simulate | ExperimentKind::Fit | ExperimentKind::Select => {
                c.n = Some(self.n());
                c.process = Some(self.process.clone().unwrap_or_else(|| self.default_process()));
                if self.experiment == ExperimentKind::Select {
                    c.criteria = Some(self.criteria());
                }
            }
        }
        c
    }
}

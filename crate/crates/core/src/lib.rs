//! Autoregressive order selection on weakly dependent stationary processes.
//!
//! The crate simulates linear processes with i.i.d., m-dependent or GARCH
//! innovations ([`procgen`]), computes exact population quantities
//! ([`popmodel`]), fits Yule-Walker models ([`estimator`]), selects orders by
//! AIC, FPE and Shibata-type criteria ([`criteria`]), evaluates the
//! independent-realization risk against its oracle benchmark ([`oracle`]),
//! estimates physical dependence coefficients ([`depmeasure`]) and runs the
//! Monte-Carlo experiments ([`harness`]).

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criteria;
pub mod depmeasure;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod linalg;
pub mod oracle;
pub mod popmodel;
pub mod procgen;
pub mod rng;
pub mod stats;

pub use criteria::{Criterion, SelectionResult};
pub use depmeasure::DependenceProfile;
pub use error::{ArselError, Result};
pub use estimator::{FitMode, FitResult, FitWindow};
pub use harness::{ExperimentConfig, ExperimentKind, ExperimentReport};
pub use oracle::EfficiencyRecord;
pub use popmodel::{OrderSolution, PopulationModel};
pub use procgen::{InnovationModel, MaDesign, ProcessSpec, SamplePath};

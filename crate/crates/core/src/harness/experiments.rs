//! Experiment runners. Each replication draws from its own RNG substream,
//! results are collected in replication order and reduced sequentially, so
//! outputs do not depend on the worker count.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, ExperimentKind};
use super::{Artifacts, Cell, ExperimentReport};
use crate::criteria::{self, Criterion, SelectionResult};
use crate::depmeasure;
use crate::error::{ArselError, Result};
use crate::estimator::{self, FitMode, FitResult, FitWindow};
use crate::linalg::Matrix;
use crate::oracle::{self, EfficiencyRecord};
use crate::popmodel::PopulationModel;
use crate::procgen::{ProcessSpec, SamplePath};
use crate::stats::{self, Summary};

fn replication_error(run_id: u64, cell: &str, source: ArselError) -> ArselError {
    log::error!("replication {run_id} in cell {cell} failed: {source}");
    ArselError::Replication {
        run_id,
        cell: cell.to_string(),
        source: Box::new(source),
    }
}

/// Orders selected on every prefix of one path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureReplication {
    pub run_id: u64,
    /// Digest of the full-length path all prefixes were cut from.
    pub digest: u64,
    /// Selected order for each `t` of the grid.
    pub orders: Vec<usize>,
}

/// Candidate range used on a prefix of length `t`.
pub fn figure_k_max(t: usize) -> usize {
    (t / 2).max(1)
}

fn prefix_window(mode: FitMode, t: usize) -> Result<FitWindow> {
    match mode {
        FitMode::ToeplitzFull => FitWindow::toeplitz_full(t),
        FitMode::PaperWindow => FitWindow::paper(t, figure_k_max(t)),
    }
}

/// Simulates one path of length `max(t_grid)` and selects an order on
/// each prefix `x_1..x_t`.
pub fn figure_replication(
    spec: &Arc<ProcessSpec>,
    t_grid: &[usize],
    criterion: Criterion,
    mode: FitMode,
    seed: u64,
    run_id: u64,
) -> Result<FigureReplication> {
    let t_max = *t_grid.last().ok_or(ArselError::Empty("t grid"))?;
    let path = spec.simulate(t_max, seed, run_id)?;
    let orders = t_grid
        .iter()
        .map(|&t| {
            let k_max = figure_k_max(t);
            let fit = estimator::fit_all_orders(&path.values()[..t], prefix_window(mode, t)?, k_max)?;
            Ok(criteria::select(criterion, &fit, k_max)?.k_hat)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FigureReplication {
        run_id,
        digest: path.digest(),
        orders,
    })
}

/// Average selected orders per (parameter, t).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureData {
    /// `m` or `p`.
    pub param_name: &'static str,
    pub params: Vec<f64>,
    pub t_grid: Vec<usize>,
    pub criterion: Criterion,
    /// `summaries[i][j]` is the cell for `params[i]`, `t_grid[j]`.
    pub summaries: Vec<Vec<Summary>>,
    pub replications: Vec<Vec<FigureReplication>>,
}

impl FigureData {
    pub fn mean_at(&self, param: f64, t: usize) -> Option<f64> {
        let i = self.params.iter().position(|&p| p == param)?;
        let j = self.t_grid.iter().position(|&s| s == t)?;
        Some(self.summaries[i][j].mean)
    }
}

fn run_figure(
    config: &ExperimentConfig,
    param_name: &'static str,
    designs: Vec<(f64, ProcessSpec)>,
) -> Result<ExperimentReport> {
    let grid = config.t_grid();
    let reps = config.replications() as u64;
    let criterion = *config
        .criteria()
        .first()
        .ok_or(ArselError::invalid("criteria", "must not be empty"))?;
    let mode = config.mode();
    let mut data = FigureData {
        param_name,
        params: Vec::new(),
        t_grid: grid.clone(),
        criterion,
        summaries: Vec::new(),
        replications: Vec::new(),
    };
    let mut cells = Vec::new();
    for (param, spec) in designs {
        let spec = Arc::new(spec);
        let cell = format!("{param_name}={param}");
        // Replication r uses substream r for every parameter value, so the
        // curves share their underlying shocks.
        let runs = (0..reps)
            .into_par_iter()
            .map(|r| {
                figure_replication(&spec, &grid, criterion, mode, config.seed, r)
                    .map_err(|e| replication_error(r, &cell, e))
            })
            .collect::<Result<Vec<_>>>()?;
        let summaries: Vec<Summary> = (0..grid.len())
            .map(|j| {
                let orders: Vec<f64> = runs.iter().map(|run| run.orders[j] as f64).collect();
                Summary::of(&orders)
            })
            .collect();
        for (&t, s) in grid.iter().zip(&summaries) {
            cells.push(Cell {
                group: param_name.to_string(),
                param,
                x: t,
                metric: "mean_order".to_string(),
                summary: *s,
            });
        }
        data.params.push(param);
        data.summaries.push(summaries);
        data.replications.push(runs);
    }
    let notes = vec![
        format!(
            "orders selected by {} over k = 1..=floor(t/2) with {} fits",
            criterion.name(),
            match mode {
                FitMode::ToeplitzFull => "full-sample Toeplitz",
                FitMode::PaperWindow => "fixed-window",
            }
        ),
        "each replication simulates one path of length max(t_grid); every t uses its prefix".to_string(),
        "replication r shares its RNG substream across parameter values".to_string(),
    ];
    Ok(ExperimentReport::new(config, cells, notes, Artifacts::Figure(data)))
}

pub fn run_figure_mdep(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let designs = config
        .m_values()
        .into_iter()
        .map(|m| Ok((m as f64, ProcessSpec::mdep_design(m)?)))
        .collect::<Result<Vec<_>>>()?;
    run_figure(config, "m", designs)
}

pub fn run_figure_garch(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let designs = config
        .p_values()
        .into_iter()
        .map(|p| Ok((p, ProcessSpec::garch_design(p)?)))
        .collect::<Result<Vec<_>>>()?;
    run_figure(config, "p", designs)
}

/// Efficiency-ratio distribution for one (n, criterion) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencySummary {
    pub n: usize,
    pub k_n: usize,
    pub criterion: Criterion,
    pub ratio: Summary,
    /// `|ratio - 1|`.
    pub abs_deviation: Summary,
    pub fraction_below_0_7: f64,
    pub k_hat: Summary,
    pub k_star: usize,
    pub k_star_at_boundary: bool,
}

fn efficiency_window(mode: FitMode, n: usize) -> Result<(FitWindow, usize)> {
    let k_n = estimator::default_k_n(n);
    let window = match mode {
        FitMode::PaperWindow => FitWindow::paper(n, k_n)?,
        FitMode::ToeplitzFull => FitWindow::toeplitz_full(n)?,
    };
    Ok((window, k_n))
}

pub fn run_efficiency(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let spec = Arc::new(config.process_spec()?);
    let model = PopulationModel::from_spec(&spec)?;
    let criteria_set = config.criteria();
    let reps = config.replications() as u64;
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    let mut cells = Vec::new();
    for (idx, n) in config.n_grid().into_iter().enumerate() {
        let (window, k_max) = efficiency_window(config.mode(), n)?;
        let star = oracle::k_star(&model, window.big_n(), k_max)?;
        let cell = format!("n={n}");
        let per_rep = (0..reps)
            .into_par_iter()
            .map(|r| {
                let run_id = ((idx as u64) << 32) | r;
                let one = || -> Result<Vec<EfficiencyRecord>> {
                    let path = spec.simulate(n, config.seed, run_id)?;
                    criteria_set
                        .iter()
                        .map(|&c| oracle::efficiency_ratio(path.values(), run_id, c, window, k_max, &model))
                        .collect()
                };
                one().map_err(|e| replication_error(run_id, &cell, e))
            })
            .collect::<Result<Vec<_>>>()?;
        for (ci, &criterion) in criteria_set.iter().enumerate() {
            let recs: Vec<&EfficiencyRecord> = per_rep.iter().map(|v| &v[ci]).collect();
            let ratios: Vec<f64> = recs.iter().map(|r| r.ratio).collect();
            let devs: Vec<f64> = ratios.iter().map(|r| (r - 1.0).abs()).collect();
            let k_hats: Vec<f64> = recs.iter().map(|r| r.k_hat as f64).collect();
            let below = ratios.iter().filter(|&&r| r < 0.7).count() as f64 / ratios.len() as f64;
            let summary = EfficiencySummary {
                n,
                k_n: k_max,
                criterion,
                ratio: Summary::of(&ratios),
                abs_deviation: Summary::of(&devs),
                fraction_below_0_7: below,
                k_hat: Summary::of(&k_hats),
                k_star: star.k,
                k_star_at_boundary: star.at_boundary,
            };
            for (metric, s) in [
                ("ratio", summary.ratio),
                ("abs_deviation", summary.abs_deviation),
                ("k_hat", summary.k_hat),
            ] {
                cells.push(Cell {
                    group: criterion.name().to_string(),
                    param: k_max as f64,
                    x: n,
                    metric: metric.to_string(),
                    summary: s,
                });
            }
            summaries.push(summary);
        }
        records.extend(per_rep.into_iter().flatten());
    }
    let notes = vec![format!(
        "K_n = floor(n^0.45); orders 1..=K_n; Q_n uses the AR(infinity) coefficients truncated at {}",
        model.j_max()
    )];
    Ok(ExperimentReport::new(
        config,
        cells,
        notes,
        Artifacts::Efficiency { records, summaries },
    ))
}

/// Monte-Carlo check of the limiting distribution of `sqrt(n)(phi_hat(k) - phi(k))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltResult {
    pub n: usize,
    pub k: usize,
    pub k_n: usize,
    pub phi: Vec<f64>,
    /// Average of the per-path plug-in estimates.
    pub sigma_plugin: Vec<Vec<f64>>,
    pub sigma_mc: Vec<Vec<f64>>,
    /// `||Sigma_plugin - Sigma_mc||_F / ||Sigma_mc||_F`.
    pub frobenius_rel: f64,
    /// `sqrt(n)(phi_hat_i - phi_i)` per coordinate.
    pub z: Vec<Summary>,
    /// Share of replications whose 95% interval from `Sigma_plugin` covers `phi_i`.
    pub coverage: Vec<f64>,
    pub jarque_bera: Vec<f64>,
}

fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn run_clt(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let spec = Arc::new(config.process_spec()?);
    let model = PopulationModel::from_spec(&spec)?;
    let (n, k) = (config.n(), config.k());
    let k_n = config.k_n.unwrap_or_else(|| estimator::default_k_n(n)).max(k);
    let phi: Vec<f64> = model.yule_walker(k)?.a_of_k.iter().map(|a| -a).collect();
    let cell = format!("n={n},k={k}");
    let per_rep = (0..config.replications() as u64)
        .into_par_iter()
        .map(|r| {
            let one = || -> Result<(Vec<f64>, Matrix)> {
                let path = spec.simulate(n, config.seed, r)?;
                let (phi_hat, _) = estimator::fit_paper_window(path.values(), k_n, k)?;
                Ok((phi_hat, oracle::clt_sigma_path(&model, k, path.values())?))
            };
            one().map_err(|e| replication_error(r, &cell, e))
        })
        .collect::<Result<Vec<_>>>()?;
    let reps = per_rep.len() as f64;
    let mut sigma_plugin = Matrix::zeros(k, k);
    for (_, s) in &per_rep {
        sigma_plugin = Matrix::from_fn(k, k, |i, j| sigma_plugin[(i, j)] + s[(i, j)]);
    }
    let sigma_plugin = sigma_plugin.scale(1.0 / reps);
    let phi_hats: Vec<Vec<f64>> = per_rep.into_iter().map(|(p, _)| p).collect();
    let sigma_mc = oracle::mc_covariance(&phi_hats, &phi, n)?;
    let frobenius_rel = sigma_plugin.sub(&sigma_mc).frobenius() / sigma_mc.frobenius();
    let root_n = (n as f64).sqrt();
    let mut z = Vec::with_capacity(k);
    let mut coverage = Vec::with_capacity(k);
    let mut jarque_bera = Vec::with_capacity(k);
    let mut cells = Vec::new();
    for i in 0..k {
        let zi: Vec<f64> = phi_hats.iter().map(|p| root_n * (p[i] - phi[i])).collect();
        let half = 1.96 * sigma_plugin[(i, i)].sqrt();
        let cov = zi.iter().filter(|v| v.abs() <= half).count() as f64 / reps;
        let s = Summary::of(&zi);
        cells.push(Cell {
            group: "coordinate".to_string(),
            param: (i + 1) as f64,
            x: n,
            metric: "sqrt_n_error".to_string(),
            summary: s,
        });
        z.push(s);
        coverage.push(cov);
        jarque_bera.push(stats::jarque_bera(&zi));
    }
    let result = CltResult {
        n,
        k,
        k_n,
        phi,
        sigma_plugin: rows(&sigma_plugin),
        sigma_mc: rows(&sigma_mc),
        frobenius_rel,
        z,
        coverage,
        jarque_bera,
    };
    let notes = vec![format!(
        "fixed-window fit with K_n = {k_n}; Bartlett bandwidth floor(n^(1/3)) = {}",
        oracle::clt_bandwidth(n)
    )];
    Ok(ExperimentReport::new(config, cells, notes, Artifacts::Clt(result)))
}

pub fn run_dep_profile(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let spec = Arc::new(config.process_spec()?);
    let profile = depmeasure::estimate_profile(
        &spec,
        &config.lags(),
        config.q(),
        config.replications(),
        config.seed,
        config.functional(),
    )?;
    // fail early rather than after writing delta.csv
    for &alpha in &config.alphas() {
        for &cutoff in &config.cutoffs() {
            depmeasure::partial_d(&profile, alpha, cutoff)?;
        }
    }
    let cells = profile
        .lags
        .iter()
        .zip(profile.delta_hat.iter().zip(&profile.stderr))
        .map(|(&l, (&d, &s))| Cell {
            group: "delta".to_string(),
            param: profile.q,
            x: l,
            metric: "delta_hat".to_string(),
            summary: Summary {
                mean: d,
                stderr: s,
                count: profile.replications,
            },
        })
        .collect();
    let notes =
        vec!["each lag reuses replication r's shocks; the coupled shock comes from a separate stream".to_string()];
    Ok(ExperimentReport::new(
        config,
        cells,
        notes,
        Artifacts::DepProfile(profile),
    ))
}

fn input_or_simulated(config: &ExperimentConfig) -> Result<SamplePath> {
    match &config.input_path {
        Some(p) => SamplePath::read_csv(std::fs::File::open(p)?),
        None => Arc::new(config.process_spec()?).simulate(config.n(), config.seed, 0),
    }
}

fn fit_from_config(config: &ExperimentConfig, x: &[f64]) -> Result<(FitResult, usize)> {
    let n = x.len();
    let k_n = config.k_n.unwrap_or_else(|| estimator::default_k_n(n));
    let window = FitWindow::new(config.mode(), n, k_n)?;
    let k_max = config.k_max.unwrap_or(k_n);
    Ok((estimator::fit_all_orders(x, window, k_max)?, k_max))
}

pub fn run_simulate(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let spec = Arc::new(config.process_spec()?);
    let path = spec.simulate(config.n(), config.seed, 0)?;
    let model = PopulationModel::from_spec(&spec)?;
    let notes = vec![format!("path digest {:016x}", path.digest())];
    Ok(ExperimentReport::new(
        config,
        Vec::new(),
        notes,
        Artifacts::Simulate { path, model },
    ))
}

pub fn run_fit(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let path = input_or_simulated(config)?;
    let (fit, _) = fit_from_config(config, path.values())?;
    let notes = vec![format!("path digest {:016x}", path.digest())];
    Ok(ExperimentReport::new(config, Vec::new(), notes, Artifacts::Fit(fit)))
}

pub fn run_select(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let path = input_or_simulated(config)?;
    let (fit, k_max) = fit_from_config(config, path.values())?;
    let selections = config
        .criteria()
        .into_iter()
        .map(|c| criteria::select(c, &fit, k_max))
        .collect::<Result<Vec<SelectionResult>>>()?;
    let cells = selections
        .iter()
        .map(|s| Cell {
            group: s.criterion.name().to_string(),
            param: k_max as f64,
            x: path.len(),
            metric: "k_hat".to_string(),
            summary: Summary::of(&[s.k_hat as f64]),
        })
        .collect();
    let notes = vec![format!("path digest {:016x}", path.digest())];
    Ok(ExperimentReport::new(
        config,
        cells,
        notes,
        Artifacts::Select { fit, selections, k_max },
    ))
}

/// Dispatches on `config.experiment` in the current thread pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    match config.experiment {
        ExperimentKind::FigureMdep => run_figure_mdep(config),
        ExperimentKind::FigureGarch => run_figure_garch(config),
        ExperimentKind::Efficiency => run_efficiency(config),
        ExperimentKind::Clt => run_clt(config),
        ExperimentKind::DepProfile => run_dep_profile(config),
        ExperimentKind::Simulate => run_simulate(config),
        ExperimentKind::Fit => run_fit(config),
        ExperimentKind::Select => run_select(config),
    }
}

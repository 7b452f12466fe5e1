//! Population-side evaluation of a fit: the risk `Q_n(k) = ||a_hat(k) - a||_R^2`,
//! the benchmark `L_n(k) = k sigma^2 / N + ||a - a(k)||_R^2`, the oracle order
//! and the plug-in CLT covariance of the Yule-Walker coefficients.

use std::io::Write;

use serde::Serialize;

use crate::criteria::{self, Criterion};
use crate::error::{ArselError, Result};
use crate::estimator::{self, FitWindow};
use crate::linalg::{Cholesky, Matrix};
use crate::popmodel::PopulationModel;

/// `Q_n(k)` together with the bound on its error from truncating `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Risk {
    pub value: f64,
    pub truncation_bound: f64,
}

/// `||a_hat(k) - a||_R^2` for `a_hat(k)` in the `X_t + sum a_i X_{t-i}` sign.
pub fn q_n(a_hat: &[f64], model: &PopulationModel) -> Result<Risk> {
    let value = model.r_dist_to_ar_sq(a_hat)?.max(0.0);
    Ok(Risk {
        value,
        truncation_bound: model.truncation_bound(value),
    })
}

/// `L_n(k)`.
pub fn l_n(model: &PopulationModel, k: usize, big_n: usize) -> Result<f64> {
    if k == 0 || big_n == 0 {
        return Err(ArselError::invalid("k/N", "both must be positive"));
    }
    Ok(k as f64 * model.sigma_sq() / big_n as f64 + model.bias_sq(k)?)
}

/// `L_n(k)` for `k = 1..=K_max`, from one Levinson sweep.
pub fn l_n_curve(model: &PopulationModel, big_n: usize, k_max: usize) -> Result<Vec<f64>> {
    if big_n == 0 {
        return Err(ArselError::invalid("N", "must be positive"));
    }
    let sig = model.innovation_variances(k_max)?;
    let s2 = model.sigma_sq();
    Ok((1..=k_max)
        .map(|k| k as f64 * s2 / big_n as f64 + (sig[k] - s2).max(0.0))
        .collect())
}

/// Oracle order: smallest minimizer of `L_n` over `1..=K_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOrder {
    pub k: usize,
    /// The minimizer sits on `K_max`, so the candidate range may be too small.
    pub at_boundary: bool,
}

pub fn k_star(model: &PopulationModel, big_n: usize, k_max: usize) -> Result<OracleOrder> {
    let curve = l_n_curve(model, big_n, k_max)?;
    Ok(oracle_order_from_curve(&curve, model.label()))
}

fn oracle_order_from_curve(curve: &[f64], label: &str) -> OracleOrder {
    let (idx, _) = curve.iter().enumerate().fold(
        (0, f64::INFINITY),
        |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) },
    );
    let k = idx + 1;
    let at_boundary = k == curve.len() && curve.len() > 1;
    if at_boundary {
        log::warn!("oracle order for `{label}` sits on the boundary K_max = {k}");
    }
    OracleOrder { k, at_boundary }
}

/// One replication's verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyRecord {
    pub run_id: u64,
    pub n: usize,
    pub k_max: usize,
    pub criterion: Criterion,
    pub k_hat: usize,
    pub k_star: usize,
    pub q: f64,
    pub l_star: f64,
    pub ratio: f64,
    pub q_truncation_bound: f64,
}

/// Fits `path`, selects `k_hat` with `criterion` over `1..=k_max`, and
/// compares `Q_n(k_hat)` with `L_n(k*)` on the same candidate range.
pub fn efficiency_ratio(
    path: &[f64],
    run_id: u64,
    criterion: Criterion,
    window: FitWindow,
    k_max: usize,
    model: &PopulationModel,
) -> Result<EfficiencyRecord> {
    let fit = estimator::fit_all_orders(path, window, k_max)?;
    let sel = criteria::select(criterion, &fit, k_max)?;
    let risk = q_n(&fit.a_hat(sel.k_hat), model)?;
    let curve = l_n_curve(model, window.big_n(), k_max)?;
    let star = oracle_order_from_curve(&curve, model.label());
    let l_star = curve[star.k - 1];
    Ok(EfficiencyRecord {
        run_id,
        n: window.n(),
        k_max,
        criterion,
        k_hat: sel.k_hat,
        k_star: star.k,
        q: risk.value,
        l_star,
        ratio: risk.value / l_star,
        q_truncation_bound: risk.truncation_bound,
    })
}

/// CSV `run_id,n,criterion,k_hat,k_star,Q,L_star,ratio`.
pub fn write_efficiency_csv<W: Write>(writer: W, records: &[EfficiencyRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["run_id", "n", "criterion", "k_hat", "k_star", "Q", "L_star", "ratio"])?;
    for r in records {
        w.write_record([
            r.run_id.to_string(),
            r.n.to_string(),
            r.criterion.name().to_string(),
            r.k_hat.to_string(),
            r.k_star.to_string(),
            r.q.to_string(),
            r.l_star.to_string(),
            r.ratio.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// AR coefficients below this magnitude at the end of `a` are dropped when
/// reconstructing innovations.
const AR_TRIM: f64 = 1e-14;

/// Bartlett bandwidth `floor(n^{1/3})`.
pub fn clt_bandwidth(n: usize) -> usize {
    let b = (n as f64).cbrt().floor() as usize;
    // cbrt of a perfect cube can land just below the integer
    if (b + 1).pow(3) <= n {
        b + 1
    } else {
        b
    }
}

/// Plug-in estimate of `Sigma(k)` from one path: innovations reconstructed
/// with the model's `a`, a Bartlett long-run covariance of
/// `U_t = (x_{t-1}, ..., x_{t-k}) e_t`, sandwiched by `R(k)^{-1}`.
pub fn clt_sigma_path(model: &PopulationModel, k: usize, x: &[f64]) -> Result<Matrix> {
    let n = x.len();
    let bandwidth = clt_bandwidth(n);
    if bandwidth >= n {
        return Err(ArselError::invalid(
            "bandwidth",
            format!("{bandwidth} must be below n = {n}"),
        ));
    }
    let a = model.ar_coeffs();
    let order = a.iter().rposition(|v| v.abs() > AR_TRIM).map_or(0, |i| i + 1);
    let start = order.max(k);
    if start + bandwidth + 2 >= n {
        return Err(ArselError::Insufficient {
            what: "path length for CLT plug-in",
            required: start + bandwidth + 3,
            actual: n,
        });
    }
    let u: Vec<Vec<f64>> = (start..n)
        .map(|t| {
            let e = x[t] + (0..order).map(|j| a[j] * x[t - 1 - j]).sum::<f64>();
            (0..k).map(|i| x[t - 1 - i] * e).collect()
        })
        .collect();
    let len = u.len() as f64;
    let mut omega = Matrix::zeros(k, k);
    for h in 0..=bandwidth {
        let w = if h == 0 {
            1.0
        } else {
            1.0 - h as f64 / (bandwidth as f64 + 1.0)
        };
        let mut gamma_h = Matrix::zeros(k, k);
        for t in h..u.len() {
            for i in 0..k {
                for j in 0..k {
                    gamma_h[(i, j)] += u[t][i] * u[t - h][j];
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                let g = gamma_h[(i, j)] / len;
                if h == 0 {
                    omega[(i, j)] += g;
                } else {
                    omega[(i, j)] += w * g;
                    omega[(j, i)] += w * g;
                }
            }
        }
    }
    let r_inv = Cholesky::new(&model.toeplitz(k))?.inverse();
    let sigma = r_inv.matmul(&omega).matmul(&r_inv);
    // exact symmetry
    Ok(Matrix::from_fn(k, k, |i, j| 0.5 * (sigma[(i, j)] + sigma[(j, i)])))
}

/// Average of the per-path plug-in estimates.
pub fn clt_sigma(model: &PopulationModel, k: usize, paths: &[&[f64]]) -> Result<Matrix> {
    if paths.is_empty() {
        return Err(ArselError::Empty("path collection"));
    }
    let mut acc = Matrix::zeros(k, k);
    for p in paths {
        let s = clt_sigma_path(model, k, p)?;
        acc = Matrix::from_fn(k, k, |i, j| acc[(i, j)] + s[(i, j)]);
    }
    Ok(acc.scale(1.0 / paths.len() as f64))
}

/// Sample covariance of `sqrt(n) (phi_hat - phi)` across replications.
pub fn mc_covariance(phi_hats: &[Vec<f64>], phi: &[f64], n: usize) -> Result<Matrix> {
    if phi_hats.len() < 2 {
        return Err(ArselError::Insufficient {
            what: "replications for a covariance",
            required: 2,
            actual: phi_hats.len(),
        });
    }
    let k = phi.len();
    let scale = (n as f64).sqrt();
    let z: Vec<Vec<f64>> = phi_hats
        .iter()
        .map(|p| p.iter().zip(phi).map(|(a, b)| scale * (a - b)).collect())
        .collect();
    let mean: Vec<f64> = (0..k)
        .map(|i| z.iter().map(|v| v[i]).sum::<f64>() / z.len() as f64)
        .collect();
    let denom = (z.len() - 1) as f64;
    Ok(Matrix::from_fn(k, k, |i, j| {
        z.iter().map(|v| (v[i] - mean[i]) * (v[j] - mean[j])).sum::<f64>() / denom
    }))
}

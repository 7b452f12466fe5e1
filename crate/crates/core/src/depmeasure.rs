//! Monte-Carlo estimates of physical dependence coefficients
//! `delta_q(l) = || g(X_t) - g(X_t^{(t-l)}) ||_q`, their weighted partial
//! sums, and a numeric check of Baxter's inequality.
//!
//! All implemented processes are time-homogeneous shifts, so the supremum
//! over `t` reduces to one anchor time point.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ArselError, Result};
use crate::popmodel::PopulationModel;
use crate::procgen::{self, ProcessSpec};

/// Functional applied to `X_t` before coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    #[default]
    Identity,
    Abs,
}

impl Functional {
    fn apply(self, x: f64) -> f64 {
        match self {
            Functional::Identity => x,
            Functional::Abs => x.abs(),
        }
    }
}

pub const MIN_REPLICATIONS: usize = 100;

/// Point estimate with a delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

// (mean |v|^q)^{1/q} and its delta-method stderr
fn lq_norm(powers: &[f64], q: f64) -> Estimate {
    let n = powers.len() as f64;
    let m = powers.iter().sum::<f64>() / n;
    if m == 0.0 {
        return Estimate {
            value: 0.0,
            stderr: 0.0,
        };
    }
    let var = powers.iter().map(|p| (p - m).powi(2)).sum::<f64>() / (n - 1.0);
    let se_m = (var / n).sqrt();
    Estimate {
        value: m.powf(1.0 / q),
        stderr: m.powf(1.0 / q - 1.0) * se_m / q,
    }
}

fn check_args(q: f64, reps: usize) -> Result<()> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(ArselError::invalid("q", format!("must be >= 1, got {q}")));
    }
    if reps < MIN_REPLICATIONS {
        return Err(ArselError::invalid(
            "replications",
            format!("need at least {MIN_REPLICATIONS}, got {reps}"),
        ));
    }
    Ok(())
}

// per replication: (|g(X) - g(X')|^q, |g(X)|^q)
fn coupled_powers(
    spec: &Arc<ProcessSpec>,
    lag: usize,
    q: f64,
    reps: usize,
    seed: u64,
    functional: Functional,
) -> Result<Vec<(f64, f64)>> {
    (0..reps as u64)
        .into_par_iter()
        .map(|run| {
            let (x, y) = procgen::gen_coupled_pair(spec, lag, 1, seed, run)?;
            let gx = functional.apply(x.values()[0]);
            let gy = functional.apply(y.values()[0]);
            Ok(((gx - gy).abs().powf(q), gx.abs().powf(q)))
        })
        .collect()
}

/// `delta_hat_q(l)` for the identity functional.
pub fn estimate_delta(spec: &Arc<ProcessSpec>, lag: usize, q: f64, reps: usize, seed: u64) -> Result<Estimate> {
    estimate_delta_with(spec, lag, q, reps, seed, Functional::Identity)
}

pub fn estimate_delta_with(
    spec: &Arc<ProcessSpec>,
    lag: usize,
    q: f64,
    reps: usize,
    seed: u64,
    functional: Functional,
) -> Result<Estimate> {
    check_args(q, reps)?;
    if spec.finite_memory().is_some_and(|m| lag > m) {
        return Ok(Estimate {
            value: 0.0,
            stderr: 0.0,
        });
    }
    let powers: Vec<f64> = coupled_powers(spec, lag, q, reps, seed, functional)?
        .into_iter()
        .map(|(d, _)| d)
        .collect();
    Ok(lq_norm(&powers, q))
}

/// Dependence coefficients over a set of lags, with `||g(X_0)||_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DependenceProfile {
    pub q: f64,
    pub functional: Functional,
    pub lags: Vec<usize>,
    pub delta_hat: Vec<f64>,
    pub stderr: Vec<f64>,
    pub replications: usize,
    pub x0_norm: Estimate,
}

/// Estimates `delta_hat_q(l)` for every lag, reusing replication `r`'s
/// shocks across lags.
pub fn estimate_profile(
    spec: &Arc<ProcessSpec>,
    lags: &[usize],
    q: f64,
    reps: usize,
    seed: u64,
    functional: Functional,
) -> Result<DependenceProfile> {
    check_args(q, reps)?;
    let mut delta_hat = Vec::with_capacity(lags.len());
    let mut stderr = Vec::with_capacity(lags.len());
    let x0_powers: Vec<f64> = coupled_powers(spec, 0, q, reps, seed, functional)?
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    let x0_norm = lq_norm(&x0_powers, q);
    for &lag in lags {
        let est = estimate_delta_with(spec, lag, q, reps, seed, functional)?;
        delta_hat.push(est.value);
        stderr.push(est.stderr);
    }
    Ok(DependenceProfile {
        q,
        functional,
        lags: lags.to_vec(),
        delta_hat,
        stderr,
        replications: reps,
        x0_norm,
    })
}

impl DependenceProfile {
    pub fn delta_at(&self, lag: usize) -> Option<f64> {
        self.lags.iter().position(|&l| l == lag).map(|i| self.delta_hat[i])
    }

    /// CSV `l,delta_hat,stderr`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["l", "delta_hat", "stderr"])?;
        for ((l, d), s) in self.lags.iter().zip(&self.delta_hat).zip(&self.stderr) {
            w.write_record([l.to_string(), d.to_string(), s.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `||X_0||_q + sum_{l=1}^{L} l^alpha delta_hat(l)`.
pub fn partial_d(profile: &DependenceProfile, alpha: f64, cutoff: usize) -> Result<f64> {
    let mut total = profile.x0_norm.value;
    for l in 1..=cutoff {
        let d = profile.delta_at(l).ok_or(ArselError::Insufficient {
            what: "profile lags for partial sum",
            required: cutoff,
            actual: l - 1,
        })?;
        total += (l as f64).powf(alpha) * d;
    }
    Ok(total)
}

/// Relative growth of the partial sum from cutoff `from` to `to`; small
/// values indicate the series has flattened.
pub fn flatness(profile: &DependenceProfile, alpha: f64, from: usize, to: usize) -> Result<f64> {
    let a = partial_d(profile, alpha, from)?;
    let b = partial_d(profile, alpha, to)?;
    Ok((b - a) / a)
}

/// CSV `alpha,L,partial_D`.
pub fn write_partial_d_csv<W: Write>(
    writer: W,
    profile: &DependenceProfile,
    alphas: &[f64],
    cutoffs: &[usize],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["alpha", "L", "partial_D"])?;
    for &alpha in alphas {
        for &cutoff in cutoffs {
            w.write_record([
                alpha.to_string(),
                cutoff.to_string(),
                partial_d(profile, alpha, cutoff)?.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One order of the Baxter scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaxterRow {
    pub k: usize,
    /// `sum_{m<=k} |a_m - a_m(k)|`.
    pub head_error: f64,
    /// `sum_{m>k} |a_m|`, including the tail beyond the stored coefficients.
    pub tail: f64,
    /// `head_error / tail`.
    pub ratio: f64,
}

impl BaxterRow {
    /// `||a - a(k)||_{l1}` over all indices.
    pub fn l1_error(&self) -> f64 {
        self.head_error + self.tail
    }
}

/// Baxter ratios `sum_{m<=k} |a_m - a_m(k)| / sum_{m>k} |a_m|` (weight `g = 1`).
pub fn baxter_check(model: &PopulationModel, k_range: &[usize]) -> Result<Vec<BaxterRow>> {
    let a = model.ar_coeffs();
    k_range
        .iter()
        .map(|&k| {
            let tail = a.iter().skip(k).map(|v| v.abs()).sum::<f64>() + model.ar_tail_l1();
            if tail == 0.0 {
                return Err(ArselError::ZeroTail { order: k });
            }
            let sol = model.yule_walker(k)?;
            let head_error = sol
                .a_of_k
                .iter()
                .enumerate()
                .map(|(m, ak)| (a.get(m).copied().unwrap_or(0.0) - ak).abs())
                .sum::<f64>();
            Ok(BaxterRow {
                k,
                head_error,
                tail,
                ratio: head_error / tail,
            })
        })
        .collect()
}

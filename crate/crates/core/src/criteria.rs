//! Order-selection criteria and the perturbation diagnostics that relate
//! AIC, FPE and `S_n^*` to Shibata's `S_n(k) = (N + 2k) sigma_hat_k^2`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ArselError, Result};
use crate::estimator::FitResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// `(N + 2k) sigma_hat_k^2`.
    Shibata,
    /// `(n + 2k) sigma_hat_k^2`.
    ShibataStar,
    /// `n exp(2k/n) sigma_hat_k^2`.
    AicExp,
    /// `n log sigma_hat_k^2 + 2k`, the classical AIC.
    AicLog,
    /// `n (n + k) / (n - k) sigma_hat_k^2`.
    Fpe,
}

impl Criterion {
    pub const ALL: [Criterion; 5] = [
        Criterion::Shibata,
        Criterion::ShibataStar,
        Criterion::AicExp,
        Criterion::AicLog,
        Criterion::Fpe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Shibata => "shibata",
            Criterion::ShibataStar => "shibata_star",
            Criterion::AicExp => "aic_exp",
            Criterion::AicLog => "aic_log",
            Criterion::Fpe => "fpe",
        }
    }

    /// Score from the residual variance; `n` is the path length, `big_n` the
    /// number of summands.
    pub fn score_value(self, n: usize, big_n: usize, k: usize, sigma_sq: f64) -> Result<f64> {
        let (nf, kf) = (n as f64, k as f64);
        Ok(match self {
            Criterion::Shibata => (big_n as f64 + 2.0 * kf) * sigma_sq,
            Criterion::ShibataStar => (nf + 2.0 * kf) * sigma_sq,
            Criterion::AicExp => nf * (2.0 * kf / nf).exp() * sigma_sq,
            Criterion::AicLog => {
                if !(sigma_sq > 0.0) {
                    return Err(ArselError::DegenerateFit { order: k });
                }
                nf * sigma_sq.ln() + 2.0 * kf
            }
            Criterion::Fpe => {
                if k >= n {
                    return Err(ArselError::invalid("k", format!("FPE needs k < n = {n}, got {k}")));
                }
                nf * (nf + kf) / (nf - kf) * sigma_sq
            }
        })
    }

    /// Perturbation `rho_n(k)` with `score = (N + rho + 2k) sigma_hat^2`.
    /// AicLog shares its argmin with AicExp and reports the same `rho`.
    pub fn rho(self, n: usize, big_n: usize, k: usize) -> f64 {
        let (nf, bn, kf) = (n as f64, big_n as f64, k as f64);
        match self {
            Criterion::Shibata => 0.0,
            Criterion::ShibataStar => nf - bn,
            Criterion::AicExp | Criterion::AicLog => nf * (2.0 * kf / nf).exp() - bn - 2.0 * kf,
            Criterion::Fpe => nf * (nf + kf) / (nf - kf) - bn - 2.0 * kf,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = ArselError;

    fn from_str(s: &str) -> Result<Self> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .or(match s {
                "aic" => Some(Criterion::AicLog),
                _ => None,
            })
            .ok_or_else(|| ArselError::invalid("criterion", format!("unknown criterion `{s}`")))
    }
}

/// `criterion` evaluated at order `k` of a fit.
pub fn score(criterion: Criterion, fit: &FitResult, k: usize) -> Result<f64> {
    if k == 0 || k > fit.k_max() {
        return Err(ArselError::invalid(
            "k",
            format!("order must lie in 1..={}, got {k}", fit.k_max()),
        ));
    }
    criterion.score_value(fit.n(), fit.window.big_n(), k, fit.sigma_hat_sq(k))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub criterion: Criterion,
    /// Scores for `k = 1..=K_max`.
    pub scores: Vec<f64>,
    pub k_hat: usize,
    /// Every order whose score ties the minimum, `k_hat` included.
    pub ties: Vec<usize>,
}

/// Relative tolerance under which two scores count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Smallest argmin over `scores[k - 1]`, `k = 1..`.
pub fn select_from_scores(criterion: Criterion, scores: Vec<f64>) -> Result<SelectionResult> {
    if scores.is_empty() {
        return Err(ArselError::Empty("score range"));
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(ArselError::invalid(
            "score",
            format!("score at k = {} is not finite", i + 1),
        ));
    }
    let (best, min) = scores.iter().enumerate().fold(
        (0, f64::INFINITY),
        |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) },
    );
    let ties = scores
        .iter()
        .enumerate()
        .filter(|(_, &v)| (v - min).abs() <= TIE_TOLERANCE * min.abs())
        .map(|(i, _)| i + 1)
        .collect::<Vec<_>>();
    let k_hat = ties.first().copied().unwrap_or(best + 1);
    Ok(SelectionResult {
        criterion,
        scores,
        k_hat,
        ties,
    })
}

/// Scans `k = 1..=K_max` and returns the smallest minimizer.
pub fn select(criterion: Criterion, fit: &FitResult, k_max: usize) -> Result<SelectionResult> {
    if k_max > fit.k_max() {
        return Err(ArselError::invalid(
            "K_max",
            format!("fit provides {} orders, requested {k_max}", fit.k_max()),
        ));
    }
    let scores = (1..=k_max)
        .map(|k| score(criterion, fit, k))
        .collect::<Result<Vec<_>>>()?;
    select_from_scores(criterion, scores)
}

/// `(max_k |rho(k)| / N, max_k |rho(k) - rho(k*)| / (N L_n(k)))` over the
/// supplied orders `k = 1..=rho.len()`.
pub fn perturbation_diagnostics(rho: &[f64], big_n: usize, oracle_l: &[f64], k_star: usize) -> Result<(f64, f64)> {
    if rho.len() != oracle_l.len() {
        return Err(ArselError::LengthMismatch {
            what: "rho vs L_n",
            expected: rho.len(),
            actual: oracle_l.len(),
        });
    }
    if k_star == 0 || k_star > rho.len() {
        return Err(ArselError::invalid("k_star", format!("must lie in 1..={}", rho.len())));
    }
    if let Some(i) = oracle_l.iter().position(|l| !(*l > 0.0)) {
        return Err(ArselError::invalid("L_n", format!("L_n({}) must be positive", i + 1)));
    }
    let bn = big_n as f64;
    let first = rho.iter().map(|r| r.abs() / bn).fold(0.0, f64::max);
    let anchor = rho[k_star - 1];
    let second = rho
        .iter()
        .zip(oracle_l)
        .map(|(r, l)| (r - anchor).abs() / (bn * l))
        .fold(0.0, f64::max);
    Ok((first, second))
}

/// `rho(k)` for `k = 1..=K`.
pub fn rho_sequence(criterion: Criterion, n: usize, big_n: usize, k_max: usize) -> Vec<f64> {
    (1..=k_max).map(|k| criterion.rho(n, big_n, k)).collect()
}

/// Explicit upper bounds on the two diagnostics, from the Taylor remainder
/// `|e^{2k/n} - 1 - 2k/n| <= e^{2k/n} k^2 / (2 n^2)` (AIC) and the identity
/// `rho(k) = K_n + 2k^2/(n-k)` (FPE). `None` for criteria without one.
pub fn perturbation_bounds(
    criterion: Criterion,
    n: usize,
    k_n: usize,
    k_star: usize,
    sigma_sq: f64,
) -> Option<(f64, f64)> {
    let (nf, kn, ks) = (n as f64, k_n as f64, k_star as f64);
    let bn = nf - kn;
    match criterion {
        Criterion::AicExp | Criterion::AicLog => Some((
            kn / bn + 2.0 * nf / bn * (2.0 * kn / nf).exp() * (kn / bn).powi(2),
            2.0 * nf / (sigma_sq * bn) * ((2.0 * kn / nf).exp() * kn / nf + (2.0 * ks / nf).exp() * ks / nf),
        )),
        Criterion::Fpe => Some((
            kn / bn + 2.0 * kn * kn / ((nf - kn) * bn),
            2.0 / sigma_sq * (kn / (nf - kn) + ks * ks / (nf - ks)),
        )),
        Criterion::ShibataStar => Some((kn / bn, 0.0)),
        Criterion::Shibata => Some((0.0, 0.0)),
    }
}

/// Score table `k,score_<criterion>...` for the given criteria.
pub fn write_scores_csv<W: Write>(writer: W, fit: &FitResult, criteria: &[Criterion], k_max: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["k".to_string()];
    header.extend(criteria.iter().map(|c| format!("score_{}", c.name())));
    w.write_record(&header)?;
    for k in 1..=k_max {
        let mut row = vec![k.to_string()];
        for c in criteria {
            row.push(score(*c, fit, k)?.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Summary table `criterion,k_hat`.
pub fn write_selection_csv<W: Write>(writer: W, selections: &[SelectionResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["criterion", "k_hat"])?;
    for s in selections {
        w.write_record([s.criterion.name().to_string(), s.k_hat.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

//! Yule-Walker estimation from a sample path.
//!
//! Two modes are supported. [`FitMode::PaperWindow`] uses a common window of
//! `N = n - K_n` targets for every order, so the sample covariance `R_hat(k)`
//! is the leading block of `R_hat(K_n)` and is generally not Toeplitz.
//! [`FitMode::ToeplitzFull`] is the classical estimator: biased sample
//! autocovariances over the whole path and one Levinson-Durbin sweep.
//!
//! The stored coefficients are regression coefficients `phi_hat(k)`, so the
//! predictor of `x_t` is `sum_i phi_hat_i(k) x_{t-i}` and `a_hat(k) = -phi_hat(k)`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{ArselError, Result};
use crate::linalg::{self, Cholesky, Matrix};
use crate::popmodel::OrderSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMode {
    PaperWindow,
    ToeplitzFull,
}

/// Summation window shared by all orders of a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FitWindow {
    n: usize,
    k_n: usize,
    mode: FitMode,
}

impl FitWindow {
    /// Fixed window with `K_n` candidate orders and `N = n - K_n` targets.
    pub fn paper(n: usize, k_n: usize) -> Result<Self> {
        if k_n < 1 || k_n >= n {
            return Err(ArselError::invalid(
                "K_n",
                format!("need 1 <= K_n < n = {n}, got {k_n}"),
            ));
        }
        if n - k_n < 2 {
            return Err(ArselError::invalid(
                "K_n",
                format!("need N = n - K_n >= 2, got {}", n - k_n),
            ));
        }
        Ok(FitWindow {
            n,
            k_n,
            mode: FitMode::PaperWindow,
        })
    }

    /// Whole-sample window; `K_n = 0` and `N = n`.
    pub fn toeplitz_full(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(ArselError::invalid("n", "need at least two observations"));
        }
        Ok(FitWindow {
            n,
            k_n: 0,
            mode: FitMode::ToeplitzFull,
        })
    }

    pub fn new(mode: FitMode, n: usize, k_n: usize) -> Result<Self> {
        match mode {
            FitMode::PaperWindow => FitWindow::paper(n, k_n),
            FitMode::ToeplitzFull => FitWindow::toeplitz_full(n),
        }
    }

    /// Paper window with `K_n = floor(n^0.45)`.
    pub fn paper_default(n: usize) -> Result<Self> {
        FitWindow::paper(n, default_k_n(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_n(&self) -> usize {
        self.k_n
    }

    /// Number of summands `N`.
    pub fn big_n(&self) -> usize {
        self.n - self.k_n
    }

    pub fn mode(&self) -> FitMode {
        self.mode
    }
}

/// `floor(n^0.45)`, clamped to at least 1.
pub fn default_k_n(n: usize) -> usize {
    ((n as f64).powf(0.45).floor() as usize).max(1)
}

/// `(1/n) sum_{t=h+1}^{n} x_t x_{t-h}`.
pub fn autocov_hat(x: &[f64], h: usize) -> Result<f64> {
    if h >= x.len() {
        return Err(ArselError::invalid(
            "h",
            format!("lag {h} must be below n = {}", x.len()),
        ));
    }
    Ok(linalg::dot(&x[h..], &x[..x.len() - h]) / x.len() as f64)
}

/// `gamma_hat(0..=max_lag)` with divisor `n`.
pub fn autocov_hat_all(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    (0..=max_lag).map(|h| autocov_hat(x, h)).collect()
}

/// Sample moments of the fixed window: `R_hat(K_n)` and `r_hat(K_n)`.
#[derive(Debug, Clone)]
pub struct WindowMoments {
    window: FitWindow,
    r_hat: Matrix,
    r_vec: Vec<f64>,
}

impl WindowMoments {
    pub fn new(x: &[f64], window: FitWindow) -> Result<Self> {
        check_len(x, window)?;
        let k_n = window.k_n;
        let big_n = window.big_n() as f64;
        let mut r_hat = Matrix::zeros(k_n, k_n);
        let mut r_vec = vec![0.0; k_n];
        // targets t = K_n+1..n (1-based), predictors x_{t-1}..x_{t-K_n}
        for t in k_n..window.n {
            let target = x[t];
            for i in 0..k_n {
                let xi = x[t - 1 - i];
                r_vec[i] += xi * target;
                for j in i..k_n {
                    r_hat[(i, j)] += xi * x[t - 1 - j];
                }
            }
        }
        for i in 0..k_n {
            r_vec[i] /= big_n;
            for j in i..k_n {
                let v = r_hat[(i, j)] / big_n;
                r_hat[(i, j)] = v;
                r_hat[(j, i)] = v;
            }
        }
        Ok(WindowMoments { window, r_hat, r_vec })
    }

    pub fn window(&self) -> FitWindow {
        self.window
    }

    /// `R_hat(k)`.
    pub fn r_hat(&self, k: usize) -> Matrix {
        self.r_hat.leading(k)
    }

    /// `r_hat(k)`.
    pub fn r_vec(&self, k: usize) -> &[f64] {
        &self.r_vec[..k]
    }

    /// `phi_hat(k) = R_hat(k)^{-1} r_hat(k)`.
    pub fn solve(&self, k: usize) -> Result<Vec<f64>> {
        if k == 0 || k > self.window.k_n {
            return Err(ArselError::invalid(
                "k",
                format!("order must lie in 1..=K_n = {}, got {k}", self.window.k_n),
            ));
        }
        Ok(Cholesky::new(&self.r_hat(k))?.solve(self.r_vec(k)))
    }
}

fn check_len(x: &[f64], window: FitWindow) -> Result<()> {
    if x.len() != window.n {
        return Err(ArselError::LengthMismatch {
            what: "sample path vs fit window",
            expected: window.n,
            actual: x.len(),
        });
    }
    Ok(())
}

/// Order-`k` fit on the fixed window: `(phi_hat(k), R_hat(k))`.
pub fn fit_paper_window(x: &[f64], k_n: usize, k: usize) -> Result<(Vec<f64>, Matrix)> {
    let window = FitWindow::paper(x.len(), k_n)?;
    let moments = WindowMoments::new(x, window)?;
    let phi = moments.solve(k)?;
    Ok((phi, moments.r_hat(k)))
}

/// `(1/N) sum_{t=K_n+1}^{n} (x_t - sum_i phi_i x_{t-i})^2`.
pub fn sigma_hat_sq(x: &[f64], phi: &[f64], window: FitWindow) -> Result<f64> {
    check_len(x, window)?;
    if phi.len() > window.k_n && window.mode == FitMode::PaperWindow {
        return Err(ArselError::invalid(
            "k",
            format!("order {} exceeds K_n = {}", phi.len(), window.k_n),
        ));
    }
    let start = window.k_n.max(phi.len());
    let total: f64 = (start..window.n)
        .map(|t| {
            let pred: f64 = phi.iter().enumerate().map(|(i, p)| p * x[t - 1 - i]).sum();
            (x[t] - pred).powi(2)
        })
        .sum();
    Ok(total / window.big_n() as f64)
}

/// Empirical second moment of the population pseudo-innovations
/// `eta_t(k) = x_t + sum_i a_i(k) x_{t-i}` over the fit window.
pub fn s_k_sq(x: &[f64], solution: &OrderSolution, window: FitWindow) -> Result<f64> {
    let phi: Vec<f64> = solution.a_of_k.iter().map(|a| -a).collect();
    sigma_hat_sq(x, &phi, window)
}

/// Per-order fits `k = 1..=K_max` of one path.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub window: FitWindow,
    phi_hat: Vec<Vec<f64>>,
    sigma_hat_sq: Vec<f64>,
    gamma_hat: Option<Vec<f64>>,
    moments: Option<WindowMoments>,
}

impl FitResult {
    pub fn k_max(&self) -> usize {
        self.phi_hat.len()
    }

    pub fn n(&self) -> usize {
        self.window.n
    }

    /// `phi_hat(k)`.
    pub fn phi_hat(&self, k: usize) -> &[f64] {
        &self.phi_hat[k - 1]
    }

    /// `sigma_hat_k^2` for `k >= 1`.
    pub fn sigma_hat_sq(&self, k: usize) -> f64 {
        self.sigma_hat_sq[k - 1]
    }

    /// `sigma_hat^2` over `k = 1..=K_max`.
    pub fn sigma_hat_sq_all(&self) -> &[f64] {
        &self.sigma_hat_sq
    }

    /// `a_hat(k) = -phi_hat(k)`.
    pub fn a_hat(&self, k: usize) -> Vec<f64> {
        self.phi_hat(k).iter().map(|p| -p).collect()
    }

    /// Sample autocovariances (ToeplitzFull only).
    pub fn gamma_hat(&self) -> Option<&[f64]> {
        self.gamma_hat.as_deref()
    }

    /// Window moments (PaperWindow only).
    pub fn moments(&self) -> Option<&WindowMoments> {
        self.moments.as_ref()
    }

    /// Synthetic fit from explicit residual variances, for exercising the
    /// criteria without data.
    pub fn from_variances(window: FitWindow, sigma_hat_sq: Vec<f64>) -> Self {
        let phi_hat = (1..=sigma_hat_sq.len()).map(|k| vec![0.0; k]).collect();
        FitResult {
            window,
            phi_hat,
            sigma_hat_sq,
            gamma_hat: None,
            moments: None,
        }
    }

    /// CSV `k,sigma_hat_sq,phi_1,...,phi_Kmax`; short rows padded with empty
    /// fields.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let k_max = self.k_max();
        let mut header = vec!["k".to_string(), "sigma_hat_sq".to_string()];
        header.extend((1..=k_max).map(|i| format!("phi_{i}")));
        w.write_record(&header)?;
        for k in 1..=k_max {
            let mut row = vec![k.to_string(), self.sigma_hat_sq(k).to_string()];
            row.extend(self.phi_hat(k).iter().map(|p| p.to_string()));
            row.resize(k_max + 2, String::new());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fits every order `k = 1..=K_max`.
pub fn fit_all_orders(x: &[f64], window: FitWindow, k_max: usize) -> Result<FitResult> {
    check_len(x, window)?;
    if k_max == 0 {
        return Err(ArselError::invalid("K_max", "must be at least 1"));
    }
    match window.mode {
        FitMode::PaperWindow => {
            if k_max > window.k_n {
                return Err(ArselError::invalid(
                    "K_max",
                    format!("must not exceed K_n = {} in paper-window mode, got {k_max}", window.k_n),
                ));
            }
            let moments = WindowMoments::new(x, window)?;
            let mut phi_hat = Vec::with_capacity(k_max);
            let mut sig = Vec::with_capacity(k_max);
            for k in 1..=k_max {
                let phi = moments.solve(k)?;
                sig.push(sigma_hat_sq(x, &phi, window)?);
                phi_hat.push(phi);
            }
            Ok(FitResult {
                window,
                phi_hat,
                sigma_hat_sq: sig,
                gamma_hat: None,
                moments: Some(moments),
            })
        }
        FitMode::ToeplitzFull => {
            if k_max > window.n - 1 {
                return Err(ArselError::invalid(
                    "K_max",
                    format!("must not exceed n - 1 = {}, got {k_max}", window.n - 1),
                ));
            }
            let gamma = autocov_hat_all(x, k_max)?;
            let sweep = linalg::levinson_durbin(&gamma, k_max)?;
            let phi_hat = (1..=k_max)
                .map(|k| sweep.coeffs(k).iter().map(|a| -a).collect())
                .collect();
            let sig = sweep.variances()[1..].to_vec();
            Ok(FitResult {
                window,
                phi_hat,
                sigma_hat_sq: sig,
                gamma_hat: Some(gamma),
                moments: None,
            })
        }
    }
}

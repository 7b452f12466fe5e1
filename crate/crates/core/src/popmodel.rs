//! Exact population second-order quantities of a linear process.

use std::io::Write;

use crate::error::{ArselError, Result};
use crate::linalg::{self, LevinsonSweep, Matrix};
use crate::procgen::ProcessSpec;

/// Length at which the AR(infinity) coefficient vector is truncated.
pub const AR_TRUNCATION: usize = 400;

/// Orders for which positive definiteness is verified at construction.
pub const DEFAULT_CHECKED_ORDER: usize = 256;

/// `gamma(h) = sigma_e^2 sum_j b_j b_{j+h}` for `h = 0..=h_max`.
pub fn acv_from_ma(b: &[f64], sigma_e_sq: f64, h_max: usize) -> Vec<f64> {
    (0..=h_max)
        .map(|h| {
            if h >= b.len() {
                0.0
            } else {
                sigma_e_sq * linalg::dot(&b[h..], &b[..b.len() - h])
            }
        })
        .collect()
}

/// Power-series inversion: `a_1..a_{j_out}` with `A(z) B(z) = 1`, `b_0 = 1`.
pub fn ar_from_ma(b: &[f64], j_out: usize) -> Vec<f64> {
    invert_series(b, j_out)
}

/// The inverse direction: `b_0..b_{j_out}` from `a_1..a_J`.
pub fn ma_from_ar(a: &[f64], j_out: usize) -> Vec<f64> {
    let mut full = Vec::with_capacity(a.len() + 1);
    full.push(1.0);
    full.extend_from_slice(a);
    let mut b = vec![1.0];
    b.extend(invert_series(&full, j_out));
    b
}

// c = 1 / s for a series with s_0 = 1; returns c_1..c_{j_out}
fn invert_series(s: &[f64], j_out: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(j_out + 1);
    c.push(1.0);
    for j in 1..=j_out {
        let top = j.min(s.len().saturating_sub(1));
        let v: f64 = (1..=top).map(|i| s[i] * c[j - i]).sum();
        c.push(-v);
    }
    c.remove(0);
    c
}

/// Yule-Walker solution of order `k` on the exact autocovariances.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSolution {
    pub k: usize,
    /// `a_1(k)..a_k(k)` with `a(k) = -R(k)^{-1} r(k)`.
    pub a_of_k: Vec<f64>,
    pub sigma_k_sq: f64,
}

/// Population side of every experiment: `gamma`, the truncated AR(infinity)
/// coefficients `a` and the innovation variance.
#[derive(Debug, Clone)]
pub struct PopulationModel {
    gamma: Vec<f64>,
    ar_coeffs: Vec<f64>,
    ar_tail_l1: f64,
    sigma_sq: f64,
    label: String,
    sweep: LevinsonSweep,
}

impl PopulationModel {
    /// Model of a [`ProcessSpec`] with `gamma` up to lag `AR_TRUNCATION + 400`.
    pub fn from_spec(spec: &ProcessSpec) -> Result<Self> {
        Self::from_spec_with(spec, AR_TRUNCATION + 400, AR_TRUNCATION)
    }

    pub fn from_spec_with(spec: &ProcessSpec, h_max: usize, j_max: usize) -> Result<Self> {
        let b = spec.ma_coeffs();
        let sigma_sq = spec.innovation().variance();
        let gamma = acv_from_ma(b, sigma_sq, h_max);
        let extended = ar_from_ma(b, 4 * j_max);
        let ar_tail_l1 = extended[j_max..].iter().map(|a| a.abs()).sum();
        let mut model = Self::from_parts(gamma, extended[..j_max].to_vec(), sigma_sq)?;
        model.ar_tail_l1 = ar_tail_l1;
        model.label = spec.label().to_string();
        Ok(model)
    }

    /// Assembles a model from explicit parts and checks positive definiteness
    /// of `R(k)` up to `min(H_max - 1, DEFAULT_CHECKED_ORDER)` through the
    /// Levinson reflection coefficients.
    pub fn from_parts(gamma: Vec<f64>, ar_coeffs: Vec<f64>, sigma_sq: f64) -> Result<Self> {
        if gamma.len() < 2 {
            return Err(ArselError::Insufficient {
                what: "autocovariance lags",
                required: 2,
                actual: gamma.len(),
            });
        }
        if !(gamma[0] > 0.0) {
            return Err(ArselError::invalid("gamma", "gamma(0) must be positive"));
        }
        if let Some(h) = gamma.iter().position(|g| g.abs() > gamma[0] * (1.0 + 1e-12)) {
            return Err(ArselError::invalid("gamma", format!("|gamma({h})| exceeds gamma(0)")));
        }
        if !(sigma_sq > 0.0) {
            return Err(ArselError::invalid("sigma_sq", "innovation variance must be positive"));
        }
        let checked = (gamma.len() - 1).min(DEFAULT_CHECKED_ORDER);
        let sweep = linalg::levinson_durbin(&gamma, checked)?;
        Ok(PopulationModel {
            gamma,
            ar_coeffs,
            ar_tail_l1: 0.0,
            sigma_sq,
            label: String::new(),
            sweep,
        })
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// Largest lag with a stored autocovariance.
    pub fn h_max(&self) -> usize {
        self.gamma.len() - 1
    }

    /// `a_1..a_{J_max}`.
    pub fn ar_coeffs(&self) -> &[f64] {
        &self.ar_coeffs
    }

    pub fn j_max(&self) -> usize {
        self.ar_coeffs.len()
    }

    /// `sigma^2`.
    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Estimate of `sum_{j > J_max} |a_j|` from four times as many terms.
    pub fn ar_tail_l1(&self) -> f64 {
        self.ar_tail_l1
    }

    /// `sum_{h in Z} |gamma(h)|` over the stored lags; bounds the spectral
    /// norm of every `R(k)`.
    pub fn gamma_abs_sum(&self) -> f64 {
        self.gamma[0] + 2.0 * self.gamma[1..].iter().map(|g| g.abs()).sum::<f64>()
    }

    /// Worst-case effect of truncating `a` at `J_max` on `||x - a||_R^2`,
    /// given the truncated value `norm_sq` of that quantity.
    pub fn truncation_bound(&self, norm_sq: f64) -> f64 {
        let tail = self.gamma_abs_sum().sqrt() * self.ar_tail_l1;
        2.0 * norm_sq.max(0.0).sqrt() * tail + tail * tail
    }

    /// Levinson sweep reaching at least order `k`.
    fn sweep_to(&self, k: usize) -> Result<std::borrow::Cow<'_, LevinsonSweep>> {
        if k <= self.sweep.max_order() {
            Ok(std::borrow::Cow::Borrowed(&self.sweep))
        } else {
            Ok(std::borrow::Cow::Owned(linalg::levinson_durbin(&self.gamma, k)?))
        }
    }

    /// `a(k)` and `sigma_k^2` by Levinson-Durbin on the exact autocovariances.
    pub fn yule_walker(&self, k: usize) -> Result<OrderSolution> {
        if k == 0 || k >= self.h_max() {
            return Err(ArselError::invalid(
                "k",
                format!(
                    "order must lie in 1..H_max-1 = 1..{}, got {k}",
                    self.h_max().saturating_sub(1)
                ),
            ));
        }
        let sweep = self.sweep_to(k)?;
        Ok(OrderSolution {
            k,
            a_of_k: sweep.coeffs(k).to_vec(),
            sigma_k_sq: sweep.variance(k),
        })
    }

    /// `sigma_k^2` for `k = 0..=k_max` (`sigma_0^2 = gamma(0)`).
    pub fn innovation_variances(&self, k_max: usize) -> Result<Vec<f64>> {
        Ok(self.sweep_to(k_max)?.variances()[..=k_max].to_vec())
    }

    /// `||a - a(k)||_R^2 = sigma_k^2 - sigma^2`, clamped at zero.
    pub fn bias_sq(&self, k: usize) -> Result<f64> {
        Ok((self.yule_walker(k)?.sigma_k_sq - self.sigma_sq).max(0.0))
    }

    /// `||x||_R^2` for a finite vector.
    pub fn r_norm_sq(&self, x: &[f64]) -> Result<f64> {
        linalg::toeplitz_quad_form(x, &self.gamma)
    }

    /// `||x - a||_R^2`, with `a` truncated at `J_max` and `x` zero-padded.
    pub fn r_dist_to_ar_sq(&self, x: &[f64]) -> Result<f64> {
        let len = x.len().max(self.ar_coeffs.len());
        let diff: Vec<f64> = (0..len)
            .map(|i| x.get(i).copied().unwrap_or(0.0) - self.ar_coeffs.get(i).copied().unwrap_or(0.0))
            .collect();
        self.r_norm_sq(&diff)
    }

    /// `R(k)`.
    pub fn toeplitz(&self, k: usize) -> Matrix {
        Matrix::toeplitz(&self.gamma, k)
    }

    /// `(L(k), diag D(k))` with `R(k)^{-1} = L^T D L`. Row `i` of `L` holds
    /// `(1, a_1(k-1-i), ..., a_{k-1-i}(k-1-i))` starting on the diagonal and
    /// `D = diag(sigma_{k-1}^{-2}, ..., sigma_0^{-2})`.
    pub fn ldl_factorization(&self, k: usize) -> Result<(Matrix, Vec<f64>)> {
        if k == 0 || k >= self.h_max() {
            return Err(ArselError::invalid(
                "k",
                format!("order must lie in 1..H_max-1, got {k}"),
            ));
        }
        let sweep = self.sweep_to(k)?;
        let mut l = Matrix::identity(k);
        let mut d = Vec::with_capacity(k);
        for i in 0..k {
            let order = k - 1 - i;
            for (j, a) in sweep.coeffs(order).iter().enumerate() {
                l[(i, i + 1 + j)] = *a;
            }
            d.push(1.0 / sweep.variance(order));
        }
        Ok((l, d))
    }

    /// `L^T D L` assembled from [`Self::ldl_factorization`].
    pub fn inverse_from_ldl(&self, k: usize) -> Result<Matrix> {
        let (l, d) = self.ldl_factorization(k)?;
        let dl = Matrix::from_fn(k, k, |i, j| d[i] * l[(i, j)]);
        Ok(l.transpose().matmul(&dl))
    }

    pub fn write_gamma_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["h", "gamma"])?;
        for (h, g) in self.gamma.iter().enumerate() {
            w.write_record([h.to_string(), g.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_ar_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["j", "a_j"])?;
        for (j, a) in self.ar_coeffs.iter().enumerate() {
            w.write_record([(j + 1).to_string(), a.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

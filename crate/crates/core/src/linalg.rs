//! Small dense linear algebra: Levinson-Durbin for symmetric Toeplitz
//! systems and a pivot-checked Cholesky solve for sample covariance blocks.

use crate::error::{ArselError, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Symmetric Toeplitz matrix with first row `gamma[0..n]`.
    pub fn toeplitz(gamma: &[f64], n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| gamma[i.abs_diff(j)])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Leading `k x k` block.
    pub fn leading(&self, k: usize) -> Matrix {
        Matrix::from_fn(k, k, |i, j| self[(i, j)])
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(l, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `x^T A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.matvec(x))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - other[(i, j)])
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| c * self[(i, j)])
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Output of a Levinson-Durbin sweep over orders `0..=max_order`.
///
/// Coefficients follow the convention `X_t + sum_i a_i(k) X_{t-i} = eta_t(k)`.
#[derive(Debug, Clone)]
pub struct LevinsonSweep {
    coeffs: Vec<Vec<f64>>,
    variances: Vec<f64>,
    reflections: Vec<f64>,
}

impl LevinsonSweep {
    pub fn max_order(&self) -> usize {
        self.variances.len() - 1
    }

    /// `a(k)`; empty for `k = 0`.
    pub fn coeffs(&self, k: usize) -> &[f64] {
        &self.coeffs[k]
    }

    /// Prediction-error variance `sigma_k^2`; `sigma_0^2 = gamma(0)`.
    pub fn variance(&self, k: usize) -> f64 {
        self.variances[k]
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    /// Partial autocorrelations with the sign of `a_k(k)`.
    pub fn reflections(&self) -> &[f64] {
        &self.reflections
    }
}

/// Relative floor on the prediction-error variance below which the
/// Toeplitz matrix is treated as singular.
const LEVINSON_FLOOR: f64 = 1e-13;

/// Solves the Yule-Walker equations `R(k) a(k) = -r(k)` for every order up to
/// `max_order` in `O(max_order^2)`.
pub fn levinson_durbin(gamma: &[f64], max_order: usize) -> Result<LevinsonSweep> {
    if gamma.len() <= max_order {
        return Err(ArselError::Insufficient {
            what: "autocovariance lags",
            required: max_order + 1,
            actual: gamma.len(),
        });
    }
    let g0 = gamma[0];
    if !(g0.is_finite() && g0 > 0.0) {
        return Err(ArselError::Singular {
            what: "Toeplitz matrix",
            order: 1,
            pivot: g0,
        });
    }
    let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(max_order + 1);
    let mut variances = Vec::with_capacity(max_order + 1);
    let mut reflections = Vec::with_capacity(max_order);
    coeffs.push(Vec::new());
    variances.push(g0);
    let mut prev: Vec<f64> = Vec::new();
    let mut v = g0;
    for k in 1..=max_order {
        let acc = gamma[k] + prev.iter().enumerate().map(|(i, a)| a * gamma[k - 1 - i]).sum::<f64>();
        let kappa = -acc / v;
        let next_v = v * (1.0 - kappa * kappa);
        if !(kappa.abs() < 1.0 && next_v > LEVINSON_FLOOR * g0) {
            return Err(ArselError::Singular {
                what: "Toeplitz matrix",
                order: k + 1,
                pivot: next_v,
            });
        }
        let mut cur = Vec::with_capacity(k);
        for i in 0..k - 1 {
            cur.push(prev[i] + kappa * prev[k - 2 - i]);
        }
        cur.push(kappa);
        v = next_v;
        reflections.push(kappa);
        variances.push(v);
        coeffs.push(cur.clone());
        prev = cur;
    }
    Ok(LevinsonSweep {
        coeffs,
        variances,
        reflections,
    })
}

/// Relative pivot floor for the Cholesky solve, scaled by `trace / k`.
pub const PIVOT_FLOOR: f64 = 1e-12;

/// Cholesky factor `L` with `A = L L^T`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    lower: Matrix,
    min_pivot: f64,
}

impl Cholesky {
    /// Factorizes a symmetric matrix, failing when a pivot drops below
    /// `PIVOT_FLOOR * trace / k`.
    pub fn new(a: &Matrix) -> Result<Self> {
        let k = a.rows();
        assert_eq!(k, a.cols(), "Cholesky needs a square matrix");
        let floor = PIVOT_FLOOR * a.trace().abs() / k.max(1) as f64;
        let mut l = Matrix::zeros(k, k);
        let mut min_pivot = f64::INFINITY;
        for j in 0..k {
            let d = a[(j, j)] - (0..j).map(|s| l[(j, s)] * l[(j, s)]).sum::<f64>();
            min_pivot = min_pivot.min(d);
            if !(d > floor) || !d.is_finite() {
                return Err(ArselError::Singular {
                    what: "sample covariance matrix",
                    order: k,
                    pivot: d,
                });
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in j + 1..k {
                let s = a[(i, j)] - (0..j).map(|s| l[(i, s)] * l[(j, s)]).sum::<f64>();
                l[(i, j)] = s / djj;
            }
        }
        Ok(Cholesky { lower: l, min_pivot })
    }

    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let l = &self.lower;
        let k = l.rows();
        let mut y = vec![0.0; k];
        for i in 0..k {
            let s = b[i] - (0..i).map(|j| l[(i, j)] * y[j]).sum::<f64>();
            y[i] = s / l[(i, i)];
        }
        let mut x = vec![0.0; k];
        for i in (0..k).rev() {
            let s = y[i] - (i + 1..k).map(|j| l[(j, i)] * x[j]).sum::<f64>();
            x[i] = s / l[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> Matrix {
        let k = self.lower.rows();
        let mut inv = Matrix::zeros(k, k);
        let mut e = vec![0.0; k];
        for j in 0..k {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            for (i, v) in self.solve(&e).into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        inv
    }
}

/// `sum_{i,j} x_i x_j gamma(|i - j|)`.
pub fn toeplitz_quad_form(x: &[f64], gamma: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Ok(0.0);
    }
    if gamma.len() < x.len() {
        return Err(ArselError::Insufficient {
            what: "autocovariance lags (H_max + 1)",
            required: x.len(),
            actual: gamma.len(),
        });
    }
    let mut total = gamma[0] * dot(x, x);
    for h in 1..x.len() {
        if gamma[h] != 0.0 {
            total += 2.0 * gamma[h] * dot(&x[h..], &x[..x.len() - h]);
        }
    }
    Ok(total)
}

/// Symmetric eigenvalues by cyclic Jacobi rotations; for small matrices only.
pub fn symmetric_eigenvalues(a: &Matrix) -> Vec<f64> {
    let n = a.rows();
    let mut m = a.clone();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off < 1e-30 * m.frobenius().powi(2).max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let (mrp, mrq) = (m[(r, p)], m[(r, q)]);
                    m[(r, p)] = c * mrp - s * mrq;
                    m[(r, q)] = s * mrp + c * mrq;
                }
                for r in 0..n {
                    let (mpr, mqr) = (m[(p, r)], m[(q, r)]);
                    m[(p, r)] = c * mpr - s * mqr;
                    m[(q, r)] = s * mpr + c * mqr;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

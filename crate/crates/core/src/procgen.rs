//! Seeded generation of linear processes driven by i.i.d., m-dependent or
//! GARCH innovations, plus coupled paths for physical-dependence estimates.

use std::io::Write;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ArselError, Result};
use crate::rng::{self, Purpose};

/// Memory cutoff used for GARCH burn-in: `(alpha + beta)^200` is negligible
/// at every persistence level the experiments use.
pub const GARCH_MEMORY: usize = 200;

/// Truncation length of the moving-average designs used in the figures.
pub const DEFAULT_TRUNCATION: usize = 400;

/// Innovation sequence `e_t` feeding the moving-average filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InnovationModel {
    /// `e_t = sd * eps_t`.
    IidGaussian { sd: f64 },
    /// `e_t = eps_t * (prod_{j=1}^{m-1} |eps_{t-j}|)^{1/(m-1)}`; `m = 1` is i.i.d.
    MDependent { m: usize },
    /// `e_t = eps_t * L_t`, `L_t^2 = omega + beta L_{t-1}^2 + alpha e_{t-1}^2`.
    Garch { omega: f64, alpha: f64, beta: f64 },
}

impl InnovationModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InnovationModel::IidGaussian { sd } => {
                if !(sd.is_finite() && sd > 0.0) {
                    return Err(ArselError::invalid(
                        "innovation.sd",
                        format!("must be positive, got {sd}"),
                    ));
                }
            }
            InnovationModel::MDependent { m } => {
                if m < 1 {
                    return Err(ArselError::invalid("innovation.m", "must be at least 1"));
                }
            }
            InnovationModel::Garch { omega, alpha, beta } => {
                if !(omega.is_finite() && omega > 0.0) {
                    return Err(ArselError::invalid(
                        "innovation.omega",
                        format!("must be positive, got {omega}"),
                    ));
                }
                if !(alpha.is_finite() && alpha >= 0.0) {
                    return Err(ArselError::invalid(
                        "innovation.alpha",
                        format!("must be non-negative, got {alpha}"),
                    ));
                }
                if !(beta.is_finite() && beta >= 0.0) {
                    return Err(ArselError::invalid(
                        "innovation.beta",
                        format!("must be non-negative, got {beta}"),
                    ));
                }
                if alpha + beta >= 1.0 {
                    return Err(ArselError::invalid(
                        "innovation.alpha+beta",
                        format!("alpha + beta = {} must be < 1 for stationarity", alpha + beta),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Exact stationary variance `E e_t^2`.
    pub fn variance(&self) -> f64 {
        match *self {
            InnovationModel::IidGaussian { sd } => sd * sd,
            InnovationModel::MDependent { m } if m <= 1 => 1.0,
            InnovationModel::MDependent { m } => {
                let r = 2.0 / (m - 1) as f64;
                abs_normal_moment(r).powi(m as i32 - 1)
            }
            InnovationModel::Garch { omega, alpha, beta } => omega / (1.0 - alpha - beta),
        }
    }

    /// Number of past shocks needed before the first innovation.
    pub fn pre_history(&self) -> usize {
        match *self {
            InnovationModel::MDependent { m } => m.saturating_sub(1),
            _ => 0,
        }
    }

    /// Dependence window of the innovations (geometric cutoff for GARCH).
    pub fn memory(&self) -> usize {
        match *self {
            InnovationModel::IidGaussian { .. } => 0,
            InnovationModel::MDependent { m } => m.saturating_sub(1),
            InnovationModel::Garch { .. } => GARCH_MEMORY,
        }
    }

    /// Whether a shock more than `memory()` steps back has exactly no effect.
    pub fn has_finite_memory(&self) -> bool {
        !matches!(self, InnovationModel::Garch { .. })
    }
}

/// `E|eps|^r` for a standard Gaussian.
pub fn abs_normal_moment(r: f64) -> f64 {
    use statrs::function::gamma::gamma;
    2f64.powf(r / 2.0) * gamma((r + 1.0) / 2.0) / std::f64::consts::PI.sqrt()
}

/// Recipe for the moving-average coefficients `b_0 = 1, b_1, ..., b_J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaDesign {
    /// `b = (1)`.
    Identity,
    /// `b = (1, theta)`.
    Ma1 { theta: f64 },
    /// `b_j = j^{-p}`, `j = 1..=truncation`.
    PowerLaw { p: f64, truncation: usize },
    /// `b_j = phi^j`, an AR(1) written as a truncated moving average.
    Geometric { phi: f64, truncation: usize },
    /// Explicit coefficients, starting with `b_0 = 1`.
    Explicit { coeffs: Vec<f64> },
}

impl MaDesign {
    pub fn coefficients(&self) -> Vec<f64> {
        match self {
            MaDesign::Identity => vec![1.0],
            MaDesign::Ma1 { theta } => vec![1.0, *theta],
            MaDesign::PowerLaw { p, truncation } => std::iter::once(1.0)
                .chain((1..=*truncation).map(|j| (j as f64).powf(-p)))
                .collect(),
            MaDesign::Geometric { phi, truncation } => (0..=*truncation).map(|j| phi.powi(j as i32)).collect(),
            MaDesign::Explicit { coeffs } => coeffs.clone(),
        }
    }
}

/// Unvalidated, serializable form of a [`ProcessSpec`] as it appears in
/// config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub innovation: InnovationModel,
    pub ma: MaDesign,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
}

impl ProcessConfig {
    /// Validates and builds the spec; error fields are prefixed `process.`.
    pub fn build(&self) -> Result<ProcessSpec> {
        ProcessSpec::try_from(self.clone()).map_err(|e| match e {
            ArselError::InvalidParameter { field, reason } => ArselError::InvalidParameter {
                field: format!("process.{field}"),
                reason,
            },
            other => other,
        })
    }
}

/// Full generative description of `X_t = sum_j b_j e_{t-j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProcessConfig", into = "ProcessConfig")]
pub struct ProcessSpec {
    innovation: InnovationModel,
    ma: MaDesign,
    ma_coeffs: Vec<f64>,
    burn_in: usize,
    label: String,
}

impl TryFrom<ProcessConfig> for ProcessSpec {
    type Error = ArselError;

    fn try_from(def: ProcessConfig) -> Result<Self> {
        let mut spec = ProcessSpec::new(def.innovation, def.ma)?;
        if let Some(label) = def.label {
            spec.label = label;
        }
        match def.burn_in {
            Some(b) => spec.with_burn_in(b),
            None => Ok(spec),
        }
    }
}

impl From<ProcessSpec> for ProcessConfig {
    fn from(spec: ProcessSpec) -> Self {
        ProcessConfig {
            label: Some(spec.label),
            innovation: spec.innovation,
            ma: spec.ma,
            burn_in: Some(spec.burn_in),
        }
    }
}

impl ProcessSpec {
    /// Builds a validated spec with the default burn-in.
    pub fn new(innovation: InnovationModel, ma: MaDesign) -> Result<Self> {
        innovation.validate()?;
        let ma_coeffs = ma.coefficients();
        if ma_coeffs.first() != Some(&1.0) {
            return Err(ArselError::invalid("ma.coeffs", "b_0 must equal 1"));
        }
        if let Some(j) = ma_coeffs.iter().position(|b| !b.is_finite()) {
            return Err(ArselError::invalid(
                "ma.coeffs",
                format!("coefficient b_{j} is not finite"),
            ));
        }
        let order = ma_coeffs.len() - 1;
        let burn_in = match innovation {
            InnovationModel::IidGaussian { .. } => order,
            InnovationModel::MDependent { m } => order + m,
            InnovationModel::Garch { .. } => order + GARCH_MEMORY,
        };
        let label = default_label(&innovation, &ma);
        Ok(ProcessSpec {
            innovation,
            ma,
            ma_coeffs,
            burn_in,
            label,
        })
    }

    /// `X^{(m)}`: m-dependent innovations, `b_j = j^{-4}` truncated at 400.
    pub fn mdep_design(m: usize) -> Result<Self> {
        ProcessSpec::new(
            InnovationModel::MDependent { m },
            MaDesign::PowerLaw {
                p: 4.0,
                truncation: DEFAULT_TRUNCATION,
            },
        )
    }

    /// `Y^{(p)}`: GARCH(0.25, 0.25) innovations with `omega = 0.1`,
    /// `b_j = j^{-p}` truncated at 400.
    pub fn garch_design(p: f64) -> Result<Self> {
        ProcessSpec::new(
            InnovationModel::Garch {
                omega: 0.1,
                alpha: 0.25,
                beta: 0.25,
            },
            MaDesign::PowerLaw {
                p,
                truncation: DEFAULT_TRUNCATION,
            },
        )
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Result<Self> {
        let min = self.order() + self.innovation.memory();
        if burn_in < min {
            return Err(ArselError::invalid(
                "burn_in",
                format!("must be at least J + memory = {min}, got {burn_in}"),
            ));
        }
        self.burn_in = burn_in;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn innovation(&self) -> &InnovationModel {
        &self.innovation
    }

    pub fn ma_design(&self) -> &MaDesign {
        &self.ma
    }

    pub fn ma_coeffs(&self) -> &[f64] {
        &self.ma_coeffs
    }

    /// MA order `J`.
    pub fn order(&self) -> usize {
        self.ma_coeffs.len() - 1
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Lags beyond which a replaced shock provably leaves `X_t` unchanged.
    /// `None` when the innovations have infinite memory.
    pub fn finite_memory(&self) -> Option<usize> {
        self.innovation
            .has_finite_memory()
            .then(|| self.order() + self.innovation.memory())
    }

    /// Draws a path `x_1..x_n` after burn-in.
    pub fn simulate(self: &Arc<Self>, n: usize, seed: u64, run_id: u64) -> Result<SamplePath> {
        if n == 0 {
            return Err(ArselError::invalid("n", "path length must be positive"));
        }
        let innovations = gen_innovations(&self.innovation, self.burn_in + n, seed, run_id)?;
        let values = apply_ma_filter(self, &innovations, n)?;
        Ok(SamplePath {
            values,
            seed,
            run_id,
            spec: Some(Arc::clone(self)),
        })
    }
}

fn default_label(innovation: &InnovationModel, ma: &MaDesign) -> String {
    let inn = match innovation {
        InnovationModel::IidGaussian { sd } => format!("iid(sd={sd})"),
        InnovationModel::MDependent { m } => format!("mdep(m={m})"),
        InnovationModel::Garch { omega, alpha, beta } => format!("garch({omega},{alpha},{beta})"),
    };
    let ma = match ma {
        MaDesign::Identity => "white".to_string(),
        MaDesign::Ma1 { theta } => format!("ma1(theta={theta})"),
        MaDesign::PowerLaw { p, truncation } => format!("powerlaw(p={p},J={truncation})"),
        MaDesign::Geometric { phi, truncation } => format!("ar1(phi={phi},J={truncation})"),
        MaDesign::Explicit { coeffs } => format!("explicit(J={})", coeffs.len().saturating_sub(1)),
    };
    format!("{ma}+{inn}")
}

/// An observed (or simulated) stretch `x_1..x_n`.
#[derive(Debug, Clone)]
pub struct SamplePath {
    values: Vec<f64>,
    pub seed: u64,
    pub run_id: u64,
    pub spec: Option<Arc<ProcessSpec>>,
}

impl SamplePath {
    /// Wraps externally supplied data.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(ArselError::Empty("sample path"));
        }
        Ok(SamplePath {
            values,
            seed: 0,
            run_id: 0,
            spec: None,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Stable 64-bit FNV-1a digest of the value bit patterns.
    pub fn digest(&self) -> u64 {
        path_digest(&self.values)
    }

    /// Writes the path as CSV with header `t,x`, `t` starting at 1.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "x"])?;
        for (i, x) in self.values.iter().enumerate() {
            w.write_record([(i + 1).to_string(), x.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a `t,x` CSV written by [`SamplePath::write_csv`].
    pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let x = rec
                .get(1)
                .ok_or_else(|| ArselError::Config("path CSV row without an `x` column".into()))?;
            values.push(
                x.trim()
                    .parse::<f64>()
                    .map_err(|e| ArselError::Config(format!("bad value `{x}` in path CSV: {e}")))?,
            );
        }
        SamplePath::from_values(values)
    }
}

impl AsRef<[f64]> for SamplePath {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

pub fn path_digest(values: &[f64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in values {
        for byte in v.to_bits().to_le_bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Primitive standard Gaussian shocks, including the pre-history the
/// innovation model needs.
pub fn gen_shocks(model: &InnovationModel, count: usize, seed: u64, run_id: u64) -> Vec<f64> {
    let mut rng = rng::stream(seed, run_id, Purpose::Shocks);
    (0..count + model.pre_history())
        .map(|_| rng.sample(StandardNormal))
        .collect()
}

/// Maps primitive shocks to innovations. The output is shorter than the
/// input by `model.pre_history()`.
pub fn innovations_from_shocks(model: &InnovationModel, shocks: &[f64]) -> Vec<f64> {
    match *model {
        InnovationModel::IidGaussian { sd } => shocks.iter().map(|e| sd * e).collect(),
        InnovationModel::MDependent { m } if m <= 1 => shocks.to_vec(),
        InnovationModel::MDependent { m } => {
            let lag = m - 1;
            let inv = 1.0 / lag as f64;
            let logs: Vec<f64> = shocks.iter().map(|e| e.abs().ln()).collect();
            (lag..shocks.len())
                .map(|t| {
                    let s: f64 = logs[t - lag..t].iter().sum();
                    shocks[t] * (s * inv).exp()
                })
                .collect()
        }
        InnovationModel::Garch { omega, alpha, beta } => {
            let mut vol_sq = omega / (1.0 - alpha - beta);
            shocks
                .iter()
                .map(|eps| {
                    let e = eps * vol_sq.sqrt();
                    vol_sq = omega + beta * vol_sq + alpha * e * e;
                    e
                })
                .collect()
        }
    }
}

/// Innovations `e_1..e_count` as a pure function of `(seed, run_id)`.
pub fn gen_innovations(model: &InnovationModel, count: usize, seed: u64, run_id: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(ArselError::invalid("count", "must be at least 1"));
    }
    model.validate()?;
    Ok(innovations_from_shocks(model, &gen_shocks(model, count, seed, run_id)))
}

/// `x_t = sum_{j=0}^{J} b_j e_{t-j}` for the `n` positions after `burn_in`;
/// innovations before the start of the slice count as zero.
pub fn ma_filter(coeffs: &[f64], innovations: &[f64], burn_in: usize, n: usize) -> Result<Vec<f64>> {
    let required = burn_in + n;
    if innovations.len() < required {
        return Err(ArselError::Insufficient {
            what: "innovations",
            required,
            actual: innovations.len(),
        });
    }
    Ok((burn_in..required)
        .map(|t| {
            let reach = coeffs.len().min(t + 1);
            coeffs[..reach]
                .iter()
                .zip(innovations[..=t].iter().rev())
                .map(|(b, e)| b * e)
                .sum()
        })
        .collect())
}

/// Filters `innovations` through the spec's MA coefficients, discarding the
/// burn-in, and returns `n` values.
pub fn apply_ma_filter(spec: &ProcessSpec, innovations: &[f64], n: usize) -> Result<Vec<f64>> {
    ma_filter(&spec.ma_coeffs, innovations, spec.burn_in, n)
}

/// Paths `(X, X')` that share every primitive shock except the one `lag`
/// steps before the last kept time point, which `X'` replaces with an
/// independent draw.
pub fn gen_coupled_pair(
    spec: &Arc<ProcessSpec>,
    lag: usize,
    n_keep: usize,
    seed: u64,
    run_id: u64,
) -> Result<(SamplePath, SamplePath)> {
    if n_keep == 0 {
        return Err(ArselError::invalid("n_keep", "must be at least 1"));
    }
    let total = spec.burn_in + n_keep;
    let shocks = gen_shocks(&spec.innovation, total, seed, run_id);
    // shocks[i] drives innovation i - pre; the anchor is innovation total - 1
    let anchor_shock = shocks.len() - 1;
    if lag > anchor_shock {
        return Err(ArselError::Insufficient {
            what: "generated history for coupling lag",
            required: lag + 1,
            actual: shocks.len(),
        });
    }
    let mut coupled = shocks.clone();
    let mut rng = rng::stream(seed, run_id, Purpose::Coupling);
    coupled[anchor_shock - lag] = rng.sample(StandardNormal);

    let build = |s: &[f64]| -> Result<SamplePath> {
        let e = innovations_from_shocks(&spec.innovation, s);
        Ok(SamplePath {
            values: apply_ma_filter(spec, &e, n_keep)?,
            seed,
            run_id,
            spec: Some(Arc::clone(spec)),
        })
    };
    Ok((build(&shocks)?, build(&coupled)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean(xs: &[f64]) -> f64 {
        xs.iter().sum::<f64>() / xs.len() as f64
    }

    fn second_moment(xs: &[f64]) -> f64 {
        xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64
    }

    #[test]
    fn m_equal_one_is_raw_gaussian() {
        let model = InnovationModel::MDependent { m: 1 };
        let e = gen_innovations(&model, 3, 11, 0).unwrap();
        assert_eq!(e, gen_shocks(&model, 3, 11, 0));
        assert_eq!(e.len(), 3);
    }

    #[test]
    fn abs_moments_match_closed_form() {
        assert!((abs_normal_moment(2.0) - 1.0).abs() < 1e-12);
        assert!((abs_normal_moment(1.0) - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-12);
        assert!((abs_normal_moment(4.0) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn two_dependent_innovations_have_unit_variance() {
        let model = InnovationModel::MDependent { m: 2 };
        assert!((model.variance() - 1.0).abs() < 1e-12);
        let e = gen_innovations(&model, 1_000_000, 5, 0).unwrap();
        assert!((second_moment(&e) - 1.0).abs() < 0.01);
    }

    #[test]
    fn m_dependent_variance_matches_monte_carlo() {
        for m in [3, 5, 25] {
            let model = InnovationModel::MDependent { m };
            let e = gen_innovations(&model, 400_000, 9, m as u64).unwrap();
            let rel = (second_moment(&e) - model.variance()).abs() / model.variance();
            assert!(rel < 0.02, "m={m} rel={rel}");
        }
    }

    #[test]
    fn garch_stationary_variance() {
        let model = InnovationModel::Garch {
            omega: 0.1,
            alpha: 0.25,
            beta: 0.25,
        };
        assert!((model.variance() - 0.2).abs() < 1e-15);
        let e = gen_innovations(&model, 1_000_000 + GARCH_MEMORY, 3, 0).unwrap();
        let v = second_moment(&e[GARCH_MEMORY..]);
        assert!((v - 0.2).abs() / 0.2 < 0.02, "v={v}");
    }

    #[test]
    fn nonstationary_garch_is_rejected() {
        let err = ProcessSpec::new(
            InnovationModel::Garch {
                omega: 0.1,
                alpha: 0.6,
                beta: 0.4,
            },
            MaDesign::Identity,
        )
        .unwrap_err();
        assert_eq!(err.field(), Some("innovation.alpha+beta"));
    }

    #[test]
    fn identity_filter_returns_innovations() {
        let e = [0.3, -1.2, 2.5, 0.0];
        assert_eq!(ma_filter(&[1.0], &e, 0, 4).unwrap(), e.to_vec());
    }

    #[test]
    fn ma1_filter_by_hand() {
        let x = ma_filter(&[1.0, 0.5], &[1.0, 0.0, -2.0], 0, 3).unwrap();
        assert_eq!(x, vec![1.0, 0.5, -2.0]);
        let x = ma_filter(&[1.0, 0.5], &[1.0, 0.0, -2.0], 1, 2).unwrap();
        assert_eq!(x, vec![0.5, -2.0]);
    }

    #[test]
    fn short_innovations_name_required_length() {
        let err = ma_filter(&[1.0, 0.5], &[1.0, 2.0], 1, 5).unwrap_err();
        match err {
            ArselError::Insufficient { required, actual, .. } => {
                assert_eq!((required, actual), (6, 2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn power_law_tail_mass() {
        // sum_{j>400} j^-4, via a long partial sum plus the integral remainder
        let tail: f64 = (401..200_000).map(|j| (j as f64).powi(-4)).sum::<f64>() + (200_000f64).powi(-3) / 3.0;
        assert!((tail - 5.2e-9).abs() < 0.05e-9, "tail={tail:e}");
        let b = MaDesign::PowerLaw {
            p: 4.0,
            truncation: 400,
        }
        .coefficients();
        assert_eq!(b.len(), 401);
        assert_eq!(b[0], 1.0);
        assert_eq!(b[2], 2f64.powi(-4));
    }

    #[test]
    fn simulation_is_reproducible() {
        let spec = Arc::new(ProcessSpec::mdep_design(5).unwrap());
        let a = spec.simulate(300, 42, 7).unwrap();
        let b = spec.simulate(300, 42, 7).unwrap();
        assert_eq!(
            a.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        assert_eq!(a.digest(), b.digest());
    }

    #[test]
    fn distinct_runs_are_uncorrelated() {
        let spec = Arc::new(ProcessSpec::new(InnovationModel::IidGaussian { sd: 1.0 }, MaDesign::Identity).unwrap());
        let n = 20_000;
        let a = spec.simulate(n, 1, 0).unwrap();
        let b = spec.simulate(n, 1, 1).unwrap();
        let (ma, mb) = (mean(a.values()), mean(b.values()));
        let cov: f64 = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - ma) * (y - mb))
            .sum();
        let va: f64 = a.values().iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.values().iter().map(|y| (y - mb).powi(2)).sum();
        let corr = cov / (va * vb).sqrt();
        assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "corr={corr}");
    }

    #[test]
    fn m_dependent_innovations_are_uncorrelated() {
        let count = 1_000_000;
        let bound = 5.0 / (count as f64).sqrt();
        for m in [1, 2, 5, 25] {
            let e = gen_innovations(&InnovationModel::MDependent { m }, count, 17, 0).unwrap();
            let mu = mean(&e);
            let var: f64 = e.iter().map(|x| (x - mu).powi(2)).sum();
            for h in 1..=10 {
                let c: f64 = e[h..].iter().zip(&e).map(|(x, y)| (x - mu) * (y - mu)).sum();
                let rho = c / var;
                assert!(rho.abs() < bound, "m={m} h={h} rho={rho}");
            }
        }
    }

    #[test]
    fn coupling_beyond_memory_is_exact() {
        for m in [1, 3, 7] {
            let spec =
                Arc::new(ProcessSpec::new(InnovationModel::MDependent { m }, MaDesign::Ma1 { theta: 0.7 }).unwrap());
            let memory = spec.finite_memory().unwrap();
            for lag in [memory + 1, memory + 2] {
                for run in 0..20 {
                    let (x, y) = gen_coupled_pair(&spec, lag, 4, 3, run).unwrap();
                    assert_eq!(x.values().last(), y.values().last());
                }
            }
            // within the window the replaced shock shows up
            let (x, y) = gen_coupled_pair(&spec, memory, 4, 3, 0).unwrap();
            assert_ne!(x.values().last(), y.values().last());
        }
    }

    #[test]
    fn lag_beyond_history_is_an_error() {
        let spec =
            Arc::new(ProcessSpec::new(InnovationModel::IidGaussian { sd: 1.0 }, MaDesign::Ma1 { theta: 0.5 }).unwrap());
        // burn_in 1, n_keep 2: three shocks, largest admissible lag is 2
        assert!(gen_coupled_pair(&spec, 2, 2, 0, 0).is_ok());
        assert!(gen_coupled_pair(&spec, 3, 2, 0, 0).is_err());
    }

    #[test]
    fn coupled_difference_second_moments() {
        let white = Arc::new(ProcessSpec::new(InnovationModel::IidGaussian { sd: 1.0 }, MaDesign::Identity).unwrap());
        let reps = 200_000;
        let d0: f64 = (0..reps)
            .map(|r| {
                let (x, y) = gen_coupled_pair(&white, 0, 1, 21, r).unwrap();
                (x.values()[0] - y.values()[0]).powi(2)
            })
            .sum::<f64>()
            / reps as f64;
        assert!((d0 - 2.0).abs() / 2.0 < 0.02, "d0={d0}");

        let power = Arc::new(
            ProcessSpec::new(
                InnovationModel::IidGaussian { sd: 1.0 },
                MaDesign::PowerLaw {
                    p: 4.0,
                    truncation: 400,
                },
            )
            .unwrap(),
        );
        let reps = 20_000;
        let d5: f64 = (0..reps)
            .map(|r| {
                let (x, y) = gen_coupled_pair(&power, 5, 1, 22, r).unwrap();
                (x.values()[0] - y.values()[0]).powi(2)
            })
            .sum::<f64>()
            / reps as f64;
        let expected = 2.0 * 5f64.powi(-8);
        assert!((d5 - expected).abs() / expected < 0.05, "d5={d5:e}");
    }

    #[test]
    fn spec_round_trips_through_toml() {
        let spec = ProcessSpec::garch_design(2.5).unwrap().with_label("garch-p2.5");
        let text = toml::to_string(&spec).unwrap();
        let back: ProcessSpec = toml::from_str(&text).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn path_csv_round_trip() {
        let path = SamplePath::from_values(vec![1.5, -0.25, 3.0]).unwrap();
        let mut buf = Vec::new();
        path.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("t,x\n1,1.5\n"));
        let back = SamplePath::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.values(), path.values());
    }
}

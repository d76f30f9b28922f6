//! The two conditional posterior targets and the cached evaluators the
//! sampler uses for them.
//!
//! Stage 1 targets the marginal parameters alone: the product of
//! Projected Gamma densities times their prior, with no copula factor.
//! Stage 2 targets the copula parameters given fixed marginal parameters:
//! the product of copula densities at the marginal CDF values times the
//! copula prior.

use crate::copula::{CopulaParams, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::joint_model::{marginal_tails, Dataset};
use crate::numerics::{ln_beta, normal_quantile_tails, t_log_pdf, t_quantile_tails, SquareMatrix};
use crate::projected_gamma::MarginalParams;

use super::prior::{log_prior_copula, log_prior_marginals, MarginalPrior, PriorSpec};

fn check_dims(m: usize, data: &Dataset) -> Result<()> {
    if data.n_cols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: data.n_cols(),
        });
    }
    Ok(())
}

/// Unnormalised log posterior of `ω_Θ` for stage 1.
pub fn stage1_target(omega: &[MarginalParams], data: &Dataset, prior: &PriorSpec) -> Result<f64> {
    check_dims(omega.len(), data)?;
    let mut total = log_prior_marginals(omega, prior)?;
    for (j, p) in omega.iter().enumerate() {
        total += data.column(j).map(|t| p.log_pdf_unchecked(t)).sum::<f64>();
    }
    Ok(total)
}

/// `Σ_i ln c(F_1(θ_i1), …, F_m(θ_im) | ω_C)` for fixed `ω_Θ`.
pub fn stage2_log_likelihood(
    copula: &CopulaParams,
    omega: &[MarginalParams],
    data: &Dataset,
) -> Result<f64> {
    check_dims(omega.len(), data)?;
    if copula.dim() != omega.len() {
        return Err(Error::DimensionMismatch {
            expected: copula.dim(),
            actual: omega.len(),
        });
    }
    Ok(data
        .rows()
        .map(|row| copula.log_density_tails(&marginal_tails(row, omega)))
        .sum())
}

/// Unnormalised log posterior of `ω_C` given `ω_Θ` for stage 2.
pub fn stage2_target(
    copula: &CopulaParams,
    omega: &[MarginalParams],
    data: &Dataset,
    prior: &PriorSpec,
) -> Result<f64> {
    Ok(stage2_log_likelihood(copula, omega, data)? + log_prior_copula(copula, prior)?)
}

/// Sufficient statistics of one data column for the Projected Gamma
/// likelihood. Only the `Σ ln(cos θ + β sin θ)` term needs a pass over the
/// data for each new `β`.
#[derive(Debug, Clone)]
pub(crate) struct ColumnStats {
    n: f64,
    sum_ln_cos: f64,
    sum_ln_sin: f64,
    /// `tan θ_i`
    tangents: Vec<f64>,
}

impl ColumnStats {
    pub(crate) fn new(column: impl Iterator<Item = f64>) -> Self {
        let mut n = 0.0;
        let mut sum_ln_cos = 0.0;
        let mut sum_ln_sin = 0.0;
        let mut tangents = Vec::new();
        for t in column {
            let (s, c) = t.sin_cos();
            n += 1.0;
            sum_ln_cos += c.ln();
            sum_ln_sin += s.ln();
            tangents.push(s / c);
        }
        ColumnStats {
            n,
            sum_ln_cos,
            sum_ln_sin,
            tangents,
        }
    }

    /// `Σ_i ln(cos θ_i + β sin θ_i)`.
    pub(crate) fn sum_ln_mix(&self, beta: f64) -> f64 {
        self.sum_ln_cos + self.tangents.iter().map(|t| (beta * t).ln_1p()).sum::<f64>()
    }

    /// Column log likelihood given a precomputed `sum_ln_mix(beta)`.
    pub(crate) fn log_likelihood(&self, alpha1: f64, alpha2: f64, beta: f64, ln_mix: f64) -> f64 {
        self.n * (alpha2 * beta.ln() - ln_beta(alpha1, alpha2))
            + (alpha1 - 1.0) * self.sum_ln_cos
            + (alpha2 - 1.0) * self.sum_ln_sin
            - (alpha1 + alpha2) * ln_mix
    }

    /// Stage-1 log target for one column on the log-parameter scale,
    /// including the Jacobian of the log transform.
    pub(crate) fn log_target(&self, log_params: [f64; 3], prior: &MarginalPrior) -> f64 {
        let [a1, a2, b] = log_params.map(f64::exp);
        self.log_likelihood(a1, a2, b, self.sum_ln_mix(b))
            + prior.log_pdf_unchecked(a1, a2, b)
            + log_params.iter().sum::<f64>()
    }
}

/// Stage-2 state for a fixed `ω_Θ`: clamped CDF pairs for every cell and
/// the elliptical scores at the current `ν`.
#[derive(Debug, Clone)]
pub(crate) struct CopulaWorkspace {
    n: usize,
    m: usize,
    tails: Vec<(f64, f64)>,
    scores: Vec<f64>,
    /// `Σ_ij ln t(z_ij | ν)` for the t family.
    marginal_score_sum: f64,
    /// Scatter matrix `Σ_i z_i z_iᵀ` for the Gaussian family.
    scatter: Option<SquareMatrix>,
}

impl CopulaWorkspace {
    pub(crate) fn new(data: &Dataset, omega: &[MarginalParams], copula: &CopulaParams) -> Self {
        let n = data.n_rows();
        let m = data.n_cols();
        let mut tails = Vec::with_capacity(n * m);
        for row in data.rows() {
            tails.extend(marginal_tails(row, omega));
        }
        let mut ws = CopulaWorkspace {
            n,
            m,
            tails,
            scores: Vec::new(),
            marginal_score_sum: 0.0,
            scatter: None,
        };
        ws.rescore(copula);
        ws
    }

    /// Recomputes the scores for the family (and `ν`) of `copula`.
    pub(crate) fn rescore(&mut self, copula: &CopulaParams) {
        match copula {
            CopulaParams::Gaussian { .. } => {
                self.scores = self
                    .tails
                    .iter()
                    .map(|&(lo, up)| normal_quantile_tails(lo, up))
                    .collect();
                let mut s = SquareMatrix::identity(self.m);
                for a in 0..self.m {
                    for b in 0..=a {
                        let v: f64 = self
                            .scores
                            .chunks(self.m)
                            .map(|z| z[a] * z[b])
                            .sum();
                        s.set(a, b, v);
                        s.set(b, a, v);
                    }
                }
                self.scatter = Some(s);
                self.marginal_score_sum = 0.0;
            }
            CopulaParams::StudentT { nu, .. } => {
                self.scores = self
                    .tails
                    .iter()
                    .map(|&(lo, up)| t_quantile_tails(lo, up, *nu))
                    .collect();
                self.marginal_score_sum = self.scores.iter().map(|&z| t_log_pdf(z, *nu)).sum();
                self.scatter = None;
            }
        }
    }

    /// Stage-2 log likelihood at `copula`, which must share this
    /// workspace's family and `ν`.
    pub(crate) fn log_likelihood(&self, copula: &CopulaParams) -> f64 {
        let n = self.n as f64;
        match copula {
            CopulaParams::Gaussian { correlation } => {
                let scatter = self.scatter.as_ref().expect("gaussian workspace");
                gaussian_scatter_log_likelihood(n, correlation, scatter)
            }
            CopulaParams::StudentT { nu, correlation } => {
                let factor = correlation.factor();
                let m = self.m as f64;
                let ln_sum: f64 = self
                    .scores
                    .chunks(self.m)
                    .map(|z| (factor.quadratic_form(z) / nu).ln_1p())
                    .sum();
                n * (crate::numerics::t_log_norm(*nu, self.m) - 0.5 * factor.log_det())
                    - 0.5 * (nu + m) * ln_sum
                    - self.marginal_score_sum
            }
        }
    }
}

fn gaussian_scatter_log_likelihood(n: f64, r: &CorrelationMatrix, scatter: &SquareMatrix) -> f64 {
    let inv = r.factor().inverse();
    let m = r.dim();
    let mut trace = 0.0;
    for a in 0..m {
        for b in 0..m {
            let identity = if a == b { 1.0 } else { 0.0 };
            trace += (inv.get(a, b) - identity) * scatter.get(a, b);
        }
    }
    -0.5 * n * r.factor().log_det() - 0.5 * trace
}

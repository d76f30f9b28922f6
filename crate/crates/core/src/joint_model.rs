//! The copula-coupled Projected Gamma model: Projected Gamma marginals joined
//! by a Gaussian or t copula.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::copula::{CopulaFamily, CopulaParams};
use crate::error::{Error, Result};
use crate::projected_gamma::MarginalParams;

/// Clamp applied to marginal CDF values before the quantile transform.
pub const CDF_CLAMP: f64 = 1e-12;

/// Full parameter set `(ω_Θ, ω_C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    marginals: Vec<MarginalParams>,
    copula: CopulaParams,
}

impl ModelParams {
    pub fn new(marginals: Vec<MarginalParams>, copula: CopulaParams) -> Result<Self> {
        if marginals.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "the model needs at least 2 marginals, got {}",
                marginals.len()
            )));
        }
        if marginals.len() != copula.dim() {
            return Err(Error::DimensionMismatch {
                expected: copula.dim(),
                actual: marginals.len(),
            });
        }
        Ok(ModelParams { marginals, copula })
    }

    pub fn marginals(&self) -> &[MarginalParams] {
        &self.marginals
    }

    pub fn copula(&self) -> &CopulaParams {
        &self.copula
    }

    pub fn family(&self) -> CopulaFamily {
        self.copula.family()
    }

    pub fn dim(&self) -> usize {
        self.marginals.len()
    }

    /// Bivariate sub-model on coordinates `(a, b)`.
    pub fn pair(&self, a: usize, b: usize) -> Result<Self> {
        let m = self.dim();
        if a >= m || b >= m || a == b {
            return Err(Error::InvalidParameter(format!(
                "axis pair ({a}, {b}) invalid for a {m}-variate model"
            )));
        }
        ModelParams::new(
            vec![self.marginals[a], self.marginals[b]],
            self.copula.pair(a, b)?,
        )
    }
}

/// `n × m` matrix of interior angles, one row per observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    n: usize,
    m: usize,
    values: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl Dataset {
    /// Row-major construction; every value must lie strictly inside `(0, π/2)`.
    pub fn new(n: usize, m: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Data("dataset must have at least one row and one column".into()));
        }
        if values.len() != n * m {
            return Err(Error::DimensionMismatch {
                expected: n * m,
                actual: values.len(),
            });
        }
        let bad: Vec<String> = values
            .chunks(m)
            .enumerate()
            .filter_map(|(i, row)| {
                row.iter()
                    .position(|&v| !(v > 0.0 && v < FRAC_PI_2))
                    .map(|j| format!("row {} column {}: {}", i + 1, j + 1, row[j]))
            })
            .collect();
        if !bad.is_empty() {
            const SHOWN: usize = 10;
            let mut msg = format!(
                "{} row(s) have angles outside the open arc (0, pi/2): {}",
                bad.len(),
                bad.iter().take(SHOWN).cloned().collect::<Vec<_>>().join("; ")
            );
            if bad.len() > SHOWN {
                msg.push_str("; ...");
            }
            return Err(Error::Data(msg));
        }
        Ok(Dataset {
            n,
            m,
            values,
            labels: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != m) {
            return Err(Error::Data(format!(
                "row {} has {} values, expected {m}",
                i + 1,
                rows[i].len()
            )));
        }
        Self::new(rows.len(), m, rows.concat())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                actual: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.m
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.m..(i + 1) * self.m]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks(self.m)
    }

    pub fn column(&self, j: usize) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.values.iter().skip(j).step_by(self.m).copied()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Dataset restricted to the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if let Some(&c) = cols.iter().find(|&&c| c >= self.m) {
            return Err(Error::InvalidParameter(format!(
                "column {c} out of range for {} columns",
                self.m
            )));
        }
        let values = self
            .rows()
            .flat_map(|row| cols.iter().map(move |&c| row[c]))
            .collect();
        Self::new(self.n, cols.len(), values)
    }
}

/// Clamps a `(p, 1 - p)` pair into `[ε, 1 - ε]`.
#[inline]
pub(crate) fn clamp_tails((lo, up): (f64, f64)) -> (f64, f64) {
    let clamped = if lo < CDF_CLAMP {
        (CDF_CLAMP, 1.0 - CDF_CLAMP)
    } else if up < CDF_CLAMP {
        (1.0 - CDF_CLAMP, CDF_CLAMP)
    } else {
        return (lo, up);
    };
    log::debug!("CDF value ({lo}, {up}) clamped to {clamped:?}");
    debug_assert!(clamped.0 >= CDF_CLAMP && clamped.1 >= CDF_CLAMP);
    clamped
}

/// Clamped marginal CDF pairs for one observation.
pub(crate) fn marginal_tails(theta: &[f64], marginals: &[MarginalParams]) -> Vec<(f64, f64)> {
    theta
        .iter()
        .zip(marginals)
        .map(|(&t, p)| clamp_tails(p.cdf_tails(t)))
        .collect()
}

pub(crate) fn joint_log_pdf_unchecked(theta: &[f64], params: &ModelParams) -> f64 {
    let tails = marginal_tails(theta, &params.marginals);
    let mut total = params.copula.log_density_tails(&tails);
    for (&t, p) in theta.iter().zip(&params.marginals) {
        total += p.log_pdf_unchecked(t);
    }
    total
}

fn check_row(theta: &[f64], m: usize) -> Result<()> {
    if theta.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: theta.len(),
        });
    }
    if let Some(&t) = theta.iter().find(|&&t| !(t > 0.0 && t < FRAC_PI_2)) {
        return Err(Error::domain(
            "joint_log_pdf",
            format!("angle {t} is not strictly inside (0, pi/2)"),
        ));
    }
    Ok(())
}

/// Joint log density of one observation.
pub fn joint_log_pdf(theta: &[f64], params: &ModelParams) -> Result<f64> {
    check_row(theta, params.dim())?;
    Ok(joint_log_pdf_unchecked(theta, params))
}

/// Simulates `n` observations through the copula and exact marginal quantiles.
pub fn simulate_dataset<R: Rng + ?Sized>(
    params: &ModelParams,
    n: usize,
    rng: &mut R,
) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be positive".into()));
    }
    let m = params.dim();
    let mut values = Vec::with_capacity(n * m);
    let mut row = vec![0.0; m];
    for _ in 0..n {
        loop {
            let tails = params.copula.sample_tails(rng);
            for ((slot, &(lo, up)), p) in row.iter_mut().zip(&tails).zip(&params.marginals) {
                *slot = p.quantile_tails(lo, up);
            }
            // Scores beyond ~38 standard deviations map onto the boundary.
            if row.iter().all(|&t| t > 0.0 && t < FRAC_PI_2) {
                break;
            }
        }
        values.extend_from_slice(&row);
    }
    Dataset::new(n, m, values)
}

/// `Σ_i ln f(θ_i | ω_Θ, ω_C)`, reduced in row order.
pub fn log_likelihood(data: &Dataset, params: &ModelParams) -> Result<f64> {
    if data.n_cols() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            actual: data.n_cols(),
        });
    }
    let mut total = 0.0;
    for (i, row) in data.rows().enumerate() {
        let v = joint_log_pdf_unchecked(row, params);
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("log density of row {} is {v}", i + 1)));
        }
        total += v;
    }
    Ok(total)
}

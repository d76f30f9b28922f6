//! Gaussian and Student t implicit copulas.
//!
//! Densities take probability-scale arguments and apply the quantile
//! transform themselves. Internally every probability travels as a
//! `(p, 1 - p)` pair so that values close to one keep their precision.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    cholesky, normal_quantile_tails, normal_tails, t_log_norm, t_log_pdf, t_quantile_tails,
    t_tails, LowerTriangularFactor, SquareMatrix,
};

/// Symmetric positive-definite matrix with unit diagonal and its cached
/// Cholesky factor.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    matrix: SquareMatrix,
    factor: LowerTriangularFactor,
}

impl CorrelationMatrix {
    pub fn new(matrix: SquareMatrix) -> Result<Self> {
        let m = matrix.dim();
        if m < 2 {
            return Err(Error::InvalidParameter(format!(
                "correlation matrix dimension {m} must be at least 2"
            )));
        }
        for i in 0..m {
            if matrix.get(i, i) != 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "diagonal entry {i} is {} (must be 1)",
                    matrix.get(i, i)
                )));
            }
            for j in 0..i {
                let (a, b) = (matrix.get(i, j), matrix.get(j, i));
                if a != b {
                    return Err(Error::InvalidParameter(format!(
                        "correlation matrix is not symmetric at ({i}, {j})"
                    )));
                }
                if !(a > -1.0 && a < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "correlation ({}, {}) = {a} outside (-1, 1)",
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        let factor = cholesky(&matrix)?;
        Ok(CorrelationMatrix { matrix, factor })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(SquareMatrix::identity(dim))
    }

    /// Builds a matrix from its strict upper triangle in row order:
    /// `ρ12, ρ13, …, ρ1m, ρ23, …`.
    pub fn from_upper(dim: usize, upper: &[f64]) -> Result<Self> {
        let expected = dim * dim.saturating_sub(1) / 2;
        if upper.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: upper.len(),
            });
        }
        let mut matrix = SquareMatrix::identity(dim);
        for ((r, q), &v) in upper_pairs(dim).zip(upper) {
            matrix.set(r, q, v);
            matrix.set(q, r, v);
        }
        Self::new(matrix)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    #[inline]
    pub fn get(&self, r: usize, q: usize) -> f64 {
        self.matrix.get(r, q)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn factor(&self) -> &LowerTriangularFactor {
        &self.factor
    }

    /// Strict upper triangle in the order used by [`CorrelationMatrix::from_upper`].
    pub fn upper(&self) -> Vec<f64> {
        upper_pairs(self.dim()).map(|(r, q)| self.get(r, q)).collect()
    }

    /// Copy with entry `(r, q)` (and its mirror) replaced. Fails with
    /// `NotPositiveDefinite` when the result leaves the PD region.
    pub fn with_entry(&self, r: usize, q: usize, value: f64) -> Result<Self> {
        if r == q || r >= self.dim() || q >= self.dim() {
            return Err(Error::InvalidParameter(format!("invalid off-diagonal index ({r}, {q})")));
        }
        let mut matrix = self.matrix.clone();
        matrix.set(r, q, value);
        matrix.set(q, r, value);
        Self::new(matrix)
    }

    /// The 2×2 correlation between coordinates `a` and `b`.
    pub fn pair(&self, a: usize, b: usize) -> Result<Self> {
        Self::from_upper(2, &[self.get(a, b)])
    }
}

impl Serialize for CorrelationMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CorrelationMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        SquareMatrix::from_rows(&rows)
            .and_then(CorrelationMatrix::new)
            .map_err(serde::de::Error::custom)
    }
}

/// `(r, q)` index pairs with `r < q`, in row order.
pub fn upper_pairs(dim: usize) -> impl Iterator<Item = (usize, usize)> + Clone {
    (0..dim).flat_map(move |r| ((r + 1)..dim).map(move |q| (r, q)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CopulaFamily {
    #[serde(rename = "gaussian")]
    Gaussian,
    #[serde(rename = "t")]
    StudentT,
}

impl fmt::Display for CopulaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CopulaFamily::Gaussian => "gaussian",
            CopulaFamily::StudentT => "t",
        })
    }
}

impl FromStr for CopulaFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" | "g" => Ok(CopulaFamily::Gaussian),
            "t" | "student" | "student-t" | "student_t" => Ok(CopulaFamily::StudentT),
            other => Err(Error::Config(format!("unknown copula family '{other}'"))),
        }
    }
}

/// Copula parameters `ω_C`: `R` for the Gaussian family, `(ν, R)` for t.
#[derive(Debug, Clone, PartialEq)]
pub enum CopulaParams {
    Gaussian { correlation: CorrelationMatrix },
    StudentT { nu: f64, correlation: CorrelationMatrix },
}

impl CopulaParams {
    pub fn gaussian(correlation: CorrelationMatrix) -> Self {
        CopulaParams::Gaussian { correlation }
    }

    /// t copula; `nu` must exceed 2 so that `R` is a correlation matrix.
    pub fn student_t(nu: f64, correlation: CorrelationMatrix) -> Result<Self> {
        if !(nu.is_finite() && nu > 2.0) {
            return Err(Error::InvalidParameter(format!(
                "degrees of freedom {nu} must be finite and greater than 2"
            )));
        }
        Ok(CopulaParams::StudentT { nu, correlation })
    }

    /// Independence copula of the given family; t starts at `nu`.
    pub fn independent(family: CopulaFamily, dim: usize, nu: f64) -> Result<Self> {
        let correlation = CorrelationMatrix::identity(dim)?;
        match family {
            CopulaFamily::Gaussian => Ok(Self::gaussian(correlation)),
            CopulaFamily::StudentT => Self::student_t(nu, correlation),
        }
    }

    pub fn family(&self) -> CopulaFamily {
        match self {
            CopulaParams::Gaussian { .. } => CopulaFamily::Gaussian,
            CopulaParams::StudentT { .. } => CopulaFamily::StudentT,
        }
    }

    pub fn correlation(&self) -> &CorrelationMatrix {
        match self {
            CopulaParams::Gaussian { correlation } | CopulaParams::StudentT { correlation, .. } => {
                correlation
            }
        }
    }

    pub fn nu(&self) -> Option<f64> {
        match self {
            CopulaParams::Gaussian { .. } => None,
            CopulaParams::StudentT { nu, .. } => Some(*nu),
        }
    }

    pub fn dim(&self) -> usize {
        self.correlation().dim()
    }

    pub fn with_correlation(&self, correlation: CorrelationMatrix) -> Self {
        match self {
            CopulaParams::Gaussian { .. } => CopulaParams::Gaussian { correlation },
            CopulaParams::StudentT { nu, .. } => CopulaParams::StudentT {
                nu: *nu,
                correlation,
            },
        }
    }

    /// Bivariate margin on coordinates `(a, b)`: same family, same `ν`,
    /// 2×2 sub-correlation.
    pub fn pair(&self, a: usize, b: usize) -> Result<Self> {
        Ok(self.with_correlation(self.correlation().pair(a, b)?))
    }

    /// Copula log density at a probability vector.
    pub fn log_density(&self, u: &[f64]) -> Result<f64> {
        let tails = checked_tails(u, self.dim())?;
        Ok(self.log_density_tails(&tails))
    }

    /// Log density from `(u, 1 - u)` pairs; no validation.
    pub(crate) fn log_density_tails(&self, tails: &[(f64, f64)]) -> f64 {
        let z = self.scores(tails);
        self.log_density_scores(&z)
    }

    /// Quantile transform of `(u, 1 - u)` pairs to the elliptical scale.
    pub(crate) fn scores(&self, tails: &[(f64, f64)]) -> Vec<f64> {
        match self {
            CopulaParams::Gaussian { .. } => tails
                .iter()
                .map(|&(lo, up)| normal_quantile_tails(lo, up))
                .collect(),
            CopulaParams::StudentT { nu, .. } => tails
                .iter()
                .map(|&(lo, up)| t_quantile_tails(lo, up, *nu))
                .collect(),
        }
    }

    /// Copula log density expressed through elliptical scores `z`.
    pub(crate) fn log_density_scores(&self, z: &[f64]) -> f64 {
        match self {
            CopulaParams::Gaussian { correlation } => gaussian_log_ratio(z, correlation.factor()),
            CopulaParams::StudentT { nu, correlation } => {
                t_log_ratio(z, *nu, correlation.factor())
            }
        }
    }

    /// Draws scores from the underlying elliptical law and returns their
    /// `(u, 1 - u)` pairs.
    pub(crate) fn sample_tails<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<(f64, f64)> {
        let m = self.dim();
        let xi: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let z = self.correlation().factor().multiply(&xi);
        match self {
            CopulaParams::Gaussian { .. } => z.iter().map(|&v| normal_tails(v)).collect(),
            CopulaParams::StudentT { nu, .. } => {
                let w: f64 = ChiSquared::new(*nu).expect("nu > 2").sample(rng);
                let scale = (nu / w).sqrt();
                z.iter().map(|&v| t_tails(v * scale, *nu)).collect()
            }
        }
    }
}

// ln c_G = -½ ln|R| - ½ zᵀ(R⁻¹ - I)z. Written so that R = I gives exactly 0.
fn gaussian_log_ratio(z: &[f64], factor: &LowerTriangularFactor) -> f64 {
    let q = factor.quadratic_form(z);
    let ss: f64 = z.iter().map(|v| v * v).sum();
    -0.5 * factor.log_det() - 0.5 * (q - ss)
}

fn t_log_ratio(z: &[f64], nu: f64, factor: &LowerTriangularFactor) -> f64 {
    let m = factor.dim();
    let joint = t_log_norm(nu, m)
        - 0.5 * factor.log_det()
        - 0.5 * (nu + m as f64) * (factor.quadratic_form(z) / nu).ln_1p();
    joint - z.iter().map(|&v| t_log_pdf(v, nu)).sum::<f64>()
}

fn checked_tails(u: &[f64], dim: usize) -> Result<Vec<(f64, f64)>> {
    if u.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: u.len(),
        });
    }
    u.iter()
        .map(|&v| {
            if v > 0.0 && v < 1.0 {
                Ok((v, 1.0 - v))
            } else {
                Err(Error::domain(
                    "copula density",
                    format!("u = {v} must lie strictly inside (0, 1)"),
                ))
            }
        })
        .collect()
}

/// `ln c_G(u | R)`.
pub fn gaussian_copula_log_density(u: &[f64], correlation: &CorrelationMatrix) -> Result<f64> {
    CopulaParams::gaussian(correlation.clone()).log_density(u)
}

/// `ln c_T(u | ν, R)`.
pub fn t_copula_log_density(u: &[f64], nu: f64, correlation: &CorrelationMatrix) -> Result<f64> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::domain("t_copula_log_density", format!("nu = {nu} must be positive")));
    }
    let tails = checked_tails(u, correlation.dim())?;
    let z: Vec<f64> = tails
        .iter()
        .map(|&(lo, up)| t_quantile_tails(lo, up, nu))
        .collect();
    Ok(t_log_ratio(&z, nu, correlation.factor()))
}

/// One draw from the copula on the open unit hypercube.
pub fn copula_sample<R: Rng + ?Sized>(params: &CopulaParams, rng: &mut R) -> Vec<f64> {
    const LO: f64 = f64::MIN_POSITIVE;
    const HI: f64 = 1.0 - f64::EPSILON / 2.0;
    params
        .sample_tails(rng)
        .into_iter()
        .map(|(lo, _)| lo.clamp(LO, HI))
        .collect()
}

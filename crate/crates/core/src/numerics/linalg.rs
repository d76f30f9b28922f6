//! Small dense matrices, Cholesky factorisation and elliptical log-densities.

use serde::{Deserialize, Serialize};

use super::normal::LN_SQRT_2PI;
use super::student_t::t_log_norm;
use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        SquareMatrix { dim, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(SquareMatrix { dim, data })
    }

    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        Ok(SquareMatrix { dim, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| {
            (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol * (1.0 + self.get(i, j).abs()))
        })
    }

    pub fn max_abs_diff(&self, other: &SquareMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = A`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangularFactor {
    entries: SquareMatrix,
}

impl LowerTriangularFactor {
    #[inline]
    pub fn dim(&self) -> usize {
        self.entries.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries.get(i, j)
    }

    pub fn entries(&self) -> &SquareMatrix {
        &self.entries
    }

    /// `ln det(L Lᵀ)`.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim()).map(|i| self.get(i, i).ln()).sum::<f64>()
    }

    /// Solves `L x = b` by forward substitution.
    pub fn forward_solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut x = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            for (j, xj) in x.iter().enumerate().take(i) {
                s -= self.get(i, j) * xj;
            }
            x[i] = s / self.get(i, i);
        }
        x
    }

    /// `zᵀ (L Lᵀ)^{-1} z`.
    pub fn quadratic_form(&self, z: &[f64]) -> f64 {
        let n = self.dim();
        let mut x = [0.0f64; 16];
        if n <= x.len() {
            // Allocation-free path for the small dimensions used in practice.
            let mut acc = 0.0;
            for i in 0..n {
                let mut s = z[i];
                for j in 0..i {
                    s -= self.get(i, j) * x[j];
                }
                x[i] = s / self.get(i, i);
                acc += x[i] * x[i];
            }
            acc
        } else {
            self.forward_solve(z).iter().map(|v| v * v).sum()
        }
    }

    /// `L v`.
    pub fn multiply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..=i).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Rebuilds `L Lᵀ`.
    pub fn reconstruct(&self) -> SquareMatrix {
        let n = self.dim();
        let mut out = SquareMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                let s = (0..=i.min(j)).map(|k| self.get(i, k) * self.get(j, k)).sum();
                out.set(i, j, s);
            }
        }
        out
    }

    /// `(L Lᵀ)^{-1}`.
    pub fn inverse(&self) -> SquareMatrix {
        let n = self.dim();
        let mut linv = SquareMatrix::identity(n);
        for col in 0..n {
            let mut e = vec![0.0; n];
            e[col] = 1.0;
            for (row, v) in self.forward_solve(&e).into_iter().enumerate() {
                linv.set(row, col, v);
            }
        }
        let mut out = SquareMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                let s = (i.max(j)..n).map(|k| linv.get(k, i) * linv.get(k, j)).sum();
                out.set(i, j, s);
            }
        }
        out
    }
}

/// Cholesky factorisation of a symmetric positive-definite matrix.
///
/// Failure is the positive-definiteness test used for correlation proposals.
pub fn cholesky(matrix: &SquareMatrix) -> Result<LowerTriangularFactor> {
    if !matrix.is_symmetric(1e-12) {
        return Err(Error::InvalidParameter("matrix is not symmetric".into()));
    }
    let n = matrix.dim();
    let mut l = SquareMatrix {
        dim: n,
        data: vec![0.0; n * n],
    };
    for j in 0..n {
        let mut d = matrix.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let djj = d.sqrt();
        l.set(j, j, djj);
        for i in (j + 1)..n {
            let mut s = matrix.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / djj);
        }
    }
    Ok(LowerTriangularFactor { entries: l })
}

fn check_len(z: &[f64], factor: &LowerTriangularFactor) -> Result<()> {
    if z.len() != factor.dim() {
        return Err(Error::DimensionMismatch {
            expected: factor.dim(),
            actual: z.len(),
        });
    }
    Ok(())
}

/// `ln φ_m(z | R)` for a zero-mean normal with covariance `L Lᵀ`.
pub fn mvn_log_pdf(z: &[f64], factor: &LowerTriangularFactor) -> Result<f64> {
    check_len(z, factor)?;
    Ok(mvn_log_pdf_unchecked(z, factor))
}

pub(crate) fn mvn_log_pdf_unchecked(z: &[f64], factor: &LowerTriangularFactor) -> f64 {
    let m = factor.dim() as f64;
    -m * LN_SQRT_2PI - 0.5 * factor.log_det() - 0.5 * factor.quadratic_form(z)
}

/// `ln t_m(z | ν, R)`: standard multivariate t with scale matrix `L Lᵀ`.
pub fn mvt_log_pdf(z: &[f64], nu: f64, factor: &LowerTriangularFactor) -> Result<f64> {
    check_len(z, factor)?;
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::domain("mvt_log_pdf", format!("degrees of freedom {nu} must be positive")));
    }
    Ok(mvt_log_pdf_unchecked(z, nu, factor))
}

pub(crate) fn mvt_log_pdf_unchecked(z: &[f64], nu: f64, factor: &LowerTriangularFactor) -> f64 {
    let m = factor.dim();
    t_log_norm(nu, m) - 0.5 * factor.log_det()
        - 0.5 * (nu + m as f64) * (factor.quadratic_form(z) / nu).ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn corr2(rho: f64) -> SquareMatrix {
        SquareMatrix::from_rows(&[vec![1.0, rho], vec![rho, 1.0]]).unwrap()
    }

    #[test]
    fn cholesky_identity() {
        let l = cholesky(&SquareMatrix::identity(3)).unwrap();
        assert_eq!(l.entries(), &SquareMatrix::identity(3));
    }

    #[test]
    fn cholesky_two_by_two() {
        let l = cholesky(&corr2(0.7)).unwrap();
        assert_eq!(l.get(0, 0), 1.0);
        assert_eq!(l.get(0, 1), 0.0);
        assert!((l.get(1, 0) - 0.7).abs() < 1e-15);
        assert!((l.get(1, 1) - 0.714_142_842_854_285).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        assert!(matches!(
            cholesky(&corr2(1.2)),
            Err(Error::NotPositiveDefinite { pivot: 1, .. })
        ));
        assert!(matches!(cholesky(&corr2(1.0)), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn cholesky_rejects_asymmetric() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 0.2], vec![0.3, 1.0]]).unwrap();
        assert!(cholesky(&m).is_err());
    }

    #[test]
    fn inverse_is_inverse() {
        let a = SquareMatrix::from_rows(&[
            vec![1.0, 0.75, -0.75],
            vec![0.75, 1.0, -0.75],
            vec![-0.75, -0.75, 1.0],
        ])
        .unwrap();
        let inv = cholesky(&a).unwrap().inverse();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| a.get(i, k) * inv.get(k, j)).sum();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((s - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mvn_spot_values() {
        let id = cholesky(&SquareMatrix::identity(2)).unwrap();
        let v = mvn_log_pdf(&[0.0, 0.0], &id).unwrap();
        assert!((v + (2.0 * PI).ln()).abs() < 1e-14);
        let v = mvn_log_pdf(&[1.0, 1.0], &id).unwrap();
        assert!((v + (2.0 * PI).ln() + 1.0).abs() < 1e-14);
        let r = cholesky(&corr2(0.7)).unwrap();
        let v = mvn_log_pdf(&[0.0, 0.0], &r).unwrap();
        assert!((v + (2.0 * PI * 0.51f64.sqrt()).ln()).abs() < 1e-14);
    }

    #[test]
    fn dimension_mismatch() {
        let id = cholesky(&SquareMatrix::identity(2)).unwrap();
        assert!(matches!(
            mvn_log_pdf(&[0.0; 3], &id),
            Err(Error::DimensionMismatch { expected: 2, actual: 3 })
        ));
        assert!(mvt_log_pdf(&[0.0], 3.0, &id).is_err());
    }

    #[test]
    fn mvt_spot_values() {
        let id = cholesky(&SquareMatrix::identity(2)).unwrap();
        let v = mvt_log_pdf(&[0.0, 0.0], 3.0, &id).unwrap();
        assert!((v - (1.0 / (2.0 * PI)).ln()).abs() < 1e-13);
        let big = mvt_log_pdf(&[1.0, 1.0], 1e6, &id).unwrap();
        let normal = mvn_log_pdf(&[1.0, 1.0], &id).unwrap();
        assert!((big - normal).abs() < 1e-3);
    }
}

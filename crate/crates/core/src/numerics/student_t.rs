//! Univariate Student t distribution through the incomplete beta function.

use std::f64::consts::PI;

use super::special::{inc_beta_pair, inv_inc_beta_pair, ln_gamma};
use crate::error::{Error, Result};

fn check_dof(func: &'static str, nu: f64) -> Result<()> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::domain(func, format!("degrees of freedom {nu} must be positive")));
    }
    Ok(())
}

/// `T(x | ν)`.
pub fn student_t_cdf(x: f64, nu: f64) -> Result<f64> {
    check_dof("student_t_cdf", nu)?;
    if x.is_nan() {
        return Err(Error::domain("student_t_cdf", "x is NaN"));
    }
    Ok(t_tails(x, nu).0)
}

/// `T^{-1}(p | ν)` for `p` strictly inside `(0, 1)`.
pub fn student_t_quantile(p: f64, nu: f64) -> Result<f64> {
    check_dof("student_t_quantile", nu)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("student_t_quantile", format!("p = {p} must lie in (0, 1)")));
    }
    Ok(t_quantile_tails(p, 1.0 - p, nu))
}

/// `(T(x|ν), 1 - T(x|ν))`.
///
/// Uses `P(|X| > |x|) = I_w(ν/2, 1/2)` with `w = ν / (ν + x²)`.
pub(crate) fn t_tails(x: f64, nu: f64) -> (f64, f64) {
    let x2 = x * x;
    let w = nu / (nu + x2);
    let w_c = 1.0 / (1.0 + nu / x2);
    let (ib, _) = inc_beta_pair(w, w_c, 0.5 * nu, 0.5);
    let tail = 0.5 * ib;
    if x < 0.0 {
        (tail, 1.0 - tail)
    } else {
        (1.0 - tail, tail)
    }
}

/// Quantile from a lower/upper tail pair.
pub(crate) fn t_quantile_tails(lower: f64, upper: f64, nu: f64) -> f64 {
    let tail = lower.min(upper);
    if tail <= 0.0 {
        return if lower <= upper { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    let two_tail = 2.0 * tail;
    let (w, w_c) = inv_inc_beta_pair(two_tail, 1.0 - two_tail, 0.5 * nu, 0.5);
    let magnitude = (nu * w_c / w).sqrt();
    if lower <= upper {
        -magnitude
    } else {
        magnitude
    }
}

/// `ln t(x | ν)`.
pub(crate) fn t_log_pdf(x: f64, nu: f64) -> f64 {
    t_log_norm(nu, 1) - 0.5 * (nu + 1.0) * (x * x / nu).ln_1p()
}

/// Log normalising constant of the standard `m`-variate t density.
pub(crate) fn t_log_norm(nu: f64, dim: usize) -> f64 {
    let m = dim as f64;
    ln_gamma(0.5 * (nu + m)) - ln_gamma(0.5 * nu) - 0.5 * m * (nu * PI).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        assert_eq!(student_t_cdf(0.0, 4.0).unwrap(), 0.5);
        assert_eq!(student_t_quantile(0.5, 3.0).unwrap(), 0.0);
        assert!((student_t_cdf(1.0, 1.0).unwrap() - 0.75).abs() < 1e-14);
    }

    #[test]
    fn domain_errors() {
        assert!(student_t_cdf(1.0, 0.0).is_err());
        assert!(student_t_quantile(0.0, 3.0).is_err());
        assert!(student_t_quantile(1.0, 3.0).is_err());
        assert!(student_t_quantile(0.5, -1.0).is_err());
    }

    #[test]
    fn cauchy_quantile_closed_form() {
        for p in [0.01, 0.2, 0.4, 0.6, 0.95] {
            let q = student_t_quantile(p, 1.0).unwrap();
            let exact = (PI * (p - 0.5)).tan();
            assert!((q - exact).abs() < 1e-10 * exact.abs().max(1.0), "p = {p}");
        }
    }

    #[test]
    fn log_pdf_at_zero() {
        // t(0|3) = Γ(2) / (Γ(1.5) √(3π))
        let expected = -(ln_gamma(1.5) + 0.5 * (3.0 * PI).ln());
        assert!((t_log_pdf(0.0, 3.0) - expected).abs() < 1e-14);
    }

    #[test]
    fn tails_of_huge_argument() {
        let (lower, upper) = t_tails(1e200, 3.0);
        assert_eq!(lower, 1.0);
        assert_eq!(upper, 0.0);
        let (lower, upper) = t_tails(-1e200, 3.0);
        assert_eq!(lower, 0.0);
        assert_eq!(upper, 1.0);
    }
}

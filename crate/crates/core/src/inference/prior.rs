use serde::{Deserialize, Serialize};

use crate::copula::{upper_pairs, CopulaParams};
use crate::error::{Error, Result};
use crate::numerics::ln_gamma;
use crate::projected_gamma::MarginalParams;

/// Gamma density in the shape–rate parameterisation, `Ga(x | shape, rate)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct GammaPrior {
    shape: f64,
    rate: f64,
}

impl GammaPrior {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0 && rate.is_finite() && rate > 0.0) {
            return Err(Error::Config(format!(
                "gamma hyperparameters ({shape}, {rate}) must be positive"
            )));
        }
        Ok(GammaPrior { shape, rate })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn log_pdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::OutsideSupport(format!("gamma prior evaluated at {x}")));
        }
        Ok(self.log_pdf_unchecked(x))
    }

    #[inline]
    pub(crate) fn log_pdf_unchecked(&self, x: f64) -> f64 {
        self.shape * self.rate.ln() - ln_gamma(self.shape) + (self.shape - 1.0) * x.ln()
            - self.rate * x
    }
}

impl Default for GammaPrior {
    fn default() -> Self {
        GammaPrior {
            shape: 1.0,
            rate: 0.2,
        }
    }
}

impl TryFrom<[f64; 2]> for GammaPrior {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        GammaPrior::new(v[0], v[1])
    }
}

impl From<GammaPrior> for [f64; 2] {
    fn from(g: GammaPrior) -> [f64; 2] {
        [g.shape, g.rate]
    }
}

/// Independent gamma priors on `(α1, α2, β)` of one marginal.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MarginalPrior {
    pub alpha1: GammaPrior,
    pub alpha2: GammaPrior,
    pub beta: GammaPrior,
}

impl MarginalPrior {
    pub fn log_pdf(&self, p: &MarginalParams) -> Result<f64> {
        Ok(self.alpha1.log_pdf(p.alpha1())?
            + self.alpha2.log_pdf(p.alpha2())?
            + self.beta.log_pdf(p.beta())?)
    }

    #[inline]
    pub(crate) fn log_pdf_unchecked(&self, alpha1: f64, alpha2: f64, beta: f64) -> f64 {
        self.alpha1.log_pdf_unchecked(alpha1)
            + self.alpha2.log_pdf_unchecked(alpha2)
            + self.beta.log_pdf_unchecked(beta)
    }
}

/// Prior specification for both stages.
///
/// `marginals` holds either one entry shared by every marginal or exactly
/// one entry per marginal. Correlations get independent `Unif(-1, 1)`
/// priors restricted to the positive-definite region; for the t family
/// `ν - 2 ~ Ga(g, h)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PriorSpec {
    pub marginals: Vec<MarginalPrior>,
    pub nu_minus_two: GammaPrior,
}

impl Default for PriorSpec {
    fn default() -> Self {
        PriorSpec {
            marginals: vec![MarginalPrior::default()],
            nu_minus_two: GammaPrior::default(),
        }
    }
}

impl PriorSpec {
    pub fn validate(&self, m: usize) -> Result<()> {
        match self.marginals.len() {
            1 => Ok(()),
            k if k == m => Ok(()),
            k => Err(Error::Config(format!(
                "prior lists {k} marginal entries; expected 1 or {m}"
            ))),
        }
    }

    pub fn marginal(&self, j: usize) -> &MarginalPrior {
        if self.marginals.len() == 1 {
            &self.marginals[0]
        } else {
            &self.marginals[j]
        }
    }
}

/// `Σ_j ln p_j(ω_j)`.
pub fn log_prior_marginals(omega: &[MarginalParams], prior: &PriorSpec) -> Result<f64> {
    prior.validate(omega.len())?;
    omega
        .iter()
        .enumerate()
        .map(|(j, p)| prior.marginal(j).log_pdf(p))
        .sum()
}

/// Log prior of the copula parameters, up to the normalising constant of
/// the positive-definite restriction.
pub fn log_prior_copula(copula: &CopulaParams, prior: &PriorSpec) -> Result<f64> {
    let r = copula.correlation();
    let mut total = 0.0;
    for (a, b) in upper_pairs(r.dim()) {
        let rho = r.get(a, b);
        if !(rho > -1.0 && rho < 1.0) {
            return Err(Error::OutsideSupport(format!(
                "rho_{}_{} = {rho} outside (-1, 1)",
                a + 1,
                b + 1
            )));
        }
        total += 0.5f64.ln();
    }
    if let Some(nu) = copula.nu() {
        if !(nu > 2.0) {
            return Err(Error::OutsideSupport(format!("nu = {nu} must exceed 2")));
        }
        total += prior.nu_minus_two.log_pdf(nu - 2.0)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::CorrelationMatrix;

    #[test]
    fn exponential_prior_value() {
        let g = GammaPrior::default();
        assert!((g.log_pdf(2.0).unwrap() - (0.2f64.ln() - 0.4)).abs() < 1e-14);
        assert!(g.log_pdf(0.0).is_err());
    }

    #[test]
    fn marginal_prior_sum() {
        let p = MarginalParams::new(5.0, 5.0, 5.0).unwrap();
        let v = log_prior_marginals(&[p], &PriorSpec::default()).unwrap();
        assert!((v - 3.0 * (0.2f64.ln() - 1.0)).abs() < 1e-13);
        let q = MarginalParams::new(1.0, 2.0, 0.5).unwrap();
        let both = log_prior_marginals(&[p, q], &PriorSpec::default()).unwrap();
        let alone = log_prior_marginals(&[q], &PriorSpec::default()).unwrap();
        assert!((both - v - alone).abs() < 1e-13);
    }

    #[test]
    fn copula_prior_values() {
        let prior = PriorSpec::default();
        let g = CopulaParams::gaussian(CorrelationMatrix::from_upper(2, &[0.3]).unwrap());
        assert!((log_prior_copula(&g, &prior).unwrap() - 0.5f64.ln()).abs() < 1e-15);
        let t = CopulaParams::student_t(3.0, CorrelationMatrix::from_upper(2, &[0.3]).unwrap())
            .unwrap();
        let expected = 0.5f64.ln() + 0.2f64.ln() - 0.2;
        assert!((log_prior_copula(&t, &prior).unwrap() - expected).abs() < 1e-14);
        let g3 = CopulaParams::gaussian(
            CorrelationMatrix::from_upper(3, &[0.1, 0.2, 0.3]).unwrap(),
        );
        assert!((log_prior_copula(&g3, &prior).unwrap() - 3.0 * 0.5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn per_marginal_entries_must_match() {
        let prior = PriorSpec {
            marginals: vec![MarginalPrior::default(); 2],
            ..PriorSpec::default()
        };
        assert!(prior.validate(2).is_ok());
        assert!(prior.validate(3).is_err());
    }

    #[test]
    fn serde_defaults_and_unknown_keys() {
        let p: PriorSpec = serde_json::from_str("{}").unwrap();
        assert_eq!(p, PriorSpec::default());
        let p: PriorSpec =
            serde_json::from_str(r#"{"nu_minus_two": [2, 0.5], "marginals": [{"beta": [3, 1]}]}"#)
                .unwrap();
        assert_eq!(p.nu_minus_two, GammaPrior::new(2.0, 0.5).unwrap());
        assert_eq!(p.marginals[0].beta, GammaPrior::new(3.0, 1.0).unwrap());
        assert_eq!(p.marginals[0].alpha1, GammaPrior::default());
        assert!(serde_json::from_str::<PriorSpec>(r#"{"g": 1}"#).is_err());
        assert!(serde_json::from_str::<PriorSpec>(r#"{"nu_minus_two": [0, 1]}"#).is_err());
    }
}

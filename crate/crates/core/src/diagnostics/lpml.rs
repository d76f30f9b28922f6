use crate::error::{Error, Result};
use crate::inference::Chain;
use crate::joint_model::{joint_log_pdf_unchecked, Dataset};

fn check_dims(data: &Dataset, chain: &Chain) -> Result<()> {
    if chain.is_empty() {
        return Err(Error::Diagnostics("LPML needs a non-empty chain".into()));
    }
    if data.n_cols() != chain.dim() {
        return Err(Error::DimensionMismatch {
            expected: chain.dim(),
            actual: data.n_cols(),
        });
    }
    Ok(())
}

/// `ln CPO_i` for every observation, using the harmonic-mean estimator
/// `CPO_i = [M⁻¹ Σ_m 1 / f(θ_i | draw_m)]⁻¹` evaluated by log-sum-exp.
pub fn log_cpo(data: &Dataset, chain: &Chain) -> Result<Vec<f64>> {
    check_dims(data, chain)?;
    let n = data.n_rows();
    let big_m = chain.len();
    // Negated log-likelihoods, observation-major.
    let mut neg = vec![0.0; n * big_m];
    for (k, draw) in chain.draws().iter().enumerate() {
        for (i, row) in data.rows().enumerate() {
            neg[i * big_m + k] = -joint_log_pdf_unchecked(row, draw);
        }
    }
    let ln_m = (big_m as f64).ln();
    neg.chunks_mut(big_m)
        .enumerate()
        .map(|(i, vals)| {
            if let Some(k) = vals.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "log density of observation {} under draw {} is {}",
                    i + 1,
                    k + 1,
                    -vals[k]
                )));
            }
            // Sorting makes the sum independent of draw order.
            vals.sort_by(f64::total_cmp);
            let top = vals[big_m - 1];
            let s: f64 = vals.iter().map(|v| (v - top).exp()).sum();
            let v = -(top + s.ln() - ln_m);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite(format!("ln CPO of observation {} is {v}", i + 1)))
            }
        })
        .collect()
}

/// Log pseudo marginal likelihood, `Σ_i ln CPO_i`.
pub fn lpml(data: &Dataset, chain: &Chain) -> Result<f64> {
    Ok(log_cpo(data, chain)?.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::{CopulaParams, CorrelationMatrix};
    use crate::joint_model::{log_likelihood, ModelParams};
    use crate::projected_gamma::MarginalParams;

    fn model(rho: f64) -> ModelParams {
        ModelParams::new(
            vec![
                MarginalParams::new(2.0, 2.0, 1.0).unwrap(),
                MarginalParams::new(1.5, 3.0, 0.7).unwrap(),
            ],
            CopulaParams::gaussian(CorrelationMatrix::from_upper(2, &[rho]).unwrap()),
        )
        .unwrap()
    }

    fn data() -> Dataset {
        Dataset::from_rows(&[vec![0.3, 0.9], vec![1.2, 0.4], vec![0.7, 0.7]]).unwrap()
    }

    #[test]
    fn single_draw_equals_log_likelihood() {
        let chain = Chain::from_draws(vec![model(0.4)], vec![1]).unwrap();
        let v = lpml(&data(), &chain).unwrap();
        assert!((v - log_likelihood(&data(), &model(0.4)).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn harmonic_mean_of_two_draws() {
        let (a, b) = (model(0.2), model(-0.5));
        let chain = Chain::from_draws(vec![a.clone(), b.clone()], vec![1, 2]).unwrap();
        let d = data();
        let expected: f64 = d
            .rows()
            .map(|row| {
                let fa = crate::joint_log_pdf(row, &a).unwrap().exp();
                let fb = crate::joint_log_pdf(row, &b).unwrap().exp();
                (2.0 / (1.0 / fa + 1.0 / fb)).ln()
            })
            .sum();
        assert!((lpml(&d, &chain).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let chain = Chain::from_draws(vec![model(0.4)], vec![1]).unwrap();
        let d3 = Dataset::from_rows(&[vec![0.3, 0.9, 0.2]]).unwrap();
        assert!(lpml(&d3, &chain).is_err());
    }
}

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::inference::Chain;

use super::MIN_DIAGNOSTIC_DRAWS;

fn check_finite(draws: &[f64], what: &str) -> Result<()> {
    match draws.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::Diagnostics(format!(
            "{what}: draw {} is not finite ({})",
            i + 1,
            draws[i]
        ))),
        None => Ok(()),
    }
}

/// Linear interpolation between order statistics (the "type 7" sample
/// quantile).
fn sorted_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Equal-tailed credible interval at level `gamma`.
pub fn credible_interval(draws: &[f64], gamma: f64) -> Result<(f64, f64)> {
    if draws.len() < 2 {
        return Err(Error::Diagnostics(format!(
            "credible interval needs at least 2 draws, got {}",
            draws.len()
        )));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Diagnostics(format!("level {gamma} outside (0, 1)")));
    }
    check_finite(draws, "credible interval")?;
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    let lower = sorted_quantile(&sorted, 0.5 * (1.0 - gamma));
    let upper = sorted_quantile(&sorted, 0.5 * (1.0 + gamma));
    if lower == upper {
        log::warn!("degenerate credible interval ({lower}, {upper}): the draws are constant");
    }
    Ok((lower, upper))
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn autocovariance(x: &[f64], mu: f64, lag: usize) -> f64 {
    let n = x.len();
    x[..n - lag]
        .iter()
        .zip(&x[lag..])
        .map(|(a, b)| (a - mu) * (b - mu))
        .sum::<f64>()
        / n as f64
}

/// Returns `(γ0, σ²)` where `σ²` is the long-run variance from Geyer's
/// initial positive sequence.
fn long_run_variance(x: &[f64]) -> (f64, f64) {
    let n = x.len();
    let mu = mean(x);
    let g0 = autocovariance(x, mu, 0);
    let mut sigma2 = -g0;
    let mut t = 0;
    while 2 * t + 1 < n {
        let pair = autocovariance(x, mu, 2 * t) + autocovariance(x, mu, 2 * t + 1);
        if pair <= 0.0 {
            break;
        }
        sigma2 += 2.0 * pair;
        t += 1;
    }
    (g0, sigma2)
}

fn check_chain(draws: &[f64], what: &str) -> Result<()> {
    if draws.len() < MIN_DIAGNOSTIC_DRAWS {
        return Err(Error::Diagnostics(format!(
            "{what} needs at least {MIN_DIAGNOSTIC_DRAWS} draws, got {}",
            draws.len()
        )));
    }
    check_finite(draws, what)?;
    if draws.iter().all(|&v| v == draws[0]) {
        return Err(Error::Diagnostics(format!("{what}: chain has zero variance")));
    }
    Ok(())
}

/// Effective sample size with initial-positive-sequence truncation of the
/// autocorrelations.
pub fn effective_sample_size(draws: &[f64]) -> Result<f64> {
    check_chain(draws, "effective sample size")?;
    let (g0, sigma2) = long_run_variance(draws);
    if !(g0 > 0.0) {
        return Err(Error::Diagnostics("effective sample size: zero variance".into()));
    }
    Ok(draws.len() as f64 * g0 / sigma2.max(f64::MIN_POSITIVE))
}

/// Geweke z-score comparing the first 10% with the last 50% of the chain.
pub fn geweke_z(draws: &[f64]) -> Result<f64> {
    check_chain(draws, "Geweke diagnostic")?;
    let n = draws.len();
    let first = &draws[..n / 10];
    let last = &draws[n - n / 2..];
    let spectral = |x: &[f64]| {
        let (g0, s2) = long_run_variance(x);
        (if s2 > 0.0 { s2 } else { g0 }) / x.len() as f64
    };
    let var = spectral(first) + spectral(last);
    if !(var > 0.0) {
        return Err(Error::Diagnostics(
            "Geweke diagnostic: a chain segment has zero variance".into(),
        ));
    }
    Ok((mean(first) - mean(last)) / var.sqrt())
}

/// Summary of one parameter. `ess` and `geweke` are `None` when the chain
/// is too short or constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    pub mean: f64,
    pub sd: f64,
    pub lower: f64,
    pub upper: f64,
    pub ess: Option<f64>,
    pub geweke: Option<f64>,
}

impl ParamSummary {
    pub fn from_draws(draws: &[f64], level: f64) -> Result<Self> {
        let (lower, upper) = credible_interval(draws, level)?;
        let mu = mean(draws);
        let var = draws.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
        Ok(ParamSummary {
            mean: mu,
            sd: var.sqrt(),
            lower,
            upper,
            ess: effective_sample_size(draws).ok(),
            geweke: geweke_z(draws).ok(),
        })
    }

    pub fn covers(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Per-parameter posterior summaries of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub level: f64,
    pub n_draws: usize,
    pub params: Vec<(String, ParamSummary)>,
}

impl Summary {
    pub fn from_chain(chain: &Chain, level: f64) -> Result<Self> {
        let params = chain
            .param_names()
            .into_iter()
            .zip(chain.traces())
            .map(|(name, trace)| Ok((name, ParamSummary::from_draws(&trace, level)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Summary {
            level,
            n_draws: chain.len(),
            params,
        })
    }

    pub fn get(&self, name: &str) -> Option<&ParamSummary> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn to_json(&self) -> Value {
        let mut params = Map::new();
        for (name, s) in &self.params {
            params.insert(name.clone(), serde_json::to_value(s).expect("plain struct"));
        }
        let mut root = Map::new();
        root.insert("level".into(), self.level.into());
        root.insert("draws".into(), self.n_draws.into());
        root.insert("parameters".into(), Value::Object(params));
        Value::Object(root)
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = || Error::Data("malformed summary JSON".into());
        let level = value["level"].as_f64().ok_or_else(bad)?;
        let n_draws = value["draws"].as_u64().ok_or_else(bad)? as usize;
        let params = value["parameters"]
            .as_object()
            .ok_or_else(bad)?
            .iter()
            .map(|(k, v)| Ok((k.clone(), serde_json::from_value(v.clone())?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Summary {
            level,
            n_draws,
            params,
        })
    }
}

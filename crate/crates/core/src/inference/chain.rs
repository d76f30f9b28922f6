use std::fmt;

use serde::{Deserialize, Serialize};

use crate::copula::{upper_pairs, CopulaFamily, CopulaParams, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::joint_model::ModelParams;
use crate::projected_gamma::MarginalParams;

use super::sampler::McmcConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Stage1,
    Stage2,
    Combined,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Stage1 => "stage-1",
            Stage::Stage2 => "stage-2",
            Stage::Combined => "combined",
        })
    }
}

/// Acceptance rate of one update block after burn-in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceRate {
    pub block: String,
    pub rate: f64,
}

/// Column names of the flattened parameter vector, in chain CSV order.
pub fn param_names(m: usize, family: CopulaFamily) -> Vec<String> {
    let mut names = Vec::with_capacity(3 * m + m * (m - 1) / 2 + 1);
    for j in 1..=m {
        names.push(format!("alpha_{j}_1"));
        names.push(format!("alpha_{j}_2"));
        names.push(format!("beta_{j}"));
    }
    for (r, q) in upper_pairs(m) {
        names.push(format!("rho_{}_{}", r + 1, q + 1));
    }
    if family == CopulaFamily::StudentT {
        names.push("nu".to_string());
    }
    names
}

impl ModelParams {
    /// Flattened values in [`param_names`] order.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.marginals().iter().flat_map(|p| p.to_array()).collect();
        v.extend(self.copula().correlation().upper());
        if let Some(nu) = self.copula().nu() {
            v.push(nu);
        }
        v
    }

    pub fn from_flat(m: usize, family: CopulaFamily, values: &[f64]) -> Result<Self> {
        let expected = param_names(m, family).len();
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: values.len(),
            });
        }
        let marginals = values[..3 * m]
            .chunks(3)
            .map(|c| MarginalParams::new(c[0], c[1], c[2]))
            .collect::<Result<Vec<_>>>()?;
        let n_rho = m * (m - 1) / 2;
        let correlation = CorrelationMatrix::from_upper(m, &values[3 * m..3 * m + n_rho])?;
        let copula = match family {
            CopulaFamily::Gaussian => CopulaParams::gaussian(correlation),
            CopulaFamily::StudentT => CopulaParams::student_t(values[3 * m + n_rho], correlation)?,
        };
        ModelParams::new(marginals, copula)
    }
}

/// Retained posterior draws with sampler metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub(crate) family: CopulaFamily,
    pub(crate) dim: usize,
    pub(crate) stage: Stage,
    pub(crate) draws: Vec<ModelParams>,
    pub(crate) iterations: Vec<usize>,
    pub(crate) acceptance: Vec<AcceptanceRate>,
    pub(crate) config: Option<McmcConfig>,
    pub(crate) step_trace: Vec<Vec<f64>>,
}

impl Chain {
    /// Chain from externally supplied draws (for example read back from CSV).
    pub fn from_draws(draws: Vec<ModelParams>, iterations: Vec<usize>) -> Result<Self> {
        let first = draws
            .first()
            .ok_or_else(|| Error::Data("chain has no draws".into()))?;
        let (family, dim) = (first.family(), first.dim());
        if let Some(i) = draws
            .iter()
            .position(|d| d.family() != family || d.dim() != dim)
        {
            return Err(Error::Data(format!(
                "draw {} differs in family or dimension from the first draw",
                i + 1
            )));
        }
        if iterations.len() != draws.len() {
            return Err(Error::DimensionMismatch {
                expected: draws.len(),
                actual: iterations.len(),
            });
        }
        Ok(Chain {
            family,
            dim,
            stage: Stage::Combined,
            draws,
            iterations,
            acceptance: Vec::new(),
            config: None,
            step_trace: Vec::new(),
        })
    }

    pub fn family(&self) -> CopulaFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn draws(&self) -> &[ModelParams] {
        &self.draws
    }

    /// Sampler iteration index of each retained draw.
    pub fn iterations(&self) -> &[usize] {
        &self.iterations
    }

    pub fn acceptance(&self) -> &[AcceptanceRate] {
        &self.acceptance
    }

    pub fn config(&self) -> Option<&McmcConfig> {
        self.config.as_ref()
    }

    /// Proposal scales in force when each draw was stored.
    pub fn step_trace(&self) -> &[Vec<f64>] {
        &self.step_trace
    }

    pub fn param_names(&self) -> Vec<String> {
        param_names(self.dim, self.family)
    }

    /// Draws of the flattened parameter at `index`.
    pub fn param_trace(&self, index: usize) -> Vec<f64> {
        self.draws.iter().map(|d| d.to_flat()[index]).collect()
    }

    /// One trace per parameter, in [`Chain::param_names`] order.
    pub fn traces(&self) -> Vec<Vec<f64>> {
        let k = self.param_names().len();
        let mut out = vec![Vec::with_capacity(self.len()); k];
        for d in &self.draws {
            for (slot, v) in out.iter_mut().zip(d.to_flat()) {
                slot.push(v);
            }
        }
        out
    }

    /// Checks every stored draw against the parameter invariants.
    pub fn validate(&self) -> Result<()> {
        for (i, d) in self.draws.iter().enumerate() {
            ModelParams::from_flat(self.dim, self.family, &d.to_flat())
                .map_err(|e| Error::Data(format!("draw {}: {e}", i + 1)))?;
        }
        Ok(())
    }
}

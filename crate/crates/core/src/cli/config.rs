//! JSON run configurations, one document per subcommand. Unknown keys are
//! rejected and every config is validated before any computation starts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::copula::{CopulaFamily, CopulaParams, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::inference::{McmcConfig, PriorSpec};
use crate::io::AngleUnit;
use crate::joint_model::ModelParams;
use crate::projected_gamma::MarginalParams;

/// Full model parameters as written in a config file. `correlation` lists
/// the upper triangle row by row: `ρ12, ρ13, …, ρ23, …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub marginals: Vec<[f64; 3]>,
    pub family: CopulaFamily,
    pub correlation: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
}

impl ModelSpec {
    pub fn build(&self) -> Result<ModelParams> {
        let m = self.marginals.len();
        let marginals = self
            .marginals
            .iter()
            .map(|&[a1, a2, b]| MarginalParams::new(a1, a2, b))
            .collect::<Result<Vec<_>>>()?;
        if m < 2 {
            return Err(Error::Config(format!("model needs at least 2 marginals, got {m}")));
        }
        let correlation = CorrelationMatrix::from_upper(m, &self.correlation)?;
        let copula = match (self.family, self.nu) {
            (CopulaFamily::Gaussian, None) => CopulaParams::gaussian(correlation),
            (CopulaFamily::Gaussian, Some(_)) => {
                return Err(Error::Config("nu is only valid for the t family".into()))
            }
            (CopulaFamily::StudentT, Some(nu)) => CopulaParams::student_t(nu, correlation)?,
            (CopulaFamily::StudentT, None) => {
                return Err(Error::Config("the t family requires nu".into()))
            }
        };
        ModelParams::new(marginals, copula)
    }
}

fn default_seed() -> u64 {
    1
}

fn default_level() -> f64 {
    0.95
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub model: ModelSpec,
    pub n: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Unit of the written dataset.
    #[serde(default)]
    pub unit: AngleUnit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub data: PathBuf,
    pub family: CopulaFamily,
    #[serde(default)]
    pub unit: AngleUnit,
    /// 1-based dataset columns to model; all columns when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<Vec<usize>>,
    #[serde(default)]
    pub mcmc: McmcConfig,
    #[serde(default)]
    pub prior: PriorSpec,
    /// Credible level of the summary intervals.
    #[serde(default = "default_level")]
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictConfig {
    pub chain: PathBuf,
    /// 1-based coordinate pair.
    pub axes: [usize; 2],
    pub resolution: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareEntry {
    pub name: String,
    pub chain: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub data: PathBuf,
    #[serde(default)]
    pub unit: AngleUnit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<Vec<usize>>,
    pub models: Vec<CompareEntry>,
}

impl SimulateConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        self.model.build().map(drop)
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        self.mcmc.validate()?;
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::Config(format!("level {} outside (0, 1)", self.level)));
        }
        if let Some(cols) = &self.columns {
            check_columns(cols)?;
        }
        Ok(())
    }
}

impl PredictConfig {
    pub fn validate(&self) -> Result<()> {
        let [a, b] = self.axes;
        if a == 0 || b == 0 || a == b {
            return Err(Error::Config(format!(
                "axes [{a}, {b}] must be two distinct 1-based column numbers"
            )));
        }
        if self.resolution < 2 {
            return Err(Error::Config("resolution must be at least 2".into()));
        }
        Ok(())
    }
}

impl CompareConfig {
    pub fn validate(&self) -> Result<()> {
        if self.models.len() != 2 {
            return Err(Error::Config(format!(
                "compare needs exactly 2 models, got {}",
                self.models.len()
            )));
        }
        if let Some(cols) = &self.columns {
            check_columns(cols)?;
        }
        Ok(())
    }
}

fn check_columns(cols: &[usize]) -> Result<()> {
    if cols.len() < 2 || cols.contains(&0) {
        return Err(Error::Config(
            "columns must list at least 2 column numbers, counting from 1".into(),
        ));
    }
    Ok(())
}

/// Resolves `path` against the directory holding the config file.
pub fn resolve(config_path: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match config_path.parent() {
        Some(dir) => dir.join(path),
        None => path.to_path_buf(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_spec_builds() {
        let spec: ModelSpec = serde_json::from_str(
            r#"{"marginals": [[2,2,1],[0.5,0.5,1]], "family": "gaussian", "correlation": [0.7]}"#,
        )
        .unwrap();
        let m = spec.build().unwrap();
        assert_eq!(m.copula().correlation().get(0, 1), 0.7);
        let t = ModelSpec {
            family: CopulaFamily::StudentT,
            ..spec.clone()
        };
        assert!(t.build().is_err());
        let g = ModelSpec {
            nu: Some(3.0),
            ..spec
        };
        assert!(g.build().is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<PredictConfig>(
            r#"{"chain": "c.csv", "axes": [1, 2], "resolution": 10, "colour": "red"}"#
        )
        .is_err());
        assert!(serde_json::from_str::<FitConfig>(
            r#"{"data": "d.csv", "family": "t", "mcmc": {"iters": 5}}"#
        )
        .is_err());
    }

    #[test]
    fn predict_axes_are_one_based() {
        let c = PredictConfig {
            chain: "c".into(),
            axes: [0, 1],
            resolution: 10,
        };
        assert!(c.validate().is_err());
    }
}

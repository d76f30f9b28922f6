//! Copula-coupled Projected Gamma models for vectors of angles on the
//! open quarter circle `(0, π/2)`.
//!
//! Each coordinate has a Projected Gamma marginal; dependence comes from a
//! Gaussian or Student-t copula. Inference is a two-stage MCMC scheme:
//! marginals first, then the copula conditional on each marginal draw.

pub mod cli;
pub mod copula;
pub mod diagnostics;
pub mod error;
pub mod inference;
pub mod io;
pub mod joint_model;
pub mod numerics;
pub mod projected_gamma;

pub use copula::{CopulaFamily, CopulaParams, CorrelationMatrix};
pub use error::{Error, Result};
pub use inference::{run_two_stage, Chain, McmcConfig, PriorSpec};
pub use joint_model::{joint_log_pdf, log_likelihood, simulate_dataset, Dataset, ModelParams};
pub use projected_gamma::{pg_cdf, pg_log_pdf, pg_quantile, pg_sample, Angle, MarginalParams};

//! Priors, posterior targets and the two-stage sampler.

mod chain;
mod prior;
mod sampler;
mod targets;

pub use chain::{param_names, AcceptanceRate, Chain, Stage};
pub use prior::{log_prior_copula, log_prior_marginals, GammaPrior, MarginalPrior, PriorSpec};
pub use sampler::{run_stage1, run_stage2, run_two_stage, MarginalChain, McmcConfig};
pub use targets::{stage1_target, stage2_log_likelihood, stage2_target};

//! Posterior summaries, convergence checks, LPML and predictive grids.

mod grid;
mod lpml;
mod summary;

pub use grid::{predictive_grid, PredictiveGrid};
pub use lpml::{log_cpo, lpml};
pub use summary::{credible_interval, effective_sample_size, geweke_z, ParamSummary, Summary};

/// Fewest draws accepted by the autocorrelation-based diagnostics.
pub const MIN_DIAGNOSTIC_DRAWS: usize = 50;

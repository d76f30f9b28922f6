//! Special functions, univariate distribution functions and the dense
//! linear algebra shared by every model component. All functions are pure.

mod linalg;
mod normal;
mod special;
mod student_t;

pub use linalg::{cholesky, mvn_log_pdf, mvt_log_pdf, LowerTriangularFactor, SquareMatrix};
pub use normal::{std_normal_cdf, std_normal_quantile};
pub use special::{log_gamma_fn, reg_inc_beta, reg_inc_beta_inv};
pub use student_t::{student_t_cdf, student_t_quantile};

pub(crate) use normal::{normal_quantile_tails, normal_tails};
pub(crate) use special::{inc_beta_pair, inv_inc_beta_pair, ln_beta, ln_gamma};
pub(crate) use student_t::{t_log_norm, t_log_pdf, t_quantile_tails, t_tails};

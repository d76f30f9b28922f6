//! The Projected Gamma distribution on the quarter circle.
//!
//! If `G1 ~ Gamma(α1, 1)` and `G2 ~ Gamma(α2, 1)` are independent, the angle
//! `θ = atan(G2 / (β G1))` has density
//!
//! ```text
//! β^α2 cos(θ)^(α1-1) sin(θ)^(α2-1) / (B(α1, α2) (cos θ + β sin θ)^(α1+α2))
//! ```
//!
//! on `(0, π/2)`. With `u = β tanθ / (1 + β tanθ)` the variable `u` is
//! `Beta(α2, α1)`, so the distribution function is `I_u(α2, α1)`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{inc_beta_pair, inv_inc_beta_pair, ln_beta};

/// An angle strictly inside the open arc `(0, π/2)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub fn new(radians: f64) -> Result<Self> {
        if radians > 0.0 && radians < FRAC_PI_2 {
            Ok(Angle(radians))
        } else {
            Err(Error::domain(
                "Angle::new",
                format!("{radians} is not strictly inside (0, pi/2)"),
            ))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Parameters `(α1, α2, β)` of one Projected Gamma marginal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct MarginalParams {
    alpha1: f64,
    alpha2: f64,
    beta: f64,
}

impl MarginalParams {
    pub fn new(alpha1: f64, alpha2: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("alpha1", alpha1), ("alpha2", alpha2), ("beta", beta)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} must be positive and finite"
                )));
            }
        }
        Ok(MarginalParams {
            alpha1,
            alpha2,
            beta,
        })
    }

    #[inline]
    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    #[inline]
    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.alpha1, self.alpha2, self.beta]
    }

    /// Log density without validating `theta`.
    #[inline]
    pub(crate) fn log_pdf_unchecked(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        self.alpha2 * self.beta.ln() + (self.alpha1 - 1.0) * c.ln() + (self.alpha2 - 1.0) * s.ln()
            - ln_beta(self.alpha1, self.alpha2)
            - (self.alpha1 + self.alpha2) * (c + self.beta * s).ln()
    }

    /// `(F(θ), 1 - F(θ))` for `θ ∈ [0, π/2]`.
    pub(crate) fn cdf_tails(&self, theta: f64) -> (f64, f64) {
        if theta <= 0.0 {
            return (0.0, 1.0);
        }
        if theta >= FRAC_PI_2 {
            return (1.0, 0.0);
        }
        let (s, c) = theta.sin_cos();
        let den = c + self.beta * s;
        inc_beta_pair(self.beta * s / den, c / den, self.alpha2, self.alpha1)
    }

    /// Inverse distribution function from a `(p, 1 - p)` pair.
    pub(crate) fn quantile_tails(&self, lower: f64, upper: f64) -> f64 {
        let (u, u_c) = inv_inc_beta_pair(lower, upper, self.alpha2, self.alpha1);
        u.atan2(self.beta * u_c)
    }
}

impl TryFrom<[f64; 3]> for MarginalParams {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        MarginalParams::new(v[0], v[1], v[2])
    }
}

impl From<MarginalParams> for [f64; 3] {
    fn from(p: MarginalParams) -> [f64; 3] {
        p.to_array()
    }
}

/// Log density at an interior angle.
pub fn pg_log_pdf(theta: f64, params: &MarginalParams) -> Result<f64> {
    let theta = Angle::new(theta).map_err(|_| {
        Error::domain(
            "pg_log_pdf",
            format!("theta = {theta} is not strictly inside (0, pi/2)"),
        )
    })?;
    Ok(params.log_pdf_unchecked(theta.value()))
}

/// Distribution function on the closed arc `[0, π/2]`.
pub fn pg_cdf(theta: f64, params: &MarginalParams) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::domain(
            "pg_cdf",
            format!("theta = {theta} outside [0, pi/2]"),
        ));
    }
    Ok(params.cdf_tails(theta).0)
}

/// Quantile function for `p` strictly inside `(0, 1)`.
pub fn pg_quantile(p: f64, params: &MarginalParams) -> Result<Angle> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("pg_quantile", format!("p = {p} must lie in (0, 1)")));
    }
    let theta = params.quantile_tails(p, 1.0 - p);
    Angle::new(theta).map_err(|_| {
        Error::NonFinite(format!("pg_quantile({p}) fell on the arc boundary ({theta})"))
    })
}

/// Draws one angle by projecting two independent gamma variables.
pub fn pg_sample<R: Rng + ?Sized>(params: &MarginalParams, rng: &mut R) -> Angle {
    let g1 = Gamma::new(params.alpha1, 1.0).expect("validated shape");
    let g2 = Gamma::new(params.alpha2, 1.0).expect("validated shape");
    loop {
        let x: f64 = g1.sample(rng);
        let y: f64 = g2.sample(rng);
        // Gamma draws with small shape can underflow to zero.
        if let Ok(angle) = Angle::new(y.atan2(params.beta * x)) {
            return angle;
        }
    }
}

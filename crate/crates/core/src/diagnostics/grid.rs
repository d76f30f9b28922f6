use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::inference::Chain;
use crate::joint_model::clamp_tails;

/// Posterior predictive density of one coordinate pair on the midpoint
/// lattice `(k + ½)·h`, `h = (π/2) / resolution`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveGrid {
    pub axes: (usize, usize),
    pub nodes: Vec<f64>,
    /// Row-major: `density[i * r + k]` is at `(nodes[i], nodes[k])`.
    pub density: Vec<f64>,
}

impl PredictiveGrid {
    pub fn resolution(&self) -> usize {
        self.nodes.len()
    }

    pub fn spacing(&self) -> f64 {
        FRAC_PI_2 / self.resolution() as f64
    }

    pub fn at(&self, i: usize, k: usize) -> f64 {
        self.density[i * self.resolution() + k]
    }

    /// Midpoint-rule integral of the density over the quarter square.
    pub fn mass(&self) -> f64 {
        let h = self.spacing();
        h * h * self.density.iter().sum::<f64>()
    }

    /// `(θ_a, θ_b, density)` triples in row-major order.
    pub fn triples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let r = self.resolution();
        self.density
            .iter()
            .enumerate()
            .map(move |(idx, &d)| (self.nodes[idx / r], self.nodes[idx % r], d))
    }
}

/// Averages the bivariate joint density of coordinates `axes` over the
/// chain draws. For `m > 2` the pair's marginals and 2×2 sub-correlation
/// form the exact bivariate margin of the model.
pub fn predictive_grid(chain: &Chain, axes: (usize, usize), resolution: usize) -> Result<PredictiveGrid> {
    let (a, b) = axes;
    let m = chain.dim();
    if a >= m || b >= m || a == b {
        return Err(Error::InvalidParameter(format!(
            "axes ({a}, {b}) must be two distinct indices below {m}"
        )));
    }
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid resolution {resolution} must be at least 2"
        )));
    }
    if chain.is_empty() {
        return Err(Error::Diagnostics("predictive grid needs a non-empty chain".into()));
    }
    let r = resolution;
    let h = FRAC_PI_2 / r as f64;
    let nodes: Vec<f64> = (0..r).map(|k| (k as f64 + 0.5) * h).collect();
    let mut density = vec![0.0; r * r];
    let mut log_pdf = [vec![0.0; r], vec![0.0; r]];
    let mut scores = [vec![0.0; r], vec![0.0; r]];
    for draw in chain.draws() {
        let sub = draw.pair(a, b)?;
        let copula = sub.copula();
        for (axis, p) in sub.marginals().iter().enumerate() {
            for (k, &t) in nodes.iter().enumerate() {
                log_pdf[axis][k] = p.log_pdf_unchecked(t);
                scores[axis][k] = copula.scores(&[clamp_tails(p.cdf_tails(t))])[0];
            }
        }
        for i in 0..r {
            for k in 0..r {
                let c = copula.log_density_scores(&[scores[0][i], scores[1][k]]);
                density[i * r + k] += (log_pdf[0][i] + log_pdf[1][k] + c).exp();
            }
        }
    }
    let inv = 1.0 / chain.len() as f64;
    for v in &mut density {
        *v *= inv;
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("predictive density {v} on the grid")));
        }
    }
    Ok(PredictiveGrid {
        axes,
        nodes,
        density,
    })
}

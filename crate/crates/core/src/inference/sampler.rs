//! Two-stage conditional MCMC.
//!
//! Stage 1 runs Metropolis-within-Gibbs on the marginal parameters, one
//! block per marginal, with a random walk on `(ln α1, ln α2, ln β)`. Stage 2
//! revisits every retained stage-1 draw and updates the copula parameters
//! conditionally on it: each correlation in turn (proposals outside the
//! positive-definite region are rejected) and, for the t family,
//! `ln(ν - 2)`. Proposal scales adapt during burn-in only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::copula::{upper_pairs, CopulaFamily, CopulaParams};
use crate::error::{Error, Result};
use crate::joint_model::{Dataset, ModelParams};
use crate::numerics::{cholesky, SquareMatrix};
use crate::projected_gamma::MarginalParams;

use super::chain::{AcceptanceRate, Chain, Stage};
use super::prior::PriorSpec;
use super::targets::{ColumnStats, CopulaWorkspace};

/// Sampler schedule and tuning. Defaults are a desk-scale schedule; the
/// published runs used longer ones (e.g. 120,000 iterations, 70,000
/// burn-in, lag 50).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McmcConfig {
    /// Total stage-1 iterations, burn-in included.
    pub iterations: usize,
    pub burn_in: usize,
    /// Keep every `thin`-th iteration after burn-in.
    pub thin: usize,
    pub seed: u64,
    /// Initial random-walk scale on the log marginal parameters.
    pub initial_step: f64,
    pub initial_rho_step: f64,
    /// Initial random-walk scale on `ln(ν - 2)`.
    pub initial_nu_step: f64,
    /// Starting degrees of freedom for the t family.
    pub initial_nu: f64,
    /// Iterations between refreshes of the stage-1 proposal covariance.
    pub adaptation_window: usize,
    pub target_acceptance: f64,
    /// Adaptive stage-2 sweeps run on the first retained stage-1 draw.
    pub stage2_burn_in: usize,
    /// Stage-2 sweeps per retained stage-1 draw.
    pub stage2_sweeps: usize,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            iterations: 30_000,
            burn_in: 15_000,
            thin: 15,
            seed: 1,
            initial_step: 0.1,
            initial_rho_step: 0.05,
            initial_nu_step: 0.3,
            initial_nu: 10.0,
            adaptation_window: 100,
            target_acceptance: 0.3,
            stage2_burn_in: 500,
            stage2_sweeps: 3,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.burn_in >= self.iterations {
            return fail(format!(
                "burn_in ({}) must be smaller than iterations ({})",
                self.burn_in, self.iterations
            ));
        }
        if self.thin == 0 {
            return fail("thin must be at least 1".into());
        }
        if self.n_draws() == 0 {
            return fail("schedule retains no draws".into());
        }
        for (name, v) in [
            ("initial_step", self.initial_step),
            ("initial_rho_step", self.initial_rho_step),
            ("initial_nu_step", self.initial_nu_step),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return fail(format!("{name} must be positive"));
            }
        }
        if !(self.initial_nu.is_finite() && self.initial_nu > 2.0) {
            return fail("initial_nu must exceed 2".into());
        }
        if self.adaptation_window == 0 {
            return fail("adaptation_window must be at least 1".into());
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return fail("target_acceptance must lie in (0, 1)".into());
        }
        if self.stage2_sweeps == 0 {
            return fail("stage2_sweeps must be at least 1".into());
        }
        Ok(())
    }

    /// Number of retained draws, `(iterations - burn_in) / thin`.
    pub fn n_draws(&self) -> usize {
        self.iterations.saturating_sub(self.burn_in) / self.thin
    }
}

/// Robbins–Monro gain for the `t`-th adaptation step.
fn gain(t: usize) -> f64 {
    (t as f64).powf(-0.6)
}

fn accept_prob(log_ratio: f64) -> f64 {
    if log_ratio.is_nan() {
        0.0
    } else {
        log_ratio.exp().min(1.0)
    }
}

fn metropolis<R: Rng + ?Sized>(log_ratio: f64, rng: &mut R) -> bool {
    let u: f64 = rng.random();
    log_ratio.is_finite() && u.ln() < log_ratio || log_ratio == f64::INFINITY
}

const BLOCK: usize = 3;
const COV_JITTER: f64 = 1e-8;

/// Adaptive random-walk block for one marginal.
struct MarginalBlock {
    stats: ColumnStats,
    y: [f64; BLOCK],
    log_target: f64,
    log_scale: f64,
    shape: [[f64; BLOCK]; BLOCK],
    empirical: bool,
    count: f64,
    mean: [f64; BLOCK],
    comoment: [[f64; BLOCK]; BLOCK],
    proposed: usize,
    accepted: usize,
}

impl MarginalBlock {
    fn new(stats: ColumnStats, initial_step: f64) -> Self {
        let mut shape = [[0.0; BLOCK]; BLOCK];
        for (i, row) in shape.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        MarginalBlock {
            stats,
            y: [0.0; BLOCK],
            log_target: f64::NAN,
            log_scale: initial_step.ln(),
            shape,
            empirical: false,
            count: 0.0,
            mean: [0.0; BLOCK],
            comoment: [[0.0; BLOCK]; BLOCK],
            proposed: 0,
            accepted: 0,
        }
    }

    fn params(&self) -> MarginalParams {
        let [a1, a2, b] = self.y.map(f64::exp);
        MarginalParams::new(a1, a2, b).expect("exp of finite values is positive")
    }

    fn observe(&mut self) {
        self.count += 1.0;
        let mut delta = [0.0; BLOCK];
        for k in 0..BLOCK {
            delta[k] = self.y[k] - self.mean[k];
            self.mean[k] += delta[k] / self.count;
        }
        for a in 0..BLOCK {
            for b in 0..BLOCK {
                self.comoment[a][b] += delta[a] * (self.y[b] - self.mean[b]);
            }
        }
    }

    fn refresh_shape(&mut self) {
        if self.count < 2.0 * BLOCK as f64 {
            return;
        }
        let mut cov = SquareMatrix::identity(BLOCK);
        for a in 0..BLOCK {
            for b in 0..BLOCK {
                let jitter = if a == b { COV_JITTER } else { 0.0 };
                let v = 0.5 * (self.comoment[a][b] + self.comoment[b][a]) / (self.count - 1.0);
                cov.set(a, b, v + jitter);
            }
        }
        if let Ok(l) = cholesky(&cov) {
            for (a, row) in self.shape.iter_mut().enumerate() {
                for (b, v) in row.iter_mut().enumerate() {
                    *v = l.get(a, b);
                }
            }
            if !self.empirical {
                // Optimal random-walk scale for a Gaussian target in 3 dimensions.
                self.log_scale = (2.38 / (BLOCK as f64).sqrt()).ln();
                self.empirical = true;
            }
        }
    }

    fn snapshot(&self, out: &mut Vec<f64>) {
        out.push(self.log_scale.exp());
        out.extend(self.shape.iter().flatten());
    }
}

/// Stage-1 output: retained draws of `ω_Θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalChain {
    pub draws: Vec<Vec<MarginalParams>>,
    pub iterations: Vec<usize>,
    pub acceptance: Vec<AcceptanceRate>,
    pub step_trace: Vec<Vec<f64>>,
}

impl MarginalChain {
    pub fn stage(&self) -> Stage {
        Stage::Stage1
    }
}

fn check_inputs(data: &Dataset, prior: &PriorSpec, config: &McmcConfig) -> Result<()> {
    config.validate()?;
    if data.n_cols() < 2 {
        return Err(Error::Data(format!(
            "a copula model needs at least 2 columns, the dataset has {}",
            data.n_cols()
        )));
    }
    prior.validate(data.n_cols())
}

/// Stage 1: samples `ω_Θ` from its marginal-only posterior.
pub fn run_stage1<R: Rng + ?Sized>(
    data: &Dataset,
    prior: &PriorSpec,
    config: &McmcConfig,
    rng: &mut R,
) -> Result<MarginalChain> {
    check_inputs(data, prior, config)?;
    let m = data.n_cols();
    let mut blocks: Vec<MarginalBlock> = (0..m)
        .map(|j| MarginalBlock::new(ColumnStats::new(data.column(j)), config.initial_step))
        .collect();
    for (j, b) in blocks.iter_mut().enumerate() {
        b.log_target = b.stats.log_target(b.y, prior.marginal(j));
        if !b.log_target.is_finite() {
            return Err(Error::NonFinite(format!(
                "stage-1 target for marginal {} is {} at the initial state (1, 1, 1)",
                j + 1,
                b.log_target
            )));
        }
    }

    let cov_start = config.burn_in / 10;
    let mut out = MarginalChain {
        draws: Vec::with_capacity(config.n_draws()),
        iterations: Vec::with_capacity(config.n_draws()),
        acceptance: Vec::new(),
        step_trace: Vec::with_capacity(config.n_draws()),
    };

    for t in 1..=config.iterations {
        let adapting = t <= config.burn_in;
        for (j, block) in blocks.iter_mut().enumerate() {
            let xi: [f64; BLOCK] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let scale = block.log_scale.exp();
            let mut proposal = block.y;
            for (a, slot) in proposal.iter_mut().enumerate() {
                *slot += scale * (0..=a).map(|b| block.shape[a][b] * xi[b]).sum::<f64>();
            }
            let lt = block.stats.log_target(proposal, prior.marginal(j));
            let log_ratio = if lt.is_nan() { f64::NEG_INFINITY } else { lt - block.log_target };
            let accepted = metropolis(log_ratio, rng);
            if accepted {
                block.y = proposal;
                block.log_target = lt;
            }
            if adapting {
                block.log_scale += gain(t) * (accept_prob(log_ratio) - config.target_acceptance);
                if t > cov_start {
                    block.observe();
                }
                if t % config.adaptation_window == 0 && t > cov_start {
                    block.refresh_shape();
                }
            } else {
                block.proposed += 1;
                block.accepted += usize::from(accepted);
            }
        }
        if !adapting && (t - config.burn_in) % config.thin == 0 {
            out.draws.push(blocks.iter().map(MarginalBlock::params).collect());
            out.iterations.push(t);
            let mut snap = Vec::with_capacity(m * (1 + BLOCK * BLOCK));
            for b in &blocks {
                b.snapshot(&mut snap);
            }
            out.step_trace.push(snap);
        }
    }
    out.acceptance = blocks
        .iter()
        .enumerate()
        .map(|(j, b)| AcceptanceRate {
            block: format!("marginal_{}", j + 1),
            rate: b.accepted as f64 / b.proposed.max(1) as f64,
        })
        .collect();
    Ok(out)
}

/// Componentwise random-walk kernel for the copula parameters.
struct CopulaKernel {
    pairs: Vec<(usize, usize)>,
    rho_log_scales: Vec<f64>,
    nu_log_scale: f64,
    rho_counts: Vec<(usize, usize)>,
    nu_counts: (usize, usize),
}

/// Mutable stage-2 state for one conditioning `ω_Θ`.
struct CopulaState {
    params: CopulaParams,
    workspace: CopulaWorkspace,
    log_lik: f64,
}

impl CopulaKernel {
    fn new(m: usize, config: &McmcConfig) -> Self {
        let pairs: Vec<_> = upper_pairs(m).collect();
        CopulaKernel {
            rho_log_scales: vec![config.initial_rho_step.ln(); pairs.len()],
            rho_counts: vec![(0, 0); pairs.len()],
            pairs,
            nu_log_scale: config.initial_nu_step.ln(),
            nu_counts: (0, 0),
        }
    }

    fn sweep<R: Rng + ?Sized>(
        &mut self,
        state: &mut CopulaState,
        prior: &PriorSpec,
        config: &McmcConfig,
        adapt_step: Option<usize>,
        rng: &mut R,
    ) -> Result<()> {
        for k in 0..self.pairs.len() {
            let (r, q) = self.pairs[k];
            let current = state.params.correlation().get(r, q);
            let step: f64 = rng.sample(StandardNormal);
            let proposal = current + self.rho_log_scales[k].exp() * step;
            let mut log_ratio = f64::NEG_INFINITY;
            let mut candidate = None;
            if proposal > -1.0 && proposal < 1.0 {
                match state.params.correlation().with_entry(r, q, proposal) {
                    Ok(corr) => {
                        let params = state.params.with_correlation(corr);
                        let ll = state.workspace.log_likelihood(&params);
                        if ll.is_nan() {
                            return Err(Error::NonFinite(format!(
                                "stage-2 likelihood is NaN at rho_{}_{} = {proposal}",
                                r + 1,
                                q + 1
                            )));
                        }
                        log_ratio = ll - state.log_lik;
                        candidate = Some((params, ll));
                    }
                    Err(Error::NotPositiveDefinite { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            let accepted = candidate.is_some() && metropolis(log_ratio, rng);
            if accepted {
                let (params, ll) = candidate.expect("checked");
                state.params = params;
                state.log_lik = ll;
            }
            match adapt_step {
                Some(t) => {
                    self.rho_log_scales[k] +=
                        gain(t) * (accept_prob(log_ratio) - config.target_acceptance);
                }
                None => {
                    self.rho_counts[k].0 += 1;
                    self.rho_counts[k].1 += usize::from(accepted);
                }
            }
        }

        if let Some(nu) = state.params.nu() {
            let eta = (nu - 2.0).ln();
            let step: f64 = rng.sample(StandardNormal);
            let eta_new = eta + self.nu_log_scale.exp() * step;
            let nu_new = 2.0 + eta_new.exp();
            let mut log_ratio = f64::NEG_INFINITY;
            let mut candidate = None;
            if nu_new.is_finite() && nu_new > 2.0 {
                let params = CopulaParams::student_t(nu_new, state.params.correlation().clone())?;
                let mut ws = state.workspace.clone();
                ws.rescore(&params);
                let ll = ws.log_likelihood(&params);
                if ll.is_nan() {
                    return Err(Error::NonFinite(format!(
                        "stage-2 likelihood is NaN at nu = {nu_new}"
                    )));
                }
                let prior_new = prior.nu_minus_two.log_pdf_unchecked(nu_new - 2.0);
                let prior_old = prior.nu_minus_two.log_pdf_unchecked(nu - 2.0);
                // Jacobian of ν = 2 + exp(η).
                log_ratio = ll - state.log_lik + prior_new - prior_old + eta_new - eta;
                candidate = Some((params, ws, ll));
            }
            let accepted = candidate.is_some() && metropolis(log_ratio, rng);
            if accepted {
                let (params, ws, ll) = candidate.expect("checked");
                state.params = params;
                state.workspace = ws;
                state.log_lik = ll;
            }
            match adapt_step {
                Some(t) => {
                    self.nu_log_scale +=
                        gain(t) * (accept_prob(log_ratio) - config.target_acceptance);
                }
                None => {
                    self.nu_counts.0 += 1;
                    self.nu_counts.1 += usize::from(accepted);
                }
            }
        }
        Ok(())
    }

    fn snapshot(&self, out: &mut Vec<f64>, family: CopulaFamily) {
        out.extend(self.rho_log_scales.iter().map(|v| v.exp()));
        if family == CopulaFamily::StudentT {
            out.push(self.nu_log_scale.exp());
        }
    }

    fn acceptance(&self, family: CopulaFamily) -> Vec<AcceptanceRate> {
        let rate = |(n, a): (usize, usize)| a as f64 / n.max(1) as f64;
        let mut out: Vec<_> = self
            .pairs
            .iter()
            .zip(&self.rho_counts)
            .map(|(&(r, q), &c)| AcceptanceRate {
                block: format!("rho_{}_{}", r + 1, q + 1),
                rate: rate(c),
            })
            .collect();
        if family == CopulaFamily::StudentT {
            out.push(AcceptanceRate {
                block: "nu".into(),
                rate: rate(self.nu_counts),
            });
        }
        out
    }
}

/// Stage 2: for each retained `ω_Θ` draw, updates `ω_C` conditionally on
/// it, warm-starting from the previous draw's copula state.
pub fn run_stage2<R: Rng + ?Sized>(
    data: &Dataset,
    stage1: &MarginalChain,
    family: CopulaFamily,
    prior: &PriorSpec,
    config: &McmcConfig,
    rng: &mut R,
) -> Result<Chain> {
    check_inputs(data, prior, config)?;
    let m = data.n_cols();
    if stage1.draws.is_empty() {
        return Err(Error::Data("stage-1 chain is empty".into()));
    }
    let mut kernel = CopulaKernel::new(m, config);
    let mut current = CopulaParams::independent(family, m, config.initial_nu)?;
    let mut draws = Vec::with_capacity(stage1.draws.len());
    let mut step_trace = Vec::with_capacity(stage1.draws.len());

    for (k, omega) in stage1.draws.iter().enumerate() {
        let workspace = CopulaWorkspace::new(data, omega, &current);
        let log_lik = workspace.log_likelihood(&current);
        if !log_lik.is_finite() {
            return Err(Error::NonFinite(format!(
                "stage-2 likelihood is {log_lik} for retained draw {} (marginals {:?}, copula {:?})",
                k + 1,
                omega,
                current
            )));
        }
        let mut state = CopulaState {
            params: current,
            workspace,
            log_lik,
        };
        if k == 0 {
            for t in 1..=config.stage2_burn_in {
                kernel.sweep(&mut state, prior, config, Some(t), rng)?;
            }
        }
        for _ in 0..config.stage2_sweeps {
            kernel.sweep(&mut state, prior, config, None, rng)?;
        }
        current = state.params;
        draws.push(ModelParams::new(omega.clone(), current.clone())?);
        let mut snap = stage1.step_trace.get(k).cloned().unwrap_or_default();
        kernel.snapshot(&mut snap, family);
        step_trace.push(snap);
    }

    let mut acceptance = stage1.acceptance.clone();
    acceptance.extend(kernel.acceptance(family));
    Ok(Chain {
        family,
        dim: m,
        stage: Stage::Stage2,
        draws,
        iterations: stage1.iterations.clone(),
        acceptance,
        config: Some(config.clone()),
        step_trace,
    })
}

/// Runs both stages from `config.seed` and returns the combined chain of
/// `(ω_Θ, ω_C)` pairs.
pub fn run_two_stage(
    data: &Dataset,
    family: CopulaFamily,
    prior: &PriorSpec,
    config: &McmcConfig,
) -> Result<Chain> {
    check_inputs(data, prior, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let stage1 = run_stage1(data, prior, config, &mut rng)?;
    let mut chain = run_stage2(data, &stage1, family, prior, config, &mut rng)?;
    chain.stage = Stage::Combined;
    Ok(chain)
}

//! Batch front end: `simulate`, `fit`, `predict` and `compare`.
//!
//! Each command reads one JSON config, validates it, computes everything in
//! memory and only then writes its artifacts into `--out`.

pub mod config;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde_json::json;

use crate::diagnostics::{lpml, predictive_grid, Summary};
use crate::error::{Error, Result};
use crate::inference::{run_two_stage, Chain};
use crate::io::{self, AngleUnit};
use crate::joint_model::{simulate_dataset, Dataset};

use config::{resolve, CompareConfig, FitConfig, PredictConfig, SimulateConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pgcopula", version, about = "Copula-coupled Projected Gamma models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Override the seed in the config (simulate, fit).
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Angles in dataset files are in degrees.
    #[arg(long, global = true)]
    pub degrees: bool,

    /// Number of independent chains (fit only); chain k uses seed + k - 1.
    #[arg(long, global = true, value_name = "K")]
    pub chains: Option<usize>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Simulate a dataset from a fully specified model.
    Simulate,
    /// Run the two-stage sampler and summarize the chain.
    Fit,
    /// Posterior predictive density grid for one coordinate pair.
    Predict,
    /// Compare two fitted models by LPML.
    Compare,
}

/// Maps an error to the process exit code.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_VALIDATION
    }
}

/// Runs a parsed command line and returns the lines to print on stdout.
pub fn run(cli: &Cli) -> Result<Vec<String>> {
    let config_path = cli
        .config
        .as_deref()
        .ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    if cli.chains.is_some() && cli.command != Command::Fit {
        return Err(Error::Config("--chains only applies to fit".into()));
    }
    if cli.seed.is_some() && matches!(cli.command, Command::Predict | Command::Compare) {
        return Err(Error::Config("--seed only applies to simulate and fit".into()));
    }
    let raw = io::read_text(config_path)?;
    if !cli.out.is_dir() {
        return Err(Error::Config(format!(
            "output directory {} does not exist",
            cli.out.display()
        )));
    }
    match cli.command {
        Command::Simulate => simulate(cli, &parse(&raw)?),
        Command::Fit => fit(cli, config_path, &raw, &parse(&raw)?),
        Command::Predict => predict(cli, config_path, &parse(&raw)?),
        Command::Compare => compare(cli, config_path, &parse(&raw)?),
    }
}

fn parse<T: DeserializeOwned>(raw: &str) -> Result<T> {
    serde_json::from_str(raw).map_err(|e| Error::Config(format!("config: {e}")))
}

fn unit(cli: &Cli, configured: AngleUnit) -> AngleUnit {
    if cli.degrees {
        AngleUnit::Degrees
    } else {
        configured
    }
}

fn load_data(path: &Path, unit: AngleUnit, columns: Option<&[usize]>) -> Result<Dataset> {
    let data = io::read_dataset(path, unit)?;
    match columns {
        None => Ok(data),
        Some(cols) => {
            if let Some(&c) = cols.iter().find(|&&c| c > data.n_cols()) {
                return Err(Error::Config(format!(
                    "column {c} requested but the dataset has {} columns",
                    data.n_cols()
                )));
            }
            let zero_based: Vec<usize> = cols.iter().map(|c| c - 1).collect();
            data.select_columns(&zero_based)
        }
    }
}

fn simulate(cli: &Cli, cfg: &SimulateConfig) -> Result<Vec<String>> {
    let mut cfg = cfg.clone();
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    let model = cfg.model.build()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let data = simulate_dataset(&model, cfg.n, &mut rng)?;
    let path = cli.out.join("dataset.csv");
    io::write_dataset(&path, &data, unit(cli, cfg.unit))?;
    Ok(vec![
        format!("seed = {}", cfg.seed),
        format!("wrote {}", path.display()),
    ])
}

fn fit(cli: &Cli, config_path: &Path, raw: &str, cfg: &FitConfig) -> Result<Vec<String>> {
    let mut cfg = cfg.clone();
    if let Some(seed) = cli.seed {
        cfg.mcmc.seed = seed;
    }
    cfg.unit = unit(cli, cfg.unit);
    cfg.validate()?;
    let k = cli.chains.unwrap_or(1);
    if k == 0 {
        return Err(Error::Config("--chains must be at least 1".into()));
    }
    let data_path = resolve(config_path, &cfg.data);
    let data = load_data(&data_path, cfg.unit, cfg.columns.as_deref())?;
    if data.n_cols() < 2 {
        return Err(Error::Data(format!(
            "a copula model needs at least 2 columns, the dataset has {}",
            data.n_cols()
        )));
    }
    cfg.prior.validate(data.n_cols())?;

    let configs: Vec<_> = (0..k)
        .map(|i| {
            let mut m = cfg.mcmc.clone();
            m.seed = cfg.mcmc.seed.wrapping_add(i as u64);
            m
        })
        .collect();
    let results: Vec<Result<Chain>> = if k == 1 {
        vec![run_two_stage(&data, cfg.family, &cfg.prior, &configs[0])]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = configs
                .iter()
                .map(|m| s.spawn(|| run_two_stage(&data, cfg.family, &cfg.prior, m)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sampler thread panicked"))
                .collect()
        })
    };
    let chains = results.into_iter().collect::<Result<Vec<_>>>()?;
    let summaries = chains
        .iter()
        .map(|c| Summary::from_chain(c, cfg.level))
        .collect::<Result<Vec<_>>>()?;

    let resolved = serde_json::to_string(&cfg)?;
    let mut out = Vec::new();
    for (i, (chain, summary)) in chains.iter().zip(&summaries).enumerate() {
        let suffix = if k == 1 { String::new() } else { format!("_{}", i + 1) };
        let chain_path = cli.out.join(format!("chain{suffix}.csv"));
        let meta = io::format_chain_meta(
            chain,
            &[
                ("data", data_path.display().to_string()),
                ("unit", format!("{:?}", cfg.unit).to_lowercase()),
                ("config", resolved.clone()),
            ],
        );
        io::write_chain(&chain_path, chain)?;
        io::write_atomic(&cli.out.join(format!("chain{suffix}.meta")), meta.as_bytes())?;
        let summary_json = serde_json::to_string_pretty(&summary.to_json())? + "\n";
        io::write_atomic(
            &cli.out.join(format!("summary{suffix}.json")),
            summary_json.as_bytes(),
        )?;
        out.push(format!("wrote {} ({} draws)", chain_path.display(), chain.len()));
    }
    io::write_atomic(&cli.out.join("config.json"), raw.as_bytes())?;
    Ok(out)
}

fn predict(cli: &Cli, config_path: &Path, cfg: &PredictConfig) -> Result<Vec<String>> {
    cfg.validate()?;
    let chain = io::read_chain(&resolve(config_path, &cfg.chain))?;
    let [a, b] = cfg.axes;
    if a > chain.dim() || b > chain.dim() {
        return Err(Error::Config(format!(
            "axes [{a}, {b}] out of range for a {}-dimensional chain",
            chain.dim()
        )));
    }
    let grid = predictive_grid(&chain, (a - 1, b - 1), cfg.resolution)?;
    let mut text = String::from("theta_a,theta_b,density\n");
    for (x, y, d) in grid.triples() {
        text.push_str(&format!("{x},{y},{d}\n"));
    }
    let path = cli.out.join("grid.csv");
    io::write_atomic(&path, text.as_bytes())?;
    Ok(vec![
        format!("mass = {}", grid.mass()),
        format!("wrote {}", path.display()),
    ])
}

fn compare(cli: &Cli, config_path: &Path, cfg: &CompareConfig) -> Result<Vec<String>> {
    cfg.validate()?;
    let data = load_data(
        &resolve(config_path, &cfg.data),
        unit(cli, cfg.unit),
        cfg.columns.as_deref(),
    )?;
    let mut scores = Vec::new();
    for entry in &cfg.models {
        let chain = io::read_chain(&resolve(config_path, &entry.chain))?;
        if chain.dim() != data.n_cols() {
            return Err(Error::DimensionMismatch {
                expected: chain.dim(),
                actual: data.n_cols(),
            });
        }
        scores.push(lpml(&data, &chain)?);
    }
    let difference = scores[1] - scores[0];
    let preferred = if difference > 0.0 {
        cfg.models[1].name.as_str()
    } else if difference < 0.0 {
        cfg.models[0].name.as_str()
    } else {
        "tie"
    };
    let report = json!({
        "models": cfg.models.iter().zip(&scores).map(|(e, s)| json!({
            "name": e.name,
            "lpml": s,
        })).collect::<Vec<_>>(),
        "difference": difference,
        "preferred": preferred,
    });
    let path = cli.out.join("compare.json");
    io::write_atomic(&path, (serde_json::to_string_pretty(&report)? + "\n").as_bytes())?;
    let mut out: Vec<String> = cfg
        .models
        .iter()
        .zip(&scores)
        .map(|(e, s)| format!("LPML {} = {s:.3}", e.name))
        .collect();
    out.push(format!("preferred = {preferred}"));
    Ok(out)
}

mod common;

use pgcopula::inference::{run_stage1, run_two_stage, McmcConfig, PriorSpec, Stage};
use pgcopula::{
    simulate_dataset, CopulaFamily, CopulaParams, CorrelationMatrix, Dataset, ModelParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn short_config(seed: u64) -> McmcConfig {
    McmcConfig {
        iterations: 3_000,
        burn_in: 1_500,
        thin: 10,
        seed,
        stage2_burn_in: 200,
        ..McmcConfig::default()
    }
}

fn data(model: &ModelParams, n: usize, seed: u64) -> Dataset {
    simulate_dataset(model, n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

#[test]
fn draw_count_and_invariants() {
    let d = data(&common::example1(), 200, 1);
    for family in [CopulaFamily::Gaussian, CopulaFamily::StudentT] {
        let cfg = short_config(3);
        let chain = run_two_stage(&d, family, &PriorSpec::default(), &cfg).unwrap();
        assert_eq!(chain.len(), (cfg.iterations - cfg.burn_in) / cfg.thin);
        assert_eq!(chain.stage(), Stage::Combined);
        assert_eq!(chain.family(), family);
        chain.validate().unwrap();
        for draw in chain.draws() {
            if let Some(nu) = draw.copula().nu() {
                assert!(nu > 2.0);
            }
            let r = draw.copula().correlation();
            assert!(r.factor().log_det().is_finite());
        }
        let its = chain.iterations();
        assert_eq!(its[0], cfg.burn_in + cfg.thin);
        assert!(its.windows(2).all(|w| w[1] - w[0] == cfg.thin));
        for a in chain.acceptance() {
            assert!(a.rate > 0.05 && a.rate < 0.8, "{} acceptance {}", a.block, a.rate);
        }
    }
}

#[test]
fn identical_inputs_give_identical_chains() {
    let d = data(&common::example2(), 150, 2);
    let prior = PriorSpec::default();
    let a = run_two_stage(&d, CopulaFamily::StudentT, &prior, &short_config(9)).unwrap();
    let b = run_two_stage(&d, CopulaFamily::StudentT, &prior, &short_config(9)).unwrap();
    assert_eq!(a, b);
    let c = run_two_stage(&d, CopulaFamily::StudentT, &prior, &short_config(10)).unwrap();
    assert_ne!(a.draws(), c.draws());
}

#[test]
fn step_sizes_frozen_after_burn_in() {
    let d = data(&common::example2(), 150, 4);
    let chain = run_two_stage(&d, CopulaFamily::StudentT, &PriorSpec::default(), &short_config(1))
        .unwrap();
    let trace = chain.step_trace();
    assert_eq!(trace.len(), chain.len());
    assert!(!trace[0].is_empty());
    assert!(trace.iter().all(|s| s == &trace[0]), "a proposal scale changed after burn-in");
}

#[test]
fn stage1_has_no_copula_dependence() {
    // The same data under different copula families leaves stage 1 untouched.
    let d = data(&common::example1(), 200, 6);
    let prior = PriorSpec::default();
    let cfg = short_config(5);
    let s1 = run_stage1(&d, &prior, &cfg, &mut ChaCha8Rng::seed_from_u64(cfg.seed)).unwrap();
    let g = run_two_stage(&d, CopulaFamily::Gaussian, &prior, &cfg).unwrap();
    let t = run_two_stage(&d, CopulaFamily::StudentT, &prior, &cfg).unwrap();
    for ((a, b), c) in s1.draws.iter().zip(g.draws()).zip(t.draws()) {
        assert_eq!(a.as_slice(), b.marginals());
        assert_eq!(a.as_slice(), c.marginals());
    }
}

#[test]
fn independent_data_gives_small_correlations() {
    let model = ModelParams::new(
        common::example2().marginals().to_vec(),
        CopulaParams::gaussian(CorrelationMatrix::identity(3).unwrap()),
    )
    .unwrap();
    // n = 2000 puts the 0.1 bound about 4.5 sampling sd from zero.
    let d = data(&model, 2_000, 12);
    let chain = run_two_stage(&d, CopulaFamily::Gaussian, &PriorSpec::default(), &short_config(2))
        .unwrap();
    let names = chain.param_names();
    for (name, trace) in names.iter().zip(chain.traces()) {
        if name.starts_with("rho") {
            let mean = trace.iter().sum::<f64>() / trace.len() as f64;
            assert!(mean.abs() < 0.1, "{name}: {mean}");
        }
    }
}

#[test]
fn rejects_bad_inputs() {
    let d = data(&common::example1(), 50, 1);
    let prior = PriorSpec::default();
    let bad = McmcConfig {
        burn_in: 10,
        iterations: 10,
        ..McmcConfig::default()
    };
    assert!(run_two_stage(&d, CopulaFamily::Gaussian, &prior, &bad).is_err());
    let one = d.select_columns(&[0]).unwrap();
    assert!(run_two_stage(&one, CopulaFamily::Gaussian, &prior, &short_config(1)).is_err());
    let three = PriorSpec {
        marginals: vec![Default::default(); 3],
        ..PriorSpec::default()
    };
    assert!(run_two_stage(&d, CopulaFamily::Gaussian, &three, &short_config(1)).is_err());
}

use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use pgcopula_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(pgc_last_error()) }.to_string_lossy().into_owned()
}

fn example_model(family: i32) -> *mut PgcModel {
    let marginals = [2.0, 2.0, 1.0, 0.5, 0.5, 1.0];
    let upper = [0.7];
    let mut model = ptr::null_mut();
    let status = unsafe {
        pgc_model_new(2, marginals.as_ptr(), family, upper.as_ptr(), 5.0, &mut model)
    };
    assert_eq!(status, PgcStatus::Ok, "{}", last_error());
    model
}

#[test]
fn pg_functions_match_the_library() {
    let p = pgcopula::MarginalParams::new(2.0, 3.0, 1.5).unwrap();
    let mut v = 0.0;
    unsafe {
        assert_eq!(pgc_pg_log_pdf(0.6, 2.0, 3.0, 1.5, &mut v), PgcStatus::Ok);
        assert_eq!(v, pgcopula::pg_log_pdf(0.6, &p).unwrap());
        assert_eq!(pgc_pg_cdf(0.6, 2.0, 3.0, 1.5, &mut v), PgcStatus::Ok);
        let c = v;
        assert_eq!(pgc_pg_quantile(c, 2.0, 3.0, 1.5, &mut v), PgcStatus::Ok);
        assert!((v - 0.6).abs() < 1e-10);
    }
}

#[test]
fn errors_leave_out_untouched_and_set_a_message() {
    let mut v = 42.0;
    unsafe {
        assert_eq!(pgc_pg_cdf(0.6, -1.0, 3.0, 1.5, &mut v), PgcStatus::InvalidArgument);
        assert_eq!(v, 42.0);
        assert!(!last_error().is_empty());
        assert_eq!(pgc_pg_cdf(2.0, 1.0, 1.0, 1.0, &mut v), PgcStatus::Domain);
        assert_eq!(pgc_pg_cdf(0.5, 1.0, 1.0, 1.0, ptr::null_mut()), PgcStatus::NullPointer);
        assert!(last_error().contains("out"));

        let mut model = ptr::null_mut();
        let marginals = [1.0; 6];
        let upper = [0.5];
        assert_eq!(
            pgc_model_new(2, marginals.as_ptr(), 9, upper.as_ptr(), 5.0, &mut model),
            PgcStatus::InvalidArgument
        );
        assert!(model.is_null());
        let bad = [1.5];
        assert_ne!(
            pgc_model_new(2, marginals.as_ptr(), PGC_FAMILY_GAUSSIAN, bad.as_ptr(), 5.0, &mut model),
            PgcStatus::Ok
        );
        assert!(model.is_null());
    }
}

#[test]
fn handles_round_trip_through_simulate_fit_and_lpml() {
    let model = example_model(PGC_FAMILY_GAUSSIAN);
    let dir = tempfile::tempdir().unwrap();
    unsafe {
        let theta = [0.7, 0.8];
        let mut lp = 0.0;
        assert_eq!(pgc_model_joint_log_pdf(model, theta.as_ptr(), 2, &mut lp), PgcStatus::Ok);
        assert!(lp.is_finite());

        let mut data = ptr::null_mut();
        assert_eq!(pgc_simulate(model, 200, 3, &mut data), PgcStatus::Ok);
        assert_eq!((pgc_dataset_rows(data), pgc_dataset_cols(data)), (200, 2));
        let mut ll = 0.0;
        assert_eq!(pgc_log_likelihood(data, model, &mut ll), PgcStatus::Ok);

        let csv = CString::new(dir.path().join("d.csv").to_str().unwrap()).unwrap();
        assert_eq!(pgc_dataset_write_csv(data, csv.as_ptr(), true), PgcStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(pgc_dataset_read_csv(csv.as_ptr(), true, &mut back), PgcStatus::Ok);
        let mut ll_back = 0.0;
        assert_eq!(pgc_log_likelihood(back, model, &mut ll_back), PgcStatus::Ok);
        assert!((ll - ll_back).abs() < 1e-8 * ll.abs().max(1.0));

        let mut cfg = pgc_mcmc_config_default();
        cfg.iterations = 2_000;
        cfg.burn_in = 1_000;
        cfg.thin = 10;
        cfg.stage2_burn_in = 100;
        let mut chain = ptr::null_mut();
        assert_eq!(pgc_fit(data, PGC_FAMILY_T, &cfg, &mut chain), PgcStatus::Ok, "{}", last_error());
        let (n, k) = (pgc_chain_len(chain), pgc_chain_n_params(chain));
        assert_eq!((n, k), (100, 8));
        let mut buf = vec![0.0; n * k];
        assert_eq!(pgc_chain_draws(chain, buf.as_mut_ptr(), buf.len()), PgcStatus::Ok);
        assert!(buf.chunks(k).all(|d| d[7] > 2.0 && d[6].abs() < 1.0));
        assert_eq!(pgc_chain_draws(chain, buf.as_mut_ptr(), 3), PgcStatus::InvalidArgument);

        let mut score = 0.0;
        assert_eq!(pgc_chain_lpml(chain, data, &mut score), PgcStatus::Ok);
        assert!(score.is_finite());

        let path = CString::new(dir.path().join("c.csv").to_str().unwrap()).unwrap();
        assert_eq!(pgc_chain_write_csv(chain, path.as_ptr()), PgcStatus::Ok);
        let mut reread = ptr::null_mut();
        assert_eq!(pgc_chain_read_csv(path.as_ptr(), &mut reread), PgcStatus::Ok);
        let mut score_back = 0.0;
        assert_eq!(pgc_chain_lpml(reread, data, &mut score_back), PgcStatus::Ok);
        assert_eq!(score, score_back);

        pgc_chain_free(reread);
        pgc_chain_free(chain);
        pgc_dataset_free(back);
        pgc_dataset_free(data);
        pgc_model_free(model);
        pgc_model_free(ptr::null_mut());
    }
}

#[test]
fn fits_are_reproducible() {
    let model = example_model(PGC_FAMILY_GAUSSIAN);
    let mut cfg = pgc_mcmc_config_default();
    cfg.iterations = 1_000;
    cfg.burn_in = 500;
    cfg.thin = 5;
    cfg.stage2_burn_in = 50;
    let run = || unsafe {
        let mut data = ptr::null_mut();
        assert_eq!(pgc_simulate(model, 100, 9, &mut data), PgcStatus::Ok);
        let mut chain = ptr::null_mut();
        assert_eq!(pgc_fit(data, PGC_FAMILY_GAUSSIAN, &cfg, &mut chain), PgcStatus::Ok);
        let mut buf = vec![0.0; pgc_chain_len(chain) * pgc_chain_n_params(chain)];
        assert_eq!(pgc_chain_draws(chain, buf.as_mut_ptr(), buf.len()), PgcStatus::Ok);
        pgc_chain_free(chain);
        pgc_dataset_free(data);
        buf
    };
    assert_eq!(run(), run());
    unsafe { pgc_model_free(model) };
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/pgcopula.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["pgc_fit", "pgc_chain_draws", "pgc_last_error", "PGC_STATUS_NUMERICAL"] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        "#include \"pgcopula.h\"\nint main(void) { PgcMcmcConfig c = pgc_mcmc_config_default(); return (int)c.thin; }\n",
    )
    .unwrap();
    let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
    else {
        eprintln!("no C compiler found; skipping syntax check");
        return;
    };
    assert!(status.success());
}

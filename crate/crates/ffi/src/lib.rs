//! C ABI over `pgcopula`.
//!
//! Conventions:
//! * every fallible function returns a [`PgcStatus`] and writes its result
//!   through an out-pointer, which is left untouched on failure;
//! * models, datasets and chains are opaque handles created by `pgc_*_new`,
//!   `pgc_simulate`, `pgc_fit` or a `*_read_csv` call and released with the
//!   matching `*_free`;
//! * on failure `pgc_last_error` returns a message for the calling thread;
//! * angles are radians unless a `degrees` flag says otherwise;
//! * panics never cross the boundary, they surface as `PGC_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use pgcopula::diagnostics::lpml;
use pgcopula::inference::{Chain, McmcConfig, PriorSpec};
use pgcopula::io::{self, AngleUnit};
use pgcopula::{
    joint_log_pdf, log_likelihood, pg_cdf, pg_log_pdf, pg_quantile, run_two_stage,
    simulate_dataset, CopulaFamily, CopulaParams, CorrelationMatrix, Dataset, Error,
    MarginalParams, ModelParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const PGC_FAMILY_GAUSSIAN: i32 = 0;
pub const PGC_FAMILY_T: i32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgcStatus {
    Ok = 0,
    NullPointer = 1,
    /// Argument outside a function's mathematical domain.
    Domain = 2,
    InvalidArgument = 3,
    /// Numerical breakdown: non-finite values or a non-positive-definite matrix.
    Numerical = 4,
    Io = 5,
    Diagnostics = 6,
    Panic = 7,
}

pub struct PgcModel(ModelParams);
pub struct PgcDataset(Dataset);
pub struct PgcChain(Chain);

/// Sampler settings; start from `pgc_mcmc_config_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PgcMcmcConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub initial_step: f64,
    pub initial_rho_step: f64,
    pub initial_nu_step: f64,
    pub initial_nu: f64,
    pub adaptation_window: usize,
    pub target_acceptance: f64,
    pub stage2_burn_in: usize,
    pub stage2_sweeps: usize,
}

impl From<&McmcConfig> for PgcMcmcConfig {
    fn from(c: &McmcConfig) -> Self {
        PgcMcmcConfig {
            iterations: c.iterations,
            burn_in: c.burn_in,
            thin: c.thin,
            seed: c.seed,
            initial_step: c.initial_step,
            initial_rho_step: c.initial_rho_step,
            initial_nu_step: c.initial_nu_step,
            initial_nu: c.initial_nu,
            adaptation_window: c.adaptation_window,
            target_acceptance: c.target_acceptance,
            stage2_burn_in: c.stage2_burn_in,
            stage2_sweeps: c.stage2_sweeps,
        }
    }
}

impl From<&PgcMcmcConfig> for McmcConfig {
    fn from(c: &PgcMcmcConfig) -> Self {
        McmcConfig {
            iterations: c.iterations,
            burn_in: c.burn_in,
            thin: c.thin,
            seed: c.seed,
            initial_step: c.initial_step,
            initial_rho_step: c.initial_rho_step,
            initial_nu_step: c.initial_nu_step,
            initial_nu: c.initial_nu,
            adaptation_window: c.adaptation_window,
            target_acceptance: c.target_acceptance,
            stage2_burn_in: c.stage2_burn_in,
            stage2_sweeps: c.stage2_sweeps,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

enum Failure {
    Core(Error),
    Null(&'static str),
    Arg(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn status_of(e: &Error) -> PgcStatus {
    match e {
        Error::Domain { .. } => PgcStatus::Domain,
        Error::NotPositiveDefinite { .. } | Error::NonFinite(_) => PgcStatus::Numerical,
        Error::Io { .. } | Error::Csv(_) | Error::Json(_) => PgcStatus::Io,
        Error::Diagnostics(_) => PgcStatus::Diagnostics,
        _ => PgcStatus::InvalidArgument,
    }
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PgcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PgcStatus::Ok,
        Ok(Err(Failure::Core(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(name))) => {
            set_last_error(format!("{name} is null"));
            PgcStatus::NullPointer
        }
        Ok(Err(Failure::Arg(msg))) => {
            set_last_error(msg);
            PgcStatus::InvalidArgument
        }
        Err(_) => {
            set_last_error("internal panic".into());
            PgcStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write<T>(out: *mut T, value: T, name: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn path(p: *const c_char) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(Failure::Null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(PathBuf::from)
        .map_err(|_| Failure::Arg("path is not valid UTF-8".into()))
}

fn family(code: i32) -> Result<CopulaFamily, Failure> {
    match code {
        PGC_FAMILY_GAUSSIAN => Ok(CopulaFamily::Gaussian),
        PGC_FAMILY_T => Ok(CopulaFamily::StudentT),
        c => Err(Failure::Arg(format!("unknown copula family code {c}"))),
    }
}

fn unit(degrees: bool) -> AngleUnit {
    if degrees {
        AngleUnit::Degrees
    } else {
        AngleUnit::Radians
    }
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message for the most recent failure on this thread, or "" if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pgc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn pgc_mcmc_config_default() -> PgcMcmcConfig {
    PgcMcmcConfig::from(&McmcConfig::default())
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pgc_pg_log_pdf(
    theta: f64,
    alpha1: f64,
    alpha2: f64,
    beta: f64,
    out: *mut f64,
) -> PgcStatus {
    guard(|| {
        let p = MarginalParams::new(alpha1, alpha2, beta)?;
        write(out, pg_log_pdf(theta, &p)?, "out")
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pgc_pg_cdf(
    theta: f64,
    alpha1: f64,
    alpha2: f64,
    beta: f64,
    out: *mut f64,
) -> PgcStatus {
    guard(|| {
        let p = MarginalParams::new(alpha1, alpha2, beta)?;
        write(out, pg_cdf(theta, &p)?, "out")
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pgc_pg_quantile(
    p: f64,
    alpha1: f64,
    alpha2: f64,
    beta: f64,
    out: *mut f64,
) -> PgcStatus {
    guard(|| {
        let params = MarginalParams::new(alpha1, alpha2, beta)?;
        write(out, pg_quantile(p, &params)?.value(), "out")
    })
}

/// Builds a model from `m` marginal triples `(alpha1, alpha2, beta)` stored
/// back to back, the `m(m-1)/2` upper-triangle correlations in row order,
/// and `nu` (ignored for the Gaussian family).
///
/// # Safety
/// `marginals` must hold `3 * m` values, `upper` `m * (m - 1) / 2` values,
/// and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pgc_model_new(
    m: usize,
    marginals: *const f64,
    family_code: i32,
    upper: *const f64,
    nu: f64,
    out: *mut *mut PgcModel,
) -> PgcStatus {
    guard(|| {
        if m < 2 {
            return Err(Failure::Arg(format!("a model needs m >= 2, got {m}")));
        }
        let triples = slice(marginals, 3 * m, "marginals")?;
        let upper = slice(upper, m * (m - 1) / 2, "upper")?;
        let margins = triples
            .chunks(3)
            .map(|t| MarginalParams::new(t[0], t[1], t[2]))
            .collect::<Result<Vec<_>, _>>()?;
        let r = CorrelationMatrix::from_upper(m, upper)?;
        let copula = match family(family_code)? {
            CopulaFamily::Gaussian => CopulaParams::gaussian(r),
            CopulaFamily::StudentT => CopulaParams::student_t(nu, r)?,
        };
        let model = ModelParams::new(margins, copula)?;
        write(out, boxed(PgcModel(model)), "out")
    })
}

/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pgc_model_free(model: *mut PgcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle, `theta` must hold `m` values and `out`
/// must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pgc_model_joint_log_pdf(
    model: *const PgcModel,
    theta: *const f64,
    m: usize,
    out: *mut f64,
) -> PgcStatus {
    guard(|| {
        let model = deref(model, "model")?;
        let theta = slice(theta, m, "theta")?;
        write(out, joint_log_pdf(theta, &model.0)?, "out")
    })
}

/// # Safety
/// `values` must hold `n * m` row-major radians and `out` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn pgc_dataset_new(
    n: usize,
    m: usize,
    values: *const f64,
    out: *mut *mut PgcDataset,
) -> PgcStatus {
    guard(|| {
        let values = slice(values, n * m, "values")?.to_vec();
        let data = Dataset::new(n, m, values)?;
        write(out, boxed(PgcDataset(data)), "out")
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pgc_dataset_read_csv(
    path_: *const c_char,
    degrees: bool,
    out: *mut *mut PgcDataset,
) -> PgcStatus {
    guard(|| {
        let data = io::read_dataset(&path(path_)?, unit(degrees))?;
        write(out, boxed(PgcDataset(data)), "out")
    })
}

/// # Safety
/// `data` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pgc_dataset_write_csv(
    data: *const PgcDataset,
    path_: *const c_char,
    degrees: bool,
) -> PgcStatus {
    guard(|| {
        let data = deref(data, "data")?;
        io::write_dataset(&path(path_)?, &data.0, unit(degrees))?;
        Ok(())
    })
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `data` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pgc_dataset_rows(data: *const PgcDataset) -> usize {
    data.as_ref().map_or(0, |d| d.0.n_rows())
}

/// Number of columns, or 0 for a null handle.
///
/// # Safety
/// `data` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pgc_dataset_cols(data: *const PgcDataset) -> usize {
    data.as_ref().map_or(0, |d| d.0.n_cols())
}

/// # Safety
/// `data` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pgc_dataset_free(data: *mut PgcDataset) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// # Safety
/// `model` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pgc_simulate(
    model: *const PgcModel,
    n: usize,
    seed: u64,
    out: *mut *mut PgcDataset,
) -> PgcStatus {
    guard(|| {
        let model = deref(model, "model")?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = simulate_dataset(&model.0, n, &mut rng)?;
        write(out, boxed(PgcDataset(data)), "out")
    })
}

/// # Safety
/// Both handles must be live and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pgc_log_likelihood(
    data: *const PgcDataset,
    model: *const PgcModel,
    out: *mut f64,
) -> PgcStatus {
    guard(|| {
        let data = deref(data, "data")?;
        let model = deref(model, "model")?;
        write(out, log_likelihood(&data.0, &model.0)?, "out")
    })
}

/// Runs the two-stage sampler with the default priors.
///
/// # Safety
/// `data` and `config` must be valid and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pgc_fit(
    data: *const PgcDataset,
    family_code: i32,
    config: *const PgcMcmcConfig,
    out: *mut *mut PgcChain,
) -> PgcStatus {
    guard(|| {
        let data = deref(data, "data")?;
        let config = McmcConfig::from(deref(config, "config")?);
        let chain = run_two_stage(&data.0, family(family_code)?, &PriorSpec::default(), &config)?;
        write(out, boxed(PgcChain(chain)), "out")
    })
}

/// Number of retained draws, or 0 for a null handle.
///
/// # Safety
/// `chain` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pgc_chain_len(chain: *const PgcChain) -> usize {
    chain.as_ref().map_or(0, |c| c.0.len())
}

/// Number of parameters per draw, or 0 for a null handle.
///
/// # Safety
/// `chain` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pgc_chain_n_params(chain: *const PgcChain) -> usize {
    chain.as_ref().map_or(0, |c| c.0.param_names().len())
}

/// Copies the draws row-major (one row per draw, columns in CSV order)
/// into `buf`, which must hold `len` values with
/// `len == pgc_chain_len * pgc_chain_n_params`.
///
/// # Safety
/// `chain` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn pgc_chain_draws(
    chain: *const PgcChain,
    buf: *mut f64,
    len: usize,
) -> PgcStatus {
    guard(|| {
        let chain = &deref(chain, "chain")?.0;
        let need = chain.len() * chain.param_names().len();
        if len != need {
            return Err(Failure::Arg(format!("buffer holds {len} values, need {need}")));
        }
        if need == 0 {
            return Ok(());
        }
        if buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        let flat: Vec<f64> = chain.draws().iter().flat_map(|d| d.to_flat()).collect();
        ptr::copy_nonoverlapping(flat.as_ptr(), buf, need);
        Ok(())
    })
}

/// # Safety
/// Both handles must be live and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pgc_chain_lpml(
    chain: *const PgcChain,
    data: *const PgcDataset,
    out: *mut f64,
) -> PgcStatus {
    guard(|| {
        let chain = deref(chain, "chain")?;
        let data = deref(data, "data")?;
        write(out, lpml(&data.0, &chain.0)?, "out")
    })
}

/// # Safety
/// `chain` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pgc_chain_write_csv(
    chain: *const PgcChain,
    path_: *const c_char,
) -> PgcStatus {
    guard(|| {
        let chain = deref(chain, "chain")?;
        io::write_chain(&path(path_)?, &chain.0)?;
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pgc_chain_read_csv(
    path_: *const c_char,
    out: *mut *mut PgcChain,
) -> PgcStatus {
    guard(|| {
        let chain = io::read_chain(&path(path_)?)?;
        write(out, boxed(PgcChain(chain)), "out")
    })
}

/// # Safety
/// `chain` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pgc_chain_free(chain: *mut PgcChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

//! Oracles shared by the integration tests. Nothing here calls into the
//! library's numerics, so agreement with it is independent evidence.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use pgcopula::{CopulaParams, CorrelationMatrix, MarginalParams, ModelParams};

/// ln Γ by upward recurrence and the Stirling series.
pub fn ln_gamma_stirling(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut shift = 0.0;
    let mut z = x;
    while z < 15.0 {
        shift += z.ln();
        z += 1.0;
    }
    let z2 = z * z;
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2)
        - 1.0 / (1680.0 * z * z2 * z2 * z2)
        + 1.0 / (1188.0 * z * z2 * z2 * z2 * z2);
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - shift
}

/// Projected Gamma density written straight from its definition.
pub fn pg_density(theta: f64, a1: f64, a2: f64, b: f64) -> f64 {
    let ln_b = ln_gamma_stirling(a1) + ln_gamma_stirling(a2) - ln_gamma_stirling(a1 + a2);
    let (s, c) = theta.sin_cos();
    (a2 * b.ln() + (a1 - 1.0) * c.ln() + (a2 - 1.0) * s.ln()
        - ln_b
        - (a1 + a2) * (c + b * s).ln())
    .exp()
}

const TS_T_MAX: f64 = 4.0;

/// Tanh-sinh quadrature of `f` over the open interval `(a, b)`. Abscissae
/// are built from their distance to the nearest endpoint, so `f` is never
/// evaluated on the boundary and endpoint singularities are resolved.
pub fn tanh_sinh<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mut term = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.abs().sinh();
        let delta = half * 2.0 / (1.0 + (2.0 * u).exp());
        let x = if t >= 0.0 { b - delta } else { a + delta };
        if !(x > a && x < b) || delta == 0.0 {
            return 0.0;
        }
        let w = half * FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
        if w == 0.0 {
            return 0.0;
        }
        w * f(x)
    };
    let mut h = 1.0;
    let mut sum = term(0.0);
    let mut k = 1.0;
    while k * h <= TS_T_MAX {
        sum += term(k * h) + term(-k * h);
        k += 1.0;
    }
    let mut estimate = sum * h;
    for level in 1..=12 {
        h *= 0.5;
        let mut t = h;
        while t <= TS_T_MAX {
            sum += term(t) + term(-t);
            t += 2.0 * h;
        }
        let next = sum * h;
        if level >= 4 && (next - estimate).abs() <= tol * next.abs().max(1.0) {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Nested tanh-sinh over the square `(a, b)²`.
pub fn tanh_sinh_2d<F: FnMut(f64, f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    tanh_sinh(|x| tanh_sinh(|y| f(x, y), a, b, tol * 0.1), a, b, tol)
}

/// Kolmogorov–Smirnov statistic of `sample` against the CDF `cdf`.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS p-value with Stephens' finite-sample correction.
pub fn ks_p_value(n: usize, d: f64) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut p = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let sign = if k as i64 % 2 == 1 { 1.0 } else { -1.0 };
        p += sign * (-2.0 * k * k * lambda * lambda).exp();
    }
    (2.0 * p).clamp(0.0, 1.0)
}

pub fn marginal(a1: f64, a2: f64, b: f64) -> MarginalParams {
    MarginalParams::new(a1, a2, b).unwrap()
}

/// Example 1: bivariate Gaussian-coupled model.
pub fn example1() -> ModelParams {
    ModelParams::new(
        vec![marginal(2.0, 2.0, 1.0), marginal(0.5, 0.5, 1.0)],
        CopulaParams::gaussian(CorrelationMatrix::from_upper(2, &[0.7]).unwrap()),
    )
    .unwrap()
}

/// Example 2: trivariate t-coupled model with ν = 3.
pub fn example2() -> ModelParams {
    ModelParams::new(
        vec![
            marginal(2.0, 2.0, 2.0),
            marginal(0.5, 3.0, 1.0),
            marginal(3.0, 5.0, 3.0),
        ],
        CopulaParams::student_t(
            3.0,
            CorrelationMatrix::from_upper(3, &[0.75, -0.75, -0.75]).unwrap(),
        )
        .unwrap(),
    )
    .unwrap()
}

/// Normal CDF by tanh-sinh quadrature of the density from 0.
pub fn normal_cdf_quad(z: f64) -> f64 {
    let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
    if z == 0.0 {
        return 0.5;
    }
    let part = tanh_sinh(pdf, 0.0, z.abs(), 1e-14);
    if z > 0.0 {
        0.5 + part
    } else {
        0.5 - part
    }
}

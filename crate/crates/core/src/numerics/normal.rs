//! Standard normal distribution function and quantile.

use std::f64::consts::PI;

use super::special::upper_inc_gamma;
use crate::error::{Error, Result};

pub(crate) const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// `Φ(z)`.
pub fn std_normal_cdf(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::domain("std_normal_cdf", format!("z = {z} is not finite")));
    }
    Ok(normal_tails(z).0)
}

/// `Φ^{-1}(p)` for `p` strictly inside `(0, 1)`.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("std_normal_quantile", format!("p = {p} must lie in (0, 1)")));
    }
    Ok(normal_quantile_tails(p, 1.0 - p))
}

/// `(Φ(z), 1 - Φ(z))` via `erfc(t) = Q(1/2, t²)`.
pub(crate) fn normal_tails(z: f64) -> (f64, f64) {
    let tail = 0.5 * upper_inc_gamma(0.5, 0.5 * z * z);
    if z < 0.0 {
        (tail, 1.0 - tail)
    } else {
        (1.0 - tail, tail)
    }
}

/// Quantile from a lower/upper tail pair, inverting whichever tail is smaller.
pub(crate) fn normal_quantile_tails(lower: f64, upper: f64) -> f64 {
    if lower <= upper {
        lower_tail_quantile(lower)
    } else {
        -lower_tail_quantile(upper)
    }
}

// Acklam's rational approximation followed by one Halley correction.
// `p` is at most 1/2, so the result is non-positive.
fn lower_tail_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_690e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 0.5 {
        return 0.0;
    }
    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    let (cdf, _) = normal_tails(x);
    let e = cdf - p;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    let refined = x - u / (1.0 + 0.5 * x * u);
    if refined.is_finite() {
        refined
    } else {
        x
    }
}

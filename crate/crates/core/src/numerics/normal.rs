//! Standard normal distribution function and quantile.
//!
//! `erfc` comes from the `libm` crate (a port of the FreeBSD/musl
//! implementation, error below one ulp), so results are bit-identical across
//! platforms instead of depending on the system math library.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal distribution function Φ(x).
///
/// Computed as `erfc(-x/√2)/2`, which keeps full relative precision in the
/// lower tail. Total on finite inputs; ±inf map to 1 and 0.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        // NaN never escapes; callers validate finiteness before this point.
        debug_assert!(false, "std_normal_cdf(NaN)");
        return 0.5;
    }
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * libm::exp(-0.5 * x * x)
}

// Acklam's rational approximation, relative error 1.15e-9 before refinement.
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
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

/// Standard normal quantile Φ⁻¹(u) for `u` in the open interval (0, 1).
///
/// Acklam's approximation followed by one Halley step against
/// [`std_normal_cdf`], giving close to full double precision. Only `libm`
/// elementary functions are used, so the output is platform independent.
pub fn std_normal_quantile(u: f64) -> f64 {
    debug_assert!(u > 0.0 && u < 1.0, "quantile argument {u} outside (0,1)");
    const P_LOW: f64 = 0.02425;
    const P_HIGH: f64 = 1.0 - P_LOW;

    let x = if u < P_LOW {
        let q = libm::sqrt(-2.0 * libm::log(u));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if u <= P_HIGH {
        let q = u - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = libm::sqrt(-2.0 * libm::log(1.0 - u));
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    // Halley refinement; in the upper half use the complementary form to keep
    // precision when u is close to 1.
    let err = if u <= 0.5 {
        std_normal_cdf(x) - u
    } else {
        (1.0 - u) - std_normal_cdf(-x)
    };
    let step = err * libm::sqrt(2.0 * PI) * libm::exp(0.5 * x * x);
    x - step / (1.0 + 0.5 * x * step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_at_zero_is_half() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
    }

    #[test]
    fn cdf_limits() {
        assert_eq!(std_normal_cdf(f64::INFINITY), 1.0);
        assert_eq!(std_normal_cdf(f64::NEG_INFINITY), 0.0);
        assert!((1.0 - std_normal_cdf(10.0)) < 1e-12);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &u in &[1e-300, 1e-12, 0.001, 0.025, 0.2, 0.5, 0.7, 0.975, 0.999_999] {
            let x = std_normal_quantile(u);
            let back = std_normal_cdf(x);
            assert!(((back - u) / u).abs() < 1e-13, "u={u} x={x} back={back}");
        }
        assert_eq!(std_normal_quantile(0.5), 0.0);
    }

    #[test]
    fn quantile_is_odd() {
        for &u in &[0.01, 0.1, 0.3] {
            let lo = std_normal_quantile(u);
            let hi = std_normal_quantile(1.0 - u);
            assert!((lo + hi).abs() < 1e-12);
        }
    }
}

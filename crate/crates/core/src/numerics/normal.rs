use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Φ(x) with no input checking. Infinite arguments map to 0 or 1.
#[inline]
pub(crate) fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// 1 − Φ(x), computed without cancellation in the upper tail.
#[inline]
pub(crate) fn sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * std::f64::consts::FRAC_1_SQRT_2)
}

#[inline]
pub(crate) fn pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

fn check_finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("expected a finite argument, got {x}")))
    }
}

/// Standard normal distribution function.
pub fn norm_cdf(x: f64) -> Result<f64> {
    check_finite(x)?;
    Ok(cdf(x))
}

/// Standard normal survival function 1 − Φ(x).
pub fn norm_sf(x: f64) -> Result<f64> {
    check_finite(x)?;
    Ok(sf(x))
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> Result<f64> {
    check_finite(x)?;
    Ok(pdf(x))
}

/// Inverse of [`norm_cdf`] on the open unit interval.
pub fn norm_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("probability must lie in (0, 1), got {p}")));
    }
    Ok(quantile(p))
}

// Acklam's rational approximation (relative error ~1.2e-9).
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
const D: [f64; 4] = [7.784_695_709_041_462e-3, 3.224_671_290_700_398e-1, 2.445_134_137_142_996, 3.754_408_661_907_416];
const P_LOW: f64 = 0.024_25;

fn acklam(p: f64) -> f64 {
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Quantile for p in (0, 1); one Halley-corrected Newton step on the
/// rational start. The residual is taken on whichever tail is smaller.
pub(crate) fn quantile(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let x = acklam(p);
    let resid = if x <= 0.0 { cdf(x) - p } else { (1.0 - p) - sf(x) };
    let u = resid / pdf(x);
    x - u / (1.0 + 0.5 * x * u)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from 40-digit mpmath evaluations.
    #[test]
    fn cdf_reference_values() {
        assert_eq!(norm_cdf(0.0).unwrap(), 0.5);
        assert!((norm_cdf(1.959964).unwrap() - 0.975_000_000_903_557_6).abs() < 1e-12);
        assert!((norm_cdf(1.0).unwrap() - 0.841_344_746_068_542_9).abs() < 1e-12);
        let lo = norm_cdf(-8.0).unwrap();
        assert!((lo - 6.220_960_574_271_784e-16).abs() < 1e-17);
        assert!((norm_cdf(-20.0).unwrap() / 2.753_624_118_606_234e-89 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_rejects_non_finite() {
        assert!(matches!(norm_cdf(f64::NAN), Err(Error::Domain(_))));
        assert!(norm_cdf(f64::INFINITY).is_err());
        assert!(norm_pdf(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn quantile_reference_values() {
        assert_eq!(norm_quantile(0.5).unwrap(), 0.0);
        assert!((norm_quantile(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-12);
        assert!((norm_quantile(0.9999).unwrap() - 3.719_016_485_455_68).abs() < 1e-10);
        assert!((norm_quantile(0.3).unwrap() + 0.524_400_512_708_040_8).abs() < 1e-12);
        assert!((norm_quantile(1e-10).unwrap() + 6.361_340_902_404_056).abs() < 1e-9);
        assert!((norm_quantile(0.999_999_999).unwrap() - 5.997_807_015_007_687).abs() < 1e-6);
    }

    #[test]
    fn quantile_rejects_boundary() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(norm_quantile(p).is_err(), "p = {p}");
        }
    }

    #[test]
    fn pdf_values() {
        assert!((norm_pdf(0.0).unwrap() - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert!((norm_pdf(1.0).unwrap() - 0.241_970_724_519_143_35).abs() < 1e-15);
        assert_eq!(norm_pdf(-2.3).unwrap(), norm_pdf(2.3).unwrap());
    }

    #[test]
    fn reflection_symmetry() {
        let mut x = -8.0;
        while x <= 8.0 {
            assert!((cdf(-x) - (1.0 - cdf(x))).abs() <= 1e-14, "x = {x}");
            x += 0.037;
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        let mut x = -6.0;
        while x <= 6.0 {
            assert!((quantile(cdf(x)) - x).abs() < 1e-8, "x = {x}");
            x += 0.013;
        }
        for p in [1e-300, 1e-50, 1e-12, 0.01, 0.024, 0.025, 0.2, 0.7, 0.97, 0.976, 0.999] {
            assert!((cdf(quantile(p)) - p).abs() <= 1e-10 * p.max(1e-5), "p = {p}");
        }
    }
}

//! Replication success of a pair: two-trials rule and the sceptical p-value.
//!
//! The sceptical p-value compares the replication estimate against a
//! sceptical prior centred at the margin. Its nominal version reduces to the
//! sceptical z-statistic `ζ`, the value of `z` solving
//!
//! ```text
//! (z_o²/z² − 1)(z_r²/z² − 1) = c,    0 < z ≤ min(|z_o|, |z_r|)
//! ```
//!
//! with the sign of `z_r`. The controlled version maps `ζ` through the
//! probability, under independent null z-statistics, that the sceptical z
//! exceeds `ζ` with both estimates in the benefit direction. Taking the square
//! root of that probability yields a p-value whose overall Type-I error is
//! exactly `α²`, the same as the two-trials rule.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{find_root, pdf, quantile, sf, Bracket, Quadrature};
use crate::study::{normalize_pair, NormalizedPair, StudyPair};

/// Variance τ² of the sceptical prior that puts the lower limit of the
/// posterior `1 − 2α` credible interval exactly at the prior centre.
pub fn sceptical_prior_variance(se_o: f64, z_o: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let z_alpha = quantile(1.0 - alpha);
    if !(z_o > z_alpha) {
        return Err(Error::domain(format!(
            "no sufficiently sceptical prior: z_o = {z_o} does not exceed z_alpha = {z_alpha}"
        )));
    }
    Ok(se_o * se_o / ((z_o / z_alpha).powi(2) - 1.0))
}

/// Prior-predictive tail probability of the replication estimate under the
/// sceptical prior N(delta, tau2). Small values mean strong conflict with the
/// prior, i.e. support for the effect.
pub fn box_tail_probability(theta_r: f64, se_r: f64, tau2: f64, delta: f64) -> f64 {
    crate::numerics::cdf((theta_r - delta) / (tau2 + se_r * se_r).sqrt())
}

/// Signed sceptical z-statistic; `None` when the original estimate is not in
/// the benefit direction (`z_o <= 0`).
pub fn sceptical_z(z_o: f64, z_r: f64, c: f64) -> Option<f64> {
    if !(z_o > 0.0) {
        return None;
    }
    if z_r == 0.0 {
        return Some(0.0);
    }
    let a = z_o * z_o;
    let b = z_r * z_r;
    let x = ((a + b) + ((a - b).powi(2) + 4.0 * c * a * b).sqrt()) / (2.0 * a * b);
    Some(z_r.signum() / x.sqrt())
}

/// Smallest replication z that reaches sceptical z `t` given original `z_o`.
/// Infinite when `z_o <= t`.
pub(crate) fn success_boundary(z_o: f64, c: f64, t: f64) -> f64 {
    if z_o <= t {
        return f64::INFINITY;
    }
    t * (1.0 + c * t * t / ((z_o - t) * (z_o + t))).sqrt()
}

const T1E_QUADRATURE: Quadrature = Quadrature { abs_tol: 1e-13, rel_tol: 1e-10, max_intervals: 4000 };
const T1E_CUTOFF: f64 = 40.0;

/// Overall Type-I error of the rule "sceptical z >= t": the probability,
/// for independent standard normal `z_o` and `z_r`, that both are positive
/// and the sceptical z exceeds `t`.
pub fn t1e_sceptical(t: f64, c: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("threshold must be positive and finite, got {t}")));
    }
    check_c(c)?;
    let integrand = |x: f64| {
        let b = success_boundary(x, c, t);
        if b.is_finite() {
            sf(b) * pdf(x)
        } else {
            0.0
        }
    };

    // The integrand vanishes at x = t and most of its mass sits within a few
    // units (or 1/t for large t) of the lower limit.
    let s = 1.0 / t.max(1.0);
    let upper = t + T1E_CUTOFF;
    let mut points = vec![t, upper];
    points.extend([1e-4, 1e-2, 1.0].iter().map(|k| t + k * t));
    points.extend([0.01, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0].iter().map(|k| t + k * s));
    points.extend([t + 16.0]);
    points.retain(|&p| p >= t && p <= upper);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let body = T1E_QUADRATURE.integrate_partitioned(integrand, &points)?.value;
    // Beyond the cutoff the boundary is ~t, so the integrand is ~ (1 − Φ(t)) φ(x).
    let tail = sf(t) * sf(upper);
    Ok((body + tail).clamp(0.0, 0.25))
}

/// Controlled sceptical p-value, `None` when `z_o <= 0`.
pub fn sceptical_p_controlled(z_o: f64, z_r: f64, c: f64) -> Result<Option<f64>> {
    check_c(c)?;
    let Some(zeta) = sceptical_z(z_o, z_r, c) else {
        return Ok(None);
    };
    let p = if zeta > 0.0 {
        t1e_sceptical(zeta, c)?.sqrt()
    } else if zeta < 0.0 {
        1.0 - t1e_sceptical(-zeta, c)?.sqrt()
    } else {
        0.5
    };
    Ok(Some(p))
}

/// Nominal (uncalibrated) sceptical p-value `1 − Φ(ζ)`.
pub fn sceptical_p_nominal(z_o: f64, z_r: f64, c: f64) -> Option<f64> {
    sceptical_z(z_o, z_r, c).map(sf)
}

/// Sceptical z threshold `t_α` whose overall Type-I error is `α²`.
/// Success at level α holds iff `ζ >= t_α`.
pub fn controlled_threshold(alpha: f64, c: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_c(c)?;
    let target = alpha * alpha;
    if target >= 0.25 {
        return Ok(0.0);
    }
    let mut failure = None;
    let root = find_root(
        |t| match t1e_sceptical(t, c) {
            Ok(v) => v - target,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        Bracket::new(1e-8, 10.0)?,
        1e-12,
    );
    match failure {
        Some(e) => Err(e),
        None => root,
    }
}

/// Nominal one-sided level corresponding to [`controlled_threshold`].
pub fn controlled_level(alpha: f64, c: f64) -> Result<f64> {
    controlled_threshold(alpha, c).map(sf)
}

/// p-value of the two-trials rule.
pub fn two_trials_p(p_o: f64, p_r: f64) -> f64 {
    p_o.max(p_r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssessmentResult {
    pub label: String,
    pub z_o: f64,
    pub z_r: f64,
    pub p_o: f64,
    pub p_r: f64,
    pub c: f64,
    pub p_ttr: f64,
    pub p_s_nominal: Option<f64>,
    pub p_s_controlled: Option<f64>,
    pub success_ttr: bool,
    pub success_sceptical: bool,
    pub alpha: f64,
}

impl AssessmentResult {
    /// Success of the uncalibrated sceptical p-value at the same level.
    pub fn success_nominal(&self) -> bool {
        self.p_s_nominal.is_some_and(|p| p <= self.alpha)
    }
}

pub fn assess_pair(pair: &StudyPair, alpha: f64) -> Result<AssessmentResult> {
    assess_normalized(&pair.label, &normalize_pair(pair), alpha)
}

pub fn assess_normalized(label: &str, n: &NormalizedPair, alpha: f64) -> Result<AssessmentResult> {
    check_alpha(alpha)?;
    let p_o = n.p_o();
    let p_r = n.p_r();
    let p_ttr = two_trials_p(p_o, p_r);
    let p_s_controlled = sceptical_p_controlled(n.z_o, n.z_r, n.c)?;
    Ok(AssessmentResult {
        label: label.to_string(),
        z_o: n.z_o,
        z_r: n.z_r,
        p_o,
        p_r,
        c: n.c,
        p_ttr,
        p_s_nominal: sceptical_p_nominal(n.z_o, n.z_r, n.c),
        p_s_controlled,
        success_ttr: p_ttr <= alpha,
        success_sceptical: p_s_controlled.is_some_and(|p| p <= alpha),
        alpha,
    })
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 0.5 {
        Ok(())
    } else {
        Err(Error::domain(format!("alpha must lie in (0, 0.5], got {alpha}")))
    }
}

pub(crate) fn check_c(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("variance ratio must be positive and finite, got {c}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::cdf;
    use proptest::prelude::*;

    const Z_975: f64 = 1.959_963_984_540_054;

    /// Independent route to |ζ|: bisection on the defining product equation.
    fn zeta_by_bisection(z_o: f64, z_r: f64, c: f64) -> f64 {
        let g = |z: f64| (z_o * z_o / (z * z) - 1.0) * (z_r * z_r / (z * z) - 1.0) - c;
        let (mut lo, mut hi) = (1e-12, z_o.abs().min(z_r.abs()));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn prior_variance() {
        let tau2 = sceptical_prior_variance(1.0, 2f64.sqrt() * Z_975, 0.025).unwrap();
        assert!((tau2 - 1.0).abs() < 1e-12);
        assert!(sceptical_prior_variance(1.0, quantile(0.975), 0.025).is_err());
        assert!(sceptical_prior_variance(1.0, 1.5, 0.025).is_err());
        let tau2 = sceptical_prior_variance(0.0534, 3.946, 0.025).unwrap();
        assert!((tau2 - 9.339e-4).abs() < 1e-6);
    }

    #[test]
    fn prior_variance_puts_credible_limit_at_centre() {
        // Posterior of theta' = delta - theta (benefit-positive) under prior N(0, tau2)
        // and likelihood N(z_o*se, se^2): its lower (1 - 2 alpha) limit is zero.
        let (se, z_o, alpha) = (0.2, 3.1, 0.025);
        let tau2 = sceptical_prior_variance(se, z_o, alpha).unwrap();
        let post_var = 1.0 / (1.0 / tau2 + 1.0 / (se * se));
        let post_mean = post_var * (z_o * se) / (se * se);
        assert!((post_mean - quantile(1.0 - alpha) * post_var.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn box_tail() {
        assert_eq!(box_tail_probability(0.3, 0.1, 0.02, 0.3), 0.5);
        let plain = box_tail_probability(-0.1, 0.05, 0.0, 0.0);
        assert!((plain - cdf(-2.0)).abs() < 1e-15);
        // (-0.21) / sqrt(9.31e-4 + 0.0534^2) = -3.414
        let p = box_tail_probability(-0.21, 0.0534, 9.31e-4, 0.0);
        assert!((p - 3.195_027_464_831_39e-4).abs() < 1e-9);
    }

    #[test]
    fn sceptical_z_examples() {
        assert!((sceptical_z(2.0, 2.0, 1.0).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let z = sceptical_z(2.878, 1.685, 1.0).unwrap();
        assert!((z - 1.454_109_531_912_252_8).abs() < 1e-12);
        let z = sceptical_z(4.98, -0.344, 0.607).unwrap();
        assert!((z + 0.343_501_982_927_332_4).abs() < 1e-12);
        assert_eq!(sceptical_z(1.0, 0.0, 2.0), Some(0.0));
        assert_eq!(sceptical_z(0.0, 2.0, 2.0), None);
        assert_eq!(sceptical_z(-1.0, 2.0, 2.0), None);
    }

    #[test]
    fn nominal_examples() {
        assert!((sceptical_p_nominal(2.0, 2.0, 1.0).unwrap() - 0.078_649_603_525_142_57).abs() < 1e-12);
        assert!((sceptical_p_nominal(2.878, 1.685, 1.0).unwrap() - 0.072_957_970_652_520_65).abs() < 1e-10);
        assert_eq!(sceptical_p_nominal(2.0, 0.0, 1.0), Some(0.5));
    }

    // mpmath quadrature of the same integral at 25-40 digits.
    #[test]
    fn t1e_reference_values() {
        let cases = [
            (1.454, 1.0, 9.093_708_440_148_570e-4),
            (1.089, 2.3, 3.932_701_168_539_424e-3),
            (0.5, 0.5, 8.509_570_479_453_322e-2),
            (0.5, 1.0, 7.932_762_696_572_853e-2),
            (1.0, 2.0, 7.455_117_540_262_163e-3),
            (1.5, 10.0, 4.587_279_443_393_081e-6),
            (2.0, 1.0, 1.583_562_091_655_996e-5),
            (3.0, 0.2, 6.689_585_358_779_546e-8),
            (1e-6, 1.0, 0.249_999_601_057_719_6),
        ];
        for (t, c, want) in cases {
            let got = t1e_sceptical(t, c).unwrap();
            assert!((got - want).abs() < 1e-9, "t={t} c={c}: {got} vs {want}");
            assert!((got - want).abs() < 1e-7 * want, "relative t={t} c={c}: {got} vs {want}");
        }
    }

    #[test]
    fn t1e_domain() {
        assert!(t1e_sceptical(0.0, 1.0).is_err());
        assert!(t1e_sceptical(-1.0, 1.0).is_err());
        assert!(t1e_sceptical(1.0, 0.0).is_err());
        assert_eq!(t1e_sceptical(60.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn t1e_strictly_decreasing() {
        for c in [0.05, 0.5, 1.0, 4.0, 20.0] {
            let mut prev = 0.25;
            for i in 1..=60 {
                let v = t1e_sceptical(i as f64 * 0.08, c).unwrap();
                assert!(v < prev, "c={c} t={}", i as f64 * 0.08);
                prev = v;
            }
        }
    }

    #[test]
    fn controlled_examples() {
        let d5896 = sceptical_p_controlled(p_to_z(0.002), p_to_z(0.046), 1.0).unwrap().unwrap();
        assert!((d5896 - 0.03).abs() < 0.004, "{d5896}");
        let transcend = sceptical_p_controlled(p_to_z(0.10), p_to_z(0.002), 2.33).unwrap().unwrap();
        assert!((transcend - 0.064).abs() < 0.006, "{transcend}");
        let paradigm = sceptical_p_controlled(4.98, -0.344, 0.607).unwrap().unwrap();
        assert!((paradigm - 0.65).abs() < 0.02, "{paradigm}");
        let inspire = sceptical_p_controlled(0.416, 4.40, 19.8).unwrap().unwrap();
        assert!((inspire - 0.25).abs() < 0.02, "{inspire}");
        assert_eq!(sceptical_p_controlled(-0.6, -1.6, 4.7).unwrap(), None);
        assert_eq!(sceptical_p_controlled(1.0, 0.0, 1.0).unwrap(), Some(0.5));
    }

    fn p_to_z(p: f64) -> f64 {
        -quantile(p)
    }

    #[test]
    fn continuity_at_zero() {
        let up = sceptical_p_controlled(2.0, 1e-7, 1.0).unwrap().unwrap();
        let down = sceptical_p_controlled(2.0, -1e-7, 1.0).unwrap().unwrap();
        assert!((up - 0.5).abs() < 1e-5 && (down - 0.5).abs() < 1e-5, "{up} {down}");
    }

    #[test]
    fn threshold_properties() {
        let t = controlled_threshold(0.025, 1.0).unwrap();
        assert!((t - 1.511_670_719_869_574).abs() < 1e-8, "{t}");
        assert!((t1e_sceptical(t, 1.0).unwrap() - 0.025f64.powi(2)).abs() < 1e-9);
        assert!(t < Z_975);
        assert!(controlled_threshold(0.1, 1.0).unwrap() < t);
        for (alpha, c, want) in [
            (0.1, 1.0, 1.026_874_455_315_911_5),
            (0.025, 2.3, 1.358_591_262_003_734_4),
            (0.1, 0.5, 1.096_261_123_546_987),
            (0.1, 2.0, 0.946_253_317_029_442_8),
            (0.1, 10.0, 0.736_521_802_677_961_3),
        ] {
            let got = controlled_threshold(alpha, c).unwrap();
            assert!((got - want).abs() < 1e-8, "alpha={alpha} c={c}: {got}");
        }
        assert_eq!(controlled_threshold(0.5, 1.0).unwrap(), 0.0);
        assert!(controlled_threshold(0.0, 1.0).is_err());
        assert!(controlled_threshold(0.6, 1.0).is_err());
        let level = controlled_level(0.025, 1.0).unwrap();
        assert!(level > 0.025);
    }

    #[test]
    fn threshold_matches_p_value_decision() {
        let c = 1.7;
        let t = controlled_threshold(0.025, c).unwrap();
        let z_o = 3.0;
        let z_edge = success_boundary(z_o, c, t);
        let p_in = sceptical_p_controlled(z_o, z_edge + 1e-6, c).unwrap().unwrap();
        let p_out = sceptical_p_controlled(z_o, z_edge - 1e-6, c).unwrap().unwrap();
        assert!(p_in <= 0.025 && p_out > 0.025, "{p_in} {p_out}");
    }

    #[test]
    fn two_trials() {
        assert_eq!(two_trials_p(0.10, 0.002), 0.10);
        assert_eq!(two_trials_p(0.73, 0.95), 0.95);
        assert_eq!(two_trials_p(0.3, 0.3), 0.3);
    }

    #[test]
    fn alpha_boundary_counts_as_success() {
        let z_o = 3.0;
        let z_r = -quantile(0.025);
        let r = assess_normalized(
            "x",
            &NormalizedPair { z_o, z_r, se_o: 1.0, se_r: 1.0, c: 1.0, delta: 0.0, theta_o: -z_o, theta_r: -z_r },
            0.025,
        )
        .unwrap();
        assert_eq!(r.p_ttr, r.p_r);
        assert!((r.p_ttr - 0.025).abs() < 1e-15);
        assert_eq!(r.success_ttr, r.p_ttr <= 0.025);
    }

    proptest! {
        #[test]
        fn closed_form_solves_defining_equation(
            z_o in 0.05f64..8.0, z_r in prop_oneof![-8.0f64..-0.05, 0.05f64..8.0], c in 0.05f64..20.0,
        ) {
            let zeta = sceptical_z(z_o, z_r, c).unwrap();
            let z2 = zeta * zeta;
            let lhs = (z_o * z_o / z2 - 1.0) * (z_r * z_r / z2 - 1.0);
            prop_assert!((lhs - c).abs() <= 1e-8 * c.max(1.0));
            prop_assert!((zeta.abs() - zeta_by_bisection(z_o, z_r, c)).abs() < 1e-10);
            prop_assert!(zeta.abs() <= z_o.min(z_r.abs()));
            prop_assert_eq!(zeta.signum(), z_r.signum());
        }

        #[test]
        fn harmonic_identity_at_unit_ratio(z_o in 0.05f64..8.0, z_r in 0.05f64..8.0) {
            let zeta = sceptical_z(z_o, z_r, 1.0).unwrap();
            let harmonic = 1.0 / (1.0 / (z_o * z_o) + 1.0 / (z_r * z_r));
            prop_assert!((zeta * zeta - harmonic).abs() <= 1e-12 * harmonic.max(1.0));
        }

        #[test]
        fn nominal_is_stricter_than_two_trials(
            z_o in 0.01f64..6.0, z_r in 0.01f64..6.0, c in 0.05f64..20.0, alpha in 0.001f64..0.3,
        ) {
            let p_s = sceptical_p_nominal(z_o, z_r, c).unwrap();
            if p_s <= alpha {
                prop_assert!(sf(z_o) <= alpha && sf(z_r) <= alpha);
            }
        }

        #[test]
        fn nominal_increases_with_c(p_o in 0.0001f64..0.49, p_r in 0.0001f64..0.49, c in 0.05f64..10.0) {
            let (z_o, z_r) = (-quantile(p_o), -quantile(p_r));
            let a = sceptical_p_nominal(z_o, z_r, c).unwrap();
            let b = sceptical_p_nominal(z_o, z_r, c * 1.5).unwrap();
            prop_assert!(b > a);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn controlled_decreases_in_z_r(z_o in 0.2f64..5.0, z_r in -3.0f64..4.5, c in 0.1f64..15.0) {
            let a = sceptical_p_controlled(z_o, z_r, c).unwrap().unwrap();
            let b = sceptical_p_controlled(z_o, z_r + 0.25, c).unwrap().unwrap();
            prop_assert!(b < a, "{} {}", a, b);
        }

        #[test]
        fn controlled_depends_only_on_z_and_c(
            theta_o in -1.0f64..-0.01, se_o in 0.02f64..0.5, theta_r in -1.0f64..1.0, se_r in 0.02f64..0.5,
            k in 0.2f64..5.0,
        ) {
            let a = NormalizedPair::from_estimates(theta_o, se_o, theta_r, se_r, 0.0);
            let b = NormalizedPair::from_estimates(k * theta_o, k * se_o, k * theta_r, k * se_r, 0.0);
            let pa = sceptical_p_controlled(a.z_o, a.z_r, a.c).unwrap().unwrap();
            let pb = sceptical_p_controlled(b.z_o, b.z_r, b.c).unwrap().unwrap();
            prop_assert!((pa - pb).abs() < 1e-12);
        }
    }
}

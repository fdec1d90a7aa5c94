//! Combined inference across the two studies: one-sided confidence bounds
//! from the controlled sceptical p-value, fixed-effect meta-analysis and
//! Cochran's Q.

use std::cell::RefCell;

use serde::Serialize;

use crate::assessment::sceptical_p_controlled;
use crate::error::{Error, Result};
use crate::numerics::{chi_squared_sf, find_root, quantile, Bracket};
use crate::study::{normalize_pair, NormalizedPair, StudyPair};

pub const DEFAULT_OVERALL_ALPHA: f64 = 0.025;

/// Inverse-variance pooled estimate with a two-sided 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetaEstimate {
    pub estimate: f64,
    pub se: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QTest {
    pub q: f64,
    pub df: u32,
    pub p: f64,
}

/// Meta-analytic and sceptical intervals on the hazard-ratio scale.
/// The sceptical interval is one-sided, `(0, sceptical_upper_hr]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CombinedCI {
    pub meta_hr: f64,
    pub meta_lo: f64,
    pub meta_hi: f64,
    pub sceptical_upper_hr: f64,
    pub overall_level: f64,
}

fn check_estimates(estimates: &[(f64, f64)]) -> Result<()> {
    if estimates.len() < 2 {
        return Err(Error::domain("need at least two estimates"));
    }
    if let Some(&(est, se)) = estimates.iter().find(|(e, s)| !(e.is_finite() && *s > 0.0 && s.is_finite())) {
        return Err(Error::domain(format!("invalid estimate ({est}, {se})")));
    }
    Ok(())
}

/// Fixed-effect meta-analysis of `(estimate, se)` pairs.
pub fn fixed_effect_meta(estimates: &[(f64, f64)]) -> Result<MetaEstimate> {
    check_estimates(estimates)?;
    let (sw, swx) = estimates.iter().fold((0.0, 0.0), |(sw, swx), &(x, se)| {
        let w = 1.0 / (se * se);
        (sw + w, swx + w * x)
    });
    let estimate = swx / sw;
    let se = sw.sqrt().recip();
    let z = quantile(0.975);
    Ok(MetaEstimate { estimate, se, lo: estimate - z * se, hi: estimate + z * se })
}

/// Cochran's Q heterogeneity test.
pub fn cochran_q(estimates: &[(f64, f64)]) -> Result<QTest> {
    let pooled = fixed_effect_meta(estimates)?.estimate;
    let q: f64 = estimates.iter().map(|&(x, se)| (x - pooled).powi(2) / (se * se)).sum();
    let df = (estimates.len() - 1) as u32;
    Ok(QTest { q, df, p: chi_squared_sf(q, df)? })
}

/// Upper limit (log scale) of the one-sided `1 − overall_alpha` interval from
/// inverting the controlled sceptical p-value in the margin: the margin at
/// which the squared p-value equals `overall_alpha`.
pub fn sceptical_upper_log(n: &NormalizedPair, overall_alpha: f64) -> Result<f64> {
    if !(overall_alpha > 0.0 && overall_alpha < 0.25) {
        return Err(Error::domain(format!("overall alpha must lie in (0, 0.25), got {overall_alpha}")));
    }
    let target = overall_alpha.sqrt();
    let failure = RefCell::new(None);
    let objective = |delta: f64| {
        let m = n.with_margin(delta);
        match sceptical_p_controlled(m.z_o, m.z_r, m.c) {
            Ok(Some(p)) => p - target,
            // Margin at or below the original estimate: nothing shown yet.
            Ok(None) => 1.0 - target,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };

    let se = n.se_o.max(n.se_r);
    let start = n.theta_o.max(n.theta_r);
    let lo = start + 1e-9 * se.max(start.abs());
    let limit = start + 20.0 * se;
    let mut offset = se;
    let hi = loop {
        let hi = (start + offset).min(limit);
        if objective(hi) < 0.0 {
            break hi;
        }
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        if hi >= limit {
            return Err(Error::Inversion(format!(
                "no margin below log HR {limit:.4} reaches a squared sceptical p-value of {overall_alpha}"
            )));
        }
        offset *= 2.0;
    };
    let root = find_root(objective, Bracket::new(lo, hi)?, 1e-12);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    root.map_err(|e| Error::Inversion(e.to_string()))
}

/// Hazard-ratio upper limit of the sceptical one-sided interval.
pub fn sceptical_ci_upper(pair: &StudyPair, overall_alpha: f64) -> Result<f64> {
    sceptical_upper_log(&normalize_pair(pair), overall_alpha).map(f64::exp)
}

pub fn combined_ci(pair: &StudyPair, overall_alpha: f64) -> Result<CombinedCI> {
    let n = normalize_pair(pair);
    let meta = fixed_effect_meta(&[(n.theta_o, n.se_o), (n.theta_r, n.se_r)])?;
    Ok(CombinedCI {
        meta_hr: meta.estimate.exp(),
        meta_lo: meta.lo.exp(),
        meta_hi: meta.hi.exp(),
        sceptical_upper_hr: sceptical_upper_log(&n, overall_alpha)?.exp(),
        overall_level: 1.0 - overall_alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::study::{Design, StudyEffect};

    fn sup(label: &str, o: (f64, f64, f64), r: (f64, f64, f64)) -> StudyPair {
        StudyPair::new(
            label,
            Design::Superiority,
            1.0,
            StudyEffect::new(o.0, o.1, o.2).unwrap(),
            StudyEffect::new(r.0, r.1, r.2).unwrap(),
            true,
        )
        .unwrap()
    }

    #[test]
    fn meta_identical_inputs() {
        let m = fixed_effect_meta(&[(0.3, 0.2), (0.3, 0.2)]).unwrap();
        assert!((m.estimate - 0.3).abs() < 1e-15);
        assert!((m.se - 0.2 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn meta_errors() {
        assert!(fixed_effect_meta(&[(0.1, 0.1)]).is_err());
        assert!(fixed_effect_meta(&[(0.1, 0.1), (0.2, 0.0)]).is_err());
        assert!(cochran_q(&[]).is_err());
    }

    #[test]
    fn paradigm_and_impact_meta() {
        let paradigm = sup("PARADIGM-HF", (0.80, 0.73, 0.87), (1.02, 0.91, 1.14));
        let ci = combined_ci(&paradigm, 0.025).unwrap();
        assert!(
            (ci.meta_hr - 0.88).abs() < 0.01 && (ci.meta_lo - 0.82).abs() < 0.01 && (ci.meta_hi - 0.94).abs() < 0.01
        );
        assert!(ci.sceptical_upper_hr > 1.0);
        let impact = sup("IMPACT", (0.85, 0.80, 0.90), (1.13, 1.04, 1.23));
        let ci = combined_ci(&impact, 0.025).unwrap();
        assert!(
            (ci.meta_hr - 0.93).abs() < 0.01 && (ci.meta_lo - 0.89).abs() < 0.01 && (ci.meta_hi - 0.98).abs() < 0.01
        );
        assert!((ci.sceptical_upper_hr - 1.17).abs() < 0.02);
    }

    #[test]
    fn q_test_values() {
        let q = cochran_q(&[(0.2, 0.1), (0.2, 0.3)]).unwrap();
        assert!(q.q.abs() < 1e-15);
        assert_eq!(q.p, 1.0);
        let q = cochran_q(&[(0.0, 1.0), (2.0, 1.0)]).unwrap();
        assert!((q.q - 2.0).abs() < 1e-12 && q.df == 1);
        assert!((q.p - 0.157_299_207_050_281).abs() < 1e-9);
        let q = cochran_q(&[(0.0, 1.0), (0.0, 1.0), (3.0, 1.0)]).unwrap();
        assert!((q.q - 6.0).abs() < 1e-12 && q.df == 2);
        assert!((q.p - (-3.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn inversion_hits_target() {
        let leader = StudyPair::new(
            "LEADER",
            Design::NonInferiority,
            1.3,
            StudyEffect::new(0.87, 0.78, 0.97).unwrap(),
            StudyEffect::new(0.82, 0.76, 0.87).unwrap(),
            true,
        )
        .unwrap();
        let n = leader.normalize();
        let up = sceptical_upper_log(&n, 0.025).unwrap();
        assert!((up.exp() - 0.91).abs() < 0.02);
        let m = n.with_margin(up);
        let p = sceptical_p_controlled(m.z_o, m.z_r, m.c).unwrap().unwrap();
        assert!((p * p - 0.025).abs() < 1e-6);
        // A looser overall level gives a tighter bound.
        assert!(sceptical_upper_log(&n, 0.1).unwrap() < up);
    }

    #[test]
    fn pronounce_defined_despite_harm() {
        let pronounce = sup("PRONOUNCE", (1.28, 0.59, 2.79), (1.35, 0.94, 1.93));
        let up = sceptical_ci_upper(&pronounce, 0.025).unwrap();
        assert!((up - 1.85).abs() < 0.03, "{up}");
    }

    #[test]
    fn bad_level() {
        let p = sup("x", (0.8, 0.7, 0.9), (0.8, 0.7, 0.9));
        assert!(sceptical_ci_upper(&p, 0.0).is_err());
        assert!(sceptical_ci_upper(&p, 0.3).is_err());
    }
}

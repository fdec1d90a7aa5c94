//! Study effects on the hazard-ratio scale and their normalisation to
//! one-sided z-statistics against a (possibly non-inferiority) margin.
//!
//! All statistics are oriented so that a positive z is evidence of benefit,
//! i.e. a hazard ratio below the margin. Superiority and non-inferiority
//! designs then share a single code path: superiority is the special case
//! of a margin of 1.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{quantile, sf};

/// Standard error of a log hazard ratio recovered from a two-sided
/// confidence interval on the ratio scale.
pub fn se_from_ci(lo: f64, hi: f64, level: f64) -> Result<f64> {
    if !(lo > 0.0 && hi.is_finite() && lo < hi) {
        return Err(Error::domain(format!("need 0 < lo < hi, got ({lo}, {hi})")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!("confidence level must lie in (0, 1), got {level}")));
    }
    Ok((hi.ln() - lo.ln()) / (2.0 * quantile(0.5 * (1.0 + level))))
}

/// One-sided p-value `1 - Φ(z)`.
pub fn z_to_p(z: f64) -> f64 {
    sf(z)
}

/// Inverse of [`z_to_p`].
pub fn p_to_z(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("p-value must lie in (0, 1), got {p}")));
    }
    Ok(-quantile(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Design {
    Superiority,
    NonInferiority,
}

impl Design {
    pub fn code(self) -> &'static str {
        match self {
            Design::Superiority => "sup",
            Design::NonInferiority => "ni",
        }
    }
}

impl std::str::FromStr for Design {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sup" | "superiority" => Ok(Design::Superiority),
            "ni" | "non_inferiority" | "non-inferiority" => Ok(Design::NonInferiority),
            other => Err(Error::domain(format!("unknown design `{other}` (expected sup or ni)"))),
        }
    }
}

/// One study's hazard ratio with its two-sided confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StudyEffect {
    hr: f64,
    ci_lo: f64,
    ci_hi: f64,
    ci_level: f64,
}

impl StudyEffect {
    pub fn new(hr: f64, ci_lo: f64, ci_hi: f64) -> Result<Self> {
        Self::with_level(hr, ci_lo, ci_hi, 0.95)
    }

    pub fn with_level(hr: f64, ci_lo: f64, ci_hi: f64, ci_level: f64) -> Result<Self> {
        if !(ci_lo > 0.0 && ci_lo <= hr && hr <= ci_hi && ci_hi.is_finite()) {
            return Err(Error::domain(format!("need 0 < ci_lo <= hr <= ci_hi, got hr {hr} ({ci_lo}, {ci_hi})")));
        }
        // Also rejects degenerate intervals.
        se_from_ci(ci_lo, ci_hi, ci_level)?;
        Ok(StudyEffect { hr, ci_lo, ci_hi, ci_level })
    }

    /// Effect from a log hazard ratio and its standard error, with a
    /// symmetric 95% interval on the log scale.
    pub fn from_log(theta: f64, se: f64) -> Result<Self> {
        if !(theta.is_finite() && se > 0.0 && se.is_finite()) {
            return Err(Error::domain(format!("need finite theta and se > 0, got ({theta}, {se})")));
        }
        let z = quantile(0.975);
        Self::new(theta.exp(), (theta - z * se).exp(), (theta + z * se).exp())
    }

    pub fn hr(&self) -> f64 {
        self.hr
    }

    pub fn ci_lo(&self) -> f64 {
        self.ci_lo
    }

    pub fn ci_hi(&self) -> f64 {
        self.ci_hi
    }

    pub fn ci_level(&self) -> f64 {
        self.ci_level
    }

    pub fn log_hr(&self) -> f64 {
        self.hr.ln()
    }

    pub fn se(&self) -> f64 {
        se_from_ci(self.ci_lo, self.ci_hi, self.ci_level).expect("validated at construction")
    }
}

/// An original study and its replication.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyPair {
    pub label: String,
    pub design: Design,
    pub margin_hr: f64,
    pub original: StudyEffect,
    pub replication: StudyEffect,
    pub medicare_available: bool,
}

impl StudyPair {
    pub fn new(
        label: impl Into<String>,
        design: Design,
        margin_hr: f64,
        original: StudyEffect,
        replication: StudyEffect,
        medicare_available: bool,
    ) -> Result<Self> {
        match design {
            Design::Superiority if margin_hr != 1.0 => {
                return Err(Error::domain(format!("superiority design needs margin 1, got {margin_hr}")))
            }
            Design::NonInferiority if !(margin_hr > 1.0 && margin_hr.is_finite()) => {
                return Err(Error::domain(format!("non-inferiority design needs margin > 1, got {margin_hr}")))
            }
            _ => {}
        }
        Ok(StudyPair { label: label.into(), design, margin_hr, original, replication, medicare_available })
    }

    /// Superiority pair built directly from log-scale estimates.
    pub fn superiority_from_log(
        label: impl Into<String>,
        theta_o: f64,
        se_o: f64,
        theta_r: f64,
        se_r: f64,
    ) -> Result<Self> {
        Self::new(
            label,
            Design::Superiority,
            1.0,
            StudyEffect::from_log(theta_o, se_o)?,
            StudyEffect::from_log(theta_r, se_r)?,
            false,
        )
    }

    pub fn normalize(&self) -> NormalizedPair {
        normalize_pair(self)
    }
}

/// Margin-shifted, direction-normalised summary of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizedPair {
    pub z_o: f64,
    pub z_r: f64,
    pub se_o: f64,
    pub se_r: f64,
    /// Variance ratio `se_o² / se_r²`.
    pub c: f64,
    /// Log margin.
    pub delta: f64,
    pub theta_o: f64,
    pub theta_r: f64,
}

impl NormalizedPair {
    pub fn from_estimates(theta_o: f64, se_o: f64, theta_r: f64, se_r: f64, delta: f64) -> Self {
        NormalizedPair {
            z_o: (delta - theta_o) / se_o,
            z_r: (delta - theta_r) / se_r,
            se_o,
            se_r,
            c: (se_o * se_o) / (se_r * se_r),
            delta,
            theta_o,
            theta_r,
        }
    }

    /// Same estimates tested against a different log margin.
    pub fn with_margin(&self, delta: f64) -> Self {
        Self::from_estimates(self.theta_o, self.se_o, self.theta_r, self.se_r, delta)
    }

    pub fn p_o(&self) -> f64 {
        z_to_p(self.z_o)
    }

    pub fn p_r(&self) -> f64 {
        z_to_p(self.z_r)
    }
}

pub fn normalize_pair(pair: &StudyPair) -> NormalizedPair {
    NormalizedPair::from_estimates(
        pair.original.log_hr(),
        pair.original.se(),
        pair.replication.log_hr(),
        pair.replication.se(),
        pair.margin_hr.ln(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn se_recovery_examples() {
        // ln(0.90/0.73) / (2 * 1.959964...)
        let se = se_from_ci(0.73, 0.90, 0.95).unwrap();
        assert!((se - 0.053_406_652_069_426_24).abs() < 1e-12);
        let se = se_from_ci(0.52, 1.26, 0.95).unwrap();
        assert!((se - 0.225_779_196_799_308_3).abs() < 1e-12);
    }

    #[test]
    fn se_rejects_degenerate() {
        let e = std::f64::consts::E;
        assert!(se_from_ci(e, e, 0.95).is_err());
        assert!(se_from_ci(0.9, 0.8, 0.95).is_err());
        assert!(se_from_ci(0.0, 0.8, 0.95).is_err());
        assert!(se_from_ci(0.7, 0.8, 1.0).is_err());
    }

    #[test]
    fn p_z_conversions() {
        assert_eq!(z_to_p(0.0), 0.5);
        assert!((p_to_z(0.025).unwrap() - 1.959_963_984_540_054).abs() < 1e-12);
        assert!((z_to_p(3.946) - 3.973_380_665_108_776e-5).abs() < 1e-15);
        assert!(p_to_z(0.0).is_err());
        assert!(p_to_z(1.0).is_err());
    }

    #[test]
    fn effect_invariants() {
        assert!(StudyEffect::new(0.9, 0.95, 1.1).is_err());
        assert!(StudyEffect::new(0.9, 0.8, 0.85).is_err());
        assert!(StudyEffect::new(0.9, 0.0, 1.1).is_err());
        assert!(StudyEffect::new(0.9, 0.9, 0.9).is_err());
        assert!(StudyEffect::new(0.9, 0.8, 1.1).is_ok());
    }

    #[test]
    fn design_margin_rules() {
        let e = StudyEffect::new(0.9, 0.8, 1.0).unwrap();
        assert!(StudyPair::new("x", Design::Superiority, 1.1, e, e, true).is_err());
        assert!(StudyPair::new("x", Design::NonInferiority, 1.0, e, e, true).is_err());
        assert!(StudyPair::new("x", Design::NonInferiority, 0.8, e, e, true).is_err());
        assert!(StudyPair::new("x", Design::NonInferiority, 1.3, e, e, true).is_ok());
        assert_eq!("NI".parse::<Design>().unwrap(), Design::NonInferiority);
        assert!("equiv".parse::<Design>().is_err());
    }

    #[test]
    fn tecos_and_pronounce_orientation() {
        let tecos = StudyPair::new(
            "TECOS",
            Design::NonInferiority,
            1.3,
            StudyEffect::new(0.98, 0.88, 1.09).unwrap(),
            StudyEffect::new(0.89, 0.86, 0.91).unwrap(),
            true,
        )
        .unwrap();
        let n = tecos.normalize();
        assert!((n.z_o - 5.18).abs() < 0.01, "z_o = {}", n.z_o);
        assert!(n.p_o() < 1e-4);

        let pronounce = StudyPair::new(
            "PRONOUNCE",
            Design::Superiority,
            1.0,
            StudyEffect::new(1.28, 0.59, 2.79).unwrap(),
            StudyEffect::new(1.35, 0.94, 1.93).unwrap(),
            true,
        )
        .unwrap();
        assert!(pronounce.normalize().z_o < 0.0);
    }

    #[test]
    fn dapa_ckd_variance_ratio() {
        let pair = StudyPair::new(
            "DAPA-CKD",
            Design::Superiority,
            1.0,
            StudyEffect::new(0.61, 0.51, 0.72).unwrap(),
            StudyEffect::new(0.80, 0.52, 1.26).unwrap(),
            true,
        )
        .unwrap();
        assert!((pair.normalize().c - 0.152).abs() < 0.001);
    }

    proptest! {
        #[test]
        fn se_round_trip(theta in -3.0f64..3.0, se in 0.005f64..2.0) {
            let effect = StudyEffect::from_log(theta, se).unwrap();
            prop_assert!((effect.se() - se).abs() <= 1e-12 * se.max(1.0));
        }

        #[test]
        fn margin_rescaling_is_invisible(
            theta_o in -1.0f64..1.0, se_o in 0.01f64..0.5,
            theta_r in -1.0f64..1.0, se_r in 0.01f64..0.5,
            log_m in 0.05f64..1.0,
        ) {
            let sup = StudyPair::superiority_from_log("s", theta_o, se_o, theta_r, se_r).unwrap();
            let m = log_m.exp();
            let scale = |e: &StudyEffect| StudyEffect::new(e.hr() * m, e.ci_lo() * m, e.ci_hi() * m).unwrap();
            let ni = StudyPair::new("n", Design::NonInferiority, m, scale(&sup.original), scale(&sup.replication), false).unwrap();
            let (a, b) = (sup.normalize(), ni.normalize());
            prop_assert!((a.z_o - b.z_o).abs() < 1e-12 * a.z_o.abs().max(1.0));
            prop_assert!((a.z_r - b.z_r).abs() < 1e-12 * a.z_r.abs().max(1.0));
            prop_assert!((a.c - b.c).abs() < 1e-12 * a.c.max(1.0));
        }
    }
}

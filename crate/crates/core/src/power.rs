//! Power of the replication study for the two-trials rule and the controlled
//! sceptical p-value.
//!
//! Conditional power assumes the true effect equals the original estimate, so
//! `z_r ~ N(√c·z_o, 1)`. Predictive power averages over the sampling
//! distribution of the original estimate, giving `z_r ~ N(√c·z_o, 1 + c)`.
//! Both are on the margin-shifted, benefit-positive scale.

use serde::Serialize;

use crate::assessment::{check_alpha, check_c, controlled_threshold, success_boundary};
use crate::error::{Error, Result};
use crate::numerics::{cdf, find_root, quantile, sf, Bracket};
use crate::study::NormalizedPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    TwoTrials,
    Sceptical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerKind {
    Conditional,
    Predictive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerResult {
    pub cp_ttr: f64,
    pub pp_ttr: f64,
    pub cp_sceptical: f64,
    pub pp_sceptical: f64,
    pub alpha: f64,
}

/// Replication z needed for sceptical z `t`; `None` if `z_o <= t`, in which
/// case no replication result can succeed.
pub fn required_z_r(z_o: f64, c: f64, t: f64) -> Option<f64> {
    let b = success_boundary(z_o, c, t);
    b.is_finite().then_some(b)
}

fn shifted_power(z_o: f64, c: f64, bound: f64, kind: PowerKind) -> f64 {
    let shift = c.sqrt() * z_o - bound;
    match kind {
        PowerKind::Conditional => cdf(shift),
        PowerKind::Predictive => cdf(shift / (1.0 + c).sqrt()),
    }
}

fn ttr_power(z_o: f64, c: f64, alpha: f64, kind: PowerKind) -> Result<f64> {
    check_alpha(alpha)?;
    check_c(c)?;
    if sf(z_o) > alpha {
        return Ok(0.0);
    }
    Ok(shifted_power(z_o, c, quantile(1.0 - alpha), kind))
}

fn sceptical_power_at(z_o: f64, c: f64, threshold: f64, kind: PowerKind) -> f64 {
    match required_z_r(z_o, c, threshold) {
        Some(bound) => shifted_power(z_o, c, bound, kind),
        None => 0.0,
    }
}

fn sceptical_power(z_o: f64, c: f64, alpha: f64, kind: PowerKind) -> Result<f64> {
    let t = controlled_threshold(alpha, c)?;
    Ok(sceptical_power_at(z_o, c, t, kind))
}

pub fn ttr_conditional_power(z_o: f64, c: f64, alpha: f64) -> Result<f64> {
    ttr_power(z_o, c, alpha, PowerKind::Conditional)
}

pub fn ttr_predictive_power(z_o: f64, c: f64, alpha: f64) -> Result<f64> {
    ttr_power(z_o, c, alpha, PowerKind::Predictive)
}

pub fn sceptical_conditional_power(z_o: f64, c: f64, alpha: f64) -> Result<f64> {
    sceptical_power(z_o, c, alpha, PowerKind::Conditional)
}

pub fn sceptical_predictive_power(z_o: f64, c: f64, alpha: f64) -> Result<f64> {
    sceptical_power(z_o, c, alpha, PowerKind::Predictive)
}

pub fn replication_power(z_o: f64, c: f64, alpha: f64, method: Method, kind: PowerKind) -> Result<f64> {
    match method {
        Method::TwoTrials => ttr_power(z_o, c, alpha, kind),
        Method::Sceptical => sceptical_power(z_o, c, alpha, kind),
    }
}

/// All four power figures for one pair; the sceptical threshold is solved once.
pub fn power_for_pair(n: &NormalizedPair, alpha: f64) -> Result<PowerResult> {
    let t = controlled_threshold(alpha, n.c)?;
    Ok(PowerResult {
        cp_ttr: ttr_conditional_power(n.z_o, n.c, alpha)?,
        pp_ttr: ttr_predictive_power(n.z_o, n.c, alpha)?,
        cp_sceptical: sceptical_power_at(n.z_o, n.c, t, PowerKind::Conditional),
        pp_sceptical: sceptical_power_at(n.z_o, n.c, t, PowerKind::Predictive),
        alpha,
    })
}

/// Probability of replication success when the true replication effect sits
/// at the margin (`z_r ~ N(0, 1)`), given the original result.
pub fn conditional_type1(z_o: f64, c: f64, alpha: f64, method: Method) -> Result<f64> {
    check_alpha(alpha)?;
    check_c(c)?;
    match method {
        Method::TwoTrials => Ok(if sf(z_o) <= alpha { alpha } else { 0.0 }),
        Method::Sceptical => {
            let t = controlled_threshold(alpha, c)?;
            Ok(required_z_r(z_o, c, t).map_or(0.0, sf))
        }
    }
}

const C_MIN: f64 = 1e-3;
const C_MAX: f64 = 1e3;

/// Smallest variance ratio (relative sample size) reaching `target_power`.
pub fn required_relative_sample_size(
    z_o: f64,
    alpha: f64,
    target_power: f64,
    method: Method,
    kind: PowerKind,
) -> Result<f64> {
    check_alpha(alpha)?;
    if !(target_power > 0.0 && target_power < 1.0) {
        return Err(Error::domain(format!("target power must lie in (0, 1), got {target_power}")));
    }
    if method == Method::TwoTrials {
        if sf(z_o) > alpha {
            return Err(Error::Planning(format!(
                "original result (z = {z_o:.4}) is not significant at {alpha}; the two-trials rule cannot succeed"
            )));
        }
        if kind == PowerKind::Conditional {
            let total = quantile(1.0 - alpha) + quantile(target_power);
            if total <= 0.0 {
                return Err(Error::Planning(format!("target power {target_power} is reached by any sample size")));
            }
            return Ok((total / z_o).powi(2));
        }
    }

    let mut failure = None;
    let mut objective = |log_c: f64| match replication_power(z_o, log_c.exp(), alpha, method, kind) {
        Ok(p) => p - target_power,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let root = find_root(&mut objective, Bracket::new(C_MIN.ln(), C_MAX.ln())?, 1e-12);
    if let Some(e) = failure {
        return Err(e);
    }
    match root {
        Ok(log_c) => Ok(log_c.exp()),
        Err(Error::Bracketing { .. }) => Err(Error::Planning(format!(
            "target power {target_power} is not reachable for relative sample sizes in [{C_MIN}, {C_MAX}]"
        ))),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assessment::sceptical_z;

    const Z_975: f64 = 1.959_963_984_540_054;

    #[test]
    fn required_z_r_examples() {
        assert!((required_z_r(2.878, 1.0, 1.454).unwrap() - 1.684_829_575_431_973).abs() < 1e-10);
        assert!((required_z_r(1.2816, 2.3, 1.0892).unwrap() - 2.878_035_482_746_845).abs() < 1e-10);
        assert!((required_z_r(1e6, 1.7, 1.3).unwrap() - 1.3).abs() < 1e-9);
        assert_eq!(required_z_r(1.0, 1.0, 1.2), None);
        assert_eq!(required_z_r(1.2, 1.0, 1.2), None);
    }

    #[test]
    fn required_z_r_inverts_sceptical_z() {
        for (z_o, c, t) in [(2.5, 0.3, 1.1), (4.0, 5.0, 2.0), (1.6, 19.0, 0.9)] {
            let z_r = required_z_r(z_o, c, t).unwrap();
            assert!((sceptical_z(z_o, z_r, c).unwrap() - t).abs() < 1e-8);
        }
    }

    #[test]
    fn ttr_gate() {
        let z_o = -quantile(0.10);
        assert_eq!(ttr_conditional_power(z_o, 2.3, 0.025).unwrap(), 0.0);
        assert_eq!(ttr_predictive_power(z_o, 2.3, 0.025).unwrap(), 0.0);
        let z_o = 3.0;
        let cp = ttr_conditional_power(z_o, 1.0, 0.025).unwrap();
        assert!((cp - cdf(3.0 - Z_975)).abs() < 1e-15);
        let pp = ttr_predictive_power(z_o, 1.0, 0.025).unwrap();
        assert!((pp - cdf((3.0 - Z_975) / 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn predictive_limit_small_c() {
        let z_o = 4.0;
        let c = 1e-10;
        let pp = ttr_predictive_power(z_o, c, 0.025).unwrap();
        let cp = ttr_conditional_power(z_o, c, 0.025).unwrap();
        assert!((pp - cp).abs() < 1e-9);
        assert!((pp - 0.025).abs() < 1e-4);
    }

    #[test]
    fn conditional_type1_values() {
        assert_eq!(conditional_type1(3.0, 1.0, 0.025, Method::TwoTrials).unwrap(), 0.025);
        assert_eq!(conditional_type1(1.0, 1.0, 0.025, Method::TwoTrials).unwrap(), 0.0);
        assert_eq!(conditional_type1(0.5, 1.0, 0.025, Method::Sceptical).unwrap(), 0.0);
        let t1 = conditional_type1(3.0, 1.0, 0.025, Method::Sceptical).unwrap();
        assert!(t1 > 0.025 && t1 < 0.05, "{t1}");
    }

    #[test]
    fn planning_closed_form() {
        let c = required_relative_sample_size(2.8016, 0.025, 0.8, Method::TwoTrials, PowerKind::Conditional).unwrap();
        assert!((c - 0.999_989_447_567_079_4).abs() < 1e-9);
        let c2 = required_relative_sample_size(5.6032, 0.025, 0.8, Method::TwoTrials, PowerKind::Conditional).unwrap();
        assert!((c2 - c / 4.0).abs() < 1e-12);
    }

    #[test]
    fn planning_round_trips() {
        for (method, kind) in [
            (Method::Sceptical, PowerKind::Conditional),
            (Method::Sceptical, PowerKind::Predictive),
            (Method::TwoTrials, PowerKind::Predictive),
        ] {
            let c = required_relative_sample_size(3.2, 0.025, 0.8, method, kind).unwrap();
            let achieved = replication_power(3.2, c, 0.025, method, kind).unwrap();
            assert!((achieved - 0.8).abs() < 1e-6, "{method:?} {kind:?}: c={c} power={achieved}");
        }
    }

    #[test]
    fn planning_failures() {
        // Predictive power of the two-trials rule is capped at Φ(z_o) as c grows.
        let err =
            required_relative_sample_size(2.2, 0.025, 0.99, Method::TwoTrials, PowerKind::Predictive).unwrap_err();
        assert!(matches!(err, Error::Planning(_)));
        let err =
            required_relative_sample_size(1.0, 0.025, 0.8, Method::TwoTrials, PowerKind::Conditional).unwrap_err();
        assert!(matches!(err, Error::Planning(_)));
        assert!(required_relative_sample_size(3.0, 0.025, 1.0, Method::Sceptical, PowerKind::Conditional).is_err());
    }

    #[test]
    fn monotone_on_grid() {
        let cs = [0.1, 0.3, 0.7, 1.0, 2.0, 5.0, 12.0];
        let zs = [1.2, 1.8, 2.2, 2.8, 3.5, 5.0];
        for &z in &zs {
            let mut prev = (0.0, 0.0);
            for &c in &cs {
                let cur =
                    (ttr_conditional_power(z, c, 0.025).unwrap(), sceptical_conditional_power(z, c, 0.025).unwrap());
                assert!(cur.0 >= prev.0 && cur.1 >= prev.1, "z={z} c={c}");
                prev = cur;
            }
        }
        for &c in &cs {
            let mut prev = (0.0, 0.0);
            for &z in &zs {
                let cur =
                    (ttr_conditional_power(z, c, 0.025).unwrap(), sceptical_conditional_power(z, c, 0.025).unwrap());
                assert!(cur.0 >= prev.0 && cur.1 >= prev.1, "z={z} c={c}");
                prev = cur;
            }
        }
    }

    #[test]
    fn predictive_shrinks_toward_half() {
        for &z in &[1.5, 2.0, 2.5, 3.0, 4.0] {
            for &c in &[0.2, 1.0, 3.0] {
                let cp = sceptical_conditional_power(z, c, 0.025).unwrap();
                let pp = sceptical_predictive_power(z, c, 0.025).unwrap();
                if cp > 0.5 {
                    assert!(pp <= cp);
                } else if cp > 0.0 {
                    assert!(pp >= cp);
                }
            }
        }
    }
}

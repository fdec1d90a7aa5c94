//! Result tables for the bundled analyses: assessments, replication power,
//! combined intervals, comparison curves, power profiles, success curves,
//! shrinkage and the Monte Carlo calibration check.

use crate::assessment::{assess_pair, sceptical_p_controlled, AssessmentResult};
use crate::assessment::{controlled_threshold, t1e_sceptical};
use crate::combined::{combined_ci, fixed_effect_meta};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::numerics::{cdf, quantile, sf};
use crate::power::{power_for_pair, required_z_r, ttr_conditional_power, ttr_predictive_power, PowerResult};
use crate::report::{Cell, Table};
use crate::simulation::{simulate_controlled_success, simulate_t1e};
use crate::study::{normalize_pair, StudyPair};

/// Which sceptical p-value(s) to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PValueMethod {
    #[default]
    Controlled,
    Nominal,
    Both,
}

impl std::str::FromStr for PValueMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "controlled" => Ok(PValueMethod::Controlled),
            "nominal" => Ok(PValueMethod::Nominal),
            "both" => Ok(PValueMethod::Both),
            other => Err(Error::Domain(format!("unknown method `{other}`"))),
        }
    }
}

fn ratio(k: usize, n: usize) -> Cell {
    Cell::text(format!("{k}/{n}"))
}

pub fn assess_all(dataset: &Dataset, alpha: f64) -> Result<Vec<AssessmentResult>> {
    dataset.iter().map(|p| assess_pair(p, alpha)).collect()
}

pub fn assess_table(dataset: &Dataset, alpha: f64, method: PValueMethod) -> Result<Table> {
    let results = assess_all(dataset, alpha)?;
    let nominal = matches!(method, PValueMethod::Nominal | PValueMethod::Both);
    let controlled = matches!(method, PValueMethod::Controlled | PValueMethod::Both);

    let mut cols = vec!["label", "design", "margin_hr", "p_o", "p_r", "c", "p_ttr"];
    if nominal {
        cols.push("p_s_nominal");
    }
    if controlled {
        cols.push("p_s_controlled");
    }
    cols.push("success_ttr");
    if nominal {
        cols.push("success_nominal");
    }
    if controlled {
        cols.push("success_sceptical");
    }
    cols.push("medicare_available");
    let mut table = Table::new("assess", &cols);

    for (pair, r) in dataset.iter().zip(&results) {
        let mut row = vec![
            Cell::text(&r.label),
            Cell::text(pair.design.code()),
            Cell::Num(pair.margin_hr),
            Cell::P(r.p_o),
            Cell::P(r.p_r),
            Cell::Num(r.c),
            Cell::P(r.p_ttr),
        ];
        if nominal {
            row.push(Cell::opt_p(r.p_s_nominal));
        }
        if controlled {
            row.push(Cell::opt_p(r.p_s_controlled));
        }
        row.push(Cell::Bool(r.success_ttr));
        if nominal {
            row.push(Cell::Bool(r.success_nominal()));
        }
        if controlled {
            row.push(Cell::Bool(r.success_sceptical));
        }
        row.push(Cell::Bool(pair.medicare_available));
        table.push(row);
    }

    let n = results.len();
    let split = |medicare: bool, ok: &dyn Fn(&AssessmentResult) -> bool| {
        let group: Vec<_> = dataset.iter().zip(&results).filter(|(p, _)| p.medicare_available == medicare).collect();
        ratio(group.iter().filter(|(_, r)| ok(r)).count(), group.len())
    };
    table.note("alpha", Cell::Num(alpha));
    table.note("studies", Cell::Int(n as i64));
    table.note("success_ttr", ratio(results.iter().filter(|r| r.success_ttr).count(), n));
    table.note("success_ttr_medicare", split(true, &|r| r.success_ttr));
    table.note("success_ttr_no_medicare", split(false, &|r| r.success_ttr));
    if controlled {
        table.note("success_sceptical", ratio(results.iter().filter(|r| r.success_sceptical).count(), n));
        table.note("success_sceptical_medicare", split(true, &|r| r.success_sceptical));
        table.note("success_sceptical_no_medicare", split(false, &|r| r.success_sceptical));
        let agree = results.iter().all(|r| r.success_ttr == r.success_sceptical);
        table.note("same_studies_succeed", Cell::Bool(agree));
    }
    if nominal {
        table.note("success_nominal", ratio(results.iter().filter(|r| r.success_nominal()).count(), n));
    }
    Ok(table)
}

pub fn power_all(dataset: &Dataset, alpha: f64) -> Result<Vec<PowerResult>> {
    dataset.iter().map(|p| power_for_pair(&normalize_pair(p), alpha)).collect()
}

/// Power in percent, with a closing `Average` row.
pub fn power_table(dataset: &Dataset, alpha: f64) -> Result<Table> {
    let powers = power_all(dataset, alpha)?;
    let mut table =
        Table::new("power", &["label", "p_o", "c", "cp_ttr_pct", "cp_sceptical_pct", "pp_ttr_pct", "pp_sceptical_pct"]);
    for (pair, pw) in dataset.iter().zip(&powers) {
        let n = normalize_pair(pair);
        table.push(vec![
            Cell::text(&pair.label),
            Cell::P(n.p_o()),
            Cell::Num(n.c),
            Cell::Num(100.0 * pw.cp_ttr),
            Cell::Num(100.0 * pw.cp_sceptical),
            Cell::Num(100.0 * pw.pp_ttr),
            Cell::Num(100.0 * pw.pp_sceptical),
        ]);
    }
    let k = powers.len().max(1) as f64;
    let mean = |f: fn(&PowerResult) -> f64| 100.0 * powers.iter().map(f).sum::<f64>() / k;
    let avg = [mean(|p| p.cp_ttr), mean(|p| p.cp_sceptical), mean(|p| p.pp_ttr), mean(|p| p.pp_sceptical)];
    table.push(vec![
        Cell::text("Average"),
        Cell::Missing,
        Cell::Missing,
        Cell::Num(avg[0]),
        Cell::Num(avg[1]),
        Cell::Num(avg[2]),
        Cell::Num(avg[3]),
    ]);
    table.note("alpha", Cell::Num(alpha));
    table.note("avg_cp_ttr_pct", Cell::Num(avg[0]));
    table.note("avg_cp_sceptical_pct", Cell::Num(avg[1]));
    table.note("avg_pp_ttr_pct", Cell::Num(avg[2]));
    table.note("avg_pp_sceptical_pct", Cell::Num(avg[3]));
    Ok(table)
}

/// Meta-analytic and sceptical intervals. A failed inversion is reported in
/// the `error` column; other rows are unaffected.
pub fn ci_table(dataset: &Dataset, overall_alpha: f64) -> Result<Table> {
    let mut table = Table::new(
        "ci",
        &[
            "label",
            "margin_hr",
            "rct_hr",
            "rct_lo",
            "rct_hi",
            "rwe_hr",
            "rwe_lo",
            "rwe_hi",
            "meta_hr",
            "meta_lo",
            "meta_hi",
            "sceptical_upper_hr",
            "sceptical_below_margin",
            "error",
        ],
    );
    for pair in dataset {
        let (o, r) = (&pair.original, &pair.replication);
        let mut row = vec![
            Cell::text(&pair.label),
            Cell::Num(pair.margin_hr),
            Cell::Num(o.hr()),
            Cell::Num(o.ci_lo()),
            Cell::Num(o.ci_hi()),
            Cell::Num(r.hr()),
            Cell::Num(r.ci_lo()),
            Cell::Num(r.ci_hi()),
        ];
        match combined_ci(pair, overall_alpha) {
            Ok(ci) => row.extend([
                Cell::Num(ci.meta_hr),
                Cell::Num(ci.meta_lo),
                Cell::Num(ci.meta_hi),
                Cell::Num(ci.sceptical_upper_hr),
                Cell::Bool(ci.sceptical_upper_hr < pair.margin_hr),
                Cell::Missing,
            ]),
            Err(e) => {
                let n = normalize_pair(pair);
                let meta = fixed_effect_meta(&[(n.theta_o, n.se_o), (n.theta_r, n.se_r)])?;
                row.extend([
                    Cell::Num(meta.estimate.exp()),
                    Cell::Num(meta.lo.exp()),
                    Cell::Num(meta.hi.exp()),
                    Cell::Missing,
                    Cell::Missing,
                    Cell::text(e.to_string()),
                ]);
            }
        }
        table.push(row);
    }
    table.note("overall_level", Cell::Num(1.0 - overall_alpha));
    Ok(table)
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite() && n >= 2) {
        return Err(Error::Domain(format!("invalid grid {lo}..{hi} with {n} points")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
    grid[0] = lo;
    grid[n - 1] = hi;
    Ok(grid)
}

/// Sceptical and two-trials p-values as the relative sample size varies, for
/// a fixed original p-value and relative effect size `theta_r / theta_o`.
/// `p_s_controlled` is the square root of the overall-error-scale value.
pub fn curves_table(p_original: f64, rel_effect: f64, c_grid: &[f64]) -> Result<Table> {
    if !(p_original > 0.0 && p_original < 0.5) {
        return Err(Error::Domain(format!("original p-value must lie in (0, 0.5), got {p_original}")));
    }
    if !(rel_effect > 0.0 && rel_effect.is_finite()) {
        return Err(Error::Domain(format!("relative effect must be positive, got {rel_effect}")));
    }
    let z_o = -quantile(p_original);
    let mut table = Table::new("curves", &["c", "z_r", "p_r", "p_s_controlled", "p_ttr"]);
    for &c in c_grid {
        let z_r = rel_effect * c.sqrt() * z_o;
        let p_r = sf(z_r);
        let p_s = sceptical_p_controlled(z_o, z_r, c)?;
        table.push(vec![
            Cell::Num(c),
            Cell::Num(z_r),
            Cell::Num(p_r),
            Cell::opt_num(p_s),
            Cell::Num(p_original.max(p_r)),
        ]);
    }
    table.note("p_original", Cell::Num(p_original));
    table.note("rel_effect", Cell::Num(rel_effect));
    Ok(table)
}

/// Summary numbers of a power profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSummary {
    pub c: f64,
    pub theta_o: f64,
    pub conditional: f64,
    pub predictive: f64,
    pub range_lo: f64,
    pub range_hi: f64,
}

/// Power of the replication stage (`z_r >= z_α`) when the true effect is
/// `theta`, for a replication with variance ratio `c`.
fn replication_stage_power(theta: f64, se_o: f64, delta: f64, c: f64, alpha: f64) -> f64 {
    cdf(c.sqrt() * (delta - theta) / se_o - quantile(1.0 - alpha))
}

pub fn profile_summary(pair: &StudyPair, c: Option<f64>, alpha: f64) -> Result<ProfileSummary> {
    let n = normalize_pair(pair);
    let c = c.unwrap_or(n.c);
    let z = quantile(0.975);
    let a = replication_stage_power(n.theta_o - z * n.se_o, n.se_o, n.delta, c, alpha);
    let b = replication_stage_power(n.theta_o + z * n.se_o, n.se_o, n.delta, c, alpha);
    Ok(ProfileSummary {
        c,
        theta_o: n.theta_o,
        conditional: ttr_conditional_power(n.z_o, c, alpha)?,
        predictive: ttr_predictive_power(n.z_o, c, alpha)?,
        range_lo: a.min(b),
        range_hi: a.max(b),
    })
}

/// Conditional power of the two-trials rule and of the sceptical p-value as
/// a function of a hypothetical original log hazard ratio. `c` defaults to
/// the pair's own variance ratio.
pub fn power_profile_table(pair: &StudyPair, c: Option<f64>, alpha: f64, points: usize) -> Result<Table> {
    let n = normalize_pair(pair);
    let summary = profile_summary(pair, c, alpha)?;
    let c = summary.c;
    let t = controlled_threshold(alpha, c)?;
    let mut table = Table::new("power-profile", &["theta", "hr", "z_o", "cp_ttr", "cp_sceptical"]);
    let points = points.max(2);
    let (lo, hi) = (n.theta_o - 4.0 * n.se_o, n.theta_o + 4.0 * n.se_o);
    for i in 0..points {
        let theta = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let z_o = (n.delta - theta) / n.se_o;
        let cp_sceptical = required_z_r(z_o, c, t).map_or(0.0, |b| cdf(c.sqrt() * z_o - b));
        table.push(vec![
            Cell::Num(theta),
            Cell::Num(theta.exp()),
            Cell::Num(z_o),
            Cell::Num(replication_stage_power(theta, n.se_o, n.delta, c, alpha)),
            Cell::Num(cp_sceptical),
        ]);
    }
    table.note("label", Cell::text(&pair.label));
    table.note("c", Cell::Num(c));
    table.note("alpha", Cell::Num(alpha));
    table.note("theta_o", Cell::Num(summary.theta_o));
    table.note("conditional_power", Cell::Num(summary.conditional));
    table.note("predictive_power", Cell::Num(summary.predictive));
    table.note("ci_power_lo", Cell::Num(summary.range_lo));
    table.note("ci_power_hi", Cell::Num(summary.range_hi));
    Ok(table)
}

/// Proportion of successes and average predictive power across the dataset
/// for each level in `alphas`.
pub fn success_curve_table(dataset: &Dataset, alphas: &[f64]) -> Result<Table> {
    let normalized: Vec<_> = dataset.iter().map(normalize_pair).collect();
    let p_s: Vec<Option<f64>> =
        normalized.iter().map(|n| sceptical_p_controlled(n.z_o, n.z_r, n.c)).collect::<Result<_>>()?;
    let k = normalized.len().max(1) as f64;
    let mut table = Table::new(
        "success-curve",
        &["alpha", "prop_success_ttr", "prop_success_sceptical", "avg_pp_ttr", "avg_pp_sceptical"],
    );
    for &alpha in alphas {
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(Error::Domain(format!("alpha grid values must lie in (0, 0.5), got {alpha}")));
        }
        let ttr = normalized.iter().filter(|n| n.p_o().max(n.p_r()) <= alpha).count();
        let scep = p_s.iter().filter(|p| p.is_some_and(|p| p <= alpha)).count();
        let mut pp = (0.0, 0.0);
        for n in &normalized {
            let pw = power_for_pair(n, alpha)?;
            pp.0 += pw.pp_ttr;
            pp.1 += pw.pp_sceptical;
        }
        table.push(vec![
            Cell::Num(alpha),
            Cell::Num(ttr as f64 / k),
            Cell::Num(scep as f64 / k),
            Cell::Num(pp.0 / k),
            Cell::Num(pp.1 / k),
        ]);
    }
    table.note("studies", Cell::Int(normalized.len() as i64));
    Ok(table)
}

/// Margin-shifted estimates with 95% intervals. A point is below the
/// diagonal when the original estimate lies further into the benefit region
/// than the replication estimate, i.e. the replication is shrunken.
pub fn shrinkage_table(dataset: &Dataset) -> Result<Table> {
    let z = quantile(0.975);
    let mut table = Table::new(
        "shrinkage",
        &["label", "design", "rct_shift", "rct_lo", "rct_hi", "rwe_shift", "rwe_lo", "rwe_hi", "below_diagonal"],
    );
    let mut below = 0;
    for pair in dataset {
        let n = normalize_pair(pair);
        let x = n.theta_o - n.delta;
        let y = n.theta_r - n.delta;
        let shrunk = x < y;
        below += shrunk as usize;
        table.push(vec![
            Cell::text(&pair.label),
            Cell::text(pair.design.code()),
            Cell::Num(x),
            Cell::Num(x - z * n.se_o),
            Cell::Num(x + z * n.se_o),
            Cell::Num(y),
            Cell::Num(y - z * n.se_r),
            Cell::Num(y + z * n.se_r),
            Cell::Bool(shrunk),
        ]);
    }
    table.note("studies", Cell::Int(dataset.len() as i64));
    table.note("below_diagonal", Cell::Int(below as i64));
    Ok(table)
}

pub const CALIBRATION_RATIOS: [f64; 4] = [0.5, 1.0, 2.0, 10.0];
pub const CALIBRATION_THRESHOLDS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];

/// Monte Carlo check of the overall Type-I error. For each variance ratio,
/// one row compares the controlled success rate at `alpha` with `alpha²`,
/// followed by rows comparing the simulated and integrated error of fixed
/// sceptical-z thresholds.
pub fn verify_t1e_table(ratios: &[f64], alpha: f64, draws: u64, seed: u64) -> Result<Table> {
    if draws == 0 {
        return Err(Error::Domain("need at least one draw".into()));
    }
    let mut table = Table::new(
        "verify-t1e",
        &["check", "c", "t", "analytic", "monte_carlo", "binomial_se", "within_3se", "draws", "seed"],
    );
    for (i, &c) in ratios.iter().enumerate() {
        let base = seed.wrapping_add(1000 * i as u64);
        let t = controlled_threshold(alpha, c)?;
        let target = alpha * alpha;
        let est = simulate_controlled_success(alpha, c, draws, base)?;
        table.push(vec![
            Cell::text("controlled_success"),
            Cell::Num(c),
            Cell::Num(t),
            Cell::Num(target),
            Cell::Num(est.rate),
            Cell::Num(est.binomial_se(target)),
            Cell::Bool(est.agrees_with(target, 3.0)),
            Cell::Int(draws as i64),
            Cell::Int(base as i64),
        ]);
        for (j, &t) in CALIBRATION_THRESHOLDS.iter().enumerate() {
            let s = base + 1 + j as u64;
            let analytic = t1e_sceptical(t, c)?;
            let est = simulate_t1e(t, c, draws, s);
            table.push(vec![
                Cell::text("t1e"),
                Cell::Num(c),
                Cell::Num(t),
                Cell::Num(analytic),
                Cell::Num(est.rate),
                Cell::Num(est.binomial_se(analytic)),
                Cell::Bool(est.agrees_with(analytic, 3.0)),
                Cell::Int(draws as i64),
                Cell::Int(s as i64),
            ]);
        }
    }
    table.note("alpha", Cell::Num(alpha));
    table.note("seed", Cell::Int(seed as i64));
    Ok(table)
}

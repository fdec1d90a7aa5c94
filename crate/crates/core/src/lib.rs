//! Replication success for pairs of studies reported as hazard ratios.
//!
//! An original trial and its replication (for example a real-world-evidence
//! emulation) are compared with the two-trials rule and with the controlled
//! sceptical p-value, for superiority and non-inferiority designs alike. The
//! crate also computes replication power, plans relative sample sizes and
//! builds combined confidence intervals, and ships the RCT DUPLICATE dataset
//! of 29 trial/emulation pairs.
//!
//! ```
//! use replisure::{assess_pair, Dataset};
//!
//! let data = Dataset::bundled();
//! let plato = data.get("PLATO").unwrap();
//! let r = assess_pair(plato, 0.025).unwrap();
//! assert!(!r.success_ttr && !r.success_sceptical);
//! ```

// Negated comparisons are how NaN arguments get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod assessment;
pub mod combined;
pub mod dataset;
pub mod error;
pub mod numerics;
pub mod power;
pub mod report;
pub mod simulation;
pub mod study;
pub mod tables;

pub use assessment::{
    assess_normalized, assess_pair, box_tail_probability, controlled_level, controlled_threshold,
    sceptical_p_controlled, sceptical_p_nominal, sceptical_prior_variance, sceptical_z, t1e_sceptical, two_trials_p,
    AssessmentResult,
};
pub use combined::{
    cochran_q, combined_ci, fixed_effect_meta, sceptical_ci_upper, sceptical_upper_log, CombinedCI, MetaEstimate,
    QTest, DEFAULT_OVERALL_ALPHA,
};
pub use dataset::{load_dataset, DataSource, Dataset};
pub use error::{Error, Result};
pub use power::{
    conditional_type1, power_for_pair, replication_power, required_relative_sample_size, required_z_r,
    sceptical_conditional_power, sceptical_predictive_power, ttr_conditional_power, ttr_predictive_power, Method,
    PowerKind, PowerResult,
};
pub use study::{normalize_pair, p_to_z, se_from_ci, z_to_p, Design, NormalizedPair, StudyEffect, StudyPair};

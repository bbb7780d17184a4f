//! Metric-based membership inference.
//!
//! Both attacks reduce a released aggregate to the target's positive
//! observations after removing whatever background the attacker knows:
//!
//! * the one-threshold attack sums those values and compares the sum with a
//!   single threshold;
//! * the two-threshold attack first thresholds every observation on its own
//!   and then thresholds the number of observations that fired.
//!
//! Thresholds are calibrated on shadow aggregates ([`shadow`]) or derived from
//! analytic score models ([`model`]).

pub mod ecdf;
pub mod model;
pub mod score;
pub mod shadow;
pub mod threshold;

pub use model::{
    analytic_one_threshold_model, analytic_two_threshold_model, clt_binomial_approx,
    model_accuracy, per_cell_error_rates, ModelAccuracy, ScoreModel,
};
pub use score::{
    decide, reference_attack_score, score_one, score_two, AttackOutcome, PerCellThresholds,
};
pub use shadow::{generate_shadow_set, shadow_observations, ShadowObservations, ShadowSet};
pub use threshold::{
    estimate_threshold_fixed_error, estimate_threshold_max_acc, per_cell_thresholds_fixed_error,
    per_cell_thresholds_max_acc,
};

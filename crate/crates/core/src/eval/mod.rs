//! Membership game, metrics and sweeps.

pub mod game;
pub mod metrics;
pub mod sweep;

pub use game::{
    analytic_accuracy, calibrate, run_game, run_prepared, AttackKind, AttackRun, AttackSummary, AttackerKind,
    GameConfig, GameData, GameOutcome, MetaConfig, TargetObservations, ThresholdRule, TrialRecord,
};
pub use metrics::{accuracy_from_errors, roc_from_scores, Confusion, RocCurve};
pub use sweep::{gap_report, sweep_positive_observations, sweep_shadow_count, GapRow, ResultRow};

//! Membership-inference auditing for differentially private location aggregates.
//!
//! The crate is organised around the pipeline an auditor runs:
//!
//! * [`trace`] holds binary site × epoch traces, their aggregates and the
//!   per-epoch clipping step applied before release.
//! * [`mechanism`] and [`accountant`] cover the additive-noise mechanisms and
//!   the optimal composition bound on attack accuracy.
//! * [`attack`] implements the one-threshold and two-threshold metric attacks,
//!   their analytic score models and the reference (inner-product) baseline.
//! * [`mlp`] is the one-hidden-layer sigmoid meta-classifier together with the
//!   constructive weight encodings of both threshold rules.
//! * [`eval`] runs the membership game, computes accuracy/AUC/ROC and drives
//!   parameter sweeps.
//!
//! Monte-Carlo loops run on rayon when the `parallel` feature is enabled (the
//! default). Every stochastic step draws from a stream derived from an explicit
//! seed and an item index, so results are bitwise identical with or without the
//! feature.

pub mod accountant;
pub mod attack;
pub mod config;
pub mod error;
pub mod eval;
pub mod mechanism;
pub mod mlp;
pub mod par;
pub mod rng;
pub mod trace;

pub use error::{Error, Result};
pub use mechanism::{MechanismFamily, MechanismSpec};
pub use trace::{AggregateMatrix, NoisyAggregate, ObservationVector, TraceDataset, TraceMatrix};

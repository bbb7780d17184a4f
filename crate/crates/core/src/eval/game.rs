//! The membership game.
//!
//! The challenger keeps a fixed target `z` and, for every trial, draws a fresh
//! dataset `D` from its pool, flips a coin `b`, releases
//! `aggregate(D ∪ {z})` or `aggregate(D)` through the mechanism, and asks each
//! configured attack for a guess. Attacks are calibrated once per game on
//! shadow aggregates built from the attacker's auxiliary traces.

use std::fmt;

use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::metrics::{accuracy_from_errors, normal_ci, roc_from_scores, Confusion, RocCurve};
use crate::attack::model::{
    analytic_two_threshold_model, default_threshold_offset, informed_one_threshold_model, model_accuracy,
    per_cell_error_rates,
};
use crate::attack::score::{count_above, decide, reference_score_dense};
use crate::attack::shadow::{shadow_clean, shadow_sample_size, validate_shadow_inputs};
use crate::attack::threshold::{fixed_error_threshold, midpoint_threshold, per_cell_fixed_error, per_cell_midpoints};
use crate::attack::ShadowObservations;
use crate::mechanism::{perturb_with, MechanismSpec};
use crate::mlp::{self, Features, MlpModel, Optimizer, TrainConfig};
use crate::trace::{residual_observations, split_dataset, AggregateMatrix, TraceDataset, TraceMatrix};
use crate::{par, rng, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackerKind {
    /// Knows every trace of the release except the target (`θ = 1`).
    Informed,
    /// Holds only a disjoint auxiliary sample of the population (`θ = 0`).
    Auxiliary,
}

impl AttackerKind {
    pub fn theta(self) -> f64 {
        match self {
            AttackerKind::Informed => 1.0,
            AttackerKind::Auxiliary => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AttackerKind::Informed => "informed",
            AttackerKind::Auxiliary => "auxiliary",
        }
    }
}

impl fmt::Display for AttackerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    OneThreshold,
    TwoThreshold,
    MetaClassifier,
    Reference,
}

impl AttackKind {
    pub fn name(self) -> &'static str {
        match self {
            AttackKind::OneThreshold => "one_threshold",
            AttackKind::TwoThreshold => "two_threshold",
            AttackKind::MetaClassifier => "meta_classifier",
            AttackKind::Reference => "reference",
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Natural {
    Natural,
}

/// Number of positive observations of the target: a fixed count (synthetic
/// target on the highest-rate cells) or `"natural"` (a real trace).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetObservations {
    Count(usize),
    Natural(Natural),
}

impl TargetObservations {
    pub const NATURAL: Self = TargetObservations::Natural(Natural::Natural);
}

impl Default for TargetObservations {
    fn default() -> Self {
        Self::NATURAL
    }
}

/// How thresholds are placed on shadow scores.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum ThresholdRule {
    /// Midpoint of the class means.
    #[default]
    MaxAccuracy,
    /// Gaussian fit at a fixed false positive rate; per-cell thresholds of the
    /// two-threshold attack use the same rate.
    FixedError { alpha: f64 },
}

/// Meta-classifier architecture and optimiser. Seeds come from the game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaConfig {
    /// Hidden width; defaults to the number of positive observations.
    #[serde(default)]
    pub hidden: Option<usize>,
    #[serde(default = "MetaConfig::default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "MetaConfig::default_epochs")]
    pub epochs: usize,
    #[serde(default)]
    pub batch_size: Option<usize>,
    #[serde(default)]
    pub optimizer: Optimizer,
}

impl MetaConfig {
    fn default_learning_rate() -> f64 {
        TrainConfig::default().learning_rate
    }

    fn default_epochs() -> usize {
        TrainConfig::default().epochs
    }

    pub fn adam(learning_rate: f64, epochs: usize, batch_size: usize) -> Self {
        Self {
            hidden: None,
            learning_rate,
            epochs,
            batch_size: Some(batch_size),
            optimizer: Optimizer::Adam,
        }
    }

    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed,
            optimizer: self.optimizer,
        }
    }
}

impl Default for MetaConfig {
    fn default() -> Self {
        Self {
            hidden: None,
            learning_rate: Self::default_learning_rate(),
            epochs: Self::default_epochs(),
            batch_size: None,
            optimizer: Optimizer::default(),
        }
    }
}

fn default_reference_count() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub attacker: AttackerKind,
    pub mechanism: MechanismSpec,
    /// Size of the released dataset `D` (target excluded).
    pub n_traces: usize,
    #[serde(default)]
    pub target_observations: TargetObservations,
    pub trials: usize,
    pub attacks: Vec<AttackKind>,
    pub shadow_count: usize,
    /// Fixes data preparation and the target.
    pub target_seed: u64,
    /// Drives the per-trial datasets, coins and noise, and the attacker's
    /// shadows.
    pub dataset_seed: u64,
    #[serde(default)]
    pub threshold_rule: ThresholdRule,
    #[serde(default)]
    pub meta: MetaConfig,
    #[serde(default = "default_reference_count")]
    pub reference_count: usize,
}

impl GameConfig {
    pub fn new(attacker: AttackerKind, mechanism: MechanismSpec, n_traces: usize, trials: usize) -> Self {
        Self {
            attacker,
            mechanism,
            n_traces,
            target_observations: TargetObservations::NATURAL,
            trials,
            attacks: vec![AttackKind::OneThreshold, AttackKind::TwoThreshold],
            shadow_count: 2000,
            target_seed: 0,
            dataset_seed: 1,
            threshold_rule: ThresholdRule::default(),
            meta: MetaConfig::default(),
            reference_count: default_reference_count(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if self.attacks.is_empty() {
            return Err(Error::config("attacks", "list at least one attack"));
        }
        let mut seen = self.attacks.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.attacks.len() {
            return Err(Error::config("attacks", "attacks must be distinct"));
        }
        if self.shadow_count < 2 {
            return Err(Error::config("shadow_count", "need at least two shadows"));
        }
        if let ThresholdRule::FixedError { alpha } = self.threshold_rule {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::config("threshold_rule.alpha", format!("must lie in (0, 1), got {alpha}")));
            }
        }
        if self.attacks.contains(&AttackKind::Reference) && self.reference_count == 0 {
            return Err(Error::config("reference_count", "must be at least 1"));
        }
        if self.attacks.contains(&AttackKind::MetaClassifier) {
            self.meta
                .train_config(0)
                .validate()
                .map_err(|e| Error::config("meta", e.to_string()))?;
            if self.meta.hidden == Some(0) {
                return Err(Error::config("meta.hidden", "must be at least 1"));
            }
        }
        Ok(())
    }

    fn attacker_seed(&self) -> u64 {
        rng::derive_seed(self.dataset_seed, rng::domain::SHADOW)
    }
}

/// `z` with exactly `k` ones on the highest-rate cells (ties by row-major
/// index), never more than `clip_bound` per epoch.
pub fn synthetic_target(sites: usize, epochs: usize, rates: &[f64], k: usize, clip_bound: usize) -> Result<TraceMatrix> {
    if rates.len() != sites * epochs {
        return Err(Error::invalid("rates", format!("expected {} values, got {}", sites * epochs, rates.len())));
    }
    let capacity = epochs * clip_bound.min(sites);
    if k > capacity {
        return Err(Error::invalid(
            "target_observations",
            format!("{k} positive observations do not fit a {sites}×{epochs} grid at clip bound {clip_bound}"),
        ));
    }
    let mut order: Vec<usize> = (0..rates.len()).collect();
    order.sort_by(|&a, &b| rates[b].total_cmp(&rates[a]).then(a.cmp(&b)));
    let mut per_epoch = vec![0usize; epochs];
    let mut ones = Vec::with_capacity(k);
    for c in order {
        if ones.len() == k {
            break;
        }
        if per_epoch[c % epochs] < clip_bound {
            per_epoch[c % epochs] += 1;
            ones.push(c as u32);
        }
    }
    TraceMatrix::from_ones(sites, epochs, ones)
}

/// The challenger's pool, the attacker's auxiliary traces and the target.
#[derive(Clone, Debug)]
pub struct GameData {
    pub pool: TraceDataset,
    pub aux: TraceDataset,
    pub target: TraceMatrix,
}

impl GameData {
    pub fn from_parts(pool: TraceDataset, aux: TraceDataset, target: TraceMatrix) -> Result<Self> {
        for found in [pool.dims(), aux.dims()] {
            if found != target.dims() {
                return Err(Error::DimensionMismatch {
                    expected: target.dims(),
                    found,
                });
            }
        }
        Ok(Self { pool, aux, target })
    }

    /// Clip every trace, split the population evenly into the challenger's
    /// pool and the attacker's auxiliary set, then fix the target: a random
    /// pool trace (removed from the pool) for `"natural"`, otherwise a
    /// synthetic trace on the pool's highest-rate cells.
    pub fn from_dataset(dataset: &TraceDataset, cfg: &GameConfig) -> Result<Self> {
        let clip = cfg.mechanism.clip_bound();
        let clipped = dataset.clipped(clip, rng::derive_seed(cfg.target_seed, rng::domain::CLIP))?;
        let mut parts = split_dataset(&clipped, &[0.5, 0.5], rng::derive_seed(cfg.target_seed, rng::domain::SPLIT))?;
        let aux = parts.pop().expect("two parts");
        let pool = parts.pop().expect("two parts");
        let (sites, epochs) = pool.dims();
        match cfg.target_observations {
            TargetObservations::Count(k) => {
                let target = synthetic_target(sites, epochs, &pool.cell_rates(), k, clip)?;
                Self::from_parts(pool, aux, target)
            }
            TargetObservations::Natural(_) => {
                if pool.len() < 2 {
                    return Err(Error::InsufficientTraces {
                        needed: 2,
                        available: pool.len(),
                    });
                }
                let pick = rng::stream(cfg.target_seed, rng::domain::TARGET, 0).random_range(0..pool.len());
                let mut traces = pool.into_traces();
                let target = traces.swap_remove(pick);
                Self::from_parts(TraceDataset::new(traces)?, aux, target)
            }
        }
    }

    /// Same pool and auxiliary set with a synthetic `k`-observation target.
    pub fn with_synthetic_target(&self, k: usize, clip_bound: usize) -> Result<Self> {
        let (sites, epochs) = self.pool.dims();
        let target = synthetic_target(sites, epochs, &self.pool.cell_rates(), k, clip_bound)?;
        Self::from_parts(self.pool.clone(), self.aux.clone(), target)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub bit: u8,
    pub score: f64,
    pub decision: u8,
    pub success: bool,
}

impl TrialRecord {
    pub fn new(trial: usize, bit: u8, score: f64, threshold: f64) -> Self {
        let decision = decide(score, threshold);
        Self {
            trial,
            bit,
            score,
            decision,
            success: decision == bit,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackSummary {
    pub attack: AttackKind,
    pub trials: usize,
    pub accuracy: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub auc: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackRun {
    pub attack: AttackKind,
    pub threshold: f64,
    pub records: Vec<TrialRecord>,
}

impl AttackRun {
    pub fn confusion(&self) -> Confusion {
        Confusion::from_pairs(self.records.iter().map(|r| (r.bit, r.decision)))
    }

    pub fn accuracy(&self) -> f64 {
        self.confusion().success_rate()
    }

    fn scores(&self, bit: u8) -> Vec<f64> {
        self.records.iter().filter(|r| r.bit == bit).map(|r| r.score).collect()
    }

    /// ROC over the trial scores; `None` if a class never occurred.
    pub fn roc(&self) -> Option<RocCurve> {
        roc_from_scores(&self.scores(1), &self.scores(0)).ok()
    }

    pub fn summary(&self) -> AttackSummary {
        let c = self.confusion();
        let accuracy = c.success_rate();
        let (alpha, beta) = c.error_rates();
        let (ci_low, ci_high) = normal_ci(accuracy, c.total());
        AttackSummary {
            attack: self.attack,
            trials: c.total(),
            accuracy,
            ci_low,
            ci_high,
            auc: self.roc().map_or(0.5, |r| r.auc),
            alpha,
            beta,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameOutcome {
    pub runs: Vec<AttackRun>,
}

impl GameOutcome {
    pub fn run(&self, attack: AttackKind) -> Option<&AttackRun> {
        self.runs.iter().find(|r| r.attack == attack)
    }
}

/// Exactly balanced coins in random order (one extra fair coin when the count
/// is odd), so that every trial is a fair coin and the evaluation set is
/// 50/50.
pub fn coin_schedule(trials: usize, seed: u64) -> Vec<u8> {
    let mut g = rng::stream(seed, rng::domain::TRIAL, u64::MAX);
    let mut bits: Vec<u8> = (0..trials).map(|i| (i % 2) as u8).collect();
    if trials % 2 == 1 {
        bits[trials - 1] = u8::from(g.random::<bool>());
    }
    bits.shuffle(&mut g);
    bits
}

/// A calibrated attack: a scoring rule plus a threshold.
#[derive(Clone, Debug)]
pub enum Calibrated {
    OneThreshold { threshold: f64 },
    TwoThreshold { cells: Vec<f64>, threshold: f64 },
    MetaClassifier { model: Box<MlpModel> },
    Reference { references: Vec<TraceMatrix>, threshold: f64 },
}

impl Calibrated {
    pub fn threshold(&self) -> f64 {
        match self {
            Calibrated::OneThreshold { threshold }
            | Calibrated::TwoThreshold { threshold, .. }
            | Calibrated::Reference { threshold, .. } => *threshold,
            Calibrated::MetaClassifier { .. } => 0.5,
        }
    }

    /// Score from the residual positive observations and, for the reference
    /// attack, the dense residual.
    fn score(&self, obs: &[f64], residual: &dyn Fn() -> Vec<f64>, z: &TraceMatrix) -> f64 {
        match self {
            Calibrated::OneThreshold { .. } => obs.iter().sum(),
            Calibrated::TwoThreshold { cells, .. } => count_above(obs, cells) as f64,
            Calibrated::MetaClassifier { model } => model.forward(obs).expect("model sized to the target"),
            Calibrated::Reference { references, .. } => reference_score_dense(&residual(), z, references),
        }
    }
}

fn place(member: &[f64], nonmember: &[f64], rule: ThresholdRule) -> Result<f64> {
    match rule {
        ThresholdRule::MaxAccuracy => midpoint_threshold(member, nonmember),
        ThresholdRule::FixedError { alpha } => fixed_error_threshold(member, nonmember, alpha),
    }
}

/// Shadow observations plus, when requested, reference scores of the same
/// shadows.
fn shadow_pass(
    cfg: &GameConfig,
    data: &GameData,
    m: usize,
    references: Option<&[TraceMatrix]>,
) -> Result<(ShadowObservations, Vec<f64>)> {
    let theta = cfg.attacker.theta();
    let sample_size = shadow_sample_size(cfg.n_traces, theta);
    let z = &data.target;
    validate_shadow_inputs(Some(&data.aux), sample_size, theta, m, z)?;
    let members = m / 2;
    let seed = cfg.attacker_seed();
    let mut rows = par::map_indexed(m, |i| {
        let mut g = rng::stream(seed, rng::domain::SHADOW, i as u64);
        let clean = shadow_clean(&data.aux, sample_size, i < members, z, &mut g);
        let noisy = perturb_with(&clean, &cfg.mechanism, &mut g);
        let obs: Vec<f64> = z.ones().iter().map(|&c| noisy.cells()[c as usize]).collect();
        let reference = references.map_or(0.0, |r| reference_score_dense(noisy.cells(), z, r));
        (obs, reference)
    });
    let reference_scores = rows.iter().map(|r| r.1).collect();
    let nonmember: Vec<Vec<f64>> = rows.split_off(members).into_iter().map(|r| r.0).collect();
    let member = rows.into_iter().map(|r| r.0).collect();
    Ok((
        ShadowObservations {
            cells: z.cells().collect(),
            member,
            nonmember,
        },
        reference_scores,
    ))
}

/// Calibrate every configured attack on `m` shadows.
pub fn calibrate(cfg: &GameConfig, data: &GameData, m: usize) -> Result<Vec<Calibrated>> {
    let references = if cfg.attacks.contains(&AttackKind::Reference) {
        if cfg.reference_count > data.aux.len() {
            return Err(Error::InsufficientTraces {
                needed: cfg.reference_count,
                available: data.aux.len(),
            });
        }
        let mut g = rng::stream(cfg.attacker_seed(), rng::domain::REFERENCE, 0);
        Some(
            index::sample(&mut g, data.aux.len(), cfg.reference_count)
                .into_iter()
                .map(|i| data.aux.get(i).clone())
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };
    let (obs, reference_scores) = shadow_pass(cfg, data, m, references.as_deref())?;
    let sums = |rows: &[Vec<f64>]| -> Vec<f64> { rows.iter().map(|r| r.iter().sum()).collect() };
    let members = obs.member.len();
    cfg.attacks
        .iter()
        .map(|attack| {
            Ok(match attack {
                AttackKind::OneThreshold => Calibrated::OneThreshold {
                    threshold: place(&sums(&obs.member), &sums(&obs.nonmember), cfg.threshold_rule)?,
                },
                AttackKind::TwoThreshold => {
                    let cells = match cfg.threshold_rule {
                        ThresholdRule::MaxAccuracy => per_cell_midpoints(&obs)?,
                        ThresholdRule::FixedError { alpha } => per_cell_fixed_error(&obs, &vec![alpha; obs.cells.len()])?,
                    }
                    .thresholds;
                    let counts = |rows: &[Vec<f64>]| -> Vec<f64> {
                        rows.iter().map(|r| count_above(r, &cells) as f64).collect()
                    };
                    let threshold = place(&counts(&obs.member), &counts(&obs.nonmember), cfg.threshold_rule)?;
                    Calibrated::TwoThreshold { cells, threshold }
                }
                AttackKind::MetaClassifier => {
                    let (rows, labels) = obs.labelled();
                    let n_in = obs.cells.len();
                    let features = Features::from_rows(&rows, labels)?;
                    let hidden = cfg.meta.hidden.unwrap_or(n_in.max(1));
                    let init = MlpModel::random(n_in, hidden, rng::derive_seed(cfg.dataset_seed, rng::domain::INIT))?;
                    let train_cfg = cfg.meta.train_config(rng::derive_seed(cfg.dataset_seed, rng::domain::TRAIN));
                    let (model, _) = mlp::train(&init, &features, &train_cfg)?;
                    Calibrated::MetaClassifier { model: Box::new(model) }
                }
                AttackKind::Reference => {
                    let (member, nonmember) = reference_scores.split_at(members);
                    Calibrated::Reference {
                        references: references.clone().expect("sampled above"),
                        threshold: place(member, nonmember, cfg.threshold_rule)?,
                    }
                }
            })
        })
        .collect()
}

fn check_data(cfg: &GameConfig, data: &GameData) -> Result<()> {
    if cfg.n_traces > data.pool.len() {
        return Err(Error::InsufficientTraces {
            needed: cfg.n_traces,
            available: data.pool.len(),
        });
    }
    Ok(())
}

/// Play `cfg.trials` rounds against already calibrated attacks.
pub fn run_prepared(cfg: &GameConfig, data: &GameData, attacks: &[Calibrated]) -> Result<GameOutcome> {
    cfg.validate()?;
    check_data(cfg, data)?;
    if attacks.len() != cfg.attacks.len() {
        return Err(Error::invalid("attacks", "one calibrated attack per configured attack"));
    }
    let z = &data.target;
    let (sites, epochs) = z.dims();
    let bits = coin_schedule(cfg.trials, cfg.dataset_seed);
    let informed = cfg.attacker == AttackerKind::Informed;
    let scores: Vec<Vec<f64>> = par::map_indexed(cfg.trials, |i| {
        let mut g = rng::stream(cfg.dataset_seed, rng::domain::TRIAL, i as u64);
        let mut clean = AggregateMatrix::zeros(sites, epochs);
        for j in index::sample(&mut g, data.pool.len(), cfg.n_traces) {
            clean.add_trace(data.pool.get(j)).expect("dimensions checked");
        }
        let background = if informed {
            clean.clone()
        } else {
            AggregateMatrix::zeros(sites, epochs)
        };
        if bits[i] == 1 {
            clean.add_trace(z).expect("dimensions checked");
        }
        let noisy = perturb_with(&clean, &cfg.mechanism, &mut g);
        let obs = residual_observations(&noisy, &background, z).expect("dimensions checked");
        let residual = || noisy.residual(&background).expect("dimensions checked").cells().to_vec();
        attacks.iter().map(|a| a.score(&obs, &residual, z)).collect()
    });
    let runs = cfg
        .attacks
        .iter()
        .zip(attacks)
        .enumerate()
        .map(|(a, (&attack, cal))| AttackRun {
            attack,
            threshold: cal.threshold(),
            records: scores
                .iter()
                .enumerate()
                .map(|(i, s)| TrialRecord::new(i, bits[i], s[a], cal.threshold()))
                .collect(),
        })
        .collect();
    Ok(GameOutcome { runs })
}

/// Calibrate on `cfg.shadow_count` shadows and play the game.
pub fn run_game(cfg: &GameConfig, data: &GameData) -> Result<GameOutcome> {
    cfg.validate()?;
    check_data(cfg, data)?;
    let attacks = calibrate(cfg, data, cfg.shadow_count)?;
    run_prepared(cfg, data, &attacks)
}

/// Optimal accuracy of the metric attacks under the informed attacker's
/// analytic models; `None` where no closed form applies.
pub fn analytic_accuracy(
    attacker: AttackerKind,
    attack: AttackKind,
    mech: &MechanismSpec,
    z: &TraceMatrix,
) -> Option<f64> {
    if attacker != AttackerKind::Informed {
        return None;
    }
    let model = match attack {
        AttackKind::OneThreshold => informed_one_threshold_model(z, mech),
        AttackKind::TwoThreshold => {
            let (a, b) = per_cell_error_rates(mech, default_threshold_offset(mech));
            analytic_two_threshold_model(z.count_ones(), a, b).ok()?
        }
        _ => return None,
    };
    model_accuracy(&model).ok().map(|m| m.accuracy)
}

/// Bookkeeping check: balanced accuracy from the empirical error rates.
pub fn accuracy_from_records(records: &[TrialRecord]) -> f64 {
    let (a, b) = Confusion::from_pairs(records.iter().map(|r| (r.bit, r.decision))).error_rates();
    accuracy_from_errors(a, b)
}

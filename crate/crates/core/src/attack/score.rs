//! Score functions and the final membership decision.

use serde::{Deserialize, Serialize};

use crate::trace::{residual_observations, AggregateMatrix, NoisyAggregate, TraceDataset, TraceMatrix};
use crate::{Error, Result};

/// One threshold per positive observation of the target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerCellThresholds {
    pub cells: Vec<(usize, usize)>,
    pub thresholds: Vec<f64>,
}

impl PerCellThresholds {
    pub fn get(&self, site: usize, epoch: usize) -> Option<f64> {
        self.cells
            .iter()
            .position(|&c| c == (site, epoch))
            .map(|i| self.thresholds[i])
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Thresholds aligned with `z`'s positive observations.
    pub fn aligned(&self, z: &TraceMatrix) -> Result<Vec<f64>> {
        if self.cells.iter().copied().eq(z.cells()) {
            return Ok(self.thresholds.clone());
        }
        z.cells()
            .map(|(l, e)| {
                self.get(l, e)
                    .ok_or(Error::MissingThreshold { site: l, epoch: e })
            })
            .collect()
    }
}

/// Result of one attack on one release.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackOutcome {
    pub score: f64,
    pub threshold: f64,
    pub decision: u8,
}

impl AttackOutcome {
    pub fn new(score: f64, threshold: f64) -> Self {
        Self {
            score,
            threshold,
            decision: decide(score, threshold),
        }
    }
}

/// Member (1) when the score reaches the threshold, non-member (0) below it.
#[inline]
pub fn decide(score: f64, threshold: f64) -> u8 {
    u8::from(score >= threshold)
}

/// Sum of the residual release over the target's positive observations.
pub fn score_one(agg: &NoisyAggregate, background: &AggregateMatrix, z: &TraceMatrix) -> Result<f64> {
    Ok(residual_observations(agg, background, z)?.iter().sum())
}

/// Number of observations at or above their threshold.
#[inline]
pub fn count_above(values: &[f64], thresholds: &[f64]) -> usize {
    values
        .iter()
        .zip(thresholds)
        .filter(|(v, t)| v >= t)
        .count()
}

/// Two-threshold score: how many residual observations clear their cell's
/// threshold.
pub fn score_two(
    agg: &NoisyAggregate,
    background: &AggregateMatrix,
    z: &TraceMatrix,
    thresholds: &PerCellThresholds,
) -> Result<usize> {
    let aligned = thresholds.aligned(z)?;
    let values = residual_observations(agg, background, z)?;
    Ok(count_above(&values, &aligned))
}

/// `⟨t, r⟩` for a binary trace `t` and a dense residual `r`.
#[inline]
pub fn trace_dot(trace: &TraceMatrix, residual: &[f64]) -> f64 {
    trace.ones().iter().map(|&i| residual[i as usize]).sum()
}

/// Similarity of the target to the residual release, minus the average
/// similarity of a set of reference traces drawn from the same population.
pub fn reference_attack_score(
    agg: &NoisyAggregate,
    background: &AggregateMatrix,
    z: &TraceMatrix,
    references: &[TraceMatrix],
) -> Result<f64> {
    if references.is_empty() {
        return Err(Error::invalid("references", "at least one reference trace is required"));
    }
    let residual = agg.residual(background)?;
    if let Some(r) = references.iter().find(|r| r.dims() != z.dims()) {
        return Err(Error::DimensionMismatch {
            expected: z.dims(),
            found: r.dims(),
        });
    }
    Ok(reference_score_dense(residual.cells(), z, references))
}

pub(crate) fn reference_score_dense(residual: &[f64], z: &TraceMatrix, references: &[TraceMatrix]) -> f64 {
    let mean_ref = references.iter().map(|r| trace_dot(r, residual)).sum::<f64>() / references.len() as f64;
    trace_dot(z, residual) - mean_ref
}

/// Convenience wrapper taking references as a dataset.
pub fn reference_attack_score_dataset(
    agg: &NoisyAggregate,
    background: &AggregateMatrix,
    z: &TraceMatrix,
    references: &TraceDataset,
) -> Result<f64> {
    reference_attack_score(agg, background, z, references.traces())
}

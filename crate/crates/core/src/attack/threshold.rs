//! Threshold calibration from labelled shadow scores.

use statrs::distribution::{ContinuousCDF, Normal};

use super::ecdf::SmoothedCdf;
use super::score::PerCellThresholds;
use super::shadow::{ShadowObservations, ShadowSet};
use crate::trace::NoisyAggregate;
use crate::{Error, Result};

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Mean and (unbiased) standard deviation.
pub fn gaussian_fit(xs: &[f64]) -> (f64, f64) {
    let mu = mean(xs);
    if xs.len() < 2 {
        return (mu, 0.0);
    }
    let var = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    (mu, var.sqrt())
}

fn check_classes(member: &[f64], nonmember: &[f64]) -> Result<()> {
    if member.is_empty() {
        return Err(Error::EmptyClass("member"));
    }
    if nonmember.is_empty() {
        return Err(Error::EmptyClass("non-member"));
    }
    Ok(())
}

/// Midpoint of the two class means: the accuracy-maximising cut for a
/// symmetric, equal-spread pair.
pub fn midpoint_threshold(member: &[f64], nonmember: &[f64]) -> Result<f64> {
    check_classes(member, nonmember)?;
    Ok(0.5 * (mean(member) + mean(nonmember)))
}

/// Fit a Gaussian to each class with a shared spread `½(σ̂₀ + σ̂₁)` and cut the
/// non-member fit at its `1 − α` quantile, so that a fraction `α` of
/// non-members is flagged.
pub fn fixed_error_threshold(member: &[f64], nonmember: &[f64], alpha: f64) -> Result<f64> {
    check_classes(member, nonmember)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha", format!("must lie in (0, 1), got {alpha}")));
    }
    let (_, s1) = gaussian_fit(member);
    let (mu0, s0) = gaussian_fit(nonmember);
    let sigma = 0.5 * (s0 + s1);
    if !(sigma > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let normal = Normal::new(mu0, sigma).map_err(|e| Error::invalid("sigma", e.to_string()))?;
    Ok(normal.inverse_cdf(1.0 - alpha))
}

fn shadow_scores(
    shadow: &ShadowSet,
    scorer: impl Fn(&NoisyAggregate) -> Result<f64>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let member = shadow.members().map(&scorer).collect::<Result<Vec<_>>>()?;
    let nonmember = shadow.nonmembers().map(&scorer).collect::<Result<Vec<_>>>()?;
    Ok((member, nonmember))
}

/// Accuracy-maximising single threshold for `scorer` on a shadow set.
/// Shadows are scored without background, since they contain no traces of
/// the release.
pub fn estimate_threshold_max_acc(
    shadow: &ShadowSet,
    scorer: impl Fn(&NoisyAggregate) -> Result<f64>,
) -> Result<f64> {
    let (member, nonmember) = shadow_scores(shadow, scorer)?;
    midpoint_threshold(&member, &nonmember)
}

pub fn estimate_threshold_fixed_error(
    shadow: &ShadowSet,
    scorer: impl Fn(&NoisyAggregate) -> Result<f64>,
    alpha: f64,
) -> Result<f64> {
    let (member, nonmember) = shadow_scores(shadow, scorer)?;
    fixed_error_threshold(&member, &nonmember, alpha)
}

fn column(rows: &[Vec<f64>], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r[j]).collect()
}

/// Per-cell midpoints of member and non-member means.
pub fn per_cell_midpoints(obs: &ShadowObservations) -> Result<PerCellThresholds> {
    if obs.member.is_empty() {
        return Err(Error::EmptyClass("member"));
    }
    if obs.nonmember.is_empty() {
        return Err(Error::EmptyClass("non-member"));
    }
    let k = obs.cells.len();
    let mut member_sum = vec![0.0; k];
    let mut nonmember_sum = vec![0.0; k];
    for row in &obs.member {
        member_sum.iter_mut().zip(row).for_each(|(s, v)| *s += v);
    }
    for row in &obs.nonmember {
        nonmember_sum.iter_mut().zip(row).for_each(|(s, v)| *s += v);
    }
    let (m1, m0) = (obs.member.len() as f64, obs.nonmember.len() as f64);
    Ok(PerCellThresholds {
        cells: obs.cells.clone(),
        thresholds: member_sum
            .iter()
            .zip(&nonmember_sum)
            .map(|(s1, s0)| 0.5 * (s1 / m1 + s0 / m0))
            .collect(),
    })
}

pub fn per_cell_thresholds_max_acc(shadow: &ShadowSet) -> Result<PerCellThresholds> {
    per_cell_midpoints(&shadow.observations())
}

/// Per-cell thresholds at a fixed per-cell false positive rate, read off a
/// smoothed histogram CDF of the non-member values.
pub fn per_cell_fixed_error(obs: &ShadowObservations, alphas: &[f64]) -> Result<PerCellThresholds> {
    if alphas.len() != obs.cells.len() {
        return Err(Error::invalid(
            "alphas",
            format!("expected {} rates, got {}", obs.cells.len(), alphas.len()),
        ));
    }
    if obs.member.is_empty() {
        return Err(Error::EmptyClass("member"));
    }
    if obs.nonmember.is_empty() {
        return Err(Error::EmptyClass("non-member"));
    }
    let mut thresholds = Vec::with_capacity(alphas.len());
    for (j, (&(site, epoch), &alpha)) in obs.cells.iter().zip(alphas).enumerate() {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid("alphas", format!("rate {alpha} outside (0, 1)")));
        }
        let values = column(&obs.nonmember, j);
        let cdf = SmoothedCdf::from_samples(&values).ok_or(Error::DegenerateHistogram {
            site,
            epoch,
            value: values[0],
        })?;
        thresholds.push(cdf.quantile(1.0 - alpha)?);
    }
    Ok(PerCellThresholds {
        cells: obs.cells.clone(),
        thresholds,
    })
}

pub fn per_cell_thresholds_fixed_error(shadow: &ShadowSet, alphas: &[f64]) -> Result<PerCellThresholds> {
    per_cell_fixed_error(&shadow.observations(), alphas)
}

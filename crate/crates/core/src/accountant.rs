//! Optimal k-fold composition and the accuracy bound it implies.
//!
//! An (ε, δ)-DP mechanism composed k times is `(εᵢ, δᵢ')`-DP for every
//! `i ∈ 0..=⌊k/2⌋`, with `εᵢ = (k − 2i)ε` and
//! `δᵢ' = 1 − (1 − δ)ᵏ (1 − δᵢ)`,
//!
//! ```text
//! δᵢ = Σ_{l<i} C(k,l) (e^{(k−l)ε} − e^{(k−2i+l)ε}) / (1 + e^ε)^k.
//! ```
//!
//! Each term is evaluated in log space so k in the hundreds stays finite.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::mechanism::{MechanismFamily, MechanismSpec};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrivacyRegionPoint {
    pub epsilon_total: f64,
    pub delta_total: f64,
}

fn ln_binomial(k: usize, l: usize) -> f64 {
    ln_gamma(k as f64 + 1.0) - ln_gamma(l as f64 + 1.0) - ln_gamma((k - l) as f64 + 1.0)
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// `δᵢ` for pure ε-DP composed k times.
pub fn composition_delta_i(epsilon: f64, k: usize, i: usize) -> f64 {
    let norm = k as f64 * softplus(epsilon);
    let terms: Vec<f64> = (0..i)
        .map(|l| {
            // e^{(k−l)ε} − e^{(k−2i+l)ε} = e^{(k−l)ε} (1 − e^{(2l−2i)ε})
            let gap = -((2.0 * l as f64 - 2.0 * i as f64) * epsilon).exp_m1();
            ln_binomial(k, l) + (k - l) as f64 * epsilon - norm + gap.ln()
        })
        .collect();
    log_sum_exp(&terms).exp().min(1.0)
}

/// All `⌊k/2⌋ + 1` points of the optimal composition region.
pub fn composition_deltas(epsilon: f64, delta: f64, k: usize) -> Result<Vec<PrivacyRegionPoint>> {
    if k == 0 {
        return Err(Error::invalid("k", "composition needs k >= 1"));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::invalid("epsilon", format!("must be non-negative, got {epsilon}")));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::invalid("delta", format!("must lie in [0, 1], got {delta}")));
    }
    let keep = (1.0 - delta).powi(k as i32);
    Ok((0..=k / 2)
        .map(|i| {
            let eps_i = (k - 2 * i) as f64 * epsilon;
            let delta_i = if epsilon.is_infinite() {
                0.0
            } else {
                composition_delta_i(epsilon, k, i)
            };
            PrivacyRegionPoint {
                epsilon_total: if epsilon.is_infinite() && k == 2 * i { 0.0 } else { eps_i },
                delta_total: (1.0 - keep * (1.0 - delta_i)).clamp(0.0, 1.0),
            }
        })
        .collect())
}

/// Smallest `α + β` allowed by `(ε, δ)`-DP, attained where
/// `α + e^ε β = 1 − δ` meets `e^ε α + β = 1 − δ`.
pub fn tradeoff_min_error(point: &PrivacyRegionPoint) -> (f64, f64) {
    let slack = 1.0 - point.delta_total;
    let err = if point.epsilon_total.is_infinite() {
        0.0
    } else {
        (slack / (1.0 + point.epsilon_total.exp())).clamp(0.0, 1.0)
    };
    (err, err)
}

/// Best balanced accuracy any test can reach against k compositions of an
/// (ε, δ)-DP mechanism.
pub fn expected_accuracy_bound(epsilon: f64, delta: f64, k: usize) -> Result<f64> {
    let points = composition_deltas(epsilon, delta, k)?;
    Ok(points
        .iter()
        .map(|p| {
            let (a, b) = tradeoff_min_error(p);
            1.0 - (a + b) / 2.0
        })
        .fold(0.5, f64::max))
}

/// Per-observation `(ε, δ)` for a mechanism: Laplace reports `C / b`,
/// Gaussian the classical bound at its configured `δ`.
pub fn per_observation_privacy(mech: &MechanismSpec) -> (f64, f64) {
    if mech.is_noiseless() {
        return (f64::INFINITY, 0.0);
    }
    match mech.family() {
        MechanismFamily::Laplace => (mech.epsilon(), 0.0),
        MechanismFamily::Gaussian => (mech.epsilon(), mech.delta()),
    }
}

/// Accuracy bound for k positive observations released through `mech`.
pub fn expected_attack_accuracy(mech: &MechanismSpec, k: usize) -> Result<f64> {
    let (eps, delta) = per_observation_privacy(mech);
    expected_accuracy_bound(eps, delta, k)
}

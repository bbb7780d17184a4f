//! Accuracy, error rates, confidence intervals and ROC curves.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Balanced accuracy `(1 − α)/2 + (1 − β)/2`.
pub fn accuracy_from_errors(alpha: f64, beta: f64) -> f64 {
    0.5 * (1.0 - alpha) + 0.5 * (1.0 - beta)
}

/// 95% normal-approximation interval for a proportion, clamped to `[0, 1]`.
pub fn normal_ci(p: f64, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let half = 1.959_963_984_540_054 * (p * (1.0 - p) / n as f64).sqrt();
    ((p - half).max(0.0), (p + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// `(fpr, tpr)` from `(0, 0)` to `(1, 1)`.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

impl RocCurve {
    /// Largest TPR reachable with FPR at most `fpr`.
    pub fn tpr_at(&self, fpr: f64) -> f64 {
        self.points
            .iter()
            .filter(|p| p.0 <= fpr)
            .map(|p| p.1)
            .fold(0.0, f64::max)
    }

    /// Points with strictly positive FPR and TPR, for log-log plots.
    pub fn log_points(&self) -> Vec<(f64, f64)> {
        self.points.iter().copied().filter(|p| p.0 > 0.0 && p.1 > 0.0).collect()
    }
}

/// Sweep every distinct score as a threshold ("score ≥ t ⇒ member") and
/// integrate by the trapezoid rule.
pub fn roc_from_scores(member: &[f64], nonmember: &[f64]) -> Result<RocCurve> {
    if member.is_empty() {
        return Err(Error::invalid("member_scores", "no member scores"));
    }
    if nonmember.is_empty() {
        return Err(Error::invalid("nonmember_scores", "no non-member scores"));
    }
    if member.iter().chain(nonmember).any(|s| s.is_nan()) {
        return Err(Error::invalid("scores", "scores must not be NaN"));
    }
    let mut all: Vec<(f64, bool)> = member
        .iter()
        .map(|&s| (s, true))
        .chain(nonmember.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (n1, n0) = (member.len() as f64, nonmember.len() as f64);
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auc = 0.0;
    let mut i = 0;
    while i < all.len() {
        let s = all[i].0;
        while i < all.len() && all[i].0 == s {
            if all[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let p = (fp as f64 / n0, tp as f64 / n1);
        let last = points[points.len() - 1];
        auc += (p.0 - last.0) * (p.1 + last.1) * 0.5;
        points.push(p);
    }
    Ok(RocCurve { points, auc })
}

/// Counts of a labelled decision set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub true_positive: usize,
    pub false_positive: usize,
    pub true_negative: usize,
    pub false_negative: usize,
}

impl Confusion {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u8, u8)>) -> Self {
        let mut c = Self::default();
        for (bit, decision) in pairs {
            match (bit, decision) {
                (1, 1) => c.true_positive += 1,
                (0, 1) => c.false_positive += 1,
                (0, _) => c.true_negative += 1,
                _ => c.false_negative += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.true_positive + self.false_positive + self.true_negative + self.false_negative
    }

    pub fn successes(&self) -> usize {
        self.true_positive + self.true_negative
    }

    pub fn success_rate(&self) -> f64 {
        self.successes() as f64 / self.total().max(1) as f64
    }

    /// `accuracy_from_errors(α̂, β̂) = success rate`, checked in integer
    /// arithmetic. Holds exactly when both classes have the same size.
    pub fn balanced_identity_holds(&self) -> bool {
        let n0 = (self.false_positive + self.true_negative) as u128;
        let n1 = (self.true_positive + self.false_negative) as u128;
        let (tn, tp) = (self.true_negative as u128, self.true_positive as u128);
        if n0 == 0 || n1 == 0 {
            return false;
        }
        // ½(TN/N₀ + TP/N₁) = (TN + TP)/N  ⇔  N(N₁·TN + N₀·TP) = 2·N₀·N₁(TN + TP)
        (n0 + n1) * (n1 * tn + n0 * tp) == 2 * n0 * n1 * (tn + tp)
    }

    /// Empirical `(α̂, β̂)`: false positive rate among non-members and false
    /// negative rate among members.
    pub fn error_rates(&self) -> (f64, f64) {
        let negatives = (self.false_positive + self.true_negative).max(1);
        let positives = (self.true_positive + self.false_negative).max(1);
        (
            self.false_positive as f64 / negatives as f64,
            self.false_negative as f64 / positives as f64,
        )
    }
}

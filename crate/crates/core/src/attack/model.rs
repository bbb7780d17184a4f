//! Analytic and empirical score distributions and their optimal accuracy.
//!
//! A [`ScoreModel`] describes the score of a non-member (`ℙ`) and of a member
//! (`ℚ`). [`model_accuracy`] returns the threshold maximising balanced
//! accuracy under the rule "score ≥ T ⇒ member".

use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, Discrete};

use super::ecdf::SmoothedCdf;
use super::score::PerCellThresholds;
use super::shadow::ShadowObservations;
use crate::mechanism::{standard_normal_cdf, MechanismSpec};
use crate::trace::TraceMatrix;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ScoreModel {
    GaussianPair {
        nonmember_mean: f64,
        nonmember_std: f64,
        member_mean: f64,
        member_std: f64,
    },
    BinomialPair {
        n: usize,
        nonmember_p: f64,
        member_p: f64,
    },
    /// Sum of independent Bernoulli indicators with per-cell rates.
    PoissonBinomialPair {
        nonmember_ps: Vec<f64>,
        member_ps: Vec<f64>,
    },
    EmpiricalPair {
        nonmember: SmoothedCdf,
        member: SmoothedCdf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelAccuracy {
    pub threshold: f64,
    pub accuracy: f64,
}

/// Gaussian approximation of a Binomial `B(n, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltApprox {
    pub mean: f64,
    pub std: f64,
    /// Set when `n < 5`, below the usual validity range.
    pub small_sample: bool,
}

fn check_rate(name: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("rate {p} outside [0, 1]")))
    }
}

/// `(α′, β′)` for a per-cell threshold `t`: the chance that pure noise
/// reaches `t`, and the chance that a cell shifted by `C` stays below it.
pub fn per_cell_error_rates(mech: &MechanismSpec, t: f64) -> (f64, f64) {
    let c = mech.clip_bound() as f64;
    (1.0 - mech.cdf(0.0, t), mech.cdf(c, t))
}

/// Default per-cell threshold offset `C/2`.
pub fn default_threshold_offset(mech: &MechanismSpec) -> f64 {
    0.5 * mech.clip_bound() as f64
}

pub fn clt_binomial_approx(n: usize, p: f64) -> Result<CltApprox> {
    check_rate("p", p)?;
    let nf = n as f64;
    Ok(CltApprox {
        mean: nf * p,
        std: (nf * p * (1.0 - p)).sqrt(),
        small_sample: n < 5,
    })
}

/// One-threshold score model. `cell_means` and `cell_variances` describe the
/// clean aggregate without the target, row-major over the whole grid (zeros
/// for an informed attacker who removes the exact background).
pub fn analytic_one_threshold_model(
    cell_means: &[f64],
    cell_variances: &[f64],
    z: &TraceMatrix,
    mech: &MechanismSpec,
) -> Result<ScoreModel> {
    let cells = z.len();
    for (name, v) in [("cell_means", cell_means), ("cell_variances", cell_variances)] {
        if v.len() != cells {
            return Err(Error::invalid(name, format!("expected {cells} values, got {}", v.len())));
        }
    }
    if let Some(v) = cell_variances.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::invalid("cell_variances", format!("negative variance {v}")));
    }
    let mut mu0 = 0.0;
    let mut var = 0.0;
    for &i in z.ones() {
        mu0 += cell_means[i as usize];
        var += cell_variances[i as usize] + mech.noise_variance();
    }
    let sd = var.sqrt();
    Ok(ScoreModel::GaussianPair {
        nonmember_mean: mu0,
        nonmember_std: sd,
        member_mean: mu0 + z.count_ones() as f64,
        member_std: sd,
    })
}

/// Informed-attacker one-threshold model: the background is known exactly.
pub fn informed_one_threshold_model(z: &TraceMatrix, mech: &MechanismSpec) -> ScoreModel {
    let zeros = vec![0.0; z.len()];
    analytic_one_threshold_model(&zeros, &zeros, z, mech).expect("zero moments are valid")
}

/// `B(n, 1 − β′)` for members against `B(n, α′)` for non-members.
pub fn analytic_two_threshold_model(n_obs: usize, alpha: f64, beta: f64) -> Result<ScoreModel> {
    check_rate("alpha", alpha)?;
    check_rate("beta", beta)?;
    Ok(ScoreModel::BinomialPair {
        n: n_obs,
        nonmember_p: alpha,
        member_p: 1.0 - beta,
    })
}

/// Gaussian pair obtained by applying [`clt_binomial_approx`] to both sides
/// of [`analytic_two_threshold_model`].
pub fn clt_two_threshold_model(n_obs: usize, alpha: f64, beta: f64) -> Result<ScoreModel> {
    let p = clt_binomial_approx(n_obs, alpha)?;
    let q = clt_binomial_approx(n_obs, 1.0 - beta)?;
    Ok(ScoreModel::GaussianPair {
        nonmember_mean: p.mean,
        nonmember_std: p.std,
        member_mean: q.mean,
        member_std: q.std,
    })
}

/// Exact per-cell error rates for an attacker without background knowledge:
/// the clean cell is `Binomial(n, rate)`, the target adds one for members and
/// the cell fires when the noisy value reaches `t`.
pub fn auxiliary_cell_rates(rate: f64, n: usize, mech: &MechanismSpec, t: f64) -> Result<(f64, f64)> {
    check_rate("rate", rate)?;
    let counts = Binomial::new(rate, n as u64).map_err(|e| Error::invalid("rate", e.to_string()))?;
    let mut alpha = 0.0;
    let mut beta = 0.0;
    for c in 0..=n {
        let w = counts.pmf(c as u64);
        if w == 0.0 {
            continue;
        }
        alpha += w * (1.0 - mech.cdf(c as f64, t));
        beta += w * mech.cdf(c as f64 + 1.0, t);
    }
    Ok((alpha.clamp(0.0, 1.0), beta.clamp(0.0, 1.0)))
}

/// Poisson-binomial two-threshold model for an attacker without background
/// knowledge. `rates` are per-cell presence probabilities over the whole grid;
/// each cell is thresholded at the midpoint `n·rate + ½` of its two classes.
pub fn auxiliary_two_threshold_model(
    rates: &[f64],
    n: usize,
    z: &TraceMatrix,
    mech: &MechanismSpec,
) -> Result<ScoreModel> {
    if rates.len() != z.len() {
        return Err(Error::invalid("rates", format!("expected {} values, got {}", z.len(), rates.len())));
    }
    let mut nonmember_ps = Vec::with_capacity(z.count_ones());
    let mut member_ps = Vec::with_capacity(z.count_ones());
    for &i in z.ones() {
        let r = rates[i as usize];
        let (a, b) = auxiliary_cell_rates(r, n, mech, n as f64 * r + 0.5)?;
        nonmember_ps.push(a);
        member_ps.push(1.0 - b);
    }
    Ok(ScoreModel::PoissonBinomialPair {
        nonmember_ps,
        member_ps,
    })
}

/// Gaussian approximation of a Poisson-binomial pair: means `Σ p` and
/// variances `Σ p(1 − p)`. Optional estimate only; the exact pair is
/// authoritative.
pub fn poisson_binomial_clt(model: &ScoreModel) -> Option<ScoreModel> {
    let ScoreModel::PoissonBinomialPair { nonmember_ps, member_ps } = model else {
        return None;
    };
    let moments = |ps: &[f64]| {
        let mean: f64 = ps.iter().sum();
        let var: f64 = ps.iter().map(|p| p * (1.0 - p)).sum();
        (mean, var.sqrt())
    };
    let (m0, s0) = moments(nonmember_ps);
    let (m1, s1) = moments(member_ps);
    Some(ScoreModel::GaussianPair {
        nonmember_mean: m0,
        nonmember_std: s0,
        member_mean: m1,
        member_std: s1,
    })
}

/// Per-cell firing rates of the two-threshold indicators on shadow data.
pub fn empirical_two_threshold_model(
    obs: &ShadowObservations,
    thresholds: &PerCellThresholds,
) -> Result<ScoreModel> {
    if obs.member.is_empty() {
        return Err(Error::EmptyClass("member"));
    }
    if obs.nonmember.is_empty() {
        return Err(Error::EmptyClass("non-member"));
    }
    let mut ts = Vec::with_capacity(obs.cells.len());
    for &(site, epoch) in &obs.cells {
        ts.push(thresholds.get(site, epoch).ok_or(Error::MissingThreshold { site, epoch })?);
    }
    let rates = |rows: &[Vec<f64>]| -> Vec<f64> {
        (0..ts.len())
            .map(|j| rows.iter().filter(|r| r[j] >= ts[j]).count() as f64 / rows.len() as f64)
            .collect()
    };
    Ok(ScoreModel::PoissonBinomialPair {
        nonmember_ps: rates(&obs.nonmember),
        member_ps: rates(&obs.member),
    })
}

/// Smoothed empirical score distributions of both classes.
pub fn empirical_score_model(member: &[f64], nonmember: &[f64]) -> Result<ScoreModel> {
    let fit = |xs: &[f64], class| {
        if xs.is_empty() {
            return Err(Error::EmptyClass(class));
        }
        SmoothedCdf::from_samples(xs).ok_or(Error::ZeroVariance)
    };
    Ok(ScoreModel::EmpiricalPair {
        member: fit(member, "member")?,
        nonmember: fit(nonmember, "non-member")?,
    })
}

/// `P(X < x)` for `N(mu, sd²)`, a point mass when `sd = 0`.
fn gaussian_below(mu: f64, sd: f64, x: f64) -> f64 {
    if sd > 0.0 {
        standard_normal_cdf((x - mu) / sd)
    } else if x > mu {
        1.0
    } else {
        0.0
    }
}

fn gaussian_accuracy(mu0: f64, s0: f64, mu1: f64, s1: f64) -> Result<ModelAccuracy> {
    if !(s0 >= 0.0 && s1 >= 0.0) {
        return Err(Error::invalid("std", "standard deviations must be non-negative"));
    }
    let acc = |t: f64| 0.5 * gaussian_below(mu0, s0, t) + 0.5 * (1.0 - gaussian_below(mu1, s1, t));
    let mid = 0.5 * (mu0 + mu1);
    let mut candidates = vec![mid];
    if s0 > 0.0 && s1 > 0.0 && s0 != s1 {
        // Equal-density points: roots of a quadratic in t.
        let (v0, v1) = (s0 * s0, s1 * s1);
        let a = 1.0 / v0 - 1.0 / v1;
        let b = -2.0 * (mu0 / v0 - mu1 / v1);
        let c = mu0 * mu0 / v0 - mu1 * mu1 / v1 - 2.0 * (s1 / s0).ln();
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let r = disc.sqrt();
            candidates.push((-b + r) / (2.0 * a));
            candidates.push((-b - r) / (2.0 * a));
        }
    }
    let mut best = ModelAccuracy {
        threshold: f64::INFINITY,
        accuracy: 0.5,
    };
    for t in candidates {
        let a = acc(t);
        if a > best.accuracy {
            best = ModelAccuracy { threshold: t, accuracy: a };
        }
    }
    if best.threshold.is_infinite() && mu0 == mu1 && s0 == s1 {
        best.threshold = mid;
    }
    Ok(best)
}

fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    let dist = Binomial::new(p, n as u64).expect("rate checked");
    (0..=n).map(|c| dist.pmf(c as u64)).collect()
}

/// Exact pmf of a sum of independent Bernoulli(`ps[j]`) variables.
pub fn poisson_binomial_pmf(ps: &[f64]) -> Vec<f64> {
    let mut pmf = vec![0.0; ps.len() + 1];
    pmf[0] = 1.0;
    for (j, &p) in ps.iter().enumerate() {
        for c in (1..=j + 1).rev() {
            pmf[c] = pmf[c] * (1.0 - p) + pmf[c - 1] * p;
        }
        pmf[0] *= 1.0 - p;
    }
    pmf
}

/// Scan integer thresholds `0..=n+1` of two pmfs on `0..=n`.
fn discrete_accuracy(pmf0: &[f64], pmf1: &[f64]) -> ModelAccuracy {
    let n = pmf0.len() - 1;
    let mut below0 = 0.0;
    let mut below1 = 0.0;
    let mut best = ModelAccuracy {
        threshold: 0.0,
        accuracy: 0.5,
    };
    for t in 0..=n + 1 {
        if t > 0 {
            below0 += pmf0[t - 1];
            below1 += pmf1[t - 1];
        }
        let acc = 0.5 * below0 + 0.5 * (1.0 - below1);
        if acc > best.accuracy + 1e-15 {
            best = ModelAccuracy {
                threshold: t as f64,
                accuracy: acc.min(1.0),
            };
        }
    }
    best
}

fn empirical_accuracy(f0: &SmoothedCdf, f1: &SmoothedCdf) -> ModelAccuracy {
    let mut best = ModelAccuracy {
        threshold: f64::INFINITY,
        accuracy: 0.5,
    };
    for &t in f0.knots().iter().chain(f1.knots()) {
        let acc = 0.5 * f0.cdf(t) + 0.5 * (1.0 - f1.cdf(t));
        if acc > best.accuracy {
            best = ModelAccuracy { threshold: t, accuracy: acc };
        }
    }
    best
}

/// Balanced-accuracy-maximising threshold of a score model. Ties go to the
/// smallest threshold; a model without signal reports accuracy 0.5.
pub fn model_accuracy(model: &ScoreModel) -> Result<ModelAccuracy> {
    match model {
        ScoreModel::GaussianPair {
            nonmember_mean,
            nonmember_std,
            member_mean,
            member_std,
        } => gaussian_accuracy(*nonmember_mean, *nonmember_std, *member_mean, *member_std),
        ScoreModel::BinomialPair { n, nonmember_p, member_p } => {
            check_rate("nonmember_p", *nonmember_p)?;
            check_rate("member_p", *member_p)?;
            Ok(discrete_accuracy(&binomial_pmf(*n, *nonmember_p), &binomial_pmf(*n, *member_p)))
        }
        ScoreModel::PoissonBinomialPair { nonmember_ps, member_ps } => {
            if nonmember_ps.len() != member_ps.len() {
                return Err(Error::invalid("member_ps", "both classes need one rate per cell"));
            }
            for &p in nonmember_ps.iter().chain(member_ps) {
                check_rate("ps", p)?;
            }
            Ok(discrete_accuracy(
                &poisson_binomial_pmf(nonmember_ps),
                &poisson_binomial_pmf(member_ps),
            ))
        }
        ScoreModel::EmpiricalPair { nonmember, member } => Ok(empirical_accuracy(nonmember, member)),
    }
}

/// Dense per-cell moments of a clean aggregate of `n` independent traces with
/// Bernoulli cell rates.
pub fn binomial_cell_moments(rates: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    (
        rates.iter().map(|p| nf * p).collect(),
        rates.iter().map(|p| nf * p * (1.0 - p)).collect(),
    )
}

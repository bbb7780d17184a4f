//! Additive-noise mechanisms applied cellwise to aggregates.

use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::trace::{AggregateMatrix, NoisyAggregate};
use crate::{rng, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MechanismFamily {
    Laplace,
    Gaussian,
}

impl std::fmt::Display for MechanismFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MechanismFamily::Laplace => "laplace",
            MechanismFamily::Gaussian => "gaussian",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
}

/// Per-cell sensitivity after clipping: one individual changes any single
/// released cell by at most the clip bound, under either norm.
pub fn sensitivity(clip_bound: usize, _norm: Norm) -> f64 {
    clip_bound as f64
}

/// `sqrt(2 ln(1.25/δ))`, the classical Gaussian calibration factor.
fn gaussian_factor(delta: f64) -> f64 {
    (2.0 * (1.25 / delta).ln()).sqrt()
}

/// A calibrated mechanism. `epsilon` and `delta` are per released cell;
/// `noise_scale` is `b` for Laplace and `σ` for Gaussian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MechanismConfig", into = "MechanismConfig")]
pub struct MechanismSpec {
    family: MechanismFamily,
    epsilon: f64,
    delta: f64,
    clip_bound: usize,
    noise_scale: f64,
}

impl MechanismSpec {
    /// Laplace mechanism with `b = C / ε`.
    pub fn laplace(epsilon: f64, clip_bound: usize) -> Result<Self> {
        check_epsilon(epsilon)?;
        check_clip(clip_bound)?;
        Ok(Self {
            family: MechanismFamily::Laplace,
            epsilon,
            delta: 0.0,
            clip_bound,
            noise_scale: clip_bound as f64 / epsilon,
        })
    }

    /// Gaussian mechanism with `σ = C sqrt(2 ln(1.25/δ)) / ε`.
    pub fn gaussian(epsilon: f64, delta: f64, clip_bound: usize) -> Result<Self> {
        check_epsilon(epsilon)?;
        check_gaussian_delta(delta)?;
        check_clip(clip_bound)?;
        Ok(Self {
            family: MechanismFamily::Gaussian,
            epsilon,
            delta,
            clip_bound,
            noise_scale: clip_bound as f64 * gaussian_factor(delta) / epsilon,
        })
    }

    /// Laplace mechanism from an explicit scale; `scale = 0` disables noise.
    pub fn laplace_with_scale(scale: f64, clip_bound: usize) -> Result<Self> {
        check_scale(scale)?;
        check_clip(clip_bound)?;
        Ok(Self {
            family: MechanismFamily::Laplace,
            epsilon: clip_bound as f64 / scale,
            delta: 0.0,
            clip_bound,
            noise_scale: scale,
        })
    }

    /// Gaussian mechanism from an explicit σ; `ε` is reported through the
    /// classical bound at the given `δ`.
    pub fn gaussian_with_scale(scale: f64, delta: f64, clip_bound: usize) -> Result<Self> {
        check_scale(scale)?;
        check_gaussian_delta(delta)?;
        check_clip(clip_bound)?;
        Ok(Self {
            family: MechanismFamily::Gaussian,
            epsilon: clip_bound as f64 * gaussian_factor(delta) / scale,
            delta,
            clip_bound,
            noise_scale: scale,
        })
    }

    pub fn family(&self) -> MechanismFamily {
        self.family
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn clip_bound(&self) -> usize {
        self.clip_bound
    }

    pub fn noise_scale(&self) -> f64 {
        self.noise_scale
    }

    pub fn is_noiseless(&self) -> bool {
        self.noise_scale == 0.0
    }

    pub fn noise_variance(&self) -> f64 {
        match self.family {
            MechanismFamily::Laplace => 2.0 * self.noise_scale * self.noise_scale,
            MechanismFamily::Gaussian => self.noise_scale * self.noise_scale,
        }
    }

    /// One draw of the centred noise.
    #[inline]
    pub fn sample_noise(&self, rng: &mut impl rand::Rng) -> f64 {
        if self.noise_scale == 0.0 {
            return 0.0;
        }
        match self.family {
            MechanismFamily::Laplace => {
                let u: f64 = rng.sample::<f64, _>(Open01) - 0.5;
                -self.noise_scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
            }
            MechanismFamily::Gaussian => self.noise_scale * rng.sample::<f64, _>(StandardNormal),
        }
    }

    /// Add i.i.d. noise to every value in place.
    pub fn add_noise(&self, values: &mut [f64], rng: &mut impl rand::Rng) {
        if self.noise_scale == 0.0 {
            return;
        }
        for v in values {
            *v += self.sample_noise(rng);
        }
    }

    /// CDF at `x` of the noise distribution shifted to `shift`.
    pub fn cdf(&self, shift: f64, x: f64) -> f64 {
        let d = x - shift;
        if self.noise_scale == 0.0 {
            return if d >= 0.0 { 1.0 } else { 0.0 };
        }
        match self.family {
            MechanismFamily::Laplace => {
                let t = d / self.noise_scale;
                if t < 0.0 {
                    0.5 * t.exp()
                } else {
                    1.0 - 0.5 * (-t).exp()
                }
            }
            MechanismFamily::Gaussian => standard_normal_cdf(d / self.noise_scale),
        }
    }
}

/// Standard normal CDF through `erfc`, accurate in both tails.
pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Free-function form of [`MechanismSpec::cdf`].
pub fn mechanism_cdf(mech: &MechanismSpec, shift: f64, x: f64) -> f64 {
    mech.cdf(shift, x)
}

/// Release `agg + X` with i.i.d. noise drawn from a stream seeded by `seed`.
pub fn perturb(agg: &AggregateMatrix, mech: &MechanismSpec, seed: u64) -> NoisyAggregate {
    perturb_with(agg, mech, &mut rng::stream(seed, rng::domain::NOISE, 0))
}

pub fn perturb_with(
    agg: &AggregateMatrix,
    mech: &MechanismSpec,
    rng: &mut impl rand::Rng,
) -> NoisyAggregate {
    let (sites, epochs) = agg.dims();
    let mut cells: Vec<f64> = agg.cells().iter().map(|&c| c as f64).collect();
    mech.add_noise(&mut cells, rng);
    NoisyAggregate::new(sites, epochs, cells, Some(*mech)).expect("dimensions come from agg")
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::invalid("epsilon", format!("must be positive and finite, got {epsilon}")));
    }
    Ok(())
}

fn check_gaussian_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta", format!("Gaussian mechanism needs delta in (0, 1), got {delta}")));
    }
    Ok(())
}

fn check_scale(scale: f64) -> Result<()> {
    if !(scale >= 0.0) || !scale.is_finite() {
        return Err(Error::invalid("noise_scale", format!("must be non-negative and finite, got {scale}")));
    }
    Ok(())
}

fn check_clip(clip_bound: usize) -> Result<()> {
    if clip_bound == 0 {
        return Err(Error::invalid("clip_bound", "must be at least 1"));
    }
    Ok(())
}

/// JSON form of a mechanism. Exactly one of `epsilon` and `noise_scale` is
/// given; the other is derived.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanismConfig {
    pub family: MechanismFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub delta: f64,
    #[serde(default = "default_clip")]
    pub clip_bound: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_scale: Option<f64>,
}

fn default_clip() -> usize {
    1
}

impl TryFrom<MechanismConfig> for MechanismSpec {
    type Error = Error;

    fn try_from(c: MechanismConfig) -> Result<Self> {
        match (c.family, c.epsilon, c.noise_scale) {
            (_, Some(_), Some(_)) => Err(Error::invalid(
                "mechanism",
                "give either epsilon or noise_scale, not both",
            )),
            (_, None, None) => Err(Error::invalid("mechanism", "epsilon or noise_scale is required")),
            (MechanismFamily::Laplace, eps, scale) => {
                if c.delta != 0.0 {
                    return Err(Error::invalid("delta", "Laplace mechanism requires delta = 0"));
                }
                match (eps, scale) {
                    (Some(e), _) => Self::laplace(e, c.clip_bound),
                    (_, Some(s)) => Self::laplace_with_scale(s, c.clip_bound),
                    _ => unreachable!(),
                }
            }
            (MechanismFamily::Gaussian, Some(e), _) => Self::gaussian(e, c.delta, c.clip_bound),
            (MechanismFamily::Gaussian, _, Some(s)) => {
                Self::gaussian_with_scale(s, c.delta, c.clip_bound)
            }
        }
    }
}

impl From<MechanismSpec> for MechanismConfig {
    fn from(m: MechanismSpec) -> Self {
        let finite = m.epsilon.is_finite();
        MechanismConfig {
            family: m.family,
            epsilon: finite.then_some(m.epsilon),
            delta: m.delta,
            clip_bound: m.clip_bound,
            noise_scale: (!finite).then_some(m.noise_scale),
        }
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    #[test]
    fn sensitivity_is_clip_bound() {
        assert_eq!(sensitivity(1, Norm::L1), 1.0);
        assert_eq!(sensitivity(1, Norm::L2), 1.0);
        assert_eq!(sensitivity(3, Norm::L1), 3.0);
    }

    #[test]
    fn laplace_scale_follows_epsilon() {
        let m = MechanismSpec::laplace(0.5, 1).unwrap();
        assert_eq!(m.noise_scale(), 2.0);
        assert_eq!(m.delta(), 0.0);
        assert!(MechanismSpec::laplace(0.0, 1).is_err());
        assert!(MechanismSpec::laplace(0.5, 0).is_err());
    }

    #[test]
    fn gaussian_scale_round_trips_epsilon() {
        let m = MechanismSpec::gaussian(0.5, 1e-5, 2).unwrap();
        let back = MechanismSpec::gaussian_with_scale(m.noise_scale(), 1e-5, 2).unwrap();
        assert_abs_diff_eq!(back.epsilon(), 0.5, epsilon = 1e-12);
        assert!(MechanismSpec::gaussian(0.5, 0.0, 1).is_err());
    }

    #[test]
    fn laplace_cdf_values() {
        let m = MechanismSpec::laplace_with_scale(2.0, 1).unwrap();
        assert_eq!(m.cdf(0.0, 0.0), 0.5);
        assert_abs_diff_eq!(m.cdf(0.0, 0.5), 1.0 - 0.5 * (-0.25f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(m.cdf(0.0, 0.5), 0.610_599_608_464_297_5, epsilon = 1e-12);
        assert_abs_diff_eq!(m.cdf(1.0, 0.5), 0.5 * (-0.25f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn gaussian_cdf_values() {
        let m = MechanismSpec::gaussian_with_scale(1.0, 1e-5, 1).unwrap();
        assert_eq!(m.cdf(0.0, 0.0), 0.5);
        // Φ(0.5) from tables.
        assert_abs_diff_eq!(m.cdf(0.0, 0.5), 0.691_462_461_274_013_1, epsilon = 1e-12);
    }

    #[test]
    fn zero_scale_is_identity() {
        let mut agg = AggregateMatrix::zeros(2, 3);
        agg.add_trace(&crate::TraceMatrix::from_ones(2, 3, vec![1, 4]).unwrap()).unwrap();
        let m = MechanismSpec::laplace_with_scale(0.0, 1).unwrap();
        let out = perturb(&agg, &m, 11);
        assert_eq!(out.cells(), &[0.0, 1.0, 0.0, 0.0, 1.0, 0.0]);
        assert_eq!(m.cdf(1.0, 0.999), 0.0);
        assert_eq!(m.cdf(1.0, 1.0), 1.0);
    }

    fn sample_variance(m: &MechanismSpec, n: usize) -> f64 {
        let mut rng = rng::seeded(99);
        let xs: Vec<f64> = (0..n).map(|_| m.sample_noise(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    }

    #[test]
    fn laplace_noise_variance() {
        let m = MechanismSpec::laplace(0.5, 1).unwrap();
        let v = sample_variance(&m, 1_000_000);
        assert!((v / 8.0 - 1.0).abs() < 0.02, "{v}");
    }

    #[test]
    fn gaussian_noise_variance() {
        let m = MechanismSpec::gaussian_with_scale(1.7, 1e-5, 1).unwrap();
        let v = sample_variance(&m, 1_000_000);
        assert!((v / (1.7 * 1.7) - 1.0).abs() < 0.02, "{v}");
    }

    #[test]
    fn json_fields() {
        let m: MechanismSpec = serde_json::from_str(
            r#"{"family":"gaussian","epsilon":0.5,"delta":0.0001,"clip_bound":1}"#,
        )
        .unwrap();
        assert_eq!(m.family(), MechanismFamily::Gaussian);
        let back: MechanismSpec = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        let quiet: MechanismSpec =
            serde_json::from_str(r#"{"family":"laplace","noise_scale":0.0}"#).unwrap();
        assert!(quiet.is_noiseless());
        let json = serde_json::to_string(&quiet).unwrap();
        assert!(json.contains("noise_scale"), "{json}");
        assert!(serde_json::from_str::<MechanismSpec>(r#"{"family":"laplace","epsilon":1,"sigma":2}"#).is_err());
        assert!(serde_json::from_str::<MechanismSpec>(r#"{"family":"laplace","epsilon":1,"delta":0.1}"#).is_err());
    }
}

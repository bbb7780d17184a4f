//! Histogram-smoothed empirical CDF.
//!
//! Samples are binned with the Freedman–Diaconis width (Sturges' rule when
//! the interquartile range collapses). The CDF is piecewise linear through
//! `(min, 0)`, each bin midpoint at the mass below it plus half its own
//! count, and `(max, 1)`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const MAX_BINS: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothedCdf {
    xs: Vec<f64>,
    ps: Vec<f64>,
}

fn sorted_quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl SmoothedCdf {
    /// Returns `None` for an empty or single-valued sample.
    pub fn from_samples(samples: &[f64]) -> Option<Self> {
        let mut sorted: Vec<f64> = samples.iter().copied().filter(|x| x.is_finite()).collect();
        if sorted.is_empty() {
            return None;
        }
        sorted.sort_by(f64::total_cmp);
        let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
        if max <= min {
            return None;
        }
        let n = sorted.len();
        let iqr = sorted_quantile(&sorted, 0.75) - sorted_quantile(&sorted, 0.25);
        let bins = if iqr > 0.0 {
            let width = 2.0 * iqr / (n as f64).cbrt();
            ((max - min) / width).ceil() as usize
        } else {
            (n as f64).log2().ceil() as usize + 1
        }
        .clamp(1, MAX_BINS);
        let width = (max - min) / bins as f64;

        let mut counts = vec![0usize; bins];
        for &x in &sorted {
            let b = (((x - min) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        let mut xs = Vec::with_capacity(bins + 2);
        let mut ps = Vec::with_capacity(bins + 2);
        xs.push(min);
        ps.push(0.0);
        let mut below = 0usize;
        for (b, &c) in counts.iter().enumerate() {
            xs.push(min + (b as f64 + 0.5) * width);
            ps.push((below as f64 + 0.5 * c as f64) / n as f64);
            below += c;
        }
        xs.push(max);
        ps.push(1.0);
        Some(Self { xs, ps })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.xs[0] {
            return 0.0;
        }
        if x >= self.xs[self.xs.len() - 1] {
            return 1.0;
        }
        let j = self.xs.partition_point(|&k| k <= x);
        let (x0, x1) = (self.xs[j - 1], self.xs[j]);
        let (p0, p1) = (self.ps[j - 1], self.ps[j]);
        p0 + (p1 - p0) * (x - x0) / (x1 - x0)
    }

    /// Smallest `x` with `cdf(x) >= p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid("p", format!("quantile level {p} outside [0, 1]")));
        }
        if p <= 0.0 {
            return Ok(self.xs[0]);
        }
        let j = self.ps.partition_point(|&q| q < p);
        let j = j.min(self.ps.len() - 1);
        let (x0, x1) = (self.xs[j - 1], self.xs[j]);
        let (p0, p1) = (self.ps[j - 1], self.ps[j]);
        if p1 <= p0 {
            return Ok(x1);
        }
        Ok(x0 + (x1 - x0) * (p - p0) / (p1 - p0))
    }

    pub fn min(&self) -> f64 {
        self.xs[0]
    }

    pub fn max(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    /// Knot abscissae, ascending.
    pub fn knots(&self) -> &[f64] {
        &self.xs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism::MechanismSpec;
    use crate::rng;
    use proptest::prelude::*;

    #[test]
    fn degenerate_samples() {
        assert!(SmoothedCdf::from_samples(&[]).is_none());
        assert!(SmoothedCdf::from_samples(&[2.0; 10]).is_none());
    }

    #[test]
    fn matches_laplace_cdf() {
        let m = MechanismSpec::laplace_with_scale(2.0, 1).unwrap();
        let mut r = rng::seeded(4);
        let xs: Vec<f64> = (0..100_000).map(|_| m.sample_noise(&mut r)).collect();
        let cdf = SmoothedCdf::from_samples(&xs).unwrap();
        for x in [-4.0, -1.0, 0.0, 0.5, 3.0] {
            assert!((cdf.cdf(x) - m.cdf(0.0, x)).abs() < 0.01, "x={x}");
        }
        let t = cdf.quantile(1.0 - 0.5 * (-0.25f64).exp()).unwrap();
        assert!((t - 0.5).abs() < 0.05, "{t}");
    }

    #[test]
    fn extreme_levels_hit_sample_range() {
        let cdf = SmoothedCdf::from_samples(&[3.0, 1.0, 2.0, 5.0, 4.0]).unwrap();
        assert_eq!(cdf.quantile(0.0).unwrap(), 1.0);
        assert_eq!(cdf.quantile(1.0).unwrap(), 5.0);
        assert!(cdf.quantile(1.5).is_err());
    }

    proptest! {
        #[test]
        fn monotone_and_inverse(samples in proptest::collection::vec(-50.0f64..50.0, 2..200), p in 0.0f64..1.0) {
            prop_assume!(samples.iter().any(|&x| x != samples[0]));
            let cdf = SmoothedCdf::from_samples(&samples).unwrap();
            let mut prev = 0.0;
            for i in 0..=100 {
                let x = cdf.min() + (cdf.max() - cdf.min()) * i as f64 / 100.0;
                let c = cdf.cdf(x);
                prop_assert!((0.0..=1.0).contains(&c));
                prop_assert!(c >= prev - 1e-12);
                prev = c;
            }
            let q = cdf.quantile(p).unwrap();
            prop_assert!((cdf.cdf(q) - p).abs() < 1e-9 || cdf.cdf(q) >= p);
        }
    }
}

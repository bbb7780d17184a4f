//! One-hidden-layer sigmoid meta-classifier.
//!
//! `f̂(x) = σ(Σ_j w2_j σ(Σ_i w1_ij x_i + w1_(n+1)j) + w2_(H+1))`
//!
//! Hidden weights are stored as an `(n_in + 1) × n_hidden` row-major matrix
//! whose last row holds the hidden biases; output weights have `n_hidden + 1`
//! entries with the output bias last. Both threshold rules have exact
//! constructive encodings ([`encode_one_threshold`], [`encode_two_threshold`])
//! that converge to the step rules as the gains `a` and `b` grow.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::{par, rng, Error, Result};

/// Samples per gradient chunk. Fixed so that summation order, and therefore
/// the trained weights, do not depend on the thread count.
const GRAD_CHUNK: usize = 512;

/// Hidden width of the wide variant.
pub const WIDE_HIDDEN: usize = 100;

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + eˣ)` without overflow.
#[inline]
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    n_in: usize,
    n_hidden: usize,
    hidden_weights: Vec<f64>,
    output_weights: Vec<f64>,
}

impl MlpModel {
    pub fn new(
        n_in: usize,
        n_hidden: usize,
        hidden_weights: Vec<f64>,
        output_weights: Vec<f64>,
    ) -> Result<Self> {
        let model = Self {
            n_in,
            n_hidden,
            hidden_weights,
            output_weights,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        if self.n_hidden == 0 {
            return Err(Error::invalid("n_hidden", "need at least one hidden node"));
        }
        if self.hidden_weights.len() != (self.n_in + 1) * self.n_hidden {
            return Err(Error::invalid(
                "hidden_weights",
                format!(
                    "expected {} entries for {} inputs and {} hidden nodes, got {}",
                    (self.n_in + 1) * self.n_hidden,
                    self.n_in,
                    self.n_hidden,
                    self.hidden_weights.len()
                ),
            ));
        }
        if self.output_weights.len() != self.n_hidden + 1 {
            return Err(Error::invalid(
                "output_weights",
                format!("expected {} entries, got {}", self.n_hidden + 1, self.output_weights.len()),
            ));
        }
        if self.params().any(|w| !w.is_finite()) {
            return Err(Error::invalid("weights", "all weights must be finite"));
        }
        Ok(())
    }

    pub fn zeros(n_in: usize, n_hidden: usize) -> Result<Self> {
        Self::new(n_in, n_hidden, vec![0.0; (n_in + 1) * n_hidden], vec![0.0; n_hidden + 1])
    }

    /// Weights uniform in `[−1/√n_in, 1/√n_in]`.
    pub fn random(n_in: usize, n_hidden: usize, seed: u64) -> Result<Self> {
        let mut model = Self::zeros(n_in, n_hidden)?;
        let r = 1.0 / (n_in.max(1) as f64).sqrt();
        let mut g = rng::stream(seed, rng::domain::INIT, 0);
        for w in model.hidden_weights.iter_mut().chain(model.output_weights.iter_mut()) {
            *w = g.random_range(-r..=r);
        }
        Ok(model)
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_hidden(&self) -> usize {
        self.n_hidden
    }

    pub fn hidden_weights(&self) -> &[f64] {
        &self.hidden_weights
    }

    pub fn output_weights(&self) -> &[f64] {
        &self.output_weights
    }

    /// Weight from input `i` (or the bias row when `i == n_in`) to hidden node `j`.
    pub fn hidden_weight(&self, i: usize, j: usize) -> f64 {
        self.hidden_weights[i * self.n_hidden + j]
    }

    pub fn param_count(&self) -> usize {
        self.hidden_weights.len() + self.output_weights.len()
    }

    /// All parameters, hidden matrix first.
    pub fn params(&self) -> impl Iterator<Item = f64> + '_ {
        self.hidden_weights.iter().chain(&self.output_weights).copied()
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::invalid("params", format!("expected {}, got {}", self.param_count(), params.len())));
        }
        let (h, o) = params.split_at(self.hidden_weights.len());
        self.hidden_weights.copy_from_slice(h);
        self.output_weights.copy_from_slice(o);
        Ok(())
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_in {
            return Err(Error::invalid("x", format!("expected {} features, got {}", self.n_in, x.len())));
        }
        Ok(())
    }

    /// Hidden activations into `h`, returning the output logit.
    fn logit_into(&self, x: &[f64], h: &mut [f64]) -> f64 {
        let bias = &self.hidden_weights[self.n_in * self.n_hidden..];
        h.copy_from_slice(bias);
        for (i, &xi) in x.iter().enumerate() {
            let row = &self.hidden_weights[i * self.n_hidden..(i + 1) * self.n_hidden];
            for (hj, w) in h.iter_mut().zip(row) {
                *hj += w * xi;
            }
        }
        let mut out = self.output_weights[self.n_hidden];
        for (hj, w) in h.iter_mut().zip(&self.output_weights) {
            *hj = sigmoid(*hj);
            out += w * *hj;
        }
        out
    }

    pub fn logit(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        let mut h = vec![0.0; self.n_hidden];
        Ok(self.logit_into(x, &mut h))
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        self.logit(x).map(sigmoid)
    }

    /// Member (1) when the output is at least ½.
    pub fn predict(&self, x: &[f64]) -> Result<u8> {
        Ok(u8::from(self.logit(x)? >= 0.0))
    }

    /// Mean binary cross-entropy and its gradient (same layout as
    /// [`params`](Self::params)) over a labelled sample.
    pub fn loss_and_gradient(&self, data: &Features) -> Result<(f64, Vec<f64>)> {
        if data.n_in != self.n_in {
            return Err(Error::invalid("data", format!("expected {} features, got {}", self.n_in, data.n_in)));
        }
        let idx: Vec<usize> = (0..data.len()).collect();
        Ok(self.batch_gradient(data, &idx))
    }

    fn batch_gradient(&self, data: &Features, idx: &[usize]) -> (f64, Vec<f64>) {
        let parts = par::map_chunks(idx.len(), GRAD_CHUNK, |r| self.chunk_gradient(data, &idx[r]));
        let mut loss = 0.0;
        let mut grad = vec![0.0; self.param_count()];
        for (l, g) in parts {
            loss += l;
            grad.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
        }
        let scale = 1.0 / idx.len().max(1) as f64;
        grad.iter_mut().for_each(|g| *g *= scale);
        (loss * scale, grad)
    }

    fn chunk_gradient(&self, data: &Features, idx: &[usize]) -> (f64, Vec<f64>) {
        let (n_in, n_h) = (self.n_in, self.n_hidden);
        let bias_row = n_in * n_h;
        let out_off = self.hidden_weights.len();
        let mut grad = vec![0.0; self.param_count()];
        let mut h = vec![0.0; n_h];
        let mut loss = 0.0;
        for &s in idx {
            let x = data.row(s);
            let y = data.labels[s];
            let o = self.logit_into(x, &mut h);
            loss += softplus(o) - y * o;
            let g = sigmoid(o) - y;
            for j in 0..n_h {
                grad[out_off + j] += g * h[j];
                let d = g * self.output_weights[j] * h[j] * (1.0 - h[j]);
                h[j] = d;
                grad[bias_row + j] += d;
            }
            grad[out_off + n_h] += g;
            for (i, &xi) in x.iter().enumerate() {
                let row = &mut grad[i * n_h..(i + 1) * n_h];
                for (gw, d) in row.iter_mut().zip(&h) {
                    *gw += d * xi;
                }
            }
        }
        (loss, grad)
    }

    /// Fraction of rows whose prediction equals the label.
    pub fn accuracy(&self, data: &Features) -> Result<f64> {
        if data.n_in != self.n_in {
            return Err(Error::invalid("data", format!("expected {} features, got {}", self.n_in, data.n_in)));
        }
        if data.is_empty() {
            return Err(Error::invalid("data", "no rows"));
        }
        let hits: usize = par::map_chunks(data.len(), GRAD_CHUNK, |r| {
            let mut h = vec![0.0; self.n_hidden];
            r.filter(|&s| {
                let p = self.logit_into(data.row(s), &mut h) >= 0.0;
                p == (data.labels[s] >= 0.5)
            })
            .count()
        })
        .into_iter()
        .sum();
        Ok(hits as f64 / data.len() as f64)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(s)?;
        model.validate()?;
        Ok(model)
    }
}

/// Row-major feature matrix with 0/1 labels.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Features {
    n_in: usize,
    values: Vec<f64>,
    labels: Vec<f64>,
}

impl Features {
    pub fn new(n_in: usize, values: Vec<f64>, labels: Vec<f64>) -> Result<Self> {
        if values.len() != n_in * labels.len() {
            return Err(Error::invalid(
                "values",
                format!("expected {} values for {} rows, got {}", n_in * labels.len(), labels.len(), values.len()),
            ));
        }
        if labels.iter().any(|&y| y != 0.0 && y != 1.0) {
            return Err(Error::invalid("labels", "labels must be 0 or 1"));
        }
        Ok(Self { n_in, values, labels })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], labels: Vec<f64>) -> Result<Self> {
        let n_in = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.len() != labels.len() {
            return Err(Error::invalid("labels", "one label per row"));
        }
        let mut values = Vec::with_capacity(n_in * rows.len());
        for r in rows {
            if r.as_ref().len() != n_in {
                return Err(Error::invalid("rows", "rows differ in length"));
            }
            values.extend_from_slice(r.as_ref());
        }
        Self::new(n_in, values, labels)
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_in..(i + 1) * self.n_in]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    /// Plain gradient descent.
    #[default]
    Gd,
    Adam,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// `None` trains on the full batch.
    #[serde(default)]
    pub batch_size: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub optimizer: Optimizer,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.5,
            epochs: 200,
            batch_size: None,
            seed: 0,
            optimizer: Optimizer::Gd,
        }
    }
}

impl TrainConfig {
    pub fn adam(learning_rate: f64, epochs: usize, batch_size: usize, seed: u64) -> Self {
        Self {
            learning_rate,
            epochs,
            batch_size: Some(batch_size),
            seed,
            optimizer: Optimizer::Adam,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning_rate", "must be positive and finite"));
        }
        if self.batch_size == Some(0) {
            return Err(Error::invalid("batch_size", "must be positive"));
        }
        Ok(())
    }
}

/// Mean training loss per epoch.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epoch_losses: Vec<f64>,
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - Self::B1.powi(self.t);
        let c2 = 1.0 - Self::B2.powi(self.t);
        for (((p, g), m), v) in params.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = Self::B1 * *m + (1.0 - Self::B1) * g;
            *v = Self::B2 * *v + (1.0 - Self::B2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + Self::EPS);
        }
    }
}

/// Minimise binary cross-entropy on `data`. Returns the trained copy and the
/// per-epoch loss; the input model is left untouched.
pub fn train(model: &MlpModel, data: &Features, cfg: &TrainConfig) -> Result<(MlpModel, TrainReport)> {
    cfg.validate()?;
    if data.n_in != model.n_in {
        return Err(Error::invalid("data", format!("expected {} features, got {}", model.n_in, data.n_in)));
    }
    let mut out = model.clone();
    let mut report = TrainReport::default();
    if cfg.epochs == 0 || data.is_empty() {
        return Ok((out, report));
    }
    let mut params: Vec<f64> = out.params().collect();
    let mut adam = Adam::new(params.len());
    let mut order: Vec<usize> = (0..data.len()).collect();
    let batch = cfg.batch_size.unwrap_or(data.len()).min(data.len());
    for epoch in 0..cfg.epochs {
        if batch < data.len() {
            order.shuffle(&mut rng::stream(cfg.seed, rng::domain::TRAIN, epoch as u64));
        }
        let mut total = 0.0;
        for idx in order.chunks(batch) {
            let (loss, grad) = out.batch_gradient(data, idx);
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, loss });
            }
            total += loss * idx.len() as f64;
            match cfg.optimizer {
                Optimizer::Gd => params.iter_mut().zip(&grad).for_each(|(p, g)| *p -= cfg.learning_rate * g),
                Optimizer::Adam => adam.step(&mut params, &grad, cfg.learning_rate),
            }
            out.set_params(&params)?;
        }
        report.epoch_losses.push(total / data.len() as f64);
    }
    if out.params().any(|w| !w.is_finite()) {
        return Err(Error::NonFiniteLoss {
            epoch: cfg.epochs - 1,
            loss: f64::NAN,
        });
    }
    Ok((out, report))
}

fn check_gains(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::invalid("a", format!("must be positive, got {a}")));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::invalid("b", format!("must be positive, got {b}")));
    }
    Ok(())
}

/// Single hidden node computing `σ(b(σ(a(Σx − T)) − ½))`, the smooth form of
/// "member iff Σx ≥ T".
pub fn encode_one_threshold(n_in: usize, t: f64, a: f64, b: f64) -> Result<MlpModel> {
    check_gains(a, b)?;
    let mut hidden = vec![a; n_in];
    hidden.push(-a * t);
    MlpModel::new(n_in, 1, hidden, vec![b, -0.5 * b])
}

/// One hidden node per input computing `σ(a(x_i − T_i))`; the output is
/// `σ(b(Σ_i h_i − (T − ½)))`, the smooth form of "member iff at least `T`
/// inputs reach their threshold".
pub fn encode_two_threshold(per_cell: &[f64], t: f64, a: f64, b: f64) -> Result<MlpModel> {
    check_gains(a, b)?;
    let n = per_cell.len();
    let mut hidden = vec![0.0; (n + 1) * n];
    for i in 0..n {
        hidden[i * n + i] = a;
        hidden[n * n + i] = -a * per_cell[i];
    }
    let mut output = vec![b; n];
    output.push(-b * (t - 0.5));
    MlpModel::new(n, n, hidden, output)
}

/// The two step rules the encodings approximate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum StepRule {
    OneThreshold { n_in: usize, threshold: f64 },
    TwoThreshold { per_cell: Vec<f64>, threshold: f64 },
}

impl StepRule {
    pub fn n_in(&self) -> usize {
        match self {
            StepRule::OneThreshold { n_in, .. } => *n_in,
            StepRule::TwoThreshold { per_cell, .. } => per_cell.len(),
        }
    }

    pub fn decide(&self, x: &[f64]) -> u8 {
        match self {
            StepRule::OneThreshold { threshold, .. } => u8::from(x.iter().sum::<f64>() >= *threshold),
            StepRule::TwoThreshold { per_cell, threshold } => {
                let fired = x.iter().zip(per_cell).filter(|(v, t)| v >= t).count();
                u8::from(fired as f64 >= *threshold)
            }
        }
    }

    pub fn encode(&self, a: f64, b: f64) -> Result<MlpModel> {
        match self {
            StepRule::OneThreshold { n_in, threshold } => encode_one_threshold(*n_in, *threshold, a, b),
            StepRule::TwoThreshold { per_cell, threshold } => encode_two_threshold(per_cell, *threshold, a, b),
        }
    }

    /// Uniform input at least `margin` away from every decision boundary.
    /// One-threshold inputs are drawn from `[0, 2T/n]ⁿ` so the sum centres on
    /// `T`; two-threshold inputs from `[T_i − 1, T_i + 1]`.
    pub fn sample_input(&self, margin: f64, g: &mut rng::Rng) -> Vec<f64> {
        loop {
            let x: Vec<f64> = match self {
                StepRule::OneThreshold { n_in, threshold } => {
                    let hi = (2.0 * threshold / *n_in as f64).max(1.0 / *n_in as f64);
                    (0..*n_in).map(|_| g.random_range(0.0..hi)).collect()
                }
                StepRule::TwoThreshold { per_cell, .. } => {
                    per_cell.iter().map(|t| g.random_range(t - 1.0..t + 1.0)).collect()
                }
            };
            let clear = match self {
                StepRule::OneThreshold { threshold, .. } => (x.iter().sum::<f64>() - threshold).abs() >= margin,
                StepRule::TwoThreshold { per_cell, .. } => {
                    x.iter().zip(per_cell).all(|(v, t)| (v - t).abs() >= margin)
                }
            };
            if clear {
                return x;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproximationRow {
    pub a: f64,
    pub b: f64,
    pub mean_abs_error: f64,
    pub disagreement_rate: f64,
}

/// Compare the encoded network with its step rule on common random inputs for
/// every `(a, b)` on the grid, rows ordered by `a` then `b`.
pub fn approximation_error_sweep(
    rule: &StepRule,
    a_grid: &[f64],
    b_grid: &[f64],
    sample_count: usize,
    margin: f64,
    seed: u64,
) -> Result<Vec<ApproximationRow>> {
    if a_grid.is_empty() || b_grid.is_empty() {
        return Err(Error::invalid("grid", "a and b grids must be non-empty"));
    }
    if sample_count == 0 {
        return Err(Error::invalid("sample_count", "must be positive"));
    }
    if let StepRule::OneThreshold { n_in: 0, .. } = rule {
        return Err(Error::invalid("n_in", "must be positive"));
    }
    let inputs: Vec<(Vec<f64>, u8)> = par::map_indexed(sample_count, |i| {
        let mut g = rng::stream(seed, rng::domain::SWEEP, i as u64);
        let x = rule.sample_input(margin, &mut g);
        let y = rule.decide(&x);
        (x, y)
    });
    let mut rows = Vec::with_capacity(a_grid.len() * b_grid.len());
    for &a in a_grid {
        for &b in b_grid {
            let model = rule.encode(a, b)?;
            let stats = par::map_slice(&inputs, |(x, y)| {
                let f = model.forward(x).expect("rule and model share n_in");
                ((f - *y as f64).abs(), u8::from(f >= 0.5) != *y)
            });
            let n = sample_count as f64;
            rows.push(ApproximationRow {
                a,
                b,
                mean_abs_error: stats.iter().map(|s| s.0).sum::<f64>() / n,
                disagreement_rate: stats.iter().filter(|s| s.1).count() as f64 / n,
            });
        }
    }
    Ok(rows)
}

/// `f64` that serialises infinities as `"inf"` / `"-inf"`.
mod finite_or_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            None => s.serialize_none(),
            Some(x) if x.is_infinite() => s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" }),
            Some(x) => s.serialize_f64(*x),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<Repr>::deserialize(d)? {
            None => Ok(None),
            Some(Repr::Num(x)) => Ok(Some(x)),
            Some(Repr::Str(s)) => match s.as_str() {
                "inf" => Ok(Some(f64::INFINITY)),
                "-inf" => Ok(Some(f64::NEG_INFINITY)),
                _ => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    fn of(xs: &[f64]) -> Self {
        let n = xs.len().max(1) as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        Self {
            mean,
            std: var.sqrt(),
            min: xs.iter().copied().fold(f64::INFINITY, f64::min),
            max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Structure of the learned weights. Diagonal statistics are reported only
/// for a square first layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightReport {
    pub n_in: usize,
    pub n_hidden: usize,
    /// `std / |mean|` of the first-layer weights, biases excluded, after
    /// flipping every hidden node whose incoming weights sum below zero.
    /// Negating a node's incoming weights, its bias and its output weight
    /// (and shifting the output bias) leaves the network function unchanged.
    #[serde(with = "finite_or_inf")]
    pub first_layer_cv: Option<f64>,
    /// Same statistic without sign canonicalisation.
    #[serde(with = "finite_or_inf")]
    pub first_layer_raw_cv: Option<f64>,
    /// Mean |diagonal| over mean |off-diagonal|.
    #[serde(with = "finite_or_inf")]
    pub diagonal_dominance_ratio: Option<f64>,
    pub diagonal_mean_abs: Option<f64>,
    pub off_diagonal_mean_abs: Option<f64>,
    pub first_layer: Summary,
    pub hidden_bias: Summary,
    pub output_weights: Summary,
    pub output_bias: f64,
}

fn cv(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let s = Summary::of(values);
    Some(if s.std == 0.0 {
        0.0
    } else if s.mean == 0.0 {
        f64::INFINITY
    } else {
        s.std / s.mean.abs()
    })
}

pub fn weight_report(model: &MlpModel) -> WeightReport {
    let (n, h) = (model.n_in, model.n_hidden);
    let first = &model.hidden_weights[..n * h];
    let first_layer = Summary::of(first);
    let signs: Vec<f64> = (0..h)
        .map(|j| if (0..n).map(|i| model.hidden_weight(i, j)).sum::<f64>() < 0.0 { -1.0 } else { 1.0 })
        .collect();
    let canonical: Vec<f64> = first.iter().enumerate().map(|(k, w)| w * signs[k % h]).collect();
    let first_layer_cv = cv(&canonical);
    let first_layer_raw_cv = cv(first);
    let (mut diag, mut off, mut ratio) = (None, None, None);
    if n == h && n > 0 {
        let d = (0..n).map(|i| model.hidden_weight(i, i).abs()).sum::<f64>() / n as f64;
        diag = Some(d);
        if n > 1 {
            let o = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| model.hidden_weight(i, j).abs())
                .sum::<f64>()
                / (n * (n - 1)) as f64;
            off = Some(o);
            ratio = Some(if o > 0.0 {
                d / o
            } else if d > 0.0 {
                f64::INFINITY
            } else {
                0.0
            });
        }
    }
    WeightReport {
        n_in: n,
        n_hidden: h,
        first_layer_cv,
        first_layer_raw_cv,
        diagonal_dominance_ratio: ratio,
        diagonal_mean_abs: diag,
        off_diagonal_mean_abs: off,
        first_layer,
        hidden_bias: Summary::of(&model.hidden_weights[n * h..]),
        output_weights: Summary::of(&model.output_weights[..h]),
        output_bias: model.output_weights[h],
    }
}

//! Traces, aggregates and the release-side preprocessing applied to them.
//!
//! A trace is a binary site × epoch matrix recording where one individual was
//! seen. Traces are sparse in practice, so [`TraceMatrix`] stores the sorted
//! row-major indices of its ones. Aggregates are dense.

mod io;

pub use io::{ingest_traces_csv, read_traces_csv, write_traces_csv};

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::mechanism::MechanismSpec;
use crate::rng::{self, domain};
use crate::{par, Error, Result};

/// Row-major flat index of cell `(site, epoch)`.
#[inline]
pub fn cell_index(epochs: usize, site: usize, epoch: usize) -> usize {
    site * epochs + epoch
}

/// A single individual's presence matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraceMatrix {
    sites: usize,
    epochs: usize,
    ones: Vec<u32>,
}

impl TraceMatrix {
    pub fn zeros(sites: usize, epochs: usize) -> Result<Self> {
        Self::from_ones(sites, epochs, Vec::new())
    }

    /// Build from row-major indices of the cells holding a one. Order does
    /// not matter; duplicates are rejected.
    pub fn from_ones(sites: usize, epochs: usize, mut ones: Vec<u32>) -> Result<Self> {
        check_dims(sites, epochs)?;
        let len = sites * epochs;
        ones.sort_unstable();
        if let Some(w) = ones.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid("ones", format!("duplicate cell index {}", w[0])));
        }
        if let Some(&last) = ones.last() {
            if last as usize >= len {
                return Err(Error::invalid(
                    "ones",
                    format!("cell index {last} outside a {sites}x{epochs} grid"),
                ));
            }
        }
        Ok(Self { sites, epochs, ones })
    }

    pub fn from_cells(sites: usize, epochs: usize, cells: &[(usize, usize)]) -> Result<Self> {
        let mut ones = Vec::with_capacity(cells.len());
        for &(l, e) in cells {
            if l >= sites || e >= epochs {
                return Err(Error::invalid(
                    "cells",
                    format!("({l}, {e}) outside a {sites}x{epochs} grid"),
                ));
            }
            ones.push(cell_index(epochs, l, e) as u32);
        }
        Self::from_ones(sites, epochs, ones)
    }

    /// Build from a dense row-major 0/1 slice.
    pub fn from_dense(sites: usize, epochs: usize, cells: &[u8]) -> Result<Self> {
        check_dims(sites, epochs)?;
        if cells.len() != sites * epochs {
            return Err(Error::invalid(
                "cells",
                format!("expected {} values, got {}", sites * epochs, cells.len()),
            ));
        }
        let mut ones = Vec::new();
        for (i, &v) in cells.iter().enumerate() {
            match v {
                0 => {}
                1 => ones.push(i as u32),
                other => {
                    return Err(Error::invalid("cells", format!("non-binary value {other}")))
                }
            }
        }
        Ok(Self { sites, epochs, ones })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn epochs(&self) -> usize {
        self.epochs
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.sites, self.epochs)
    }

    pub fn len(&self) -> usize {
        self.sites * self.epochs
    }

    pub fn is_empty(&self) -> bool {
        self.ones.is_empty()
    }

    /// Sorted row-major indices of the ones.
    pub fn ones(&self) -> &[u32] {
        &self.ones
    }

    pub fn count_ones(&self) -> usize {
        self.ones.len()
    }

    pub fn get(&self, site: usize, epoch: usize) -> bool {
        self.ones
            .binary_search(&(cell_index(self.epochs, site, epoch) as u32))
            .is_ok()
    }

    /// `(site, epoch)` of every one, in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let epochs = self.epochs;
        self.ones
            .iter()
            .map(move |&i| (i as usize / epochs, i as usize % epochs))
    }

    pub fn to_dense(&self) -> Vec<u8> {
        let mut dense = vec![0u8; self.len()];
        for &i in &self.ones {
            dense[i as usize] = 1;
        }
        dense
    }

    /// Number of ones in each epoch column.
    pub fn column_sums(&self) -> Vec<usize> {
        let mut sums = vec![0usize; self.epochs];
        for (_, e) in self.cells() {
            sums[e] += 1;
        }
        sums
    }

    /// Number of ones shared with `other`.
    pub fn overlap(&self, other: &TraceMatrix) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < self.ones.len() && j < other.ones.len() {
            match self.ones[i].cmp(&other.ones[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }
}

fn check_dims(sites: usize, epochs: usize) -> Result<()> {
    if sites == 0 || epochs == 0 {
        return Err(Error::invalid(
            "dims",
            format!("grid must be non-empty, got {sites}x{epochs}"),
        ));
    }
    Ok(())
}

fn check_same(expected: (usize, usize), found: (usize, usize)) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A non-empty, dimension-homogeneous list of traces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceDataset {
    sites: usize,
    epochs: usize,
    traces: Vec<TraceMatrix>,
}

impl TraceDataset {
    pub fn new(traces: Vec<TraceMatrix>) -> Result<Self> {
        let first = traces.first().ok_or(Error::NoTraces)?;
        let dims = first.dims();
        for t in &traces {
            check_same(dims, t.dims())?;
        }
        Ok(Self {
            sites: dims.0,
            epochs: dims.1,
            traces,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.sites, self.epochs)
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn traces(&self) -> &[TraceMatrix] {
        &self.traces
    }

    pub fn get(&self, i: usize) -> &TraceMatrix {
        &self.traces[i]
    }

    pub fn into_traces(self) -> Vec<TraceMatrix> {
        self.traces
    }

    /// Fraction of ones over all traces and cells.
    pub fn mean_density(&self) -> f64 {
        let ones: usize = self.traces.iter().map(TraceMatrix::count_ones).sum();
        ones as f64 / (self.len() * self.sites * self.epochs) as f64
    }

    /// Per-cell fraction of traces holding a one (row-major).
    pub fn cell_rates(&self) -> Vec<f64> {
        let agg = aggregate(self);
        let n = self.len() as f64;
        agg.cells().iter().map(|&c| c as f64 / n).collect()
    }

    /// Clip every trace to at most `clip_bound` ones per epoch, each trace
    /// using its own stream derived from `seed`.
    pub fn clipped(&self, clip_bound: usize, seed: u64) -> Result<Self> {
        let traces = par::map_indexed(self.len(), |i| {
            clip_with(&self.traces[i], clip_bound, &mut rng::stream(seed, domain::CLIP, i as u64))
        });
        Self::new(traces.into_iter().collect::<Result<Vec<_>>>()?)
    }
}

/// Cellwise count matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AggregateMatrix {
    sites: usize,
    epochs: usize,
    cells: Vec<u32>,
}

impl AggregateMatrix {
    pub fn zeros(sites: usize, epochs: usize) -> Self {
        Self {
            sites,
            epochs,
            cells: vec![0; sites * epochs],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.sites, self.epochs)
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    pub fn get(&self, site: usize, epoch: usize) -> u32 {
        self.cells[cell_index(self.epochs, site, epoch)]
    }

    pub fn add_trace(&mut self, trace: &TraceMatrix) -> Result<()> {
        check_same(self.dims(), trace.dims())?;
        for &i in trace.ones() {
            self.cells[i as usize] += 1;
        }
        Ok(())
    }

    /// Real-valued copy with no noise attached.
    pub fn to_noisy(&self) -> NoisyAggregate {
        NoisyAggregate {
            sites: self.sites,
            epochs: self.epochs,
            cells: self.cells.iter().map(|&c| c as f64).collect(),
            mechanism: None,
        }
    }
}

/// Cellwise sum of every trace in the dataset.
pub fn aggregate(dataset: &TraceDataset) -> AggregateMatrix {
    let (sites, epochs) = dataset.dims();
    let mut agg = AggregateMatrix::zeros(sites, epochs);
    for t in dataset.traces() {
        for &i in t.ones() {
            agg.cells[i as usize] += 1;
        }
    }
    agg
}

/// Cellwise sum of an arbitrary collection of traces on a fixed grid.
pub fn aggregate_traces<'a>(
    sites: usize,
    epochs: usize,
    traces: impl IntoIterator<Item = &'a TraceMatrix>,
) -> Result<AggregateMatrix> {
    let mut agg = AggregateMatrix::zeros(sites, epochs);
    for t in traces {
        agg.add_trace(t)?;
    }
    Ok(agg)
}

/// Released (noisy) aggregate.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisyAggregate {
    sites: usize,
    epochs: usize,
    cells: Vec<f64>,
    mechanism: Option<MechanismSpec>,
}

impl NoisyAggregate {
    pub fn new(
        sites: usize,
        epochs: usize,
        cells: Vec<f64>,
        mechanism: Option<MechanismSpec>,
    ) -> Result<Self> {
        check_dims(sites, epochs)?;
        if cells.len() != sites * epochs {
            return Err(Error::invalid(
                "cells",
                format!("expected {} values, got {}", sites * epochs, cells.len()),
            ));
        }
        Ok(Self {
            sites,
            epochs,
            cells,
            mechanism,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.sites, self.epochs)
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn get(&self, site: usize, epoch: usize) -> f64 {
        self.cells[cell_index(self.epochs, site, epoch)]
    }

    pub fn mechanism(&self) -> Option<&MechanismSpec> {
        self.mechanism.as_ref()
    }

    /// `self − background`, cellwise.
    pub fn residual(&self, background: &AggregateMatrix) -> Result<NoisyAggregate> {
        check_same(self.dims(), background.dims())?;
        let cells = self
            .cells
            .iter()
            .zip(background.cells())
            .map(|(&a, &b)| a - b as f64)
            .collect();
        Ok(Self {
            cells,
            ..self.clone()
        })
    }
}

/// Values of a released aggregate at the target's positive observations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservationVector {
    pub values: Vec<f64>,
    pub cells: Vec<(usize, usize)>,
}

impl ObservationVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Values of `agg` at the cells where `z` is one, in row-major order.
pub fn positive_observations(agg: &NoisyAggregate, z: &TraceMatrix) -> Result<ObservationVector> {
    check_same(agg.dims(), z.dims())?;
    Ok(ObservationVector {
        values: z.ones().iter().map(|&i| agg.cells[i as usize]).collect(),
        cells: z.cells().collect(),
    })
}

/// Values of `agg − background` at the cells where `z` is one.
pub fn residual_observations(
    agg: &NoisyAggregate,
    background: &AggregateMatrix,
    z: &TraceMatrix,
) -> Result<Vec<f64>> {
    check_same(agg.dims(), z.dims())?;
    check_same(background.dims(), z.dims())?;
    Ok(z.ones()
        .iter()
        .map(|&i| agg.cells[i as usize] - background.cells[i as usize] as f64)
        .collect())
}

/// Limit each epoch column to at most `clip_bound` ones, dropping surplus
/// ones uniformly at random.
pub fn clip_trace(trace: &TraceMatrix, clip_bound: usize, seed: u64) -> Result<TraceMatrix> {
    clip_with(trace, clip_bound, &mut rng::seeded(seed))
}

pub fn clip_with(
    trace: &TraceMatrix,
    clip_bound: usize,
    rng: &mut impl rand::Rng,
) -> Result<TraceMatrix> {
    if clip_bound == 0 {
        return Err(Error::invalid("clip_bound", "must be at least 1"));
    }
    let mut columns: Vec<Vec<u32>> = vec![Vec::new(); trace.epochs];
    for &i in trace.ones() {
        columns[i as usize % trace.epochs].push(i);
    }
    let mut ones = Vec::with_capacity(trace.ones.len());
    for mut column in columns {
        if column.len() > clip_bound {
            column.shuffle(rng);
            column.truncate(clip_bound);
        }
        ones.extend(column);
    }
    ones.sort_unstable();
    Ok(TraceMatrix {
        sites: trace.sites,
        epochs: trace.epochs,
        ones,
    })
}

/// Draw `n` traces with independent Bernoulli(`rates[cell]`) cells.
pub fn generate_synthetic_traces(
    sites: usize,
    epochs: usize,
    rates: &[f64],
    n: usize,
    seed: u64,
) -> Result<TraceDataset> {
    check_dims(sites, epochs)?;
    if rates.len() != sites * epochs {
        return Err(Error::invalid(
            "rates",
            format!("expected {} values, got {}", sites * epochs, rates.len()),
        ));
    }
    if let Some(bad) = rates.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(Error::invalid("rates", format!("rate {bad} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::NoTraces);
    }
    let traces = par::map_indexed(n, |i| {
        let mut rng = rng::stream(seed, domain::SYNTHETIC, i as u64);
        let ones = rates
            .iter()
            .enumerate()
            .filter(|(_, &r)| rng.random::<f64>() < r)
            .map(|(c, _)| c as u32)
            .collect();
        TraceMatrix {
            sites,
            epochs,
            ones,
        }
    });
    TraceDataset::new(traces)
}

/// Part sizes for `split_dataset`: floor each share, then hand the remainder
/// to the earliest parts one at a time.
pub fn split_sizes(n: usize, fractions: &[f64]) -> Result<Vec<usize>> {
    if fractions.is_empty() {
        return Err(Error::invalid("fractions", "at least one part is required"));
    }
    if fractions.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
        return Err(Error::invalid("fractions", "weights must be positive"));
    }
    let total: f64 = fractions.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("fractions", format!("weights sum to {total}, not 1")));
    }
    if fractions.len() > n {
        return Err(Error::InsufficientTraces {
            needed: fractions.len(),
            available: n,
        });
    }
    let mut sizes: Vec<usize> = fractions
        .iter()
        .map(|&w| (w * n as f64 + 1e-9).floor() as usize)
        .collect();
    let assigned: usize = sizes.iter().sum();
    for s in sizes.iter_mut().take(n.saturating_sub(assigned)) {
        *s += 1;
    }
    Ok(sizes)
}

/// Shuffle and cut the dataset into disjoint parts with the given weights.
pub fn split_dataset(
    dataset: &TraceDataset,
    fractions: &[f64],
    seed: u64,
) -> Result<Vec<TraceDataset>> {
    let sizes = split_sizes(dataset.len(), fractions)?;
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    order.shuffle(&mut rng::stream(seed, domain::SPLIT, 0));
    let mut parts = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for size in sizes {
        let traces = order[start..start + size]
            .iter()
            .map(|&i| dataset.traces[i].clone())
            .collect();
        parts.push(TraceDataset::new(traces)?);
        start += size;
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trace(sites: usize, epochs: usize, cells: &[(usize, usize)]) -> TraceMatrix {
        TraceMatrix::from_cells(sites, epochs, cells).unwrap()
    }

    #[test]
    fn clip_reduces_crowded_column_to_bound() {
        let t = trace(3, 2, &[(0, 0), (1, 0), (2, 0), (1, 1)]);
        for seed in 0..20 {
            let c = clip_trace(&t, 1, seed).unwrap();
            assert_eq!(c.column_sums(), vec![1, 1]);
            assert!(c.get(1, 1));
        }
    }

    #[test]
    fn clip_leaves_compliant_and_empty_traces() {
        let t = trace(3, 2, &[(0, 0), (2, 1)]);
        assert_eq!(clip_trace(&t, 1, 9).unwrap(), t);
        let z = TraceMatrix::zeros(4, 4).unwrap();
        assert_eq!(clip_trace(&z, 2, 9).unwrap(), z);
        assert!(clip_trace(&t, 0, 9).is_err());
    }

    #[test]
    fn clip_drops_uniformly() {
        let t = trace(3, 1, &[(0, 0), (1, 0), (2, 0)]);
        let mut kept = [0usize; 3];
        for seed in 0..3000 {
            let c = clip_trace(&t, 1, seed).unwrap();
            kept[c.cells().next().unwrap().0] += 1;
        }
        for k in kept {
            assert!((k as f64 / 3000.0 - 1.0 / 3.0).abs() < 0.04, "{kept:?}");
        }
    }

    #[test]
    fn aggregate_sums_cellwise() {
        let a = trace(2, 2, &[(0, 0)]);
        let ds = TraceDataset::new(vec![a.clone(), a.clone()]).unwrap();
        let agg = aggregate(&ds);
        assert_eq!(agg.cells(), &[2, 0, 0, 0]);

        let single = TraceDataset::new(vec![trace(2, 2, &[(0, 1), (1, 0)])]).unwrap();
        assert_eq!(aggregate(&single).cells(), &[0, 1, 1, 0]);

        let zeros = TraceDataset::new(vec![TraceMatrix::zeros(2, 2).unwrap(); 5]).unwrap();
        assert_eq!(aggregate(&zeros).cells(), &[0; 4]);
    }

    #[test]
    fn mixed_dimensions_are_rejected() {
        let res = TraceDataset::new(vec![
            TraceMatrix::zeros(2, 2).unwrap(),
            TraceMatrix::zeros(2, 3).unwrap(),
        ]);
        assert!(matches!(res, Err(Error::DimensionMismatch { .. })));
        assert!(matches!(TraceDataset::new(vec![]), Err(Error::NoTraces)));
    }

    #[test]
    fn synthetic_extreme_rates() {
        let zeros = generate_synthetic_traces(2, 3, &[0.0; 6], 10, 1).unwrap();
        assert!(zeros.traces().iter().all(TraceMatrix::is_empty));
        let ones = generate_synthetic_traces(2, 3, &[1.0; 6], 10, 1).unwrap();
        assert!(ones.traces().iter().all(|t| t.count_ones() == 6));
        assert!(generate_synthetic_traces(2, 3, &[1.5; 6], 10, 1).is_err());
        assert!(generate_synthetic_traces(2, 3, &[0.5; 5], 10, 1).is_err());
    }

    #[test]
    fn synthetic_density_matches_rate() {
        let ds = generate_synthetic_traces(4, 5, &[0.01; 20], 10_000, 3).unwrap();
        for rate in ds.cell_rates() {
            assert!((rate - 0.01).abs() < 0.005, "{rate}");
        }
        let again = generate_synthetic_traces(4, 5, &[0.01; 20], 10_000, 3).unwrap();
        assert_eq!(ds, again);
    }

    #[test]
    fn split_sizes_follow_rounding_rule() {
        assert_eq!(split_sizes(7896, &[0.5, 0.5]).unwrap(), vec![3948, 3948]);
        assert_eq!(split_sizes(10, &[0.3, 0.7]).unwrap(), vec![3, 7]);
        assert_eq!(split_sizes(10, &[1.0]).unwrap(), vec![10]);
        assert_eq!(split_sizes(10, &[1.0 / 3.0; 3]).unwrap(), vec![4, 3, 3]);
        assert!(split_sizes(2, &[0.25; 4]).is_err());
        assert!(split_sizes(10, &[0.5, 0.4]).is_err());
        assert!(split_sizes(10, &[1.5, -0.5]).is_err());
    }

    #[test]
    fn split_identity_keeps_all_traces() {
        let ds = generate_synthetic_traces(2, 2, &[0.5; 4], 12, 5).unwrap();
        let parts = split_dataset(&ds, &[1.0], 1).unwrap();
        let mut a: Vec<_> = parts[0].traces().to_vec();
        let mut b: Vec<_> = ds.traces().to_vec();
        a.sort_by(|x, y| x.ones().cmp(y.ones()));
        b.sort_by(|x, y| x.ones().cmp(y.ones()));
        assert_eq!(a, b);
    }

    #[test]
    fn positive_observations_follow_target_cells() {
        let agg = NoisyAggregate::new(3, 4, (0..12).map(|v| v as f64 * 0.5).collect(), None)
            .unwrap();
        let empty = TraceMatrix::zeros(3, 4).unwrap();
        assert!(positive_observations(&agg, &empty).unwrap().is_empty());
        let single = trace(3, 4, &[(2, 3)]);
        let obs = positive_observations(&agg, &single).unwrap();
        assert_eq!(obs.values, vec![agg.get(2, 3)]);
        assert_eq!(obs.cells, vec![(2, 3)]);
        let wrong = TraceMatrix::zeros(4, 3).unwrap();
        assert!(positive_observations(&agg, &wrong).is_err());
    }

    #[test]
    fn sixty_ones_give_sixty_observations() {
        let cells: Vec<_> = (0..60).map(|e| (e % 3, e)).collect();
        let z = trace(3, 80, &cells);
        let agg = AggregateMatrix::zeros(3, 80).to_noisy();
        assert_eq!(positive_observations(&agg, &z).unwrap().len(), 60);
    }

    fn arb_trace(sites: usize, epochs: usize) -> impl Strategy<Value = TraceMatrix> {
        proptest::collection::vec(0u8..2, sites * epochs)
            .prop_map(move |d| TraceMatrix::from_dense(sites, epochs, &d).unwrap())
    }

    proptest! {
        #[test]
        fn clip_bounds_columns_and_is_idempotent(t in arb_trace(5, 4), c in 1usize..4, seed: u64) {
            let once = clip_trace(&t, c, seed).unwrap();
            prop_assert!(once.column_sums().iter().all(|&s| s <= c));
            prop_assert!(once.overlap(&t) == once.count_ones());
            let twice = clip_trace(&once, c, seed.wrapping_add(1)).unwrap();
            prop_assert_eq!(&once, &twice);
        }

        #[test]
        fn adding_target_shifts_aggregate_by_target(
            base in proptest::collection::vec(arb_trace(3, 3), 1..6),
            z in arb_trace(3, 3),
            noise in proptest::collection::vec(-5.0f64..5.0, 9),
        ) {
            let without = aggregate(&TraceDataset::new(base.clone()).unwrap());
            let mut with = base.clone();
            with.push(z.clone());
            let with = aggregate(&TraceDataset::new(with).unwrap());
            let dense = z.to_dense();
            for i in 0..9 {
                prop_assert_eq!(with.cells()[i] - without.cells()[i], dense[i] as u32);
            }
            let perturb = |a: &AggregateMatrix| {
                let cells = a.cells().iter().zip(&noise).map(|(&c, &x)| c as f64 + x).collect();
                NoisyAggregate::new(3, 3, cells, None).unwrap()
            };
            let hi = positive_observations(&perturb(&with), &z).unwrap();
            let lo = positive_observations(&perturb(&without), &z).unwrap();
            for (h, l) in hi.values.iter().zip(&lo.values) {
                prop_assert!((h - l - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn split_parts_partition_input(n in 1usize..60, parts in 1usize..5, seed: u64) {
            prop_assume!(parts <= n);
            let ds = TraceDataset::new(
                (0..n).map(|i| TraceMatrix::from_ones(8, 8, vec![i as u32]).unwrap()).collect(),
            ).unwrap();
            let w = vec![1.0 / parts as f64; parts];
            let split = split_dataset(&ds, &w, seed).unwrap();
            let mut seen: Vec<u32> = split.iter().flat_map(|p| p.traces().iter().map(|t| t.ones()[0])).collect();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..n as u32).collect::<Vec<_>>());
        }
    }
}

//! Shadow aggregates: labelled stand-ins for the release, built from the
//! attacker's auxiliary traces.

use rand::seq::index;

use crate::mechanism::MechanismSpec;
use crate::trace::{AggregateMatrix, NoisyAggregate, TraceDataset, TraceMatrix};
use crate::{par, rng, Error, Result};

/// `m` aggregates; the first `⌊m/2⌋` contain the target.
#[derive(Clone, Debug)]
pub struct ShadowSet {
    pub aggregates: Vec<NoisyAggregate>,
    pub labels: Vec<u8>,
    pub target: TraceMatrix,
}

/// Positive observations of every shadow aggregate, split by label. Row `i`
/// of `member` holds the values at `cells` (row-major) of the i-th member.
#[derive(Clone, Debug, Default)]
pub struct ShadowObservations {
    pub cells: Vec<(usize, usize)>,
    pub member: Vec<Vec<f64>>,
    pub nonmember: Vec<Vec<f64>>,
}

impl ShadowObservations {
    /// Features and 0/1 labels, members first.
    pub fn labelled(&self) -> (Vec<&[f64]>, Vec<f64>) {
        let rows = self
            .member
            .iter()
            .chain(&self.nonmember)
            .map(Vec::as_slice)
            .collect();
        let labels = std::iter::repeat_n(1.0, self.member.len())
            .chain(std::iter::repeat_n(0.0, self.nonmember.len()))
            .collect();
        (rows, labels)
    }
}

impl ShadowSet {
    pub fn len(&self) -> usize {
        self.aggregates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aggregates.is_empty()
    }

    pub fn members(&self) -> impl Iterator<Item = &NoisyAggregate> {
        self.aggregates
            .iter()
            .zip(&self.labels)
            .filter(|(_, &l)| l == 1)
            .map(|(a, _)| a)
    }

    pub fn nonmembers(&self) -> impl Iterator<Item = &NoisyAggregate> {
        self.aggregates
            .iter()
            .zip(&self.labels)
            .filter(|(_, &l)| l == 0)
            .map(|(a, _)| a)
    }

    pub fn observations(&self) -> ShadowObservations {
        let rows = |aggs: Vec<&NoisyAggregate>| -> Vec<Vec<f64>> {
            aggs.into_iter()
                .map(|a| {
                    self.target
                        .ones()
                        .iter()
                        .map(|&i| a.cells()[i as usize])
                        .collect()
                })
                .collect()
        };
        ShadowObservations {
            cells: self.target.cells().collect(),
            member: rows(self.members().collect()),
            nonmember: rows(self.nonmembers().collect()),
        }
    }
}

/// Number of traces an attacker knowing a fraction `theta` of the release
/// has to sample for each shadow.
pub fn shadow_sample_size(n: usize, theta: f64) -> usize {
    (n as f64 * (1.0 - theta)).round() as usize
}

/// Clean shadow aggregate: `sample_size` auxiliary traces drawn without
/// replacement, plus the target for members.
pub fn shadow_clean(
    aux: &TraceDataset,
    sample_size: usize,
    member: bool,
    z: &TraceMatrix,
    rng: &mut impl rand::Rng,
) -> AggregateMatrix {
    let (sites, epochs) = z.dims();
    let mut agg = AggregateMatrix::zeros(sites, epochs);
    if sample_size > 0 {
        for i in index::sample(rng, aux.len(), sample_size) {
            agg.add_trace(aux.get(i)).expect("aux matches target grid");
        }
    }
    if member {
        agg.add_trace(z).expect("checked by caller");
    }
    agg
}

pub(crate) fn validate_shadow_inputs(
    aux: Option<&TraceDataset>,
    sample_size: usize,
    theta: f64,
    m: usize,
    z: &TraceMatrix,
) -> Result<()> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::invalid("theta", format!("must lie in [0, 1], got {theta}")));
    }
    if m < 2 {
        return Err(Error::invalid("m", "need at least two shadows (one per class)"));
    }
    let available = aux.map_or(0, TraceDataset::len);
    if sample_size > available {
        return Err(Error::InsufficientTraces {
            needed: sample_size,
            available,
        });
    }
    if let Some(aux) = aux {
        if aux.dims() != z.dims() {
            return Err(Error::DimensionMismatch {
                expected: z.dims(),
                found: aux.dims(),
            });
        }
    }
    Ok(())
}

/// Build `m` perturbed shadow aggregates. Each aggregate sums
/// `round(n (1 − θ))` auxiliary traces; the first `⌊m/2⌋` also contain `z`.
/// `aux` must not contain the target individual.
pub fn generate_shadow_set(
    aux: &TraceDataset,
    n: usize,
    theta: f64,
    m: usize,
    z: &TraceMatrix,
    mech: &MechanismSpec,
    seed: u64,
) -> Result<ShadowSet> {
    let sample_size = shadow_sample_size(n, theta);
    validate_shadow_inputs(Some(aux), sample_size, theta, m, z)?;
    let members = m / 2;
    let aggregates = par::map_indexed(m, |i| {
        let mut rng = rng::stream(seed, rng::domain::SHADOW, i as u64);
        let clean = shadow_clean(aux, sample_size, i < members, z, &mut rng);
        crate::mechanism::perturb_with(&clean, mech, &mut rng)
    });
    let labels = (0..m).map(|i| u8::from(i < members)).collect();
    Ok(ShadowSet {
        aggregates,
        labels,
        target: z.clone(),
    })
}

/// Positive observations of `m` shadows without keeping whole aggregates.
/// Equal to `generate_shadow_set(..).observations()` for the same arguments.
pub fn shadow_observations(
    aux: &TraceDataset,
    n: usize,
    theta: f64,
    m: usize,
    z: &TraceMatrix,
    mech: &MechanismSpec,
    seed: u64,
) -> Result<ShadowObservations> {
    let sample_size = shadow_sample_size(n, theta);
    validate_shadow_inputs(Some(aux), sample_size, theta, m, z)?;
    let members = m / 2;
    let mut rows = par::map_indexed(m, |i| {
        let mut rng = rng::stream(seed, rng::domain::SHADOW, i as u64);
        let clean = shadow_clean(aux, sample_size, i < members, z, &mut rng);
        let noisy = crate::mechanism::perturb_with(&clean, mech, &mut rng);
        z.ones().iter().map(|&c| noisy.cells()[c as usize]).collect::<Vec<f64>>()
    });
    let nonmember = rows.split_off(members);
    Ok(ShadowObservations {
        cells: z.cells().collect(),
        member: rows,
        nonmember,
    })
}

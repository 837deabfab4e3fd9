//! Control sets, partial queries and Monte-Carlo expectations over the
//! randomly sampled complement coordinates.
//!
//! Variable and set indices are 0-based throughout the library; the harness
//! converts to 1-based numbering at the file boundary.

use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Sampling law of one uncontrolled variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputDistribution {
    Uniform,
    TruncatedNormal(TruncatedNormal),
}

/// Normal law with the given pre-truncation mean and variance, restricted to
/// `[0, 1]`, sampled by inverse CDF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedNormal {
    mean: f64,
    sd: f64,
    lo: f64,
    hi: f64,
}

fn standard_normal() -> Normal {
    Normal::standard()
}

impl TruncatedNormal {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !(mean.is_finite() && variance.is_finite() && variance > 0.0) {
            return Err(Error::config(format!(
                "truncated normal needs finite mean and positive variance, got ({mean}, {variance})"
            )));
        }
        let sd = variance.sqrt();
        let n = standard_normal();
        let lo = n.cdf((0.0 - mean) / sd);
        let hi = n.cdf((1.0 - mean) / sd);
        if !(hi > lo) {
            return Err(Error::config(format!(
                "truncated normal ({mean}, {variance}) has no mass in [0, 1]"
            )));
        }
        Ok(TruncatedNormal { mean, sd, lo, hi })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.sd * self.sd
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let p = self.lo + u * (self.hi - self.lo);
        let z = standard_normal().inverse_cdf(p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON));
        (self.mean + self.sd * z).clamp(0.0, 1.0)
    }
}

impl InputDistribution {
    pub fn truncated_normal(mean: f64, variance: f64) -> Result<Self> {
        TruncatedNormal::new(mean, variance).map(InputDistribution::TruncatedNormal)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            InputDistribution::Uniform => rng.random(),
            InputDistribution::TruncatedNormal(t) => t.sample(rng),
        }
    }
}

/// One control set `I_i` and its complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlSet {
    controlled: Vec<usize>,
    complement: Vec<usize>,
}

impl ControlSet {
    pub fn controlled(&self) -> &[usize] {
        &self.controlled
    }

    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    pub fn size(&self) -> usize {
        self.controlled.len()
    }

    pub fn is_full(&self) -> bool {
        self.complement.is_empty()
    }

    pub fn is_subset_of(&self, other: &ControlSet) -> bool {
        self.controlled.iter().all(|i| other.controlled.contains(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlSetFamily {
    dim: usize,
    sets: Vec<ControlSet>,
    distributions: Vec<InputDistribution>,
}

impl ControlSetFamily {
    /// `sets` holds 0-based variable indices; order within a set is
    /// normalized to ascending.
    pub fn new(
        dim: usize,
        sets: Vec<Vec<usize>>,
        distributions: Vec<InputDistribution>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("query dimension must be at least 1"));
        }
        if sets.is_empty() {
            return Err(Error::config("a control-set family needs at least one set"));
        }
        if distributions.len() != dim {
            return Err(Error::config(format!(
                "{} input distributions for a {dim}-dimensional query",
                distributions.len()
            )));
        }
        let mut out = Vec::with_capacity(sets.len());
        for (k, mut set) in sets.into_iter().enumerate() {
            set.sort_unstable();
            if let Some(&bad) = set.iter().find(|&&v| v >= dim) {
                return Err(Error::config(format!(
                    "control set {} names variable {} outside 1..={dim}",
                    k + 1,
                    bad + 1
                )));
            }
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::config(format!(
                    "control set {} repeats a variable",
                    k + 1
                )));
            }
            let complement = (0..dim).filter(|v| set.binary_search(v).is_err()).collect();
            out.push(ControlSet {
                controlled: set,
                complement,
            });
        }
        Ok(ControlSetFamily {
            dim,
            sets: out,
            distributions,
        })
    }

    /// Every variable follows the same distribution.
    pub fn with_shared_distribution(
        dim: usize,
        sets: Vec<Vec<usize>>,
        distribution: InputDistribution,
    ) -> Result<Self> {
        Self::new(dim, sets, vec![distribution; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[ControlSet] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> Result<&ControlSet> {
        self.sets.get(i).ok_or(Error::UnknownSet {
            index: i,
            count: self.sets.len(),
        })
    }

    pub fn distributions(&self) -> &[InputDistribution] {
        &self.distributions
    }

    /// `[x^i, x^{-i}]` placed by variable index.
    pub fn assemble(&self, pq: &PartialQuery, complement: &[f64]) -> Result<Vec<f64>> {
        let set = self.set(pq.set)?;
        if pq.values.len() != set.controlled.len() {
            return Err(Error::DimensionMismatch {
                expected: set.controlled.len(),
                got: pq.values.len(),
            });
        }
        if complement.len() != set.complement.len() {
            return Err(Error::DimensionMismatch {
                expected: set.complement.len(),
                got: complement.len(),
            });
        }
        let mut x = vec![0.0; self.dim];
        assemble_into(set, &pq.values, complement, &mut x);
        Ok(x)
    }

    /// Splits a full query into its control and random partial queries.
    pub fn decompose(&self, i: usize, x: &[f64]) -> Result<(PartialQuery, Vec<f64>)> {
        let set = self.set(i)?;
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let values = set.controlled.iter().map(|&v| x[v]).collect();
        let complement = set.complement.iter().map(|&v| x[v]).collect();
        Ok((PartialQuery { set: i, values }, complement))
    }

    /// Independent draws for the complement coordinates of set `i`.
    pub fn sample_complement<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> Result<Vec<f64>> {
        let set = self.set(i)?;
        Ok(set
            .complement
            .iter()
            .map(|&v| self.distributions[v].sample(rng))
            .collect())
    }
}

/// Stream key from a variable-index list, so sets with the same content draw
/// the same random numbers.
pub fn index_key(indices: &[usize]) -> u64 {
    indices
        .iter()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, &v| (h ^ (v as u64 + 1)).wrapping_mul(0x100_0000_01b3))
}

pub(crate) fn assemble_into(set: &ControlSet, values: &[f64], complement: &[f64], out: &mut [f64]) {
    for (&v, &x) in set.controlled.iter().zip(values) {
        out[v] = x;
    }
    for (&v, &x) in set.complement.iter().zip(complement) {
        out[v] = x;
    }
}

/// Control partial query `x^i` for set `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialQuery {
    pub set: usize,
    pub values: Vec<f64>,
}

impl PartialQuery {
    pub fn new(family: &ControlSetFamily, set: usize, values: Vec<f64>) -> Result<Self> {
        let s = family.set(set)?;
        if values.len() != s.size() {
            return Err(Error::DimensionMismatch {
                expected: s.size(),
                got: values.len(),
            });
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::OutOfDomain { index, value });
        }
        Ok(PartialQuery { set, values })
    }
}

/// Pre-drawn complement samples for every control set, shared by all
/// candidates of one acquisition solve.
///
/// A set with an empty complement gets a single (empty) row, which makes its
/// expectation an exact point evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct McSampleBank {
    samples: usize,
    seed: u64,
    pub(crate) rows: Vec<Vec<f64>>,
}

impl McSampleBank {
    pub fn draw(family: &ControlSetFamily, samples: usize, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::config("Monte-Carlo sample count must be at least 1"));
        }
        let rows = (0..family.len())
            .map(|i| {
                let set = &family.sets[i];
                if set.is_full() {
                    return Vec::new();
                }
                let mut rng = stream_rng(seed, Stream::SampleBank, index_key(&set.complement));
                let mut flat = Vec::with_capacity(samples * set.complement.len());
                for _ in 0..samples {
                    for &v in &set.complement {
                        flat.push(family.distributions[v].sample(&mut rng));
                    }
                }
                flat
            })
            .collect();
        Ok(McSampleBank {
            samples,
            seed,
            rows,
        })
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn covers(&self, i: usize) -> bool {
        i < self.rows.len()
    }

    /// Rows used for set `i`: `samples` rows, or one empty row for a full set.
    pub fn rows_for(&self, family: &ControlSetFamily, i: usize) -> Vec<&[f64]> {
        let width = family.sets[i].complement.len();
        if width == 0 {
            vec![&[][..]]
        } else {
            self.rows[i].chunks_exact(width).collect()
        }
    }

    /// Number of rows used for set `i`.
    pub fn effective_samples(&self, family: &ControlSetFamily, i: usize) -> usize {
        if family.sets[i].is_full() {
            1
        } else {
            self.samples
        }
    }

    /// Appends the assembled full queries of `values` against every row of
    /// set `i` to `out` (row-major).
    pub(crate) fn extend_assembled(
        &self,
        family: &ControlSetFamily,
        i: usize,
        values: &[f64],
        out: &mut Vec<f64>,
    ) {
        let set = &family.sets[i];
        let d = family.dim;
        for row in self.rows_for(family, i) {
            let start = out.len();
            out.resize(start + d, 0.0);
            assemble_into(set, values, row, &mut out[start..]);
        }
    }
}

/// `(1/S)·Σ_s g([x^i, X_s^{-i}])` over the bank rows of set `pq.set`.
pub fn expected_value<G>(
    g: G,
    family: &ControlSetFamily,
    pq: &PartialQuery,
    bank: &McSampleBank,
) -> Result<f64>
where
    G: Fn(&[f64]) -> f64,
{
    let set = family.set(pq.set)?;
    if !bank.covers(pq.set) {
        return Err(Error::config(format!("sample bank does not cover set {}", pq.set + 1)));
    }
    if pq.values.len() != set.size() {
        return Err(Error::DimensionMismatch {
            expected: set.size(),
            got: pq.values.len(),
        });
    }
    let mut x = vec![0.0; family.dim];
    let rows = bank.rows_for(family, pq.set);
    let n = rows.len() as f64;
    let mut sum = 0.0;
    for row in &rows {
        assemble_into(set, &pq.values, row, &mut x);
        sum += g(&x);
    }
    Ok(if rows.len() == 1 { sum } else { sum / n })
}

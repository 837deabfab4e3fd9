//! Derivative-free maximization of expected confidence bounds over the
//! control partial queries of a set.
//!
//! A solve scores `N₀` shifted-Halton candidates plus the projections of
//! the best observed queries, then runs `R` rounds of coordinate moves whose
//! step shrinks geometrically. All candidates of one solve share the same
//! sample bank, so scores are comparable and the whole solve is a pure
//! function of its inputs.

use crate::error::{Error, Result};
use crate::gp::GaussianProcess;
use crate::lowdisc::shifted_halton;
use crate::query::{index_key, ControlSetFamily, InputDistribution, McSampleBank, PartialQuery};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, PartialEq)]
pub struct AcquisitionSpec {
    /// Quasi-random starting candidates `N₀`.
    pub candidates: usize,
    /// Coordinate-search rounds `R`.
    pub refine_rounds: usize,
    pub initial_step: f64,
    pub shrink: f64,
    /// Best observed queries injected into the candidate pool.
    pub incumbents: usize,
}

impl Default for AcquisitionSpec {
    fn default() -> Self {
        AcquisitionSpec {
            candidates: 256,
            refine_rounds: 10,
            initial_step: 0.25,
            shrink: 0.5,
            incumbents: 16,
        }
    }
}

impl AcquisitionSpec {
    pub fn validate(&self) -> Result<()> {
        if self.candidates == 0 {
            return Err(Error::config("acquisition needs at least one candidate"));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::config(format!("step shrink {} must lie in (0, 1)", self.shrink)));
        }
        if !(self.initial_step > 0.0 && self.initial_step <= 1.0) {
            return Err(Error::config(format!(
                "initial step {} must lie in (0, 1]",
                self.initial_step
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Upper,
    Lower,
}

/// The best partial query found and its expected score under the bank.
#[derive(Debug, Clone, PartialEq)]
pub struct Maximizer {
    pub pq: PartialQuery,
    pub value: f64,
}

/// Upper- and lower-bound maximizers of one set, from a shared candidate pool.
#[derive(Debug, Clone, PartialEq)]
pub struct SetSolution {
    pub upper: Maximizer,
    pub lower: Maximizer,
}

impl SetSolution {
    pub fn get(&self, kind: BoundKind) -> &Maximizer {
        match kind {
            BoundKind::Upper => &self.upper,
            BoundKind::Lower => &self.lower,
        }
    }
}

/// Expected posterior mean and expected posterior sd per candidate.
fn expected_moments(
    gp: &GaussianProcess,
    family: &ControlSetFamily,
    i: usize,
    bank: &McSampleBank,
    candidates: &[Vec<f64>],
) -> Vec<(f64, f64)> {
    let rows = bank.effective_samples(family, i);
    let mut points = Vec::with_capacity(candidates.len() * rows * family.dim());
    for c in candidates {
        bank.extend_assembled(family, i, c, &mut points);
    }
    let mut means = Vec::with_capacity(candidates.len() * rows);
    let mut vars = Vec::with_capacity(candidates.len() * rows);
    gp.moments_unchecked(&points, &mut means, &mut vars);
    let s = rows as f64;
    means
        .chunks_exact(rows)
        .zip(vars.chunks_exact(rows))
        .map(|(m, v)| {
            let em: f64 = m.iter().sum();
            let es: f64 = v.iter().map(|v| v.sqrt()).sum();
            (em / s, es / s)
        })
        .collect()
}

fn bound(kind: BoundKind, beta: f64, (mean, sd): (f64, f64)) -> f64 {
    match kind {
        BoundKind::Upper => mean + beta * sd,
        BoundKind::Lower => mean - beta * sd,
    }
}

/// Shifted-Halton candidates for set `i` plus the extra starting points.
fn candidate_pool(
    family: &ControlSetFamily,
    i: usize,
    spec: &AcquisitionSpec,
    seed: u64,
    extra: Vec<Vec<f64>>,
) -> Vec<Vec<f64>> {
    let width = family.sets()[i].size();
    if width == 0 {
        return vec![Vec::new()];
    }
    let mut rng = stream_rng(seed, Stream::Candidates, index_key(family.sets()[i].controlled()));
    let mut pool = shifted_halton(spec.candidates, width, &mut rng);
    pool.extend(extra);
    pool
}

/// Projections of the `k` highest-target observations onto set `i`.
fn incumbents(gp: &GaussianProcess, family: &ControlSetFamily, i: usize, k: usize) -> Vec<Vec<f64>> {
    if k == 0 || gp.is_empty() {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..gp.len()).collect();
    let ys = gp.targets();
    order.sort_by(|&a, &b| ys[b].total_cmp(&ys[a]).then(a.cmp(&b)));
    let set = &family.sets()[i];
    order
        .into_iter()
        .take(k)
        .map(|j| {
            let x = gp.input(j);
            set.controlled().iter().map(|&v| x[v]).collect()
        })
        .collect()
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (j, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = j;
        }
    }
    best
}

/// Coordinate search from `start`; one batch of `±step` moves per round,
/// moving to the best strictly improving neighbour.
fn refine<F>(start: Vec<f64>, start_value: f64, spec: &AcquisitionSpec, score: &mut F) -> (Vec<f64>, f64)
where
    F: FnMut(&[Vec<f64>]) -> Vec<f64>,
{
    let mut x = start;
    let mut value = start_value;
    if x.is_empty() {
        return (x, value);
    }
    let mut step = spec.initial_step;
    for _ in 0..spec.refine_rounds {
        let mut moves = Vec::with_capacity(2 * x.len());
        for j in 0..x.len() {
            for dir in [-1.0, 1.0] {
                let v = (x[j] + dir * step).clamp(0.0, 1.0);
                if v != x[j] {
                    let mut y = x.clone();
                    y[j] = v;
                    moves.push(y);
                }
            }
        }
        if !moves.is_empty() {
            let scores = score(&moves);
            let best = argmax(&scores);
            if scores[best] > value {
                value = scores[best];
                x = moves.swap_remove(best);
            }
        }
        step *= spec.shrink;
    }
    (x, value)
}

fn check_set(family: &ControlSetFamily, i: usize, bank: &McSampleBank) -> Result<()> {
    family.set(i)?;
    if !bank.covers(i) {
        return Err(Error::config(format!("sample bank does not cover set {}", i + 1)));
    }
    Ok(())
}

/// Both expected-bound maximizers of set `i` under width `beta`.
pub fn solve_set(
    gp: &GaussianProcess,
    beta: f64,
    family: &ControlSetFamily,
    i: usize,
    bank: &McSampleBank,
    spec: &AcquisitionSpec,
    seed: u64,
) -> Result<SetSolution> {
    check_set(family, i, bank)?;
    let pool = candidate_pool(family, i, spec, seed, incumbents(gp, family, i, spec.incumbents));
    let moments = expected_moments(gp, family, i, bank, &pool);
    let solve = |kind| {
        let scores: Vec<f64> = moments.iter().map(|&m| bound(kind, beta, m)).collect();
        let best = argmax(&scores);
        let mut score = |cands: &[Vec<f64>]| {
            expected_moments(gp, family, i, bank, cands)
                .into_iter()
                .map(|m| bound(kind, beta, m))
                .collect()
        };
        let (values, value) = refine(pool[best].clone(), scores[best], spec, &mut score);
        Maximizer {
            pq: PartialQuery { set: i, values },
            value,
        }
    };
    let upper = solve(BoundKind::Upper);
    let lower = solve(BoundKind::Lower);
    Ok(SetSolution { upper, lower })
}

fn fill_value(family: &ControlSetFamily, v: usize) -> f64 {
    match &family.distributions()[v] {
        InputDistribution::Uniform => 0.5,
        InputDistribution::TruncatedNormal(t) => t.mean().clamp(0.0, 1.0),
    }
}

/// `pq` moved onto set `i`: shared coordinates keep their values, the rest
/// take the centre of their input distribution.
fn project(family: &ControlSetFamily, pq: &PartialQuery, i: usize) -> Vec<f64> {
    let donor = family.sets()[pq.set].controlled();
    family.sets()[i]
        .controlled()
        .iter()
        .map(|v| match donor.binary_search(v) {
            Ok(k) => pq.values[k],
            Err(_) => fill_value(family, *v),
        })
        .collect()
}

/// Scores every set's bounds at the projections of all maximizers in
/// `solutions` and keeps any improvement. Sets searched independently can
/// otherwise disagree on a point several of them can express.
pub fn share_maximizers(
    gp: &GaussianProcess,
    beta: f64,
    family: &ControlSetFamily,
    bank: &McSampleBank,
    solutions: &mut [SetSolution],
) -> Result<()> {
    let donors: Vec<PartialQuery> = solutions.iter().flat_map(|s| [s.upper.pq.clone(), s.lower.pq.clone()]).collect();
    for (i, sol) in solutions.iter_mut().enumerate() {
        check_set(family, i, bank)?;
        let cands: Vec<Vec<f64>> = donors.iter().map(|pq| project(family, pq, i)).collect();
        let moments = expected_moments(gp, family, i, bank, &cands);
        for kind in [BoundKind::Upper, BoundKind::Lower] {
            let scores: Vec<f64> = moments.iter().map(|&m| bound(kind, beta, m)).collect();
            let best = argmax(&scores);
            let current = match kind {
                BoundKind::Upper => &mut sol.upper,
                BoundKind::Lower => &mut sol.lower,
            };
            if scores[best] > current.value {
                current.value = scores[best];
                current.pq.values.clone_from(&cands[best]);
            }
        }
    }
    Ok(())
}

/// `argmax_{x^i} E[u_{t−1}([x^i, X^{-i}])]`.
pub fn maximize_expected_ucb(
    gp: &GaussianProcess,
    beta: f64,
    family: &ControlSetFamily,
    i: usize,
    bank: &McSampleBank,
    spec: &AcquisitionSpec,
    seed: u64,
) -> Result<Maximizer> {
    maximize_bound(gp, beta, family, i, bank, spec, seed, BoundKind::Upper)
}

/// `argmax_{x^i} E[l_{t−1}([x^i, X^{-i}])]`.
pub fn maximize_expected_lcb(
    gp: &GaussianProcess,
    beta: f64,
    family: &ControlSetFamily,
    i: usize,
    bank: &McSampleBank,
    spec: &AcquisitionSpec,
    seed: u64,
) -> Result<Maximizer> {
    maximize_bound(gp, beta, family, i, bank, spec, seed, BoundKind::Lower)
}

#[allow(clippy::too_many_arguments)]
pub fn maximize_bound(
    gp: &GaussianProcess,
    beta: f64,
    family: &ControlSetFamily,
    i: usize,
    bank: &McSampleBank,
    spec: &AcquisitionSpec,
    seed: u64,
    kind: BoundKind,
) -> Result<Maximizer> {
    check_set(family, i, bank)?;
    let pool = candidate_pool(family, i, spec, seed, incumbents(gp, family, i, spec.incumbents));
    let mut score = |cands: &[Vec<f64>]| {
        expected_moments(gp, family, i, bank, cands)
            .into_iter()
            .map(|m| bound(kind, beta, m))
            .collect::<Vec<f64>>()
    };
    let scores = score(&pool);
    let best = argmax(&scores);
    let (values, value) = refine(pool[best].clone(), scores[best], spec, &mut score);
    Ok(Maximizer {
        pq: PartialQuery { set: i, values },
        value,
    })
}

/// Outer argmax over the sets in `filter`; ties go to the smallest index.
#[allow(clippy::too_many_arguments)]
pub fn maximize_over_family(
    gp: &GaussianProcess,
    beta: f64,
    family: &ControlSetFamily,
    filter: &[usize],
    bank: &McSampleBank,
    spec: &AcquisitionSpec,
    seed: u64,
    kind: BoundKind,
) -> Result<Maximizer> {
    let mut per_set = Vec::with_capacity(filter.len());
    for &i in filter {
        per_set.push(maximize_bound(gp, beta, family, i, bank, spec, seed, kind)?);
    }
    best_of(per_set.iter()).cloned()
}

/// Highest value, ties broken towards the smallest set index.
pub fn best_of<'a, I>(solutions: I) -> Result<&'a Maximizer>
where
    I: IntoIterator<Item = &'a Maximizer>,
{
    let mut best: Option<&Maximizer> = None;
    for m in solutions {
        best = match best {
            Some(b) if m.value > b.value || (m.value == b.value && m.pq.set < b.pq.set) => Some(m),
            Some(b) => Some(b),
            None => Some(m),
        };
    }
    best.ok_or_else(|| Error::config("argmax over an empty set filter"))
}

/// Maximizes a candidate-level score for set `i` from `restarts` of the best
/// pool candidates, returning the best refined result.
pub fn maximize_score<F>(
    family: &ControlSetFamily,
    i: usize,
    spec: &AcquisitionSpec,
    seed: u64,
    extra: Vec<Vec<f64>>,
    restarts: usize,
    mut score: F,
) -> Result<Maximizer>
where
    F: FnMut(&[Vec<f64>]) -> Vec<f64>,
{
    family.set(i)?;
    let pool = candidate_pool(family, i, spec, seed, extra);
    let scores = score(&pool);
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut best: Option<(Vec<f64>, f64)> = None;
    for &start in order.iter().take(restarts.max(1)) {
        let (x, v) = refine(pool[start].clone(), scores[start], spec, &mut score);
        if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
            best = Some((x, v));
        }
    }
    let (values, value) = best.expect("pool is never empty");
    Ok(Maximizer {
        pq: PartialQuery { set: i, values },
        value,
    })
}

/// Expectation-of-`g` maximizer over set `i` using the bank rows.
pub fn maximize_expectation<G>(
    g: G,
    family: &ControlSetFamily,
    i: usize,
    bank: &McSampleBank,
    spec: &AcquisitionSpec,
    seed: u64,
    restarts: usize,
) -> Result<Maximizer>
where
    G: Fn(&[f64]) -> f64,
{
    check_set(family, i, bank)?;
    let score = |cands: &[Vec<f64>]| {
        cands
            .iter()
            .map(|c| {
                crate::query::expected_value(&g, family, &PartialQuery { set: i, values: c.clone() }, bank)
                    .expect("candidate matches set width")
            })
            .collect()
    };
    maximize_score(family, i, spec, seed, Vec::new(), restarts, score)
}

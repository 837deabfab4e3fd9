//! Cost-blind comparison methods: UCB-PSQ, TS-PSQ and the grouped
//! explore-then-commit ETC-50.

mod features;

pub use features::{FeatureRegression, RandomFeatures, SampledFunction};

use rand::Rng;

use crate::acquisition::{best_of, maximize_score, Maximizer};
use crate::algorithm::{Phase, Problem, RunSettings, RunTrace, Session};
use crate::error::{Error, Result};
use crate::query::PartialQuery;
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    UcbPsq,
    TsPsq,
    Etc,
}

impl BaselineKind {
    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::UcbPsq => "ucb-psq",
            BaselineKind::TsPsq => "ts-psq",
            BaselineKind::Etc => "etc-50",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineSpec {
    pub kind: BaselineKind,
    pub plays_per_group: usize,
    pub features: usize,
    /// Refinement restarts for the sampled-function argmax.
    pub ts_restarts: usize,
    /// Tolerance recorded in the trace for regret accounting.
    pub alpha: f64,
}

impl BaselineSpec {
    pub fn new(kind: BaselineKind) -> Self {
        BaselineSpec {
            kind,
            plays_per_group: 50,
            features: 512,
            ts_restarts: 1,
            alpha: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.plays_per_group == 0 {
            return Err(Error::config("ETC needs at least one play per group"));
        }
        if self.features == 0 {
            return Err(Error::config("TS needs at least one feature"));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::config(format!("alpha {} must lie in [0, 1]", self.alpha)));
        }
        Ok(())
    }
}

/// Expected-ucb maximizer over the sets in `filter`, from the same shared
/// solve the proposed method uses.
fn ucb_argmax(session: &Session<'_>, filter: &[usize]) -> Result<Maximizer> {
    let solutions = session.solve_all()?;
    best_of(filter.iter().map(|&i| &solutions[i].upper)).cloned()
}

/// Cost-blind argmax of the expected ucb over every `(i, x^i)`.
pub fn ucb_psq_step(session: &Session<'_>) -> Result<PartialQuery> {
    let all: Vec<usize> = (0..session.problem.family.len()).collect();
    Ok(ucb_argmax(session, &all)?.pq)
}

/// Argmax over every `(i, x^i)` of the bank expectation of one posterior
/// function sample.
pub fn ts_psq_step<R: Rng + ?Sized>(
    session: &Session<'_>,
    model: &FeatureRegression,
    restarts: usize,
    rng: &mut R,
) -> Result<PartialQuery> {
    let sample = model.sample(rng)?;
    let family = session.problem.family;
    let bank = session.bank()?;
    let seed = session.acquisition_seed();
    let s = session.settings;
    let dim = family.dim();
    let mut per_set = Vec::with_capacity(family.len());
    for i in 0..family.len() {
        let score = |cands: &[Vec<f64>]| {
            let mut points = Vec::new();
            cands
                .iter()
                .map(|c| {
                    points.clear();
                    bank.extend_assembled(family, i, c, &mut points);
                    let rows = points.len() / dim;
                    points.chunks_exact(dim).map(|x| sample.eval(x)).sum::<f64>() / rows as f64
                })
                .collect()
        };
        per_set.push(maximize_score(family, i, &s.acquisition, seed, Vec::new(), restarts, score)?);
    }
    Ok(best_of(per_set.iter())?.pq.clone())
}

fn ensure_kind(spec: &BaselineSpec, kind: BaselineKind) -> Result<()> {
    spec.validate()?;
    if spec.kind != kind {
        return Err(Error::config(format!("expected a {} spec, got {}", kind.name(), spec.kind.name())));
    }
    Ok(())
}

pub fn run_ucb_psq(problem: Problem<'_>, settings: &RunSettings, spec: &BaselineSpec) -> Result<RunTrace> {
    ensure_kind(spec, BaselineKind::UcbPsq)?;
    let mut session = Session::new(problem, settings)?;
    while session.can_play() {
        let pq = ucb_psq_step(&session)?;
        session.play(pq, Phase::Play, spec.alpha, Vec::new())?;
    }
    Ok(session.finish())
}

pub fn run_ts_psq(problem: Problem<'_>, settings: &RunSettings, spec: &BaselineSpec) -> Result<RunTrace> {
    ensure_kind(spec, BaselineKind::TsPsq)?;
    let mut session = Session::new(problem, settings)?;
    let features = RandomFeatures::draw(&settings.kernel, spec.features, &mut stream_rng(settings.seed, Stream::Posterior, 0))?;
    let mut model = FeatureRegression::new(features, settings.lambda)?;
    while session.can_play() {
        let pq = ts_psq_step(&session, &model, spec.ts_restarts, &mut session.posterior_rng())?;
        let record = session.play(pq, Phase::Play, spec.alpha, Vec::new())?;
        let pq = PartialQuery {
            set: record.set,
            values: record.pq.clone(),
        };
        let x = problem.family.assemble(&pq, &record.complement)?;
        model.observe(&x, record.y);
    }
    Ok(session.finish())
}

/// Set indices grouped by `|I_i|`, smallest sets first.
pub fn size_groups(problem: &Problem<'_>) -> Vec<Vec<usize>> {
    let sets = problem.family.sets();
    let mut sizes: Vec<usize> = sets.iter().map(|s| s.size()).collect();
    sizes.sort_unstable();
    sizes.dedup();
    sizes
        .into_iter()
        .map(|n| (0..sets.len()).filter(|&i| sets[i].size() == n).collect())
        .collect()
}

/// `plays_per_group` expected-ucb plays inside each size group in turn, then
/// a commitment to the overall expected-ucb argmax set.
pub fn run_etc(problem: Problem<'_>, settings: &RunSettings, spec: &BaselineSpec) -> Result<RunTrace> {
    ensure_kind(spec, BaselineKind::Etc)?;
    let mut session = Session::new(problem, settings)?;
    for group in size_groups(&problem) {
        for _ in 0..spec.plays_per_group {
            if !session.can_play() {
                return Ok(session.finish());
            }
            let pq = ucb_argmax(&session, &group)?.pq;
            session.play(pq, Phase::Explore, spec.alpha, Vec::new())?;
        }
    }
    if !session.can_play() {
        return Ok(session.finish());
    }
    let commit = ucb_psq_step(&session)?.set;
    while session.can_play() {
        let pq = ucb_argmax(&session, &[commit])?.pq;
        session.play(pq, Phase::Commit, spec.alpha, Vec::new())?;
    }
    Ok(session.finish())
}

pub fn run_baseline(problem: Problem<'_>, settings: &RunSettings, spec: &BaselineSpec) -> Result<RunTrace> {
    match spec.kind {
        BaselineKind::UcbPsq => run_ucb_psq(problem, settings, spec),
        BaselineKind::TsPsq => run_ts_psq(problem, settings, spec),
        BaselineKind::Etc => run_etc(problem, settings, spec),
    }
}

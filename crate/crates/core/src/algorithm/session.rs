use super::budget::BudgetMeter;
use super::cost::CostEstimator;
use super::trace::{Phase, RunTrace, TraceRecord};
use crate::acquisition::{share_maximizers, solve_set, AcquisitionSpec, SetSolution};
use crate::benchmarks::{CostModel, ObjectiveEnvironment};
use crate::error::{Error, Result};
use crate::gp::{BetaSchedule, GaussianProcess, KernelSpec};
use crate::query::{ControlSetFamily, McSampleBank, PartialQuery};
use crate::rng::{derive_seed, stream_rng, Stream};

/// The objective, its control sets and the cost model a run plays against.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub env: &'a ObjectiveEnvironment,
    pub family: &'a ControlSetFamily,
    pub costs: &'a CostModel,
}

impl Problem<'_> {
    pub fn validate(&self) -> Result<()> {
        if self.family.is_empty() {
            return Err(Error::config("control family is empty"));
        }
        if self.env.dim() != self.family.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.family.dim(),
                got: self.env.dim(),
            });
        }
        self.costs.check_against(self.family)
    }
}

/// Model and bookkeeping knobs shared by every algorithm.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub kernel: KernelSpec,
    pub lambda: f64,
    pub beta: BetaSchedule,
    pub acquisition: AcquisitionSpec,
    /// Complement samples per set for the expected bounds.
    pub mc_samples: usize,
    pub budget: f64,
    /// `u_c`: upper end of the cost support.
    pub cost_upper: f64,
    /// Smallest plausible mean cost, used for the bonus horizon `T̂`.
    pub cost_floor: f64,
    pub seed: u64,
}

impl RunSettings {
    pub fn new(kernel: KernelSpec, lambda: f64, beta: BetaSchedule) -> Self {
        RunSettings {
            kernel,
            lambda,
            beta,
            acquisition: AcquisitionSpec::default(),
            mc_samples: 64,
            budget: 100.0,
            cost_upper: 1.0,
            cost_floor: 0.01,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.acquisition.validate()?;
        if self.mc_samples == 0 {
            return Err(Error::config("Monte-Carlo sample count must be at least 1"));
        }
        if !(self.budget.is_finite() && self.budget > 0.0) {
            return Err(Error::config(format!("budget {} must be positive", self.budget)));
        }
        if !(self.cost_floor > 0.0) {
            return Err(Error::config("cost floor must be positive"));
        }
        Ok(())
    }
}

/// Mutable state of one run: GP, budget, cost statistics and the trace.
pub struct Session<'a> {
    pub problem: Problem<'a>,
    pub settings: &'a RunSettings,
    gp: GaussianProcess,
    meter: BudgetMeter,
    costs: CostEstimator,
    trace: RunTrace,
}

impl<'a> Session<'a> {
    pub fn new(problem: Problem<'a>, settings: &'a RunSettings) -> Result<Self> {
        problem.validate()?;
        settings.validate()?;
        if settings.kernel.dim() != problem.family.dim() {
            return Err(Error::DimensionMismatch {
                expected: problem.family.dim(),
                got: settings.kernel.dim(),
            });
        }
        let horizon = CostEstimator::budget_horizon(settings.budget, settings.cost_floor)?;
        Ok(Session {
            problem,
            settings,
            gp: GaussianProcess::new(settings.kernel.clone(), settings.lambda)?,
            meter: BudgetMeter::new(settings.budget, settings.cost_upper)?,
            costs: CostEstimator::new(problem.family.len(), horizon)?,
            trace: RunTrace::default(),
        })
    }

    pub fn gp(&self) -> &GaussianProcess {
        &self.gp
    }

    pub fn meter(&self) -> &BudgetMeter {
        &self.meter
    }

    pub fn cost_estimator(&self) -> &CostEstimator {
        &self.costs
    }

    pub fn trace(&self) -> &RunTrace {
        &self.trace
    }

    /// 1-based index of the next play.
    pub fn next_t(&self) -> usize {
        self.trace.len() + 1
    }

    pub fn can_play(&self) -> bool {
        self.meter.can_play()
    }

    pub fn beta(&self) -> Result<f64> {
        self.settings.beta.beta(self.next_t())
    }

    /// Complement samples for the next play's acquisition solves.
    pub fn bank(&self) -> Result<McSampleBank> {
        let seed = derive_seed(self.settings.seed, Stream::SampleBank, self.next_t() as u64);
        McSampleBank::draw(self.problem.family, self.settings.mc_samples, seed)
    }

    pub fn acquisition_seed(&self) -> u64 {
        derive_seed(self.settings.seed, Stream::Candidates, self.next_t() as u64)
    }

    pub fn posterior_rng(&self) -> rand_chacha::ChaCha8Rng {
        stream_rng(self.settings.seed, Stream::Posterior, self.next_t() as u64)
    }

    /// Both bound maximizers of every set for the next play, cross-checked
    /// with [`share_maximizers`].
    pub fn solve_all(&self) -> Result<Vec<SetSolution>> {
        let beta = self.beta()?;
        let bank = self.bank()?;
        let seed = self.acquisition_seed();
        let family = self.problem.family;
        let mut solutions = (0..family.len())
            .map(|i| solve_set(&self.gp, beta, family, i, &bank, &self.settings.acquisition, seed))
            .collect::<Result<Vec<_>>>()?;
        share_maximizers(&self.gp, beta, family, &bank, &mut solutions)?;
        Ok(solutions)
    }

    /// Draws the complement, observes `y` and a cost, and records the play.
    pub fn play(&mut self, pq: PartialQuery, phase: Phase, alpha: f64, feasible: Vec<usize>) -> Result<&TraceRecord> {
        let t = self.next_t() as u64;
        let seed = self.settings.seed;
        let family = self.problem.family;
        let complement = family.sample_complement(pq.set, &mut stream_rng(seed, Stream::Complement, t))?;
        let x = family.assemble(&pq, &complement)?;
        let y = self.problem.env.observe(&x, &mut stream_rng(seed, Stream::ObservationNoise, t));
        let cost = self.problem.costs.draw(pq.set, &mut stream_rng(seed, Stream::CostNoise, t));
        self.gp.observe(&x, y)?;
        self.meter.charge(cost);
        self.costs.record(pq.set, cost);
        self.trace.records.push(TraceRecord {
            t: t as usize,
            phase,
            set: pq.set,
            pq: pq.values,
            complement,
            y,
            cost,
            cum_cost: self.meter.spent(),
            alpha,
            feasible,
        });
        Ok(self.trace.records.last().expect("just pushed"))
    }

    pub fn finish(self) -> RunTrace {
        self.trace
    }
}

use super::session::{Problem, RunSettings, Session};
use super::state::{seed_intersected_bounds, ExploitState, ExplorationRound, RoundBounds};
use super::trace::{Phase, RunTrace};
use crate::acquisition::{best_of, SetSolution};
use crate::error::{Error, Result};
use crate::query::PartialQuery;

/// How many exploration passes `τ` the round-robin phase makes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauRule {
    Fixed(usize),
    /// Largest `τ` with `m·τ·u_c` under the exploration cap.
    Pessimistic,
    /// Largest `τ` with `τ·Σ_i c_i` under the exploration cap.
    MeanBased,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProposedSpec {
    pub tau: TauRule,
    /// Share of the budget exploration may spend.
    pub exploration_fraction: f64,
    pub alpha0: f64,
    /// Exploitation plays between halvings of α; `None` uses the dimension.
    pub alpha_period: Option<usize>,
}

impl Default for ProposedSpec {
    fn default() -> Self {
        ProposedSpec {
            tau: TauRule::Pessimistic,
            exploration_fraction: 0.6,
            alpha0: 0.1,
            alpha_period: None,
        }
    }
}

impl ProposedSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha0) {
            return Err(Error::config(format!("alpha {} must lie in [0, 1]", self.alpha0)));
        }
        if !(self.exploration_fraction > 0.0 && self.exploration_fraction <= 1.0) {
            return Err(Error::config("exploration fraction must lie in (0, 1]"));
        }
        if self.tau == TauRule::Fixed(0) {
            return Err(Error::config("τ must be at least 1"));
        }
        if self.alpha_period == Some(0) {
            return Err(Error::config("alpha halving period must be at least 1"));
        }
        Ok(())
    }

    pub fn exploration_cap(&self, settings: &RunSettings) -> f64 {
        self.exploration_fraction * settings.budget
    }

    pub fn resolve_tau(&self, problem: &Problem<'_>, settings: &RunSettings) -> Result<usize> {
        let cap = self.exploration_cap(settings);
        let per_pass = match self.tau {
            TauRule::Fixed(tau) => return Ok(tau),
            TauRule::Pessimistic => problem.family.len() as f64 * settings.cost_upper,
            TauRule::MeanBased => problem.costs.means().iter().sum(),
        };
        // At least one pass; the cap still cuts a pass it cannot fund.
        Ok(((cap / per_pass + 1e-12).floor() as usize).max(1))
    }
}

/// `α₀ · 2^{−⌊evals / period⌋}`.
pub fn alpha_schedule(alpha0: f64, period: usize, exploit_evals: usize) -> f64 {
    let halvings = (exploit_evals / period.max(1)).min(1074) as i32;
    alpha0 * 0.5f64.powi(halvings)
}

/// Round-robin plays of set `((t−1) mod m) + 1`, each at its expected-ucb
/// maximizer, for `m·τ` plays or until the budget or exploration cap bites.
pub fn explore_phase(session: &mut Session<'_>, tau: usize, cap: f64, alpha: f64) -> Result<Vec<ExplorationRound>> {
    let m = session.problem.family.len();
    let mut rounds = Vec::with_capacity(m * tau);
    for t in 1..=m * tau {
        let meter = session.meter();
        if !meter.can_play() || !meter.fits_under(cap, meter.spent()) {
            break;
        }
        let i = (t - 1) % m;
        let solutions = session.solve_all()?;
        let bounds = round_bounds(&solutions)?;
        rounds.push(ExplorationRound {
            set: i,
            ucb: solutions[i].upper.value,
            lcb_max: bounds.lcb_max,
        });
        let pq = solutions[i].upper.pq.clone();
        session.play(pq, Phase::Explore, alpha, Vec::new())?;
    }
    Ok(rounds)
}

fn round_bounds(solutions: &[SetSolution]) -> Result<RoundBounds> {
    let ucb = solutions.iter().map(|s| s.upper.value).collect();
    let lcb: Vec<f64> = solutions.iter().map(|s| s.lower.value).collect();
    RoundBounds::new(ucb, &lcb)
}

/// One exploitation decision: tighten the bounds, filter `S₁`, keep the
/// cheapest-LCB sets `S₃` and take the expected-ucb maximizer among them.
pub fn exploit_step(session: &Session<'_>, state: &mut ExploitState, alpha: f64) -> Result<PartialQuery> {
    let solutions = session.solve_all()?;
    let bounds = round_bounds(&solutions)?;
    state.step(&bounds, alpha, &session.cost_estimator().lcbs())?;
    let chosen = best_of(state.cheapest().iter().map(|&i| &solutions[i].upper))?;
    Ok(chosen.pq.clone())
}

pub fn run(problem: Problem<'_>, settings: &RunSettings, spec: &ProposedSpec) -> Result<RunTrace> {
    spec.validate()?;
    let mut session = Session::new(problem, settings)?;
    let tau = spec.resolve_tau(&problem, settings)?;
    let period = spec.alpha_period.unwrap_or(problem.family.dim());
    let rounds = explore_phase(&mut session, tau, spec.exploration_cap(settings), spec.alpha0)?;
    let mut state = seed_intersected_bounds(&rounds, problem.family.len());
    let mut exploit_evals = 0;
    while session.can_play() {
        let alpha = alpha_schedule(spec.alpha0, period, exploit_evals);
        let pq = exploit_step(&session, &mut state, alpha)?;
        let feasible = state.feasible().to_vec();
        session.play(pq, Phase::Exploit, alpha, feasible)?;
        exploit_evals += 1;
    }
    Ok(session.finish())
}

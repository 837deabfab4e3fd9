//! Explore-then-exploit selection of control sets with intersected
//! confidence bounds and cost lower confidence bounds.

mod budget;
mod cost;
mod proposed;
mod session;
mod state;
mod trace;

pub use budget::BudgetMeter;
pub use cost::CostEstimator;
pub use proposed::{alpha_schedule, exploit_step, explore_phase, run, ProposedSpec, TauRule};
pub use session::{Problem, RunSettings, Session};
pub use state::{cheapest_sets, seed_intersected_bounds, ExploitState, ExplorationRound, RoundBounds};
pub use trace::{Phase, RunTrace, TraceRecord};

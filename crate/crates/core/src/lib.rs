//! Bayesian optimization with cost-varying variable subsets under random,
//! unknown costs.
//!
//! The learner picks, every round, a control set `I_i` of variables to fix;
//! the remaining coordinates are drawn from known product distributions and
//! each play is charged a random cost. The crate provides the Gaussian-process
//! machinery ([`gp`]), control-set semantics ([`query`]), expected-bound
//! maximization ([`acquisition`]), the explore-then-commit algorithm with
//! cost lower confidence bounds ([`algorithm`]), comparison methods
//! ([`baselines`]) and benchmark environments ([`benchmarks`]).

pub mod acquisition;
pub mod algorithm;
pub mod baselines;
pub mod benchmarks;
pub mod error;
pub mod gp;
pub mod lowdisc;
pub mod query;
pub mod rng;

pub use error::{Error, Result};

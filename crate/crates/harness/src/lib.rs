//! Experiment orchestration for the cost-varying subset methods: configs,
//! oracle caches, regret ledgers, runners and report aggregation.

pub mod config;
pub mod error;
pub mod experiment;
pub mod ledger;
pub mod oracle_cache;
pub mod report;
pub mod sweep;
pub mod trace_io;

pub use config::{AlgorithmName, BetaChoice, EnvName, ExperimentConfig, TauChoice};
pub use error::{HarnessError, Result};

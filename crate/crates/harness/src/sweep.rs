//! Cross products of environment, cost model, variance and algorithm.

use std::path::Path;

use rayon::prelude::*;

use crate::config::{AlgorithmName, EnvName, ExperimentConfig};
use crate::error::Result;
use crate::experiment::run_experiment;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxes {
    pub envs: Vec<EnvName>,
    pub cost_models: Vec<String>,
    pub variances: Vec<f64>,
    pub algorithms: Vec<AlgorithmName>,
}

pub fn cell_name(cfg: &ExperimentConfig) -> String {
    format!(
        "{}_{}_v{}_{}",
        cfg.env.name(),
        cfg.cost_model,
        cfg.variance,
        cfg.algorithm.name()
    )
}

/// One config per cell, each writing into its own directory under `root`.
pub fn expand(base: &ExperimentConfig, axes: &SweepAxes, root: &Path) -> Vec<ExperimentConfig> {
    let mut cells = Vec::new();
    for &env in &axes.envs {
        for cost in &axes.cost_models {
            for &variance in &axes.variances {
                for &algorithm in &axes.algorithms {
                    let mut c = ExperimentConfig {
                        env,
                        cost_model: cost.clone(),
                        variance,
                        algorithm,
                        ..base.clone()
                    };
                    c.out = root.join(cell_name(&c));
                    cells.push(c);
                }
            }
        }
    }
    cells
}

/// Runs every cell; returns each cell's name with its outcome.
pub fn run_sweep(cells: &[ExperimentConfig], oracle_cache: Option<&Path>) -> Vec<(String, Result<()>)> {
    // Cells share the oracle cache file, so fill it before fanning out.
    let mut primed = Vec::new();
    let mut outcomes: Vec<Option<Result<()>>> = cells.iter().map(|_| None).collect();
    for (k, c) in cells.iter().enumerate() {
        let r = crate::experiment::Prepared::new(c).and_then(|p| p.oracle(oracle_cache).map(|_| ()));
        match r {
            Ok(()) => primed.push(k),
            Err(e) => outcomes[k] = Some(Err(e)),
        }
    }
    let ran: Vec<(usize, Result<()>)> = primed
        .par_iter()
        .map(|&k| (k, run_experiment(&cells[k], oracle_cache).map(|_| ())))
        .collect();
    for (k, r) in ran {
        outcomes[k] = Some(r);
    }
    cells
        .iter()
        .zip(outcomes)
        .map(|(c, r)| (cell_name(c), r.expect("every cell has an outcome")))
        .collect()
}

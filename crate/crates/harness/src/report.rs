//! Aggregates finished run directories into per-algorithm budget tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bocvs::benchmarks::CostModel;

use crate::config::{AlgorithmName, ExperimentConfig};
use crate::error::{read_file, HarnessError, Result};
use crate::experiment::{ledger_file, mean_se, trace_file, CONFIG_FILE, ORACLE_FILE};
use crate::ledger::{parse_ledger, CurvePoint, RegretLedger};
use crate::oracle_cache;
use crate::trace_io::parse_trace;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub algorithm: String,
    pub budget: f64,
    pub simple_regret_mean: f64,
    pub simple_regret_se: f64,
    pub evaluations_mean: f64,
    pub evaluations_se: f64,
    pub seeds: usize,
}

/// A run directory loaded back from disk.
#[derive(Debug, Clone)]
pub struct LoadedRun {
    pub dir: PathBuf,
    pub config: ExperimentConfig,
    pub ledgers: Vec<(u64, RegretLedger)>,
}

pub fn load_run(dir: &Path) -> Result<LoadedRun> {
    let config = ExperimentConfig::read(&dir.join(CONFIG_FILE))?;
    let oracle_path = dir.join(ORACLE_FILE);
    let records = oracle_cache::load(&oracle_path)?;
    let oracle = match records.as_slice() {
        [r] => r.solution.clone(),
        _ => {
            return Err(HarnessError::config(format!(
                "{} must hold exactly one oracle record",
                oracle_path.display()
            )))
        }
    };
    let costs = CostModel::by_name(&config.cost_model)?;
    let mut ledgers = Vec::new();
    for &seed in &config.seeds {
        let tp = dir.join(trace_file(seed));
        if !tp.exists() {
            continue;
        }
        let trace = parse_trace(&read_file(&tp)?, &tp.display().to_string())?;
        let lp = dir.join(ledger_file(seed));
        let ledger = parse_ledger(&read_file(&lp)?, &lp.display().to_string(), &trace, &oracle, &costs)?;
        ledgers.push((seed, ledger));
    }
    Ok(LoadedRun {
        dir: dir.to_path_buf(),
        config,
        ledgers,
    })
}

/// Runs must agree on everything except algorithm, seeds and output
/// directory.
fn check_comparable(runs: &[LoadedRun]) -> Result<()> {
    let key = |c: &ExperimentConfig| ExperimentConfig {
        algorithm: AlgorithmName::Proposed,
        ..c.comparable()
    };
    let Some(first) = runs.first() else {
        return Err(HarnessError::Mismatch("no run directories given".into()));
    };
    let reference = key(&first.config);
    for r in &runs[1..] {
        if key(&r.config) != reference {
            let a = reference.to_text();
            let b = key(&r.config).to_text();
            let diff = a
                .lines()
                .zip(b.lines())
                .find(|(x, y)| x != y)
                .map_or_else(String::new, |(x, y)| format!(" (`{x}` vs `{y}`)"));
            return Err(HarnessError::Mismatch(format!(
                "{} and {} were run with different configs{diff}",
                first.dir.display(),
                r.dir.display()
            )));
        }
    }
    Ok(())
}

/// Per-algorithm, per-budget mean ± se over every seed of every run.
pub fn aggregate(runs: &[LoadedRun], grid: &[f64]) -> Result<Vec<ReportRow>> {
    check_comparable(runs)?;
    let mut by_alg: BTreeMap<&str, Vec<(u64, Vec<CurvePoint>)>> = BTreeMap::new();
    for run in runs {
        let entry = by_alg.entry(run.config.algorithm.name()).or_default();
        for (seed, ledger) in &run.ledgers {
            if entry.iter().any(|(s, _)| s == seed) {
                return Err(HarnessError::Mismatch(format!(
                    "seed {seed} of {} appears in more than one run",
                    run.config.algorithm.name()
                )));
            }
            entry.push((*seed, ledger.curve(grid)));
        }
    }
    let mut rows = Vec::new();
    for (alg, curves) in by_alg {
        for (k, &budget) in grid.iter().enumerate() {
            let regrets: Vec<f64> = curves.iter().map(|(_, c)| c[k].simple_regret).collect();
            let evals: Vec<f64> = curves.iter().map(|(_, c)| c[k].evaluations as f64).collect();
            let (simple_regret_mean, simple_regret_se) = mean_se(&regrets);
            let (evaluations_mean, evaluations_se) = mean_se(&evals);
            rows.push(ReportRow {
                algorithm: alg.to_string(),
                budget,
                simple_regret_mean,
                simple_regret_se,
                evaluations_mean,
                evaluations_se,
                seeds: curves.len(),
            });
        }
    }
    Ok(rows)
}

pub const REPORT_HEADER: &str =
    "algorithm,budget,simple_regret_mean,simple_regret_se,evaluations_mean,evaluations_se,seeds";

pub fn report_csv(rows: &[ReportRow]) -> String {
    let mut s = format!("{REPORT_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.algorithm,
            r.budget,
            r.simple_regret_mean,
            r.simple_regret_se,
            r.evaluations_mean,
            r.evaluations_se,
            r.seeds
        );
    }
    s
}

pub fn report_table(rows: &[ReportRow]) -> String {
    let header = ["algorithm", "budget", "simple regret", "± se", "evaluations", "± se", "seeds"];
    let cells: Vec<[String; 7]> = rows
        .iter()
        .map(|r| {
            [
                r.algorithm.clone(),
                format!("{:.2}", r.budget),
                format!("{:.4}", r.simple_regret_mean),
                format!("{:.4}", r.simple_regret_se),
                format!("{:.1}", r.evaluations_mean),
                format!("{:.1}", r.evaluations_se),
                r.seeds.to_string(),
            ]
        })
        .collect();
    let mut widths = header.map(|h| h.chars().count());
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut s = String::new();
    let mut line = |fields: Vec<&str>| {
        let parts: Vec<String> = fields
            .iter()
            .zip(widths)
            .enumerate()
            .map(|(k, (f, w))| {
                let pad = w - f.chars().count();
                if k == 0 {
                    format!("{f}{}", " ".repeat(pad))
                } else {
                    format!("{}{f}", " ".repeat(pad))
                }
            })
            .collect();
        let _ = writeln!(s, "{}", parts.join("  ").trim_end());
    };
    line(header.to_vec());
    for row in &cells {
        line(row.iter().map(String::as_str).collect());
    }
    s
}

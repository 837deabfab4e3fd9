use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use bocvs_harness::config::{AlgorithmName, EnvName, ExperimentConfig};
use bocvs_harness::experiment::{run_experiment, Prepared};
use bocvs_harness::ledger::budget_grid;
use bocvs_harness::report::{aggregate, load_run, report_csv, report_table};
use bocvs_harness::sweep::{expand, run_sweep, SweepAxes};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bocvs", about = "Run and report cost-varying variable-subset experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run a single seed.
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<u64>,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Oracle cache file, read if present and extended on a miss.
    #[arg(long)]
    oracle_cache: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::read(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seeds = vec![s];
        }
        if let Some(s) = &self.seeds {
            cfg.seeds = s.clone();
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one config over its seeds.
    Run(Common),
    /// Run the cross product of the given axes, one directory per cell.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "hartmann,ackley")]
        envs: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "cheap,moderate")]
        costs: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "0.02,0.04")]
        variances: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "proposed,ucb-psq,ts-psq,etc-50")]
        algorithms: Vec<String>,
    },
    /// Compute the oracle for a config into the cache file.
    Oracle(Common),
    /// Aggregate run directories into a CSV and a plain-text table.
    Report {
        dirs: Vec<PathBuf>,
        /// Budget grid step; defaults to the runs' `budget_step`.
        #[arg(long)]
        budget_step: Option<f64>,
        /// Write `report.csv` and `report.txt` here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run(common) => {
            let cfg = common.load()?;
            let output = run_experiment(&cfg, common.oracle_cache.as_deref())?;
            for (seed, e) in &output.failures {
                eprintln!("seed {seed} failed: {e}");
            }
            println!(
                "{}: {} of {} seeds written to {}",
                cfg.algorithm.name(),
                output.results.len(),
                cfg.seeds.len(),
                cfg.out.display()
            );
            if output.results.is_empty() {
                bail!("every seed failed");
            }
        }
        Command::Sweep {
            common,
            envs,
            costs,
            variances,
            algorithms,
        } => {
            let base = common.load()?;
            let axes = SweepAxes {
                envs: envs
                    .iter()
                    .map(|e| EnvName::parse(e).with_context(|| format!("unknown environment `{e}`")))
                    .collect::<anyhow::Result<_>>()?,
                cost_models: costs,
                variances,
                algorithms: algorithms
                    .iter()
                    .map(|a| AlgorithmName::parse(a).with_context(|| format!("unknown algorithm `{a}`")))
                    .collect::<anyhow::Result<_>>()?,
            };
            let cells = expand(&base, &axes, &base.out);
            let mut failed = 0;
            for (name, r) in run_sweep(&cells, common.oracle_cache.as_deref()) {
                match r {
                    Ok(()) => println!("{name}: ok"),
                    Err(e) => {
                        failed += 1;
                        eprintln!("{name}: {e}");
                    }
                }
            }
            if failed > 0 {
                bail!("{failed} of {} cells failed", cells.len());
            }
        }
        Command::Oracle(common) => {
            let cfg = common.load()?;
            let cache = common.oracle_cache.context("`oracle` needs --oracle-cache")?;
            let oracle = Prepared::new(&cfg)?.oracle(Some(&cache))?;
            let tolerated: Vec<String> = oracle.tolerated.iter().map(|i| (i + 1).to_string()).collect();
            println!(
                "v+ = {} (set {}), tolerated {{{}}}, cheapest tolerated {}",
                oracle.best_value,
                oracle.best_set + 1,
                tolerated.join(","),
                oracle.cheapest_tolerated + 1
            );
        }
        Command::Report { dirs, budget_step, out } => {
            let runs = dirs.iter().map(|d| load_run(d)).collect::<Result<Vec<_>, _>>()?;
            let first = &runs.first().context("report needs at least one run directory")?.config;
            let grid = budget_grid(first.budget, budget_step.unwrap_or(first.budget_step));
            let rows = aggregate(&runs, &grid)?;
            let table = report_table(&rows);
            print!("{table}");
            if let Some(out) = out {
                std::fs::create_dir_all(&out)?;
                std::fs::write(out.join("report.csv"), report_csv(&rows))?;
                std::fs::write(out.join("report.txt"), table)?;
            }
        }
    }
    Ok(())
}

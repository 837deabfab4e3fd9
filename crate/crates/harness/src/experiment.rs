//! Builds problems from a config, runs algorithms over seeds and writes
//! trace, ledger and summary files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bocvs::acquisition::AcquisitionSpec;
use bocvs::algorithm::{run, Problem, ProposedSpec, RunSettings, RunTrace, TauRule};
use bocvs::baselines::{run_baseline, BaselineKind, BaselineSpec};
use bocvs::benchmarks::airfoil::{make_airfoil_env_from, preprocess, AIRFOIL_FILE};
use bocvs::benchmarks::{
    airfoil_family, compute_oracle, make_ackley_env_on, make_hartmann_env, make_levy_env, synthetic_family,
    AirfoilSurrogate, AirfoilTable, CostModel, ObjectiveEnvironment, OracleSolution, OracleSpec,
};
use bocvs::gp::{mig_curve, BetaSchedule, KernelSpec, DEFAULT_MIG_CANDIDATES};
use bocvs::lowdisc::shifted_halton;
use bocvs::query::{ControlSetFamily, InputDistribution, McSampleBank};
use bocvs::rng::{derive_seed, stream_rng, Stream};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{AlgorithmName, BetaChoice, EnvName, ExperimentConfig, TauChoice};
use crate::error::{read_file, write_file, HarnessError, Result};
use crate::ledger::{budget_grid, curve_csv, CurvePoint, RegretLedger};
use crate::oracle_cache::{self, OracleKey, OracleRecord};
use crate::trace_io::trace_to_csv;

pub const DATA_DIR_VAR: &str = "BOCVS_DATA_DIR";

/// Where the airfoil table is read from: the config's `dataset`, else
/// `$BOCVS_DATA_DIR/airfoil_self_noise.dat`.
pub fn airfoil_path(cfg: &ExperimentConfig) -> Result<PathBuf> {
    if let Some(p) = &cfg.dataset {
        return Ok(p.clone());
    }
    match std::env::var_os(DATA_DIR_VAR) {
        Some(dir) => Ok(PathBuf::from(dir).join(AIRFOIL_FILE)),
        None => Err(HarnessError::config(format!(
            "airfoil needs `dataset` in the config or {DATA_DIR_VAR} in the environment"
        ))),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Loads and fits the airfoil table. A `<file>.sha256` next to the table,
/// when present, must match its contents.
pub fn load_airfoil(path: &Path, rmse_threshold: f64) -> Result<ObjectiveEnvironment> {
    let text = read_file(path)?;
    let mut pin = path.as_os_str().to_owned();
    pin.push(".sha256");
    let pin = PathBuf::from(pin);
    if pin.exists() {
        let expected = read_file(&pin)?;
        let expected = expected.split_whitespace().next().unwrap_or("");
        let got = sha256_hex(text.as_bytes());
        if got != expected {
            return Err(HarnessError::config(format!(
                "{} has sha256 {got}, pinned {expected}",
                path.display()
            )));
        }
    }
    let table = AirfoilTable::parse(&text, &path.display().to_string())?;
    let data = preprocess(&table)?;
    let rmse = AirfoilSurrogate::fit(&data)?.training_rmse(&data);
    if rmse > rmse_threshold {
        return Err(HarnessError::config(format!(
            "airfoil surrogate RMSE {rmse} exceeds {rmse_threshold}"
        )));
    }
    Ok(make_airfoil_env_from(&data)?)
}

/// Everything shared by the seeds of one experiment.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: ExperimentConfig,
    pub env: ObjectiveEnvironment,
    pub family: ControlSetFamily,
    pub costs: CostModel,
    pub settings: RunSettings,
}

impl Prepared {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let env = match cfg.env {
            EnvName::Hartmann => make_hartmann_env(),
            EnvName::Ackley => make_ackley_env_on(cfg.ackley_half_width)?,
            EnvName::Levy => make_levy_env(),
            EnvName::Airfoil => load_airfoil(&airfoil_path(cfg)?, cfg.airfoil_rmse_threshold)?,
        }
        .with_noise(cfg.noise_sd)?;
        let dist = InputDistribution::truncated_normal(0.5, cfg.variance)?;
        let family = match cfg.env {
            EnvName::Airfoil => airfoil_family(dist)?,
            _ => synthetic_family(dist)?,
        };
        let costs = CostModel::by_name(&cfg.cost_model)?;
        let settings = settings_for(cfg, &env)?;
        let prepared = Prepared {
            config: cfg.clone(),
            env,
            family,
            costs,
            settings,
        };
        prepared.problem().validate()?;
        Ok(prepared)
    }

    pub fn problem(&self) -> Problem<'_> {
        Problem {
            env: &self.env,
            family: &self.family,
            costs: &self.costs,
        }
    }

    pub fn oracle_key(&self) -> OracleKey {
        let c = &self.config;
        OracleKey {
            env: c.env.name().to_string(),
            env_param: if c.env == EnvName::Ackley { c.ackley_half_width } else { 0.0 },
            cost_model: c.cost_model.clone(),
            variance: c.variance,
            alpha: c.alpha,
            samples: c.oracle_samples,
            search_samples: c.oracle_search_samples,
            candidates: c.oracle_candidates,
            restarts: c.oracle_restarts,
            seed: c.oracle_seed,
        }
    }

    pub fn oracle_spec(&self) -> OracleSpec {
        let c = &self.config;
        OracleSpec {
            search_samples: c.oracle_search_samples,
            eval_samples: c.oracle_samples,
            candidates: c.oracle_candidates,
            restarts: c.oracle_restarts,
            ..OracleSpec::default()
        }
    }

    pub fn compute_oracle(&self) -> Result<OracleSolution> {
        Ok(compute_oracle(
            &self.env,
            &self.family,
            self.config.alpha,
            &self.costs,
            &self.oracle_spec(),
            self.config.oracle_seed,
        )?)
    }

    /// The oracle from `cache` if it holds this key, otherwise computed and
    /// appended to the cache file.
    pub fn oracle(&self, cache: Option<&Path>) -> Result<OracleSolution> {
        let key = self.oracle_key();
        let Some(path) = cache else {
            return self.compute_oracle();
        };
        let mut records = oracle_cache::load(path)?;
        if let Some(r) = records.iter().find(|r| r.key == key) {
            return Ok(r.solution.clone());
        }
        let solution = self.compute_oracle()?;
        records.push(OracleRecord {
            key,
            solution: solution.clone(),
        });
        oracle_cache::store(path, &records)?;
        Ok(solution)
    }

    /// The high-sample bank every ledger expectation uses.
    pub fn ledger_bank(&self) -> Result<McSampleBank> {
        Ok(McSampleBank::draw(
            &self.family,
            self.config.oracle_samples,
            derive_seed(self.config.oracle_seed, Stream::Oracle, 2),
        )?)
    }

    pub fn run_seed(&self, seed: u64) -> Result<RunTrace> {
        let settings = self.settings.clone().with_seed(seed);
        run_algorithm(self.problem(), &settings, &self.config)
    }
}

/// Kernel defaults: a short lengthscale on the coordinates the objective
/// uses (0.1 for the rippled Ackley, 0.25 otherwise) and 100 on the inert
/// ones, so the model is nearly flat along the irrelevant block. Ackley and
/// Levy span a wider range and get a larger output scale.
pub fn kernel_for(cfg: &ExperimentConfig, dim: usize) -> Result<KernelSpec> {
    let relevant = cfg.lengthscale.unwrap_or(if cfg.env == EnvName::Ackley { 0.1 } else { 0.25 });
    let inert = cfg.inert_lengthscale.unwrap_or(100.0);
    let lengthscales: Vec<f64> = match cfg.env {
        EnvName::Airfoil => vec![relevant; dim],
        _ => (0..dim).map(|k| if k < 6 { relevant } else { inert }).collect(),
    };
    let output_scale = cfg.output_scale.unwrap_or(match cfg.env {
        EnvName::Hartmann | EnvName::Airfoil => 1.0,
        EnvName::Ackley | EnvName::Levy => 100.0,
    });
    Ok(KernelSpec::new(cfg.kernel, lengthscales, output_scale)?)
}

pub fn settings_for(cfg: &ExperimentConfig, env: &ObjectiveEnvironment) -> Result<RunSettings> {
    let kernel = kernel_for(cfg, env.dim())?;
    let lambda = cfg
        .lambda
        .unwrap_or((cfg.noise_sd * cfg.noise_sd + 1e-6) * kernel.output_scale().max(1.0));
    let beta = match cfg.beta {
        BetaChoice::Constant(b) => BetaSchedule::constant(b)?,
        BetaChoice::Theory => {
            let pool = shifted_halton(DEFAULT_MIG_CANDIDATES, env.dim(), &mut stream_rng(0, Stream::Candidates, 0));
            let curve = mig_curve(&kernel, lambda, &pool, cfg.mig_horizon)?;
            BetaSchedule::from_mig_curve(cfg.beta_rkhs_bound, env.noise_sd(), cfg.beta_delta, curve)?
        }
    };
    let mut s = RunSettings::new(kernel, lambda, beta);
    s.acquisition = AcquisitionSpec {
        candidates: cfg.candidates,
        refine_rounds: cfg.refine_rounds,
        initial_step: cfg.initial_step,
        shrink: cfg.shrink,
        incumbents: cfg.incumbents,
    };
    s.mc_samples = cfg.mc_samples;
    s.budget = cfg.budget;
    s.cost_upper = cfg.cost_upper;
    s.cost_floor = cfg.cost_floor;
    s.validate()?;
    Ok(s)
}

pub fn proposed_spec(cfg: &ExperimentConfig) -> ProposedSpec {
    ProposedSpec {
        tau: match cfg.tau {
            TauChoice::Pessimistic => TauRule::Pessimistic,
            TauChoice::MeanBased => TauRule::MeanBased,
            TauChoice::Fixed(n) => TauRule::Fixed(n),
        },
        exploration_fraction: cfg.exploration_fraction,
        alpha0: cfg.alpha,
        alpha_period: cfg.alpha_period,
    }
}

pub fn baseline_spec(cfg: &ExperimentConfig, kind: BaselineKind) -> BaselineSpec {
    BaselineSpec {
        kind,
        plays_per_group: cfg.etc_plays,
        features: cfg.ts_features,
        ts_restarts: cfg.ts_restarts,
        alpha: cfg.alpha,
    }
}

pub fn run_algorithm(problem: Problem<'_>, settings: &RunSettings, cfg: &ExperimentConfig) -> Result<RunTrace> {
    let kind = match cfg.algorithm {
        AlgorithmName::Proposed => return Ok(run(problem, settings, &proposed_spec(cfg))?),
        AlgorithmName::UcbPsq => BaselineKind::UcbPsq,
        AlgorithmName::TsPsq => BaselineKind::TsPsq,
        AlgorithmName::Etc => BaselineKind::Etc,
    };
    Ok(run_baseline(problem, settings, &baseline_spec(cfg, kind))?)
}

#[derive(Debug, Clone)]
pub struct SeedResult {
    pub seed: u64,
    pub trace: RunTrace,
    pub ledger: RegretLedger,
}

#[derive(Debug)]
pub struct ExperimentOutput {
    pub oracle: OracleRecord,
    pub results: Vec<SeedResult>,
    /// Seeds that failed, with their error.
    pub failures: Vec<(u64, String)>,
    pub summary: Vec<SummaryRow>,
}

/// Mean and standard error across seeds at one budget.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub budget: f64,
    pub simple_regret_mean: f64,
    pub simple_regret_se: f64,
    pub evaluations_mean: f64,
    pub evaluations_se: f64,
    pub seeds: usize,
}

/// Sample mean and `sd/√n` (zero for a single sample).
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn summarize(curves: &[Vec<CurvePoint>], grid: &[f64]) -> Vec<SummaryRow> {
    grid.iter()
        .enumerate()
        .map(|(k, &budget)| {
            let regrets: Vec<f64> = curves.iter().map(|c| c[k].simple_regret).collect();
            let evals: Vec<f64> = curves.iter().map(|c| c[k].evaluations as f64).collect();
            let (simple_regret_mean, simple_regret_se) = mean_se(&regrets);
            let (evaluations_mean, evaluations_se) = mean_se(&evals);
            SummaryRow {
                budget,
                simple_regret_mean,
                simple_regret_se,
                evaluations_mean,
                evaluations_se,
                seeds: curves.len(),
            }
        })
        .collect()
}

pub const SUMMARY_HEADER: &str =
    "budget,simple_regret_mean,simple_regret_se,evaluations_mean,evaluations_se,seeds,missing_seeds";

pub fn summary_csv(rows: &[SummaryRow], missing: &[u64]) -> String {
    let missing = missing.iter().map(u64::to_string).collect::<Vec<_>>().join(";");
    let mut s = format!("{SUMMARY_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.budget, r.simple_regret_mean, r.simple_regret_se, r.evaluations_mean, r.evaluations_se, r.seeds, missing
        );
    }
    s
}

pub fn trace_file(seed: u64) -> String {
    format!("trace_seed{seed}.csv")
}

pub fn ledger_file(seed: u64) -> String {
    format!("ledger_seed{seed}.csv")
}

pub fn curve_file(seed: u64) -> String {
    format!("curve_seed{seed}.csv")
}

pub const CONFIG_FILE: &str = "config.txt";
pub const SUMMARY_FILE: &str = "summary.csv";
/// Single-record oracle file written next to each run.
pub const ORACLE_FILE: &str = "oracle.txt";

/// Runs every seed without touching the disk. Seeds run in parallel and a
/// failing seed does not stop the others.
pub fn run_seeds(prepared: &Prepared, oracle: &OracleSolution) -> Result<ExperimentOutput> {
    let bank = prepared.ledger_bank()?;
    let outcomes: Vec<(u64, Result<SeedResult>)> = prepared
        .config
        .seeds
        .par_iter()
        .map(|&seed| {
            let r = prepared.run_seed(seed).and_then(|trace| {
                let ledger = RegretLedger::build(&trace, oracle, &prepared.costs, &prepared.env, &prepared.family, &bank)?;
                Ok(SeedResult { seed, trace, ledger })
            });
            (seed, r)
        })
        .collect();
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for (seed, r) in outcomes {
        match r {
            Ok(r) => results.push(r),
            Err(e) => failures.push((seed, e.to_string())),
        }
    }
    let grid = budget_grid(prepared.config.budget, prepared.config.budget_step);
    let curves: Vec<Vec<CurvePoint>> = results.iter().map(|r| r.ledger.curve(&grid)).collect();
    Ok(ExperimentOutput {
        oracle: OracleRecord {
            key: prepared.oracle_key(),
            solution: oracle.clone(),
        },
        summary: summarize(&curves, &grid),
        results,
        failures,
    })
}

/// Runs the config and writes `config.txt`, per-seed trace, ledger and
/// curve CSVs, and `summary.csv` into `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig, oracle_cache: Option<&Path>) -> Result<ExperimentOutput> {
    let prepared = Prepared::new(cfg)?;
    let oracle = prepared.oracle(oracle_cache)?;
    let output = run_seeds(&prepared, &oracle)?;
    write_outputs(&cfg.out, cfg, &output)?;
    Ok(output)
}

pub fn write_outputs(dir: &Path, cfg: &ExperimentConfig, output: &ExperimentOutput) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::File {
        path: dir.to_path_buf(),
        source,
    })?;
    write_file(&dir.join(CONFIG_FILE), &cfg.to_text())?;
    oracle_cache::store(&dir.join(ORACLE_FILE), std::slice::from_ref(&output.oracle))?;
    let grid = budget_grid(cfg.budget, cfg.budget_step);
    for r in &output.results {
        write_file(&dir.join(trace_file(r.seed)), &trace_to_csv(&r.trace)?)?;
        write_file(&dir.join(ledger_file(r.seed)), &r.ledger.to_csv()?)?;
        write_file(&dir.join(curve_file(r.seed)), &curve_csv(&r.ledger.curve(&grid)))?;
    }
    let missing: Vec<u64> = output.failures.iter().map(|(s, _)| *s).collect();
    write_file(&dir.join(SUMMARY_FILE), &summary_csv(&output.summary, &missing))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_error_definition() {
        let (m, se) = mean_se(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(m, 3.0);
        let sd = (10.0f64 / 4.0).sqrt();
        assert!((se - sd / 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(mean_se(&[7.0]), (7.0, 0.0));
    }

    #[test]
    fn default_kernel_splits_relevant_and_inert() {
        let k = kernel_for(&ExperimentConfig::default(), 12).unwrap();
        assert_eq!(&k.lengthscales()[..6], &[0.25; 6]);
        assert_eq!(&k.lengthscales()[6..], &[100.0; 6]);
    }

    #[test]
    fn sha_hex_is_lowercase_hex() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}

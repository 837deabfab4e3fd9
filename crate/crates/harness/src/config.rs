//! Flat `key = value` experiment configuration.
//!
//! Every key has a default, so a config file only lists what it changes.
//! [`ExperimentConfig::to_text`] writes every key in a fixed order, and
//! parsing that text gives back an equal config.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use bocvs::gp::KernelFamily;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvName {
    Hartmann,
    Ackley,
    Levy,
    Airfoil,
}

impl EnvName {
    pub const ALL: [EnvName; 4] = [EnvName::Hartmann, EnvName::Ackley, EnvName::Levy, EnvName::Airfoil];

    pub fn name(self) -> &'static str {
        match self {
            EnvName::Hartmann => "hartmann",
            EnvName::Ackley => "ackley",
            EnvName::Levy => "levy",
            EnvName::Airfoil => "airfoil",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgorithmName {
    Proposed,
    UcbPsq,
    TsPsq,
    Etc,
}

impl AlgorithmName {
    pub const ALL: [AlgorithmName; 4] = [
        AlgorithmName::Proposed,
        AlgorithmName::UcbPsq,
        AlgorithmName::TsPsq,
        AlgorithmName::Etc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmName::Proposed => "proposed",
            AlgorithmName::UcbPsq => "ucb-psq",
            AlgorithmName::TsPsq => "ts-psq",
            AlgorithmName::Etc => "etc-50",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaChoice {
    Constant(f64),
    Theory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauChoice {
    Pessimistic,
    MeanBased,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub env: EnvName,
    /// Airfoil table; falls back to `$BOCVS_DATA_DIR/airfoil_self_noise.dat`.
    pub dataset: Option<PathBuf>,
    pub ackley_half_width: f64,
    pub noise_sd: f64,
    pub cost_model: String,
    /// Pre-truncation variance of every input distribution.
    pub variance: f64,
    pub algorithm: AlgorithmName,
    pub tau: TauChoice,
    pub exploration_fraction: f64,
    pub alpha: f64,
    /// Exploitation plays per halving of α; `None` means the dimension.
    pub alpha_period: Option<usize>,
    pub beta: BetaChoice,
    pub beta_rkhs_bound: f64,
    pub beta_delta: f64,
    pub mig_horizon: usize,
    pub mc_samples: usize,
    pub candidates: usize,
    pub refine_rounds: usize,
    pub initial_step: f64,
    pub shrink: f64,
    pub incumbents: usize,
    pub kernel: KernelFamily,
    /// Lengthscale on the coordinates the objective depends on; `None` picks
    /// the environment default.
    pub lengthscale: Option<f64>,
    /// Lengthscale on the inert coordinates of the 12-D embeddings.
    pub inert_lengthscale: Option<f64>,
    pub output_scale: Option<f64>,
    /// GP regularizer; `None` uses noise variance plus jitter.
    pub lambda: Option<f64>,
    pub budget: f64,
    pub cost_upper: f64,
    pub cost_floor: f64,
    pub etc_plays: usize,
    pub ts_features: usize,
    pub ts_restarts: usize,
    pub oracle_samples: usize,
    pub oracle_search_samples: usize,
    pub oracle_candidates: usize,
    pub oracle_restarts: usize,
    pub oracle_seed: u64,
    pub airfoil_rmse_threshold: f64,
    pub budget_step: f64,
    pub seeds: Vec<u64>,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            env: EnvName::Hartmann,
            dataset: None,
            ackley_half_width: bocvs::benchmarks::ACKLEY_HALF_WIDTH,
            noise_sd: 0.01,
            cost_model: "cheap".into(),
            variance: 0.02,
            algorithm: AlgorithmName::Proposed,
            tau: TauChoice::Pessimistic,
            exploration_fraction: 0.6,
            alpha: 0.1,
            alpha_period: None,
            beta: BetaChoice::Constant(2.0),
            beta_rkhs_bound: 1.0,
            beta_delta: 0.1,
            mig_horizon: 256,
            mc_samples: 64,
            candidates: 256,
            refine_rounds: 10,
            initial_step: 0.25,
            shrink: 0.5,
            incumbents: 16,
            kernel: KernelFamily::SquaredExponential,
            lengthscale: None,
            inert_lengthscale: None,
            output_scale: None,
            lambda: None,
            budget: 100.0,
            cost_upper: 1.0,
            cost_floor: 0.01,
            etc_plays: 50,
            ts_features: 512,
            ts_restarts: 1,
            oracle_samples: 4096,
            oracle_search_samples: 256,
            oracle_candidates: 512,
            oracle_restarts: 4,
            oracle_seed: 0,
            airfoil_rmse_threshold: bocvs::benchmarks::airfoil::AIRFOIL_RMSE_THRESHOLD,
            budget_step: 5.0,
            seeds: vec![0, 1, 2, 3, 4],
            out: PathBuf::from("runs"),
        }
    }
}

fn auto<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "auto".to_string(), T::to_string)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Every key, one per line, in a fixed order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("env", self.env.name().into());
        put("dataset", auto(&self.dataset.as_ref().map(|p| p.display().to_string())));
        put("ackley_half_width", self.ackley_half_width.to_string());
        put("noise_sd", self.noise_sd.to_string());
        put("cost_model", self.cost_model.clone());
        put("variance", self.variance.to_string());
        put("algorithm", self.algorithm.name().into());
        put(
            "tau",
            match self.tau {
                TauChoice::Pessimistic => "pessimistic".into(),
                TauChoice::MeanBased => "mean".into(),
                TauChoice::Fixed(n) => n.to_string(),
            },
        );
        put("exploration_fraction", self.exploration_fraction.to_string());
        put("alpha", self.alpha.to_string());
        put("alpha_period", auto(&self.alpha_period));
        put(
            "beta",
            match self.beta {
                BetaChoice::Constant(v) => v.to_string(),
                BetaChoice::Theory => "theory".into(),
            },
        );
        put("beta_rkhs_bound", self.beta_rkhs_bound.to_string());
        put("beta_delta", self.beta_delta.to_string());
        put("mig_horizon", self.mig_horizon.to_string());
        put("mc_samples", self.mc_samples.to_string());
        put("candidates", self.candidates.to_string());
        put("refine_rounds", self.refine_rounds.to_string());
        put("initial_step", self.initial_step.to_string());
        put("shrink", self.shrink.to_string());
        put("incumbents", self.incumbents.to_string());
        put("kernel", self.kernel.name().into());
        put("lengthscale", auto(&self.lengthscale));
        put("inert_lengthscale", auto(&self.inert_lengthscale));
        put("output_scale", auto(&self.output_scale));
        put("lambda", auto(&self.lambda));
        put("budget", self.budget.to_string());
        put("cost_upper", self.cost_upper.to_string());
        put("cost_floor", self.cost_floor.to_string());
        put("etc_plays", self.etc_plays.to_string());
        put("ts_features", self.ts_features.to_string());
        put("ts_restarts", self.ts_restarts.to_string());
        put("oracle_samples", self.oracle_samples.to_string());
        put("oracle_search_samples", self.oracle_search_samples.to_string());
        put("oracle_candidates", self.oracle_candidates.to_string());
        put("oracle_restarts", self.oracle_restarts.to_string());
        put("oracle_seed", self.oracle_seed.to_string());
        put("airfoil_rmse_threshold", self.airfoil_rmse_threshold.to_string());
        put("budget_step", self.budget_step.to_string());
        put("seeds", join(&self.seeds));
        put("out", self.out.display().to_string());
        s
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = HashSet::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |m: String| HarnessError::parse(source_name, line, m);
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, found `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            cfg.set(key, value).map_err(err)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        Self::parse(&crate::error::read_file(path)?, &path.display().to_string())
    }

    fn set(&mut self, key: &str, v: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
            v.parse().map_err(|_| format!("`{key}`: cannot parse `{v}`"))
        }
        fn opt<T: std::str::FromStr>(key: &str, v: &str) -> std::result::Result<Option<T>, String> {
            if v == "auto" {
                Ok(None)
            } else {
                num(key, v).map(Some)
            }
        }
        match key {
            "env" => self.env = EnvName::parse(v).ok_or_else(|| format!("unknown environment `{v}`"))?,
            "dataset" => self.dataset = (v != "auto").then(|| PathBuf::from(v)),
            "ackley_half_width" => self.ackley_half_width = num(key, v)?,
            "noise_sd" => self.noise_sd = num(key, v)?,
            "cost_model" => self.cost_model = v.to_string(),
            "variance" => self.variance = num(key, v)?,
            "algorithm" => self.algorithm = AlgorithmName::parse(v).ok_or_else(|| format!("unknown algorithm `{v}`"))?,
            "tau" => {
                self.tau = match v {
                    "pessimistic" => TauChoice::Pessimistic,
                    "mean" => TauChoice::MeanBased,
                    n => TauChoice::Fixed(num(key, n)?),
                }
            }
            "exploration_fraction" => self.exploration_fraction = num(key, v)?,
            "alpha" => self.alpha = num(key, v)?,
            "alpha_period" => self.alpha_period = opt(key, v)?,
            "beta" => {
                self.beta = match v {
                    "theory" => BetaChoice::Theory,
                    b => BetaChoice::Constant(num(key, b)?),
                }
            }
            "beta_rkhs_bound" => self.beta_rkhs_bound = num(key, v)?,
            "beta_delta" => self.beta_delta = num(key, v)?,
            "mig_horizon" => self.mig_horizon = num(key, v)?,
            "mc_samples" => self.mc_samples = num(key, v)?,
            "candidates" => self.candidates = num(key, v)?,
            "refine_rounds" => self.refine_rounds = num(key, v)?,
            "initial_step" => self.initial_step = num(key, v)?,
            "shrink" => self.shrink = num(key, v)?,
            "incumbents" => self.incumbents = num(key, v)?,
            "kernel" => self.kernel = KernelFamily::parse(v).map_err(|e| e.to_string())?,
            "lengthscale" => self.lengthscale = opt(key, v)?,
            "inert_lengthscale" => self.inert_lengthscale = opt(key, v)?,
            "output_scale" => self.output_scale = opt(key, v)?,
            "lambda" => self.lambda = opt(key, v)?,
            "budget" => self.budget = num(key, v)?,
            "cost_upper" => self.cost_upper = num(key, v)?,
            "cost_floor" => self.cost_floor = num(key, v)?,
            "etc_plays" => self.etc_plays = num(key, v)?,
            "ts_features" => self.ts_features = num(key, v)?,
            "ts_restarts" => self.ts_restarts = num(key, v)?,
            "oracle_samples" => self.oracle_samples = num(key, v)?,
            "oracle_search_samples" => self.oracle_search_samples = num(key, v)?,
            "oracle_candidates" => self.oracle_candidates = num(key, v)?,
            "oracle_restarts" => self.oracle_restarts = num(key, v)?,
            "oracle_seed" => self.oracle_seed = num(key, v)?,
            "airfoil_rmse_threshold" => self.airfoil_rmse_threshold = num(key, v)?,
            "budget_step" => self.budget_step = num(key, v)?,
            "seeds" => {
                self.seeds = if v.is_empty() {
                    Vec::new()
                } else {
                    v.split(',').map(|s| num(key, s.trim())).collect::<std::result::Result<_, _>>()?
                }
            }
            "out" => self.out = PathBuf::from(v),
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Range checks that need no environment construction.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::config(m));
        let positive = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                bad(format!("{name} = {v} must be positive"))
            }
        };
        positive("budget", self.budget)?;
        positive("cost_upper", self.cost_upper)?;
        positive("cost_floor", self.cost_floor)?;
        positive("variance", self.variance)?;
        positive("ackley_half_width", self.ackley_half_width)?;
        positive("budget_step", self.budget_step)?;
        positive("airfoil_rmse_threshold", self.airfoil_rmse_threshold)?;
        for (name, v) in [
            ("lengthscale", self.lengthscale),
            ("inert_lengthscale", self.inert_lengthscale),
            ("output_scale", self.output_scale),
            ("lambda", self.lambda),
        ] {
            if let Some(v) = v {
                positive(name, v)?;
            }
        }
        if let BetaChoice::Constant(b) = self.beta {
            positive("beta", b)?;
        }
        if !(self.noise_sd.is_finite() && self.noise_sd >= 0.0) {
            return bad(format!("noise_sd = {} must be nonnegative", self.noise_sd));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha = {} must lie in [0, 1]", self.alpha));
        }
        if self.tau == TauChoice::Fixed(0) {
            return bad("tau must be at least 1".into());
        }
        if self.alpha_period == Some(0) {
            return bad("alpha_period must be at least 1".into());
        }
        for (name, v) in [
            ("mc_samples", self.mc_samples),
            ("candidates", self.candidates),
            ("etc_plays", self.etc_plays),
            ("ts_features", self.ts_features),
            ("oracle_samples", self.oracle_samples),
            ("oracle_search_samples", self.oracle_search_samples),
            ("oracle_candidates", self.oracle_candidates),
            ("oracle_restarts", self.oracle_restarts),
            ("mig_horizon", self.mig_horizon),
        ] {
            if v == 0 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        if self.cost_model != "cheap" && self.cost_model != "moderate" {
            return bad(format!("unknown cost model `{}`", self.cost_model));
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        Ok(())
    }

    /// The config with per-run bookkeeping (seeds, output directory) reset,
    /// used to decide whether two runs are comparable.
    pub fn comparable(&self) -> ExperimentConfig {
        ExperimentConfig {
            seeds: Vec::new(),
            out: PathBuf::new(),
            ..self.clone()
        }
    }
}

//! Airfoil self-noise table ingestion and the GP-mean surrogate objective.
//!
//! The table is the UCI layout: whitespace-separated rows of frequency,
//! angle of attack, chord length, free-stream velocity, suction-side
//! displacement thickness and the scaled sound pressure level.

use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::environment::{ObjectiveEnvironment, SHIFT_MARGIN};
use crate::error::{Error, Result};
use crate::gp::{GaussianProcess, KernelFamily, KernelSpec};
use crate::lowdisc::shifted_halton;

pub const AIRFOIL_FILE: &str = "airfoil_self_noise.dat";
pub const AIRFOIL_COLUMNS: usize = 6;
pub const AIRFOIL_INPUTS: usize = 5;
pub const AIRFOIL_MIN_ROWS: usize = 1000;

/// Fixed surrogate hyperparameters on the scaled inputs.
pub const AIRFOIL_LENGTHSCALE: f64 = 0.15;
pub const AIRFOIL_LAMBDA: f64 = 0.01;
/// Training RMSE the surrogate must stay under, in output standard deviations.
pub const AIRFOIL_RMSE_THRESHOLD: f64 = 0.5;

/// Raw numeric rows of the dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct AirfoilTable {
    rows: Vec<[f64; AIRFOIL_COLUMNS]>,
}

impl AirfoilTable {
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        Self::parse_with_min_rows(text, source_name, AIRFOIL_MIN_ROWS)
    }

    pub fn parse_with_min_rows(text: &str, source_name: &str, min_rows: usize) -> Result<Self> {
        let ingest = |line: usize, message: String| Error::Ingest {
            source_name: source_name.to_string(),
            line,
            message,
        };
        let mut rows = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line_no = k + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut row = [0.0; AIRFOIL_COLUMNS];
            let mut fields = line.split_whitespace();
            for (c, slot) in row.iter_mut().enumerate() {
                let field = fields
                    .next()
                    .ok_or_else(|| ingest(line_no, format!("expected {AIRFOIL_COLUMNS} columns, found {c}")))?;
                let v: f64 = field
                    .parse()
                    .map_err(|_| ingest(line_no, format!("column {}: `{field}` is not a number", c + 1)))?;
                if !v.is_finite() {
                    return Err(ingest(line_no, format!("column {}: non-finite value", c + 1)));
                }
                *slot = v;
            }
            if fields.next().is_some() {
                return Err(ingest(line_no, format!("more than {AIRFOIL_COLUMNS} columns")));
            }
            rows.push(row);
        }
        if rows.len() < min_rows {
            return Err(ingest(
                text.lines().count(),
                format!("{} data rows, need at least {min_rows}", rows.len()),
            ));
        }
        Ok(AirfoilTable { rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn rows(&self) -> &[[f64; AIRFOIL_COLUMNS]] {
        &self.rows
    }
}

/// Inputs scaled to `[0, 1]` and standardized outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct AirfoilData {
    pub inputs: Vec<Vec<f64>>,
    pub outputs: Vec<f64>,
    pub output_mean: f64,
    pub output_sd: f64,
}

/// Log-transforms inputs 1 and 5, min-max scales all five inputs and
/// standardizes the output with the sample standard deviation.
pub fn preprocess(table: &AirfoilTable) -> Result<AirfoilData> {
    let n = table.rows.len();
    if n < 2 {
        return Err(Error::config("airfoil table needs at least two rows"));
    }
    let mut columns: Vec<Vec<f64>> = (0..AIRFOIL_INPUTS)
        .map(|c| table.rows.iter().map(|r| r[c]).collect())
        .collect();
    for c in [0, 4] {
        for (row, v) in columns[c].iter_mut().enumerate() {
            if !(*v > 0.0) {
                return Err(Error::Ingest {
                    source_name: "airfoil table".into(),
                    line: row + 1,
                    message: format!("column {} must be positive for the log transform", c + 1),
                });
            }
            *v = v.ln();
        }
    }
    for (c, col) in columns.iter_mut().enumerate() {
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            return Err(Error::config(format!("airfoil input {} is constant", c + 1)));
        }
        if !(hi - lo).is_finite() {
            return Err(Error::config(format!("airfoil input {} range overflows", c + 1)));
        }
        for v in col.iter_mut() {
            *v = (*v - lo) / (hi - lo);
        }
    }
    let raw: Vec<f64> = table.rows.iter().map(|r| r[AIRFOIL_INPUTS]).collect();
    let mean = raw.iter().sum::<f64>() / n as f64;
    let sd = (raw.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    if !(mean.is_finite() && sd.is_finite()) {
        return Err(Error::config("airfoil output overflows"));
    }
    if !(sd > 0.0) {
        return Err(Error::config("airfoil output is constant"));
    }
    let outputs = raw.iter().map(|y| (y - mean) / sd).collect();
    let inputs = (0..n).map(|r| columns.iter().map(|c| c[r]).collect()).collect();
    Ok(AirfoilData {
        inputs,
        outputs,
        output_mean: mean,
        output_sd: sd,
    })
}

/// GP posterior mean fitted to the preprocessed table.
#[derive(Debug, Clone)]
pub struct AirfoilSurrogate {
    gp: Arc<GaussianProcess>,
}

impl AirfoilSurrogate {
    pub fn fit(data: &AirfoilData) -> Result<Self> {
        let kernel = KernelSpec::isotropic(KernelFamily::SquaredExponential, AIRFOIL_INPUTS, AIRFOIL_LENGTHSCALE)?;
        let gp = GaussianProcess::from_data(kernel, AIRFOIL_LAMBDA, &data.inputs, &data.outputs)?;
        Ok(AirfoilSurrogate { gp: Arc::new(gp) })
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.gp.posterior_mean(x).expect("query inside the unit cube")
    }

    /// Root-mean-square error on the training rows, in standardized units.
    pub fn training_rmse(&self, data: &AirfoilData) -> f64 {
        let se: f64 = data
            .inputs
            .iter()
            .zip(&data.outputs)
            .map(|(x, y)| (self.predict(x) - y).powi(2))
            .sum();
        (se / data.outputs.len() as f64).sqrt()
    }

    /// Lowest surrogate value over the training inputs and a dense
    /// quasi-random cover of the cube.
    fn empirical_min(&self, data: &AirfoilData) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA1F0);
        shifted_halton(1 << 14, AIRFOIL_INPUTS, &mut rng)
            .iter()
            .chain(&data.inputs)
            .map(|x| self.predict(x))
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn make_airfoil_env_from(data: &AirfoilData) -> Result<ObjectiveEnvironment> {
    let surrogate = AirfoilSurrogate::fit(data)?;
    let shift = -surrogate.empirical_min(data) + SHIFT_MARGIN;
    ObjectiveEnvironment::new("airfoil", AIRFOIL_INPUTS, 0.01, shift, move |x: &[f64]| {
        (surrogate.predict(x) + shift).max(0.0)
    })
}

pub fn make_airfoil_env(dataset: &Path) -> Result<ObjectiveEnvironment> {
    make_airfoil_env_from(&preprocess(&AirfoilTable::read(dataset)?)?)
}

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::query::ControlSetFamily;

pub const CHEAP_COSTS: [f64; 7] = [0.01, 0.01, 0.01, 0.1, 0.1, 0.1, 1.0];
pub const MODERATE_COSTS: [f64; 7] = [0.1, 0.1, 0.1, 0.2, 0.2, 0.2, 1.0];

/// Sets whose mean cost reaches this level get additive Gaussian noise.
pub const NOISE_THRESHOLD: f64 = 0.1;
pub const COST_NOISE_SD: f64 = 0.02;

/// Random per-play cost of each control set.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    means: Vec<f64>,
    noise_sd: f64,
    threshold: f64,
    clamp: bool,
}

impl CostModel {
    pub fn new(means: Vec<f64>, noise_sd: f64) -> Result<Self> {
        if means.is_empty() {
            return Err(Error::config("cost model needs at least one mean cost"));
        }
        if let Some(c) = means.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
            return Err(Error::config(format!("mean cost {c} must be a nonnegative real")));
        }
        if !(noise_sd.is_finite() && noise_sd >= 0.0) {
            return Err(Error::config(format!("cost noise {noise_sd} must be nonnegative")));
        }
        Ok(CostModel {
            means,
            noise_sd,
            threshold: NOISE_THRESHOLD,
            clamp: true,
        })
    }

    pub fn cheap() -> Self {
        Self::new(CHEAP_COSTS.to_vec(), COST_NOISE_SD).expect("static costs")
    }

    pub fn moderate() -> Self {
        Self::new(MODERATE_COSTS.to_vec(), COST_NOISE_SD).expect("static costs")
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "cheap" => Ok(Self::cheap()),
            "moderate" => Ok(Self::moderate()),
            other => Err(Error::config(format!("unknown cost set `{other}`"))),
        }
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.means[i]
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    pub fn noise_sd(&self) -> f64 {
        self.noise_sd
    }

    pub fn min_mean(&self) -> f64 {
        self.means.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Mean cost plus noise when the mean reaches the threshold, clamped at 0.
    pub fn draw<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> f64 {
        let mean = self.means[i];
        let raw = if mean >= self.threshold && self.noise_sd > 0.0 {
            mean + Normal::new(0.0, self.noise_sd).expect("validated noise").sample(rng)
        } else {
            mean
        };
        self.clamp_draw(raw)
    }

    pub fn clamp_draw(&self, raw: f64) -> f64 {
        if self.clamp {
            raw.max(0.0)
        } else {
            raw
        }
    }

    /// Checks that `I_i ⊂ I_j` implies `c_i ≤ c_j` and that the model has one
    /// mean per set.
    ///
    /// The order is weak: the paper's cost sets charge `{10,11,12}` and
    /// `{7,…,12}` the same mean.
    pub fn check_against(&self, family: &ControlSetFamily) -> Result<()> {
        if self.means.len() != family.len() {
            return Err(Error::config(format!(
                "{} mean costs for {} control sets",
                self.means.len(),
                family.len()
            )));
        }
        let sets = family.sets();
        for (i, a) in sets.iter().enumerate() {
            for (j, b) in sets.iter().enumerate() {
                let strict = a.is_subset_of(b) && a.size() < b.size();
                if strict && self.means[i] > self.means[j] {
                    return Err(Error::config(format!(
                        "control set {} is a subset of set {} but costs {} > {}",
                        i + 1,
                        j + 1,
                        self.means[i],
                        self.means[j]
                    )));
                }
            }
        }
        Ok(())
    }
}

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::functions::{ackley, hartmann6, levy, levy_upper, ACKLEY_UPPER};
use crate::error::{Error, Result};

type ObjectiveFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Margin added on top of the lower bound when shifting an objective to be
/// nonnegative.
pub const SHIFT_MARGIN: f64 = 0.1;

/// Black-box objective `g: [0, 1]^d → ℝ≥0` with additive Gaussian
/// observation noise.
///
/// `shift` is the constant added to the maximization form of the raw
/// function, so `raw(x) = value(x) − shift`.
#[derive(Clone)]
pub struct ObjectiveEnvironment {
    name: String,
    dim: usize,
    noise_sd: f64,
    shift: f64,
    objective: ObjectiveFn,
}

impl fmt::Debug for ObjectiveEnvironment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveEnvironment")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("noise_sd", &self.noise_sd)
            .field("shift", &self.shift)
            .finish_non_exhaustive()
    }
}

impl ObjectiveEnvironment {
    /// `objective` must already include `shift`.
    pub fn new<F>(name: impl Into<String>, dim: usize, noise_sd: f64, shift: f64, objective: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if !(noise_sd.is_finite() && noise_sd >= 0.0) {
            return Err(Error::config(format!("observation noise {noise_sd} must be nonnegative")));
        }
        if dim == 0 {
            return Err(Error::config("objective dimension must be at least 1"));
        }
        Ok(ObjectiveEnvironment {
            name: name.into(),
            dim,
            noise_sd,
            shift,
            objective: Arc::new(objective),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn noise_sd(&self) -> f64 {
        self.noise_sd
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn with_noise(mut self, noise_sd: f64) -> Result<Self> {
        if !(noise_sd.is_finite() && noise_sd >= 0.0) {
            return Err(Error::config(format!("observation noise {noise_sd} must be nonnegative")));
        }
        self.noise_sd = noise_sd;
        Ok(self)
    }

    /// Noise-free shifted value.
    pub fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        (self.objective)(x)
    }

    pub fn raw(&self, x: &[f64]) -> f64 {
        self.value(x) - self.shift
    }

    pub fn observe<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> f64 {
        let f = self.value(x);
        if self.noise_sd == 0.0 {
            f
        } else {
            f + Normal::new(0.0, self.noise_sd).expect("validated noise").sample(rng)
        }
    }
}

/// Negated Hartmann-6 on coordinates 1–6 of a 12-D cube; 7–12 are inert.
pub fn make_hartmann_env() -> ObjectiveEnvironment {
    // −H takes values in (0, 3.33), so its lower bound is 0.
    let shift = SHIFT_MARGIN;
    ObjectiveEnvironment::new("hartmann", 12, 0.01, shift, move |x: &[f64]| {
        -hartmann6(&x[..6]) + shift
    })
    .expect("static parameters")
}

pub const ACKLEY_HALF_WIDTH: f64 = 5.0;

/// Negated Ackley on coordinates 1–6 mapped affinely to `[−5, 5]`; 7–12 inert.
pub fn make_ackley_env() -> ObjectiveEnvironment {
    make_ackley_env_on(ACKLEY_HALF_WIDTH).expect("static parameters")
}

/// Same with the cube mapped to `[−w, w]`.
pub fn make_ackley_env_on(half_width: f64) -> Result<ObjectiveEnvironment> {
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::config(format!("Ackley half-width {half_width} must be positive")));
    }
    let shift = ACKLEY_UPPER + SHIFT_MARGIN;
    ObjectiveEnvironment::new("ackley", 12, 0.01, shift, move |x: &[f64]| {
        let z: Vec<f64> = x[..6].iter().map(|v| half_width * (2.0 * v - 1.0)).collect();
        -ackley(&z) + shift
    })
}

/// Negated Levy on coordinates 1–6 mapped to `[−10, 10]`; 7–12 inert.
pub fn make_levy_env() -> ObjectiveEnvironment {
    let shift = levy_upper(6) + SHIFT_MARGIN;
    ObjectiveEnvironment::new("levy", 12, 0.01, shift, move |x: &[f64]| {
        let z: Vec<f64> = x[..6].iter().map(|v| -10.0 + 20.0 * v).collect();
        -levy(&z) + shift
    })
    .expect("static parameters")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::functions::{HARTMANN6_ARGMIN, HARTMANN6_MIN};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..12).map(|_| rng.random::<f64>()).collect()
    }

    #[test]
    fn inert_coordinates_do_not_matter() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for env in [make_hartmann_env(), make_ackley_env(), make_levy_env()] {
            for _ in 0..1000 {
                let x = random_point(&mut rng);
                let mut y = x.clone();
                for v in &mut y[6..] {
                    *v = rng.random();
                }
                assert_eq!(env.value(&x), env.value(&y), "{}", env.name());
            }
        }
    }

    #[test]
    fn shifted_values_are_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for env in [make_hartmann_env(), make_ackley_env(), make_levy_env()] {
            for _ in 0..2000 {
                assert!(env.value(&random_point(&mut rng)) >= 0.0);
            }
        }
    }

    #[test]
    fn hartmann_maximum_above_zero_level() {
        let env = make_hartmann_env();
        let mut x = [0.5; 12];
        x[..6].copy_from_slice(&HARTMANN6_ARGMIN);
        assert!((env.raw(&x) - (-HARTMANN6_MIN)).abs() < 1e-5);
    }

    #[test]
    fn ackley_maximum_at_centre() {
        let env = make_ackley_env();
        let centre = [0.5; 12];
        assert!((env.value(&centre) - env.shift()).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..1000 {
            assert!(env.value(&random_point(&mut rng)) <= env.value(&centre));
        }
    }

    #[test]
    fn observation_noise_is_centred() {
        let env = make_hartmann_env().with_noise(0.1).unwrap();
        let x = [0.3; 12];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mean = (0..4000).map(|_| env.observe(&x, &mut rng)).sum::<f64>() / 4000.0;
        assert!((mean - env.value(&x)).abs() < 0.01);
    }
}

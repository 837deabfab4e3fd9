//! Approximate posterior function samples from random Fourier features.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{Error, Result};
use crate::gp::{KernelFamily, KernelSpec};

/// `φ(x) = √(2s/F)·cos(Ωx + b)` with `Ω_jk ~ N(0, 1/ℓ_k²)`, so that
/// `E[φ(x)ᵀφ(x')]` is the squared-exponential kernel.
#[derive(Debug, Clone)]
pub struct RandomFeatures {
    dim: usize,
    omega: Vec<f64>,
    offset: Vec<f64>,
    amplitude: f64,
}

impl RandomFeatures {
    pub fn draw<R: Rng + ?Sized>(kernel: &KernelSpec, count: usize, rng: &mut R) -> Result<Self> {
        if kernel.family() != KernelFamily::SquaredExponential {
            return Err(Error::config(format!(
                "feature sampling needs the squared-exponential kernel, not {}",
                kernel.family().name()
            )));
        }
        if count == 0 {
            return Err(Error::config("feature count must be at least 1"));
        }
        let dim = kernel.dim();
        let mut omega = Vec::with_capacity(count * dim);
        for _ in 0..count {
            for l in kernel.lengthscales() {
                let z: f64 = StandardNormal.sample(rng);
                omega.push(z / l);
            }
        }
        let phase = Uniform::new(0.0, std::f64::consts::TAU).expect("valid range");
        let offset = (0..count).map(|_| phase.sample(rng)).collect();
        Ok(RandomFeatures {
            dim,
            omega,
            offset,
            amplitude: (2.0 * kernel.output_scale() / count as f64).sqrt(),
        })
    }

    pub fn len(&self) -> usize {
        self.offset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offset.is_empty()
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for ((o, w), b) in out.iter_mut().zip(self.omega.chunks_exact(self.dim)).zip(&self.offset) {
            let arg: f64 = w.iter().zip(x).map(|(a, v)| a * v).sum();
            *o = self.amplitude * (arg + b).cos();
        }
    }
}

/// Bayesian linear regression on the features with prior `w ~ N(0, I)` and
/// noise variance `λ`.
#[derive(Debug, Clone)]
pub struct FeatureRegression {
    features: RandomFeatures,
    lambda: f64,
    precision: DMatrix<f64>,
    moment: DVector<f64>,
}

/// A fixed function `f̃(x) = φ(x)ᵀw`.
#[derive(Debug, Clone)]
pub struct SampledFunction<'a> {
    features: &'a RandomFeatures,
    weights: Vec<f64>,
}

impl SampledFunction<'_> {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut phi = vec![0.0; self.features.len()];
        self.features.eval_into(x, &mut phi);
        phi.iter().zip(&self.weights).map(|(a, b)| a * b).sum()
    }
}

impl FeatureRegression {
    pub fn new(features: RandomFeatures, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::config(format!("regularizer λ = {lambda} must be positive")));
        }
        let f = features.len();
        Ok(FeatureRegression {
            features,
            lambda,
            precision: DMatrix::identity(f, f) * lambda,
            moment: DVector::zeros(f),
        })
    }

    pub fn observe(&mut self, x: &[f64], y: f64) {
        let mut phi = vec![0.0; self.features.len()];
        self.features.eval_into(x, &mut phi);
        let phi = DVector::from_vec(phi);
        self.precision.ger(1.0, &phi, &phi, 1.0);
        self.moment.axpy(y, &phi, 1.0);
    }

    /// `w = A⁻¹Φᵀy + √λ·L⁻ᵀz` with `A = ΦᵀΦ + λI = LLᵀ`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SampledFunction<'_>> {
        let chol = self
            .precision
            .clone()
            .cholesky()
            .ok_or_else(|| Error::config("feature precision matrix lost positive definiteness"))?;
        let mean = chol.solve(&self.moment);
        let z = DVector::from_fn(self.features.len(), |_, _| StandardNormal.sample(rng));
        let noise = chol
            .l()
            .transpose()
            .solve_upper_triangular(&z)
            .expect("Cholesky diagonal is positive");
        let weights = (mean + noise * self.lambda.sqrt()).as_slice().to_vec();
        Ok(SampledFunction {
            features: &self.features,
            weights,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn features_approximate_kernel() {
        let k = KernelSpec::isotropic(KernelFamily::SquaredExponential, 2, 0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = RandomFeatures::draw(&k, 20_000, &mut rng).unwrap();
        let (a, b) = ([0.2, 0.4], [0.35, 0.3]);
        let mut pa = vec![0.0; f.len()];
        let mut pb = vec![0.0; f.len()];
        f.eval_into(&a, &mut pa);
        f.eval_into(&b, &mut pb);
        let approx: f64 = pa.iter().zip(&pb).map(|(x, y)| x * y).sum();
        assert!((approx - k.eval(&a, &b)).abs() < 0.03);
    }

    #[test]
    fn matern_is_rejected() {
        let k = KernelSpec::isotropic(KernelFamily::Matern52, 2, 0.3).unwrap();
        assert!(RandomFeatures::draw(&k, 8, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn sample_is_a_fixed_function() {
        let k = KernelSpec::isotropic(KernelFamily::SquaredExponential, 1, 0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut reg = FeatureRegression::new(RandomFeatures::draw(&k, 64, &mut rng).unwrap(), 0.01).unwrap();
        reg.observe(&[0.3], 1.0);
        let f = reg.sample(&mut rng).unwrap();
        assert_eq!(f.eval(&[0.7]), f.eval(&[0.7]));
    }
}

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    SquaredExponential,
    Matern52,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::SquaredExponential => "squared-exponential",
            KernelFamily::Matern52 => "matern-5/2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "squared-exponential" | "se" | "rbf" => Ok(KernelFamily::SquaredExponential),
            "matern-5/2" | "matern52" => Ok(KernelFamily::Matern52),
            other => Err(Error::config(format!("unknown kernel family `{other}`"))),
        }
    }
}

/// Stationary ARD kernel with one lengthscale per input dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    lengthscales: Vec<f64>,
    output_scale: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, lengthscales: Vec<f64>, output_scale: f64) -> Result<Self> {
        if lengthscales.is_empty() {
            return Err(Error::config("kernel needs at least one lengthscale"));
        }
        if let Some(l) = lengthscales.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::config(format!("lengthscale {l} is not a positive real")));
        }
        if !(output_scale.is_finite() && output_scale > 0.0) {
            return Err(Error::config(format!(
                "output scale {output_scale} is not a positive real"
            )));
        }
        Ok(KernelSpec {
            family,
            lengthscales,
            output_scale,
        })
    }

    pub fn squared_exponential(lengthscales: Vec<f64>) -> Result<Self> {
        Self::new(KernelFamily::SquaredExponential, lengthscales, 1.0)
    }

    pub fn isotropic(family: KernelFamily, dim: usize, lengthscale: f64) -> Result<Self> {
        Self::new(family, vec![lengthscale; dim], 1.0)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn lengthscales(&self) -> &[f64] {
        &self.lengthscales
    }

    pub fn output_scale(&self) -> f64 {
        self.output_scale
    }

    pub fn dim(&self) -> usize {
        self.lengthscales.len()
    }

    /// `k(x, x)`, identical for every `x` because the kernel is stationary.
    pub fn diag(&self) -> f64 {
        self.output_scale
    }

    /// Scales `x` by the inverse lengthscales into `out`.
    pub(crate) fn scale_into(&self, x: &[f64], out: &mut [f64]) {
        for ((o, v), l) in out.iter_mut().zip(x).zip(&self.lengthscales) {
            *o = v / l;
        }
    }

    /// Kernel value from the squared distance between two pre-scaled points.
    #[inline]
    pub(crate) fn from_scaled_sq_dist(&self, r2: f64) -> f64 {
        match self.family {
            KernelFamily::SquaredExponential => self.output_scale * (-0.5 * r2).exp(),
            KernelFamily::Matern52 => {
                let r = (5.0 * r2).sqrt();
                self.output_scale * (1.0 + r + r * r / 3.0) * (-r).exp()
            }
        }
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), self.dim());
        debug_assert_eq!(b.len(), self.dim());
        let r2: f64 = a
            .iter()
            .zip(b)
            .zip(&self.lengthscales)
            .map(|((x, y), l)| {
                let d = (x - y) / l;
                d * d
            })
            .sum();
        self.from_scaled_sq_dist(r2)
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(KernelSpec::squared_exponential(vec![]).is_err());
        assert!(KernelSpec::squared_exponential(vec![0.0]).is_err());
        assert!(KernelSpec::new(KernelFamily::Matern52, vec![1.0], -1.0).is_err());
    }

    #[test]
    fn unit_at_zero_distance() {
        for family in [KernelFamily::SquaredExponential, KernelFamily::Matern52] {
            let k = KernelSpec::isotropic(family, 3, 0.3).unwrap();
            let x = [0.1, 0.5, 0.9];
            assert!((k.eval(&x, &x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn matern_closed_form() {
        let k = KernelSpec::isotropic(KernelFamily::Matern52, 1, 0.5).unwrap();
        let r: f64 = 0.4 / 0.5;
        let s5 = 5f64.sqrt();
        let expected = (1.0 + s5 * r + 5.0 * r * r / 3.0) * (-s5 * r).exp();
        assert!((k.eval(&[0.1], &[0.5]) - expected).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn bounded_and_symmetric(a in proptest::collection::vec(0.0..1.0f64, 4),
                                 b in proptest::collection::vec(0.0..1.0f64, 4),
                                 l in 0.05..2.0f64,
                                 matern in any::<bool>()) {
            let family = if matern { KernelFamily::Matern52 } else { KernelFamily::SquaredExponential };
            let k = KernelSpec::isotropic(family, 4, l).unwrap();
            let ab = k.eval(&a, &b);
            prop_assert!(ab <= 1.0 + 1e-15);
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(ab, k.eval(&b, &a));
        }
    }
}

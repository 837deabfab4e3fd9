//! Raw synthetic test functions on their native domains.

use std::f64::consts::{E, PI};

const HARTMANN_ALPHA: [f64; 4] = [1.0, 1.2, 3.0, 3.2];
const HARTMANN_A: [[f64; 6]; 4] = [
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];
const HARTMANN_P: [[f64; 6]; 4] = [
    [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
    [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
    [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
    [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
];

/// Location of the global minimum of [`hartmann6`].
pub const HARTMANN6_ARGMIN: [f64; 6] = [0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573];
pub const HARTMANN6_MIN: f64 = -3.32237;

/// Six-dimensional Hartmann function on `[0, 1]^6`; values in `(−3.33, 0)`.
pub fn hartmann6(x: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), 6);
    -(0..4)
        .map(|i| {
            let inner: f64 = (0..6)
                .map(|j| HARTMANN_A[i][j] * (x[j] - HARTMANN_P[i][j]).powi(2))
                .sum();
            HARTMANN_ALPHA[i] * (-inner).exp()
        })
        .sum::<f64>()
}

/// Ackley function with the usual `(20, 0.2, 2π)` constants; `0` at the
/// origin and bounded above by `20 + e`.
pub fn ackley(z: &[f64]) -> f64 {
    let n = z.len() as f64;
    let sq = z.iter().map(|v| v * v).sum::<f64>() / n;
    let cos = z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
    -20.0 * (-0.2 * sq.sqrt()).exp() - cos.exp() + 20.0 + E
}

pub const ACKLEY_UPPER: f64 = 20.0 + E;

/// Levy function; `0` at `(1, …, 1)`.
pub fn levy(z: &[f64]) -> f64 {
    let w: Vec<f64> = z.iter().map(|v| 1.0 + (v - 1.0) / 4.0).collect();
    let d = w.len();
    let head = (PI * w[0]).sin().powi(2);
    let body: f64 = w[..d - 1]
        .iter()
        .map(|wi| (wi - 1.0).powi(2) * (1.0 + 10.0 * (PI * wi + 1.0).sin().powi(2)))
        .sum();
    let last = (w[d - 1] - 1.0).powi(2) * (1.0 + (2.0 * PI * w[d - 1]).sin().powi(2));
    head + body + last
}

/// Upper bound of [`levy`] on `[−10, 10]^d`, from `(w − 1)² ≤ 3.25²`.
pub fn levy_upper(d: usize) -> f64 {
    let w2 = 3.25f64 * 3.25;
    1.0 + (d as f64 - 1.0) * w2 * 11.0 + w2 * 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hartmann_reference_minimum() {
        assert!((hartmann6(&HARTMANN6_ARGMIN) - HARTMANN6_MIN).abs() < 1e-5);
    }

    #[test]
    fn ackley_zero_at_origin() {
        assert!(ackley(&[0.0; 6]).abs() < 1e-14);
        assert!(ackley(&[1.3, -2.0, 4.9, 0.5, -3.3, 2.2]) < ACKLEY_UPPER);
    }

    #[test]
    fn levy_zero_at_ones() {
        assert!(levy(&[1.0; 6]).abs() < 1e-14);
        assert!(levy(&[-10.0, 10.0, -10.0, 10.0, -9.5, 7.0]) <= levy_upper(6));
    }
}

//! Randomly shifted Halton points in the unit cube.

use rand::Rng;

const PRIMES: [u32; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131,
];

fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let base = base as u64;
    let inv = 1.0 / base as f64;
    let mut factor = inv;
    let mut value = 0.0;
    while index > 0 {
        value += (index % base) as f64 * factor;
        index /= base;
        factor *= inv;
    }
    value
}

/// `count` points in `[0, 1)^dim`, Cranley-Patterson rotated by a shift drawn
/// from `rng`. Dimensions beyond the prime table fall back to uniform draws.
pub fn shifted_halton<R: Rng + ?Sized>(count: usize, dim: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    (0..count)
        .map(|n| {
            (0..dim)
                .map(|j| match PRIMES.get(j) {
                    Some(&p) => (radical_inverse(n as u64 + 1, p) + shift[j]).fract(),
                    None => rng.random::<f64>(),
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }

    #[test]
    fn points_fill_the_cube() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts = shifted_halton(1024, 3, &mut rng);
        for j in 0..3 {
            let mean = pts.iter().map(|p| p[j]).sum::<f64>() / 1024.0;
            assert!((mean - 0.5).abs() < 0.01, "dim {j} mean {mean}");
        }
        assert!(pts.iter().flatten().all(|v| (0.0..1.0).contains(v)));
    }
}

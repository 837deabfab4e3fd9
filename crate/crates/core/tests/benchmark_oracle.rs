use bocvs::benchmarks::*;
use bocvs::query::{expected_value, InputDistribution, McSampleBank, PartialQuery};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn hartmann_oracle_is_stable_across_seeds() {
    let env = make_hartmann_env();
    let family = synthetic_family(InputDistribution::truncated_normal(0.5, 0.02).unwrap()).unwrap();
    let costs = CostModel::cheap();
    let a = compute_oracle(&env, &family, 0.1, &costs, &OracleSpec::default(), 1).unwrap();
    let b = compute_oracle(&env, &family, 0.1, &costs, &OracleSpec::default(), 2).unwrap();
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x - y).abs() <= 0.02 * x.abs().max(y.abs()), "{x} vs {y}");
    }
    assert_eq!(a.tolerated, b.tolerated);
    assert!(a.is_tolerated(4) && a.is_tolerated(6), "{:?}", a.tolerated);
    assert_eq!(a.cheapest_tolerated, 4);
    let all = a.with_alpha(1.0, &costs).unwrap();
    assert_eq!(all.tolerated, (0..7).collect::<Vec<_>>());
    assert_eq!(all.cheapest_tolerated, 0);
}

#[test]
fn full_control_expectation_is_the_point_value() {
    let env = make_ackley_env();
    let family = synthetic_family(InputDistribution::truncated_normal(0.5, 0.04).unwrap()).unwrap();
    let bank = McSampleBank::draw(&family, 64, 3).unwrap();
    let x: Vec<f64> = (0..12).map(|k| (k as f64 + 0.5) / 12.0).collect();
    let pq = PartialQuery { set: 6, values: x.clone() };
    assert_eq!(expected_value(|q: &[f64]| env.value(q), &family, &pq, &bank).unwrap(), env.value(&x));
}

#[test]
fn expensive_set_cost_draws_average_to_the_mean() {
    let costs = CostModel::cheap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 10_000;
    let mean = (0..n).map(|_| costs.draw(6, &mut rng)).sum::<f64>() / n as f64;
    assert!((mean - 1.0).abs() < 0.01);
    assert_eq!(costs.draw(0, &mut rng), 0.01);
    assert_eq!(costs.clamp_draw(-0.003), 0.0);
}

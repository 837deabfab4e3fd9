use std::path::Path;

use bocvs::algorithm::{Phase, RunTrace, TraceRecord};
use bocvs::benchmarks::{make_hartmann_env, synthetic_family, CostModel, OracleSolution};
use bocvs::query::{InputDistribution, McSampleBank, PartialQuery};
use bocvs_harness::config::{AlgorithmName, ExperimentConfig};
use bocvs_harness::experiment::{run_experiment, summary_csv, Prepared, SummaryRow};
use bocvs_harness::ledger::{budget_grid, RegretLedger};
use bocvs_harness::report::{aggregate, load_run, report_csv, report_table};
use bocvs_harness::HarnessError;
use proptest::prelude::*;

fn small_config(out: &Path) -> ExperimentConfig {
    ExperimentConfig::parse(
        "budget = 2\nmc_samples = 4\ncandidates = 8\nrefine_rounds = 1\nincumbents = 2\n\
         oracle_samples = 256\noracle_search_samples = 32\noracle_candidates = 64\noracle_restarts = 1\n\
         budget_step = 0.5\nseeds = 0,1,2,3,4\n",
        "small",
    )
    .map(|c| ExperimentConfig { out: out.to_path_buf(), ..c })
    .unwrap()
}

fn record(t: usize, set: usize, pq: Vec<f64>, alpha: f64, cum_cost: f64) -> TraceRecord {
    let complement = vec![0.5; 12 - pq.len()];
    TraceRecord {
        t,
        phase: Phase::Play,
        set,
        pq,
        complement,
        y: 0.0,
        cost: 0.0,
        cum_cost,
        alpha,
        feasible: Vec::new(),
    }
}

struct Fixture {
    env: bocvs::benchmarks::ObjectiveEnvironment,
    family: bocvs::query::ControlSetFamily,
    bank: McSampleBank,
    costs: CostModel,
}

fn fixture() -> Fixture {
    let family = synthetic_family(InputDistribution::truncated_normal(0.5, 0.02).unwrap()).unwrap();
    Fixture {
        env: make_hartmann_env(),
        bank: McSampleBank::draw(&family, 512, 5).unwrap(),
        family,
        costs: CostModel::cheap(),
    }
}

/// Oracle whose best value is the full-set value at `best`.
fn oracle_at(f: &Fixture, best: &[f64], alpha: f64) -> OracleSolution {
    let v = f.env.value(best);
    let mut values = vec![0.1; 7];
    values[4] = v;
    values[6] = v;
    let maximizers = (0..7).map(|set| PartialQuery { set, values: Vec::new() }).collect();
    OracleSolution::from_values(values, maximizers, alpha, &f.costs).unwrap()
}

fn hartmann_argmax() -> Vec<f64> {
    let mut x = vec![0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573];
    x.extend([0.5; 6]);
    x
}

#[test]
fn optimal_play_with_zero_tolerance_has_zero_regret() {
    let f = fixture();
    let x = hartmann_argmax();
    let oracle = oracle_at(&f, &x, 0.0);
    let trace = RunTrace {
        records: (1..=4).map(|t| record(t, oracle.cheapest_tolerated, x[..6].to_vec(), 0.0, t as f64)).collect(),
    };
    assert_eq!(oracle.cheapest_tolerated, 4);
    let ledger = RegretLedger::build(&trace, &oracle, &f.costs, &f.env, &f.family, &f.bank).unwrap();
    for r in &ledger.rows {
        // The bank average of one repeated value carries rounding only.
        assert!(r.quality_alpha0.abs() < 1e-12);
        assert!(r.quality_alpha_t.abs() < 1e-12);
        assert_eq!(r.cost, 0.0);
    }
    assert!(ledger.simple_regret_within(4.0).abs() < 1e-12);
}

#[test]
fn full_tolerance_regret_is_minus_the_expectation() {
    let f = fixture();
    let oracle = oracle_at(&f, &hartmann_argmax(), 1.0);
    let trace = RunTrace {
        records: vec![record(1, 0, vec![0.2, 0.4, 0.6], 1.0, 0.01)],
    };
    let ledger = RegretLedger::build(&trace, &oracle, &f.costs, &f.env, &f.family, &f.bank).unwrap();
    let r = &ledger.rows[0];
    assert!(r.quality_alpha0 <= 0.0);
    assert_eq!(r.quality_alpha0, -r.expected);
}

/// Set {7,8,9} controls only inert coordinates, so its regret is the
/// threshold minus the mean of g over random relevant coordinates,
/// estimated here with an independent sampler.
#[test]
fn inert_set_regret_matches_independent_estimate() {
    use rand::SeedableRng;
    let f = fixture();
    let x = hartmann_argmax();
    let oracle = oracle_at(&f, &x, 0.1);
    let trace = RunTrace {
        records: vec![record(1, 2, vec![0.9, 0.1, 0.3], 0.1, 0.01)],
    };
    let ledger = RegretLedger::build(&trace, &oracle, &f.costs, &f.env, &f.family, &f.bank).unwrap();
    let dist = InputDistribution::truncated_normal(0.5, 0.02).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let n = 20_000;
    let level: f64 = (0..n)
        .map(|_| {
            let q: Vec<f64> = (0..12).map(|_| dist.sample(&mut rng)).collect();
            f.env.value(&q)
        })
        .sum::<f64>()
        / n as f64;
    let expected = 0.9 * oracle.best_value - level;
    assert!((ledger.rows[0].quality_alpha0 - expected).abs() < 0.03, "{} vs {expected}", ledger.rows[0].quality_alpha0);
}

#[test]
fn cost_regret_uses_means_and_clamps() {
    let f = fixture();
    let oracle = oracle_at(&f, &hartmann_argmax(), 0.1);
    assert_eq!(oracle.cheapest_tolerated, 4);
    let custom = CostModel::new(vec![0.01, 0.01, 0.01, 0.1, 0.01, 0.1, 1.0], 0.02).unwrap();
    let trace = RunTrace {
        records: vec![
            record(1, 6, hartmann_argmax(), 0.1, 1.3),
            record(2, 0, vec![0.5; 3], 0.1, 1.31),
        ],
    };
    let ledger = RegretLedger::build(&trace, &oracle, &custom, &f.env, &f.family, &f.bank).unwrap();
    assert!((ledger.rows[0].cost - 0.99).abs() < 1e-12);
    assert_eq!(ledger.rows[1].cost, 0.0);
}

#[test]
fn evaluations_invert_the_cumulative_spend() {
    let f = fixture();
    let oracle = oracle_at(&f, &hartmann_argmax(), 0.1);
    let spends = [0.5, 1.0, 1.0, 2.5, 4.0];
    let trace = RunTrace {
        records: spends.iter().enumerate().map(|(k, &c)| record(k + 1, 0, vec![0.5; 3], 0.1, c)).collect(),
    };
    let ledger = RegretLedger::build(&trace, &oracle, &f.costs, &f.env, &f.family, &f.bank).unwrap();
    for (b, n) in [(0.0, 0), (0.5, 1), (0.99, 1), (1.0, 3), (3.0, 4), (10.0, 5)] {
        assert_eq!(ledger.evaluations_within(b), n, "budget {b}");
    }
    assert_eq!(ledger.simple_regret_within(0.0), oracle.best_value);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ledger_prefix_sums_and_monotone_simple_regret(
        plays in prop::collection::vec((0usize..7, 0.0f64..1.0, 0.0f64..0.4), 1..25)
    ) {
        let f = fixture();
        let oracle = oracle_at(&f, &hartmann_argmax(), 0.1);
        let mut cum = 0.0;
        let mut records = Vec::new();
        for (k, &(set, v, c)) in plays.iter().enumerate() {
            cum += c;
            let width = f.family.sets()[set].size();
            records.push(record(k + 1, set, vec![v; width], 0.1 / (k + 1) as f64, cum));
        }
        let trace = RunTrace { records };
        let ledger = RegretLedger::build(&trace, &oracle, &f.costs, &f.env, &f.family, &f.bank).unwrap();
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for r in &ledger.rows {
            a += r.quality_alpha0;
            b += r.quality_alpha_t;
            c += r.cost;
            prop_assert_eq!(r.cum_quality_alpha0, a);
            prop_assert_eq!(r.cum_quality_alpha_t, b);
            prop_assert_eq!(r.cum_cost, c);
            prop_assert!(r.cost >= 0.0);
        }
        let grid = budget_grid(cum + 0.5, 0.1);
        let curve = ledger.curve(&grid);
        for w in curve.windows(2) {
            prop_assert!(w[1].simple_regret <= w[0].simple_regret);
            prop_assert!(w[1].evaluations >= w[0].evaluations);
        }
    }
}

#[test]
fn five_seeds_write_five_traces_and_replay_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let a = small_config(&dir.path().join("a"));
    let b = ExperimentConfig { out: dir.path().join("b"), ..a.clone() };
    let cache = dir.path().join("oracle.cache");
    let out = run_experiment(&a, Some(&cache)).unwrap();
    assert!(out.failures.is_empty());
    assert_eq!(out.results.len(), 5);
    run_experiment(&b, Some(&cache)).unwrap();
    let mut traces = 0;
    for entry in std::fs::read_dir(&a.out).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        traces += name.starts_with("trace_seed") as usize;
        let x = std::fs::read(a.out.join(&name)).unwrap();
        let y = std::fs::read(b.out.join(&name)).unwrap();
        if name != "config.txt" {
            assert_eq!(x, y, "{name} differs between reruns");
        }
    }
    assert_eq!(traces, 5);
    let summary = std::fs::read_to_string(a.out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + budget_grid(2.0, 0.5).len());
}

#[test]
fn summary_standard_error_and_missing_seeds() {
    let rows = [SummaryRow {
        budget: 1.0,
        simple_regret_mean: 0.5,
        simple_regret_se: 0.1,
        evaluations_mean: 3.0,
        evaluations_se: 0.0,
        seeds: 4,
    }];
    let text = summary_csv(&rows, &[2]);
    assert!(text.lines().nth(1).unwrap().ends_with(",4,2"));
}

#[test]
fn report_aggregates_and_refuses_mismatches() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("oracle.cache");
    let mut proposed = small_config(&dir.path().join("p"));
    proposed.seeds = vec![0];
    let ucb = ExperimentConfig {
        algorithm: AlgorithmName::UcbPsq,
        out: dir.path().join("u"),
        ..proposed.clone()
    };
    run_experiment(&proposed, Some(&cache)).unwrap();
    run_experiment(&ucb, Some(&cache)).unwrap();
    let runs = vec![load_run(&proposed.out).unwrap(), load_run(&ucb.out).unwrap()];
    let grid = budget_grid(100.0, 5.0);
    let rows = aggregate(&runs, &grid).unwrap();
    assert_eq!(rows.iter().filter(|r| r.algorithm == "proposed").count(), 21);
    assert_eq!(rows.iter().filter(|r| r.algorithm == "ucb-psq").count(), 21);
    assert!(rows.iter().all(|r| r.simple_regret_se == 0.0 && r.evaluations_se == 0.0));
    assert_eq!(report_csv(&rows).lines().count(), 43);
    let table = report_table(&rows);
    let widths: Vec<usize> = table.lines().map(|l| l.chars().count()).collect();
    assert!(widths.iter().all(|&w| w == widths[1]) || widths.len() > 1);

    let moderate = ExperimentConfig {
        cost_model: "moderate".into(),
        out: dir.path().join("m"),
        ..proposed.clone()
    };
    run_experiment(&moderate, Some(&cache)).unwrap();
    let mixed = vec![load_run(&proposed.out).unwrap(), load_run(&moderate.out).unwrap()];
    assert!(matches!(aggregate(&mixed, &grid), Err(HarnessError::Mismatch(_))));
}

#[test]
fn prepared_oracle_cache_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let p = Prepared::new(&cfg).unwrap();
    let cache = dir.path().join("c.txt");
    let first = p.oracle(Some(&cache)).unwrap();
    let again = p.oracle(Some(&cache)).unwrap();
    assert_eq!(first, again);
    assert_eq!(std::fs::read_to_string(&cache).unwrap().matches("[oracle]").count(), 1);
}

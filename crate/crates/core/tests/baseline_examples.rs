use bocvs::acquisition::AcquisitionSpec;
use bocvs::algorithm::*;
use bocvs::baselines::*;
use bocvs::benchmarks::{make_hartmann_env, synthetic_family, CostModel, ObjectiveEnvironment};
use bocvs::gp::{BetaSchedule, KernelSpec};
use bocvs::query::{ControlSetFamily, InputDistribution};
use bocvs::rng::{stream_rng, Stream};

fn settings(dim: usize, budget: f64) -> RunSettings {
    let kernel = KernelSpec::squared_exponential(vec![0.3; dim]).unwrap();
    let mut s = RunSettings::new(kernel, 1e-3, BetaSchedule::constant(2.0).unwrap()).with_seed(1);
    s.acquisition = AcquisitionSpec {
        candidates: 8,
        refine_rounds: 2,
        incumbents: 2,
        ..AcquisitionSpec::default()
    };
    s.mc_samples = 4;
    s.budget = budget;
    s
}

fn bowl(dim: usize, centre: f64, noise: f64) -> ObjectiveEnvironment {
    ObjectiveEnvironment::new("bowl", dim, noise, 1.0, move |x: &[f64]| {
        1.0 - x.iter().map(|v| (v - centre).powi(2)).sum::<f64>()
    })
    .unwrap()
}

#[test]
fn flat_prior_picks_the_first_set() {
    let env = bowl(12, 0.5, 0.01);
    let family = synthetic_family(InputDistribution::Uniform).unwrap();
    let costs = CostModel::cheap();
    let s = settings(12, 10.0);
    let session = Session::new(Problem { env: &env, family: &family, costs: &costs }, &s).unwrap();
    assert_eq!(ucb_psq_step(&session).unwrap().set, 0);
}

#[test]
fn ts_prior_draws_visit_both_symmetric_sets() {
    let env = bowl(2, 0.5, 0.01);
    let family = ControlSetFamily::with_shared_distribution(2, vec![vec![0], vec![1]], InputDistribution::Uniform).unwrap();
    let costs = CostModel::new(vec![0.1, 0.1], 0.0).unwrap();
    let s = settings(2, 10.0);
    let session = Session::new(Problem { env: &env, family: &family, costs: &costs }, &s).unwrap();
    let features = RandomFeatures::draw(&s.kernel, 512, &mut stream_rng(9, Stream::Posterior, 0)).unwrap();
    let model = FeatureRegression::new(features, s.lambda).unwrap();
    let mut seen = [0usize; 2];
    for k in 0..200 {
        let pq = ts_psq_step(&session, &model, 1, &mut stream_rng(k, Stream::Posterior, 1)).unwrap();
        seen[pq.set] += 1;
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

#[test]
fn ts_concentrates_near_posterior_mean_argmax() {
    let env = bowl(2, 0.3, 1e-4);
    let family = ControlSetFamily::with_shared_distribution(2, vec![vec![0, 1]], InputDistribution::Uniform).unwrap();
    let costs = CostModel::new(vec![0.1], 0.0).unwrap();
    let mut s = settings(2, 1000.0);
    s.lambda = 1e-6;
    let problem = Problem { env: &env, family: &family, costs: &costs };
    let mut session = Session::new(problem, &s).unwrap();
    let features = RandomFeatures::draw(&s.kernel, 512, &mut stream_rng(2, Stream::Posterior, 0)).unwrap();
    let mut model = FeatureRegression::new(features, s.lambda).unwrap();
    let grid: Vec<[f64; 2]> = (0..=7).flat_map(|a| (0..=6).map(move |b| [a as f64 / 7.0, b as f64 / 6.0])).collect();
    for x in &grid[..50.min(grid.len())] {
        let pq = bocvs::query::PartialQuery { set: 0, values: x.to_vec() };
        let r = session.play(pq, Phase::Play, 0.1, Vec::new()).unwrap();
        model.observe(x, r.y);
    }
    let mut best = (f64::NEG_INFINITY, [0.0, 0.0]);
    for a in 0..=100 {
        for b in 0..=100 {
            let x = [a as f64 / 100.0, b as f64 / 100.0];
            let m = session.gp().posterior_mean(&x).unwrap();
            if m > best.0 {
                best = (m, x);
            }
        }
    }
    let mut near = 0;
    for k in 0..50 {
        let pq = ts_psq_step(&session, &model, 2, &mut stream_rng(k, Stream::Posterior, 7)).unwrap();
        let dist = pq.values.iter().zip(&best.1).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if dist < 0.1 {
            near += 1;
        }
    }
    assert!(near >= 40, "{near} of 50 within 0.1 of {:?}", best.1);
}

#[test]
fn etc_groups_by_size_and_plays_fifty_each() {
    let env = make_hartmann_env();
    let family = synthetic_family(InputDistribution::truncated_normal(0.5, 0.02).unwrap()).unwrap();
    let costs = CostModel::cheap();
    let problem = Problem { env: &env, family: &family, costs: &costs };
    assert_eq!(size_groups(&problem), vec![vec![0, 1, 2, 3], vec![4, 5], vec![6]]);
    let mut s = settings(12, 60.0);
    s.acquisition.candidates = 2;
    s.acquisition.refine_rounds = 0;
    s.mc_samples = 2;
    let trace = run_etc(problem, &s, &BaselineSpec::new(BaselineKind::Etc)).unwrap();
    assert_eq!(trace.count_phase(Phase::Explore), 150);
    let r = &trace.records;
    assert!(r[..50].iter().all(|x| x.set < 4));
    assert!(r[50..100].iter().all(|x| x.set == 4 || x.set == 5));
    assert!(r[100..150].iter().all(|x| x.set == 6));
    let committed = r[150..].first().map(|x| x.set).unwrap();
    assert!(r[150..].iter().all(|x| x.phase == Phase::Commit && x.set == committed));
}

#[test]
fn etc_single_group_then_commit() {
    let env = bowl(2, 0.5, 0.01);
    let family = ControlSetFamily::with_shared_distribution(2, vec![vec![0], vec![1]], InputDistribution::Uniform).unwrap();
    let costs = CostModel::new(vec![0.05, 0.05], 0.0).unwrap();
    let trace = run_etc(Problem { env: &env, family: &family, costs: &costs }, &settings(2, 4.0), &BaselineSpec::new(BaselineKind::Etc)).unwrap();
    assert_eq!(trace.count_phase(Phase::Explore), 50);
    assert!(trace.count_phase(Phase::Commit) > 0);
}

#[test]
fn etc_short_budget_never_commits() {
    let env = bowl(12, 0.5, 0.01);
    let family = synthetic_family(InputDistribution::Uniform).unwrap();
    let costs = CostModel::moderate();
    let mut s = settings(12, 3.0);
    s.cost_floor = 0.1;
    let trace = run_etc(Problem { env: &env, family: &family, costs: &costs }, &s, &BaselineSpec::new(BaselineKind::Etc)).unwrap();
    assert!(trace.len() < 50);
    assert_eq!(trace.count_phase(Phase::Commit), 0);
}

#[test]
fn every_algorithm_emits_the_same_record_shape() {
    let env = bowl(12, 0.5, 0.01);
    let family = synthetic_family(InputDistribution::Uniform).unwrap();
    let costs = CostModel::moderate();
    let s = settings(12, 3.0);
    let problem = Problem { env: &env, family: &family, costs: &costs };
    let traces = [
        run(problem, &s, &ProposedSpec::default()).unwrap(),
        run_baseline(problem, &s, &BaselineSpec::new(BaselineKind::UcbPsq)).unwrap(),
        run_baseline(problem, &s, &BaselineSpec::new(BaselineKind::TsPsq)).unwrap(),
        run_baseline(problem, &s, &BaselineSpec::new(BaselineKind::Etc)).unwrap(),
    ];
    for t in &traces {
        assert!(!t.is_empty());
        assert!(t.spent() <= s.budget);
        for r in &t.records {
            assert_eq!(r.pq.len(), family.sets()[r.set].size());
            assert_eq!(r.complement.len(), 12 - r.pq.len());
        }
    }
}

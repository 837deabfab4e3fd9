//! Replays the checked-in fuzz seeds on stable: every seed must parse and
//! survive a write/read round trip.

use std::fs;
use std::path::PathBuf;

use bocvs::algorithm::{Phase, RunTrace, TraceRecord};
use bocvs::benchmarks::airfoil::preprocess;
use bocvs::benchmarks::{AirfoilTable, CostModel, OracleSolution};
use bocvs::query::PartialQuery;
use bocvs_harness::ledger::parse_ledger;
use bocvs_harness::oracle_cache::{parse_records, write_records};
use bocvs_harness::trace_io::{parse_trace, trace_to_csv};
use bocvs_harness::ExperimentConfig;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            (path.display().to_string(), fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn config_seeds_round_trip() {
    for (name, text) in seeds("config") {
        let cfg = ExperimentConfig::parse(&text, &name).unwrap();
        assert_eq!(ExperimentConfig::parse(&cfg.to_text(), &name).unwrap(), cfg, "{name}");
    }
}

#[test]
fn trace_seeds_round_trip() {
    for (name, text) in seeds("trace_csv") {
        let trace = parse_trace(&text, &name).unwrap();
        let again = parse_trace(&trace_to_csv(&trace).unwrap(), &name).unwrap();
        assert_eq!(again, trace, "{name}");
    }
}

#[test]
fn oracle_cache_seeds_round_trip() {
    for (name, text) in seeds("oracle_cache") {
        let records = parse_records(&text, &name).unwrap();
        assert!(!records.is_empty(), "{name}");
        assert_eq!(parse_records(&write_records(&records), &name).unwrap(), records, "{name}");
    }
}

#[test]
fn airfoil_seeds_preprocess() {
    for (name, text) in seeds("airfoil_table") {
        let table = AirfoilTable::parse_with_min_rows(&text, &name, 2).unwrap();
        let data = preprocess(&table).unwrap();
        assert!(data.inputs.iter().flatten().all(|v| (0.0..=1.0).contains(v)), "{name}");
    }
}

/// Must match the fixture in `fuzz/fuzz_targets/ledger_csv.rs`.
fn ledger_fixture() -> (RunTrace, OracleSolution, CostModel) {
    let costs = CostModel::new(vec![0.1, 0.5], 0.0).unwrap();
    let maximizers = vec![
        PartialQuery { set: 0, values: vec![0.5] },
        PartialQuery { set: 1, values: vec![0.5, 0.5] },
    ];
    let oracle = OracleSolution::from_values(vec![1.0, 2.0], maximizers, 0.1, &costs).unwrap();
    let records = (1..=3)
        .map(|t| TraceRecord {
            t,
            phase: Phase::Explore,
            set: t % 2,
            pq: vec![0.5],
            complement: vec![0.5],
            y: 1.0,
            cost: 0.1,
            cum_cost: 0.1 * t as f64,
            alpha: 0.1,
            feasible: Vec::new(),
        })
        .collect();
    (RunTrace { records }, oracle, costs)
}

#[test]
fn ledger_seeds_round_trip() {
    let (trace, oracle, costs) = ledger_fixture();
    for (name, text) in seeds("ledger_csv") {
        let ledger = parse_ledger(&text, &name, &trace, &oracle, &costs).unwrap();
        let again = parse_ledger(&ledger.to_csv().unwrap(), &name, &trace, &oracle, &costs).unwrap();
        assert_eq!(again.rows, ledger.rows, "{name}");
    }
}

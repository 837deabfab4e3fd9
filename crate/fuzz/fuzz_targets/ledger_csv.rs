#![no_main]

use bocvs::algorithm::{Phase, RunTrace, TraceRecord};
use bocvs::benchmarks::{CostModel, OracleSolution};
use bocvs::query::PartialQuery;
use bocvs_harness::ledger::parse_ledger;
use libfuzzer_sys::fuzz_target;

fn fixture() -> (RunTrace, OracleSolution, CostModel) {
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

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let (trace, oracle, costs) = fixture();
    let Ok(ledger) = parse_ledger(text, "fuzz", &trace, &oracle, &costs) else {
        return;
    };
    assert_eq!(ledger.rows.len(), trace.len());
    let written = ledger.to_csv().unwrap();
    let again = parse_ledger(&written, "fuzz", &trace, &oracle, &costs).expect("written ledger parses");
    assert_eq!(again.to_csv().unwrap(), written);
});

#![no_main]

use bocvs::benchmarks::airfoil::preprocess;
use bocvs::benchmarks::AirfoilTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(table) = AirfoilTable::parse_with_min_rows(text, "fuzz", 2) else {
        return;
    };
    let Ok(prepared) = preprocess(&table) else {
        return;
    };
    for x in &prepared.inputs {
        assert!(x.iter().all(|v| (0.0..=1.0).contains(v)), "{x:?}");
    }
});

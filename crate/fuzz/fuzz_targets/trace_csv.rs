#![no_main]

use bocvs_harness::trace_io::{parse_trace, trace_to_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(trace) = parse_trace(text, "fuzz") else {
        return;
    };
    let written = trace_to_csv(&trace).expect("parsed trace serializes");
    let again = parse_trace(&written, "fuzz").expect("written trace parses");
    assert_eq!(trace_to_csv(&again).unwrap(), written);
});

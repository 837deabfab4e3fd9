#![no_main]

use bocvs_harness::oracle_cache::{parse_records, write_records};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(records) = parse_records(text, "fuzz") else {
        return;
    };
    let written = write_records(&records);
    let again = parse_records(&written, "fuzz").expect("written cache parses");
    assert_eq!(write_records(&again), written);
});

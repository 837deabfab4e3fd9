#![no_main]

use bocvs_harness::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = ExperimentConfig::parse(text, "fuzz") else {
        return;
    };
    // Writing and rereading a parsed config is lossless.
    let written = cfg.to_text();
    let again = ExperimentConfig::parse(&written, "fuzz").expect("written config parses");
    assert_eq!(again.to_text(), written);
});

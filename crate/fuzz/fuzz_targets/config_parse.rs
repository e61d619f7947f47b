#![no_main]
use bnls_harness::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // anything that parses must survive its own canonical form
        if let Ok(cfg) = ExperimentConfig::parse(text) {
            let again = ExperimentConfig::parse(&cfg.to_text()).expect("canonical text reparses");
            assert_eq!(cfg, again);
        }
    }
});

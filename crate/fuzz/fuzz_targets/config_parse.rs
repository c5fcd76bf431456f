//! Arbitrary UTF-8 documents through the config parser. Whatever parses must
//! serialize and parse back to the same value.

#![no_main]

use libfuzzer_sys::fuzz_target;
use tangency_core::config::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    if data.len() > 64 * 1024 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = ExperimentConfig::parse(text) {
        let again = cfg.to_toml().expect("parsed configs serialize");
        let back = ExperimentConfig::parse(&again).expect("serialized configs parse");
        // NaN never compares equal, so compare the serialized forms
        assert_eq!(back.to_toml().unwrap(), again);
    }
});

//! Parsed configs turned into systems and validated. Errors are fine,
//! panics are not.

#![no_main]

use libfuzzer_sys::fuzz_target;
use tangency_core::config::ExperimentConfig;
use tangency_core::model::validate;

fuzz_target!(|data: &[u8]| {
    if data.len() > 64 * 1024 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = ExperimentConfig::parse(text) else {
        return;
    };
    if cfg.sweep.tau_grid > 512 || cfg.system.seed.coeffs.len() > 32 {
        return;
    }
    if let Ok(sys) = cfg.to_system() {
        let _ = validate(&sys);
    }
});

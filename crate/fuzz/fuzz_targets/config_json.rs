#![no_main]

use cfml_cli::config::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(mut cfg) = serde_json::from_slice::<ExperimentConfig>(data) {
        cfg.normalise();
        let _ = cfg.validate();
    }
});

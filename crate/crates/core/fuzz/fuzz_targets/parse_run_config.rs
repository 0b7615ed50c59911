#![no_main]

use cnroots::config::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(config) = RunConfig::from_json(text) {
            assert!(config.n >= 2);
            assert!(config.grid.step > 0.0);
        }
    }
});

#![no_main]

use cnroots::support::SupportSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = SupportSpec::from_json(text) {
        // accepted specs must survive a round trip and have a usable rho
        let back = SupportSpec::from_json(&spec.to_json()).expect("round trip");
        assert_eq!(back, spec);
        assert!(spec.rho() > 0.0);
    }
});

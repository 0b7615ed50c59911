#![no_main]

use cnroots::family::PhaseVector;
use libfuzzer_sys::fuzz_target;

// First byte picks n, the rest is the text.
fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else {
        return;
    };
    if let Ok(text) = std::str::from_utf8(rest) {
        if let Ok(omega) = PhaseVector::parse(text, n as u32) {
            assert!(omega.entries().iter().all(|&m| m < omega.n()));
        }
    }
});

#![no_main]

use cnroots::analyze::CfGrid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(grid) = CfGrid::from_csv(text) {
            let again = CfGrid::from_csv(&grid.to_csv()).expect("round trip");
            assert_eq!(again.len(), grid.len());
        }
    }
});

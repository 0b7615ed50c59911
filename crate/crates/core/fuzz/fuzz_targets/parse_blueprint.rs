#![no_main]

use cnroots::construct::Blueprint;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(bp) = Blueprint::from_json(text) {
            assert_eq!(bp.eval_unnormalized(0.0), bp.normalizer());
        }
    }
});

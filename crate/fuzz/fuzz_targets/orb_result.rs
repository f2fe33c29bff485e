#![no_main]

use ggp_local::io::{orb_result_from_json, orb_result_to_json, parse_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(v) = parse_json(text) else {
        return;
    };
    if let Ok(r) = orb_result_from_json(&v, "$") {
        assert_eq!(orb_result_from_json(&orb_result_to_json(&r), "$").unwrap(), r);
    }
});

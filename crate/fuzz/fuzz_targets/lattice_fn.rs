#![no_main]

use ggp_local::io::{lattice_fn_to_json, parse_lattice_fn};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(f) = parse_lattice_fn(text) {
        let again = parse_lattice_fn(&lattice_fn_to_json(&f).to_string()).expect("re-encoded function parses");
        assert_eq!(f, again);
    }
});

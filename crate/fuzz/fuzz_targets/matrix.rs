#![no_main]

use ggp_local::io::{mat_from_json, mat_to_json, parse_json};
use ggp_local::localfield::Algebra;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&tag, rest)) = data.split_first() else {
        return;
    };
    let alg = match tag % 3 {
        0 => Algebra::Split,
        1 => Algebra::Inert { eps: 2 },
        _ => Algebra::Inert { eps: -1 },
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    let Ok(v) = parse_json(text) else {
        return;
    };
    if let Ok(m) = mat_from_json(alg, &v, "$") {
        assert_eq!(mat_from_json(alg, &mat_to_json(&m), "$").unwrap(), m);
        if m.is_square() {
            let _ = m.charpoly();
            let _ = m.inverse();
        }
    }
});

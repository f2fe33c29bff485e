#![no_main]

use ggp_local::io::{field_in, group_fn_from_json, group_fn_to_json, parse_json};
use ggp_local::localfield::LocalField;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(doc) = parse_json(text) else {
        return;
    };
    // the document may carry its own field; otherwise the inert field at p = 3
    let field = match doc.get("config") {
        Some(_) => match field_in(&doc) {
            Ok(f) => f,
            Err(_) => return,
        },
        None => LocalField::inert_default(3).unwrap(),
    };
    let body = doc.get("f").unwrap_or(&doc);
    if let Ok(f) = group_fn_from_json(&field, body, "$") {
        let again = group_fn_from_json(&field, &group_fn_to_json(&f), "$").expect("re-encoded function parses");
        assert_eq!(f, again);
    }
});

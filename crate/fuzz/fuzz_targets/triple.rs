#![no_main]

use ggp_local::io::{any_triple_from_json, field_in, parse_json};
use ggp_local::localfield::LocalField;
use ggp_local::orbitspace::{invariants, is_rss_mtriple, transfer_factor};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(doc) = parse_json(text) else {
        return;
    };
    let field = if doc.get("config").is_some() || doc.get("p").is_some() {
        match field_in(&doc) {
            Ok(f) => f,
            Err(_) => return,
        }
    } else {
        LocalField::inert_default(3).unwrap()
    };
    let Ok(m) = any_triple_from_json(&field, &doc, "$") else {
        return;
    };
    let inv = invariants(&m);
    assert_eq!(inv.a.len(), m.n());
    if is_rss_mtriple(&m) {
        transfer_factor(&field, &m).expect("rss triples have a transfer factor");
    }
});

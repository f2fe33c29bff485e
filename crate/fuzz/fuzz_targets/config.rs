#![no_main]

use ggp_local::io::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = parse_config(text) {
        let again = parse_config(&serde_json::to_string(&cfg).unwrap()).expect("re-encoded config parses");
        assert_eq!(cfg, again);
        cfg.field().build().expect("validated config builds");
    }
});

//! Replays the checked-in fuzz corpus through the parser entry points, then mutates the seeds.

use std::path::PathBuf;

use proptest::prelude::*;

use ggp_local::io::{
    any_triple_from_json, field_in, group_fn_from_json, group_fn_to_json, instance_to_json, lattice_fn_to_json,
    mat_from_json, mat_to_json, orb_result_from_json, orb_result_to_json, parse_config, parse_instance, parse_json,
    parse_lattice_fn,
};
use ggp_local::localfield::{Algebra, LocalField};
use ggp_local::orbitspace::{invariants, is_rss_mtriple, transfer_factor};

const TARGETS: [&str; 7] = ["instance", "lattice_fn", "group_fn", "config", "matrix", "triple", "orb_result"];

fn doc_field(doc: &serde_json::Value) -> Option<LocalField> {
    if doc.get("config").is_some() || doc.get("p").is_some() {
        field_in(doc).ok()
    } else {
        LocalField::inert_default(3).ok()
    }
}

/// Same checks as the fuzz targets; `true` when the input was accepted.
fn run(target: &str, data: &[u8]) -> bool {
    if target == "matrix" {
        let Some((&tag, rest)) = data.split_first() else {
            return false;
        };
        let alg = match tag % 3 {
            0 => Algebra::Split,
            1 => Algebra::Inert { eps: 2 },
            _ => Algebra::Inert { eps: -1 },
        };
        let Some(v) = std::str::from_utf8(rest).ok().and_then(|t| parse_json(t).ok()) else {
            return false;
        };
        let Ok(m) = mat_from_json(alg, &v, "$") else {
            return false;
        };
        assert_eq!(mat_from_json(alg, &mat_to_json(&m), "$").unwrap(), m);
        if m.is_square() {
            let _ = m.charpoly();
            let _ = m.inverse();
        }
        return true;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return false;
    };
    match target {
        "instance" => parse_instance(text).map(|inst| {
            assert_eq!(parse_instance(&instance_to_json(&inst).to_string()).unwrap(), inst);
        }),
        "lattice_fn" => parse_lattice_fn(text).map(|f| {
            assert_eq!(parse_lattice_fn(&lattice_fn_to_json(&f).to_string()).unwrap(), f);
        }),
        "config" => parse_config(text).map(|cfg| {
            assert_eq!(parse_config(&serde_json::to_string(&cfg).unwrap()).unwrap(), cfg);
            cfg.field().build().unwrap();
        }),
        "orb_result" => parse_json(text).and_then(|v| orb_result_from_json(&v, "$")).map(|r| {
            assert_eq!(orb_result_from_json(&orb_result_to_json(&r), "$").unwrap(), r);
        }),
        "group_fn" => {
            let Ok(doc) = parse_json(text) else {
                return false;
            };
            let field = match doc.get("config") {
                Some(_) => match field_in(&doc) {
                    Ok(f) => f,
                    Err(_) => return false,
                },
                None => LocalField::inert_default(3).unwrap(),
            };
            group_fn_from_json(&field, doc.get("f").unwrap_or(&doc), "$").map(|f| {
                assert_eq!(group_fn_from_json(&field, &group_fn_to_json(&f), "$").unwrap(), f);
            })
        }
        "triple" => {
            let Some((doc, field)) = parse_json(text).ok().and_then(|d| doc_field(&d).map(|f| (d, f))) else {
                return false;
            };
            any_triple_from_json(&field, &doc, "$").map(|m| {
                assert_eq!(invariants(&m).a.len(), m.n());
                if is_rss_mtriple(&m) {
                    transfer_factor(&field, &m).unwrap();
                }
            })
        }
        _ => unreachable!("unknown target {target}"),
    }
    .is_ok()
}

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&path).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn every_seed_is_accepted() {
    for target in TARGETS {
        let seeds = seeds(target);
        assert!(!seeds.is_empty(), "no seeds for {target}");
        for (name, data) in seeds {
            assert!(run(target, &data), "{target}/{name} was rejected");
        }
    }
}

fn all_seeds() -> Vec<(usize, Vec<u8>)> {
    TARGETS.iter().enumerate().flat_map(|(i, t)| seeds(t).into_iter().map(move |(_, d)| (i, d))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2048))]

    #[test]
    fn mutated_seeds_never_panic(
        pick in any::<prop::sample::Index>(),
        edits in prop::collection::vec((any::<prop::sample::Index>(), any::<u8>(), 0u8..3), 1..6),
    ) {
        let corpus = all_seeds();
        let (target, mut data) = corpus[pick.index(corpus.len())].clone();
        for (at, byte, kind) in edits {
            if data.is_empty() {
                break;
            }
            let i = at.index(data.len());
            match kind {
                0 => data[i] = byte,
                1 => data.truncate(i),
                _ => data.insert(i, byte),
            }
        }
        run(TARGETS[target], &data);
    }

    #[test]
    fn numeric_fields_survive_extreme_values(
        pick in any::<prop::sample::Index>(),
        run_at in any::<prop::sample::Index>(),
        value in prop_oneof![
            Just("-1".to_string()),
            Just("99999999999999999999".to_string()),
            Just("\"1/0\"".to_string()),
            Just("\"-7/3\"".to_string()),
            Just("4096".to_string()),
            Just("null".to_string()),
            Just("[]".to_string()),
            (-70i64..70).prop_map(|v| v.to_string()),
        ],
    ) {
        let corpus = all_seeds();
        let (target, data) = corpus[pick.index(corpus.len())].clone();
        let text = String::from_utf8_lossy(&data).into_owned();
        let mut runs = Vec::new();
        let mut start = None;
        for (i, c) in text.char_indices().chain(std::iter::once((text.len(), ' '))) {
            match (c.is_ascii_digit(), start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    runs.push((s, i));
                    start = None;
                }
                _ => {}
            }
        }
        if !runs.is_empty() {
            let (a, b) = runs[run_at.index(runs.len())];
            let mutated = format!("{}{}{}", &text[..a], value, &text[b..]);
            run(TARGETS[target], mutated.as_bytes());
        }
    }
}

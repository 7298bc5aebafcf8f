//! Fixed-seed level 1.1 derivations against a checked-in transcript.
//!
//! Set `TINYPY_UPDATE_GOLDEN=1` to rewrite the transcript after an intended
//! change to derivation or rng consumption.

use regex::Regex;
use tinypy_core::derive::{derive, DerivationConfig, LevelId};
use tinypy_core::grammar::builtin_tinypy;
use tinypy_core::rng::stream;

const GOLDEN_PATH: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/tests/golden/level1_1_seed42.txt"
);
const SEPARATOR: &str = "----\n";

fn level_1_1_programs() -> Vec<String> {
    let grammar = builtin_tinypy();
    let config = DerivationConfig::single_level(LevelId::L1_1).with_seed(42);
    (0..24)
        .map(|i| {
            derive(
                &grammar,
                LevelId::L1_1,
                &mut stream(config.seed, i),
                &config,
            )
            .unwrap()
            .code
        })
        .collect()
}

#[test]
fn level_1_1_matches_transcript() {
    let programs = level_1_1_programs();
    let transcript: String = programs.iter().map(|p| format!("{p}{SEPARATOR}")).collect();
    if std::env::var_os("TINYPY_UPDATE_GOLDEN").is_some() {
        std::fs::write(GOLDEN_PATH, &transcript).unwrap();
    }
    let expected = std::fs::read_to_string(GOLDEN_PATH).unwrap();
    assert_eq!(transcript, expected);
}

#[test]
fn level_1_1_shape() {
    // one to three initializations, an optional assignment, then a print
    let shape = Regex::new(
        r"^(?:[a-z] = [0-9]\n){1,3}(?:[a-z] = (?:[a-z]|[0-9]) [-+*/] (?:[a-z]|[0-9])\n)?print\((?:[a-z]|[a-z] [-+*/] (?:[a-z]|[0-9]))\)\n$",
    )
    .unwrap();
    for code in level_1_1_programs() {
        assert!(shape.is_match(&code), "unexpected shape:\n{code}");
    }
}

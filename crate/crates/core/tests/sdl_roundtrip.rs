use std::path::Path;

mod common;

use common::document;
use lbk_core::sdl::{parse, print};
use proptest::prelude::*;

fn assert_idempotent(text: &str) {
    let doc = parse(text).unwrap_or_else(|d| panic!("{}\n{text}", d[0]));
    let printed = print(&doc);
    let again = parse(&printed).unwrap_or_else(|d| panic!("{}\n{printed}", d[0]));
    assert_eq!(doc, again, "{printed}");
    assert_eq!(printed, print(&again));
}

#[test]
fn corpus_round_trips() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut n = 0;
    for dir in ["valid", "mutations"] {
        for e in std::fs::read_dir(root.join(dir)).unwrap() {
            let text = std::fs::read_to_string(e.unwrap().path()).unwrap();
            assert_idempotent(&text);
            n += 1;
        }
    }
    assert!(n >= 20);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_documents_round_trip(text in document()) {
        assert_idempotent(&text);
    }
}

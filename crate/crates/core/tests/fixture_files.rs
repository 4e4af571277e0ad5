//! The JSON files under `fixtures/building/` must match the generator byte
//! for byte. Run with `PREFFORGE_BLESS=1` to rewrite them after a deliberate
//! change to the generator.

use std::path::PathBuf;

use prefforge::fixture;
use prefforge::io::{self, Document};
use prefforge::model::ComparisonSet;
use prefforge::objective::{global_error, ErrorModel, ObjectiveFunction};

fn path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures/building")
        .join(name)
}

fn check<T: Document>(name: &str, doc: &T) {
    let expected = io::to_json(doc).unwrap();
    let file = path(name);
    if std::env::var_os("PREFFORGE_BLESS").is_some() {
        std::fs::write(&file, &expected).unwrap();
    }
    let shipped = std::fs::read_to_string(&file).unwrap_or_else(|e| panic!("{}: {e}", file.display()));
    assert!(
        shipped == expected,
        "{name} is out of date; rerun with PREFFORGE_BLESS=1"
    );
}

#[test]
fn shipped_files_match_the_generator() {
    check("function.json", &fixture::building_function());
    check("learning-set.json", &fixture::learning_set());
    check("test-set.json", &fixture::test_set());
}

#[test]
fn shipped_files_reproduce_the_reference_scores() {
    let f: ObjectiveFunction = io::load(path("function.json")).unwrap();
    let model = ErrorModel::default();
    for (name, incompatible, error) in [("learning-set.json", 5, 4.25), ("test-set.json", 5, 4.63)] {
        let set: ComparisonSet = io::load(path(name)).unwrap();
        let g = global_error(&f, &set, &model).unwrap();
        assert_eq!(g.incompatible, incompatible, "{name}");
        assert!((g.error - error).abs() <= 0.01, "{name}: {}", g.error);
    }
}

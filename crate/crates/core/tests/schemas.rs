//! The JSON schemas in `schemas/` accept every document the library writes
//! and reject documents that break their stated constraints.

use std::path::{Path, PathBuf};

use jsonschema::{Registry, Validator};
use prefforge::elicitation::{default_pipeline, Session};
use prefforge::generation::{generate_comparisons, synthesize_instances, GenerationConfig, StructureMix};
use prefforge::io::{self, Document};
use prefforge::learner::{learn_objective, LearnConfig};
use prefforge::model::{InstanceCatalog, Preference, Verdict};
use prefforge::oracle::{run_closed_loop, Oracle, OracleConfig, SimulationConfig};
use prefforge::weight_search::GaConfig;
use prefforge::{fixture, ObjectiveFunction};
use serde_json::{json, Value};

const BASE: &str = "https://prefforge.example/schemas/";

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn validator(file: &str) -> Validator {
    let mut registry = Registry::new();
    for entry in std::fs::read_dir(schema_dir()).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_owned();
        registry = registry.add(format!("{BASE}{name}"), read(&path)).unwrap();
    }
    let registry = registry.prepare().unwrap();
    jsonschema::options()
        .with_registry(&registry)
        .build(&json!({ "$ref": format!("{BASE}{file}") }))
        .unwrap()
}

fn assert_conforms<T: Document>(file: &str, doc: &T) {
    let value: Value = serde_json::from_str(&io::to_json(doc).unwrap()).unwrap();
    let errors: Vec<String> = validator(file)
        .iter_errors(&value)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect();
    assert!(errors.is_empty(), "{file}: {errors:#?}");
}

fn quick_learn() -> LearnConfig {
    LearnConfig {
        ga: GaConfig {
            generations: 40,
            ..GaConfig::default()
        },
        trace: true,
        ..LearnConfig::default()
    }
}

#[test]
fn every_schema_declares_its_id_and_draft() {
    let mut count = 0;
    for entry in std::fs::read_dir(schema_dir()).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap();
        let schema = read(&path);
        assert_eq!(schema["$id"], format!("{BASE}{name}"), "{name}");
        assert_eq!(
            schema["$schema"], "https://json-schema.org/draft/2020-12/schema",
            "{name}"
        );
        assert!(jsonschema::meta::is_valid(&schema), "{name}");
        count += 1;
    }
    assert_eq!(count, 12);
}

#[test]
fn written_documents_conform() {
    assert_conforms("objective-function.schema.json", &fixture::building_function());
    assert_conforms("comparison-set.schema.json", &fixture::learning_set());
    assert_conforms("comparison-set.schema.json", &fixture::test_set());

    let schema = fixture::building_schema();
    let catalog = InstanceCatalog {
        schema: schema.clone(),
        instances: synthesize_instances(&schema, 40, 5, &StructureMix::default(), 3),
    };
    assert_conforms("instance-catalog.schema.json", &catalog);

    let generated = generate_comparisons(&schema, &catalog.instances, &GenerationConfig::default()).unwrap();
    let mut session = Session::new(generated.set, default_pipeline(&schema, 10), 10, 1.0, 5).unwrap();
    for _ in 0..3 {
        let c = session.next_comparison().unwrap();
        session
            .submit_preference(Preference::new(&c.id, Verdict::PreferSol1))
            .unwrap();
    }
    session.next_comparison().unwrap();
    assert!(session.pending.is_some());
    assert_conforms("session.schema.json", &session);
    assert_conforms("comparison-set.schema.json", &session.set.answered_subset());

    let learned = learn_objective(&fixture::learning_set(), &quick_learn()).unwrap();
    assert!(learned.report.wall_time_ms.is_some());
    assert_conforms("objective-function.schema.json", &learned.function);
    assert_conforms("learn-report.schema.json", &learned.report);

    let oracle = OracleConfig {
        flip_probability: 0.1,
        seed: 2,
        ..OracleConfig::new(fixture::building_function())
    };
    assert_conforms("oracle-config.schema.json", &oracle);
    let sim = SimulationConfig {
        max_questions: 20,
        test_comparisons: 20,
        learn: quick_learn(),
        ..Default::default()
    };
    let report = run_closed_loop(&catalog, &mut Oracle::new(oracle).unwrap(), &sim).unwrap();
    assert_conforms("closed-loop-report.schema.json", &report);

    assert_conforms("generation-config.schema.json", &GenerationConfig::default());
    assert_conforms("learn-config.schema.json", &LearnConfig::default());
    assert_conforms("simulation-config.schema.json", &sim);
}

#[test]
fn committed_fixture_files_conform() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/building");
    for (file, schema) in [
        ("function.json", "objective-function.schema.json"),
        ("learning-set.json", "comparison-set.schema.json"),
        ("test-set.json", "comparison-set.schema.json"),
    ] {
        assert!(validator(schema).is_valid(&read(&dir.join(file))), "{file}");
    }
}

#[test]
fn partial_configs_conform_and_load() {
    let text = r#"{"format_version": "1", "ga": {"generations": 5}, "partitioning": false}"#;
    assert!(validator("learn-config.schema.json").is_valid(&serde_json::from_str(text).unwrap()));
    let config: LearnConfig = io::from_json(text).unwrap();
    assert_eq!(config.ga.generations, 5);
}

#[test]
fn schemas_reject_broken_documents() {
    let function = || -> Value { serde_json::from_str(&io::to_json(&fixture::building_function()).unwrap()).unwrap() };
    let v = validator("objective-function.schema.json");
    assert!(v.is_valid(&function()));

    type Breakage = Box<dyn Fn(&mut Value)>;
    let cases: Vec<(&str, Breakage)> = vec![
        ("negative weight", Box::new(|f| f["rules"][0]["weights"][0] = json!(-1))),
        (
            "fractional weight",
            Box::new(|f| f["rules"][0]["weights"][0] = json!(2.5)),
        ),
        (
            "unknown operator",
            Box::new(|f| f["rules"][0]["condition"][0]["op"] = json!("==")),
        ),
        ("no rules", Box::new(|f| f["rules"] = json!([]))),
        ("wrong version", Box::new(|f| f["format_version"] = json!("2"))),
        (
            "missing version",
            Box::new(|f| {
                f.as_object_mut().unwrap().remove("format_version");
            }),
        ),
    ];
    for (name, break_it) in cases {
        let mut doc = function();
        break_it(&mut doc);
        assert!(!v.is_valid(&doc), "{name}");
        // the loader rejects what the schema rejects
        assert!(io::from_json::<ObjectiveFunction>(&doc.to_string()).is_err(), "{name}");
    }

    let mut set: Value = serde_json::from_str(&io::to_json(&fixture::learning_set()).unwrap()).unwrap();
    set["preferences"]["learn-01"]["verdict"] = json!("MAYBE");
    assert!(!validator("comparison-set.schema.json").is_valid(&set));
}

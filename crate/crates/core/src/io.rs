//! Versioned JSON documents.
//!
//! Every document is a JSON object with a `format_version` field next to the
//! payload's own fields. Output is pretty-printed with fields in declaration
//! order and maps sorted by key, so saving the same value twice gives the same
//! bytes. Loading reports malformed JSON, wrong versions and broken invariants
//! as distinct errors, each with a location.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::elicitation::Session;
use crate::error::{Error, Result, Violation};
use crate::generation::GenerationConfig;
use crate::learner::{LearnConfig, LearnReport};
use crate::model::{ComparisonSet, InstanceCatalog};
use crate::objective::ObjectiveFunction;
use crate::oracle::{ClosedLoopReport, OracleConfig, SimulationConfig};

pub const FORMAT_VERSION: &str = "1";

/// A value that can be stored as a versioned document.
pub trait Document: Serialize + DeserializeOwned {
    fn violations(&self) -> Vec<Violation> {
        Vec::new()
    }
}

fn rebase(violations: Vec<Violation>, prefix: &str) -> Vec<Violation> {
    violations
        .into_iter()
        .map(|v| Violation {
            path: v.path.replacen('$', prefix, 1),
            message: v.message,
        })
        .collect()
}

impl Document for ComparisonSet {
    fn violations(&self) -> Vec<Violation> {
        self.validate()
    }
}

impl Document for ObjectiveFunction {
    fn violations(&self) -> Vec<Violation> {
        self.validate()
    }
}

impl Document for InstanceCatalog {
    fn violations(&self) -> Vec<Violation> {
        self.validate()
    }
}

impl Document for Session {
    fn violations(&self) -> Vec<Violation> {
        let mut out = rebase(self.set.validate(), "$.set");
        if let Err(e) = self.pipeline.check(&self.set.schema) {
            out.push(Violation::new("$.pipeline", e.to_string()));
        }
        if self.asked.len() > self.max_questions {
            out.push(Violation::new("$.asked", "more answers than max_questions"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, q) in self.asked.iter().chain(&self.pending).enumerate() {
            if self.set.comparison(&q.comparison_id).is_none() {
                out.push(Violation::new(format!("$.asked[{i}]"), "unknown comparison"));
            }
            if !seen.insert(q.comparison_id.as_str()) {
                out.push(Violation::new(format!("$.asked[{i}]"), "comparison asked twice"));
            }
        }
        out
    }
}

impl Document for OracleConfig {
    fn violations(&self) -> Vec<Violation> {
        rebase(self.ground_truth.validate(), "$.ground_truth")
    }
}

impl Document for LearnReport {}
impl Document for ClosedLoopReport {}
impl Document for GenerationConfig {}
impl Document for LearnConfig {}
impl Document for SimulationConfig {}

#[derive(Serialize)]
struct Envelope<'a, T> {
    format_version: &'static str,
    #[serde(flatten)]
    body: &'a T,
}

pub fn to_json<T: Document>(doc: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(&Envelope {
        format_version: FORMAT_VERSION,
        body: doc,
    })
    .map_err(|e| Error::Parse {
        location: "$".into(),
        message: e.to_string(),
    })?;
    text.push('\n');
    Ok(text)
}

pub fn from_json<T: Document>(text: &str) -> Result<T> {
    let mut value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let obj = value.as_object_mut().ok_or_else(|| Error::Parse {
        location: "$".into(),
        message: "document must be a JSON object".into(),
    })?;
    match obj.remove("format_version") {
        Some(serde_json::Value::String(v)) if v == FORMAT_VERSION => {}
        Some(other) => {
            return Err(Error::VersionMismatch {
                found: Some(other.as_str().map_or_else(|| other.to_string(), str::to_owned)),
                expected: FORMAT_VERSION,
            })
        }
        None => {
            return Err(Error::VersionMismatch {
                found: None,
                expected: FORMAT_VERSION,
            })
        }
    }
    let doc: T = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        Error::Parse {
            location: if path == "." {
                "$".to_owned()
            } else {
                format!("$.{path}")
            },
            message: e.into_inner().to_string(),
        }
    })?;
    let violations = doc.violations();
    if violations.is_empty() {
        Ok(doc)
    } else {
        Err(Error::Invariant(violations))
    }
}

pub fn load<T: Document>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    from_json(&text)
}

/// Writes through a sibling temporary file and renames it into place.
pub fn save<T: Document>(path: impl AsRef<Path>, doc: &T) -> Result<()> {
    let path = path.as_ref();
    let text = to_json(doc)?;
    let io_err = |source| Error::Io {
        path: path.to_owned(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, text).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

//! Data model shared by every stage: measures, solutions, instances,
//! comparisons and the preferences a user gives on them.
//!
//! Values are plain owned data. Invariants are not enforced at construction;
//! [`ComparisonSet::validate`] and friends report every violation with a JSON
//! path so that loaded documents can be diagnosed in one pass.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureDescriptor {
    pub id: String,
    pub label: String,
}

impl MeasureDescriptor {
    pub fn new(id: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            label: label.into(),
        }
    }
}

/// The ordered measure set together with the global bounds every value lives in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureSchema {
    pub measures: Vec<MeasureDescriptor>,
    pub val_min: f64,
    pub val_max: f64,
}

impl MeasureSchema {
    pub fn new(measures: Vec<MeasureDescriptor>, val_min: f64, val_max: f64) -> Result<Self> {
        let schema = Self {
            measures,
            val_min,
            val_max,
        };
        let violations = schema.violations("$");
        if violations.is_empty() {
            Ok(schema)
        } else {
            Err(Error::Invariant(violations))
        }
    }

    /// Schema on `[0, 100]` whose ids double as labels.
    pub fn percent<S: AsRef<str>>(ids: &[S]) -> Result<Self> {
        Self::new(
            ids.iter()
                .map(|id| MeasureDescriptor::new(id.as_ref(), id.as_ref()))
                .collect(),
            0.0,
            100.0,
        )
    }

    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.measures.iter().position(|m| m.id == id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.measures.iter().map(|m| m.id.as_str())
    }

    pub fn contains_value(&self, value: f64) -> bool {
        value >= self.val_min && value <= self.val_max
    }

    pub fn span(&self) -> f64 {
        self.val_max - self.val_min
    }

    pub fn violations(&self, path: &str) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.measures.is_empty() {
            out.push(Violation::new(
                format!("{path}.measures"),
                "at least one measure is required",
            ));
        }
        let mut seen = BTreeSet::new();
        for (i, m) in self.measures.iter().enumerate() {
            if m.id.is_empty() {
                out.push(Violation::new(
                    format!("{path}.measures[{i}].id"),
                    "measure id must be non-empty",
                ));
            } else if !seen.insert(m.id.as_str()) {
                out.push(Violation::new(
                    format!("{path}.measures[{i}].id"),
                    format!("duplicate measure id {:?}", m.id),
                ));
            }
        }
        if !(self.val_min.is_finite() && self.val_max.is_finite() && self.val_min < self.val_max) {
            out.push(Violation::new(
                format!("{path}.val_min"),
                format!(
                    "bounds must be finite with val_min < val_max (got {} and {})",
                    self.val_min, self.val_max
                ),
            ));
        }
        out
    }
}

/// One candidate answer to a problem instance, described by its measure vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub id: String,
    pub instance_id: String,
    pub measures: Vec<f64>,
    /// Rendering payload carried untouched to the UI (e.g. an SVG fragment).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display: Option<String>,
}

impl Solution {
    pub fn new(id: impl Into<String>, instance_id: impl Into<String>, measures: Vec<f64>) -> Self {
        Self {
            id: id.into(),
            instance_id: instance_id.into(),
            measures,
            display: None,
        }
    }

    pub fn with_display(mut self, display: impl Into<String>) -> Self {
        self.display = Some(display.into());
        self
    }

    pub fn violations(&self, schema: &MeasureSchema, path: &str) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.measures.len() != schema.len() {
            out.push(Violation::new(
                format!("{path}.measures"),
                format!(
                    "expected {} measure values, found {}",
                    schema.len(),
                    self.measures.len()
                ),
            ));
        }
        for (i, v) in self.measures.iter().enumerate() {
            if !schema.contains_value(*v) {
                out.push(Violation::new(
                    format!("{path}.measures[{i}]"),
                    format!("value {v} outside [{}, {}]", schema.val_min, schema.val_max),
                ));
            }
        }
        out
    }

    pub(crate) fn check_conforms(&self, schema: &MeasureSchema) -> Result<()> {
        if self.measures.len() != schema.len() {
            return Err(Error::invalid(format!(
                "solution {:?} has {} measures, schema has {}",
                self.id,
                self.measures.len(),
                schema.len()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub solutions: Vec<Solution>,
}

impl ProblemInstance {
    pub fn violations(&self, schema: &MeasureSchema, path: &str) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.solutions.len() < 2 {
            out.push(Violation::new(
                format!("{path}.solutions"),
                "an instance needs at least two solutions",
            ));
        }
        for (i, sol) in self.solutions.iter().enumerate() {
            let sol_path = format!("{path}.solutions[{i}]");
            if sol.instance_id != self.id {
                out.push(Violation::new(
                    format!("{sol_path}.instance_id"),
                    format!(
                        "solution belongs to {:?}, not to instance {:?}",
                        sol.instance_id, self.id
                    ),
                ));
            }
            out.extend(sol.violations(schema, &sol_path));
        }
        out
    }
}

/// A list of problem instances sharing one schema; the on-disk instance file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceCatalog {
    pub schema: MeasureSchema,
    pub instances: Vec<ProblemInstance>,
}

impl InstanceCatalog {
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.schema.violations("$.schema");
        for (i, inst) in self.instances.iter().enumerate() {
            out.extend(inst.violations(&self.schema, &format!("$.instances[{i}]")));
        }
        out
    }
}

/// Two solutions of the same instance put in front of the user.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub id: String,
    pub sol1: Solution,
    pub sol2: Solution,
}

impl Comparison {
    pub fn new(id: impl Into<String>, sol1: Solution, sol2: Solution) -> Self {
        Self {
            id: id.into(),
            sol1,
            sol2,
        }
    }

    pub fn violations(&self, schema: &MeasureSchema, path: &str) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.sol1.id == self.sol2.id {
            out.push(Violation::new(
                format!("{path}.sol2.id"),
                format!("both sides are solution {:?}", self.sol1.id),
            ));
        }
        if self.sol1.instance_id != self.sol2.instance_id {
            out.push(Violation::new(
                format!("{path}.sol2.instance_id"),
                format!(
                    "solutions come from different instances ({:?} vs {:?})",
                    self.sol1.instance_id, self.sol2.instance_id
                ),
            ));
        }
        out.extend(self.sol1.violations(schema, &format!("{path}.sol1")));
        out.extend(self.sol2.violations(schema, &format!("{path}.sol2")));
        out
    }

    /// Absolute per-measure differences between the two solutions.
    pub fn deltas(&self) -> impl Iterator<Item = f64> + '_ {
        self.sol1
            .measures
            .iter()
            .zip(&self.sol2.measures)
            .map(|(a, b)| (a - b).abs())
    }

    /// Indices of the measures whose values differ by more than `tolerance`.
    pub fn changed_measures(&self, tolerance: f64) -> Vec<usize> {
        self.deltas()
            .enumerate()
            .filter(|(_, d)| *d > tolerance)
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    PreferSol1,
    PreferSol2,
    Tie,
}

impl Verdict {
    pub fn inverted(self) -> Self {
        match self {
            Verdict::PreferSol1 => Verdict::PreferSol2,
            Verdict::PreferSol2 => Verdict::PreferSol1,
            Verdict::Tie => Verdict::Tie,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preference {
    pub comparison_id: String,
    pub verdict: Verdict,
}

impl Preference {
    pub fn new(comparison_id: impl Into<String>, verdict: Verdict) -> Self {
        Self {
            comparison_id: comparison_id.into(),
            verdict,
        }
    }
}

/// The comparison sample together with whatever preferences have been given so far.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSet {
    pub schema: MeasureSchema,
    pub comparisons: Vec<Comparison>,
    #[serde(default)]
    pub preferences: BTreeMap<String, Preference>,
}

impl ComparisonSet {
    pub fn new(schema: MeasureSchema, comparisons: Vec<Comparison>) -> Self {
        Self {
            schema,
            comparisons,
            preferences: BTreeMap::new(),
        }
    }

    /// Every invariant violation, in document order. Empty means well-formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.schema.violations("$.schema");
        let mut ids = BTreeSet::new();
        for (i, c) in self.comparisons.iter().enumerate() {
            let path = format!("$.comparisons[{i}]");
            if !ids.insert(c.id.as_str()) {
                out.push(Violation::new(
                    format!("{path}.id"),
                    format!("duplicate comparison id {:?}", c.id),
                ));
            }
            out.extend(c.violations(&self.schema, &path));
        }
        for (key, pref) in &self.preferences {
            let path = format!("$.preferences.{key}");
            if !ids.contains(key.as_str()) {
                out.push(Violation::new(
                    path.clone(),
                    format!("preference for unknown comparison {key:?}"),
                ));
            }
            if pref.comparison_id != *key {
                out.push(Violation::new(
                    format!("{path}.comparison_id"),
                    format!("keyed as {key:?} but refers to {:?}", pref.comparison_id),
                ));
            }
        }
        out
    }

    pub fn comparison(&self, id: &str) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.id == id)
    }

    pub fn verdict(&self, comparison_id: &str) -> Option<Verdict> {
        self.preferences.get(comparison_id).map(|p| p.verdict)
    }

    pub fn record(&mut self, preference: Preference) {
        self.preferences.insert(preference.comparison_id.clone(), preference);
    }

    pub fn answered_count(&self) -> usize {
        self.comparisons
            .iter()
            .filter(|c| self.preferences.contains_key(&c.id))
            .count()
    }

    pub fn is_fully_answered(&self) -> bool {
        self.answered_count() == self.comparisons.len()
    }

    /// Answered comparisons in set order, paired with their verdicts.
    pub fn answered(&self) -> impl Iterator<Item = (&Comparison, Verdict)> {
        self.comparisons
            .iter()
            .filter_map(|c| self.verdict(&c.id).map(|v| (c, v)))
    }

    /// A copy restricted to the answered comparisons.
    pub fn answered_subset(&self) -> ComparisonSet {
        let comparisons: Vec<_> = self
            .comparisons
            .iter()
            .filter(|c| self.preferences.contains_key(&c.id))
            .cloned()
            .collect();
        ComparisonSet {
            schema: self.schema.clone(),
            preferences: comparisons
                .iter()
                .map(|c| (c.id.clone(), self.preferences[&c.id].clone()))
                .collect(),
            comparisons,
        }
    }

    pub(crate) fn require_fully_answered(&self) -> Result<()> {
        if let Some(c) = self.comparisons.iter().find(|c| !self.preferences.contains_key(&c.id)) {
            return Err(Error::invalid(format!(
                "comparison {:?} has no preference ({} of {} answered)",
                c.id,
                self.answered_count(),
                self.comparisons.len()
            )));
        }
        Ok(())
    }
}

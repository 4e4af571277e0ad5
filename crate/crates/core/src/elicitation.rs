//! The preference capture loop: pick a comparison with the current strategy,
//! record the user's verdict, repeat until the question budget is spent.
//!
//! Strategies run as a pipeline of stages, each with its own question budget.
//! A stage whose filter matches nothing is skipped. A session is plain data:
//! all randomness is derived from the seed and the number of questions asked
//! so far, so a serialized session resumes exactly where it stopped.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Comparison, ComparisonSet, MeasureSchema, Preference, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strategy {
    /// Both solutions have the same measure values.
    Consistency,
    /// Only `measure` changes.
    Evolution {
        measure: String,
    },
    /// Exactly the two given measures change.
    Order {
        measures: [String; 2],
    },
    Random,
}

impl Strategy {
    pub fn label(&self) -> String {
        match self {
            Strategy::Consistency => "consistency".to_owned(),
            Strategy::Evolution { measure } => format!("evolution({measure})"),
            Strategy::Order { measures: [a, b] } => format!("order({a}, {b})"),
            Strategy::Random => "random".to_owned(),
        }
    }

    fn resolve(&self, schema: &MeasureSchema) -> Result<Filter> {
        let idx = |id: &str| {
            schema
                .index_of(id)
                .ok_or_else(|| Error::invalid(format!("strategy refers to unknown measure {id:?}")))
        };
        Ok(match self {
            Strategy::Consistency => Filter::Changed(Vec::new()),
            Strategy::Evolution { measure } => Filter::Changed(vec![idx(measure)?]),
            Strategy::Order { measures: [a, b] } => {
                if a == b {
                    return Err(Error::invalid(format!(
                        "order strategy needs two distinct measures, got {a:?} twice"
                    )));
                }
                let mut pair = vec![idx(a)?, idx(b)?];
                pair.sort_unstable();
                Filter::Changed(pair)
            }
            Strategy::Random => Filter::Any,
        })
    }
}

enum Filter {
    /// Exactly these measure indices (sorted) change.
    Changed(Vec<usize>),
    Any,
}

impl Filter {
    fn accepts(&self, c: &Comparison, tolerance: f64) -> bool {
        match self {
            Filter::Any => true,
            Filter::Changed(expected) => c.changed_measures(tolerance) == *expected,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub strategy: Strategy,
    pub budget: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyPipeline {
    pub stages: Vec<Stage>,
}

impl StrategyPipeline {
    pub fn total_budget(&self) -> usize {
        self.stages.iter().map(|s| s.budget).sum()
    }

    pub fn check(&self, schema: &MeasureSchema) -> Result<()> {
        if self.total_budget() == 0 {
            return Err(Error::invalid("pipeline has no question budget"));
        }
        for stage in &self.stages {
            stage.strategy.resolve(schema)?;
        }
        Ok(())
    }
}

/// Consistency first, then one evolution stage per measure, one order stage
/// per unordered measure pair, and finally random picks.
///
/// Structured stages get one question each. The random stage is budgeted
/// with `max_questions`, so it absorbs whatever the structured stages leave
/// unused; the session's question cap bounds the total.
pub fn default_pipeline(schema: &MeasureSchema, max_questions: usize) -> StrategyPipeline {
    let ids: Vec<&str> = schema.ids().collect();
    let mut stages = vec![Stage {
        strategy: Strategy::Consistency,
        budget: 1,
    }];
    stages.extend(ids.iter().map(|id| Stage {
        strategy: Strategy::Evolution {
            measure: (*id).to_owned(),
        },
        budget: 1,
    }));
    for (i, a) in ids.iter().enumerate() {
        for b in &ids[i + 1..] {
            stages.push(Stage {
                strategy: Strategy::Order {
                    measures: [(*a).to_owned(), (*b).to_owned()],
                },
                budget: 1,
            });
        }
    }
    stages.push(Stage {
        strategy: Strategy::Random,
        budget: max_questions.max(1),
    });
    StrategyPipeline { stages }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AskedQuestion {
    pub comparison_id: String,
    pub stage: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub set: ComparisonSet,
    pub pipeline: StrategyPipeline,
    pub max_questions: usize,
    pub measure_tolerance: f64,
    pub seed: u64,
    /// Answered questions, in order.
    pub asked: Vec<AskedQuestion>,
    /// Question handed out and not yet answered.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pending: Option<AskedQuestion>,
    pub cursor: usize,
    /// Questions drawn by the stage under the cursor, pending one included.
    pub stage_used: usize,
    /// Human-readable record of skipped stages.
    #[serde(default)]
    pub log: Vec<String>,
}

impl Session {
    pub fn new(
        set: ComparisonSet,
        pipeline: StrategyPipeline,
        max_questions: usize,
        measure_tolerance: f64,
        seed: u64,
    ) -> Result<Self> {
        pipeline.check(&set.schema)?;
        if measure_tolerance.is_nan() || measure_tolerance < 0.0 {
            return Err(Error::invalid("measure_tolerance must be >= 0"));
        }
        Ok(Self {
            set,
            pipeline,
            max_questions,
            measure_tolerance,
            seed,
            asked: Vec::new(),
            pending: None,
            cursor: 0,
            stage_used: 0,
            log: Vec::new(),
        })
    }

    pub fn is_finished(&self) -> bool {
        self.pending.is_none() && (self.asked.len() >= self.max_questions || self.cursor >= self.pipeline.stages.len())
    }

    pub fn current_stage(&self) -> Option<&Stage> {
        self.pipeline.stages.get(self.cursor)
    }

    fn is_used(&self, id: &str) -> bool {
        self.asked.iter().any(|q| q.comparison_id == id) || self.pending.as_ref().is_some_and(|q| q.comparison_id == id)
    }

    fn advance(&mut self, reason: &str) {
        let label = self.pipeline.stages[self.cursor].strategy.label();
        self.log.push(format!("stage {} {label}: {reason}", self.cursor));
        self.cursor += 1;
        self.stage_used = 0;
    }

    /// The next comparison to show, or `None` once the session is finished.
    ///
    /// Asking again before answering returns the same comparison.
    pub fn next_comparison(&mut self) -> Option<Comparison> {
        if let Some(q) = &self.pending {
            return self.set.comparison(&q.comparison_id).cloned();
        }
        while self.asked.len() < self.max_questions && self.cursor < self.pipeline.stages.len() {
            let stage = &self.pipeline.stages[self.cursor];
            if self.stage_used >= stage.budget {
                self.advance("budget spent");
                continue;
            }
            let filter = stage
                .strategy
                .resolve(&self.set.schema)
                .expect("pipeline checked at construction");
            let candidates: Vec<usize> = self
                .set
                .comparisons
                .iter()
                .enumerate()
                .filter(|(_, c)| !self.is_used(&c.id) && filter.accepts(c, self.measure_tolerance))
                .map(|(i, _)| i)
                .collect();
            if candidates.is_empty() {
                self.advance("no matching comparison");
                continue;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(
                self.seed ^ (self.asked.len() as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            );
            let pick = &self.set.comparisons[candidates[rng.random_range(0..candidates.len())]];
            self.pending = Some(AskedQuestion {
                comparison_id: pick.id.clone(),
                stage: self.cursor,
            });
            self.stage_used += 1;
            return Some(pick.clone());
        }
        None
    }

    /// Records the verdict for the outstanding question.
    pub fn submit_preference(&mut self, preference: Preference) -> Result<()> {
        if self.set.comparison(&preference.comparison_id).is_none() {
            return Err(Error::invalid(format!(
                "unknown comparison {:?}",
                preference.comparison_id
            )));
        }
        match &self.pending {
            Some(q) if q.comparison_id == preference.comparison_id => {}
            Some(q) => {
                return Err(Error::Protocol(format!(
                    "expected an answer for {:?}, got {:?}",
                    q.comparison_id, preference.comparison_id
                )))
            }
            None if self.set.preferences.contains_key(&preference.comparison_id) => {
                return Err(Error::Protocol(format!(
                    "comparison {:?} is already answered",
                    preference.comparison_id
                )))
            }
            None => {
                return Err(Error::Protocol(format!(
                    "comparison {:?} was not asked",
                    preference.comparison_id
                )))
            }
        }
        let q = self.pending.take().expect("matched above");
        self.set.record(preference);
        self.asked.push(q);
        Ok(())
    }

    /// Answered consistency-stage comparisons whose verdict was not a tie.
    /// Each one suggests the measures miss something the user cares about.
    pub fn consistency_flags(&self) -> Vec<String> {
        self.asked
            .iter()
            .filter(|q| {
                matches!(
                    self.pipeline.stages.get(q.stage).map(|s| &s.strategy),
                    Some(Strategy::Consistency)
                )
            })
            .filter(|q| self.set.verdict(&q.comparison_id).is_some_and(|v| v != Verdict::Tie))
            .map(|q| q.comparison_id.clone())
            .collect()
    }

    pub fn asked_ids(&self) -> impl Iterator<Item = &str> {
        self.asked.iter().map(|q| q.comparison_id.as_str())
    }

    pub fn stage_label(&self) -> Option<String> {
        self.current_stage().map(|s| s.strategy.label())
    }
}

//! Objective-function learning: weight search, then repeated partitioning and
//! joint re-search for as long as each round strictly lowers the global error.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use tracing::debug;

use crate::error::{Error, Result};
use crate::generation::StructureKind;
use crate::model::{ComparisonSet, Verdict};
use crate::objective::{ErrorModel, ObjectiveFunction, RuleCondition};
use crate::partition::{refine_partitions, PartitionConfig};
use crate::weight_search::{search_weights, GaConfig, Genome, SearchOutcome};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LearnConfig {
    pub val_error: f64,
    pub tie_epsilon: f64,
    /// Used to spot equal-vector comparisons for the consistency flags.
    pub measure_tolerance: f64,
    pub ga: GaConfig,
    pub partition: PartitionConfig,
    /// Set to false to learn a single weighted mean.
    pub partitioning: bool,
    /// Cap on partitioning rounds.
    pub max_depth: usize,
    /// Partitioning tries per round, each with its own holdout split, before
    /// the round counts as failed.
    pub partition_attempts: usize,
    /// Keep the per-generation GA trace in the report.
    pub trace: bool,
    pub seed: u64,
}

impl Default for LearnConfig {
    fn default() -> Self {
        let errors = ErrorModel::default();
        Self {
            val_error: errors.val_error,
            tie_epsilon: errors.tie_epsilon,
            measure_tolerance: 1.0,
            ga: GaConfig::default(),
            partition: PartitionConfig::default(),
            partitioning: true,
            max_depth: 5,
            partition_attempts: 10,
            trace: false,
            seed: 0,
        }
    }
}

impl LearnConfig {
    pub fn error_model(&self) -> Result<ErrorModel> {
        ErrorModel::new(self.val_error, self.tie_epsilon)
    }

    // Every search step gets its own pair of streams.
    fn ga_for(&self, step: usize) -> GaConfig {
        GaConfig {
            seed: mix(self.seed, 2 * step as u64),
            ..self.ga.clone()
        }
    }

    fn partition_for(&self, step: usize) -> PartitionConfig {
        PartitionConfig {
            seed: mix(self.seed, 2 * step as u64 + 1),
            ..self.partition.clone()
        }
    }
}

fn mix(seed: u64, stream: u64) -> u64 {
    seed.wrapping_mul(0x2545_F491_4F6C_DD1D)
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// Zero global error.
    Perfect,
    /// The partitioner found no new region in any attempt.
    NoPartition,
    /// No re-search after partitioning improved; the previous function was kept.
    Backtracked,
    /// `max_depth` partitioning rounds were accepted.
    DepthCap,
    /// Partitioning disabled in the configuration.
    SingleRule,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Partitioning round; 0 is the initial single-rule search.
    pub iteration: usize,
    pub attempt: usize,
    pub rules: usize,
    pub global_error: f64,
    pub incompatible: usize,
    pub accepted: bool,
    pub generations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnReport {
    pub comparisons: usize,
    pub iterations: Vec<IterationRecord>,
    pub final_error: f64,
    pub final_incompatible: usize,
    pub rules: usize,
    pub stop_reason: StopReason,
    pub depth_cap_hit: bool,
    pub consistency_flags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl LearnReport {
    /// Global errors of the accepted iterations, in order.
    pub fn accepted_errors(&self) -> Vec<f64> {
        self.iterations
            .iter()
            .filter(|it| it.accepted)
            .map(|it| it.global_error)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Learned {
    pub function: ObjectiveFunction,
    pub report: LearnReport,
}

/// Answered equal-vector comparisons whose verdict is not a tie.
pub fn equal_vector_conflicts(set: &ComparisonSet, tolerance: f64) -> Vec<String> {
    set.answered()
        .filter(|(c, v)| *v != Verdict::Tie && StructureKind::of(c, tolerance) == StructureKind::EqualVectors)
        .map(|(c, _)| c.id.clone())
        .collect()
}

/// Genome for `conditions` that reproduce `previous` as closely as a
/// per-block copy allows: every block inherits the weights of the previous
/// rule with the same condition, or of the previous catch-all.
fn inherit(previous: &ObjectiveFunction, conditions: &[RuleCondition]) -> Genome {
    let fallback = &previous.rules[previous.rules.len() - 1].weights;
    conditions
        .iter()
        .flat_map(|c| {
            previous
                .rules
                .iter()
                .find(|r| r.condition == *c)
                .map_or(fallback, |r| &r.weights)
                .iter()
                .copied()
        })
        .collect()
}

pub fn learn_objective(set: &ComparisonSet, config: &LearnConfig) -> Result<Learned> {
    let start = Instant::now();
    let model = config.error_model()?;
    if set.comparisons.is_empty() {
        return Err(Error::invalid("cannot learn from an empty comparison set"));
    }
    set.require_fully_answered()?;
    let violations = set.validate();
    if !violations.is_empty() {
        return Err(Error::Invariant(violations));
    }

    let mut iterations = Vec::new();
    let record = |iteration: usize, attempt: usize, out: &SearchOutcome, accepted: bool| IterationRecord {
        iteration,
        attempt,
        rules: out.function.rules.len(),
        global_error: out.error.error,
        incompatible: out.error.incompatible,
        accepted,
        generations: out.generations_run,
        trace: config.trace.then(|| out.trace.clone()),
    };

    let mut conditions = vec![RuleCondition::always()];
    let mut best = search_weights(&conditions, set, &model, &config.ga_for(0), &[])?;
    iterations.push(record(0, 0, &best, true));
    debug!(error = best.error.error, "initial weight search");

    let mut round = 0;
    let mut step = 0;
    let stop_reason = loop {
        if best.error.error == 0.0 {
            break StopReason::Perfect;
        }
        if !config.partitioning {
            break StopReason::SingleRule;
        }
        if round >= config.max_depth {
            break StopReason::DepthCap;
        }
        round += 1;
        let mut found = false;
        let mut improved = None;
        for attempt in 0..config.partition_attempts {
            step += 1;
            let refined = refine_partitions(&conditions, &best.function, set, &model, &config.partition_for(step))?;
            if refined.len() == conditions.len() {
                continue;
            }
            found = true;
            let injected = [inherit(&best.function, &refined)];
            let candidate = search_weights(&refined, set, &model, &config.ga_for(step), &injected)?;
            let accepted = candidate.error.error < best.error.error;
            iterations.push(record(round, attempt, &candidate, accepted));
            debug!(
                round,
                attempt,
                rules = refined.len(),
                error = candidate.error.error,
                accepted,
                "partition round"
            );
            if accepted {
                improved = Some((refined, candidate));
                break;
            }
        }
        match improved {
            Some((refined, candidate)) => {
                conditions = refined;
                best = candidate;
            }
            None if found => break StopReason::Backtracked,
            None => break StopReason::NoPartition,
        }
    };

    let report = LearnReport {
        comparisons: set.comparisons.len(),
        final_error: best.error.error,
        final_incompatible: best.error.incompatible,
        rules: best.function.rules.len(),
        stop_reason,
        depth_cap_hit: stop_reason == StopReason::DepthCap,
        consistency_flags: equal_vector_conflicts(set, config.measure_tolerance),
        iterations,
        wall_time_ms: Some(start.elapsed().as_millis() as u64),
    };
    Ok(Learned {
        function: best.function,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::objective::global_error;

    #[test]
    fn learns_on_fixture_and_reports_consistently() {
        let set = fixture::learning_set();
        let cfg = LearnConfig {
            seed: 3,
            ..Default::default()
        };
        let learned = learn_objective(&set, &cfg).unwrap();
        let again = global_error(&learned.function, &set, &cfg.error_model().unwrap()).unwrap();
        assert!((again.error - learned.report.final_error).abs() <= 1e-9);
        let accepted = learned.report.accepted_errors();
        assert!(accepted.windows(2).all(|w| w[1] < w[0]));
        // The three equal-vector conflicts cannot be fixed by any weighting.
        assert_eq!(learned.report.consistency_flags.len(), 3);
        assert!(learned.report.final_incompatible >= 3);
        assert!(learned.function.rules.last().unwrap().condition.is_catch_all());
    }

    #[test]
    fn single_rule_mode_does_not_partition() {
        let set = fixture::learning_set();
        let cfg = LearnConfig {
            partitioning: false,
            ..Default::default()
        };
        let learned = learn_objective(&set, &cfg).unwrap();
        assert_eq!(learned.function.rules.len(), 1);
        assert_eq!(learned.report.stop_reason, StopReason::SingleRule);
    }

    #[test]
    fn unanswered_set_is_rejected() {
        let mut set = fixture::learning_set();
        set.preferences.pop_first();
        assert!(matches!(
            learn_objective(&set, &LearnConfig::default()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn inherited_genome_reproduces_single_rule() {
        let f = ObjectiveFunction::single(fixture::building_schema(), vec![1, 2, 3, 4, 5, 6]).unwrap();
        let conds = vec![
            fixture::building_function().rules[0].condition.clone(),
            RuleCondition::always(),
        ];
        assert_eq!(inherit(&f, &conds), vec![1, 2, 3, 4, 5, 6, 1, 2, 3, 4, 5, 6]);
    }
}

//! Partitioning of the measure space.
//!
//! Solutions are labelled by whether the comparison they appear in is
//! compatible with the current function, then a rule learner looks for
//! threshold regions where the labels concentrate. Those regions become the
//! conditions of new regression rules.
//!
//! The learner is a grow-and-prune sequential coverer in the IREP/RIPPER
//! family: rules for the minority label are grown clause by clause on two
//! thirds of the remaining examples by information gain, pruned back on the
//! held-out third, and kept only if their share of the label clearly exceeds
//! the base rate there and on the remaining examples as a whole.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{ComparisonSet, MeasureSchema};
use crate::objective::{comp_scores, Clause, ErrorModel, ObjectiveFunction, Relation, RuleCondition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Label {
    Compatible,
    Incompatible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub measures: Vec<f64>,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PartitionConfig {
    /// Smallest number of (remaining) examples an accepted rule must cover.
    pub min_rule_coverage: usize,
    pub max_clauses_per_rule: usize,
    pub max_rules: usize,
    pub prune_holdout_fraction: f64,
    pub seed: u64,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self {
            min_rule_coverage: 5,
            max_clauses_per_rule: 2,
            max_rules: 4,
            prune_holdout_fraction: 1.0 / 3.0,
            seed: 0,
        }
    }
}

/// Two examples per answered comparison, both labelled by that comparison's
/// compatibility with `f`.
pub fn label_solutions(f: &ObjectiveFunction, set: &ComparisonSet, model: &ErrorModel) -> Result<Vec<LabeledExample>> {
    let mut out = Vec::with_capacity(2 * set.comparisons.len());
    for (c, verdict) in set.answered() {
        let (f1, f2) = (f.evaluate(&c.sol1)?, f.evaluate(&c.sol2)?);
        let label = if comp_scores(f1, f2, verdict, model.tie_epsilon) == 1 {
            Label::Incompatible
        } else {
            Label::Compatible
        };
        out.push(LabeledExample {
            measures: c.sol1.measures.clone(),
            label,
        });
        out.push(LabeledExample {
            measures: c.sol2.measures.clone(),
            label,
        });
    }
    Ok(out)
}

/// A rule's share of the target label must exceed the base rate by this factor.
const MIN_LIFT: f64 = 1.2;

/// Below this many held-out target examples, the holdout split is skipped.
const MIN_HELD_OUT_TARGETS: usize = 2;

/// The number with the fewest decimals in `(lo, hi]`, falling back to the
/// midpoint. Any such cut separates the two values exactly as the midpoint
/// does, and short thresholds make the rendered rules easier to read.
fn simple_cut(lo: f64, hi: f64) -> f64 {
    for decimals in 0..=6 {
        let scale = 10f64.powi(decimals);
        let t = ((lo * scale).floor() + 1.0) / scale;
        if t > lo && t <= hi {
            return t;
        }
    }
    (lo + hi) / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Test {
    measure: usize,
    op: Relation,
    threshold: f64,
}

impl Test {
    fn holds(&self, x: &[f64]) -> bool {
        self.op.holds(x[self.measure], self.threshold)
    }
}

fn covers(tests: &[Test], x: &[f64]) -> bool {
    tests.iter().all(|t| t.holds(x))
}

/// (target, other) counts of the examples covered by `tests`.
fn counts(tests: &[Test], examples: &[&LabeledExample], target: Label) -> (usize, usize) {
    examples
        .iter()
        .filter(|e| covers(tests, &e.measures))
        .fold(
            (0, 0),
            |(p, n), e| if e.label == target { (p + 1, n) } else { (p, n + 1) },
        )
}

fn entropy(p: usize, n: usize) -> f64 {
    let k = (p + n) as f64;
    [p, n]
        .iter()
        .filter(|&&x| x > 0)
        .map(|&x| {
            let q = x as f64 / k;
            -q * q.log2()
        })
        .sum()
}

/// Entropy reduction from splitting `(p0, n0)` into the covered part
/// `(p1, n1)` and the rest, counted only when the covered part is richer in
/// the target label than its parent.
fn split_gain(p0: usize, n0: usize, p1: usize, n1: usize) -> f64 {
    let (k0, k1) = ((p0 + n0) as f64, (p1 + n1) as f64);
    if p1 == 0 || p1 as f64 / k1 <= p0 as f64 / k0 {
        return f64::NEG_INFINITY;
    }
    let (p2, n2) = (p0 - p1, n0 - n1);
    entropy(p0, n0) - (k1 / k0) * entropy(p1, n1) - ((p2 + n2) as f64 / k0) * entropy(p2, n2)
}

fn grow(grow_set: &[&LabeledExample], target: Label, dims: usize, max_clauses: usize, min_cover: usize) -> Vec<Test> {
    let mut rule: Vec<Test> = Vec::new();
    loop {
        let covered: Vec<&LabeledExample> = grow_set
            .iter()
            .copied()
            .filter(|e| covers(&rule, &e.measures))
            .collect();
        let (p0, n0) = counts(&[], &covered, target);
        if n0 == 0 || p0 == 0 || rule.len() >= max_clauses {
            return rule;
        }
        let mut best: Option<(f64, Test)> = None;
        for measure in 0..dims {
            let mut values: Vec<f64> = covered.iter().map(|e| e.measures[measure]).collect();
            values.sort_by(f64::total_cmp);
            values.dedup();
            for w in values.windows(2) {
                let threshold = simple_cut(w[0], w[1]);
                for op in [Relation::Lt, Relation::Ge] {
                    let test = Test { measure, op, threshold };
                    let (p1, n1) = counts(&[test], &covered, target);
                    if p1 + n1 < min_cover {
                        continue;
                    }
                    let gain = split_gain(p0, n0, p1, n1);
                    if gain > 1e-12 && best.is_none_or(|(g, _)| gain > g) {
                        best = Some((gain, test));
                    }
                }
            }
        }
        match best {
            Some((_, test)) => rule.push(test),
            None => return rule,
        }
    }
}

/// Keeps the prefix of `rule` with the best `(p − n)/(p + n)` on the prune set.
fn prune(rule: &[Test], prune_set: &[&LabeledExample], target: Label) -> Vec<Test> {
    let mut best_len = rule.len();
    let mut best_value = f64::NEG_INFINITY;
    for len in 1..=rule.len() {
        let (p, n) = counts(&rule[..len], prune_set, target);
        if p + n == 0 {
            continue;
        }
        let value = (p as f64 - n as f64) / (p + n) as f64;
        // strict: ties keep the shorter, more general prefix
        if value > best_value {
            best_value = value;
            best_len = len;
        }
    }
    rule[..best_len].to_vec()
}

fn to_condition(rule: &[Test], schema: &MeasureSchema) -> RuleCondition {
    RuleCondition::new(
        rule.iter()
            .map(|t| Clause::new(&schema.measures[t.measure].id, t.op, t.threshold))
            .collect(),
    )
}

/// Induced region conditions, minority label first, followed by the catch-all.
///
/// Returns the catch-all alone when either label is missing or no rule
/// survives pruning.
pub fn induce_rules(
    examples: &[LabeledExample],
    schema: &MeasureSchema,
    config: &PartitionConfig,
) -> Vec<RuleCondition> {
    let mut out: Vec<RuleCondition> = Vec::new();
    let incompatible = examples.iter().filter(|e| e.label == Label::Incompatible).count();
    let compatible = examples.len() - incompatible;
    if incompatible == 0 || compatible == 0 {
        return vec![RuleCondition::always()];
    }
    let target = if compatible < incompatible {
        Label::Compatible
    } else {
        Label::Incompatible
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut remaining: Vec<&LabeledExample> = examples.iter().collect();

    while out.len() < config.max_rules {
        let (mut pos, mut neg): (Vec<&LabeledExample>, Vec<&LabeledExample>) =
            remaining.iter().copied().partition(|e| e.label == target);
        if pos.is_empty() {
            break;
        }
        pos.shuffle(&mut rng);
        neg.shuffle(&mut rng);
        let holdout = |n: usize| ((n as f64) * config.prune_holdout_fraction).round() as usize;
        let (grow_set, prune_set, pos_prune) = if holdout(pos.len()) < MIN_HELD_OUT_TARGETS {
            // Too few target examples to hold any out: grow and prune on all of them.
            (remaining.clone(), remaining.clone(), pos.len())
        } else {
            let (pos_prune, pos_grow) = pos.split_at(holdout(pos.len()).min(pos.len()));
            let (neg_prune, neg_grow) = neg.split_at(holdout(neg.len()).min(neg.len()));
            (
                pos_grow.iter().chain(neg_grow).copied().collect::<Vec<_>>(),
                pos_prune.iter().chain(neg_prune).copied().collect::<Vec<_>>(),
                pos_prune.len(),
            )
        };

        // coverage floor scaled to the grow share of the remaining examples
        let min_cover = (config.min_rule_coverage * grow_set.len()).div_ceil(remaining.len().max(1));
        let grown = grow(&grow_set, target, schema.len(), config.max_clauses_per_rule, min_cover);
        if grown.is_empty() {
            break;
        }
        let rule = prune(&grown, &prune_set, target);

        // Held-out check, then the same on every remaining example.
        let (p, n) = counts(&rule, &prune_set, target);
        let (p_all, n_all) = counts(&rule, &remaining, target);
        let lifted = |p: usize, n: usize, pos: usize, total: usize| {
            p > 0 && p as f64 / (p + n) as f64 > MIN_LIFT * pos as f64 / total as f64
        };
        let accepted = lifted(p, n, pos_prune, prune_set.len())
            && lifted(p_all, n_all, pos.len(), remaining.len())
            && p_all + n_all >= config.min_rule_coverage;
        if !accepted {
            break;
        }
        out.push(to_condition(&rule, schema));
        remaining.retain(|e| !covers(&rule, &e.measures));
    }
    out.push(RuleCondition::always());
    out
}

/// New condition list: induced regions first, then the current conditions.
/// Returns `current` unchanged when nothing new was induced.
pub fn refine_partitions(
    current: &[RuleCondition],
    f: &ObjectiveFunction,
    set: &ComparisonSet,
    model: &ErrorModel,
    config: &PartitionConfig,
) -> Result<Vec<RuleCondition>> {
    if config.max_rules == 0 {
        return Ok(current.to_vec());
    }
    let examples = label_solutions(f, set, model)?;
    let induced = induce_rules(&examples, &set.schema, config);
    let mut out: Vec<RuleCondition> = induced
        .into_iter()
        .filter(|c| !c.is_catch_all() && !current.contains(c))
        .collect();
    if out.is_empty() {
        return Ok(current.to_vec());
    }
    out.extend(current.iter().cloned());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn schema() -> MeasureSchema {
        MeasureSchema::percent(&["m1", "m2"]).unwrap()
    }

    fn separable(n: usize, seed: u64) -> Vec<LabeledExample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let m1: f64 = rng.random_range(0.0..100.0);
                let m2: f64 = rng.random_range(0.0..100.0);
                LabeledExample {
                    measures: vec![m1, m2],
                    label: if m1 < 50.0 {
                        Label::Incompatible
                    } else {
                        Label::Compatible
                    },
                }
            })
            .collect()
    }

    #[test]
    fn missing_label_gives_catch_all() {
        let all_ok: Vec<_> = separable(50, 1)
            .into_iter()
            .map(|e| LabeledExample {
                label: Label::Compatible,
                ..e
            })
            .collect();
        assert_eq!(
            induce_rules(&all_ok, &schema(), &PartitionConfig::default()),
            vec![RuleCondition::always()]
        );
    }

    #[test]
    fn split_gain_prefers_purity() {
        assert!(split_gain(10, 10, 10, 0) > split_gain(10, 10, 10, 5));
        assert_eq!(split_gain(10, 10, 0, 4), f64::NEG_INFINITY);
        // a side poorer in the target than its parent does not count
        assert_eq!(split_gain(10, 10, 2, 8), f64::NEG_INFINITY);
        // a perfect split of a balanced set removes one full bit
        assert!((split_gain(10, 10, 10, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cuts_are_short_and_separate() {
        assert_eq!(simple_cut(82.9, 84.5), 83.0);
        assert_eq!(simple_cut(82.0, 82.0 + 1e-9), 82.0 + 0.5e-9);
        assert_eq!(simple_cut(0.12, 0.19), 0.13);
        assert_eq!(simple_cut(4.0, 5.0), 5.0);
        for (lo, hi) in [(1.234, 1.2351), (99.99, 100.0), (0.0, 0.001)] {
            let t = simple_cut(lo, hi);
            assert!(t > lo && t <= hi, "{lo} {hi} {t}");
        }
    }

    #[test]
    fn prune_keeps_best_prefix() {
        let ex = |m1: f64, m2: f64, label| LabeledExample {
            measures: vec![m1, m2],
            label,
        };
        let data = [
            ex(10.0, 10.0, Label::Incompatible),
            ex(20.0, 80.0, Label::Incompatible),
            ex(80.0, 80.0, Label::Compatible),
        ];
        let refs: Vec<&LabeledExample> = data.iter().collect();
        let rule = [
            Test {
                measure: 0,
                op: Relation::Lt,
                threshold: 50.0,
            },
            Test {
                measure: 1,
                op: Relation::Lt,
                threshold: 50.0,
            },
        ];
        // the second clause drops a positive without removing any negative
        assert_eq!(prune(&rule, &refs, Label::Incompatible), rule[..1].to_vec());
    }

    #[test]
    fn separable_threshold_is_found() {
        let rules = induce_rules(&separable(200, 4), &schema(), &PartitionConfig::default());
        assert_eq!(rules.len(), 2);
        let clauses = &rules[0].clauses;
        assert_eq!(clauses.len(), 1);
        assert_eq!(clauses[0].measure, "m1");
        assert_eq!(clauses[0].op, Relation::Lt);
        assert!((45.0..=55.0).contains(&clauses[0].threshold));
        assert!(rules[1].is_catch_all());
    }
}

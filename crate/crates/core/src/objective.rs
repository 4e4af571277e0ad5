//! Rule-based objective functions and the compatibility/error measures used to
//! score them against user preferences.
//!
//! An [`ObjectiveFunction`] is an ordered list of [`RegressionRule`]s. A solution
//! is scored by the first rule whose condition it satisfies, as the weighted mean
//! of its measure values under that rule's integer weights. The last rule is a
//! catch-all, so every solution gets a score.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::model::{Comparison, ComparisonSet, MeasureSchema, Solution, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Relation::Lt => value < threshold,
            Relation::Le => value <= threshold,
            Relation::Gt => value > threshold,
            Relation::Ge => value >= threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub measure: String,
    pub op: Relation,
    pub threshold: f64,
}

impl Clause {
    pub fn new(measure: impl Into<String>, op: Relation, threshold: f64) -> Self {
        Self {
            measure: measure.into(),
            op,
            threshold,
        }
    }
}

/// Conjunction of threshold clauses. No clauses means "always true".
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RuleCondition {
    pub clauses: Vec<Clause>,
}

impl RuleCondition {
    pub fn always() -> Self {
        Self::default()
    }

    pub fn new(clauses: Vec<Clause>) -> Self {
        Self { clauses }
    }

    pub fn is_catch_all(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn compile(&self, schema: &MeasureSchema) -> Result<CompiledCondition> {
        let clauses = self
            .clauses
            .iter()
            .map(|c| {
                schema
                    .index_of(&c.measure)
                    .map(|i| (i, c.op, c.threshold))
                    .ok_or_else(|| Error::invalid(format!("unknown measure {:?}", c.measure)))
            })
            .collect::<Result<_>>()?;
        Ok(CompiledCondition { clauses })
    }

    pub fn violations(&self, schema: &MeasureSchema, path: &str) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, c) in self.clauses.iter().enumerate() {
            if schema.index_of(&c.measure).is_none() {
                out.push(Violation::new(
                    format!("{path}[{i}].measure"),
                    format!("unknown measure {:?}", c.measure),
                ));
            }
            if !schema.contains_value(c.threshold) {
                out.push(Violation::new(
                    format!("{path}[{i}].threshold"),
                    format!(
                        "threshold {} outside [{}, {}]",
                        c.threshold, schema.val_min, schema.val_max
                    ),
                ));
            }
        }
        out
    }
}

/// A condition with measure ids resolved to vector indices.
#[derive(Clone, Debug)]
pub struct CompiledCondition {
    clauses: Vec<(usize, Relation, f64)>,
}

impl CompiledCondition {
    pub fn matches(&self, values: &[f64]) -> bool {
        self.clauses.iter().all(|&(i, op, t)| op.holds(values[i], t))
    }
}

/// Index of the first condition matching `values`; falls back to the last one.
pub(crate) fn first_match(conditions: &[CompiledCondition], values: &[f64]) -> usize {
    conditions
        .iter()
        .position(|c| c.matches(values))
        .unwrap_or(conditions.len() - 1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionRule {
    pub condition: RuleCondition,
    pub weights: Vec<u32>,
}

impl RegressionRule {
    pub fn new(condition: RuleCondition, weights: Vec<u32>) -> Self {
        Self { condition, weights }
    }
}

/// `Σ wᵢ·vᵢ / Σ wᵢ`, accumulated left to right.
///
/// Every scoring path goes through this function so that errors computed
/// during search and on reload agree to the last bit.
pub fn weighted_mean(weights: &[u32], values: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (&w, &v) in weights.iter().zip(values) {
        let w = f64::from(w);
        num += w * v;
        den += w;
    }
    num / den
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveFunction {
    pub schema: MeasureSchema,
    pub rules: Vec<RegressionRule>,
}

impl ObjectiveFunction {
    pub fn new(schema: MeasureSchema, rules: Vec<RegressionRule>) -> Result<Self> {
        let f = Self { schema, rules };
        let violations = f.validate();
        if violations.is_empty() {
            Ok(f)
        } else {
            Err(Error::Invariant(violations))
        }
    }

    /// One catch-all rule with the given weights.
    pub fn single(schema: MeasureSchema, weights: Vec<u32>) -> Result<Self> {
        Self::new(schema, vec![RegressionRule::new(RuleCondition::always(), weights)])
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.schema.violations("$.schema");
        if self.rules.is_empty() {
            out.push(Violation::new("$.rules", "at least one rule is required"));
        }
        for (i, rule) in self.rules.iter().enumerate() {
            let path = format!("$.rules[{i}]");
            out.extend(rule.condition.violations(&self.schema, &format!("{path}.condition")));
            if rule.weights.len() != self.schema.len() {
                out.push(Violation::new(
                    format!("{path}.weights"),
                    format!("expected {} weights, found {}", self.schema.len(), rule.weights.len()),
                ));
            }
            if rule.weights.iter().all(|&w| w == 0) {
                out.push(Violation::new(
                    format!("{path}.weights"),
                    "at least one weight must be positive",
                ));
            }
        }
        if let Some(last) = self.rules.last() {
            if !last.condition.is_catch_all() {
                out.push(Violation::new(
                    format!("$.rules[{}].condition", self.rules.len() - 1),
                    "the last rule must be an unconditional catch-all",
                ));
            }
        }
        out
    }

    pub fn conditions(&self) -> Vec<RuleCondition> {
        self.rules.iter().map(|r| r.condition.clone()).collect()
    }

    /// Index of the rule that scores `values` under first-match semantics.
    pub fn rule_for(&self, values: &[f64]) -> usize {
        self.rules
            .iter()
            .position(|r| {
                r.condition.clauses.iter().all(|c| {
                    self.schema
                        .index_of(&c.measure)
                        .is_some_and(|i| c.op.holds(values[i], c.threshold))
                })
            })
            .unwrap_or(self.rules.len() - 1)
    }

    pub fn evaluate_values(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.schema.len() {
            return Err(Error::invalid(format!(
                "expected {} measure values, got {}",
                self.schema.len(),
                values.len()
            )));
        }
        let rule = &self.rules[self.rule_for(values)];
        Ok(weighted_mean(&rule.weights, values))
    }

    pub fn evaluate(&self, sol: &Solution) -> Result<f64> {
        sol.check_conforms(&self.schema)?;
        self.evaluate_values(&sol.measures)
    }
}

/// Parameters of the per-comparison error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ErrorModel {
    /// Fixed penalty for every incompatible comparison.
    pub val_error: f64,
    /// Two scores closer than this count as equal.
    pub tie_epsilon: f64,
}

impl Default for ErrorModel {
    fn default() -> Self {
        Self {
            val_error: 40.0,
            tie_epsilon: 0.5,
        }
    }
}

impl ErrorModel {
    pub fn new(val_error: f64, tie_epsilon: f64) -> Result<Self> {
        if !(val_error >= 0.0 && val_error.is_finite()) {
            return Err(Error::invalid(format!("val_error must be >= 0, got {val_error}")));
        }
        if !(tie_epsilon >= 0.0 && tie_epsilon.is_finite()) {
            return Err(Error::invalid(format!("tie_epsilon must be >= 0, got {tie_epsilon}")));
        }
        Ok(Self { val_error, tie_epsilon })
    }
}

/// 0 if `verdict` agrees with the order of the two scores, 1 otherwise.
pub fn comp_scores(f1: f64, f2: f64, verdict: Verdict, tie_epsilon: f64) -> u8 {
    let compatible = match verdict {
        Verdict::Tie => (f1 - f2).abs() <= tie_epsilon,
        Verdict::PreferSol1 => f1 > f2 + tie_epsilon,
        Verdict::PreferSol2 => f2 > f1 + tie_epsilon,
    };
    u8::from(!compatible)
}

pub fn error_scores(f1: f64, f2: f64, verdict: Verdict, model: &ErrorModel) -> f64 {
    if comp_scores(f1, f2, verdict, model.tie_epsilon) == 0 {
        0.0
    } else {
        model.val_error + (f1 - f2).abs()
    }
}

pub fn comp(c: &Comparison, f: &ObjectiveFunction, verdict: Verdict, tie_epsilon: f64) -> Result<u8> {
    Ok(comp_scores(
        f.evaluate(&c.sol1)?,
        f.evaluate(&c.sol2)?,
        verdict,
        tie_epsilon,
    ))
}

pub fn error(c: &Comparison, f: &ObjectiveFunction, verdict: Verdict, model: &ErrorModel) -> Result<f64> {
    Ok(error_scores(f.evaluate(&c.sol1)?, f.evaluate(&c.sol2)?, verdict, model))
}

/// Mean error over a comparison sample, with the number of incompatible comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalError {
    pub error: f64,
    pub incompatible: usize,
    pub comparisons: usize,
}

pub fn global_error(f: &ObjectiveFunction, set: &ComparisonSet, model: &ErrorModel) -> Result<GlobalError> {
    if set.comparisons.is_empty() {
        return Err(Error::invalid("global error of an empty comparison set"));
    }
    set.require_fully_answered()?;
    let mut total = 0.0;
    let mut incompatible = 0;
    for (c, verdict) in set.answered() {
        let (f1, f2) = (f.evaluate(&c.sol1)?, f.evaluate(&c.sol2)?);
        incompatible += usize::from(comp_scores(f1, f2, verdict, model.tie_epsilon));
        total += error_scores(f1, f2, verdict, model);
    }
    Ok(GlobalError {
        error: total / set.comparisons.len() as f64,
        incompatible,
        comparisons: set.comparisons.len(),
    })
}

// --- rendering -------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq)]
struct Bound {
    value: f64,
    inclusive: bool,
}

/// A possibly unbounded interval on one measure.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Interval {
    lo: Option<Bound>,
    hi: Option<Bound>,
}

impl Interval {
    const ALL: Interval = Interval { lo: None, hi: None };

    fn from_clauses<'a>(clauses: impl IntoIterator<Item = &'a Clause>) -> Interval {
        let mut iv = Interval::ALL;
        for c in clauses {
            let b = Bound {
                value: c.threshold,
                inclusive: matches!(c.op, Relation::Le | Relation::Ge),
            };
            match c.op {
                Relation::Gt | Relation::Ge => {
                    if iv.lo.is_none_or(|lo| lower_before(lo, b)) {
                        iv.lo = Some(b);
                    }
                }
                Relation::Lt | Relation::Le => {
                    if iv.hi.is_none_or(|hi| upper_before(b, hi)) {
                        iv.hi = Some(b);
                    }
                }
            }
        }
        iv
    }

    fn render(&self, measure: &str) -> String {
        let lo_op = |b: Bound| if b.inclusive { "≤" } else { "<" };
        match (self.lo, self.hi) {
            (None, None) => "true".to_owned(),
            (Some(lo), None) => format!("{measure} {} {}", if lo.inclusive { "≥" } else { ">" }, num(lo.value)),
            (None, Some(hi)) => format!("{measure} {} {}", lo_op(hi), num(hi.value)),
            (Some(lo), Some(hi)) => format!(
                "{} {} {measure} {} {}",
                num(lo.value),
                lo_op(lo),
                lo_op(hi),
                num(hi.value)
            ),
        }
    }
}

/// Lower bound `a` admits more values than lower bound `b`.
fn lower_before(a: Bound, b: Bound) -> bool {
    a.value < b.value || (a.value == b.value && a.inclusive && !b.inclusive)
}

/// Upper bound `a` admits fewer values than upper bound `b`.
fn upper_before(a: Bound, b: Bound) -> bool {
    a.value < b.value || (a.value == b.value && !a.inclusive && b.inclusive)
}

/// Complement of a union of intervals, if it is a single non-empty interval.
fn single_gap(mut parts: Vec<Interval>) -> Option<Interval> {
    parts.retain(|iv| match (iv.lo, iv.hi) {
        (Some(lo), Some(hi)) => lo.value < hi.value || (lo.value == hi.value && lo.inclusive && hi.inclusive),
        _ => true,
    });
    if parts.is_empty() {
        return None;
    }
    parts.sort_by(|a, b| match (a.lo, b.lo) {
        (None, None) => std::cmp::Ordering::Equal,
        (None, _) => std::cmp::Ordering::Less,
        (_, None) => std::cmp::Ordering::Greater,
        (Some(x), Some(y)) => x.value.total_cmp(&y.value).then(y.inclusive.cmp(&x.inclusive)),
    });
    let mut merged: Vec<Interval> = Vec::new();
    for iv in parts {
        if let Some(cur) = merged.last_mut() {
            let touches = match (cur.hi, iv.lo) {
                (None, _) | (_, None) => true,
                (Some(hi), Some(lo)) => lo.value < hi.value || (lo.value == hi.value && (hi.inclusive || lo.inclusive)),
            };
            if touches {
                cur.hi = match (cur.hi, iv.hi) {
                    (None, _) | (_, None) => None,
                    (Some(a), Some(b)) => Some(if upper_before(a, b) { b } else { a }),
                };
                continue;
            }
        }
        merged.push(iv);
    }
    let flip = |b: Bound| Bound {
        value: b.value,
        inclusive: !b.inclusive,
    };
    let mut gaps = Vec::new();
    if let Some(lo) = merged[0].lo {
        gaps.push(Interval {
            lo: None,
            hi: Some(flip(lo)),
        });
    }
    for pair in merged.windows(2) {
        gaps.push(Interval {
            lo: pair[0].hi.map(flip),
            hi: pair[1].lo.map(flip),
        });
    }
    if let Some(hi) = merged[merged.len() - 1].hi {
        gaps.push(Interval {
            lo: Some(flip(hi)),
            hi: None,
        });
    }
    match gaps.as_slice() {
        [gap] => Some(*gap),
        _ => None,
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn render_condition(cond: &RuleCondition) -> String {
    if cond.is_catch_all() {
        return "true".to_owned();
    }
    let mut measures: Vec<&str> = Vec::new();
    for c in &cond.clauses {
        if !measures.contains(&c.measure.as_str()) {
            measures.push(&c.measure);
        }
    }
    measures
        .iter()
        .map(|m| Interval::from_clauses(cond.clauses.iter().filter(|c| c.measure == *m)).render(m))
        .collect::<Vec<_>>()
        .join(" ∧ ")
}

/// What the catch-all rule actually covers, when earlier rules all bound the
/// same single measure and leave exactly one interval uncovered.
fn implied_default(rules: &[RegressionRule]) -> Option<String> {
    let earlier = &rules[..rules.len() - 1];
    let measure = &earlier.first()?.condition.clauses.first()?.measure;
    let mut parts = Vec::new();
    for rule in earlier {
        let clauses = &rule.condition.clauses;
        if clauses.is_empty() || clauses.iter().any(|c| c.measure != *measure) {
            return None;
        }
        parts.push(Interval::from_clauses(clauses));
    }
    single_gap(parts).map(|gap| gap.render(measure))
}

/// Plain-text rendering, one line per rule:
/// `if (S_cv < 83) ⇒ S = (1/28)(6 × S_cv + 2 × S_el + …)`.
///
/// Zero-weight measures are left out of the sum.
pub fn render_rules(f: &ObjectiveFunction) -> String {
    let mut out = String::new();
    for (i, rule) in f.rules.iter().enumerate() {
        let is_default = i + 1 == f.rules.len();
        let cond = if is_default && f.rules.len() > 1 {
            implied_default(&f.rules).unwrap_or_else(|| "true".to_owned())
        } else {
            render_condition(&rule.condition)
        };
        let total: u64 = rule.weights.iter().map(|&w| u64::from(w)).sum();
        let terms = rule
            .weights
            .iter()
            .zip(f.schema.ids())
            .filter(|(w, _)| **w > 0)
            .map(|(w, id)| format!("{w} × {id}"))
            .collect::<Vec<_>>()
            .join(" + ");
        let _ = writeln!(out, "if ({cond}) ⇒ S = (1/{total})({terms})");
    }
    out
}

impl fmt::Display for ObjectiveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_rules(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;

    fn two_measure() -> ObjectiveFunction {
        ObjectiveFunction::single(MeasureSchema::percent(&["a", "b"]).unwrap(), vec![1, 1]).unwrap()
    }

    fn pair(f1: [f64; 2], f2: [f64; 2]) -> Comparison {
        Comparison::new(
            "c",
            Solution::new("x", "i", f1.to_vec()),
            Solution::new("y", "i", f2.to_vec()),
        )
    }

    #[test]
    fn building_function_on_perfect_solution() {
        let f = fixture::building_function();
        let sol = Solution::new("s", "i", vec![100.0; 6]);
        assert_eq!(f.evaluate(&sol).unwrap(), 100.0);
    }

    #[test]
    fn building_function_first_rule() {
        let f = fixture::building_function();
        let sol = Solution::new("s", "i", vec![80.0, 100.0, 100.0, 100.0, 100.0, 100.0]);
        // (6·80 + 2·100 + 9·100 + 2·100 + 2·100 + 7·100) / 28
        let expected = 2680.0 / 28.0;
        assert!((f.evaluate(&sol).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 95.7143).abs() < 1e-4);
    }

    #[test]
    fn equal_weights_is_midpoint() {
        let f = two_measure();
        assert_eq!(f.evaluate_values(&[0.0, 100.0]).unwrap(), 50.0);
    }

    #[test]
    fn evaluate_rejects_wrong_arity() {
        let f = two_measure();
        let err = f.evaluate(&Solution::new("s", "i", vec![1.0])).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn comp_branches() {
        let eps0 = 0.0;
        assert_eq!(comp_scores(60.0, 60.0, Verdict::Tie, eps0), 0);
        assert_eq!(comp_scores(60.0, 50.0, Verdict::PreferSol1, eps0), 0);
        assert_eq!(comp_scores(60.0, 60.0, Verdict::PreferSol1, eps0), 1);
        assert_eq!(comp_scores(50.0, 60.0, Verdict::PreferSol2, eps0), 0);
        assert_eq!(comp_scores(60.0, 60.4, Verdict::Tie, 0.5), 0);
        assert_eq!(comp_scores(60.0, 60.4, Verdict::PreferSol2, 0.5), 1);
    }

    #[test]
    fn error_values() {
        let m = ErrorModel::new(40.0, 0.0).unwrap();
        assert_eq!(error_scores(60.0, 50.0, Verdict::PreferSol1, &m), 0.0);
        assert_eq!(error_scores(60.0, 70.0, Verdict::PreferSol1, &m), 50.0);
        assert_eq!(error_scores(0.0, 100.0, Verdict::PreferSol1, &m), 140.0);
    }

    #[test]
    fn global_error_is_mean() {
        let f = two_measure();
        let mut set = ComparisonSet::new(
            f.schema.clone(),
            vec![pair([60.0, 60.0], [50.0, 50.0]), pair([60.0, 60.0], [70.0, 70.0])],
        );
        set.comparisons[1].id = "d".into();
        set.record(crate::model::Preference::new("c", Verdict::PreferSol1));
        set.record(crate::model::Preference::new("d", Verdict::PreferSol1));
        let g = global_error(&f, &set, &ErrorModel::new(40.0, 0.0).unwrap()).unwrap();
        assert_eq!(g.error, 25.0);
        assert_eq!(g.incompatible, 1);
        assert_eq!(g.comparisons, 2);
    }

    #[test]
    fn global_error_preconditions() {
        let f = two_measure();
        let empty = ComparisonSet::new(f.schema.clone(), vec![]);
        assert!(global_error(&f, &empty, &ErrorModel::default()).is_err());
        let unanswered = ComparisonSet::new(f.schema.clone(), vec![pair([1.0, 1.0], [2.0, 2.0])]);
        assert!(global_error(&f, &unanswered, &ErrorModel::default()).is_err());
    }

    #[test]
    fn function_invariants() {
        let schema = MeasureSchema::percent(&["a", "b"]).unwrap();
        assert!(ObjectiveFunction::new(schema.clone(), vec![]).is_err());
        assert!(ObjectiveFunction::single(schema.clone(), vec![0, 0]).is_err());
        assert!(ObjectiveFunction::single(schema.clone(), vec![1]).is_err());
        let guarded = RegressionRule::new(
            RuleCondition::new(vec![Clause::new("a", Relation::Lt, 5.0)]),
            vec![1, 1],
        );
        assert!(ObjectiveFunction::new(schema.clone(), vec![guarded.clone()]).is_err());
        let bad_measure = RegressionRule::new(
            RuleCondition::new(vec![Clause::new("zz", Relation::Lt, 500.0)]),
            vec![1, 1],
        );
        let err = ObjectiveFunction::new(
            schema.clone(),
            vec![bad_measure, RegressionRule::new(RuleCondition::always(), vec![1, 1])],
        )
        .unwrap_err();
        match err {
            Error::Invariant(v) => assert_eq!(v.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn first_match_wins() {
        let schema = MeasureSchema::percent(&["a", "b"]).unwrap();
        let f = ObjectiveFunction::new(
            schema,
            vec![
                RegressionRule::new(
                    RuleCondition::new(vec![Clause::new("a", Relation::Lt, 50.0)]),
                    vec![1, 0],
                ),
                RegressionRule::new(
                    RuleCondition::new(vec![Clause::new("a", Relation::Lt, 80.0)]),
                    vec![0, 1],
                ),
                RegressionRule::new(RuleCondition::always(), vec![1, 1]),
            ],
        )
        .unwrap();
        assert_eq!(f.evaluate_values(&[10.0, 90.0]).unwrap(), 10.0);
        assert_eq!(f.evaluate_values(&[60.0, 90.0]).unwrap(), 90.0);
        assert_eq!(f.evaluate_values(&[90.0, 70.0]).unwrap(), 80.0);
    }

    #[test]
    fn renders_building_function() {
        let text = render_rules(&fixture::building_function());
        let expected = "\
if (S_cv < 83) ⇒ S = (1/28)(6 × S_cv + 2 × S_el + 9 × S_sq + 2 × S_gr + 2 × S_or + 7 × S_sz)
if (83 ≤ S_cv < 93) ⇒ S = (1/28)(7 × S_cv + 7 × S_el + 1 × S_sq + 7 × S_gr + 6 × S_sz)
if (S_cv ≥ 93) ⇒ S = (1/30)(9 × S_cv + 9 × S_el + 3 × S_sq + 2 × S_gr + 7 × S_sz)
";
        assert_eq!(text, expected);
    }

    #[test]
    fn renders_single_default_rule() {
        let f = ObjectiveFunction::single(MeasureSchema::percent(&["m1", "m2", "m3"]).unwrap(), vec![1, 1, 1]).unwrap();
        assert_eq!(render_rules(&f), "if (true) ⇒ S = (1/3)(1 × m1 + 1 × m2 + 1 × m3)\n");
    }

    #[test]
    fn default_rule_falls_back_to_true() {
        let schema = MeasureSchema::percent(&["a", "b"]).unwrap();
        let f = ObjectiveFunction::new(
            schema,
            vec![
                RegressionRule::new(
                    RuleCondition::new(vec![
                        Clause::new("a", Relation::Lt, 20.0),
                        Clause::new("b", Relation::Ge, 50.5),
                    ]),
                    vec![1, 0],
                ),
                RegressionRule::new(RuleCondition::always(), vec![1, 1]),
            ],
        )
        .unwrap();
        let text = render_rules(&f);
        assert!(text.starts_with("if (a < 20 ∧ b ≥ 50.5) ⇒"), "{text}");
        assert!(text.contains("\nif (true) ⇒"), "{text}");
    }

    #[test]
    fn interval_gap_cases() {
        let lt = |t| Interval {
            lo: None,
            hi: Some(Bound {
                value: t,
                inclusive: false,
            }),
        };
        let ge = |t| Interval {
            lo: Some(Bound {
                value: t,
                inclusive: true,
            }),
            hi: None,
        };
        // (-inf, 10) ∪ [20, inf) leaves [10, 20)
        let gap = single_gap(vec![lt(10.0), ge(20.0)]).unwrap();
        assert_eq!(gap.render("m"), "10 ≤ m < 20");
        // full coverage leaves nothing
        assert!(single_gap(vec![lt(10.0), ge(10.0)]).is_none());
        // two gaps
        let mid = Interval {
            lo: Some(Bound {
                value: 30.0,
                inclusive: true,
            }),
            hi: Some(Bound {
                value: 40.0,
                inclusive: false,
            }),
        };
        assert!(single_gap(vec![mid]).is_none());
    }
}

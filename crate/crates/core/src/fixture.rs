//! Building-generalisation fixture: six constraint-satisfaction measures, the
//! reference three-rule satisfaction function, and two seeded 50-comparison
//! sets (learning and test) built so that the function scores 5 incompatible
//! comparisons on each, with global errors 4.25 and 4.63 at `val_error = 40`.
//!
//! Each set mixes ordinary comparisons that the function orders correctly,
//! equal-vector pairs judged equal, equal-vector pairs judged unequal (the
//! measure set cannot explain those), and a few comparisons whose verdict
//! contradicts the function by a controlled score gap.
//!
//! The generated JSON is shipped under `fixtures/building/`; a test keeps the
//! files and this generator in sync.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Comparison, ComparisonSet, MeasureDescriptor, MeasureSchema, Preference, Solution, Verdict};
use crate::objective::{Clause, ObjectiveFunction, RegressionRule, Relation, RuleCondition};

pub const CONVEXITY: usize = 0;
pub const ELONGATION: usize = 1;
pub const SIZE: usize = 5;

pub fn building_schema() -> MeasureSchema {
    MeasureSchema::new(
        vec![
            MeasureDescriptor::new("S_cv", "Convexity"),
            MeasureDescriptor::new("S_el", "Elongation"),
            MeasureDescriptor::new("S_sq", "Squareness"),
            MeasureDescriptor::new("S_gr", "Granularity"),
            MeasureDescriptor::new("S_or", "Orientation"),
            MeasureDescriptor::new("S_sz", "Size"),
        ],
        0.0,
        100.0,
    )
    .expect("static schema is valid")
}

/// The learned building satisfaction function. The third rule is the
/// catch-all and therefore covers `S_cv ≥ 93`.
pub fn building_function() -> ObjectiveFunction {
    let lt = |t| Clause::new("S_cv", Relation::Lt, t);
    let ge = |t| Clause::new("S_cv", Relation::Ge, t);
    ObjectiveFunction::new(
        building_schema(),
        vec![
            RegressionRule::new(RuleCondition::new(vec![lt(83.0)]), vec![6, 2, 9, 2, 2, 7]),
            RegressionRule::new(RuleCondition::new(vec![ge(83.0), lt(93.0)]), vec![7, 7, 1, 7, 0, 6]),
            RegressionRule::new(RuleCondition::always(), vec![9, 9, 3, 2, 0, 7]),
        ],
    )
    .expect("static function is valid")
}

/// Recipe for one fixture comparison set.
#[derive(Clone, Debug)]
pub struct FixtureRecipe {
    pub prefix: &'static str,
    pub seed: u64,
    pub size: usize,
    /// Equal-vector pairs answered with a tie.
    pub equal_ties: usize,
    /// Equal-vector pairs answered with a strict preference (always incompatible).
    pub equal_conflicts: usize,
    /// Score gaps of comparisons answered against the function's order.
    pub misordered_gaps: Vec<f64>,
}

pub fn learning_recipe() -> FixtureRecipe {
    FixtureRecipe {
        prefix: "learn",
        seed: 0x1EA2,
        size: 50,
        equal_ties: 4,
        equal_conflicts: 3,
        // 3·40 + 2·40 + 5 + 7.5 = 212.5 → 4.25
        misordered_gaps: vec![5.0, 7.5],
    }
}

pub fn test_recipe() -> FixtureRecipe {
    FixtureRecipe {
        prefix: "test",
        seed: 0x7E57,
        size: 50,
        equal_ties: 3,
        equal_conflicts: 2,
        // 5·40 + 8 + 11.25 + 12.25 = 231.5 → 4.63
        misordered_gaps: vec![8.0, 11.25, 12.25],
    }
}

pub fn learning_set() -> ComparisonSet {
    build_set(&learning_recipe())
}

pub fn test_set() -> ComparisonSet {
    build_set(&test_recipe())
}

struct Draft {
    a: Vec<f64>,
    b: Vec<f64>,
    verdict: Verdict,
}

fn random_vector(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..6).map(|_| f64::from(rng.random_range(35..=100u32))).collect();
    v[CONVEXITY] = f64::from(match rng.random_range(0..20u32) {
        0..=11 => rng.random_range(40..=82u32),
        12..=16 => rng.random_range(83..=92u32),
        _ => rng.random_range(94..=100u32),
    });
    v
}

/// Base vector whose convexity stays below 93, so a shift of `ELONGATION` or
/// `SIZE` moves the score by exactly a quarter of the shift.
fn quarter_weight_vector(rng: &mut ChaCha8Rng, shift: f64) -> (Vec<f64>, usize) {
    let mut v = random_vector(rng);
    let (cv, idx) = if rng.random_bool(0.5) {
        (rng.random_range(40..=82u32), SIZE)
    } else {
        (rng.random_range(83..=92u32), ELONGATION)
    };
    v[CONVEXITY] = f64::from(cv);
    let max_base = (100.0 - shift).floor() as u32;
    v[idx] = f64::from(rng.random_range(0..=max_base.min(70)));
    (v, idx)
}

fn svg_footprint(values: &[f64]) -> String {
    let w = 20.0 + 0.6 * values[SIZE];
    let h = w * (0.4 + 0.006 * values[ELONGATION]);
    let notch = (100.0 - values[3]) * 0.15;
    let (x0, y0) = ((100.0 - w) / 2.0, (100.0 - h) / 2.0);
    let (x1, y1) = (x0 + w, y0 + h);
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 100 100\"><polygon points=\"{x0:.1},{y0:.1} {x1:.1},{y0:.1} {x1:.1},{:.1} {:.1},{:.1} {:.1},{y1:.1} {x0:.1},{y1:.1}\"/></svg>",
        y1 - notch,
        x1 - notch,
        y1 - notch,
        x1 - notch
    )
}

pub fn build_set(recipe: &FixtureRecipe) -> ComparisonSet {
    let f = building_function();
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
    let mut drafts = Vec::with_capacity(recipe.size);

    for _ in 0..recipe.equal_ties {
        let v = random_vector(&mut rng);
        drafts.push(Draft {
            a: v.clone(),
            b: v,
            verdict: Verdict::Tie,
        });
    }
    for _ in 0..recipe.equal_conflicts {
        let v = random_vector(&mut rng);
        let verdict = if rng.random_bool(0.5) {
            Verdict::PreferSol1
        } else {
            Verdict::PreferSol2
        };
        drafts.push(Draft {
            a: v.clone(),
            b: v,
            verdict,
        });
    }
    for &gap in &recipe.misordered_gaps {
        let shift = 4.0 * gap;
        let (a, idx) = quarter_weight_vector(&mut rng, shift);
        let mut b = a.clone();
        b[idx] += shift;
        // `b` scores higher; the verdict says otherwise.
        drafts.push(Draft {
            a,
            b,
            verdict: Verdict::PreferSol1,
        });
    }
    while drafts.len() < recipe.size {
        let a = random_vector(&mut rng);
        let mut b = a.clone();
        let changes = rng.random_range(1..=3usize);
        for _ in 0..changes {
            let i = rng.random_range(0..6usize);
            let step = f64::from(rng.random_range(1..=25u32));
            let signed = if rng.random_bool(0.5) { step } else { -step };
            b[i] = (b[i] + signed).clamp(0.0, 100.0);
        }
        if a[CONVEXITY] == 93.0 || b[CONVEXITY] == 93.0 {
            continue;
        }
        let (fa, fb) = (
            f.evaluate_values(&a).expect("arity"),
            f.evaluate_values(&b).expect("arity"),
        );
        let gap = (fa - fb).abs();
        let verdict = if a == b || gap == 0.0 {
            Verdict::Tie
        } else if gap < 1.0 {
            // too close to call under any tie tolerance up to 0.5
            continue;
        } else if fa > fb {
            Verdict::PreferSol1
        } else {
            Verdict::PreferSol2
        };
        drafts.push(Draft { a, b, verdict });
    }

    drafts.shuffle(&mut rng);
    let mut set = ComparisonSet::new(building_schema(), Vec::with_capacity(drafts.len()));
    for (i, d) in drafts.into_iter().enumerate() {
        let (a, b, verdict) = if rng.random_bool(0.5) {
            (d.b, d.a, d.verdict.inverted())
        } else {
            (d.a, d.b, d.verdict)
        };
        let instance = format!("{}-b{:02}", recipe.prefix, i + 1);
        let id = format!("{}-{:02}", recipe.prefix, i + 1);
        let sol1 = Solution::new(format!("{instance}/s1"), &instance, a.clone()).with_display(svg_footprint(&a));
        let sol2 = Solution::new(format!("{instance}/s2"), &instance, b.clone()).with_display(svg_footprint(&b));
        set.comparisons.push(Comparison::new(&id, sol1, sol2));
        set.record(Preference::new(id, verdict));
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{global_error, ErrorModel};

    #[test]
    fn sets_are_well_formed() {
        for set in [learning_set(), test_set()] {
            assert!(set.validate().is_empty());
            assert_eq!(set.comparisons.len(), 50);
            assert!(set.is_fully_answered());
        }
    }

    #[test]
    fn generator_is_deterministic() {
        assert_eq!(learning_set(), learning_set());
        assert_ne!(learning_set(), test_set());
    }

    #[test]
    fn counts_hold_for_any_tolerance_up_to_half() {
        let f = building_function();
        for eps in [0.0, 0.25, 0.5] {
            let model = ErrorModel::new(40.0, eps).unwrap();
            let learn = global_error(&f, &learning_set(), &model).unwrap();
            assert_eq!(learn.incompatible, 5);
            assert!((learn.error - 4.25).abs() < 1e-9, "{}", learn.error);
            let test = global_error(&f, &test_set(), &model).unwrap();
            assert_eq!(test.incompatible, 5);
            assert!((test.error - 4.63).abs() < 1e-9, "{}", test.error);
        }
    }
}

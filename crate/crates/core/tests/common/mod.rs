#![allow(dead_code)]

use prefforge::model::{Comparison, ComparisonSet, MeasureSchema, Preference, Solution, Verdict};
use prefforge::objective::{global_error, ErrorModel, ObjectiveFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn schema(n: usize) -> MeasureSchema {
    let ids: Vec<String> = (1..=n).map(|i| format!("m{i}")).collect();
    MeasureSchema::percent(&ids).unwrap()
}

/// Random comparisons on a `[0, 100]` schema, unanswered.
pub fn random_pairs(dims: usize, n: usize, seed: u64) -> ComparisonSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| (0..dims).map(|_| rng.random_range(0.0..=100.0)).collect::<Vec<f64>>();
    let comparisons = (0..n)
        .map(|i| {
            let inst = format!("i{i}");
            Comparison::new(
                format!("c{i}"),
                Solution::new(format!("{inst}/a"), &inst, draw(&mut rng)),
                Solution::new(format!("{inst}/b"), &inst, draw(&mut rng)),
            )
        })
        .collect();
    ComparisonSet::new(schema(dims), comparisons)
}

/// Answers every comparison by comparing `truth` scores with a tie band.
pub fn answer_with(set: &mut ComparisonSet, truth: &ObjectiveFunction, band: f64) {
    let prefs: Vec<Preference> = set
        .comparisons
        .iter()
        .map(|c| {
            let (a, b) = (truth.evaluate(&c.sol1).unwrap(), truth.evaluate(&c.sol2).unwrap());
            let v = if (a - b).abs() <= band {
                Verdict::Tie
            } else if a > b {
                Verdict::PreferSol1
            } else {
                Verdict::PreferSol2
            };
            Preference::new(&c.id, v)
        })
        .collect();
    for p in prefs {
        set.record(p);
    }
}

/// Smallest global error of any single-rule function over the whole integer
/// weight grid `[0, 10]^dims` (the all-zero point is not a valid function).
pub fn grid_optimum(set: &ComparisonSet, model: &ErrorModel) -> f64 {
    let dims = set.schema.len();
    let mut best = f64::INFINITY;
    let mut w = vec![0u32; dims];
    loop {
        if w.iter().any(|&x| x > 0) {
            let f = ObjectiveFunction::single(set.schema.clone(), w.clone()).unwrap();
            best = best.min(global_error(&f, set, model).unwrap().error);
        }
        let mut i = 0;
        loop {
            if i == dims {
                return best;
            }
            w[i] += 1;
            if w[i] <= 10 {
                break;
            }
            w[i] = 0;
            i += 1;
        }
    }
}

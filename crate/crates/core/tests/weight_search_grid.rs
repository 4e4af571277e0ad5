mod common;

use prefforge::model::{Comparison, ComparisonSet, Preference, Solution, Verdict};
use prefforge::objective::{global_error, ErrorModel, ObjectiveFunction, RuleCondition};
use prefforge::weight_search::{genome_of, search_weights, GaConfig};
use proptest::prelude::*;

fn ga(seed: u64) -> GaConfig {
    GaConfig {
        seed,
        ..GaConfig::default()
    }
}

#[test]
fn hidden_nine_one_weights_reach_grid_optimum() {
    let truth = ObjectiveFunction::single(common::schema(2), vec![9, 1]).unwrap();
    let mut set = common::random_pairs(2, 50, 91);
    common::answer_with(&mut set, &truth, 0.5);
    let model = ErrorModel::default();
    let out = search_weights(&[RuleCondition::always()], &set, &model, &ga(1), &[]).unwrap();
    assert_eq!(out.error.error, common::grid_optimum(&set, &model));
    assert_eq!(out.error.error, 0.0);
}

#[test]
fn contradictory_preferences_hit_the_floor() {
    let mut set = common::random_pairs(2, 20, 5);
    let twin = Solution::new("twin/a", "twin", vec![30.0, 70.0]);
    set.comparisons.push(Comparison::new(
        "x1",
        twin.clone(),
        Solution::new("twin/b", "twin", vec![30.0, 70.0]),
    ));
    set.comparisons.push(Comparison::new(
        "x2",
        Solution::new("twin/b", "twin", vec![30.0, 70.0]),
        twin,
    ));
    let truth = ObjectiveFunction::single(common::schema(2), vec![2, 5]).unwrap();
    common::answer_with(&mut set, &truth, 0.5);
    set.record(Preference::new("x1", Verdict::PreferSol1));
    set.record(Preference::new("x2", Verdict::PreferSol1));

    let model = ErrorModel::default();
    let floor = 2.0 * model.val_error / set.comparisons.len() as f64;
    let grid = common::grid_optimum(&set, &model);
    assert!(grid >= floor - 1e-12);
    let out = search_weights(&[RuleCondition::always()], &set, &model, &ga(2), &[]).unwrap();
    assert_eq!(out.error.error, grid);
}

fn noisy_set(seed: u64, dims: usize) -> ComparisonSet {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<u32> = (0..dims).map(|_| rng.random_range(1..=10)).collect();
    let truth = ObjectiveFunction::single(common::schema(dims), w).unwrap();
    let mut set = common::random_pairs(dims, 30, seed);
    common::answer_with(&mut set, &truth, 0.5);
    // a few flipped answers so the optimum is usually above zero
    let ids: Vec<String> = set.comparisons.iter().map(|c| c.id.clone()).collect();
    for id in ids.iter().take(4) {
        let v = set.verdict(id).unwrap();
        set.record(Preference::new(
            id,
            if v == Verdict::Tie {
                Verdict::PreferSol1
            } else {
                v.inverted()
            },
        ));
    }
    set
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ga_matches_grid_on_small_problems(seed in any::<u64>(), dims in 1usize..=2) {
        let set = noisy_set(seed, dims);
        let model = ErrorModel::default();
        let out = search_weights(&[RuleCondition::always()], &set, &model, &ga(seed), &[]).unwrap();
        prop_assert_eq!(out.error.error, common::grid_optimum(&set, &model));
    }

    #[test]
    fn search_is_sound_and_deterministic(seed in any::<u64>()) {
        let set = noisy_set(seed, 3);
        let model = ErrorModel::default();
        let cfg = GaConfig { generations: 40, ..ga(seed) };
        let a = search_weights(&[RuleCondition::always()], &set, &model, &cfg, &[]).unwrap();
        let b = search_weights(&[RuleCondition::always()], &set, &model, &cfg, &[]).unwrap();
        prop_assert_eq!(&a.function, &b.function);
        prop_assert!(a.trace.windows(2).all(|w| w[1] <= w[0]));
        let genome = genome_of(&a.function);
        prop_assert!(genome.iter().all(|&g| g <= 10) && genome.iter().any(|&g| g > 0));
        let ones = ObjectiveFunction::single(set.schema.clone(), vec![1; 3]).unwrap();
        prop_assert!(a.error.error <= global_error(&ones, &set, &model).unwrap().error);
        prop_assert_eq!(a.error, global_error(&a.function, &set, &model).unwrap());
    }
}

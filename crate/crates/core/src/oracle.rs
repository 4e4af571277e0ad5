//! Simulated user: answers comparisons from a hidden ground-truth function,
//! optionally flipping strict verdicts at random. Used to run the whole
//! elicit → learn → evaluate loop without a human.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::elicitation::{default_pipeline, Session};
use crate::error::{Error, Result};
use crate::generation::{generate_comparisons, GenerationConfig};
use crate::learner::{learn_objective, LearnConfig, LearnReport};
use crate::model::{Comparison, ComparisonSet, InstanceCatalog, Preference, Verdict};
use crate::objective::{global_error, GlobalError, ObjectiveFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub ground_truth: ObjectiveFunction,
    #[serde(default = "default_tie_band")]
    pub tie_band: f64,
    #[serde(default)]
    pub flip_probability: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_tie_band() -> f64 {
    0.5
}

impl OracleConfig {
    pub fn new(ground_truth: ObjectiveFunction) -> Self {
        Self {
            ground_truth,
            tie_band: default_tie_band(),
            flip_probability: 0.0,
            seed: 0,
        }
    }
}

pub struct Oracle {
    config: OracleConfig,
    rng: ChaCha8Rng,
}

impl Oracle {
    pub fn new(config: OracleConfig) -> Result<Self> {
        if config.tie_band.is_nan() || config.tie_band < 0.0 {
            return Err(Error::invalid("tie_band must be >= 0"));
        }
        if !(0.0..=1.0).contains(&config.flip_probability) {
            return Err(Error::invalid("flip_probability must lie in [0, 1]"));
        }
        let violations = config.ground_truth.validate();
        if !violations.is_empty() {
            return Err(Error::Invariant(violations));
        }
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Ok(Self { config, rng })
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    pub fn prefer(&mut self, c: &Comparison) -> Result<Preference> {
        let g = &self.config.ground_truth;
        let (g1, g2) = (g.evaluate(&c.sol1)?, g.evaluate(&c.sol2)?);
        let verdict = if (g1 - g2).abs() <= self.config.tie_band {
            Verdict::Tie
        } else {
            let honest = if g1 > g2 {
                Verdict::PreferSol1
            } else {
                Verdict::PreferSol2
            };
            if self.rng.random_bool(self.config.flip_probability) {
                honest.inverted()
            } else {
                honest
            }
        };
        Ok(Preference::new(&c.id, verdict))
    }

    /// Answers every comparison of `set` in order.
    pub fn answer_all(&mut self, set: &mut ComparisonSet) -> Result<()> {
        for i in 0..set.comparisons.len() {
            let p = self.prefer(&set.comparisons[i])?;
            set.record(p);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationConfig {
    pub generation: GenerationConfig,
    pub max_questions: usize,
    pub test_comparisons: usize,
    /// Share of the instances held out for the test set.
    pub holdout_fraction: f64,
    pub learn: LearnConfig,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            generation: GenerationConfig::default(),
            max_questions: 50,
            test_comparisons: 50,
            holdout_fraction: 0.5,
            learn: LearnConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedLoopReport {
    pub asked: usize,
    pub consistency_flags: Vec<String>,
    pub session_log: Vec<String>,
    pub function: ObjectiveFunction,
    pub learn: LearnReport,
    pub train: GlobalError,
    pub test: GlobalError,
}

/// Elicits `max_questions` answers from the oracle on comparisons built from
/// one part of the instances, learns, and scores the result on a fresh
/// sample of comparisons from the held-out instances.
pub fn run_closed_loop(
    catalog: &InstanceCatalog,
    oracle: &mut Oracle,
    config: &SimulationConfig,
) -> Result<ClosedLoopReport> {
    let n = catalog.instances.len();
    let n_test = ((n as f64) * config.holdout_fraction).round() as usize;
    if n < 2 || n_test == 0 || n_test == n {
        return Err(Error::invalid(format!(
            "{n} instances cannot be split into train and test parts (holdout fraction {})",
            config.holdout_fraction
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let (test_idx, train_idx) = order.split_at(n_test);
    let pick = |idx: &[usize]| {
        let mut idx = idx.to_vec();
        idx.sort_unstable();
        idx.into_iter()
            .map(|i| catalog.instances[i].clone())
            .collect::<Vec<_>>()
    };

    let train_pool = generate_comparisons(&catalog.schema, &pick(train_idx), &config.generation)?.set;
    let mut session = Session::new(
        train_pool,
        default_pipeline(&catalog.schema, config.max_questions),
        config.max_questions,
        config.generation.measure_tolerance,
        rng.random(),
    )?;
    while let Some(c) = session.next_comparison() {
        let p = oracle.prefer(&c)?;
        session.submit_preference(p)?;
    }
    let train = session.set.answered_subset();
    let learned = learn_objective(&train, &config.learn)?;
    let model = config.learn.error_model()?;

    let test_gen = GenerationConfig {
        seed: rng.random(),
        ..config.generation.clone()
    };
    let mut test = generate_comparisons(&catalog.schema, &pick(test_idx), &test_gen)?.set;
    if test.comparisons.len() > config.test_comparisons {
        test.comparisons.shuffle(&mut rng);
        test.comparisons.truncate(config.test_comparisons);
    }
    oracle.answer_all(&mut test)?;

    Ok(ClosedLoopReport {
        asked: session.asked.len(),
        consistency_flags: session.consistency_flags(),
        session_log: session.log.clone(),
        train: global_error(&learned.function, &train, &model)?,
        test: global_error(&learned.function, &test, &model)?,
        function: learned.function,
        learn: learned.report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MeasureSchema, Solution};

    fn oracle(flip: f64) -> Oracle {
        let f = ObjectiveFunction::single(MeasureSchema::percent(&["a", "b"]).unwrap(), vec![1, 1]).unwrap();
        Oracle::new(OracleConfig {
            flip_probability: flip,
            ..OracleConfig::new(f)
        })
        .unwrap()
    }

    fn pair(a: [f64; 2], b: [f64; 2]) -> Comparison {
        Comparison::new(
            "c",
            Solution::new("x", "i", a.to_vec()),
            Solution::new("y", "i", b.to_vec()),
        )
    }

    #[test]
    fn identical_solutions_tie() {
        let p = oracle(0.0).prefer(&pair([40.0, 40.0], [40.0, 40.0])).unwrap();
        assert_eq!(p.verdict, Verdict::Tie);
    }

    #[test]
    fn prefers_higher_and_flips_on_demand() {
        let c = pair([90.0, 90.0], [10.0, 10.0]);
        assert_eq!(oracle(0.0).prefer(&c).unwrap().verdict, Verdict::PreferSol1);
        assert_eq!(oracle(1.0).prefer(&c).unwrap().verdict, Verdict::PreferSol2);
        // ties are never flipped
        assert_eq!(
            oracle(1.0).prefer(&pair([5.0, 5.0], [5.0, 5.0])).unwrap().verdict,
            Verdict::Tie
        );
    }

    #[test]
    fn rejects_schema_mismatch_and_bad_config() {
        let c = Comparison::new(
            "c",
            Solution::new("x", "i", vec![1.0]),
            Solution::new("y", "i", vec![2.0]),
        );
        assert!(oracle(0.0).prefer(&c).is_err());
        let f = ObjectiveFunction::single(MeasureSchema::percent(&["a"]).unwrap(), vec![1]).unwrap();
        assert!(Oracle::new(OracleConfig {
            flip_probability: 1.5,
            ..OracleConfig::new(f)
        })
        .is_err());
    }
}

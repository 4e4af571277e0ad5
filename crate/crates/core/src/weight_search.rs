//! Genetic search for the integer weights that minimise the global error of a
//! rule list over a comparison sample.
//!
//! A genome is one block of `|M|` weights per rule condition. Conditions do not
//! change during a search, so the rule each solution falls under is resolved
//! once up front and fitness only recomputes weighted means.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ComparisonSet, Verdict};
use crate::objective::{
    comp_scores, error_scores, first_match, weighted_mean, CompiledCondition, ErrorModel, GlobalError,
    ObjectiveFunction, RegressionRule, RuleCondition,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    /// Per-gene probability of being redrawn.
    pub mutation_rate: f64,
    pub crossover_rate: f64,
    pub elitism_count: usize,
    pub tournament_size: usize,
    pub weight_min: u32,
    pub weight_max: u32,
    /// Stop as soon as a genome reaches zero error.
    pub early_stop: bool,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 60,
            generations: 300,
            mutation_rate: 0.1,
            crossover_rate: 0.9,
            elitism_count: 2,
            tournament_size: 3,
            weight_min: 0,
            weight_max: 10,
            early_stop: true,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn check(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::invalid(m.to_owned()));
        if self.population_size < 2 {
            return fail("population_size must be at least 2");
        }
        if self.generations < 1 {
            return fail("generations must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) || !(0.0..=1.0).contains(&self.crossover_rate) {
            return fail("mutation_rate and crossover_rate must lie in [0, 1]");
        }
        if self.elitism_count >= self.population_size {
            return fail("elitism_count must be smaller than population_size");
        }
        if self.tournament_size < 2 {
            return fail("tournament_size must be at least 2");
        }
        if self.weight_max == 0 || self.weight_min > self.weight_max {
            return fail("weight range must be non-empty and allow a positive weight");
        }
        Ok(())
    }
}

/// Times a child that repeats a genome already in the next generation gets
/// one more gene redrawn. Keeps the population from collapsing onto a few
/// genomes, which on small problems is what stalls the search.
const DUPLICATE_RETRIES: usize = 8;

/// Concatenated weight blocks, one per rule.
pub type Genome = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub function: ObjectiveFunction,
    pub error: GlobalError,
    /// Best error after initialisation and after every generation.
    pub trace: Vec<f64>,
    pub generations_run: usize,
}

/// A comparison with both solutions pre-assigned to their rule.
struct Prepared<'a> {
    rule1: usize,
    values1: &'a [f64],
    rule2: usize,
    values2: &'a [f64],
    verdict: Verdict,
}

struct Problem<'a> {
    dims: usize,
    items: Vec<Prepared<'a>>,
    model: ErrorModel,
}

/// Search objective: global error first, then the margin, the smallest
/// distance of any compatible comparison's score gap from the tie band edge.
/// Among equally good genomes the one with more room to spare wins.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Fitness {
    error: f64,
    margin: f64,
}

impl Fitness {
    fn beats(&self, other: &Fitness) -> bool {
        self.error < other.error || (self.error == other.error && self.margin > other.margin)
    }
}

impl Problem<'_> {
    fn fitness(&self, genome: &[u32]) -> Fitness {
        let block = |r: usize| &genome[r * self.dims..(r + 1) * self.dims];
        let mut total = 0.0;
        let mut margin = f64::INFINITY;
        for it in &self.items {
            let f1 = weighted_mean(block(it.rule1), it.values1);
            let f2 = weighted_mean(block(it.rule2), it.values2);
            let e = error_scores(f1, f2, it.verdict, &self.model);
            total += e;
            if e == 0.0 {
                let gap = (f1 - f2).abs() - self.model.tie_epsilon;
                let slack = if it.verdict == Verdict::Tie { -gap } else { gap };
                margin = margin.min(slack);
            }
        }
        Fitness {
            error: total / self.items.len() as f64,
            margin: if margin.is_finite() { margin } else { 0.0 },
        }
    }

    fn score(&self, genome: &[u32]) -> GlobalError {
        let block = |r: usize| &genome[r * self.dims..(r + 1) * self.dims];
        let mut total = 0.0;
        let mut incompatible = 0;
        for it in &self.items {
            let f1 = weighted_mean(block(it.rule1), it.values1);
            let f2 = weighted_mean(block(it.rule2), it.values2);
            incompatible += usize::from(comp_scores(f1, f2, it.verdict, self.model.tie_epsilon));
            total += error_scores(f1, f2, it.verdict, &self.model);
        }
        GlobalError {
            error: total / self.items.len() as f64,
            incompatible,
            comparisons: self.items.len(),
        }
    }
}

fn repair(genome: &mut [u32], dims: usize, rng: &mut ChaCha8Rng) {
    for block in genome.chunks_mut(dims) {
        if block.iter().all(|&w| w == 0) {
            let i = rng.random_range(0..dims);
            block[i] = 1;
        }
    }
}

fn tournament<'p>(population: &'p [Genome], fitness: &[Fitness], size: usize, rng: &mut ChaCha8Rng) -> &'p Genome {
    let mut best = rng.random_range(0..population.len());
    for _ in 1..size {
        let challenger = rng.random_range(0..population.len());
        if fitness[challenger].beats(&fitness[best]) {
            best = challenger;
        }
    }
    &population[best]
}

/// Searches weights for `conditions` (the last must be the catch-all).
///
/// The all-ones genome and every genome in `injected` (clamped and repaired)
/// seed the initial population, so the result is never worse than any of them.
pub fn search_weights(
    conditions: &[RuleCondition],
    set: &ComparisonSet,
    model: &ErrorModel,
    config: &GaConfig,
    injected: &[Genome],
) -> Result<SearchOutcome> {
    config.check()?;
    match conditions.last() {
        Some(c) if c.is_catch_all() => {}
        _ => return Err(Error::invalid("conditions must end with the catch-all")),
    }
    if set.comparisons.is_empty() {
        return Err(Error::invalid("cannot search weights on an empty comparison set"));
    }
    set.require_fully_answered()?;
    let schema = &set.schema;
    let dims = schema.len();
    let compiled: Vec<CompiledCondition> = conditions.iter().map(|c| c.compile(schema)).collect::<Result<_>>()?;
    let mut items = Vec::with_capacity(set.comparisons.len());
    for (c, verdict) in set.answered() {
        c.sol1.check_conforms(schema)?;
        c.sol2.check_conforms(schema)?;
        items.push(Prepared {
            rule1: first_match(&compiled, &c.sol1.measures),
            values1: &c.sol1.measures,
            rule2: first_match(&compiled, &c.sol2.measures),
            values2: &c.sol2.measures,
            verdict,
        });
    }
    let problem = Problem {
        dims,
        items,
        model: *model,
    };
    let genes = dims * conditions.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (lo, hi) = (config.weight_min, config.weight_max);

    let mut population: Vec<Genome> = Vec::with_capacity(config.population_size);
    population.push(vec![1.clamp(lo, hi); genes]);
    for g in injected {
        if population.len() >= config.population_size {
            break;
        }
        if g.len() != genes {
            return Err(Error::invalid(format!(
                "injected genome has {} genes, expected {genes}",
                g.len()
            )));
        }
        let mut g: Genome = g.iter().map(|w| (*w).clamp(lo, hi)).collect();
        repair(&mut g, dims, &mut rng);
        population.push(g);
    }
    while population.len() < config.population_size {
        let mut g: Genome = (0..genes).map(|_| rng.random_range(lo..=hi)).collect();
        repair(&mut g, dims, &mut rng);
        population.push(g);
    }

    let evaluate = |pop: &[Genome]| -> Vec<Fitness> { pop.par_iter().map(|g| problem.fitness(g)).collect() };
    let mut fitness = evaluate(&population);
    let argbest = |fit: &[Fitness]| (1..fit.len()).fold(0, |best, i| if fit[i].beats(&fit[best]) { i } else { best });
    let first = argbest(&fitness);
    let mut best = population[first].clone();
    let mut best_fit = fitness[first];
    let mut trace = vec![best_fit.error];
    let mut generations_run = 0;

    for _ in 0..config.generations {
        if config.early_stop && best_fit.error == 0.0 {
            break;
        }
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| {
            fitness[a]
                .error
                .total_cmp(&fitness[b].error)
                .then(fitness[b].margin.total_cmp(&fitness[a].margin))
        });
        let mut next: Vec<Genome> = order[..config.elitism_count]
            .iter()
            .map(|&i| population[i].clone())
            .collect();
        let mut seen: HashSet<Genome> = next.iter().cloned().collect();
        while next.len() < config.population_size {
            let p1 = tournament(&population, &fitness, config.tournament_size, &mut rng);
            let p2 = tournament(&population, &fitness, config.tournament_size, &mut rng);
            let mut child: Genome = if rng.random_bool(config.crossover_rate) {
                p1.iter()
                    .zip(p2)
                    .map(|(a, b)| if rng.random_bool(0.5) { *a } else { *b })
                    .collect()
            } else {
                p1.clone()
            };
            for gene in child.iter_mut() {
                if rng.random_bool(config.mutation_rate) {
                    *gene = rng.random_range(lo..=hi);
                }
            }
            repair(&mut child, dims, &mut rng);
            for _ in 0..DUPLICATE_RETRIES {
                if !seen.contains(&child) {
                    break;
                }
                let i = rng.random_range(0..genes);
                child[i] = rng.random_range(lo..=hi);
                repair(&mut child, dims, &mut rng);
            }
            seen.insert(child.clone());
            next.push(child);
        }
        population = next;
        fitness = evaluate(&population);
        let i = argbest(&fitness);
        if fitness[i].beats(&best_fit) {
            best_fit = fitness[i];
            best = population[i].clone();
        }
        trace.push(best_fit.error);
        generations_run += 1;
    }

    let rules = conditions
        .iter()
        .zip(best.chunks(dims))
        .map(|(c, w)| RegressionRule::new(c.clone(), w.to_vec()))
        .collect();
    let function = ObjectiveFunction::new(schema.clone(), rules)?;
    Ok(SearchOutcome {
        error: problem.score(&best),
        function,
        trace,
        generations_run,
    })
}

/// Flattens a function's weights into a genome.
pub fn genome_of(f: &ObjectiveFunction) -> Genome {
    f.rules.iter().flat_map(|r| r.weights.iter().copied()).collect()
}

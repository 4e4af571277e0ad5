//! Building the comparison sample from problem instances, and synthetic
//! instances for tests and simulations.

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tracing::warn;

use crate::error::{Error, Result};
use crate::model::{Comparison, ComparisonSet, MeasureSchema, ProblemInstance, Solution};

/// How the two measure vectors of a pair relate to each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureKind {
    EqualVectors,
    OneMeasureDiffers,
    TwoMeasuresDiffer,
    Unconstrained,
}

impl StructureKind {
    pub fn classify(a: &[f64], b: &[f64], tolerance: f64) -> Self {
        let changed = a.iter().zip(b).filter(|(x, y)| (*x - *y).abs() > tolerance).count();
        match changed {
            0 => StructureKind::EqualVectors,
            1 => StructureKind::OneMeasureDiffers,
            2 => StructureKind::TwoMeasuresDiffer,
            _ => StructureKind::Unconstrained,
        }
    }

    pub fn of(c: &Comparison, tolerance: f64) -> Self {
        Self::classify(&c.sol1.measures, &c.sol2.measures, tolerance)
    }

    const ALL: [StructureKind; 4] = [
        StructureKind::EqualVectors,
        StructureKind::OneMeasureDiffers,
        StructureKind::TwoMeasuresDiffer,
        StructureKind::Unconstrained,
    ];
}

/// Per-instance number of pairs of each structure kind to pick before
/// filling up with arbitrary pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct StructureQuotas {
    pub equal_vectors: usize,
    pub one_measure_differs: usize,
    pub two_measures_differ: usize,
    pub unconstrained: usize,
}

impl Default for StructureQuotas {
    fn default() -> Self {
        Self {
            equal_vectors: 1,
            one_measure_differs: 1,
            two_measures_differ: 1,
            unconstrained: 0,
        }
    }
}

impl StructureQuotas {
    fn get(&self, kind: StructureKind) -> usize {
        match kind {
            StructureKind::EqualVectors => self.equal_vectors,
            StructureKind::OneMeasureDiffers => self.one_measure_differs,
            StructureKind::TwoMeasuresDiffer => self.two_measures_differ,
            StructureKind::Unconstrained => self.unconstrained,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationConfig {
    pub max_instances: usize,
    pub pairs_per_instance: usize,
    pub structured_pair_quotas: StructureQuotas,
    /// Deltas at or below this count as "unchanged".
    pub measure_tolerance: f64,
    pub seed: u64,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self {
            max_instances: 100,
            pairs_per_instance: 3,
            structured_pair_quotas: StructureQuotas::default(),
            measure_tolerance: 1.0,
            seed: 0,
        }
    }
}

impl GenerationConfig {
    pub fn check(&self) -> Result<()> {
        if self.max_instances == 0 || self.pairs_per_instance == 0 {
            return Err(Error::invalid(
                "max_instances and pairs_per_instance must be at least 1",
            ));
        }
        if self.measure_tolerance.is_nan() || self.measure_tolerance < 0.0 {
            return Err(Error::invalid("measure_tolerance must be >= 0"));
        }
        Ok(())
    }
}

/// A generated comparison set plus the structure tag of every comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedSet {
    pub set: ComparisonSet,
    pub kinds: Vec<StructureKind>,
}

/// Pairs up solutions of (a seeded uniform sample of) the instances.
///
/// Instances keep their input order; within an instance, quota pairs are
/// drawn first, then the remainder up to `pairs_per_instance` is filled with
/// random pairs.
pub fn generate_comparisons(
    schema: &MeasureSchema,
    instances: &[ProblemInstance],
    config: &GenerationConfig,
) -> Result<GeneratedSet> {
    config.check()?;
    let usable: Vec<&ProblemInstance> = instances
        .iter()
        .filter(|inst| {
            if inst.solutions.len() < 2 {
                warn!(instance = %inst.id, "skipping instance with fewer than two solutions");
                false
            } else {
                true
            }
        })
        .collect();
    if usable.is_empty() {
        return Err(Error::invalid("no instance has at least two solutions"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let chosen: Vec<&ProblemInstance> = if usable.len() > config.max_instances {
        let mut picked = index::sample(&mut rng, usable.len(), config.max_instances).into_vec();
        picked.sort_unstable();
        picked.into_iter().map(|i| usable[i]).collect()
    } else {
        usable
    };

    let mut comparisons = Vec::new();
    let mut kinds = Vec::new();
    for inst in chosen {
        let sols = &inst.solutions;
        let mut by_kind: Vec<Vec<(usize, usize)>> = vec![Vec::new(); StructureKind::ALL.len()];
        for i in 0..sols.len() {
            for j in i + 1..sols.len() {
                let kind = StructureKind::classify(&sols[i].measures, &sols[j].measures, config.measure_tolerance);
                by_kind[kind as usize].push((i, j));
            }
        }
        for bucket in &mut by_kind {
            bucket.shuffle(&mut rng);
        }
        let mut picked: Vec<((usize, usize), StructureKind)> = Vec::new();
        for kind in StructureKind::ALL {
            let bucket = &mut by_kind[kind as usize];
            let take = config.structured_pair_quotas.get(kind).min(bucket.len());
            for pair in bucket.drain(..take) {
                if picked.len() < config.pairs_per_instance {
                    picked.push((pair, kind));
                }
            }
        }
        let mut rest: Vec<((usize, usize), StructureKind)> = StructureKind::ALL
            .iter()
            .flat_map(|&k| by_kind[k as usize].iter().map(move |&p| (p, k)))
            .collect();
        rest.sort_unstable_by_key(|(p, _)| *p);
        rest.shuffle(&mut rng);
        let room = config.pairs_per_instance.saturating_sub(picked.len());
        picked.extend(rest.into_iter().take(room));
        picked.sort_unstable_by_key(|(p, _)| *p);

        for ((i, j), kind) in picked {
            let id = format!("{}:{}|{}", inst.id, sols[i].id, sols[j].id);
            comparisons.push(Comparison::new(id, sols[i].clone(), sols[j].clone()));
            kinds.push(kind);
        }
    }
    Ok(GeneratedSet {
        set: ComparisonSet::new(schema.clone(), comparisons),
        kinds,
    })
}

/// Fractions of synthetic instances that get a planted pair of each kind.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StructureMix {
    pub equal: f64,
    pub one_differs: f64,
    pub two_differ: f64,
}

impl Default for StructureMix {
    fn default() -> Self {
        Self {
            equal: 0.2,
            one_differs: 0.5,
            two_differ: 0.5,
        }
    }
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Random instances with measure values uniform over the schema bounds.
///
/// Each instance starts from a base solution; with the probabilities in
/// `mix` it also receives an exact copy of the base, a copy with one measure
/// redrawn, and a copy with two measures redrawn. Redrawn values move by at
/// least a tenth of the value range. Uniform random solutions fill the rest.
pub fn synthesize_instances(
    schema: &MeasureSchema,
    n_instances: usize,
    solutions_per_instance: usize,
    mix: &StructureMix,
    seed: u64,
) -> Vec<ProblemInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = schema.len();
    let min_move = schema.span() / 10.0;
    let draw = |rng: &mut ChaCha8Rng| round2(rng.random_range(schema.val_min..=schema.val_max));
    let redraw = |rng: &mut ChaCha8Rng, old: f64| loop {
        let v = draw(rng);
        if (v - old).abs() >= min_move {
            break v;
        }
    };

    (0..n_instances)
        .map(|n| {
            let instance_id = format!("inst-{:04}", n + 1);
            let base: Vec<f64> = (0..dims).map(|_| draw(&mut rng)).collect();
            let mut vectors = vec![base.clone()];
            if rng.random_bool(mix.equal.clamp(0.0, 1.0)) {
                vectors.push(base.clone());
            }
            if rng.random_bool(mix.one_differs.clamp(0.0, 1.0)) {
                let mut v = base.clone();
                let i = rng.random_range(0..dims);
                v[i] = redraw(&mut rng, v[i]);
                vectors.push(v);
            }
            if dims >= 2 && rng.random_bool(mix.two_differ.clamp(0.0, 1.0)) {
                let mut v = base.clone();
                let picked = index::sample(&mut rng, dims, 2);
                for i in picked.iter() {
                    v[i] = redraw(&mut rng, v[i]);
                }
                vectors.push(v);
            }
            while vectors.len() < solutions_per_instance.max(2) {
                vectors.push((0..dims).map(|_| draw(&mut rng)).collect());
            }
            ProblemInstance {
                description: format!("synthetic instance {}", n + 1),
                solutions: vectors
                    .into_iter()
                    .enumerate()
                    .map(|(k, v)| Solution::new(format!("{instance_id}-s{}", k + 1), &instance_id, v))
                    .collect(),
                id: instance_id,
            }
        })
        .collect()
}

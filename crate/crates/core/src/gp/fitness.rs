//! Selector fitness: the mean best objective the solver reaches on a set of
//! instances under a fixed budget.

use std::collections::HashMap;
use std::time::Duration;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::cp::{ranks, solve_with_priorities, Model, ModelError, SolverConfig};
use crate::decimal::Decimal;
use crate::instance::Instance;
use crate::selector::{extract_features, FeatureVector, Selector};

/// Mean objective in natural units; lower is better.
pub type Fitness = Ratio<i64>;

/// Mean of per-instance objectives.
pub fn mean_objective(objectives: &[Decimal]) -> Fitness {
    assert!(!objectives.is_empty(), "fitness over an empty instance set");
    let total: i64 = objectives.iter().map(|d| d.hundredths()).sum();
    Ratio::new(total, 100 * objectives.len() as i64)
}

pub fn fitness_to_f64(f: &Fitness) -> f64 {
    *f.numer() as f64 / *f.denom() as f64
}

/// Best objective the solver finds with `priorities`, or the instance's
/// worst-case TWT when the budget runs out without an incumbent.
pub fn instance_objective(
    model: &Model,
    config: &SolverConfig,
    priorities: &[f64],
) -> (Decimal, u64) {
    let res = solve_with_priorities(model, config, priorities);
    let obj = res
        .best_objective
        .unwrap_or_else(|| model.instance().tardiness_upper_bound());
    (obj, res.stats.nodes)
}

/// Mean best objective of `selector` over `instances`.
pub fn fitness(
    selector: &Selector,
    instances: &[Instance],
    node_budget: u64,
) -> Result<Fitness, ModelError> {
    let config = SolverConfig::with_budget(node_budget);
    let objectives = instances
        .iter()
        .map(|inst| {
            let model = Model::build(inst)?;
            let priorities = crate::selector::priorities_for(selector, inst);
            Ok(instance_objective(&model, &config, &priorities).0)
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    Ok(mean_objective(&objectives))
}

struct Prepared {
    model: Model,
    features: Vec<FeatureVector>,
}

/// Batched, memoised evaluation over a fixed pool of instances.
///
/// The search depends on priorities only through the ordering they induce,
/// so results are cached per (instance, ordering).
pub struct Evaluator {
    pool: Vec<Prepared>,
    config: SolverConfig,
    cache: HashMap<(usize, Vec<u32>), Decimal>,
    nodes_used: u64,
}

impl Evaluator {
    pub fn new(
        instances: &[Instance],
        node_budget: u64,
        time_budget: Option<Duration>,
    ) -> Result<Self, ModelError> {
        let pool = instances
            .iter()
            .map(|inst| {
                Ok(Prepared {
                    model: Model::build(inst)?,
                    features: extract_features(inst),
                })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        let mut config = SolverConfig::with_budget(node_budget);
        config.time_budget = time_budget;
        Ok(Evaluator {
            pool,
            config,
            cache: HashMap::new(),
            nodes_used: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.pool.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pool.is_empty()
    }

    /// Search nodes spent on uncached solves so far.
    pub fn nodes_used(&self) -> u64 {
        self.nodes_used
    }

    /// Fitness of every selector over the pool instances `ids`.
    pub fn fitness_batch(&mut self, selectors: &[&Selector], ids: &[usize]) -> Vec<Fitness> {
        let keys: Vec<Vec<(usize, Vec<u32>)>> = selectors
            .iter()
            .map(|s| {
                ids.iter()
                    .map(|&i| {
                        let pr: Vec<f64> = self.pool[i]
                            .features
                            .iter()
                            .map(|f| s.evaluate(f))
                            .collect();
                        (i, ranks(&pr))
                    })
                    .collect()
            })
            .collect();
        let mut todo: Vec<&(usize, Vec<u32>)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for key in keys.iter().flatten() {
            if !self.cache.contains_key(key) && seen.insert(key) {
                todo.push(key);
            }
        }
        let pool = &self.pool;
        let config = &self.config;
        let solved: Vec<(Decimal, u64)> = todo
            .par_iter()
            .map(|(i, rank)| {
                let priorities: Vec<f64> = rank.iter().map(|&r| -(r as f64)).collect();
                instance_objective(&pool[*i].model, config, &priorities)
            })
            .collect();
        for (key, (obj, nodes)) in todo.into_iter().zip(solved) {
            self.nodes_used += nodes;
            self.cache.insert(key.clone(), obj);
        }
        keys.iter()
            .map(|row| {
                let objs: Vec<Decimal> = row.iter().map(|k| self.cache[k]).collect();
                mean_objective(&objs)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_instance, GenConfig};

    #[test]
    fn mean_of_two() {
        assert_eq!(
            mean_objective(&[Decimal::from_int(10), Decimal::from_int(20)]),
            Ratio::from_integer(15)
        );
        assert_eq!(mean_objective(&[Decimal::ZERO]), Ratio::from_integer(0));
        assert_eq!(
            mean_objective(&[
                Decimal::from_int(1),
                Decimal::from_int(2),
                Decimal::from_int(2)
            ]),
            Ratio::new(5, 3)
        );
    }

    #[test]
    fn cached_batch_matches_direct_fitness() {
        let insts: Vec<Instance> = (0..3)
            .map(|s| {
                generate_instance(&GenConfig::new(2, 0.3, 0.5, s).with_jobs_per_machine(4, 5))
                    .unwrap()
            })
            .collect();
        let sels = [
            Selector::constant(),
            crate::selector::parse_selector("(- DD W)").unwrap(),
        ];
        let mut ev = Evaluator::new(&insts, 500, None).unwrap();
        let batch = ev.fitness_batch(&[&sels[0], &sels[1], &sels[0]], &[0, 1, 2]);
        for (s, f) in sels.iter().zip(&batch) {
            assert_eq!(*f, fitness(s, &insts, 500).unwrap());
        }
        assert_eq!(batch[0], batch[2]);
        let before = ev.nodes_used();
        ev.fitness_batch(&[&sels[1]], &[0, 1, 2]);
        assert_eq!(ev.nodes_used(), before);
    }

    #[test]
    fn budget_without_incumbent_uses_worst_case_bound() {
        let inst = generate_instance(&GenConfig::new(2, 0.5, 0.5, 2)).unwrap();
        let model = Model::build(&inst).unwrap();
        let (obj, nodes) = instance_objective(
            &model,
            &SolverConfig::with_budget(1),
            &vec![0.0; inst.len()],
        );
        assert_eq!(nodes, 1);
        let bound: Decimal = inst
            .jobs()
            .iter()
            .map(|j| j.weight * (inst.horizon() - j.due).max(0))
            .sum();
        assert_eq!(obj, bound);
    }
}

//! Genetic programming loop that evolves variable selectors.
//!
//! Each generation evaluates the population on a random sample of the
//! training instances, re-evaluates the generation's best on the whole
//! training set to maintain the best-so-far selector, and then breeds an
//! intermediate population (subtree crossover and mutation over tournament
//! parents) that is screened on small instances down to the population size.

mod fitness;
mod operators;

use std::io;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use fitness::{
    fitness, fitness_to_f64, instance_objective, mean_objective, Evaluator, Fitness,
};
pub use operators::{crossover, init_population, mutate, tournament_select};

use crate::cp::ModelError;
use crate::instance::Instance;
use crate::selector::{Provenance, Selector};

#[derive(Debug, Clone, PartialEq)]
pub struct GpConfig {
    pub population_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub max_depth: usize,
    /// Intermediate population size as a multiple of the population size.
    pub intermediate_factor: usize,
    /// Training instances sampled per generation.
    pub sample_size: usize,
    /// Small instances drawn per generation for pre-selection.
    pub preselect_instance_count: usize,
    pub node_budget: u64,
    /// Optional wall-clock cap per solve; breaks log reproducibility.
    pub time_budget: Option<Duration>,
    pub seed: u64,
}

impl Default for GpConfig {
    fn default() -> Self {
        GpConfig {
            population_size: 50,
            generations: 20,
            tournament_size: 5,
            crossover_rate: 0.9,
            mutation_rate: 0.1,
            max_depth: 7,
            intermediate_factor: 2,
            sample_size: 3,
            preselect_instance_count: 2,
            node_budget: 50_000,
            time_budget: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GpError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl GpConfig {
    pub fn validate(&self) -> Result<(), GpError> {
        let bad = |m: &str| Err(GpError::Config(m.into()));
        if self.population_size < 2 {
            return bad("population size must be at least 2");
        }
        if self.tournament_size < 1 {
            return bad("tournament size must be at least 1");
        }
        if self.crossover_rate < 0.0
            || self.mutation_rate < 0.0
            || (self.crossover_rate + self.mutation_rate - 1.0).abs() > 1e-9
        {
            return bad("crossover and mutation rates must be non-negative and sum to 1");
        }
        if self.intermediate_factor < 1 {
            return bad("intermediate factor must be at least 1");
        }
        if self.sample_size < 1 || self.preselect_instance_count < 1 {
            return bad("sample sizes must be at least 1");
        }
        if self.node_budget < 1 {
            return bad("node budget must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitnessRecord {
    pub selector: Selector,
    /// Mean objective over the generation's sampled instances.
    pub sampled_fitness: Option<Fitness>,
    /// Mean objective over the pre-selection instances.
    pub trial_fitness: Option<Fitness>,
    /// Mean objective over the whole training set.
    pub full_fitness: Option<Fitness>,
}

impl FitnessRecord {
    pub fn new(selector: Selector) -> Self {
        FitnessRecord {
            selector,
            sampled_fitness: None,
            trial_fitness: None,
            full_fitness: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationLog {
    pub generation: usize,
    pub best_sampled_fitness: Fitness,
    pub gen_best_full_fitness: Fitness,
    pub best_so_far_full_fitness: Fitness,
    pub nodes_used: u64,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone)]
pub struct TrainingState {
    pub population: Vec<FitnessRecord>,
    pub generation: usize,
    /// Best-so-far selector; its `full_fitness` is always set.
    pub best: FitnessRecord,
    /// Every selector that became best-so-far, in order.
    pub best_history: Vec<FitnessRecord>,
    pub log: Vec<GenerationLog>,
}

/// Independent RNG stream for `(seed, generation, slot)`.
fn stream(seed: u64, generation: u64, slot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(generation.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ slot);
    rng
}

const SAMPLING_SLOT: u64 = u64::MAX;
const PRESELECT_SLOT: u64 = u64::MAX - 1;

/// Keeps the `keep` candidates with the lowest trial fitness on `ids`;
/// stable, so input order breaks ties.
pub(crate) fn preselect_with(
    evaluator: &mut Evaluator,
    candidates: Vec<Selector>,
    ids: &[usize],
    keep: usize,
) -> Vec<FitnessRecord> {
    let refs: Vec<&Selector> = candidates.iter().collect();
    let trial = evaluator.fitness_batch(&refs, ids);
    let mut records: Vec<FitnessRecord> = candidates
        .into_iter()
        .zip(trial)
        .map(|(s, f)| FitnessRecord {
            trial_fitness: Some(f),
            ..FitnessRecord::new(s)
        })
        .collect();
    records.sort_by_key(|r| r.trial_fitness);
    records.truncate(keep);
    records
}

/// Screens `candidates` on `small_instances` and returns the best
/// `population_size` of them, sorted by trial fitness.
pub fn preselect(
    candidates: Vec<Selector>,
    small_instances: &[Instance],
    population_size: usize,
    node_budget: u64,
) -> Result<Vec<FitnessRecord>, GpError> {
    if small_instances.is_empty() {
        return Err(GpError::Config(
            "pre-selection needs at least one instance".into(),
        ));
    }
    let mut evaluator = Evaluator::new(small_instances, node_budget, None)?;
    let ids: Vec<usize> = (0..small_instances.len()).collect();
    Ok(preselect_with(
        &mut evaluator,
        candidates,
        &ids,
        population_size,
    ))
}

/// Index of the lowest value, ties to the lowest index.
fn argmin(values: &[Fitness]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

fn breed(config: &GpConfig, population: &[FitnessRecord], generation: u64) -> Vec<Selector> {
    let target = config.population_size * config.intermediate_factor;
    let mut out = Vec::with_capacity(target + 1);
    let mut slot = 0u64;
    while out.len() < target {
        let mut rng = stream(config.seed, generation, slot);
        slot += 1;
        if rng.gen_bool(config.crossover_rate.clamp(0.0, 1.0)) {
            let a = tournament_select(population, config.tournament_size, &mut rng);
            let b = tournament_select(population, config.tournament_size, &mut rng);
            let (ca, cb) = crossover(
                &population[a].selector.root,
                &population[b].selector.root,
                config.max_depth,
                &mut rng,
            );
            out.push(Selector::new(ca));
            out.push(Selector::new(cb));
        } else {
            let a = tournament_select(population, config.tournament_size, &mut rng);
            out.push(Selector::new(mutate(
                &population[a].selector.root,
                config.max_depth,
                &mut rng,
            )));
        }
    }
    out.truncate(target);
    out
}

/// Runs the evolutionary loop.
///
/// `training` provides the per-generation samples and the full-set
/// validation of each generation's best; `small` provides the
/// pre-selection instances.
pub fn evolve(
    config: &GpConfig,
    training: &[Instance],
    small: &[Instance],
) -> Result<TrainingState, GpError> {
    config.validate()?;
    if training.is_empty() || small.is_empty() {
        return Err(GpError::Config(
            "training and pre-selection sets must be non-empty".into(),
        ));
    }
    if config.sample_size > training.len() {
        return Err(GpError::Config(format!(
            "sample size {} exceeds the {} training instances",
            config.sample_size,
            training.len()
        )));
    }
    if config.preselect_instance_count > small.len() {
        return Err(GpError::Config(format!(
            "pre-selection count {} exceeds the {} small instances",
            config.preselect_instance_count,
            small.len()
        )));
    }
    let pool: Vec<Instance> = training.iter().chain(small).cloned().collect();
    let mut evaluator = Evaluator::new(&pool, config.node_budget, config.time_budget)?;
    let training_ids: Vec<usize> = (0..training.len()).collect();
    let small_ids: Vec<usize> = (training.len()..pool.len()).collect();

    let mut init_rng = stream(config.seed, 0, 0);
    let mut population: Vec<FitnessRecord> =
        init_population(config.population_size, config.max_depth, &mut init_rng)
            .into_iter()
            .map(FitnessRecord::new)
            .collect();
    let provenance = |f: &Fitness, generation: usize| Provenance {
        fitness: fitness_to_f64(f),
        generation,
        seed: config.seed,
    };

    if config.generations == 0 {
        let refs: Vec<&Selector> = population.iter().map(|r| &r.selector).collect();
        let full = evaluator.fitness_batch(&refs, &training_ids);
        for (r, f) in population.iter_mut().zip(&full) {
            r.full_fitness = Some(*f);
        }
        let i = argmin(&full);
        let mut best = population[i].clone();
        best.selector.provenance = Some(provenance(&full[i], 0));
        return Ok(TrainingState {
            population,
            generation: 0,
            best_history: vec![best.clone()],
            best,
            log: Vec::new(),
        });
    }

    let mut best: Option<FitnessRecord> = None;
    let mut best_history = Vec::new();
    let mut log = Vec::new();
    for g in 0..config.generations {
        let started = Instant::now();
        let nodes_before = evaluator.nodes_used();

        let mut rng = stream(config.seed, g as u64, SAMPLING_SLOT);
        let mut sample_ids: Vec<usize> = sample(&mut rng, training.len(), config.sample_size)
            .into_iter()
            .map(|i| training_ids[i])
            .collect();
        sample_ids.sort_unstable();

        let refs: Vec<&Selector> = population.iter().map(|r| &r.selector).collect();
        let sampled = evaluator.fitness_batch(&refs, &sample_ids);
        for (r, f) in population.iter_mut().zip(&sampled) {
            r.sampled_fitness = Some(*f);
        }
        let gi = argmin(&sampled);
        let full = evaluator.fitness_batch(&[&population[gi].selector], &training_ids)[0];
        population[gi].full_fitness = Some(full);

        if best.as_ref().is_none_or(|b| Some(full) < b.full_fitness) {
            let mut record = population[gi].clone();
            record.selector.provenance = Some(provenance(&full, g));
            best_history.push(record.clone());
            best = Some(record);
        }
        let best_full = best
            .as_ref()
            .and_then(|b| b.full_fitness)
            .expect("set above");

        if g + 1 < config.generations {
            let offspring = breed(config, &population, g as u64 + 1);
            let mut rng = stream(config.seed, g as u64 + 1, PRESELECT_SLOT);
            let trial_ids: Vec<usize> = {
                let mut ids: Vec<usize> =
                    sample(&mut rng, small_ids.len(), config.preselect_instance_count)
                        .into_iter()
                        .map(|i| small_ids[i])
                        .collect();
                ids.sort_unstable();
                ids
            };
            population = preselect_with(
                &mut evaluator,
                offspring,
                &trial_ids,
                config.population_size,
            );
        }

        log.push(GenerationLog {
            generation: g,
            best_sampled_fitness: sampled[gi],
            gen_best_full_fitness: full,
            best_so_far_full_fitness: best_full,
            nodes_used: evaluator.nodes_used() - nodes_before,
            elapsed_ms: started.elapsed().as_millis(),
        });
    }
    Ok(TrainingState {
        population,
        generation: config.generations,
        best: best.expect("at least one generation ran"),
        best_history,
        log,
    })
}

pub const LOG_COLUMNS: [&str; 6] = [
    "generation",
    "best_sampled_fitness",
    "gen_best_full_fitness",
    "best_so_far_full_fitness",
    "nodes_used",
    "elapsed_ms",
];

fn fmt_fitness(f: &Fitness) -> String {
    format!("{:.4}", fitness_to_f64(f))
}

/// Writes the per-generation log as CSV.
pub fn write_log<W: io::Write>(log: &[GenerationLog], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LOG_COLUMNS)?;
    for r in log {
        w.write_record([
            r.generation.to_string(),
            fmt_fitness(&r.best_sampled_fitness),
            fmt_fitness(&r.gen_best_full_fitness),
            fmt_fitness(&r.best_so_far_full_fitness),
            r.nodes_used.to_string(),
            r.elapsed_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

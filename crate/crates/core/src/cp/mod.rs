//! Constraint model, propagation and depth-first branch and bound.

mod propagate;
mod search;
mod store;

use std::time::Duration;

pub use propagate::{propagate, PropagationStatus};
pub(crate) use search::ranks;
pub use search::{
    select_variable, solve, solve_with_priorities, SearchStats, SolveResult, SolveStatus,
};
pub use store::{Conflict, CpResult, Domain, TrailMark, VarStore};

use crate::instance::{Instance, Schedule};
use crate::selector::Selector;
use store::JobConst;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("job {job} cannot complete inside the horizon (release {release} + processing {processing} > {horizon})")]
    RootInfeasible {
        job: usize,
        release: i64,
        processing: i64,
        horizon: i64,
    },
}

/// Immutable constraint model derived from an [`Instance`].
#[derive(Debug, Clone)]
pub struct Model {
    instance: Instance,
    initial: Vec<Domain>,
    consts: Vec<JobConst>,
    machine_jobs: Vec<Vec<usize>>,
    successors: Vec<Vec<usize>>,
    predecessors: Vec<Vec<usize>>,
}

impl Model {
    pub fn build(instance: &Instance) -> Result<Self, ModelError> {
        let n = instance.len();
        let horizon = instance.horizon();
        let mut initial = Vec::with_capacity(n);
        for job in instance.jobs() {
            if job.release + job.processing > horizon {
                return Err(ModelError::RootInfeasible {
                    job: job.id,
                    release: job.release,
                    processing: job.processing,
                    horizon,
                });
            }
            initial.push(Domain {
                min: job.release,
                max: horizon - job.processing,
            });
        }
        let mut machine_jobs = vec![Vec::new(); instance.machines()];
        for job in instance.jobs() {
            machine_jobs[job.machine].push(job.id);
        }
        let mut successors = vec![Vec::new(); n];
        let mut predecessors = vec![Vec::new(); n];
        for &(a, b) in instance.precedences() {
            successors[a].push(b);
            predecessors[b].push(a);
        }
        let consts = instance
            .jobs()
            .iter()
            .map(|j| JobConst {
                processing: j.processing,
                demand: j.resource,
                due: j.due,
                weight: j.weight.hundredths(),
            })
            .collect();
        Ok(Model {
            instance: instance.clone(),
            initial,
            consts,
            machine_jobs,
            successors,
            predecessors,
        })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn len(&self) -> usize {
        self.initial.len()
    }

    pub fn is_empty(&self) -> bool {
        self.initial.is_empty()
    }

    /// Domains before any propagation: `[r_j, T - p_j]`.
    pub fn initial_domains(&self) -> &[Domain] {
        &self.initial
    }

    pub fn machine_jobs(&self, machine: usize) -> &[usize] {
        &self.machine_jobs[machine]
    }

    pub fn successors(&self, job: usize) -> &[usize] {
        &self.successors[job]
    }

    pub fn predecessors(&self, job: usize) -> &[usize] {
        &self.predecessors[job]
    }

    pub(crate) fn machine_of(&self, job: usize) -> usize {
        self.instance.job(job).machine
    }

    /// A fresh store over the initial domains with every job queued for
    /// propagation.
    pub fn root_store(&self) -> CpResult<VarStore> {
        VarStore::new(
            &self.initial,
            self.consts.clone(),
            self.instance.resource_limit(),
            self.instance.horizon(),
        )
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Maximum number of search nodes, the root included.
    pub node_budget: u64,
    /// Optional wall-clock cutoff, checked alongside the node budget.
    pub time_budget: Option<Duration>,
    /// Tie-breaker; `None` ranks every job equally (lowest id wins).
    pub selector: Option<Selector>,
    /// Schedule installed as the initial incumbent when it is valid.
    pub warm_start: Option<Schedule>,
    /// Reserved for randomised tie-breaking; the search does not use it.
    pub seed: u64,
}

impl SolverConfig {
    pub fn with_budget(node_budget: u64) -> Self {
        SolverConfig {
            node_budget: node_budget.max(1),
            time_budget: None,
            selector: None,
            warm_start: None,
            seed: 0,
        }
    }

    pub fn selector(mut self, selector: Selector) -> Self {
        self.selector = Some(selector);
        self
    }

    pub fn warm_start(mut self, schedule: Schedule) -> Self {
        self.warm_start = Some(schedule);
        self
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::with_budget(50_000)
    }
}

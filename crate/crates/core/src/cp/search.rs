//! Depth-first branch and bound over start times.
//!
//! The branching variable is the unassigned job with the smallest domain
//! minimum; ties go to the highest selector priority, then the lowest id.
//! The left child fixes the job to its minimum, the right child raises the
//! minimum by one. A node is pruned when its tardiness lower bound reaches
//! the incumbent.

use std::fmt;
use std::time::{Duration, Instant};

use super::propagate::{propagate, PropagationStatus};
use super::store::{TrailMark, VarStore};
use super::{Model, SolverConfig};
use crate::decimal::Decimal;
use crate::instance::{total_weighted_tardiness, validate_schedule, Schedule};
use crate::selector::priorities_for;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    Unknown,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "OPTIMAL",
            SolveStatus::Feasible => "FEASIBLE",
            SolveStatus::Infeasible => "INFEASIBLE",
            SolveStatus::Unknown => "UNKNOWN",
        }
    }

    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub backtracks: u64,
    pub propagations: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub best_schedule: Option<Schedule>,
    pub best_objective: Option<Decimal>,
    pub status: SolveStatus,
    pub stats: SearchStats,
    /// Objective of every incumbent in the order found, warm start first.
    pub improvements: Vec<Decimal>,
}

/// Smallest domain minimum first, then highest priority, then lowest id.
pub fn select_variable(store: &VarStore, priorities: &[f64]) -> Option<usize> {
    assert_eq!(priorities.len(), store.len(), "one priority per job");
    let mut best: Option<usize> = None;
    for j in 0..store.len() {
        if store.is_assigned(j) {
            continue;
        }
        best = match best {
            None => Some(j),
            Some(b) => {
                let (mj, mb) = (store.min(j), store.min(b));
                if mj < mb || (mj == mb && priorities[j] > priorities[b]) {
                    Some(j)
                } else {
                    Some(b)
                }
            }
        };
    }
    best
}

/// Position of each job in descending priority order, ties by id.
pub(crate) fn ranks(priorities: &[f64]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..priorities.len()).collect();
    order.sort_by(|&a, &b| priorities[b].total_cmp(&priorities[a]).then(a.cmp(&b)));
    let mut rank = vec![0u32; priorities.len()];
    for (pos, &j) in order.iter().enumerate() {
        rank[j] = pos as u32;
    }
    rank
}

fn select_ranked(store: &VarStore, rank: &[u32]) -> Option<usize> {
    let mut best: Option<(i64, u32, usize)> = None;
    for (j, &r) in rank.iter().enumerate() {
        if store.is_assigned(j) {
            continue;
        }
        let key = (store.min(j), r, j);
        if best.is_none_or(|b| (key.0, key.1) < (b.0, b.1)) {
            best = Some(key);
        }
    }
    best.map(|b| b.2)
}

/// Solves with priorities computed once from `config.selector`.
pub fn solve(model: &Model, config: &SolverConfig) -> SolveResult {
    let priorities = match &config.selector {
        Some(sel) => priorities_for(sel, model.instance()),
        None => vec![0.0; model.len()],
    };
    solve_with_priorities(model, config, &priorities)
}

struct Frame {
    mark: TrailMark,
    job: usize,
    value: i64,
    right_done: bool,
}

struct Search<'a> {
    model: &'a Model,
    config: &'a SolverConfig,
    start: Instant,
    stats: SearchStats,
    best: Option<(Decimal, Vec<i64>)>,
    improvements: Vec<Decimal>,
    stopped: bool,
}

impl Search<'_> {
    /// Accounts for a new node; false once a budget is exhausted.
    fn enter_node(&mut self) -> bool {
        if self.stats.nodes >= self.config.node_budget {
            self.stopped = true;
            return false;
        }
        if let Some(limit) = self.config.time_budget {
            if self.stats.nodes.is_multiple_of(256) && self.start.elapsed() >= limit {
                self.stopped = true;
                return false;
            }
        }
        self.stats.nodes += 1;
        true
    }

    /// Propagates and bounds; true when the node survives.
    fn evaluate(&mut self, store: &mut VarStore) -> bool {
        self.stats.propagations += 1;
        if propagate(self.model, store) == PropagationStatus::Conflict {
            return false;
        }
        match &self.best {
            Some((obj, _)) => store.tardiness_lower_bound() < *obj,
            None => true,
        }
    }

    fn record(&mut self, store: &VarStore) {
        // all assigned: the lower bound is the exact objective
        let obj = store.tardiness_lower_bound();
        if self.best.as_ref().is_none_or(|(b, _)| obj < *b) {
            self.improvements.push(obj);
            self.best = Some((obj, store.starts()));
        }
    }
}

pub fn solve_with_priorities(
    model: &Model,
    config: &SolverConfig,
    priorities: &[f64],
) -> SolveResult {
    assert_eq!(priorities.len(), model.len(), "one priority per job");
    let rank = ranks(priorities);
    let mut search = Search {
        model,
        config,
        start: Instant::now(),
        stats: SearchStats::default(),
        best: None,
        improvements: Vec::new(),
        stopped: false,
    };
    if let Some(ws) = &config.warm_start {
        let instance = model.instance();
        if ws.starts.len() == model.len() && validate_schedule(instance, ws).is_empty() {
            let obj = total_weighted_tardiness(instance, ws);
            search.improvements.push(obj);
            search.best = Some((obj, ws.starts.clone()));
        }
    }

    if let Ok(mut store) = model.root_store() {
        search.enter_node();
        let mut alive = search.evaluate(&mut store);
        let mut stack: Vec<Frame> = Vec::new();
        loop {
            if alive {
                match select_ranked(&store, &rank) {
                    None => {
                        search.record(&store);
                        alive = false;
                    }
                    Some(job) => {
                        if !search.enter_node() {
                            break;
                        }
                        let value = store.min(job);
                        stack.push(Frame {
                            mark: store.mark(),
                            job,
                            value,
                            right_done: false,
                        });
                        alive = store.set_max(job, value).is_ok() && search.evaluate(&mut store);
                    }
                }
                continue;
            }
            // backtrack to the deepest frame with an untried right child
            search.stats.backtracks += 1;
            let Some(frame) = stack.last_mut() else { break };
            store.restore(frame.mark);
            if frame.right_done {
                stack.pop();
                continue;
            }
            frame.right_done = true;
            let (job, value) = (frame.job, frame.value);
            if !search.enter_node() {
                break;
            }
            alive = store.set_min(job, value + 1).is_ok() && search.evaluate(&mut store);
        }
    }

    search.stats.elapsed = search.start.elapsed();
    let status = match (search.stopped, search.best.is_some()) {
        (false, true) => SolveStatus::Optimal,
        (false, false) => SolveStatus::Infeasible,
        (true, true) => SolveStatus::Feasible,
        (true, false) => SolveStatus::Unknown,
    };
    let (best_objective, best_schedule) = match search.best {
        Some((obj, starts)) => (Some(obj), Some(Schedule::new(starts))),
        None => (None, None),
    };
    SolveResult {
        best_schedule,
        best_objective,
        status,
        stats: search.stats,
        improvements: search.improvements,
    }
}

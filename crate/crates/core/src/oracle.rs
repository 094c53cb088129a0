//! Exhaustive reference optimum for small instances.
//!
//! Every precedence-respecting job sequence is decoded by the serial
//! generation scheme (earliest feasible start given the jobs before it).
//! The decoded schedules include an optimal one for any objective that is
//! nondecreasing in completion times, which TWT is.

use crate::construct::{predecessor_lists, Placement};
use crate::decimal::Decimal;
use crate::instance::{Instance, Schedule};

pub const MAX_ORACLE_JOBS: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub optimal_objective: Decimal,
    pub optimal_schedule: Schedule,
    /// Number of complete sequences decoded.
    pub enumerated_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance has {jobs} jobs; the oracle handles at most {MAX_ORACLE_JOBS}")]
    TooLarge { jobs: usize },
    #[error("no schedule fits inside the horizon")]
    Infeasible,
}

struct Enumeration<'a> {
    instance: &'a Instance,
    preds: Vec<Vec<usize>>,
    placement: Placement<'a>,
    count: u64,
    best: Option<(Decimal, Schedule)>,
}

impl Enumeration<'_> {
    fn extend(&mut self, placed: usize, cost: Decimal) {
        let n = self.instance.len();
        if placed == n {
            self.count += 1;
            if self.best.as_ref().is_none_or(|(b, _)| cost < *b) {
                self.best = Some((cost, self.placement.schedule()));
            }
            return;
        }
        for j in 0..n {
            if self.placement.is_placed(j) || !self.placement.is_ready(j, &self.preds) {
                continue;
            }
            let job = self.instance.job(j);
            let start = self.placement.earliest_start(j, &self.preds);
            if start + job.processing > self.instance.horizon() {
                // every completion of this prefix overruns the horizon
                self.count += 1;
                continue;
            }
            self.placement.place(j, start);
            self.extend(placed + 1, cost + job.weighted_tardiness(start));
            self.placement.unplace(j);
        }
    }
}

pub fn brute_force_optimum(instance: &Instance) -> Result<OracleResult, OracleError> {
    if instance.len() > MAX_ORACLE_JOBS {
        return Err(OracleError::TooLarge {
            jobs: instance.len(),
        });
    }
    let mut e = Enumeration {
        instance,
        preds: predecessor_lists(instance),
        placement: Placement::new(instance),
        count: 0,
        best: None,
    };
    e.extend(0, Decimal::ZERO);
    let (optimal_objective, optimal_schedule) = e.best.ok_or(OracleError::Infeasible)?;
    Ok(OracleResult {
        optimal_objective,
        optimal_schedule,
        enumerated_count: e.count,
    })
}

use std::fmt;

use crate::decimal::Decimal;

/// Raised when a domain empties or the resource profile overloads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, thiserror::Error)]
#[error("inconsistency")]
pub struct Conflict;

pub type CpResult<T> = Result<T, Conflict>;

/// Contiguous interval of candidate start times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Domain {
    pub min: i64,
    pub max: i64,
}

impl Domain {
    pub fn is_assigned(&self) -> bool {
        self.min == self.max
    }

    pub fn contains(&self, v: i64) -> bool {
        self.min <= v && v <= self.max
    }

    pub fn size(&self) -> i64 {
        self.max - self.min + 1
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.min, self.max)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct JobConst {
    pub processing: i64,
    pub demand: i64,
    pub due: i64,
    /// Weight in hundredths.
    pub weight: i64,
}

impl JobConst {
    fn tardiness(&self, start: i64) -> i64 {
        self.weight * (start + self.processing - self.due).max(0)
    }
}

#[derive(Debug, Clone, Copy)]
struct TrailEntry {
    job: u32,
    min: i64,
    max: i64,
}

/// Position in the trail to come back to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrailMark(usize);

/// Start-time domains of every job with a trail for backtracking.
///
/// Alongside the domains the store keeps two derived quantities updated on
/// every bound change and restored by [`VarStore::restore`]:
/// the compulsory-part resource profile and the tardiness lower bound
/// `sum_j w_j * max(0, min_j + p_j - d_j)`.
#[derive(Debug, Clone)]
pub struct VarStore {
    min: Vec<i64>,
    max: Vec<i64>,
    jobs: Vec<JobConst>,
    capacity: i64,
    trail: Vec<TrailEntry>,
    profile: Vec<i64>,
    tardiness_lb: i64,
    unassigned: usize,
    events: Vec<usize>,
    pending: Vec<bool>,
}

impl VarStore {
    pub(crate) fn new(
        domains: &[Domain],
        jobs: Vec<JobConst>,
        capacity: i64,
        horizon: i64,
    ) -> CpResult<Self> {
        let n = domains.len();
        let mut store = VarStore {
            min: domains.iter().map(|d| d.min).collect(),
            max: domains.iter().map(|d| d.max).collect(),
            jobs,
            capacity,
            trail: Vec::new(),
            profile: vec![0; horizon.max(0) as usize],
            tardiness_lb: 0,
            unassigned: 0,
            events: (0..n).collect(),
            pending: vec![true; n],
        };
        let mut overload = false;
        for j in 0..n {
            store.tardiness_lb += store.jobs[j].tardiness(store.min[j]);
            if store.min[j] < store.max[j] {
                store.unassigned += 1;
            }
            let (a, b) = store.compulsory(j);
            overload |= store.add_usage(a, b, store.jobs[j].demand);
        }
        if overload {
            return Err(Conflict);
        }
        Ok(store)
    }

    pub fn len(&self) -> usize {
        self.min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.min.is_empty()
    }

    pub fn domain(&self, job: usize) -> Domain {
        Domain {
            min: self.min[job],
            max: self.max[job],
        }
    }

    pub fn min(&self, job: usize) -> i64 {
        self.min[job]
    }

    pub fn max(&self, job: usize) -> i64 {
        self.max[job]
    }

    pub fn is_assigned(&self, job: usize) -> bool {
        self.min[job] == self.max[job]
    }

    pub fn all_assigned(&self) -> bool {
        self.unassigned == 0
    }

    /// `sum_j w_j * max(0, min_j + p_j - d_j)`; a lower bound on the TWT
    /// of every schedule inside the current domains.
    pub fn tardiness_lower_bound(&self) -> Decimal {
        Decimal::from_hundredths(self.tardiness_lb)
    }

    /// Compulsory resource usage at time `t`.
    pub fn profile_at(&self, t: i64) -> i64 {
        self.profile.get(t as usize).copied().unwrap_or(0)
    }

    /// Current minima; a schedule once every job is assigned.
    pub fn starts(&self) -> Vec<i64> {
        self.min.clone()
    }

    pub fn mark(&self) -> TrailMark {
        TrailMark(self.trail.len())
    }

    pub fn restore(&mut self, mark: TrailMark) {
        while self.trail.len() > mark.0 {
            let e = self.trail.pop().expect("trail above mark");
            let j = e.job as usize;
            let (a, b) = self.compulsory(j);
            self.add_usage(a, b, -self.jobs[j].demand);
            if self.min[j] == self.max[j] && e.min < e.max {
                self.unassigned += 1;
            }
            self.tardiness_lb +=
                self.jobs[j].tardiness(e.min) - self.jobs[j].tardiness(self.min[j]);
            self.min[j] = e.min;
            self.max[j] = e.max;
            let (a, b) = self.compulsory(j);
            self.add_usage(a, b, self.jobs[j].demand);
        }
        for &j in &self.events {
            self.pending[j] = false;
        }
        self.events.clear();
    }

    /// Raises the minimum of `job` to `value`. Returns whether it changed.
    pub fn set_min(&mut self, job: usize, value: i64) -> CpResult<bool> {
        let (lo, hi) = (self.min[job], self.max[job]);
        if value <= lo {
            return Ok(false);
        }
        if value > hi {
            return Err(Conflict);
        }
        self.trail.push(TrailEntry {
            job: job as u32,
            min: lo,
            max: hi,
        });
        let jc = self.jobs[job];
        self.tardiness_lb += jc.tardiness(value) - jc.tardiness(lo);
        self.min[job] = value;
        if value == hi {
            self.unassigned -= 1;
        }
        self.push_event(job);
        // compulsory part grows from [hi, lo + p) to [hi, value + p)
        let overload = self.add_usage(hi.max(lo + jc.processing), value + jc.processing, jc.demand);
        if overload {
            return Err(Conflict);
        }
        Ok(true)
    }

    /// Lowers the maximum of `job` to `value`. Returns whether it changed.
    pub fn set_max(&mut self, job: usize, value: i64) -> CpResult<bool> {
        let (lo, hi) = (self.min[job], self.max[job]);
        if value >= hi {
            return Ok(false);
        }
        if value < lo {
            return Err(Conflict);
        }
        self.trail.push(TrailEntry {
            job: job as u32,
            min: lo,
            max: hi,
        });
        self.max[job] = value;
        if value == lo {
            self.unassigned -= 1;
        }
        self.push_event(job);
        let jc = self.jobs[job];
        // compulsory part grows from [hi, lo + p) to [value, lo + p)
        let overload = self.add_usage(value, hi.min(lo + jc.processing), jc.demand);
        if overload {
            return Err(Conflict);
        }
        Ok(true)
    }

    pub fn assign(&mut self, job: usize, value: i64) -> CpResult<bool> {
        let a = self.set_min(job, value)?;
        let b = self.set_max(job, value)?;
        Ok(a || b)
    }

    pub(crate) fn pop_event(&mut self) -> Option<usize> {
        let j = self.events.pop()?;
        self.pending[j] = false;
        Some(j)
    }

    pub(crate) fn has_events(&self) -> bool {
        !self.events.is_empty()
    }

    pub(crate) fn clear_events(&mut self) {
        for &j in &self.events {
            self.pending[j] = false;
        }
        self.events.clear();
    }

    pub(crate) fn capacity(&self) -> i64 {
        self.capacity
    }

    pub(crate) fn job_const(&self, job: usize) -> JobConst {
        self.jobs[job]
    }

    fn push_event(&mut self, job: usize) {
        if !self.pending[job] {
            self.pending[job] = true;
            self.events.push(job);
        }
    }

    fn compulsory(&self, job: usize) -> (i64, i64) {
        (self.max[job], self.min[job] + self.jobs[job].processing)
    }

    /// Adds `delta` over `[from, to)`; returns true if any touched point
    /// now exceeds the capacity.
    fn add_usage(&mut self, from: i64, to: i64, delta: i64) -> bool {
        if from >= to || delta == 0 {
            return false;
        }
        let mut overload = false;
        for u in &mut self.profile[from as usize..to as usize] {
            *u += delta;
            overload |= *u > self.capacity;
        }
        overload
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store(domains: &[(i64, i64)], p: i64, g: i64, cap: i64) -> VarStore {
        let doms: Vec<Domain> = domains
            .iter()
            .map(|&(min, max)| Domain { min, max })
            .collect();
        let jobs = vec![
            JobConst {
                processing: p,
                demand: g,
                due: 0,
                weight: 100
            };
            doms.len()
        ];
        VarStore::new(&doms, jobs, cap, 20).unwrap()
    }

    #[test]
    fn restore_reproduces_domains_and_profile() {
        let mut s = store(&[(0, 6), (2, 8)], 4, 1, 2);
        let before: Vec<_> = (0..2).map(|j| s.domain(j)).collect();
        let profile_before: Vec<_> = (0..20).map(|t| s.profile_at(t)).collect();
        let lb_before = s.tardiness_lower_bound();
        let m = s.mark();
        s.set_min(0, 3).unwrap();
        s.set_max(1, 3).unwrap();
        s.assign(0, 5).unwrap();
        assert!(!s.all_assigned());
        // job 0 on [5, 9) plus job 1's compulsory part [3, 6)
        assert_eq!(s.profile_at(5), 2);
        s.restore(m);
        assert_eq!((0..2).map(|j| s.domain(j)).collect::<Vec<_>>(), before);
        assert_eq!(
            (0..20).map(|t| s.profile_at(t)).collect::<Vec<_>>(),
            profile_before
        );
        assert_eq!(s.tardiness_lower_bound(), lb_before);
    }

    #[test]
    fn emptying_a_domain_is_a_conflict() {
        let mut s = store(&[(0, 5)], 1, 0, 1);
        assert_eq!(s.set_min(0, 6), Err(Conflict));
        assert_eq!(s.set_max(0, -1), Err(Conflict));
        assert_eq!(s.domain(0), Domain { min: 0, max: 5 });
        assert_eq!(s.set_min(0, 0), Ok(false));
    }

    #[test]
    fn compulsory_parts_overload() {
        let mut s = store(&[(0, 9), (0, 9)], 3, 2, 3);
        s.assign(0, 4).unwrap();
        assert_eq!(s.assign(1, 5), Err(Conflict));
    }

    #[test]
    fn tardiness_bound_tracks_minima() {
        // p = 1, d = 0, w = 1.00: tardiness of a start s is s + 1.
        let mut s = store(&[(0, 9)], 1, 0, 1);
        assert_eq!(s.tardiness_lower_bound(), Decimal::from_int(1));
        s.set_min(0, 4).unwrap();
        assert_eq!(s.tardiness_lower_bound(), Decimal::from_int(5));
    }
}

//! Serial schedule generation: jobs are placed one at a time at the earliest
//! start that respects release, precedence, machine and resource
//! availability given the jobs already placed.

use crate::instance::{Instance, Schedule};
use crate::selector::{priorities_for, Selector};

/// Partial schedule with time-indexed machine and resource occupancy.
#[derive(Debug, Clone)]
pub(crate) struct Placement<'a> {
    instance: &'a Instance,
    starts: Vec<Option<i64>>,
    busy: Vec<Vec<bool>>,
    usage: Vec<i64>,
}

impl<'a> Placement<'a> {
    pub(crate) fn new(instance: &'a Instance) -> Self {
        let span = instance.horizon().max(1) as usize;
        Placement {
            instance,
            starts: vec![None; instance.len()],
            busy: vec![vec![false; span]; instance.machines()],
            usage: vec![0; span],
        }
    }

    pub(crate) fn is_placed(&self, job: usize) -> bool {
        self.starts[job].is_some()
    }

    /// Every predecessor of `job` has been placed.
    pub(crate) fn is_ready(&self, job: usize, preds: &[Vec<usize>]) -> bool {
        preds[job].iter().all(|&q| self.is_placed(q))
    }

    pub(crate) fn earliest_start(&self, job: usize, preds: &[Vec<usize>]) -> i64 {
        let j = self.instance.job(job);
        let mut t = j.release;
        for &q in &preds[job] {
            let s = self.starts[q].expect("predecessor placed first");
            t = t.max(s + self.instance.job(q).processing);
        }
        let limit = self.instance.resource_limit() - j.resource;
        'scan: loop {
            for tau in (t..t + j.processing).rev() {
                let idx = tau as usize;
                let machine_busy = self.busy[j.machine].get(idx).copied().unwrap_or(false);
                let used = self.usage.get(idx).copied().unwrap_or(0);
                if machine_busy || used > limit {
                    t = tau + 1;
                    continue 'scan;
                }
            }
            return t;
        }
    }

    pub(crate) fn place(&mut self, job: usize, start: i64) {
        let j = self.instance.job(job);
        let end = (start + j.processing) as usize;
        if end > self.usage.len() {
            self.usage.resize(end, 0);
            for b in &mut self.busy {
                b.resize(end, false);
            }
        }
        for tau in start as usize..end {
            self.busy[j.machine][tau] = true;
            self.usage[tau] += j.resource;
        }
        self.starts[job] = Some(start);
    }

    pub(crate) fn unplace(&mut self, job: usize) {
        let j = self.instance.job(job);
        let start = self.starts[job].take().expect("job placed");
        for tau in start as usize..(start + j.processing) as usize {
            self.busy[j.machine][tau] = false;
            self.usage[tau] -= j.resource;
        }
    }

    pub(crate) fn schedule(&self) -> Schedule {
        Schedule::new(
            self.starts
                .iter()
                .map(|s| s.expect("all jobs placed"))
                .collect(),
        )
    }
}

pub(crate) fn predecessor_lists(instance: &Instance) -> Vec<Vec<usize>> {
    let mut preds = vec![Vec::new(); instance.len()];
    for &(a, b) in instance.precedences() {
        preds[b].push(a);
    }
    preds
}

/// Single-pass construction: among precedence-ready jobs the highest
/// priority (then lowest id) is placed next.
pub fn single_pass_construct(instance: &Instance, selector: &Selector) -> Schedule {
    construct_with_priorities(instance, &priorities_for(selector, instance))
}

pub fn construct_with_priorities(instance: &Instance, priorities: &[f64]) -> Schedule {
    assert_eq!(priorities.len(), instance.len(), "one priority per job");
    let preds = predecessor_lists(instance);
    let mut placement = Placement::new(instance);
    for _ in 0..instance.len() {
        let next = (0..instance.len())
            .filter(|&j| !placement.is_placed(j) && placement.is_ready(j, &preds))
            .fold(None, |best: Option<usize>, j| match best {
                Some(b) if priorities[b] >= priorities[j] => Some(b),
                _ => Some(j),
            })
            .expect("acyclic precedences leave a ready job");
        let start = placement.earliest_start(next, &preds);
        placement.place(next, start);
    }
    placement.schedule()
}

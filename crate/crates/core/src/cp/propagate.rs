//! Bound filtering for release dates, precedences, machine disjunctions and
//! the shared resource.
//!
//! Every bound change queues its job; the queue is drained through the
//! precedence and pairwise disjunctive filters, then a timetable sweep over
//! the compulsory-part profile runs. The loop stops when a sweep queues
//! nothing new.

use super::store::{CpResult, VarStore};
use super::Model;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationStatus {
    Consistent,
    Conflict,
}

/// Runs all filters to a fixpoint over the jobs queued in `store`.
///
/// On conflict the store is left mid-propagation; callers restore a mark.
pub fn propagate(model: &Model, store: &mut VarStore) -> PropagationStatus {
    match fixpoint(model, store) {
        Ok(()) => PropagationStatus::Consistent,
        Err(_) => {
            store.clear_events();
            PropagationStatus::Conflict
        }
    }
}

fn fixpoint(model: &Model, store: &mut VarStore) -> CpResult<()> {
    loop {
        let mut touched = false;
        while let Some(j) = store.pop_event() {
            touched = true;
            precedence(model, store, j)?;
            disjunctive(model, store, j)?;
        }
        if !touched {
            return Ok(());
        }
        timetable(model, store)?;
        if !store.has_events() {
            return Ok(());
        }
    }
}

fn precedence(model: &Model, store: &mut VarStore, j: usize) -> CpResult<()> {
    let p = store.job_const(j).processing;
    let earliest_end = store.min(j) + p;
    for &s in model.successors(j) {
        store.set_min(s, earliest_end)?;
    }
    let latest_start = store.max(j);
    for &q in model.predecessors(j) {
        store.set_max(q, latest_start - store.job_const(q).processing)?;
    }
    Ok(())
}

fn disjunctive(model: &Model, store: &mut VarStore, j: usize) -> CpResult<()> {
    for &o in model.machine_jobs(model.machine_of(j)) {
        if o != j {
            pair(store, j, o)?;
        }
    }
    Ok(())
}

/// Pairwise filtering of `a` and `b` sharing a machine.
fn pair(store: &mut VarStore, a: usize, b: usize) -> CpResult<()> {
    let pa = store.job_const(a).processing;
    let pb = store.job_const(b).processing;
    let a_first = store.min(a) + pa <= store.max(b);
    let b_first = store.min(b) + pb <= store.max(a);
    match (a_first, b_first) {
        (true, true) => Ok(()),
        (false, false) => Err(super::Conflict),
        (true, false) => order(store, a, pa, b),
        (false, true) => order(store, b, pb, a),
    }
}

fn order(store: &mut VarStore, first: usize, p_first: i64, second: usize) -> CpResult<()> {
    store.set_min(second, store.min(first) + p_first)?;
    store.set_max(first, store.max(second) - p_first)?;
    Ok(())
}

/// Pushes each job's minimum past profile windows it cannot fit through.
///
/// Overload of the profile itself is detected by the store when a
/// compulsory part grows.
fn timetable(model: &Model, store: &mut VarStore) -> CpResult<()> {
    let capacity = store.capacity();
    for j in 0..model.len() {
        let jc = store.job_const(j);
        if jc.demand == 0 || store.is_assigned(j) {
            continue;
        }
        let (min, max) = (store.min(j), store.max(j));
        // own compulsory part, already counted in the profile
        let (own_from, own_to) = (max, min + jc.processing);
        let threshold = capacity - jc.demand;
        let mut start = min;
        'scan: loop {
            // latest blocking point inside [start, start + p) jumps furthest
            for t in (start..start + jc.processing).rev() {
                let own = if own_from <= t && t < own_to {
                    jc.demand
                } else {
                    0
                };
                if store.profile_at(t) - own > threshold {
                    start = t + 1;
                    if start > max {
                        return Err(super::Conflict);
                    }
                    continue 'scan;
                }
            }
            break;
        }
        if start > min {
            store.set_min(j, start)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cp::Domain;
    use crate::decimal::Decimal;
    use crate::instance::{Instance, Job};

    fn job(id: usize, machine: usize, p: i64, g: i64) -> Job {
        Job {
            id,
            machine,
            release: 0,
            processing: p,
            due: 0,
            weight: Decimal::from_int(1),
            resource: g,
        }
    }

    fn run(inst: &Instance) -> (PropagationStatus, VarStore) {
        let model = Model::build(inst).unwrap();
        let mut store = model.root_store().unwrap();
        let status = propagate(&model, &mut store);
        (status, store)
    }

    #[test]
    fn precedence_bounds() {
        let inst = Instance::new(
            2,
            vec![job(0, 0, 3, 0), job(1, 0, 3, 0)],
            [(0, 1)],
            1,
            Some(13),
        )
        .unwrap();
        let (status, store) = run(&inst);
        assert_eq!(status, PropagationStatus::Consistent);
        assert_eq!(store.domain(0), Domain { min: 0, max: 7 });
        assert_eq!(store.domain(1), Domain { min: 3, max: 10 });
    }

    #[test]
    fn precedence_example_on_wide_domains() {
        // Both domains [0, 10]: successor of a p=3 job starts at 3 or later,
        // the predecessor at 7 or earlier.
        let jobs = vec![
            job(0, 0, 3, 0),
            Job {
                processing: 1,
                ..job(1, 0, 1, 0)
            },
        ];
        let inst = Instance::new(1, jobs, [(0, 1)], 1, Some(11)).unwrap();
        let model = Model::build(&inst).unwrap();
        assert_eq!(model.initial_domains()[1], Domain { min: 0, max: 10 });
        let mut store = model.root_store().unwrap();
        assert_eq!(propagate(&model, &mut store), PropagationStatus::Consistent);
        assert_eq!(store.min(1), 3);
        assert_eq!(store.max(0), 7);
    }

    #[test]
    fn disjunctive_impossibility() {
        let inst =
            Instance::new(1, vec![job(0, 0, 5, 0), job(1, 0, 5, 0)], [], 1, Some(9)).unwrap();
        let (status, _) = run(&inst);
        assert_eq!(status, PropagationStatus::Conflict);
    }

    #[test]
    fn disjunctive_forces_order() {
        // job 1 is fixed to [0, 4); job 0 must follow it
        let jobs = vec![
            job(0, 0, 2, 0),
            Job {
                release: 0,
                ..job(1, 0, 4, 0)
            },
        ];
        let inst = Instance::new(1, jobs, [], 1, Some(8)).unwrap();
        let model = Model::build(&inst).unwrap();
        let mut store = model.root_store().unwrap();
        store.assign(1, 0).unwrap();
        assert_eq!(propagate(&model, &mut store), PropagationStatus::Consistent);
        assert_eq!(store.min(0), 4);
    }

    #[test]
    fn profile_overload_is_a_conflict() {
        let jobs = (0..3).map(|i| job(i, i, 5, 1)).collect();
        let inst = Instance::new(3, jobs, [], 2, Some(5)).unwrap();
        // all three are fixed to [0, 5), so the root store already overloads
        let model = Model::build(&inst).unwrap();
        assert_eq!(model.root_store().err(), Some(crate::cp::Conflict));
    }

    #[test]
    fn timetable_pushes_minimum() {
        // job 0 pinned to [0, 4) with demand 2 of 2; job 1 (demand 1) must wait
        let jobs = vec![job(0, 0, 4, 2), job(1, 1, 2, 1)];
        let inst = Instance::new(2, jobs, [], 2, Some(10)).unwrap();
        let model = Model::build(&inst).unwrap();
        let mut store = model.root_store().unwrap();
        store.assign(0, 0).unwrap();
        assert_eq!(propagate(&model, &mut store), PropagationStatus::Consistent);
        assert_eq!(store.min(1), 4);
    }
}

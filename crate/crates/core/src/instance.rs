//! RCJS instance data, the canonical text format, the random generator and
//! schedule evaluation.
//!
//! Times are integers. A job occupies `[start, start + processing)`, so two
//! jobs may run back to back and a successor may start at the exact end of
//! its predecessor.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decimal::Decimal;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub id: usize,
    pub machine: usize,
    pub release: i64,
    pub processing: i64,
    pub due: i64,
    pub weight: Decimal,
    pub resource: i64,
}

impl Job {
    /// Weighted tardiness of this job when it starts at `start`.
    pub fn weighted_tardiness(&self, start: i64) -> Decimal {
        self.weight * (start + self.processing - self.due).max(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    machines: usize,
    jobs: Vec<Job>,
    precedences: Vec<(usize, usize)>,
    resource_limit: i64,
    horizon: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("job {job}: {message}")]
    InvalidJob { job: usize, message: String },
    #[error("cross-machine precedence {before} -> {after} (machines {machine_before} and {machine_after})")]
    CrossMachinePrecedence {
        before: usize,
        after: usize,
        machine_before: usize,
        machine_after: usize,
    },
    #[error("precedence {before} -> {after} refers to an unknown job")]
    UnknownJob { before: usize, after: usize },
    #[error("precedence graph has a cycle through jobs {0:?}")]
    Cycle(Vec<usize>),
    #[error("job {job} needs {demand} resource units but the limit is {limit}")]
    ResourceOverLimit { job: usize, demand: i64, limit: i64 },
    #[error("horizon {horizon} does not admit the serial schedule (makespan {makespan})")]
    HorizonTooSmall { horizon: i64, makespan: i64 },
    #[error("invalid instance: {0}")]
    Invalid(String),
}

impl Instance {
    /// Builds an instance and checks its structural invariants.
    ///
    /// When `horizon` is `None` it is set by [`compute_horizon`]. An explicit
    /// horizon is accepted as given; [`Instance::check_horizon`] tests it.
    pub fn new(
        machines: usize,
        jobs: Vec<Job>,
        precedences: impl IntoIterator<Item = (usize, usize)>,
        resource_limit: i64,
        horizon: Option<i64>,
    ) -> Result<Self, InstanceError> {
        if machines == 0 {
            return Err(InstanceError::Invalid(
                "machine count must be at least 1".into(),
            ));
        }
        if resource_limit < 1 {
            return Err(InstanceError::Invalid(
                "resource limit must be at least 1".into(),
            ));
        }
        for (idx, job) in jobs.iter().enumerate() {
            let bad = |message: &str| InstanceError::InvalidJob {
                job: idx,
                message: message.into(),
            };
            if job.id != idx {
                return Err(bad("job ids must be 0..n-1 in order"));
            }
            if job.machine >= machines {
                return Err(bad("machine index out of range"));
            }
            if job.processing < 1 {
                return Err(bad("processing time must be at least 1"));
            }
            if job.release < 0 {
                return Err(bad("release time must be non-negative"));
            }
            if job.weight < Decimal::ZERO {
                return Err(bad("weight must be non-negative"));
            }
            if job.resource < 0 {
                return Err(bad("resource demand must be non-negative"));
            }
            if job.resource > resource_limit {
                return Err(InstanceError::ResourceOverLimit {
                    job: idx,
                    demand: job.resource,
                    limit: resource_limit,
                });
            }
        }
        let precedences: BTreeSet<(usize, usize)> = precedences.into_iter().collect();
        for &(before, after) in &precedences {
            if before >= jobs.len() || after >= jobs.len() {
                return Err(InstanceError::UnknownJob { before, after });
            }
            let (mb, ma) = (jobs[before].machine, jobs[after].machine);
            if mb != ma {
                return Err(InstanceError::CrossMachinePrecedence {
                    before,
                    after,
                    machine_before: mb,
                    machine_after: ma,
                });
            }
        }
        let precedences: Vec<_> = precedences.into_iter().collect();
        topological_order(jobs.len(), &precedences)?;
        let horizon = horizon.unwrap_or_else(|| compute_horizon(&jobs));
        Ok(Instance {
            machines,
            jobs,
            precedences,
            resource_limit,
            horizon,
        })
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, id: usize) -> &Job {
        &self.jobs[id]
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    /// Precedence pairs `(before, after)`, sorted and without duplicates.
    pub fn precedences(&self) -> &[(usize, usize)] {
        &self.precedences
    }

    pub fn resource_limit(&self) -> i64 {
        self.resource_limit
    }

    pub fn horizon(&self) -> i64 {
        self.horizon
    }

    /// Jobs in a topological order of the precedence graph, lowest id first
    /// among ready jobs.
    pub fn topological_order(&self) -> Vec<usize> {
        topological_order(self.jobs.len(), &self.precedences).expect("validated at construction")
    }

    /// Checks that the serial schedule fits inside the horizon.
    pub fn check_horizon(&self) -> Result<(), InstanceError> {
        let serial = serial_schedule(self);
        let makespan = serial.makespan(self);
        if makespan > self.horizon {
            return Err(InstanceError::HorizonTooSmall {
                horizon: self.horizon,
                makespan,
            });
        }
        Ok(())
    }

    /// Upper bound on the TWT of any schedule inside the horizon.
    pub fn tardiness_upper_bound(&self) -> Decimal {
        self.jobs
            .iter()
            .map(|j| j.weight * (self.horizon - j.due).max(0))
            .sum()
    }
}

fn topological_order(
    n: usize,
    precedences: &[(usize, usize)],
) -> Result<Vec<usize>, InstanceError> {
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in precedences {
        indeg[b] += 1;
        succ[a].push(b);
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&j| indeg[j] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(j) = ready.pop_first() {
        order.push(j);
        for &s in &succ[j] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                ready.insert(s);
            }
        }
    }
    if order.len() < n {
        let cyclic = (0..n).filter(|&j| indeg[j] > 0).collect();
        return Err(InstanceError::Cycle(cyclic));
    }
    Ok(order)
}

/// `max release + sum of processing times`; the serial schedule always fits.
pub fn compute_horizon(jobs: &[Job]) -> i64 {
    let max_release = jobs.iter().map(|j| j.release).max().unwrap_or(0);
    max_release + jobs.iter().map(|j| j.processing).sum::<i64>()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schedule {
    pub starts: Vec<i64>,
}

impl Schedule {
    pub fn new(starts: Vec<i64>) -> Self {
        Schedule { starts }
    }

    pub fn end(&self, instance: &Instance, job: usize) -> i64 {
        self.starts[job] + instance.jobs[job].processing
    }

    pub fn makespan(&self, instance: &Instance) -> i64 {
        (0..self.starts.len())
            .map(|j| self.end(instance, j))
            .max()
            .unwrap_or(0)
    }
}

/// Runs one job at a time in topological order, each at
/// `max(release, end of previous job)`.
pub fn serial_schedule(instance: &Instance) -> Schedule {
    let mut starts = vec![0; instance.len()];
    let mut clock = 0;
    for j in instance.topological_order() {
        let job = &instance.jobs[j];
        let start = clock.max(job.release);
        starts[j] = start;
        clock = start + job.processing;
    }
    Schedule::new(starts)
}

/// `sum_j w_j * max(0, s_j + p_j - d_j)`. Feasibility is not checked.
pub fn total_weighted_tardiness(instance: &Instance, schedule: &Schedule) -> Decimal {
    assert_eq!(
        schedule.starts.len(),
        instance.len(),
        "schedule length must equal job count"
    );
    instance
        .jobs
        .iter()
        .zip(&schedule.starts)
        .map(|(job, &s)| job.weighted_tardiness(s))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Starts before its release time.
    Release {
        job: usize,
        start: i64,
        release: i64,
    },
    /// Two jobs on the same machine overlap.
    Overlap { first: usize, second: usize },
    /// `after` starts before `before` completes.
    Precedence { before: usize, after: usize },
    /// Resource use exceeds the limit on `[from, to)`.
    Resource {
        from: i64,
        to: i64,
        usage: i64,
        jobs: Vec<usize>,
    },
    /// Starts before 0 or ends after the horizon.
    Horizon { job: usize },
}

pub fn validate_schedule(instance: &Instance, schedule: &Schedule) -> Vec<Violation> {
    assert_eq!(
        schedule.starts.len(),
        instance.len(),
        "schedule length must equal job count"
    );
    let mut out = Vec::new();
    let jobs = &instance.jobs;
    let s = &schedule.starts;
    for job in jobs {
        let start = s[job.id];
        if start < 0 || start + job.processing > instance.horizon {
            out.push(Violation::Horizon { job: job.id });
        }
        if start < job.release {
            out.push(Violation::Release {
                job: job.id,
                start,
                release: job.release,
            });
        }
    }
    for a in 0..jobs.len() {
        for b in a + 1..jobs.len() {
            if jobs[a].machine == jobs[b].machine {
                let disjoint =
                    s[a] + jobs[a].processing <= s[b] || s[b] + jobs[b].processing <= s[a];
                if !disjoint {
                    out.push(Violation::Overlap {
                        first: a,
                        second: b,
                    });
                }
            }
        }
    }
    for &(before, after) in &instance.precedences {
        if s[after] < s[before] + jobs[before].processing {
            out.push(Violation::Precedence { before, after });
        }
    }
    // Sweep over start/end events; usage is constant between consecutive points.
    let mut points: Vec<i64> = jobs
        .iter()
        .flat_map(|j| [s[j.id], s[j.id] + j.processing])
        .collect();
    points.sort_unstable();
    points.dedup();
    let mut open: Option<Violation> = None;
    for w in points.windows(2) {
        let (t, next) = (w[0], w[1]);
        let running: Vec<usize> = jobs
            .iter()
            .filter(|j| j.resource > 0 && s[j.id] <= t && t < s[j.id] + j.processing)
            .map(|j| j.id)
            .collect();
        let usage: i64 = running.iter().map(|&j| jobs[j].resource).sum();
        if usage > instance.resource_limit {
            match &mut open {
                Some(Violation::Resource {
                    to,
                    usage: u,
                    jobs: js,
                    ..
                }) if *to == t && *js == running => {
                    *to = next;
                    *u = usage;
                }
                _ => {
                    out.extend(open.take());
                    open = Some(Violation::Resource {
                        from: t,
                        to: next,
                        usage,
                        jobs: running,
                    });
                }
            }
        } else {
            out.extend(open.take());
        }
    }
    out.extend(open);
    out
}

// ---------------------------------------------------------------------------
// Canonical text format

pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let mut machines = None;
    let mut resource = None;
    let mut horizon = None;
    let mut declared_jobs: Option<usize> = None;
    let mut jobs = Vec::new();
    let mut precs = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let syntax = |message: String| InstanceError::Syntax {
            line: line_no,
            message,
        };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let int = |i: usize, name: &str| -> Result<i64, InstanceError> {
            fields[i]
                .parse::<i64>()
                .map_err(|_| syntax(format!("invalid {name} `{}`", fields[i])))
        };
        let index = |i: usize, name: &str| -> Result<usize, InstanceError> {
            fields[i]
                .parse::<usize>()
                .map_err(|_| syntax(format!("invalid {name} `{}`", fields[i])))
        };
        let expect_len = |n: usize| -> Result<(), InstanceError> {
            if fields.len() != n {
                return Err(syntax(format!(
                    "`{}` expects {} fields, found {}",
                    fields[0],
                    n - 1,
                    fields.len() - 1
                )));
            }
            Ok(())
        };
        let once = |slot: bool| -> Result<(), InstanceError> {
            if slot {
                return Err(syntax(format!("duplicate `{}` record", fields[0])));
            }
            Ok(())
        };
        match fields[0] {
            "machines" => {
                expect_len(2)?;
                once(machines.is_some())?;
                machines = Some(index(1, "machine count")?);
            }
            "resource" => {
                expect_len(2)?;
                once(resource.is_some())?;
                resource = Some(int(1, "resource limit")?);
            }
            "horizon" => {
                expect_len(2)?;
                once(horizon.is_some())?;
                horizon = Some(int(1, "horizon")?);
            }
            "jobs" => {
                expect_len(2)?;
                once(declared_jobs.is_some())?;
                declared_jobs = Some(index(1, "job count")?);
            }
            "job" => {
                expect_len(8)?;
                let id = index(1, "job id")?;
                if id != jobs.len() {
                    return Err(syntax(format!(
                        "expected job id {}, found {id}",
                        jobs.len()
                    )));
                }
                let weight: Decimal = fields[6]
                    .parse()
                    .map_err(|e: crate::decimal::ParseDecimalError| syntax(e.to_string()))?;
                jobs.push(Job {
                    id,
                    machine: index(2, "machine")?,
                    release: int(3, "release")?,
                    processing: int(4, "processing time")?,
                    due: int(5, "due date")?,
                    weight,
                    resource: int(7, "resource demand")?,
                });
            }
            "prec" => {
                expect_len(3)?;
                precs.push((index(1, "job id")?, index(2, "job id")?));
            }
            other => return Err(syntax(format!("unknown record `{other}`"))),
        }
    }

    let missing = |what: &str| InstanceError::Syntax {
        line: 0,
        message: format!("missing `{what}` record"),
    };
    let machines = machines.ok_or_else(|| missing("machines"))?;
    let resource = resource.ok_or_else(|| missing("resource"))?;
    let declared = declared_jobs.ok_or_else(|| missing("jobs"))?;
    if declared != jobs.len() {
        return Err(InstanceError::Syntax {
            line: 0,
            message: format!(
                "`jobs {declared}` declared but {} job records found",
                jobs.len()
            ),
        });
    }
    let instance = Instance::new(machines, jobs, precs, resource, horizon)?;
    instance.check_horizon()?;
    Ok(instance)
}

pub fn format_instance(instance: &Instance) -> String {
    let mut out = String::new();
    writeln!(out, "machines {}", instance.machines).unwrap();
    writeln!(out, "resource {}", instance.resource_limit).unwrap();
    writeln!(out, "horizon {}", instance.horizon).unwrap();
    writeln!(out, "jobs {}", instance.jobs.len()).unwrap();
    for j in &instance.jobs {
        writeln!(
            out,
            "job {} {} {} {} {} {} {}",
            j.id, j.machine, j.release, j.processing, j.due, j.weight, j.resource
        )
        .unwrap();
    }
    for (a, b) in &instance.precedences {
        writeln!(out, "prec {a} {b}").unwrap();
    }
    out
}

// ---------------------------------------------------------------------------
// Generator

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub machines: usize,
    pub precedence_probability: f64,
    pub resource_utilisation: f64,
    pub seed: u64,
    /// Inclusive range of jobs per machine; `(10, 11)` by default.
    pub jobs_per_machine: (usize, usize),
}

impl GenConfig {
    pub fn new(
        machines: usize,
        precedence_probability: f64,
        resource_utilisation: f64,
        seed: u64,
    ) -> Self {
        GenConfig {
            machines,
            precedence_probability,
            resource_utilisation,
            seed,
            jobs_per_machine: (10, 11),
        }
    }

    pub fn with_jobs_per_machine(mut self, min: usize, max: usize) -> Self {
        self.jobs_per_machine = (min, max);
        self
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        let invalid = |m: &str| Err(InstanceError::Invalid(m.into()));
        if self.machines < 1 {
            return invalid("machines must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.precedence_probability) {
            return invalid("precedence probability must lie in [0, 1]");
        }
        if !(self.resource_utilisation > 0.0 && self.resource_utilisation <= 1.0) {
            return invalid("resource utilisation must lie in (0, 1]");
        }
        let (lo, hi) = self.jobs_per_machine;
        if lo < 1 || lo > hi {
            return invalid("jobs per machine range must satisfy 1 <= min <= max");
        }
        Ok(())
    }
}

pub const GEN_RESOURCE_LIMIT: i64 = 10;
pub const GEN_MAX_PROCESSING: i64 = 12;
pub const GEN_MAX_WEIGHT: i64 = 10;

/// Random instance whose jobs are grouped by machine in id order.
pub fn generate_instance(config: &GenConfig) -> Result<Instance, InstanceError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let limit = GEN_RESOURCE_LIMIT;
    let max_demand =
        ((2.0 * config.resource_utilisation * limit as f64).round() as i64).clamp(1, limit);
    let (lo, hi) = config.jobs_per_machine;

    let mut jobs = Vec::new();
    let mut per_machine: Vec<Vec<usize>> = vec![Vec::new(); config.machines];
    for (m, ids) in per_machine.iter_mut().enumerate() {
        let count = rng.gen_range(lo..=hi);
        for _ in 0..count {
            let id = jobs.len();
            ids.push(id);
            jobs.push(Job {
                id,
                machine: m,
                release: 0,
                processing: rng.gen_range(1..=GEN_MAX_PROCESSING),
                due: 0,
                weight: Decimal::from_int(rng.gen_range(1..=GEN_MAX_WEIGHT)),
                resource: rng.gen_range(1..=max_demand),
            });
        }
    }
    let avg_processing = jobs.iter().map(|j| j.processing).sum::<i64>() as f64 / jobs.len() as f64;
    let max_release = (2.0 * avg_processing).round() as i64;
    for job in &mut jobs {
        job.release = rng.gen_range(0..=max_release);
        let slack: f64 = rng.gen_range(0.0..=2.0);
        job.due = job.release + (job.processing as f64 * (1.0 + slack)).round() as i64;
    }
    let mut precs = Vec::new();
    for ids in &per_machine {
        for (k, &a) in ids.iter().enumerate() {
            for &b in &ids[k + 1..] {
                if rng.gen_bool(config.precedence_probability) {
                    precs.push((a, b));
                }
            }
        }
    }
    Instance::new(config.machines, jobs, precs, limit, None)
}

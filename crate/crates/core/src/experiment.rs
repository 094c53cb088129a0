//! Comparison runs of solution methods over instance sets, reported per
//! instance and aggregated per machine count.
//!
//! `pct_optimal` counts rows whose status is OPTIMAL, i.e. optimality was
//! proved (always the case for the oracle).

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rayon::prelude::*;

use crate::construct::single_pass_construct;
use crate::cp::{solve, Model, ModelError, SolveStatus, SolverConfig};
use crate::decimal::Decimal;
use crate::instance::{total_weighted_tardiness, Instance};
use crate::oracle::{brute_force_optimum, OracleError, MAX_ORACLE_JOBS};
use crate::selector::Selector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// CP with the constant selector (lowest id breaks ties).
    DefaultCp,
    /// CP with the supplied selector as tie-breaker.
    CpSelector,
    /// Single-pass construction with the supplied selector.
    SinglePass,
    /// Brute-force optimum.
    Oracle,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::DefaultCp,
        Method::CpSelector,
        Method::SinglePass,
        Method::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::DefaultCp => "default",
            Method::CpSelector => "cp-selector",
            Method::SinglePass => "single-pass",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown method `{0}` (expected default, cp-selector, single-pass or oracle)")]
pub struct UnknownMethod(pub String);

impl FromStr for Method {
    type Err = UnknownMethod;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| UnknownMethod(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExperimentError {
    #[error("method `{0}` needs a selector")]
    MissingSelector(Method),
    #[error("instance `{id}`: {source}")]
    Oracle { id: String, source: OracleError },
    #[error("instance `{id}`: {source}")]
    Model { id: String, source: ModelError },
}

/// Single-pass selector: the supplied one, else the constant selector.
pub fn default_selector() -> Selector {
    Selector::constant()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub instance_id: String,
    pub machines: usize,
    pub jobs: usize,
    pub method: Method,
    pub objective: Option<Decimal>,
    pub status: SolveStatus,
    pub nodes: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregateRow {
    pub machines: usize,
    pub method: Method,
    /// Mean over rows that have an objective.
    pub mean_objective: Option<Ratio<i64>>,
    pub pct_optimal: Ratio<i64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub aggregates: Vec<AggregateRow>,
}

pub struct NamedInstance {
    pub id: String,
    pub instance: Instance,
}

fn run_cell(
    named: &NamedInstance,
    method: Method,
    selector: Option<&Selector>,
    config: &SolverConfig,
) -> Result<ReportRow, ExperimentError> {
    let inst = &named.instance;
    let started = Instant::now();
    let (objective, status, nodes) = match method {
        Method::DefaultCp | Method::CpSelector => {
            let model = Model::build(inst).map_err(|source| ExperimentError::Model {
                id: named.id.clone(),
                source,
            })?;
            let mut cfg = config.clone();
            cfg.selector = match method {
                Method::DefaultCp => Some(default_selector()),
                _ => Some(
                    selector
                        .ok_or(ExperimentError::MissingSelector(method))?
                        .clone(),
                ),
            };
            let res = solve(&model, &cfg);
            (res.best_objective, res.status, res.stats.nodes)
        }
        Method::SinglePass => {
            let sel = selector.cloned().unwrap_or_else(default_selector);
            let schedule = single_pass_construct(inst, &sel);
            (
                Some(total_weighted_tardiness(inst, &schedule)),
                SolveStatus::Feasible,
                0,
            )
        }
        Method::Oracle => {
            let r = brute_force_optimum(inst).map_err(|source| ExperimentError::Oracle {
                id: named.id.clone(),
                source,
            })?;
            (
                Some(r.optimal_objective),
                SolveStatus::Optimal,
                r.enumerated_count,
            )
        }
    };
    Ok(ReportRow {
        instance_id: named.id.clone(),
        machines: inst.machines(),
        jobs: inst.len(),
        method,
        objective,
        status,
        nodes,
        elapsed: started.elapsed(),
    })
}

/// One run per (instance, method), aggregated per machine count.
pub fn run_experiment(
    instances: &[NamedInstance],
    methods: &[Method],
    selector: Option<&Selector>,
    config: &SolverConfig,
) -> Result<ExperimentReport, ExperimentError> {
    if methods.contains(&Method::CpSelector) && selector.is_none() {
        return Err(ExperimentError::MissingSelector(Method::CpSelector));
    }
    if methods.contains(&Method::Oracle) {
        if let Some(big) = instances
            .iter()
            .find(|n| n.instance.len() > MAX_ORACLE_JOBS)
        {
            return Err(ExperimentError::Oracle {
                id: big.id.clone(),
                source: OracleError::TooLarge {
                    jobs: big.instance.len(),
                },
            });
        }
    }
    let cells: Vec<(&NamedInstance, Method)> = instances
        .iter()
        .flat_map(|n| methods.iter().map(move |&m| (n, m)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|(n, m)| run_cell(n, *m, selector, config))
        .collect::<Result<Vec<_>, _>>()?;
    let aggregates = aggregate(&rows, methods);
    Ok(ExperimentReport { rows, aggregates })
}

/// Per (machine count, method) means, in machine then method order.
pub fn aggregate(rows: &[ReportRow], methods: &[Method]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<usize, Vec<&ReportRow>> = BTreeMap::new();
    for r in rows {
        groups.entry(r.machines).or_default().push(r);
    }
    let mut out = Vec::new();
    for (machines, group) in groups {
        for &method in methods {
            let mine: Vec<&&ReportRow> = group.iter().filter(|r| r.method == method).collect();
            if mine.is_empty() {
                continue;
            }
            let objs: Vec<i64> = mine
                .iter()
                .filter_map(|r| r.objective.map(|o| o.hundredths()))
                .collect();
            let mean_objective = (!objs.is_empty())
                .then(|| Ratio::new(objs.iter().sum::<i64>(), 100 * objs.len() as i64));
            let optimal = mine
                .iter()
                .filter(|r| r.status == SolveStatus::Optimal)
                .count() as i64;
            out.push(AggregateRow {
                machines,
                method,
                mean_objective,
                pct_optimal: Ratio::new(100 * optimal, mine.len() as i64),
                n: mine.len(),
            });
        }
    }
    out
}

fn ratio_str(r: &Ratio<i64>) -> String {
    format!("{:.4}", *r.numer() as f64 / *r.denom() as f64)
}

pub const ROW_COLUMNS: [&str; 8] = [
    "instance_id",
    "machines",
    "jobs",
    "method",
    "objective",
    "status",
    "nodes",
    "elapsed_ms",
];
pub const AGGREGATE_COLUMNS: [&str; 5] =
    ["machines", "method", "mean_objective", "pct_optimal", "n"];

pub fn write_rows<W: io::Write>(rows: &[ReportRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ROW_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.instance_id.clone(),
            r.machines.to_string(),
            r.jobs.to_string(),
            r.method.to_string(),
            r.objective.map(|o| o.to_string()).unwrap_or_default(),
            r.status.to_string(),
            r.nodes.to_string(),
            r.elapsed.as_millis().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_aggregates<W: io::Write>(rows: &[AggregateRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AGGREGATE_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.machines.to_string(),
            r.method.to_string(),
            r.mean_objective.as_ref().map(ratio_str).unwrap_or_default(),
            ratio_str(&r.pct_optimal),
            r.n.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_instance, GenConfig};

    fn tiny(seed: u64) -> NamedInstance {
        let instance =
            generate_instance(&GenConfig::new(2, 0.3, 0.5, seed).with_jobs_per_machine(2, 3))
                .unwrap();
        NamedInstance {
            id: format!("tiny{seed}"),
            instance,
        }
    }

    #[test]
    fn shape_of_a_small_report() {
        let insts = [tiny(1)];
        let rep = run_experiment(
            &insts,
            &[Method::DefaultCp, Method::SinglePass],
            None,
            &SolverConfig::with_budget(1000),
        )
        .unwrap();
        assert_eq!(rep.rows.len(), 2);
        assert_eq!(rep.aggregates.len(), 2);
        assert_eq!(rep.rows[0].method, Method::DefaultCp);
        assert_eq!(rep.rows[1].method, Method::SinglePass);
    }

    #[test]
    fn oracle_is_always_optimal_and_matches_cp() {
        let insts: Vec<_> = (0..5).map(tiny).collect();
        let rep = run_experiment(
            &insts,
            &[Method::DefaultCp, Method::Oracle],
            None,
            &SolverConfig::with_budget(100_000),
        )
        .unwrap();
        let oracle = rep
            .aggregates
            .iter()
            .find(|a| a.method == Method::Oracle)
            .unwrap();
        assert_eq!(oracle.pct_optimal, Ratio::from_integer(100));
        for pair in rep.rows.chunks(2) {
            assert_eq!(pair[0].objective, pair[1].objective);
        }
    }

    #[test]
    fn aggregates_recompute_from_rows() {
        let insts: Vec<_> = (0..4).map(tiny).collect();
        let methods = [Method::DefaultCp, Method::SinglePass];
        let rep = run_experiment(&insts, &methods, None, &SolverConfig::with_budget(50)).unwrap();
        assert_eq!(aggregate(&rep.rows, &methods), rep.aggregates);
        let sp = rep
            .aggregates
            .iter()
            .find(|a| a.method == Method::SinglePass)
            .unwrap();
        let total: i64 = rep
            .rows
            .iter()
            .filter(|r| r.method == Method::SinglePass)
            .map(|r| r.objective.unwrap().hundredths())
            .sum();
        assert_eq!(sp.mean_objective, Some(Ratio::new(total, 400)));
    }

    #[test]
    fn errors() {
        let insts = [tiny(2)];
        assert!(matches!(
            run_experiment(
                &insts,
                &[Method::CpSelector],
                None,
                &SolverConfig::default()
            ),
            Err(ExperimentError::MissingSelector(_))
        ));
        let big = [NamedInstance {
            id: "big".into(),
            instance: generate_instance(&GenConfig::new(2, 0.3, 0.5, 1)).unwrap(),
        }];
        assert!(matches!(
            run_experiment(&big, &[Method::Oracle], None, &SolverConfig::default()),
            Err(ExperimentError::Oracle { .. })
        ));
        assert!("bogus".parse::<Method>().is_err());
        assert_eq!("single-pass".parse::<Method>().unwrap(), Method::SinglePass);
    }

    #[test]
    fn csv_headers() {
        let mut buf = Vec::new();
        write_rows(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "instance_id,machines,jobs,method,objective,status,nodes,elapsed_ms\n"
        );
        let mut buf = Vec::new();
        write_aggregates(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "machines,method,mean_objective,pct_optimal,n\n"
        );
    }
}

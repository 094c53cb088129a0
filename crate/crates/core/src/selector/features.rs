use super::tree::Terminal;
use crate::instance::Instance;

/// Terminal values of one job, indexed by [`Terminal`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector([f64; 10]);

impl FeatureVector {
    pub fn new(values: [f64; 10]) -> Self {
        FeatureVector(values)
    }

    pub fn get(&self, t: Terminal) -> f64 {
        self.0[t.index()]
    }

    pub fn set(&mut self, t: Terminal, v: f64) {
        self.0[t.index()] = v;
    }

    pub fn values(&self) -> &[f64; 10] {
        &self.0
    }
}

/// Static per-job features. Precedence counts and workloads use direct
/// neighbours only.
pub fn extract_features(instance: &Instance) -> Vec<FeatureVector> {
    let jobs = instance.jobs();
    let mut workload = vec![0i64; instance.machines()];
    for j in jobs {
        workload[j.machine] += j.processing;
    }
    let max_workload = workload.iter().copied().max().unwrap_or(0);
    let mut n_prec = vec![0i64; jobs.len()];
    let mut n_suc = vec![0i64; jobs.len()];
    let mut wl_prec = vec![0i64; jobs.len()];
    let mut wl_suc = vec![0i64; jobs.len()];
    for &(a, b) in instance.precedences() {
        n_prec[b] += 1;
        wl_prec[b] += jobs[a].processing;
        n_suc[a] += 1;
        wl_suc[a] += jobs[b].processing;
    }
    jobs.iter()
        .map(|j| {
            FeatureVector([
                j.release as f64,
                j.processing as f64,
                j.weight.to_f64(),
                j.due as f64,
                workload[j.machine] as f64,
                max_workload as f64,
                n_prec[j.id] as f64,
                n_suc[j.id] as f64,
                wl_prec[j.id] as f64,
                wl_suc[j.id] as f64,
            ])
        })
        .collect()
}

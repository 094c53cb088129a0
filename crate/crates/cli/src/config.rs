//! Effective run configuration: command line over config file over
//! defaults, as a flat table of string values parsed on use.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::CliError;

/// Every recognised key with its default; an empty default means unset.
pub const KEYS: &[(&str, &str)] = &[
    ("seed", "0"),
    ("node_budget", "50000"),
    ("time_budget_ms", ""),
    ("threads", ""),
    // gen
    ("count", "1"),
    ("machines", "4"),
    ("precedence_probability", "0.3"),
    ("resource_utilisation", "0.5"),
    ("jobs_per_machine_min", "10"),
    ("jobs_per_machine_max", "11"),
    ("out_dir", "."),
    // solve
    ("instance", ""),
    ("selector", ""),
    ("schedule_out", ""),
    // train
    ("train_dir", ""),
    ("small_dir", ""),
    ("selector_out", "selector.txt"),
    ("log_out", "training.csv"),
    ("population_size", "50"),
    ("generations", "20"),
    ("tournament_size", "5"),
    ("crossover_rate", "0.9"),
    ("mutation_rate", "0.1"),
    ("max_depth", "7"),
    ("intermediate_factor", "2"),
    ("sample_size", "3"),
    ("preselect_count", "2"),
    // bench
    ("instances_dir", ""),
    ("methods", "default"),
    ("rows_out", "report.csv"),
    ("aggregate_out", "aggregate.csv"),
];

pub const THREADS_ENV: &str = "GCP_RCJS_THREADS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    values: BTreeMap<&'static str, String>,
}

fn known(key: &str) -> Option<&'static str> {
    KEYS.iter().map(|(k, _)| *k).find(|k| *k == key)
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            values: KEYS.iter().map(|(k, v)| (*k, v.to_string())).collect(),
        }
    }
}

impl RunConfig {
    /// Applies a `key = value` file; `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> Result<(), CliError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected `key = value`", idx + 1))
            })?;
            let key = key.trim();
            let name = known(key).ok_or_else(|| {
                CliError::Usage(format!("config line {}: unknown key `{key}`", idx + 1))
            })?;
            self.values.insert(name, value.trim().to_string());
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        let name = known(key).unwrap_or_else(|| panic!("unregistered key `{key}`"));
        self.values.insert(name, value.into());
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values
            .get(key)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("unregistered key `{key}`"))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, CliError>
    where
        T::Err: fmt::Display,
    {
        let raw = self.raw(key);
        raw.parse()
            .map_err(|e| CliError::Usage(format!("{key} = `{raw}`: {e}")))
    }

    pub fn optional<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        if self.raw(key).is_empty() {
            Ok(None)
        } else {
            self.get(key).map(Some)
        }
    }

    pub fn required(&self, key: &str) -> Result<&str, CliError> {
        match self.raw(key) {
            "" => Err(CliError::Usage(format!("missing required `{key}`"))),
            v => Ok(v),
        }
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, _) in KEYS {
            writeln!(f, "{k} = {}", self.values[k])?;
        }
        Ok(())
    }
}

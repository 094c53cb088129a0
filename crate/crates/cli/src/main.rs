mod commands;
mod config;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{RunConfig, THREADS_ENV};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Parse(String),
    #[error("no solution found")]
    NoSolution,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::NoSolution => 2,
            CliError::Io(_) | CliError::Parse(_) => 3,
        }
    }
}

/// Constraint programming with evolved variable selectors for
/// resource-constrained job scheduling.
#[derive(Debug, Parser)]
#[command(name = "gcp-rcjs", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Search nodes per solve, the root included.
    #[arg(long, global = true)]
    node_budget: Option<String>,
    /// Optional wall-clock cap per solve; makes results timing dependent.
    #[arg(long, global = true)]
    time_budget_ms: Option<String>,
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Worker threads (default: GCP_RCJS_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<String>,
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate random instances.
    Gen {
        #[arg(long)]
        count: Option<String>,
        #[arg(long)]
        machines: Option<String>,
        #[arg(long = "prob")]
        precedence_probability: Option<String>,
        #[arg(long = "util")]
        resource_utilisation: Option<String>,
        #[arg(long = "jobs-min")]
        jobs_per_machine_min: Option<String>,
        #[arg(long = "jobs-max")]
        jobs_per_machine_max: Option<String>,
        #[arg(long)]
        out_dir: Option<String>,
    },
    /// Solve one instance and print `status objective nodes elapsed_ms`.
    Solve {
        instance: Option<String>,
        /// Selector file; the last selector in it is used.
        #[arg(long)]
        selector: Option<String>,
        /// Write the schedule as `start <job> <time>` lines.
        #[arg(long)]
        schedule_out: Option<String>,
    },
    /// Evolve a selector.
    Train {
        #[arg(long)]
        train_dir: Option<String>,
        #[arg(long)]
        small_dir: Option<String>,
        #[arg(long = "out")]
        selector_out: Option<String>,
        #[arg(long = "log")]
        log_out: Option<String>,
        #[arg(long)]
        population_size: Option<String>,
        #[arg(long)]
        generations: Option<String>,
        #[arg(long)]
        tournament_size: Option<String>,
        #[arg(long)]
        crossover_rate: Option<String>,
        #[arg(long)]
        mutation_rate: Option<String>,
        #[arg(long)]
        max_depth: Option<String>,
        #[arg(long)]
        intermediate_factor: Option<String>,
        #[arg(long)]
        sample_size: Option<String>,
        #[arg(long)]
        preselect_count: Option<String>,
    },
    /// Compare methods over a directory of instances.
    Bench {
        #[arg(long)]
        instances_dir: Option<String>,
        /// Comma-separated: default, cp-selector, single-pass, oracle.
        #[arg(long)]
        methods: Option<String>,
        #[arg(long)]
        selector: Option<String>,
        #[arg(long = "out")]
        rows_out: Option<String>,
        #[arg(long)]
        aggregate_out: Option<String>,
    },
}

impl Command {
    fn overrides(self) -> Vec<(&'static str, Option<String>)> {
        match self {
            Command::Gen {
                count,
                machines,
                precedence_probability,
                resource_utilisation,
                jobs_per_machine_min,
                jobs_per_machine_max,
                out_dir,
            } => vec![
                ("count", count),
                ("machines", machines),
                ("precedence_probability", precedence_probability),
                ("resource_utilisation", resource_utilisation),
                ("jobs_per_machine_min", jobs_per_machine_min),
                ("jobs_per_machine_max", jobs_per_machine_max),
                ("out_dir", out_dir),
            ],
            Command::Solve {
                instance,
                selector,
                schedule_out,
            } => {
                vec![
                    ("instance", instance),
                    ("selector", selector),
                    ("schedule_out", schedule_out),
                ]
            }
            Command::Train {
                train_dir,
                small_dir,
                selector_out,
                log_out,
                population_size,
                generations,
                tournament_size,
                crossover_rate,
                mutation_rate,
                max_depth,
                intermediate_factor,
                sample_size,
                preselect_count,
            } => vec![
                ("train_dir", train_dir),
                ("small_dir", small_dir),
                ("selector_out", selector_out),
                ("log_out", log_out),
                ("population_size", population_size),
                ("generations", generations),
                ("tournament_size", tournament_size),
                ("crossover_rate", crossover_rate),
                ("mutation_rate", mutation_rate),
                ("max_depth", max_depth),
                ("intermediate_factor", intermediate_factor),
                ("sample_size", sample_size),
                ("preselect_count", preselect_count),
            ],
            Command::Bench {
                instances_dir,
                methods,
                selector,
                rows_out,
                aggregate_out,
            } => vec![
                ("instances_dir", instances_dir),
                ("methods", methods),
                ("selector", selector),
                ("rows_out", rows_out),
                ("aggregate_out", aggregate_out),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Gen,
    Solve,
    Train,
    Bench,
}

fn effective_config(common: Common, command: Command) -> Result<(RunConfig, Kind, bool), CliError> {
    let kind = match command {
        Command::Gen { .. } => Kind::Gen,
        Command::Solve { .. } => Kind::Solve,
        Command::Train { .. } => Kind::Train,
        Command::Bench { .. } => Kind::Bench,
    };
    let mut config = RunConfig::default();
    if let Ok(threads) = std::env::var(THREADS_ENV) {
        config.set("threads", threads);
    }
    if let Some(path) = &common.config {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
        config.apply_file(&text)?;
    }
    let mut overrides = vec![
        ("seed", common.seed),
        ("node_budget", common.node_budget),
        ("time_budget_ms", common.time_budget_ms),
        ("threads", common.threads),
    ];
    overrides.extend(command.overrides());
    for (key, value) in overrides {
        if let Some(v) = value {
            config.set(key, v);
        }
    }
    Ok((config, kind, common.print_config))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (config, kind, print_config) = effective_config(cli.common, cli.command)?;
    if print_config {
        print!("{config}");
        return Ok(());
    }
    if let Some(threads) = config.optional::<usize>("threads")? {
        if threads == 0 {
            return Err(CliError::Usage("threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match kind {
        Kind::Gen => commands::gen(&config),
        Kind::Solve => commands::solve(&config),
        Kind::Train => commands::train(&config),
        Kind::Bench => commands::bench(&config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::NoSolution) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rcjs_core::experiment::{
    run_experiment, write_aggregates, write_rows, ExperimentError, Method, NamedInstance,
};
use rcjs_core::gp::{evolve, fitness_to_f64, write_log, GpConfig};
use rcjs_core::instance::{format_instance, generate_instance, parse_instance};
use rcjs_core::selector::{format_selector, format_selector_file, parse_selector_file};
use rcjs_core::{GenConfig, Instance, Model, Selector, SolveStatus, SolverConfig};

use crate::config::RunConfig;
use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<fs::File, CliError> {
    fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    parse_instance(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// `.txt` files in `dir`, sorted by name.
fn instance_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry
            .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?
            .path();
        if path.is_file() && path.extension().is_some_and(|x| x == "txt") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn load_dir(key: &str, config: &RunConfig) -> Result<Vec<(String, Instance)>, CliError> {
    let dir = Path::new(config.required(key)?);
    let files = instance_files(dir)?;
    if files.is_empty() {
        return Err(CliError::Usage(format!(
            "{key} `{}` holds no .txt instances",
            dir.display()
        )));
    }
    files
        .iter()
        .map(|p| {
            let id = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok((id, load_instance(p)?))
        })
        .collect()
}

/// The last selector of the file named by `selector`, if any.
fn load_selector(config: &RunConfig) -> Result<Option<Selector>, CliError> {
    let Some(path) = config.optional::<String>("selector")? else {
        return Ok(None);
    };
    let path = Path::new(&path);
    let selectors = parse_selector_file(&read(path)?)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    match selectors.into_iter().last() {
        Some(s) => Ok(Some(s)),
        None => Err(CliError::Parse(format!("{}: no selector", path.display()))),
    }
}

fn solver_config(config: &RunConfig) -> Result<SolverConfig, CliError> {
    let budget: u64 = config.get("node_budget")?;
    if budget == 0 {
        return Err(CliError::Usage("node_budget must be at least 1".into()));
    }
    let mut solver = SolverConfig::with_budget(budget);
    solver.time_budget = config
        .optional::<u64>("time_budget_ms")?
        .map(Duration::from_millis);
    solver.seed = config.get("seed")?;
    Ok(solver)
}

pub fn instance_file_name(cfg: &GenConfig) -> String {
    format!(
        "rcjs_m{}_p{}_u{}_s{}.txt",
        cfg.machines, cfg.precedence_probability, cfg.resource_utilisation, cfg.seed
    )
}

pub fn gen(config: &RunConfig) -> Result<(), CliError> {
    let count: u64 = config.get("count")?;
    let seed: u64 = config.get("seed")?;
    let base = GenConfig::new(
        config.get("machines")?,
        config.get("precedence_probability")?,
        config.get("resource_utilisation")?,
        seed,
    )
    .with_jobs_per_machine(
        config.get("jobs_per_machine_min")?,
        config.get("jobs_per_machine_max")?,
    );
    base.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let out_dir = Path::new(config.raw("out_dir"));
    fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    for s in seed..seed + count {
        let cfg = GenConfig {
            seed: s,
            ..base.clone()
        };
        let inst = generate_instance(&cfg).map_err(|e| CliError::Usage(e.to_string()))?;
        let path = out_dir.join(instance_file_name(&cfg));
        write(&path, format_instance(&inst))?;
        println!("{}", path.display());
    }
    Ok(())
}

pub fn solve_cmd_line(
    status: SolveStatus,
    objective: Option<String>,
    nodes: u64,
    elapsed: Duration,
) -> String {
    format!(
        "{status} {} {nodes} {}",
        objective.unwrap_or_else(|| "-".into()),
        elapsed.as_millis()
    )
}

pub fn solve(config: &RunConfig) -> Result<(), CliError> {
    let path = PathBuf::from(config.required("instance")?);
    let inst = load_instance(&path)?;
    let selector = load_selector(config)?;
    let mut solver = solver_config(config)?;
    solver.selector = selector;
    let started = Instant::now();
    let res = match Model::build(&inst) {
        Ok(model) => rcjs_core::solve(&model, &solver),
        Err(e) => {
            eprintln!("{e}");
            println!(
                "{}",
                solve_cmd_line(SolveStatus::Infeasible, None, 0, started.elapsed())
            );
            return Err(CliError::NoSolution);
        }
    };
    println!(
        "{}",
        solve_cmd_line(
            res.status,
            res.best_objective.map(|o| o.to_string()),
            res.stats.nodes,
            res.stats.elapsed
        )
    );
    if let (Some(out), Some(schedule)) = (
        config.optional::<String>("schedule_out")?,
        &res.best_schedule,
    ) {
        let text: String = schedule
            .starts
            .iter()
            .enumerate()
            .map(|(j, s)| format!("start {j} {s}\n"))
            .collect();
        write(Path::new(&out), text)?;
    }
    if res.status.has_solution() {
        Ok(())
    } else {
        Err(CliError::NoSolution)
    }
}

pub fn gp_config(config: &RunConfig) -> Result<GpConfig, CliError> {
    let gp = GpConfig {
        population_size: config.get("population_size")?,
        generations: config.get("generations")?,
        tournament_size: config.get("tournament_size")?,
        crossover_rate: config.get("crossover_rate")?,
        mutation_rate: config.get("mutation_rate")?,
        max_depth: config.get("max_depth")?,
        intermediate_factor: config.get("intermediate_factor")?,
        sample_size: config.get("sample_size")?,
        preselect_instance_count: config.get("preselect_count")?,
        node_budget: config.get("node_budget")?,
        time_budget: config
            .optional::<u64>("time_budget_ms")?
            .map(Duration::from_millis),
        seed: config.get("seed")?,
    };
    gp.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(gp)
}

pub fn train(config: &RunConfig) -> Result<(), CliError> {
    let gp = gp_config(config)?;
    let training: Vec<Instance> = load_dir("train_dir", config)?
        .into_iter()
        .map(|(_, i)| i)
        .collect();
    let small: Vec<Instance> = load_dir("small_dir", config)?
        .into_iter()
        .map(|(_, i)| i)
        .collect();
    let state = evolve(&gp, &training, &small).map_err(|e| CliError::Usage(e.to_string()))?;

    let history: Vec<Selector> = state
        .best_history
        .iter()
        .map(|r| r.selector.clone())
        .collect();
    write(
        Path::new(config.raw("selector_out")),
        format_selector_file(&history),
    )?;
    let log_path = Path::new(config.raw("log_out"));
    write_log(&state.log, create(log_path)?)
        .map_err(|e| CliError::Io(format!("{}: {e}", log_path.display())))?;
    let best = state
        .best
        .full_fitness
        .map(|f| fitness_to_f64(&f))
        .unwrap_or(f64::NAN);
    println!("best {best:.4} {}", format_selector(&state.best.selector));
    Ok(())
}

pub fn bench(config: &RunConfig) -> Result<(), CliError> {
    let methods = config
        .raw("methods")
        .split(',')
        .map(|m| {
            m.trim()
                .parse::<Method>()
                .map_err(|e| CliError::Usage(e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let solver = solver_config(config)?;
    let selector = load_selector(config)?;
    let instances: Vec<NamedInstance> = load_dir("instances_dir", config)?
        .into_iter()
        .map(|(id, instance)| NamedInstance { id, instance })
        .collect();
    let report =
        run_experiment(&instances, &methods, selector.as_ref(), &solver).map_err(|e| match e {
            ExperimentError::Model { .. } => CliError::Parse(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        })?;
    let rows_path = Path::new(config.raw("rows_out"));
    write_rows(&report.rows, create(rows_path)?)
        .map_err(|e| CliError::Io(format!("{}: {e}", rows_path.display())))?;
    let agg_path = Path::new(config.raw("aggregate_out"));
    write_aggregates(&report.aggregates, create(agg_path)?)
        .map_err(|e| CliError::Io(format!("{}: {e}", agg_path.display())))?;
    println!(
        "{} rows, {} aggregates",
        report.rows.len(),
        report.aggregates.len()
    );
    Ok(())
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn gcp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcp-rcjs"))
        .args(args)
        .env_remove("GCP_RCJS_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn gen(dir: &Path, machines: &str, count: &str, seed: &str, extra: &[&str]) {
    let mut args = vec![
        "gen",
        "--count",
        count,
        "--machines",
        machines,
        "--seed",
        seed,
        "--out-dir",
        p(dir),
    ];
    args.extend_from_slice(extra);
    let o = gcp(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn gen_names_files_and_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    gen(tmp.path(), "4", "3", "7", &[]);
    let mut names: Vec<String> = fs::read_dir(tmp.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "rcjs_m4_p0.3_u0.5_s7.txt",
            "rcjs_m4_p0.3_u0.5_s8.txt",
            "rcjs_m4_p0.3_u0.5_s9.txt"
        ]
    );
    let first = fs::read_to_string(tmp.path().join(&names[0])).unwrap();
    gen(tmp.path(), "4", "3", "7", &[]);
    assert_eq!(
        fs::read_to_string(tmp.path().join(&names[0])).unwrap(),
        first
    );
    for n in &names {
        rcjs_core::instance::parse_instance(&fs::read_to_string(tmp.path().join(n)).unwrap())
            .unwrap();
    }
}

#[test]
fn gen_rejects_zero_utilisation() {
    let tmp = TempDir::new().unwrap();
    let o = gcp(&["gen", "--util", "0", "--out-dir", p(tmp.path())]);
    assert_eq!(code(&o), 1);
}

#[test]
fn solve_tiny_instance_is_optimal_and_writes_schedule() {
    let tmp = TempDir::new().unwrap();
    let inst = tmp.path().join("two.txt");
    // p = (5, 1), d = (6, 1), w = (1, 10): job 1 first, both on time
    fs::write(
        &inst,
        "machines 1\nresource 1\njobs 2\njob 0 0 0 5 6 1 0\njob 1 0 0 1 1 10 0\n",
    )
    .unwrap();
    let sched = tmp.path().join("s.txt");
    let o = gcp(&["solve", p(&inst), "--schedule-out", p(&sched)]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o);
    let fields: Vec<&str> = line.split_whitespace().collect();
    assert_eq!(&fields[..2], ["OPTIMAL", "0"]);
    assert_eq!(fields.len(), 4);
    assert_eq!(
        fs::read_to_string(&sched).unwrap(),
        "start 0 1\nstart 1 0\n"
    );
}

#[test]
fn solve_errors_and_budget_exit_codes() {
    let tmp = TempDir::new().unwrap();
    gen(tmp.path(), "4", "1", "3", &[]);
    let inst = tmp.path().join("rcjs_m4_p0.3_u0.5_s3.txt");
    let missing = tmp.path().join("nope.sel");
    assert_eq!(
        code(&gcp(&["solve", p(&inst), "--selector", p(&missing)])),
        3
    );
    let bad = tmp.path().join("bad.txt");
    fs::write(&bad, "machines x\n").unwrap();
    assert_eq!(code(&gcp(&["solve", p(&bad)])), 3);
    let o = gcp(&["solve", p(&inst), "--node-budget", "1"]);
    let status = stdout(&o).split_whitespace().next().unwrap().to_string();
    assert!(
        code(&o) == 2 || status == "FEASIBLE",
        "{status} {}",
        code(&o)
    );
    assert_eq!(code(&gcp(&["solve", p(&inst), "--node-budget", "lots"])), 1);
    assert_eq!(code(&gcp(&["solve", p(&inst), "--bogus"])), 1);
}

#[test]
fn config_file_precedence_and_print() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.conf");
    fs::write(&cfg, "# settings\nseed = 5\nmachines = 3\n").unwrap();
    let o = gcp(&[
        "gen",
        "--config",
        p(&cfg),
        "--machines",
        "2",
        "--print-config",
    ]);
    assert_eq!(code(&o), 0);
    let dump = stdout(&o);
    assert!(dump.contains("seed = 5\n"));
    assert!(dump.contains("machines = 2\n"));
    assert!(dump.contains("node_budget = 50000\n"));
    fs::write(&cfg, "unknown_key = 1\n").unwrap();
    assert_eq!(code(&gcp(&["gen", "--config", p(&cfg)])), 1);
}

#[test]
fn train_zero_generations_and_determinism() {
    let tmp = TempDir::new().unwrap();
    let train = tmp.path().join("train");
    let small = tmp.path().join("small");
    gen(
        &train,
        "2",
        "3",
        "1",
        &["--jobs-min", "3", "--jobs-max", "4"],
    );
    gen(
        &small,
        "2",
        "2",
        "50",
        &["--jobs-min", "2", "--jobs-max", "3"],
    );
    let run = |gens: &str, tag: &str| {
        let sel = tmp.path().join(format!("{tag}.sel"));
        let log = tmp.path().join(format!("{tag}.csv"));
        let o = gcp(&[
            "train",
            "--train-dir",
            p(&train),
            "--small-dir",
            p(&small),
            "--out",
            p(&sel),
            "--log",
            p(&log),
            "--population-size",
            "6",
            "--generations",
            gens,
            "--sample-size",
            "2",
            "--node-budget",
            "300",
            "--seed",
            "4",
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        (
            fs::read_to_string(sel).unwrap(),
            fs::read_to_string(log).unwrap(),
        )
    };
    let (sel0, log0) = run("0", "zero");
    assert_eq!(
        rcjs_core::selector::parse_selector_file(&sel0)
            .unwrap()
            .len(),
        1
    );
    assert_eq!(log0.lines().count(), 1);

    let strip = |csv: &str| -> Vec<String> {
        csv.lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    let (sel_a, log_a) = run("3", "a");
    let (sel_b, log_b) = run("3", "b");
    assert_eq!(sel_a, sel_b);
    assert_eq!(strip(&log_a), strip(&log_b));
    assert_eq!(log_a.lines().count(), 4);
    let best: Vec<f64> = log_a
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert!(best.windows(2).all(|w| w[1] <= w[0]));

    // the trained selector drives solve
    let inst = fs::read_dir(&train)
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    let o = gcp(&[
        "solve",
        p(&inst),
        "--selector",
        p(&tmp.path().join("a.sel")),
    ]);
    assert_eq!(code(&o), 0);

    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert_eq!(
        code(&gcp(&[
            "train",
            "--train-dir",
            p(&empty),
            "--small-dir",
            p(&small)
        ])),
        1
    );
}

#[test]
fn bench_reports_and_rejects_unknown_methods() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("suite");
    gen(
        &dir,
        "2",
        "4",
        "11",
        &["--jobs-min", "2", "--jobs-max", "3"],
    );
    let rows = tmp.path().join("rows.csv");
    let agg = tmp.path().join("agg.csv");
    let args = [
        "bench",
        "--instances-dir",
        p(&dir),
        "--methods",
        "default,oracle,single-pass",
        "--out",
        p(&rows),
        "--aggregate-out",
        p(&agg),
    ];
    let o = gcp(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows_text = fs::read_to_string(&rows).unwrap();
    assert_eq!(rows_text.lines().count(), 1 + 4 * 3);
    let agg_text = fs::read_to_string(&agg).unwrap();
    let lines: Vec<&str> = agg_text.lines().collect();
    assert_eq!(lines[0], "machines,method,mean_objective,pct_optimal,n");
    let by_method = |m: &str| {
        lines
            .iter()
            .find(|l| l.split(',').nth(1) == Some(m))
            .unwrap()
            .split(',')
            .map(String::from)
            .collect::<Vec<_>>()
    };
    assert_eq!(by_method("default")[3], "100.0000");
    assert_eq!(by_method("oracle")[3], "100.0000");
    assert_eq!(by_method("default")[2], by_method("oracle")[2]);

    let agg_first = agg_text.clone();
    assert_eq!(code(&gcp(&args)), 0);
    assert_eq!(fs::read_to_string(&agg).unwrap(), agg_first);

    assert_eq!(
        code(&gcp(&[
            "bench",
            "--instances-dir",
            p(&dir),
            "--methods",
            "magic"
        ])),
        1
    );
    assert_eq!(
        code(&gcp(&[
            "bench",
            "--instances-dir",
            p(&dir),
            "--methods",
            "cp-selector"
        ])),
        1
    );
}

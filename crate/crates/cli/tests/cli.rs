use std::path::Path;
use std::process::{Command, Output};

fn uavnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uavnet")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn records(csv_text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(csv_text.as_bytes()).records().map(Result::unwrap).collect()
}

#[test]
fn coverage_prints_one_row_per_engine() {
    let out = uavnet(&[
        "coverage",
        "--set",
        "deployment.height_m=80",
        "--set",
        "sweep.engines=[\"analytic\", \"monte-carlo\"]",
        "--set",
        "simulation.trials=2000",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with("axis_value,strategy,engine,coverage,coverage_ci95,se,se_ci95,n_trials,seed,wall_time_s"));
    let rows = records(&text);
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(&r[0], "80.0");
        let coverage: f64 = r[3].parse().unwrap();
        let ci: f64 = r[4].parse().unwrap();
        assert!((0.0..=1.0).contains(&coverage));
        assert!(ci >= 0.0);
    }
    assert_eq!(&rows[1][7], "2000");
}

#[test]
fn invalid_parameters_exit_with_status_one() {
    let out = uavnet(&["coverage", "--set", "environment.built_up_fraction=1.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("delta"));

    let out = uavnet(&["coverage", "--set", "deployment.colour=\"red\""]);
    assert_eq!(out.status.code(), Some(1));

    let out = uavnet(&["sweep", "--set", "sweep.strategies=[\"kmeans\"]"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unreadable_config_is_reported() {
    let out = uavnet(&["coverage", "--config", "/nonexistent/uavnet.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/uavnet.toml"));
}

fn run_sweep_to(dir: &Path, name: &str, config: &Path) -> (String, std::path::PathBuf) {
    let csv = dir.join(name);
    let out = uavnet(&["sweep", "--config", config.to_str().unwrap(), "--output", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = dir.join(format!("{}.manifest.toml", name.trim_end_matches(".csv")));
    (std::fs::read_to_string(&csv).unwrap(), manifest)
}

fn without_wall_time(text: &str) -> Vec<String> {
    text.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
}

#[test]
fn manifest_reproduces_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "[radio]\nthreshold = \"3 dB\"\n\
         [sweep]\naxis = \"density\"\nvalues = [2, 8]\nengines = [\"analytic\", \"monte-carlo\"]\n\
         strategies = [\"hotspot-center\", \"uniform-ppp\"]\n\
         [simulation]\ntrials = 1000\nseed = 5\n",
    )
    .unwrap();
    let (first, manifest) = run_sweep_to(dir.path(), "first.csv", &config);
    assert_eq!(records(&first).len(), 8);
    let manifest_text = std::fs::read_to_string(&manifest).unwrap();
    assert!(manifest_text.contains("[manifest]"));

    let (second, _) = run_sweep_to(dir.path(), "second.csv", &manifest);
    assert_eq!(without_wall_time(&first), without_wall_time(&second));
}

#[test]
fn compare_runs_every_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cmp.csv");
    let out = uavnet(&[
        "compare",
        "--set",
        "sweep.values=[60]",
        "--set",
        "simulation.trials=500",
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = records(&std::fs::read_to_string(&csv).unwrap());
    let strategies: Vec<&str> = rows.iter().map(|r| r.get(1).unwrap()).collect();
    assert_eq!(strategies, ["hotspot-center", "uniform-ppp", "rect-grid", "kmeans"]);
    assert!(rows.iter().all(|r| &r[2] == "monte-carlo"));
}

#[test]
fn optimum_reports_a_swept_interval_height() {
    let out = uavnet(&["optimum", "--set", "sweep.start=20", "--set", "sweep.stop=120", "--set", "sweep.step=20"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = records(&stdout(&out));
    assert_eq!(rows.len(), 1);
    let h: f64 = rows[0][2].parse().unwrap();
    assert!((20.0..=120.0).contains(&h));
    assert_eq!(&rows[0][4], "false");
}

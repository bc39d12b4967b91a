mod common;

use std::path::Path;
use std::process::{Command, Output};

fn civicroute(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_civicroute"))
        .args(args)
        .env_remove(civicroute::cli::OUT_ENV)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn cluster() -> String {
    common::shipped_scenario("pollution_cluster.toml").display().to_string()
}

#[test]
fn simulate_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = civicroute(&["simulate", "--scenario", &cluster(), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for f in ["metrics.csv", "segments.csv", "run.meta"] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    let metrics = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    let mut lines = metrics.lines();
    assert_eq!(lines.next(), Some(civicroute::report::METRICS_HEADER));
    assert_eq!(lines.count(), 10);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("final_eta"));
}

#[test]
fn seed_override_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let out = civicroute(&["simulate", "--scenario", &cluster(), "--seed", "12345", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let meta = std::fs::read_to_string(dir.path().join("run.meta")).unwrap();
    assert!(meta.contains("seed = 12345"));
    assert!(meta.contains("seed_source = command_line"));
    assert!(meta.contains("scenario_sha256 = "));
}

#[test]
fn different_seeds_change_demand() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    civicroute(&["simulate", "--scenario", &cluster(), "--seed", "1", "--out", s(&a)]);
    civicroute(&["simulate", "--scenario", &cluster(), "--seed", "2", "--out", s(&b)]);
    let read = |d: &Path| std::fs::read(d.join("metrics.csv")).unwrap();
    assert_ne!(read(&a), read(&b));
}

#[test]
fn missing_scenario_exits_one_and_names_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    let out = civicroute(&["simulate", "--scenario", s(&missing), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("nope.toml"));
}

#[test]
fn invalid_scenario_reports_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(cluster()).unwrap().replace("threshold_k = 60.0", "threshold_k = -5.0");
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, text).unwrap();
    let out = civicroute(&["simulate", "--scenario", s(&path), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("food.threshold_k"), "{}", stderr(&out));
}

#[test]
fn unknown_flag_and_missing_command_exit_one() {
    assert_eq!(civicroute(&["simulate", "--bogus"]).status.code(), Some(1));
    assert_eq!(civicroute(&[]).status.code(), Some(1));
    assert_eq!(civicroute(&["--help"]).status.code(), Some(0));
}

#[test]
fn print_defaults_lists_parameters() {
    let out = civicroute(&["--print-defaults"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["wear.epsilon", "food.threshold_k", "pollution.sample_spacing"] {
        assert!(text.contains(key), "{key} missing from\n{text}");
    }
}

#[test]
fn compare_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = s(dir.path());
    let sc = cluster();
    let cases: [&[&str]; 4] = [
        &["compare", "--scenario", &sc, "--policies", "time", "--baseline", "time", "--out", o],
        &["compare", "--scenario", &sc, "--policies", "time,time", "--baseline", "time", "--out", o],
        &["compare", "--scenario", &sc, "--policies", "time,wear", "--baseline", "pollution", "--out", o],
        &["compare", "--scenario", &sc, "--policies", "time,bad/name", "--baseline", "time", "--out", o],
    ];
    for args in cases {
        let out = civicroute(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
    }
    let out = civicroute(&["compare", "--scenario", &sc, "--policies", "time,nonexistent", "--baseline", "time", "--out", o]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("nonexistent"));
}

#[test]
fn compare_reports_pollution_gain() {
    let dir = tempfile::tempdir().unwrap();
    let out = civicroute(&[
        "compare", "--scenario", &cluster(), "--policies", "time,pollution,wear",
        "--baseline", "time", "--out", s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for p in ["time", "pollution", "wear"] {
        assert!(dir.path().join(p).join("metrics.csv").is_file());
        let meta = std::fs::read_to_string(dir.path().join(p).join("run.meta")).unwrap();
        assert!(meta.contains(&format!("policy = {p}")));
    }
    let csv = std::fs::read_to_string(dir.path().join("comparison.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    let row = |p: &str| rows.iter().find(|r| r[0] == p).unwrap();
    let exposure = |p: &str| row(p)[col("total_pollution_exposure")].parse::<f64>().unwrap();
    assert!(exposure("pollution") < exposure("time"));
    assert_eq!(row("time")[col("delta_total_pollution_exposure")].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn generate_grid_counts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.net");
    let out = civicroute(&["generate-network", "--kind", "grid", "--rows", "3", "--cols", "3", "--out", s(&path)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let net = civicroute::RoadNetwork::load(&path).unwrap();
    assert_eq!((net.node_count(), net.segment_count()), (9, 24));
}

#[test]
fn generate_geometric_unreachable_radius_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("geo.net");
    let out = civicroute(&[
        "generate-network", "--kind", "geometric", "--n", "20", "--radius", "1", "--seed", "3", "--out", s(&path),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("strongly connected"), "{}", stderr(&out));
    assert!(!path.exists());
}

#[test]
fn generated_network_feeds_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("geo.net");
    let out = civicroute(&[
        "generate-network", "--kind", "geometric", "--n", "30", "--radius", "400", "--seed", "5", "--out", s(&net),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let scenario = r#"
name = "generated"
epochs = 3

[network]
kind = "file"
path = "geo.net"

[distributions.housing]
generator = "at_nodes"

[distributions.good_food]
generator = "at_nodes"
count = 2
seed = 1

[distributions.bad_food]
generator = "at_nodes"
count = 3
seed = 2

[distributions.population]
generator = "uniform_in_bounds"
bounds = [0.0, 0.0, 1000.0, 1000.0]
count = 40

[policy]
kind = "wear"
"#;
    let sc = dir.path().join("generated.toml");
    std::fs::write(&sc, scenario).unwrap();
    let out = civicroute(&["simulate", "--scenario", s(&sc), "--out", s(&dir.path().join("run"))]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let metrics = std::fs::read_to_string(dir.path().join("run/metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 4);
}

#[test]
fn registry_lists_technical_metrics() {
    let out = civicroute(&["registry"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for m in ["eta", "kappa", "pollution_exposure"] {
        assert!(text.contains(m));
    }
}

#[test]
fn in_process_run_matches_binary_exit_codes() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = civicroute::cli::run(["civicroute", "registry"], &mut out, &mut err);
    assert_eq!(code, 0);
    let code = civicroute::cli::run(["civicroute", "compare"], &mut out, &mut err);
    assert_eq!(code, 1);
}

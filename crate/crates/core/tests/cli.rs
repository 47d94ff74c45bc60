use std::path::Path;
use std::process::{Command, Output};

fn pants(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pants")).args(args).current_dir(dir).output().expect("run pants")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn curvature_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let o = pants(&["curvature", "--masses", "1,1,1", "--grid", "1000", "--no-csv", "--out", "eq"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("verdict: all-nonpositive"));
    assert_eq!(json(&dir.path().join("eq/curvature.json"))["report"]["verdict"], "all-nonpositive");
    assert!(dir.path().join("eq/curvature.svg").exists());

    let o = pants(&["curvature", "--masses", "1,1,2", "--grid", "1000", "--no-csv", "--out", "uneq"], dir.path());
    assert!(stdout(&o).contains("verdict: mixed-sign"));

    let o = pants(&["curvature", "--masses", "1,1,1", "--grid", "1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn syzygy_reduce_explains_the_empty_word() {
    let dir = tempfile::tempdir().unwrap();
    let o = pants(&["syzygy", "reduce", "1221"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("\"\"\n"));
    assert!(text.lines().count() >= 2);
    let o = pants(&["syzygy", "classify", "123123"], dir.path());
    assert!(stdout(&o).contains("tied: true"));
    let o = pants(&["syzygy", "decorate", "121"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn realize_restarts_agree() {
    let dir = tempfile::tempdir().unwrap();
    let o = pants(&["realize", "--word", "1+2-3+1-2+3-", "--masses", "1,1,1", "--restarts", "5"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("out/realize/realize.json"));
    let runs = v["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 5);
    let lengths: Vec<f64> = runs.iter().map(|r| r["jm_length"].as_f64().unwrap()).collect();
    assert!(runs.iter().all(|r| r["converged"] == true));
    assert!(lengths.iter().all(|l| (l - lengths[0]).abs() < 1e-4));

    let o = pants(&["realize", "--word", "1+2-"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn ends_table_converges() {
    let dir = tempfile::tempdir().unwrap();
    let o = pants(&["ends", "--masses", "1,1,1", "--end", "3"], dir.path());
    assert!(o.status.success());
    let v = json(&dir.path().join("out/ends/ends.json"));
    let rows = v["rows"].as_array().unwrap();
    let last = rows.last().unwrap();
    for key in ["min_f", "max_f"] {
        assert!((last[key].as_f64().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-5);
    }
    assert!(stdout(&o).contains("0.70711"));
}

#[test]
fn identical_runs_write_identical_json() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = pants(&["geodesic", "--phi", "0.3", "--theta", "1.0", "--heading=-1.0", "--out", out], dir.path());
        assert!(o.status.success());
        let o = pants(&["collide", "--samples", "10", "--perturbations", "5", "--seed", "4", "--out", out], dir.path());
        assert!(o.status.success());
    }
    for file in ["events.json", "collide.json", "timeline.csv", "trajectory.csv"] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
    let events = json(&dir.path().join("a/events.json"));
    assert!(!events["events"].as_array().unwrap().is_empty());
    let report = json(&dir.path().join("a/collide.json"));
    assert_eq!(report["pass"], true);
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "grid = 1\n").unwrap();
    let o = pants(&["curvature", "--grid", "50", "--config", "bad.toml"], dir.path());
    assert_eq!(o.status.code(), Some(1));

    std::fs::write(dir.path().join("ends.toml"), "masses = \"1,2,3\"\nells = [4.0, 5.0]\nout = \"cfg\"\n").unwrap();
    let o = pants(&["ends", "--config", "ends.toml"], dir.path());
    assert!(o.status.success());
    let v = json(&dir.path().join("cfg/ends.json"));
    assert_eq!(v["masses"][1].as_f64(), Some(2.0));
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);

    std::fs::write(dir.path().join("typo.toml"), "gird = 10\n").unwrap();
    let o = pants(&["curvature", "--config", "typo.toml"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // Launching on a collision point.
    let o = pants(&["geodesic", "--phi", "0", "--theta", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let o = pants(&["--help"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let o = pants(&["frobnicate"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

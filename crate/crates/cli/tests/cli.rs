use std::path::Path;
use std::process::{Command, Output};

fn nmdiscord(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nmdiscord")).args(args).current_dir(dir).output().expect("spawn nmdiscord")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const COMMON_THIRD: &[&str] =
    &["simulate", "--env", "common", "--alpha2", "0.3333333", "--lambda", "0.1", "--t-max", "20", "--dt", "0.01"];

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn simulate_independent_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = nmdiscord(
        &[
            "simulate",
            "--env",
            "independent",
            "--alpha2",
            "0.3333333",
            "--lambda",
            "0.01",
            "--t-max",
            "50",
            "--dt",
            "0.01",
            "--out",
            "fig2b.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("fig2b.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,a,b,d,w,z,mutual_info,classical_corr,d1,d2,discord,branch,concurrence,eof,purity"
    );
    assert_eq!(lines.count(), 5001);
    assert!(!dir.path().join("fig2b.events.json").exists());
}

#[test]
fn events_sidecar_and_events_subcommand_agree() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = COMMON_THIRD.to_vec();
    args.extend(["--out", "run.csv", "--events"]);
    assert_eq!(code(&nmdiscord(&args, dir.path())), 0);
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.events.json")).unwrap()).unwrap();
    let switches = sidecar["branch_switch_times"].as_array().unwrap();
    assert!(!switches.is_empty());

    let out = nmdiscord(&["events", "--input", "run.csv"], dir.path());
    assert_eq!(code(&out), 0);
    let again: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(again["branch_switch_times"].as_array().unwrap().len(), switches.len());
    for (a, b) in again["branch_switch_times"].as_array().unwrap().iter().zip(switches) {
        assert!((a.as_f64().unwrap() - b.as_f64().unwrap()).abs() < 1e-9);
    }
}

#[test]
fn json_output_matches_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = COMMON_THIRD.to_vec();
    args.extend(["--out", "run.csv"]);
    assert_eq!(code(&nmdiscord(&args, dir.path())), 0);
    let mut args = COMMON_THIRD.to_vec();
    args.extend(["--out", "run.json", "--events"]);
    assert_eq!(code(&nmdiscord(&args, dir.path())), 0);

    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.json")).unwrap()).unwrap();
    assert_eq!(doc["config"]["env"], "common");
    assert_eq!(doc["config"]["alpha2"], 0.3333333);
    assert!(doc["events"]["branch_switch_times"].is_array());
    let columns: Vec<&str> = doc["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(columns.len(), 15);
    let data = doc["data"].as_array().unwrap();
    let rows = csv_rows(&dir.path().join("run.csv"));
    assert_eq!(data.len(), rows.len());
    for (j, c) in rows.iter().zip(data) {
        let c = c.as_array().unwrap();
        for (k, cell) in j.iter().enumerate() {
            if columns[k] == "branch" {
                assert_eq!(c[k].as_str().unwrap(), cell);
            } else {
                let from_csv: f64 = cell.parse().unwrap();
                let from_json = c[k].as_f64().unwrap();
                assert!(
                    (from_csv - from_json).abs() <= 1e-11 * from_json.abs().max(1e-300),
                    "{} {cell} vs {from_json}",
                    columns[k]
                );
            }
        }
    }
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv", "a.json", "b.json"] {
        let mut args = COMMON_THIRD.to_vec();
        args.extend(["--out", name, "--events"]);
        assert_eq!(code(&nmdiscord(&args, dir.path())), 0);
    }
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_eq!(read("a.events.json"), read("b.events.json"));
    // the config echo differs only in output_path
    let strip = |n: &str| String::from_utf8(read(n)).unwrap().replace(n, "");
    assert_eq!(strip("a.json"), strip("b.json"));
}

#[test]
fn ground_state_trajectory_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = nmdiscord(
        &[
            "simulate", "--env", "common", "--alpha2", "1.0", "--lambda", "0.1", "--t-max", "10", "--dt", "0.01",
            "--out", "g.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    for row in csv_rows(&dir.path().join("g.csv")) {
        assert_eq!(&row[1..11], &["1", "0", "0", "0", "0", "0", "0", "0", "0", "0"]);
        assert_eq!(&row[12..], &["0", "0", "1"]);
    }
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &[
            "simulate", "--env", "common", "--alpha2", "1.5", "--lambda", "0.1", "--t-max", "10", "--dt", "0.01",
            "--out", "x.csv",
        ],
        &[
            "simulate", "--env", "common", "--alpha2", "0.5", "--lambda", "10", "--t-max", "10", "--dt", "0.01",
            "--out", "x.csv",
        ],
        &[
            "simulate", "--env", "common", "--alpha2", "0.5", "--lambda", "-1", "--t-max", "10", "--dt", "0.01",
            "--out", "x.csv",
        ],
        &["simulate", "--env", "common", "--lambda", "0.1", "--t-max", "10", "--dt", "0.01", "--out", "x.csv"],
        &[
            "simulate", "--env", "nowhere", "--alpha2", "0.5", "--lambda", "0.1", "--t-max", "10", "--dt", "0.01",
            "--out", "x.csv",
        ],
        &[
            "simulate",
            "--env",
            "independent",
            "--alpha2",
            "0.5",
            "--lambda",
            "0.1",
            "--t-max",
            "10",
            "--dt",
            "0.01",
            "--out",
            "missing/x.csv",
        ],
        &["events", "--input", "does-not-exist.csv"],
        &["frobnicate"],
    ];
    for args in cases {
        assert_eq!(code(&nmdiscord(args, dir.path())), 2, "{args:?}");
    }
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn events_rejects_foreign_csv() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("other.csv"), "x,y\n1,2\n").unwrap();
    assert_eq!(code(&nmdiscord(&["events", "--input", "other.csv"], dir.path())), 2);
}

#[test]
fn sweep_writes_outputs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = nmdiscord(
        &[
            "sweep",
            "--env",
            "common",
            "--param",
            "alpha2",
            "--values",
            "0,0.1,0.2,0.5",
            "--lambda",
            "0.1",
            "--t-max",
            "5",
            "--dt",
            "0.01",
            "--out-dir",
            "fig3",
            "--jobs",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig3/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["param"], "alpha2");
    let entries = manifest["entries"].as_array().unwrap();
    let values: Vec<f64> = entries.iter().map(|e| e["value"].as_f64().unwrap()).collect();
    assert_eq!(values, vec![0.0, 0.1, 0.2, 0.5]);
    for e in entries {
        let rows = csv_rows(&dir.path().join("fig3").join(e["file"].as_str().unwrap()));
        assert_eq!(rows.len(), 501);
        let a0: f64 = rows[0][1].parse().unwrap();
        assert_eq!(a0, e["value"].as_f64().unwrap());
    }

    // the same sweep on one worker produces the same files
    let out = nmdiscord(
        &[
            "sweep",
            "--env",
            "common",
            "--param",
            "alpha2",
            "--values",
            "0,0.1,0.2,0.5",
            "--lambda",
            "0.1",
            "--t-max",
            "5",
            "--dt",
            "0.01",
            "--out-dir",
            "serial",
            "--jobs",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    for e in entries {
        let f = e["file"].as_str().unwrap();
        assert_eq!(
            std::fs::read(dir.path().join("fig3").join(f)).unwrap(),
            std::fs::read(dir.path().join("serial").join(f)).unwrap()
        );
    }
}

#[test]
fn sweep_lambda_needs_valid_steps() {
    let dir = tempfile::tempdir().unwrap();
    let base =
        ["sweep", "--env", "common", "--param", "lambda", "--alpha2", "0.3333333", "--t-max", "2", "--out-dir", "fig4"];
    let mut args = base.to_vec();
    args.extend(["--values", "0.1,1,10", "--dt", "0.01"]);
    assert_eq!(code(&nmdiscord(&args, dir.path())), 2);
    let mut args = base.to_vec();
    args.extend(["--values", "0.1,1,10", "--dt", "0.002"]);
    assert_eq!(code(&nmdiscord(&args, dir.path())), 0);
    assert!(dir.path().join("fig4/lambda_10.csv").exists());
}

#[test]
fn sweep_duplicates_and_empty_lists() {
    let dir = tempfile::tempdir().unwrap();
    let base =
        ["sweep", "--env", "independent", "--param", "alpha2", "--lambda", "0.01", "--t-max", "5", "--dt", "0.01"];
    let mut args = base.to_vec();
    args.extend(["--values", "0.1,0.2,0.1", "--out-dir", "dup"]);
    assert_eq!(code(&nmdiscord(&args, dir.path())), 2);
    assert!(!dir.path().join("dup").exists());

    let mut args = base.to_vec();
    args.extend(["--values", "", "--out-dir", "empty"]);
    assert_eq!(code(&nmdiscord(&args, dir.path())), 0);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("empty/manifest.json")).unwrap()).unwrap();
    assert!(manifest["entries"].as_array().unwrap().is_empty());
    assert_eq!(std::fs::read_dir(dir.path().join("empty")).unwrap().count(), 1);
}

#[test]
fn validate_passes_and_detects_faults() {
    let dir = tempfile::tempdir().unwrap();
    let out = nmdiscord(&["validate", "--seed", "7"], dir.path());
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    for suite in ["analytic-vs-numeric", "pseudomode-calibration", "vanishing-times", "rk4-halving"] {
        assert!(text.contains(&format!("PASS {suite}")), "{text}");
    }

    for scale in ["0.95", "1.05"] {
        let out = nmdiscord(&["validate", "--perturb-omega", scale], dir.path());
        assert_eq!(code(&out), 1);
        assert!(stdout(&out).contains("FAIL pseudomode-calibration"));
    }
    let out = nmdiscord(&["validate", "--flip-d2-sign"], dir.path());
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL analytic-vs-numeric"));
}

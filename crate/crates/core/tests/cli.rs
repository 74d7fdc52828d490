//! Drives the `collapse` binary end to end.

use std::path::PathBuf;
use std::process::{Command, Output};

use collapse_dynamics::runner::csv_data_section;

fn collapse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_collapse"))
        .args(args)
        .env_remove("COLLAPSE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn config(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "configs", name].iter().collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn bounds_table1_prints_distance_columns() {
    let text = stdout(&collapse(&["bounds", "table1"]));
    let data = csv_data_section(&text);
    let mut lines = data.lines();
    assert_eq!(lines.next(), Some("name,lambda_max,category,distance_csl,distance_adler"));
    assert!(data.contains("spontaneous x-ray emission from Ge,1e-11,laboratory,6,Excluded"));
    assert!(data.contains("matter-wave interferometry,0.00001,laboratory,12,4"));
    assert!(text.contains("# command: bounds"));
}

#[test]
fn measure_summary_matches_born_rule() {
    let text = stdout(&collapse(&[
        "measure",
        "--seed",
        "3",
        "--trajectories",
        "2000",
        "--set",
        "gamma0=0.0",
        "--set",
        "b=10",
    ]));
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "run,outcome,s_col,t_col");
    let value = |key: &str| -> f64 {
        let prefix = format!("summary,{key},");
        text.lines().find_map(|l| l.strip_prefix(prefix.as_str())).unwrap().parse().unwrap()
    };
    let sigma = value("p_plus_sigma");
    assert!((value("p_plus") - value("p_plus_analytic")).abs() < 3.0 * sigma);
    assert!((value("mean_s") - 10.0).abs() < 3.0 * value("mean_s_std_error") + 0.05);
}

#[test]
fn seed_and_thread_count_control_output() {
    let args = ["measure", "--seed", "11", "--trajectories", "300", "--set", "b=6"];
    let one = stdout(&collapse(&[&args[..], &["--threads", "1"]].concat()));
    let many = stdout(&collapse(&[&args[..], &["--threads", "6"]].concat()));
    assert_eq!(one, many);
    let env = Command::new(env!("CARGO_BIN_EXE_collapse"))
        .args(args)
        .env("COLLAPSE_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(stdout(&env), one);
    let other = stdout(&collapse(&["measure", "--seed", "12", "--trajectories", "300", "--set", "b=6"]));
    assert_ne!(csv_data_section(&one), csv_data_section(&other));
}

#[test]
fn config_files_run_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.json");
    let status = collapse(&[
        "grw",
        "--config",
        &config("grw_two_peak.toml"),
        "--trajectories",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["metadata"]["n_trajectories"], "20");
    assert_eq!(json["metadata"]["seed"], "5");
    assert_eq!(json["columns"], serde_json::json!(["run", "time", "center"]));
    assert!(json["summary"]["offdiag_rate_analytic"].as_f64().unwrap() > 0.0);
}

#[test]
fn every_shipped_config_is_valid() {
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "configs"].iter().collect();
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let command = text
            .lines()
            .find_map(|l| l.strip_prefix("command = "))
            .unwrap()
            .trim_matches('"')
            .to_string();
        let out = collapse(&[&command, "--config", path.to_str().unwrap(), "--trajectories", "2"]);
        assert!(out.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
        count += 1;
    }
    assert!(count >= 7);
}

#[test]
fn invalid_input_exits_nonzero_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "command = \"measure\"\nseed = 1\n\n[parameters]\nb = 10.0\nbogus_key = 3\n").unwrap();
    let out = collapse(&["measure", "--config", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bogus_key") && err.contains("line 6"), "{err}");

    let out = collapse(&["qmupl", "--config", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("file is for command 'measure'"));

    for args in [
        vec!["nonsense"],
        vec!["measure", "--format", "xml"],
        vec!["measure", "--trajectories", "0"],
        vec!["measure", "--set", "b"],
        vec!["measure", "--set", "b=-1"],
        vec!["bounds", "sideways"],
        vec!["csl", "table1"],
    ] {
        let out = collapse(&args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
    }
}

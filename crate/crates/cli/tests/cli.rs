use std::process::{Command, Output};

use serde_json::Value;

fn joinlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_joinlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stderr)
        .lines()
        .map(|l| serde_json::from_str(l).expect("stderr line is JSON"))
        .collect()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn qutrit_werner_past_the_symmetric_edge() {
    let v = stdout_json(&joinlab(&["check", "--kind", "werner", "--d", "3", "--eta", "0.3"]));
    assert_eq!(v["state_positive"], false);
    assert_eq!(v["channel_positive"], true);
    assert_eq!(v["dense"]["agrees"], true);
}

#[test]
fn maximally_mixed_qubits_are_in_every_cone() {
    let v = stdout_json(&joinlab(&["check", "--kind", "werner", "--d", "2", "--eta", "0"]));
    for key in ["state_positive", "channel_positive", "local_positive", "ppt"] {
        assert_eq!(v[key], true, "{key}");
    }
    assert_eq!(v["npt_entangled"], false);
}

#[test]
fn bell_state_is_not_ppt() {
    let v = stdout_json(&joinlab(&["check", "--kind", "brauer", "--d", "2", "--eta", "0", "--beta", "1"]));
    assert_eq!(v["state_positive"], true);
    assert_eq!(v["ppt"], false);
    assert!(v["margins"]["channel"].as_f64().unwrap() < 0.0);
    assert_eq!(v["dense"]["channel_positive"], false);
}

#[test]
fn negative_parameters_parse() {
    let v = stdout_json(&joinlab(&["check", "--kind", "werner", "--d", "2", "--eta", "-1"]));
    assert_eq!(v["state_positive"], true);
    assert_eq!(v["channel_positive"], false);
}

#[test]
fn dense_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bell.json");
    let real: Vec<Vec<f64>> = (0..4)
        .map(|i| (0..4).map(|j| if [0, 3].contains(&i) && [0, 3].contains(&j) { 0.5 } else { 0.0 }).collect())
        .collect();
    std::fs::write(&path, serde_json::json!({ "dims": [2, 2], "real": real }).to_string()).unwrap();
    let v = stdout_json(&joinlab(&["check", "--kind", "dense-file", "--file", path.to_str().unwrap()]));
    assert_eq!(v["state_positive"], true);
    assert_eq!(v["channel_positive"], false);
    assert_eq!(v["npt_entangled"], true);
    assert_eq!(v["homocorrelation_is_channel"], false);
}

#[test]
fn small_cube_has_one_row_per_point() {
    let out = joinlab(&["sweep", "--d", "3", "--grid", "3"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(data_rows(&csv).len(), 27);
    assert!(csv.lines().next().unwrap().starts_with("# version: "));
    assert!(csv.contains("# channel_form: exact elimination"));
}

#[test]
fn full_qubit_cube_is_written_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = joinlab(&["sweep", "--d", "2", "--grid", "41", "--scenarios", "all", "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let first = std::fs::read(&a).unwrap();
    assert_eq!(first, std::fs::read(&b).unwrap());
    let csv = String::from_utf8(first).unwrap();
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 68921);
    assert!(rows[0].starts_with("-1,-1,-1,"));
    assert!(rows[1].starts_with("-1,-1,-0.95,"));
    assert!(rows[68920].starts_with("1,1,1,"));
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header.split(',').count(), 3 + 2 * 7);
    assert!(rows.iter().all(|r| r.split(',').count() == 17));
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_joinlab"))
            .args(["sweep", "--d", "3", "--grid", "9", "--format", "json"])
            .env("JOINLAB_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    let two = run("2");
    assert!(one.status.success() && two.status.success());
    assert_eq!(one.stdout, two.stdout);
    let rows: Vec<Value> = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(rows.len(), 729);
    assert!(rows[0]["state_join"].is_boolean());
    assert!(rows[0]["state_join_margin"].is_number());
    assert_eq!(run("zero").status.code(), Some(2));
}

#[test]
fn symmetric_line_sign_changes() {
    let out = joinlab(&["sweep", "--d", "2", "--diagonal", "201"]);
    assert!(out.status.success());
    assert_eq!(data_rows(&String::from_utf8(out.stdout.clone()).unwrap()).len(), 201);
    let summary = &stderr_lines(&out)[0]["sign_changes"];
    let roots = |name: &str| -> Vec<f64> {
        summary[name].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
    };
    let expect = |name: &str, want: &[f64]| {
        let got = roots(name);
        assert_eq!(got.len(), want.len(), "{name}: {got:?}");
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-6, "{name}: {got:?}");
        }
    };
    expect("state_join", &[-1.0 / 3.0, 1.0 / 3.0]);
    expect("local_positive_join", &[-1.0 / 3.0, 2.0 / 3.0]);
    expect("separable", &[-1.0 / 6.0, 1.0 / 3.0]);
    for pivot in ["A", "B", "C"] {
        expect(&format!("channel_join_{pivot}"), &[-0.2, 1.0 / 3.0]);
    }
}

#[test]
fn oracle_columns_agree_outside_the_band() {
    let out = joinlab(&["sweep", "--d", "2", "--grid", "21", "--oracle"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout.clone()).unwrap();
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.ends_with("state_join_oracle,channel_join_A_oracle,channel_join_B_oracle,channel_join_C_oracle,local_positive_join_oracle"));
    assert_eq!(data_rows(&csv).len(), 9261);
    let summary = &stderr_lines(&out)[0];
    assert_eq!(summary["rows"], 9261);
    assert_eq!(summary["compared"], 9261 * 5);
    assert_eq!(summary["disagreements"], 0);
}

#[test]
fn qutrit_oracle_on_a_pivot() {
    let out = joinlab(&["sweep", "--d", "3", "--grid", "7", "--scenarios", "state,channel", "--pivot", "B", "--oracle"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(csv.contains("channel_join_B_oracle"));
    assert!(!csv.contains("channel_join_A"));
    assert_eq!(stderr_lines(&out)[0]["disagreements"], 0);
}

#[test]
fn agreement_suite_passes() {
    let out = joinlab(&["verify", "--suite", "agreement", "--samples", "500", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn maps_suite_reports_the_ppt_equivalence() {
    let out = joinlab(&["verify", "--suite", "maps"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("ok") && l.contains("ppt_iff_cptp")));
    assert!(!text.contains("FAIL"));
}

#[test]
fn analytic_joinability_suite_passes() {
    let out = joinlab(&["verify", "--suite", "joinability", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("ok") && l.contains("containment_chain")));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "--suite", "everything"][..],
        &["check", "--kind", "werner", "--d", "2"],
        &["check", "--kind", "werner", "--d", "1", "--eta", "0"],
        &["check", "--kind", "teleporter"],
        &["sweep", "--d", "2", "--grid", "1"],
        &["sweep", "--d", "2", "--range", "1:0"],
        &["sweep", "--d", "3", "--scenarios", "separable"],
        &["sweep", "--d", "4", "--grid", "2", "--oracle"],
        &["sweep", "--d", "2", "--scenarios", "nonsense"],
    ] {
        let out = joinlab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn io_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = joinlab(&["check", "--kind", "dense-file", "--file", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let unwritable = dir.path().join("no/such/dir/out.csv");
    let out = joinlab(&["sweep", "--d", "2", "--grid", "2", "--out", unwritable.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn malformed_dense_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"dims": [2, 2], "real": [[1, 0], [0, 1]]}"#).unwrap();
    let out = joinlab(&["check", "--kind", "dense-file", "--file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&path, "not json").unwrap();
    let out = joinlab(&["check", "--kind", "dense-file", "--file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

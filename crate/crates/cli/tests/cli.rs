use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn groups() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/groups")
}

fn geoflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geoflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn f2() -> String {
    groups().join("f2.grp").display().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn growth_of_the_free_group() {
    let out = geoflow(&["growth", "--group", &f2(), "--gens", "S"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let gr = report["result"]["growth"]["gr"].as_f64().unwrap();
    assert!((gr - 3f64.ln()).abs() < 1e-6);
    assert_eq!(report["result"]["sphere_counts"][25], "1129718145924");
    assert_eq!(report["provenance"]["validated_to"]["S"], 8);
}

#[test]
fn validate_matches_breadth_first_search() {
    let out = geoflow(&["validate", "--group", &f2(), "--gens", "S", "-N", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out)["result"]["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 13);
    assert!(rows.iter().all(|r| r["equal"] == true));
}

#[test]
fn distortion_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let report = dir.path().join(format!("{tag}.json"));
        let csv = dir.path().join(format!("{tag}.csv"));
        let out = geoflow(&[
            "distortion",
            "--group",
            &f2(),
            "--from",
            "S",
            "--to",
            "Sstar",
            "--seed",
            "7",
            "--out",
            report.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        (
            std::fs::read(&report).unwrap(),
            std::fs::read_to_string(&csv).unwrap(),
        )
    };
    let (a, csv_a) = run("a");
    let (b, csv_b) = run("b");
    assert_eq!(a, b);
    assert_eq!(csv_a, csv_b);
    assert!(csv_a.starts_with("n,exact,mc_mean,mc_stderr,samples\n"));
    assert!(dir.path().join("a.json.timing.json").exists());
    let report: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["provenance"]["seed"], 7);
    assert_eq!(report["result"]["inequality"]["pass"], true);
}

#[test]
fn dimension_emits_summary_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rays.csv");
    let out = geoflow(&[
        "dimension",
        "--group",
        &f2(),
        "--to",
        "Sstar",
        "--n",
        "10,20",
        "--samples",
        "500",
        "--diagnostic-rays",
        "3",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let summary = json(&out)["result"]["summary"].clone();
    let dim = summary["dim_hat"].as_f64().unwrap();
    let expected = summary["gr_s"].as_f64().unwrap() / summary["tau_hat"].as_f64().unwrap();
    assert!((dim - expected).abs() < 1e-12);
    let table = std::fs::read_to_string(csv).unwrap();
    assert!(table.starts_with("ray,k,length_sstar,local_dimension\n"));
    assert_eq!(table.lines().count(), 1 + 3 * 4);
}

#[test]
fn input_errors_exit_with_two() {
    let missing = groups().join("missing.grp").display().to_string();
    assert_eq!(
        geoflow(&["growth", "--group", &missing]).status.code(),
        Some(2)
    );
    assert_eq!(
        geoflow(&["growth", "--group", &f2(), "--gens", "Q"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(geoflow(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(geoflow(&["battery", "--only", "13"]).status.code(), Some(2));
    let out = geoflow(&["automaton", "--group", &f2(), "-L", "3", "--check", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn battery_is_deterministic_and_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let path = dir.path().join(format!("{tag}.json"));
        let out = geoflow(&[
            "battery",
            "--seed",
            "5",
            "--only",
            "3,4,5,11,12",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a"), run("b"));
    let timing: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a.json.timing.json")).unwrap())
            .unwrap();
    assert_eq!(timing["sections"].as_array().unwrap().len(), 5);
    // the n = 25 sphere estimate of criterion 2 misses its tolerance
    let out = geoflow(&["battery", "--only", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"]["passed"], false);
}

#[test]
fn saved_automata_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f2.aut");
    let out = geoflow(&[
        "automaton",
        "--group",
        &f2(),
        "--save",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let aut = geoflow::automaton::GeodesicAutomaton::from_text(&text).unwrap();
    assert_eq!(
        aut.num_states(),
        json(&out)["result"]["states"].as_u64().unwrap() as usize
    );
}

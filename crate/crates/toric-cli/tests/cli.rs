//! Exit-code and output contracts of the installed binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_str()
        .unwrap()
        .to_owned()
}

fn toric(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toric"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("toric-cli-{tag}-{}", std::process::id()))
}

#[test]
fn decompose_emits_the_broken_line_facets() {
    let out = toric(&["decompose", &data("cubic_0120.json")]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["facets"], serde_json::json!([[0, 1, 2], [2, 3]]));
    assert_eq!(value["regularity"]["status"], serde_json::json!("Regular"));
}

#[test]
fn check_regular_distinguishes_irregular_from_error() {
    let out = toric(&["check-regular", &data("pinwheel.json")]);
    assert_eq!(out.status.code(), Some(2), "irregular is exit 2, not an error");
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["regularity"]["status"], serde_json::json!("Irregular"));

    let missing = toric(&["check-regular", "no-such-file.json"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(!missing.stderr.is_empty());
}

#[test]
fn check_regular_accepts_the_grid_decomposition() {
    let dir = scratch("grid");
    std::fs::create_dir_all(&dir).unwrap();
    let input = dir.join("squares.json");
    std::fs::write(
        &input,
        r#"{
            "config": {"dim": 2, "points": [[0,0],[1,0],[2,0],[0,1],[1,1],[2,1]]},
            "facets": [[0,1,3,4],[1,2,4,5]]
        }"#,
    )
    .unwrap();
    let out = toric(&["check-regular", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn eval_writes_a_mesh() {
    let dir = scratch("eval");
    let path = dir.join("pillow.obj");
    let out = toric(&[
        "eval",
        &data("pillow_spec.json"),
        "-m",
        "9",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("g patch\n"));
    assert!(text.lines().any(|l| l.starts_with("f ")));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn degenerate_writes_meshes_and_csv() {
    let dir = scratch("degen");
    let out = toric(&[
        "degenerate",
        &data("cubic_degen.json"),
        "-m",
        "9",
        "--schedule",
        "1,5",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    for file in ["control_surface.obj", "member_t1.obj", "member_t5.obj", "sweep.csv"] {
        assert!(dir.join(file).is_file(), "missing {file}");
    }
    let csv = std::fs::read_to_string(dir.join("sweep.csv")).unwrap();
    assert!(csv.starts_with("t,hausdorff,sampling_pitch,threshold,pass\n"));
    assert_eq!(csv.lines().count(), 3);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn verify_passes_and_fails_by_exit_code() {
    let dir = scratch("verify");
    let passing = toric(&[
        "verify",
        &data("cubic_degen.json"),
        "-m",
        "33",
        "--out",
        dir.join("pass").to_str().unwrap(),
    ]);
    assert_eq!(passing.status.code(), Some(0));

    // An impossible tolerance turns the same sweep into a failure, which
    // must be exit 3, not an error.
    let failing = toric(&[
        "verify",
        &data("cubic_degen.json"),
        "-m",
        "33",
        "--tolerance-scale",
        "1e-9",
        "--out",
        dir.join("fail").to_str().unwrap(),
    ]);
    assert_eq!(failing.status.code(), Some(3));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn verify_reports_the_probe_surface() {
    let dir = scratch("probe");
    let out = toric(&[
        "verify",
        &data("pinwheel_regression.json"),
        "-m",
        "17",
        "--schedule",
        "1,5,25",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("probe surface (irregular)"), "{stdout}");
    let probe = std::fs::read_to_string(dir.join("probe.csv")).unwrap();
    assert!(probe.starts_with("t,distance\n"));
    assert_eq!(probe.lines().count(), 4);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn parse_errors_carry_positions_to_stderr() {
    let dir = scratch("parse");
    std::fs::create_dir_all(&dir).unwrap();
    let input = dir.join("bad.json");
    std::fs::write(&input, "{\"config\": {\"dim\": 1, \"points\": [[0],[1]]},\n \"lifting\": [\"1/0\"]}").unwrap();
    let out = toric(&["decompose", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 2"), "{stderr}");
    assert!(stderr.contains("zero denominator"), "{stderr}");
    let _ = std::fs::remove_dir_all(&dir);
}

//! Black-box tests of the binary: exit codes, report shape, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_etale"))
}

fn instances() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn validate_passes_on_a_valid_space() {
    let file = instances().join("sierpinski.json");
    let out = run(&["validate", file.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["checks"][0]["status"], "Pass");
}

#[test]
fn validate_reports_a_broken_topology_as_a_failed_check() {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(dir).unwrap();
    let path = dir.join("broken-space.json");
    std::fs::write(
        &path,
        r#"{"points": [0, 1, 2], "opens": [[], [0], [1], [0, 1, 2]]}"#,
    )
    .unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let witness = report["checks"][0]["witness"]["error"].as_str().unwrap();
    assert!(witness.contains("closed under union"), "{witness}");
}

#[test]
fn malformed_json_is_exit_code_two() {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(dir).unwrap();
    let path = dir.join("malformed.json");
    std::fs::write(&path, "{").unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn def21_suite_passes_on_the_group_pseudogroup() {
    let file = instances().join("z2-group-pseudogroup.json");
    let out = run(&["check", file.to_str().unwrap(), "--suite", "def21"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn prop11_suite_passes_on_the_pair_groupoid() {
    let file = instances().join("pair-groupoid.json");
    let out = run(&["check", file.to_str().unwrap(), "--suite", "prop11"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn prop25_and_prop45_pass_on_homeo_l() {
    let file = instances().join("homeo-l-discrete2.json");
    for suite in ["prop24", "prop25", "prop45", "universality"] {
        let out = run(&["check", file.to_str().unwrap(), "--suite", suite]);
        assert!(
            out.status.success(),
            "suite {suite}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn def21_on_a_non_t1_base_isolates_the_decomposition_failure() {
    // The local-homeomorphism category over the Sierpinski space satisfies
    // everything except the coproduct decomposition of germ hom-sets.
    let file = instances().join("homeo-l-sierpinski.json");
    let out = run(&["check", file.to_str().unwrap(), "--suite", "def21"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for check in report["checks"].as_array().unwrap() {
        let name = check["name"].as_str().unwrap();
        let passed = check["status"] == "Pass";
        assert_eq!(
            passed,
            name != "condition_2_germ_decomposition",
            "{name} unexpectedly {}",
            if passed { "passed" } else { "failed" }
        );
    }
}

#[test]
fn suite_on_wrong_kind_is_exit_code_two() {
    let file = instances().join("sierpinski.json");
    let out = run(&["check", file.to_str().unwrap(), "--suite", "prop11"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn roundtrips_pass_in_both_directions() {
    let g = instances().join("pair-groupoid.json");
    let out = run(&["roundtrip", g.to_str().unwrap(), "--direction", "g2p2g"]);
    assert!(out.status.success());
    let c = instances().join("homeo-l-discrete2.json");
    let out = run(&["roundtrip", c.to_str().unwrap(), "--direction", "p2g2p"]);
    assert!(out.status.success());
}

#[test]
fn non_etale_roundtrip_fails_with_exit_code_one() {
    let file = instances().join("non-etale-groupoid.json");
    let out = run(&["roundtrip", file.to_str().unwrap(), "--direction", "g2p2g"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["checks"][0]["witness"]["error"]
        .as_str()
        .unwrap()
        .contains("not etale"));
}

#[test]
fn dot_export_writes_the_hasse_diagram() {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(dir).unwrap();
    let out_path = dir.join("sierpinski.dot");
    let file = instances().join("sierpinski.json");
    let out = run(&[
        "dot",
        file.to_str().unwrap(),
        "--kind",
        "space",
        "-o",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let dot = std::fs::read_to_string(&out_path).unwrap();
    assert!(dot.contains("p1 -> p0;"));
}

#[test]
fn corpus_reports_are_deterministic_for_a_seed() {
    // Tiny corpus so the test stays fast; determinism is what matters.
    let args =
        ["corpus", "--seed", "7", "--max-points", "2", "--random", "3"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let ra: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let rb: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(ra["digest"], rb["digest"]);
    assert_eq!(ra["checks"], rb["checks"]);
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_kg-bohm");
const BUILTIN: &str = "paper-counterexample";

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn verify_passes_and_scales_with_mass() {
    let one = run(&["verify"]);
    assert!(one.status.success(), "{}", stderr(&one));
    let one = stdout_json(&one);
    assert_eq!(one["pass"], true);
    assert_eq!(one["selection"], "BothSpacelike");
    assert_eq!(one["plane"], "SpacelikePlane");

    let two = run(&["verify", "--mass", "2"]);
    assert!(two.status.success());
    let two = stdout_json(&two);
    let (a1, a2) = (
        one["alpha"].as_f64().unwrap(),
        two["alpha"].as_f64().unwrap(),
    );
    assert!((a2 - 2.0 * a1).abs() <= 1e-14 * a2);
}

#[test]
fn classify_reports_degenerate_verdicts_with_success() {
    let out = run(&["classify", "--config", BUILTIN, "--x", "0,0,0,0"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["selection"], "BothSpacelike");
    assert_eq!(v["manifest"]["config"]["source"], BUILTIN);

    let dir = TempDir::new().unwrap();
    let single = write_config(
        dir.path(),
        "single.json",
        r#"{"mass": 1.0, "modes": [{"k": [1.25, 0.75, 0.0, 0.0], "c": [0.3, -0.2]}]}"#,
    );
    let out = run(&["classify", "--config", &single, "--x", "0.4,-1.2,3,0.1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout_json(&out)["selection"], "OrthogonalDegenerate");
}

#[test]
fn classify_fails_at_a_node() {
    let dir = TempDir::new().unwrap();
    let cancel = write_config(
        dir.path(),
        "node.json",
        r#"{"mass": 1.0, "modes": [
            {"k": [1.0, 0.0, 0.0, 0.0], "c": [1.0, 0.0]},
            {"k": [1.4142135623730951, 1.0, 0.0, 0.0], "c": [-1.0, 0.0]}
        ]}"#,
    );
    let out = run(&["classify", "--config", &cancel, "--x", "0,0,0,0"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("vanishes"), "{}", stderr(&out));
}

#[test]
fn malformed_config_names_the_mode() {
    let dir = TempDir::new().unwrap();
    let bad = write_config(
        dir.path(),
        "bad.json",
        r#"{"mass": 1.0, "modes": [
            {"k": [1.0, 0.0, 0.0, 0.0], "c": [1.0, 0.0]},
            {"k": [2.0, 0.0, 0.0, 0.0], "c": [1.0, 0.0]}
        ]}"#,
    );
    let out = run(&["classify", "--config", &bad, "--x", "0,0,0,0"]);
    assert!(!out.status.success());
    assert_ne!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("mode 1"), "{}", stderr(&out));

    let out = run(&[
        "classify",
        "--config",
        "/nonexistent/wave.json",
        "--x",
        "0,0,0,0",
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("/nonexistent/wave.json"));
}

#[test]
fn scan_writes_every_cell_and_a_manifest() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("scan.csv");
    let res = run(&[
        "scan",
        "--config",
        BUILTIN,
        "--resolution",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("x0,x1,x2,x3,selection,theta,w_plus_sq,w_minus_sq")
    );
    assert_eq!(lines.count(), 160_000);

    let manifest: Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("scan.csv.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "scan");
    assert_eq!(
        manifest["parameters"]["resolution"],
        serde_json::json!([20, 20, 20, 20])
    );
    assert_eq!(manifest["outputs"][0], out.to_str().unwrap());
}

#[test]
fn scan_origin_row_on_odd_resolution() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("scan.csv");
    let res = run(&[
        "scan",
        "--config",
        BUILTIN,
        "--resolution",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let text = fs::read_to_string(&out).unwrap();
    let origin: Vec<&str> = text.lines().filter(|l| l.starts_with("0,0,0,0,")).collect();
    assert_eq!(origin.len(), 1);
    assert!(
        origin[0].starts_with("0,0,0,0,BothSpacelike,"),
        "{}",
        origin[0]
    );
}

#[test]
fn scan_rejects_inverted_box() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("scan.csv");
    let res = run(&[
        "scan",
        "--config",
        BUILTIN,
        "--resolution",
        "2",
        "--lo",
        "0,0,0,0",
        "--hi",
        "1,1,-1,1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!res.status.success());
    assert!(stderr(&res).contains("--lo/--hi"), "{}", stderr(&res));
}

#[test]
fn trajectory_file_and_termination() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("traj.csv");
    let res = run(&[
        "trajectory",
        "--config",
        BUILTIN,
        "--x0",
        "-0.3,0,0,0",
        "--step",
        "0.005",
        "--max-steps",
        "2000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(
        text.lines().last(),
        Some("# termination: EnteredBothSpacelike")
    );
    assert!(dir.path().join("traj.csv.manifest.json").exists());
}

#[test]
fn trajectory_respects_max_steps_and_warns_on_coarse_step() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("traj.csv");
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/two_mode.json");
    let res = run(&[
        "trajectory",
        "--config",
        config,
        "--x0",
        "0,1.5707963267948966,0,0",
        "--step",
        "0.05",
        "--max-steps",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    let text = fs::read_to_string(&out).unwrap();
    // header, start point, seven steps, termination line
    assert_eq!(text.lines().count(), 1 + 8 + 1);
    assert_eq!(text.lines().last(), Some("# termination: MaxSteps"));

    let res = run(&[
        "trajectory",
        "--config",
        config,
        "--x0",
        "0,1.5707963267948966,0,0",
        "--step",
        "1.5",
        "--max-steps",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(stderr(&res).contains("warning"), "{}", stderr(&res));
}

#[test]
fn trajectory_from_ill_defined_point_fails_with_verdict() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("traj.csv");
    let res = run(&[
        "trajectory",
        "--config",
        BUILTIN,
        "--x0",
        "0,0,0,0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!res.status.success());
    assert!(stderr(&res).contains("BothSpacelike"), "{}", stderr(&res));
    assert!(!out.exists());
}

#[test]
fn measure_requires_n() {
    let res = run(&["measure", "--config", BUILTIN]);
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("--n"));
    let res = run(&["sample-pairs"]);
    assert_eq!(res.status.code(), Some(2));
    let res = run(&["sample-pairs", "--n", "0"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("--n"));
}

#[test]
fn numeric_flags_are_validated_by_name() {
    for (args, flag) in [
        (vec!["verify", "--mass", "0"], "--mass"),
        (
            vec!["sample-pairs", "--n", "10", "--sigma", "-1"],
            "--sigma",
        ),
        (
            vec!["sample-pairs", "--n", "10", "--node-tol", "abc"],
            "--node-tol",
        ),
        (vec!["classify", "--config", BUILTIN, "--x", "1,2,3"], "--x"),
        (
            vec![
                "scan",
                "--config",
                BUILTIN,
                "--resolution",
                "0",
                "--out",
                "x.csv",
            ],
            "--resolution",
        ),
        (
            vec!["sample-pairs", "--n", "10", "--threads", "0"],
            "--threads",
        ),
    ] {
        let res = run(&args);
        assert_eq!(res.status.code(), Some(2), "{args:?}");
        assert!(stderr(&res).contains(flag), "{args:?}: {}", stderr(&res));
    }
}

#[test]
fn seed_changes_samples() {
    let a = stdout_json(&run(&["sample-pairs", "--n", "5000", "--seed", "1"]));
    let b = stdout_json(&run(&["sample-pairs", "--n", "5000", "--seed", "2"]));
    let again = stdout_json(&run(&["sample-pairs", "--n", "5000", "--seed", "1"]));
    assert_eq!(a, again);
    assert_ne!(a["counts"], b["counts"]);
    assert_eq!(a["manifest"]["seed"], 1);
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let snapshot = |threads: &str| -> Vec<Vec<u8>> {
        let scan = dir.path().join("scan.csv");
        let traj = dir.path().join("traj.csv");
        let meas = dir.path().join("measure.json");
        for args in [
            vec![
                "scan",
                "--config",
                BUILTIN,
                "--resolution",
                "9",
                "--out",
                scan.to_str().unwrap(),
            ],
            vec![
                "trajectory",
                "--config",
                BUILTIN,
                "--x0",
                "-0.5,0.2,0,0",
                "--step",
                "0.005",
                "--max-steps",
                "500",
                "--out",
                traj.to_str().unwrap(),
            ],
            vec![
                "measure",
                "--config",
                BUILTIN,
                "--n",
                "20000",
                "--seed",
                "3",
                "--out",
                meas.to_str().unwrap(),
            ],
        ] {
            let mut args = args;
            args.extend(["--threads", threads]);
            let res = run(&args);
            assert!(res.status.success(), "{}", stderr(&res));
        }
        [
            scan.clone(),
            dir.path().join("scan.csv.manifest.json"),
            traj.clone(),
            dir.path().join("traj.csv.manifest.json"),
            meas,
        ]
        .iter()
        .map(|p| fs::read(p).unwrap())
        .collect()
    };
    let one = snapshot("1");
    assert_eq!(one, snapshot("1"));
    assert_eq!(one, snapshot("4"));
}

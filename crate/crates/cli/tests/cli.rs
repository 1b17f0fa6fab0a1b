use std::fs;
use std::path::Path;

use quartic_nls::experiments::acceptance::SEED;
use quartic_nls::experiments::with_workers;
use quartic_nls_cli::manifest::{verify, MANIFEST};
use quartic_nls_cli::{run, EXIT_ACCEPTANCE, EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME};
use serde_json::Value;

fn qnls(args: &[&str]) -> i32 {
    run(std::iter::once("qnls").chain(args.iter().copied()))
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_slice(&fs::read(dir.join(MANIFEST)).unwrap()).unwrap()
}

const SMALL: [&str; 10] = ["--grid", "8", "--half-width", "8", "--samples", "6", "--window", "0.05", "--dt", "0.0125"];

#[test]
fn linear_simulation_emits_only_free_norms() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let mut args = vec!["simulate", "--nonlinear", "false", "--output-dir", out.to_str().unwrap()];
    args.extend(SMALL);
    assert_eq!(qnls(&args), EXIT_OK);
    let csv = fs::read_to_string(out.join("simulate.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,z_l2,z_hs"));
    assert_eq!(lines.count(), 5);
    assert!(verify(&out).unwrap().is_empty());
    let m = manifest(&out);
    assert_eq!(m["files"].as_array().unwrap().len(), 2);
}

#[test]
fn flags_override_the_file_and_are_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("run.toml");
    let out = tmp.path().join("out");
    fs::write(&file, format!("dim = 4\ngrid = 8\nhalf_width = 8.0\nwindow = 0.05\ndt = 0.0125\noutput_dir = {:?}\n", out)).unwrap();
    assert_eq!(qnls(&["simulate", "--config", file.to_str().unwrap(), "--dim", "3"]), EXIT_OK);
    let m = manifest(&out);
    assert_eq!(m["config"]["dim"], 3);
    assert_eq!(m["overrides"][0]["key"], "dim");
    assert_eq!(m["overrides"][0]["file"], 4);
    // No seed anywhere: the default is used and echoed.
    assert_eq!(m["seed"], SEED);
    assert!(m["config"]["defaulted"].as_array().unwrap().iter().any(|k| k == "seed"));
}

#[test]
fn configuration_errors_write_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = out.to_str().unwrap();
    assert_eq!(qnls(&["ensemble", "--samples", "0", "--output-dir", o]), EXIT_CONFIG);
    assert_eq!(qnls(&["norms", "--dim", "3", "--delta", "0.2", "--output-dir", o]), EXIT_CONFIG);
    assert_eq!(qnls(&["norms", "--dim", "2", "--output-dir", o]), EXIT_CONFIG);
    assert_eq!(qnls(&["scaling", "--dim", "3", "--output-dir", o]), EXIT_CONFIG);
    assert_eq!(qnls(&["validate", "--criteria", "13", "--output-dir", o]), EXIT_CONFIG);
    assert_eq!(qnls(&["simulate", "--half-width", "0.5", "--window", "10", "--output-dir", o]), EXIT_CONFIG);
    assert_eq!(qnls(&["simulate", "--dim", "3", "--unknown"]), EXIT_CONFIG);
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "dimension = 3\n").unwrap();
    assert_eq!(qnls(&["simulate", "--config", bad.to_str().unwrap()]), EXIT_CONFIG);
    assert!(!out.exists());
}

#[test]
fn runtime_failures_leave_no_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let mut args = vec!["simulate", "--amplitude", "1e4", "--sign", "minus", "--output-dir", out.to_str().unwrap()];
    args.extend(SMALL);
    assert_eq!(qnls(&args), EXIT_RUNTIME);
    assert!(!out.join(MANIFEST).exists());
    assert!(!out.join("simulate.csv").exists());
}

#[test]
fn reruns_reproduce_digests_for_any_worker_count() {
    let tmp = tempfile::tempdir().unwrap();
    let mut digests = Vec::new();
    for (i, n) in [1usize, 3, 1].into_iter().enumerate() {
        let out = tmp.path().join(format!("run{i}"));
        let mut args = vec!["ensemble", "--output-dir", out.to_str().unwrap()];
        // Tail fits need at least 100 samples.
        args.extend(SMALL.iter().map(|a| if *a == "6" { "128" } else { a }));
        assert_eq!(with_workers(n, || qnls(&args)), EXIT_OK);
        assert!(verify(&out).unwrap().is_empty());
        digests.push(manifest(&out)["digest"].clone());
    }
    assert!(digests.windows(2).all(|w| w[0] == w[1]), "{digests:?}");
}

#[test]
fn rerun_into_the_same_directory_replaces_the_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = out.to_str().unwrap();
    let mut args = vec!["norms", "--output-dir", o];
    args.extend(SMALL);
    assert_eq!(qnls(&args), EXIT_OK);
    args.extend(["--s", "0.5"]);
    assert_eq!(qnls(&args), EXIT_OK);
    assert_eq!(manifest(&out)["config"]["s"], 0.5);
    assert!(verify(&out).unwrap().is_empty());
    let leftovers = fs::read_dir(&out).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with('.')).count();
    assert_eq!(leftovers, 0);
}

#[test]
fn scaling_and_validate_subsets_run() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("scaling");
    let args = [
        "scaling", "--dim", "4", "--grid", "8", "--half-width", "3.14159", "--alpha", "3", "--samples", "8",
        "--window", "0.05", "--dt", "0.0125", "--output-dir", out.to_str().unwrap(),
    ];
    assert_eq!(qnls(&args), EXIT_OK);
    let csv = fs::read_to_string(out.join("scaling.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);

    let out = tmp.path().join("validate");
    assert_eq!(qnls(&["validate", "--criteria", "1,2", "--output-dir", out.to_str().unwrap()]), EXIT_OK);
    let lines = fs::read_to_string(out.join("acceptance.txt")).unwrap();
    assert!(lines.lines().all(|l| l.starts_with("PASS")));
    assert!(verify(&out).unwrap().is_empty());
}

#[test]
fn small_ensembles_are_rejected_before_writing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let mut args = vec!["ensemble", "--output-dir", out.to_str().unwrap()];
    args.extend(SMALL);
    assert_eq!(qnls(&args), EXIT_CONFIG);
    assert!(!out.exists());
    assert_ne!(EXIT_ACCEPTANCE, EXIT_CONFIG);
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rcqec_analysis::{FitOptions, RunConfig};
use rcqec_cli::{config_hash, read_record, write_outputs, Manifest, FIT_FILE, MANIFEST_FILE, RECORD_FILE};

fn rcqec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcqec"))
        .args(args)
        .env("RCQEC_THREADS", "2")
        .output()
        .unwrap()
}

fn small_spacetime(out: &Path, seed: &str) -> Output {
    rcqec(&[
        "spacetime",
        "--n",
        "12",
        "--depths",
        "1,2",
        "--ec-rounds",
        "1",
        "--p-grid",
        "0.01,0.02,0.03,0.04",
        "--trials",
        "30",
        "--batches",
        "10",
        "--seed",
        seed,
        "--out-dir",
        out.to_str().unwrap(),
    ])
}

#[test]
fn run_writes_record_fit_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = small_spacetime(dir.path(), "3");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in [RECORD_FILE, FIT_FILE, MANIFEST_FILE] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(names.iter().all(|n| !n.ends_with(".tmp")), "{names:?}");
    let manifest: Manifest = serde_json::from_slice(&fs::read(dir.path().join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(manifest.seed, 3);
    assert_eq!(manifest.experiment, "spacetime");
    assert_eq!(manifest.config.experiment.trials(), 30);
    assert_eq!(manifest.config_hash, config_hash(&manifest.config).unwrap());
    assert_eq!(manifest.version, rcqec_cli::VERSION);
    let record = read_record(&dir.path().join(RECORD_FILE)).unwrap();
    assert_eq!(record.config_hash, manifest.config_hash);
    assert_eq!(record.points.len(), 8);
    assert!(record.points.iter().all(|p| p.trials == 30));
}

#[test]
fn same_seed_gives_identical_files_and_other_seeds_differ() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    assert!(small_spacetime(a.path(), "5").status.success());
    assert!(small_spacetime(b.path(), "5").status.success());
    assert!(small_spacetime(c.path(), "6").status.success());
    for f in [RECORD_FILE, FIT_FILE, MANIFEST_FILE] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    assert_ne!(fs::read(a.path().join(RECORD_FILE)).unwrap(), fs::read(c.path().join(RECORD_FILE)).unwrap());
}

#[test]
fn fit_subcommand_reproduces_the_stored_fit() {
    let run = tempfile::tempdir().unwrap();
    assert!(small_spacetime(run.path(), "7").status.success());
    let refit = tempfile::tempdir().unwrap();
    let out = rcqec(&[
        "fit",
        run.path().join(RECORD_FILE).to_str().unwrap(),
        "--out-dir",
        refit.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read(run.path().join(FIT_FILE)).unwrap(), fs::read(refit.path().join(FIT_FILE)).unwrap());
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    fs::write(
        &cfg_path,
        r#"{"seed": 2, "batches": 5, "experiment": "entropy", "n": 12, "rate": 0.3333333333333333, "d": 2,
            "qs": [1, 2], "p_grid": [0.0, 0.05], "trials": 10}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = rcqec(&[
        "entropy",
        "--config",
        cfg_path.to_str().unwrap(),
        "--trials",
        "6",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: Manifest = serde_json::from_slice(&fs::read(out_dir.join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(manifest.config.experiment.trials(), 6);
    assert_eq!(manifest.config.seed, 2);
    // one error rate below four: no fit, and the manifest says why
    assert!(!out_dir.join(FIT_FILE).exists());
    assert!(manifest.fit_skipped.is_some());
    let echoed: RunConfig = manifest.config.clone();
    assert_eq!(echoed.fit, FitOptions::default());
}

#[test]
fn mismatched_or_invalid_configs_fail_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    fs::write(&cfg_path, r#"{"seed": 1, "experiment": "entropy"}"#).unwrap();
    let out_dir = dir.path().join("out");
    for args in [
        vec!["spacetime", "--config", cfg_path.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()],
        vec!["entropy", "--config", cfg_path.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()],
        vec!["mutual-info", "--p-grid", "1.5", "--out-dir", out_dir.to_str().unwrap()],
        vec!["code-capacity", "--decoder", "guess", "--out-dir", out_dir.to_str().unwrap()],
        vec!["fit", dir.path().join("missing.csv").to_str().unwrap()],
    ] {
        let out = rcqec(&args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert!(!out_dir.exists());
}

#[test]
fn threshold_summary_lists_rate_and_hashing_bound() {
    let run = tempfile::tempdir().unwrap();
    assert!(small_spacetime(run.path(), "8").status.success());
    let out_dir = tempfile::tempdir().unwrap();
    let out = rcqec(&["threshold-summary", run.path().to_str().unwrap(), "--out-dir", out_dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(out_dir.path().join("threshold-summary.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "rate,p_c,sigma,p_hashing");
    let fields: Vec<f64> = lines[1].split(',').map(|f| f.parse().unwrap()).collect();
    assert!((fields[0] - 1.0 / 3.0).abs() < 1e-12);
    assert!((fields[3] - rcqec_analysis::hashing_bound(1.0 / 3.0).unwrap()).abs() < 1e-12);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), table);
}

#[test]
fn failed_renames_leave_no_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    // a directory where the second file should go makes its rename fail
    fs::create_dir(dir.path().join("b.txt")).unwrap();
    fs::write(dir.path().join("b.txt").join("keep"), b"x").unwrap();
    let res = write_outputs(dir.path(), &[("a.txt", b"1".to_vec()), ("b.txt", b"2".to_vec())]);
    assert!(res.is_err());
    assert!(!dir.path().join("a.txt").exists());
    assert!(!dir.path().join(".a.txt.tmp").exists());
    assert!(!dir.path().join(".b.txt.tmp").exists());
}

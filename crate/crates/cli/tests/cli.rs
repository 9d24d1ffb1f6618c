use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_avalanche-lab"))
        .args(args)
        .env_remove("AVALANCHE_THREADS")
        .output()
        .expect("spawn avalanche-lab")
}

fn ok(args: &[&str]) -> Output {
    let out = lab(args);
    assert!(out.status.success(), "{args:?} failed:\n{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn manifest_without_time(dir: &Path) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(&read(dir, "manifest.json")).unwrap();
    v.as_object_mut().unwrap().remove("wall_time_secs");
    v["config"].as_object_mut().unwrap().remove("out");
    v
}

#[test]
fn same_seed_reproduces_every_file() {
    let tmp = tempfile::tempdir().unwrap();
    for kind in ["fp", "ffwor", "ffwr", "impurity", "birth"] {
        let a = tmp.path().join(format!("{kind}-a"));
        let b = tmp.path().join(format!("{kind}-b"));
        for dir in [&a, &b] {
            ok(&[
                "simulate", kind, "--region", "ball:12", "--threshold", "40", "--zeta", "0.05", "--t", "0.6",
                "--horizon", "2", "--replicas", "3", "--seed", "77", "--out", dir.to_str().unwrap(),
            ]);
        }
        assert_eq!(read(&a, "data.csv"), read(&b, "data.csv"), "{kind}");
        assert_eq!(manifest_without_time(&a), manifest_without_time(&b), "{kind}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let tmp = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "8"] {
        let dir = tmp.path().join(threads);
        ok(&[
            "simulate", "ffwor", "--region", "lozenge:16", "--zeta", "0.02", "--replicas", "6", "--seed", "5",
            "--threads", threads, "--out", dir.to_str().unwrap(),
        ]);
        outputs.push((read(&dir, "data.csv"), read(&dir, "report.csv")));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn threshold_above_region_size_never_freezes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("big-n");
    ok(&["simulate", "fp", "--region", "lozenge:6", "--threshold", "1000", "--replicas", "4", "--out", dir.to_str().unwrap()]);
    let data = read(&dir, "data.csv");
    assert!(data.lines().count() > 1);
    assert!(!data.lines().any(|l| l.split(',').nth(1) == Some("freeze")));
}

#[test]
fn invalid_configuration_is_rejected() {
    for args in [
        &["simulate", "ffwor", "--zeta", "-1"][..],
        &["simulate", "fp", "--replicas", "0"],
        &["estimate", "pi1", "--p", "1.5"],
        &["simulate", "fp", "--region", "disk:4"],
        &["scales", "psi", "--r", "-2"],
    ] {
        let out = lab(args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
    }

    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "threshold = 10\nno_such_field = 3\n").unwrap();
    let out = lab(&["simulate", "fp", "--config", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_field"));
}

#[test]
fn config_file_matches_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "region = \"lozenge:10\"\nthreshold = 25\nrule = \"modified\"\nreplicas = 2\nseed = 9\n").unwrap();
    let from_file = tmp.path().join("file");
    let from_flags = tmp.path().join("flags");
    ok(&["simulate", "fp", "--config", cfg.to_str().unwrap(), "--out", from_file.to_str().unwrap()]);
    ok(&[
        "simulate", "fp", "--region", "lozenge:10", "--threshold", "25", "--rule", "modified", "--replicas", "2",
        "--seed", "9", "--out", from_flags.to_str().unwrap(),
    ]);
    assert_eq!(read(&from_file, "data.csv"), read(&from_flags, "data.csv"));

    // The manifest's config block is itself a valid config file (JSON).
    let m: serde_json::Value = serde_json::from_str(&read(&from_file, "manifest.json")).unwrap();
    let replay = tmp.path().join("replay.json");
    std::fs::write(&replay, m["config"].to_string()).unwrap();
    let again = tmp.path().join("again");
    ok(&["simulate", "fp", "--config", replay.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(read(&from_file, "data.csv"), read(&again, "data.csv"));
}

#[test]
fn oracle_suite_catches_injected_fault() {
    let out = ok(&["verify", "oracle"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
    let out = lab(&["verify", "oracle", "--inject-fault", "3"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn scales_suite_is_fast() {
    let start = Instant::now();
    let out = lab(&["verify", "scales"]);
    assert!(start.elapsed().as_secs_f64() < 60.0);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn estimates_and_scales_emit_json() {
    for args in [
        &["estimate", "pi1", "--p", "0.5", "--radius", "8", "--samples", "200"][..],
        &["estimate", "length", "--p", "0.7", "--samples", "200"],
        &["scales", "t-infinity", "--param", "1000"],
        &["scales", "schedule", "--ln-param", "1e6"],
        &["scales", "exceptional", "--model", "ff", "--param", "0.001"],
        &["scales", "constants"],
    ] {
        let out = ok(args);
        let v: serde_json::Value = serde_json::from_slice(&out.stdout)
            .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stdout)));
        assert!(v.is_object() || v.is_array());
    }
}

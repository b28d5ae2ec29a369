//! End-to-end tests of the `atlab` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn atlab(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_atlab"));
    cmd.args(args).env_remove("ATLAB_OUT_DIR");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const THM21: &str = "experiment = \"thm21\"\nkappa = 1.0\nt_grid = [0.5, 1.0, 2.0]\nseed = 42\n";

#[test]
fn list_prints_the_catalog() {
    let out = atlab(&["list"], &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 10);
    for id in ["thm21", "thm25", "btp", "exit", "skbm", "densities"] {
        assert!(text.contains(id), "{id} missing from\n{text}");
    }

    let out = atlab(&["list", "--json"], &[]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 10);
}

#[test]
fn unknown_experiment_suggests_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let out = atlab(&["run", "--experiment", "thm99", "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("thm21") && err.contains("atlab list"), "{err}");
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), THM21);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = atlab(&["run", "--experiment", "thm21", "--config", &config, "--out", out.to_str().unwrap()], &[]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    }
    for name in ["thm21.json", "thm21.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }

    let report: serde_json::Value = serde_json::from_slice(&fs::read(a.join("thm21.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["seed"], 42);
    assert_eq!(report["pass"], true);
    let csv = fs::read_to_string(a.join("thm21.csv")).unwrap();
    assert!(csv.starts_with("section,label,t,x,value,error,reference"), "{csv}");
}

#[test]
fn seed_flag_changes_monte_carlo_records() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), THM21);
    let out = |seed: &str, sub: &str| {
        let path = dir.path().join(sub);
        let o = atlab(
            &["run", "--experiment", "thm21", "--config", &config, "--seed", seed, "--out", path.to_str().unwrap()],
            &[],
        );
        assert!(o.status.success());
        fs::read(path.join("thm21.csv")).unwrap()
    };
    assert_ne!(out("1", "s1"), out("2", "s2"));
}

#[test]
fn output_dir_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), THM21);
    let target = dir.path().join("env-out");
    let o = atlab(&["run", "--experiment", "thm21", "--config", &config], &[("ATLAB_OUT_DIR", &target)]);
    assert!(o.status.success());
    assert!(target.join("thm21.json").is_file());
}

#[test]
fn failing_criterion_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &format!("{THM21}tolerance = 1e-30\n"));
    let o = atlab(&["run", "--experiment", "thm21", "--config", &config, "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("thm21.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
}

#[test]
fn bad_configs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for body in ["kapa = 1.0\n", "experiment = \"btp\"\n", "seed = \"one\"\n"] {
        let config = write_config(dir.path(), body);
        let o = atlab(&["run", "--experiment", "thm21", "--config", &config, "--out", out], &[]);
        assert_eq!(o.status.code(), Some(2), "{body}");
    }
}

//! End-to-end runs of the `geolab` binary: exit codes, cache handling,
//! determinism across thread counts and configuration layering.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

struct Scratch(PathBuf);

impl Scratch {
    fn new(name: &str) -> Self {
        let p = std::env::temp_dir().join(format!("geolab-cli-{name}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&p);
        std::fs::create_dir_all(&p).unwrap();
        Scratch(p)
    }

    fn path(&self) -> &Path {
        &self.0
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn geolab(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geolab"))
        .args(args)
        .arg("--cache-dir")
        .arg(cache)
        .env_remove("GEOLAB_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn missing_cache_names_the_fix() {
    let dir = Scratch::new("missing");
    let o = geolab(dir.path(), &["periods", "--N", "30"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("geolab enumerate --N 30"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = Scratch::new("usage");
    for args in [
        &["enumerate", "--N", "30", "--tol", "1e-1"][..],
        &["enumerate", "--N", "0"],
        &["no-such-command"],
        &["verify", "--suite", "other"],
    ] {
        assert_eq!(geolab(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn enumerate_then_periods_and_bridge_deterministic_across_threads() {
    let dir = Scratch::new("bridge");
    let o = geolab(dir.path(), &["enumerate", "--N", "40"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("# "));
    let p = geolab(dir.path(), &["periods", "--N", "40"]);
    assert!(p.status.success(), "{}", stderr(&p));
    let one = geolab(dir.path(), &["bridge", "--N", "40", "--sample", "30", "--threads", "1"]);
    let many = geolab(dir.path(), &["bridge", "--N", "40", "--sample", "30", "--threads", "3"]);
    assert!(one.status.success(), "{}", stderr(&one));
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn corrupt_cache_is_recomputed() {
    let dir = Scratch::new("corrupt");
    assert!(geolab(dir.path(), &["enumerate", "--N", "30"]).status.success());
    let clean = stdout(&geolab(dir.path(), &["periods", "--N", "30"]));
    let edges = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.file_name().unwrap().to_string_lossy().starts_with("edges"))
        .expect("edge cache written");
    let mut bytes = std::fs::read(&edges).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x5a;
    std::fs::write(&edges, bytes).unwrap();
    let o = geolab(dir.path(), &["periods", "--N", "30"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("recomputing"), "{}", stderr(&o));
    assert_eq!(stdout(&o), clean);
}

#[test]
fn config_file_is_overridden_by_flags_and_echoed() {
    let dir = Scratch::new("config");
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# test run\nN = 25\nseed = 3\nformat = json\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = geolab(dir.path(), &["enumerate", "--config", cfg, "--N", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["command"], "enumerate");
    assert_eq!(v["config"]["N"], 20);
    assert_eq!(v["config"]["seed"], 3);
    std::fs::write(dir.path().join("bad.conf"), "colour = red\n").unwrap();
    let bad = dir.path().join("bad.conf");
    assert_eq!(geolab(dir.path(), &["enumerate", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn reports_written_to_output_directory() {
    let dir = Scratch::new("out");
    let out = dir.path().join("reports");
    let o = geolab(dir.path(), &["enumerate", "--N", "20", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let files: Vec<_> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert!(!files.is_empty());
    assert!(files.iter().all(|f| f.to_string_lossy().starts_with("enumerate_")));
}

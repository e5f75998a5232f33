use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn eistwist(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eistwist"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn empty_grid_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), "level = 1\n[grid]\nre = [0.0, 1.0, 0]\n").unwrap();
    let out = eistwist(&["run", "group", "--config", "run.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid is empty"));

    let out = eistwist(&["run", "group", "--level", "1", "--grid", "-1:1:3,0:1:0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(eistwist(&["run", "group", "--level", "12"], dir.path()).status.code(), Some(2));
    assert_eq!(eistwist(&["run", "group", "--tolerance", "-1"], dir.path()).status.code(), Some(2));
    fs::write(dir.path().join("bad.toml"), "levle = 37\n").unwrap();
    assert_eq!(eistwist(&["run", "group", "--config", "bad.toml"], dir.path()).status.code(), Some(2));
    // no internal newform at level 30
    let out = eistwist(&["run", "psi", "--level", "30", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cusps_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = eistwist(&["cusps", "--level", "30"], dir.path());
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let cusps = v.as_array().unwrap();
    assert_eq!(cusps.len(), 4);
    assert_eq!(cusps[0]["representative"], "Infinity");
    assert!(cusps.iter().all(|c| c["certified"] == true));

    let out = eistwist(&["cusps", "--level", "37"], dir.path());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
}

#[test]
fn group_suite_at_level_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = eistwist(&["run", "group", "--level", "1", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report = json(&dir.path().join("o/group.json"));
    assert_eq!(report["pass"], true);
    assert_eq!(report["level"], 1);
    assert!(report["checks"].as_array().unwrap().len() >= 4);
    let meta = json(&dir.path().join("o/group.meta.json"));
    assert!(meta["wall_seconds"].as_f64().unwrap() >= 0.0);
    assert!(report.get("wall_seconds").is_none());
}

#[test]
fn warm_cache_reruns_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["run", "psi", "--level", "37", "--out", "o", "--cache", "c"];
    assert_eq!(eistwist(&args, dir.path()).status.code(), Some(0));
    let cold = fs::read(dir.path().join("o/psi.json")).unwrap();
    let saved = json(&dir.path().join("o/psi.meta.json"))["psi_cache"]["saved"].as_u64().unwrap();
    assert!(saved > 0);

    assert_eq!(eistwist(&args, dir.path()).status.code(), Some(0));
    let warm = fs::read(dir.path().join("o/psi.json")).unwrap();
    assert_eq!(cold, warm);
    let meta = json(&dir.path().join("o/psi.meta.json"));
    assert_eq!(meta["psi_cache"]["loaded"].as_u64().unwrap(), saved);
}

#[test]
fn corrupted_cache_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["run", "psi", "--level", "37", "--out", "o", "--cache", "c"];
    assert_eq!(eistwist(&args, dir.path()).status.code(), Some(0));
    let reference = fs::read(dir.path().join("o/psi.json")).unwrap();

    let file = dir.path().join("c/psi-37.bin");
    let mut bytes = fs::read(&file).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0xff;
    fs::write(&file, &bytes).unwrap();

    let out = eistwist(&args, dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("checksum"));
    let meta = json(&dir.path().join("o/psi.meta.json"));
    assert!(meta["psi_cache"]["rejected"].is_string());
    assert_eq!(meta["psi_cache"]["loaded"], 0);
    assert_eq!(fs::read(dir.path().join("o/psi.json")).unwrap(), reference);

    // the rewritten file loads cleanly
    assert_eq!(eistwist(&args, dir.path()).status.code(), Some(0));
    let meta = json(&dir.path().join("o/psi.meta.json"));
    assert!(meta["psi_cache"]["rejected"].is_null());
    assert!(meta["psi_cache"]["loaded"].as_u64().unwrap() > 0);
}

#[test]
fn emit_scattering_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = eistwist(&["emit", "scattering", "--level", "1"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re_s,im_s,re_closed,im_closed,re_direct,im_direct,direct_error"));
    assert!(lines.count() >= 5);
}

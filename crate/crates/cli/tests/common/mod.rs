#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

pub fn sctkit() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sctkit"));
    c.env("SCTKIT_LOG", "error");
    c
}

pub fn run_in(dir: &Path, args: &[&str]) -> Output {
    sctkit().current_dir(dir).args(args).output().expect("binary runs")
}

pub fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// A temp dir holding the bundled supervisor as `super.aut` / `super.sup`.
pub fn synthesized() -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["synth", "--out", "super"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let sup = dir.path().join("super.sup");
    (dir, sup)
}

const HEALTHY: [(&str, &str); 10] = [
    ("INS", "ATE1"),
    ("GPS", "ATE3"),
    ("barometer", "ATE5"),
    ("compass", "ATE7"),
    ("propulsors", "ATE9"),
    ("RC", "ATE11"),
    ("battery", "ATE13"),
    ("altitude", "ATE17"),
    ("distance", "ATE19"),
    ("throttle", "ATE21"),
];

/// One scenario frame in the file format, nominal except `overrides`.
pub fn frame_json(stick: &str, switch: &str, power: Option<&str>, overrides: &[(&str, &str)]) -> serde_json::Value {
    let mut health = serde_json::Map::new();
    for (g, e) in HEALTHY {
        let e = overrides.iter().find(|(o, _)| *o == g).map_or(e, |(_, v)| v);
        health.insert(g.into(), e.into());
    }
    serde_json::json!({ "stick": stick, "switch": switch, "power": power, "health": health })
}

// SPDX-License-Identifier: MIT OR Apache-2.0

//! Helpers for driving the `mxpbf` binary.

#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

/// F1 of the golden chained run below, recorded from a seeded run.
pub const GOLDEN_F1: f64 = 1.0;
pub const GOLDEN_POINTS: &[usize] = &[101];

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mxpbf"))
}

pub fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("spawn mxpbf")
}

pub fn run_ok(args: &[&str], dir: &Path) -> Output {
    let out = run(args, dir);
    assert!(
        out.status.success(),
        "mxpbf {args:?} failed ({:?}): {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Outputs of one golden chain.
pub struct Chain {
    pub report: String,
    pub evaluation: String,
    pub f1: f64,
    pub points: Vec<usize>,
}

/// simulate -> detect-mean -> evaluate inside `dir` with relative paths, so
/// reports from different runs in the same directory are comparable.
pub fn golden_chain(dir: &Path, workers: Option<usize>) -> Chain {
    let w = workers.map(|w| w.to_string());
    let mut prefix: Vec<&str> = Vec::new();
    if let Some(w) = &w {
        prefix.extend(["--workers", w.as_str()]);
    }
    let with = |rest: &[&str]| -> Vec<String> { prefix.iter().chain(rest).map(|s| s.to_string()).collect() };
    let call = |args: Vec<String>| {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        run_ok(&refs, dir)
    };
    call(with(&[
        "simulate", "-o", "data.csv", "--kind", "mean", "-n", "200", "-p", "50", "--signal", "2", "--seed", "7",
    ]));
    call(with(&[
        "detect-mean",
        "-i",
        "data.csv",
        "-o",
        "report.json",
        "--windows",
        "25,60,100",
        "--seed",
        "11",
    ]));
    call(with(&[
        "evaluate",
        "-r",
        "report.json",
        "-t",
        "data.truth.json",
        "-o",
        "eval.json",
    ]));
    let report = std::fs::read_to_string(dir.join("report.json")).unwrap();
    let evaluation = std::fs::read_to_string(dir.join("eval.json")).unwrap();
    let eval: serde_json::Value = serde_json::from_str(&evaluation).unwrap();
    let row = &eval["rows"][0];
    Chain {
        f1: row["f1"].as_f64().unwrap(),
        points: row["detected"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap() as usize)
            .collect(),
        report,
        evaluation,
    }
}

/// Report text with the `timing` block removed.
pub fn strip_timing(report: &str) -> String {
    let mut v: serde_json::Value = serde_json::from_str(report).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    serde_json::to_string(&v).unwrap()
}

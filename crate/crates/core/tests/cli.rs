//! End-to-end runs of the command-line binary.

use std::path::Path;
use std::process::{Command, Output};

use acebounds::cli::THREADS_ENV;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acebounds"))
        .args(args)
        .env(THREADS_ENV, "2")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

/// Writes `n` rows of `Z, W, X, Y`. With `direct` the witness drives `Y`
/// by itself; otherwise `W` acts on `Y` only through `X`.
fn write_csv(path: &Path, n: usize, direct: bool, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::from("Z,W,X,Y\n");
    for _ in 0..n {
        let z = rng.random_bool(0.5) as u8;
        let w = rng.random_bool(0.3 + 0.3 * z as f64) as u8;
        let x = rng.random_bool(0.15 + 0.7 * w as f64) as u8;
        let py = if direct {
            0.05 + 0.9 * w as f64
        } else {
            0.2 + 0.4 * x as f64 + 0.2 * z as f64
        };
        let y = rng.random_bool(py) as u8;
        text.push_str(&format!("{z},{w},{x},{y}\n"));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn bounds_echo_config_and_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("chain.csv");
    write_csv(&csv, 2000, false, 1);
    let out = run(&[
        "bounds", "--input", csv.to_str().unwrap(), "--x", "X", "--y", "Y", "--witness", "W", "--z", "Z",
        "--samples", "100", "--seed", "3", "--engine", "backsub",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["workers"], 2);
    let cfg = &doc["config"];
    assert_eq!(cfg["command"], "bounds");
    assert_eq!(cfg["witness"], "W");
    assert_eq!(cfg["z"][0], "Z");
    assert_eq!(cfg["data"]["x"], "X");
    assert_eq!(cfg["sampling"]["seed"], 3);
    assert_eq!(cfg["sampling"]["samples"], 100);
    assert_eq!(cfg["sampling"]["engine"], "backsub");
    assert_eq!(cfg["relax"]["eps_w"], 0.2);
    assert_eq!(doc["result"]["accepted"], true);
    let iv = &doc["result"]["interval"];
    assert!(iv["lower"].as_f64().unwrap() <= iv["upper"].as_f64().unwrap());
}

#[test]
fn bounds_report_rejection_with_its_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("direct.csv");
    write_csv(&csv, 3000, true, 2);
    let out_path = dir.path().join("out.json");
    let out = run(&[
        "bounds", "--input", csv.to_str().unwrap(), "--x", "X", "--y", "Y", "--witness", "W",
        "--eps-w", "0.02", "--eps-x", "0.02", "--eps-y", "0.02", "--samples", "100",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["result"]["accepted"], false);
    assert!(doc["result"]["rejection_rate"].as_f64().unwrap() > 0.95);
}

#[test]
fn search_with_no_candidates_is_a_result() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("chain.csv");
    write_csv(&csv, 500, false, 3);
    let out = run(&[
        "search", "--input", csv.to_str().unwrap(), "--x", "X", "--y", "Y", "--pool", "Z,W",
        "--forbid-witness", "Z,W", "--samples", "50",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["config"]["command"], "search");
    assert_eq!(doc["result"]["n_results"], 0);
    assert!(doc["result"]["summary"].is_null());
}

#[test]
fn search_finds_the_chain_witness() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("chain.csv");
    write_csv(&csv, 3000, false, 4);
    let out = run(&[
        "search", "--input", csv.to_str().unwrap(), "--x", "X", "--y", "Y", "--samples", "100",
        "--engine", "backsub",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let results = doc["result"]["results"].as_array().unwrap();
    assert!(results.iter().any(|r| r["witness"] == "W"), "{results:?}");
}

#[test]
fn bad_inputs_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("chain.csv");
    write_csv(&csv, 100, false, 5);
    let path = csv.to_str().unwrap();

    let out = run(&["bounds", "--input", path, "--x", "X", "--y", "Y", "--witness", "W", "--eps-w", "1.5"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["bounds", "--input", path, "--x", "X", "--y", "Y", "--witness", "Q"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["bounds", "--input", path, "--x", "X", "--y", "Y", "--witness", "X"]);
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.path().join("missing.csv");
    let out = run(&["bounds", "--input", missing.to_str().unwrap(), "--x", "X", "--y", "Y", "--witness", "W"]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["bounds", "--x", "X"]);
    assert_eq!(out.status.code(), Some(2));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "W,X,Y\n0,1,2\n").unwrap();
    let out = run(&["bounds", "--input", bad.to_str().unwrap(), "--x", "X", "--y", "Y", "--witness", "W"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seeded_runs_repeat_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("chain.csv");
    write_csv(&csv, 1000, false, 6);
    let args = [
        "bounds", "--input", csv.to_str().unwrap(), "--x", "X", "--y", "Y", "--witness", "W", "--samples", "200",
        "--seed", "9",
    ];
    let one = Command::new(env!("CARGO_BIN_EXE_acebounds")).args(args).env(THREADS_ENV, "1").output().unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_acebounds")).args(args).env(THREADS_ENV, "4").output().unwrap();
    assert_eq!(json(&one)["result"], json(&four)["result"]);
}

//! End-to-end tests of the `apasp` binary: every subcommand, the exit-code
//! contract, and byte-level determinism of outputs and manifests.

use std::path::Path;
use std::process::{Command, Output};

use apasp_core::{exact_apsp, DistanceMatrix, Graph};

fn apasp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apasp"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

fn path_str(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

/// Manifest JSON with the wall-clock fields zeroed out.
fn masked_manifest(path: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(path).expect("manifest should exist");
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    if let Some(arr) = v.get_mut("timings_ms").and_then(|t| t.as_array_mut()) {
        for entry in arr {
            entry["ms"] = serde_json::json!(0.0);
        }
    }
    v
}

#[test]
fn gen_is_deterministic_and_manifested() {
    let dir = tempfile::tempdir().unwrap();
    let g1 = path_str(&dir, "a.el");
    let g2 = path_str(&dir, "b.el");
    let flags = [
        "--model", "gnp", "--n", "40", "--p", "0.2", "--wmin", "1", "--wmax", "50", "--seed", "9",
    ];
    for out in [&g1, &g2] {
        let res = apasp(&[&["gen"], &flags[..], &["-o", out]].concat());
        assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    }
    assert_eq!(
        std::fs::read(&g1).unwrap(),
        std::fs::read(&g2).unwrap(),
        "same flags must generate identical bytes"
    );
    assert!(Path::new(&format!("{g1}.manifest.json")).exists());
}

#[test]
fn gen_grid_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = path_str(&dir, "grid.el");
    let res = apasp(&[
        "gen", "--model", "grid", "--rows", "8", "--cols", "8", "--seed", "1", "-o", &out,
    ]);
    assert_eq!(code(&res), 0);
    let g = Graph::load(&out).unwrap();
    assert_eq!(g.n(), 64);
    assert_eq!(g.m(), 2 * 8 * 7); // rows*(cols-1) + cols*(rows-1)
}

#[test]
fn every_algorithm_runs_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let graph = path_str(&dir, "g.el");
    let res = apasp(&[
        "gen", "--model", "gnp", "--n", "36", "--p", "0.25", "--wmax", "30", "--seed", "4", "-o",
        &graph,
    ]);
    assert_eq!(code(&res), 0);

    // (algo extra-flags, validate alpha, validate additive form)
    let cases: [(&[&str], &str, &str); 6] = [
        (&["--algo", "plus2w1"], "1", "2w1"),
        (&["--algo", "plus2wi", "--k", "1"], "1", "sum:2:2"),
        (&["--algo", "frac73"], "2.3333333334", "none"),
        (&["--algo", "framework", "--ell", "0"], "2", "none"),
        (
            &["--algo", "near-additive", "--eps", "0.25"],
            "1.25",
            "min2w1_4w2",
        ),
        (&["--algo", "tradeoff", "--k", "1"], "1.8", "sum:2:1"),
    ];
    for (i, (flags, alpha, additive)) in cases.iter().enumerate() {
        let matrix = path_str(&dir, &format!("d{i}.bin"));
        let res = apasp(&[&["run"], &flags[..], &["-i", &graph, "-o", &matrix]].concat());
        assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
        let res = apasp(&[
            "validate", "-g", &graph, "-m", &matrix, "--alpha", alpha, "--additive", additive,
        ]);
        assert_eq!(
            code(&res),
            0,
            "algo case {i} violated its guarantee: {}",
            String::from_utf8_lossy(&res.stdout)
        );
    }
}

#[test]
fn run_is_byte_deterministic_including_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let graph = path_str(&dir, "g.el");
    apasp(&[
        "gen", "--model", "gnp", "--n", "32", "--p", "0.2", "--wmax", "20", "--seed", "2", "-o",
        &graph,
    ]);
    let d1 = path_str(&dir, "r1.bin");
    let d2 = path_str(&dir, "r2.bin");
    for out in [&d1, &d2] {
        let res = apasp(&[
            "run", "--algo", "frac73", "-i", &graph, "-o", out, "--seed", "2",
        ]);
        assert_eq!(code(&res), 0);
    }
    assert_eq!(std::fs::read(&d1).unwrap(), std::fs::read(&d2).unwrap());
    let m1 = masked_manifest(&format!("{d1}.manifest.json"));
    let mut m2 = masked_manifest(&format!("{d2}.manifest.json"));
    m2["output"] = m1["output"].clone(); // paths differ by construction
    assert_eq!(m1, m2);
}

#[test]
fn validate_reports_injected_fault() {
    let dir = tempfile::tempdir().unwrap();
    let graph = path_str(&dir, "g.el");
    apasp(&[
        "gen", "--model", "gnp", "--n", "24", "--p", "0.3", "--wmax", "9", "--seed", "6", "-o",
        &graph,
    ]);
    let g = Graph::load(&graph).unwrap();
    let (mut d, _) = exact_apsp(&g);
    // Push one entry below the true distance: a lower-bound breach.
    let (u, v, _) = g.edges()[0];
    let cheat = d.get(u, v) * 0.5;
    d.set_min(u, v, cheat);
    let bad = dir.path().join("bad.bin");
    d.save(&bad).unwrap();
    let res = apasp(&[
        "validate",
        "-g",
        &graph,
        "-m",
        &bad.display().to_string(),
        "--alpha",
        "9",
    ]);
    assert_eq!(code(&res), 1);
    let report: serde_json::Value =
        serde_json::from_slice(&res.stdout).expect("report should be JSON");
    assert_eq!(report["violations"].as_array().unwrap().len(), 1);
    assert_eq!(report["violations"][0]["d"], serde_json::json!(cheat));
}

#[test]
fn exit_codes_for_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    // Missing file -> I/O error.
    let res = apasp(&["oracle", "-i", "/nonexistent/x.el", "-o", "/tmp/never.bin"]);
    assert_eq!(code(&res), 3);
    // Incomplete flag combination -> usage error.
    let res = apasp(&["gen", "--model", "gnp", "-o", "/tmp/never.el"]);
    assert_eq!(code(&res), 2);
    // Unknown algorithm -> usage error (clap).
    let res = apasp(&["run", "--algo", "nosuch", "-i", "x", "-o", "y"]);
    assert_eq!(code(&res), 2);
    // eps > 0 on non-integer weights -> usage error with a message.
    let real = dir.path().join("real.el");
    std::fs::write(&real, "2 1\n0 1 1.5\n").unwrap();
    let res = apasp(&[
        "run",
        "--algo",
        "near-additive",
        "--eps",
        "0.1",
        "-i",
        &real.display().to_string(),
        "-o",
        &path_str(&dir, "never.bin"),
    ]);
    assert_eq!(code(&res), 2);
    assert!(
        String::from_utf8_lossy(&res.stderr).contains("weight class"),
        "rejection should explain the weight-class problem"
    );
}

#[test]
fn oracle_subcommand_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let graph = path_str(&dir, "g.el");
    apasp(&[
        "gen", "--model", "gnp", "--n", "28", "--p", "0.25", "--wmax", "40", "--seed", "11", "-o",
        &graph,
    ]);
    let out = dir.path().join("oracle.bin");
    let res = apasp(&["oracle", "-i", &graph, "-o", &out.display().to_string()]);
    assert_eq!(code(&res), 0);
    let g = Graph::load(&graph).unwrap();
    let from_cli = DistanceMatrix::load(&out).unwrap();
    let (from_lib, _) = exact_apsp(&g);
    assert_eq!(from_cli, from_lib);
}

#[test]
fn mpmm_kernel_check_passes() {
    let res = apasp(&["mpmm", "--size", "20", "--seed", "3", "--eps", "0.5"]);
    assert_eq!(code(&res), 0);
    let report: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(report["sandwich_ok"], serde_json::json!(true));
}

#[test]
fn bench_produces_a_table() {
    let res = apasp(&["bench", "--algo", "plus2w1", "--sizes", "16,24", "--repeats", "1"]);
    assert_eq!(code(&res), 0);
    let table: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    let results = table["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    assert_eq!(results[0]["n"], serde_json::json!(16));
    assert!(results[1]["mean_ms"].as_f64().unwrap() >= 0.0);
}

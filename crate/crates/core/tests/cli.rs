//! End-to-end runs of the `urnlab` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn write_urn(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_urnlab")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixtures() -> (TempDir, String, String, String) {
    let dir = TempDir::new().unwrap();
    let small = write_urn(&dir, "small.json", r#"{"name": "small", "R": [[2,1],[1,2]], "X0": [1,1]}"#);
    let critical = write_urn(&dir, "critical.json", r#"{"R": [[3,1],[1,3]], "X0": [1,1]}"#);
    let large = write_urn(&dir, "large.json", r#"{"R": [[4,1],[1,4]], "X0": [1,1]}"#);
    (dir, small, critical, large)
}

#[test]
fn classify_reports_the_class() {
    let (_dir, small, critical, large) = fixtures();
    for (path, class, nu) in [(&small, "StrictlySmall", 0), (&critical, "CriticallySmall", 1), (&large, "Large", 0)] {
        let out = run(&["--input", path, "--reproducible", "classify"]);
        assert!(out.status.success());
        let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(v["class"], class);
        assert_eq!(v["nu"], nu);
        assert!(v.get("generated_at").is_none());
    }
    let out = run(&["--input", &small, "classify"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["generated_at"].is_u64());
}

#[test]
fn exit_codes() {
    let (dir, small, _critical, large) = fixtures();
    let unbalanced = write_urn(&dir, "bad.json", r#"{"R": [[3,1],[1,2]], "X0": [1,1]}"#);
    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&["--input", &unbalanced, "classify"]), 2);
    assert_eq!(code(&["--input", "/nonexistent/urn.json", "classify"]), 2);
    assert_eq!(code(&["--input", &large, "verify"]), 3);
    assert_eq!(code(&["--input", &small, "moments", "--mc", "--direction", "1,1", "--nmax", "20", "--mc-samples", "10"]), 1);
    assert_eq!(code(&["--input", &small, "--tolerance-eigen", "0.5", "classify"]), 2);
    let out = run(&["--input", &large, "verify"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("large"));
}

#[test]
fn simulation_is_reproducible_across_thread_counts() {
    let (_dir, small, _, _) = fixtures();
    let a = run(&["--input", &small, "--seed", "11", "--nmax", "100", "--threads", "1", "simulate"]);
    let b = run(&["--input", &small, "--seed", "11", "--nmax", "100", "--threads", "4", "simulate"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "n,x_1,x_2");
    assert_eq!(rows.len(), 102);
    let last: Vec<f64> = rows[101].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last[0], 100.0);
    assert_eq!(last[1] + last[2], 302.0);
}

#[test]
fn monte_carlo_output_is_byte_identical() {
    let (_dir, small, _, _) = fixtures();
    let args = |threads: &'static str| {
        run(&[
            "--input", &small, "--reproducible", "--seed", "5", "--nmax", "50", "--mc-samples", "500", "--threads", threads,
            "moments", "--mc", "--direction", "1,-1", "--resamples", "20",
        ])
    };
    let (a, b) = (args("1"), args("3"));
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exact_moments_csv_matches_closed_form() {
    let (dir, small, _, _) = fixtures();
    let out_path = dir.path().join("m.csv");
    let out = run(&[
        "--input", &small, "--format", "csv", "--nmax", "3", "--output", out_path.to_str().unwrap(),
        "moments", "--exact", "--alpha", "0,2",
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(Path::new(&out_path)).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,value,value_im,bound,ratio,stderr"));
    // E u_2^2 for the normalized urn: 0, 1/9, 4/15, 4/9.
    let expected = [0.0, 1.0 / 9.0, 4.0 / 15.0, 4.0 / 9.0];
    for (line, want) in lines.zip(expected) {
        let value: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((value - want).abs() < 1e-15, "{line}");
    }
}

#[test]
fn reduced_polynomial_and_cone() {
    let (_dir, small, _, _) = fixtures();
    let out = run(&["--input", &small, "--reproducible", "qpoly", "--alpha", "0,2"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["eigenvalue"]["exact"], "2/3");
    assert_eq!(v["nu"], 0);
    assert_eq!(v["stable"], true);

    let out = run(&["--input", &small, "--reproducible", "cone", "--point", "2,-1"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["member"], true);
    let out = run(&["--input", &small, "--reproducible", "cone", "--point", "1,-2"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["member"], false);
    assert!(v["certificate"]["Outside"]["face"].is_array());
}

#[test]
fn phi_matrix_csv_is_triangular() {
    let (_dir, small, _, _) = fixtures();
    let out = run(&["--input", &small, "--format", "csv", "phi-matrix", "--alpha", "1,1"]);
    assert!(out.status.success());
    let order = ["0,0", "1,0", "0,1", "2,0", "1,1"];
    let text = stdout(&out);
    for line in text.lines().skip(1) {
        let parts: Vec<&str> = line.split("\",\"").collect();
        let row = parts[0].trim_start_matches('"');
        let col = parts[1].split('"').next().unwrap();
        let pos = |m: &str| order.iter().position(|o| *o == m).unwrap();
        assert!(pos(row) <= pos(col), "{line}");
    }
}

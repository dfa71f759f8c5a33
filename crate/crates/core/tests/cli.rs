use std::path::Path;
use std::process::{Command, Output};

fn usc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_usc")).args(args).output().unwrap()
}

fn netlist(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/netlists").join(name).display().to_string()
}

#[test]
fn spectrum_writes_csv() {
    let out = usc(&["spectrum", "--g", "0.1", "--points", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "omega_z [omega_x],omega_L^A [omega_x],omega_U^A [omega_x],omega_L^B [omega_x],omega_U^B [omega_x]"
    );
    assert_eq!(lines.count(), 5);
}

#[test]
fn json_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rates.json");
    let out = usc(&[
        "lossrates",
        "--netlist",
        &netlist("valid/circuit_b.net"),
        "--points",
        "4",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert_eq!(v["meta"]["columns"].as_array().unwrap().len(), 6);
}

#[test]
fn exit_codes() {
    assert_eq!(usc(&["spectrum", "--points", "3"]).status.code(), Some(1));
    assert_eq!(usc(&["spectrum", "--bogus"]).status.code(), Some(1));
    assert_eq!(usc(&["lossrates", "--netlist", "/nonexistent/x.net"]).status.code(), Some(1));
    assert_eq!(usc(&["--help"]).status.code(), Some(0));

    let bad = usc(&["lossrates", "--netlist", &netlist("invalid/negative_value.net")]);
    assert_eq!(bad.status.code(), Some(2));
    let msg = String::from_utf8(bad.stderr).unwrap();
    assert!(msg.contains("negative_value.net:line 2: error:"), "{msg}");

    assert_eq!(usc(&["lossrates", "--g", "0.1", "--kappa0", "0.5", "--points", "3"]).status.code(), Some(3));
}

#[test]
fn output_is_byte_deterministic_across_thread_counts() {
    let args = ["lossrates", "--g", "0.2", "--flavor", "general", "--points", "33"];
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_usc")).args(args).env("USC_THREADS", threads).output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    assert_eq!(one, run("1"));
}

#[test]
fn master_trace_stays_normalized() {
    let out =
        usc(&["master", "--g", "0.1", "--dims", "8", "8", "--levels", "4", "--t-final", "0.5", "--stride", "1000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let trace: f64 = cols[1..5].iter().sum();
        assert!((trace - 1.0).abs() < 1e-8, "{line}");
    }
}

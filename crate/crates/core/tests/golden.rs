//! Byte comparison of CLI output against files in `tests/golden`.
//! `USC_BLESS=1 cargo test --test golden` rewrites them.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn check(name: &str, cmdline: &str) {
    let args: Vec<String> = cmdline
        .split_whitespace()
        .map(|a| a.replace("@", &root().join("netlists/valid").display().to_string()))
        .collect();
    let out = Command::new(env!("CARGO_BIN_EXE_usc")).args(&args).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    let path = root().join("golden").join(name);
    if std::env::var_os("USC_BLESS").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, &out.stdout).unwrap();
        return;
    }
    let want = fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(out.stdout == want, "{name} differs from {}", path.display());
}

#[test]
fn spectrum_g01() {
    check("spectrum_g01.csv", "spectrum --g 0.1 --points 21");
}

#[test]
fn spectrum_g_sweep() {
    check("spectrum_gsweep.csv", "spectrum --g 0.1 --gmin 0 --gmax 0.3 --wz 1 --points 16");
}

#[test]
fn lossrates_straightforward() {
    check("lossrates_straightforward_g01.csv", "lossrates --g 0.1 --points 21");
}

#[test]
fn lossrates_general() {
    check("lossrates_general_g01.csv", "lossrates --g 0.1 --flavor general --points 21");
}

#[test]
fn lossrates_standard() {
    check("lossrates_standard_g01.csv", "lossrates --g 0.1 --flavor standard --points 21");
}

#[test]
fn lossrates_netlist() {
    check("lossrates_circuit_b.json", "lossrates --netlist @/circuit_b.net --points 11 --format json");
}

#[test]
fn inout_g01() {
    check("inout_g01.csv", "inout --g 0.1 --kappa0 0.01 --dims 12 12 --probe-points 101");
}

#[test]
fn master_g01() {
    check("master_g01.csv", "master --g 0.1 --dims 10 10 --levels 4 --initial eigen:2 --t-final 2 --stride 200");
}

#![allow(clippy::excessive_precision)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use approx::assert_relative_eq;
use usc::netlist::{fabry_perot_params, parse_netlist, serialize, tlr_params, to_model, Resonator, Severity};
use usc::{Variant, Warning};

fn corpus(dir: &str) -> Vec<PathBuf> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/netlists").join(dir);
    let mut files: Vec<PathBuf> = fs::read_dir(root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "net"))
        .collect();
    files.sort();
    files
}

#[test]
fn valid_files_round_trip() {
    let files = corpus("valid");
    assert!(files.len() >= 10);
    for path in files {
        let text = fs::read_to_string(&path).unwrap();
        let spec = parse_netlist(&text).unwrap_or_else(|d| panic!("{}: {:?}", path.display(), d));
        let canon = serialize(&spec);
        let again = parse_netlist(&canon).unwrap();
        assert_eq!(again, spec, "{}", path.display());
        assert_eq!(serialize(&again), canon, "{}", path.display());
        to_model(&spec).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn invalid_files_are_line_anchored() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/netlists/invalid");
    let expected: BTreeMap<String, usize> =
        serde_json::from_str(&fs::read_to_string(root.join("expected_lines.json")).unwrap()).unwrap();
    let files = corpus("invalid");
    assert_eq!(files.len(), expected.len());
    for path in files {
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let text = fs::read_to_string(&path).unwrap();
        let diags = parse_netlist(&text).expect_err(&name);
        let lines = text.lines().count().max(1);
        assert!(diags.iter().all(|d| d.line >= 1 && d.line <= lines), "{name}: {diags:?}");
        assert!(diags.iter().any(|d| d.severity == Severity::Error));
        let want = expected[&name];
        assert!(diags.iter().any(|d| d.line == want), "{name}: expected a diagnostic on line {want}, got {diags:?}");
    }
}

// Hand-substituted values for circuit_a.net.
const OMEGA_Z: f64 = 31497039417.435602;
const Z_R: f64 = 5039.5263067896964;
const C_C_PRIME: f64 = 9.84375e-17;
const C_C_DOUBLE_PRIME: f64 = 9.8378808097441867e-17;
const ZETA_SLOPE: f64 = 4.921875e-15;
const ZETA_PRIME_SLOPE: f64 = 4.9189404048720934e-15;
const KAPPA_LC0_PRIME: f64 = 76293.9453125;
const KAPPA_LC0_DOUBLE_PRIME: f64 = 76202.994163149514;
const KAPPA_LC0: f64 = 78735.19778281683;
const OMEGA_X: f64 = 30568947921.707642;
const G: f64 = 0.099172880567635182;
const OMEGA_Z_REDUCED: f64 = 1.0303605965800643;
const KAPPA0_REF: f64 = 2.3546193303256662e-6;

fn load(name: &str) -> usc::netlist::CircuitSpec {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/netlists/valid").join(name);
    parse_netlist(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn circuit_a_matches_hand_values() {
    let m = to_model(&load("circuit_a.net")).unwrap();
    let d = m.lc.unwrap();
    let tol = 1e-12;
    assert_relative_eq!(d.omega_z, OMEGA_Z, max_relative = tol);
    assert_relative_eq!(d.z_r, Z_R, max_relative = tol);
    assert_relative_eq!(d.c_c_prime, C_C_PRIME, max_relative = tol);
    assert_relative_eq!(d.c_c_double_prime.unwrap(), C_C_DOUBLE_PRIME, max_relative = tol);
    assert_relative_eq!(d.zeta_slope, ZETA_SLOPE, max_relative = tol);
    assert_relative_eq!(d.zeta_prime_slope.unwrap(), ZETA_PRIME_SLOPE, max_relative = tol);
    assert_relative_eq!(d.kappa_lc0_prime, KAPPA_LC0_PRIME, max_relative = tol);
    assert_relative_eq!(d.kappa_lc0_double_prime.unwrap(), KAPPA_LC0_DOUBLE_PRIME, max_relative = tol);
    assert_relative_eq!(d.kappa_lc0, KAPPA_LC0, max_relative = tol);
    assert_relative_eq!(m.omega_unit, OMEGA_X, max_relative = tol);
    assert_relative_eq!(m.params.g, G, max_relative = tol);
    assert_relative_eq!(m.params.omega_z, OMEGA_Z_REDUCED, max_relative = tol);
    assert_relative_eq!(m.params.kappa0_ref, KAPPA0_REF, max_relative = tol);
    assert_eq!(m.params.variant, Variant::CircuitA);
    assert!(m.warnings.is_empty());
}

#[test]
fn capacitive_position_selects_circuit_b() {
    let a = to_model(&load("circuit_a.net")).unwrap();
    let b = to_model(&load("circuit_b.net")).unwrap();
    assert_eq!(b.params.variant, Variant::CircuitB);
    assert_eq!(a.params.g, b.params.g);
    assert_relative_eq!(b.straightforward.bare.zeta_slope, ZETA_PRIME_SLOPE * OMEGA_X, max_relative = 1e-12);
}

#[test]
fn bad_cavity_is_flagged() {
    let m = to_model(&load("bad_cavity_a.net")).unwrap();
    assert!(m.bad_cavity());
    assert!(m.warnings.iter().any(|w| matches!(w, Warning::BadCavity { .. })));
}

#[test]
fn fabry_perot_and_tlr_values() {
    let f1 = fabry_perot_params(0.1, 0.02, 1).unwrap();
    assert_relative_eq!(f1.omega_m, 47091289182.721332, max_relative = 1e-13);
    assert_relative_eq!(f1.kappa_fp0.kappa_ref, 121501306.76642333, max_relative = 1e-12);
    let f3 = fabry_perot_params(0.1, 0.02, 3).unwrap();
    assert_relative_eq!(f3.kappa_fp0.kappa_ref, 13500145.196269259, max_relative = 1e-12);
    let t = tlr_params(50.0, 5e-15, 1.6e-10, 0.012, 1).unwrap();
    assert_relative_eq!(t.omega_m, 32724923474.89368, max_relative = 1e-13);
    assert_relative_eq!(t.kappa_m, 1394427.8859865201, max_relative = 1e-12);

    let m = to_model(&load("fp_mode3.net")).unwrap();
    assert!(matches!(load("fp_mode3.net").resonator, Resonator::FabryPerot { mode: 3, .. }));
    assert_relative_eq!(m.omega_unit, 141273867548.164, max_relative = 1e-13);
    assert_eq!(m.straightforward.exponent(), -3);
    assert_eq!(m.general.exponent(), -5);
}

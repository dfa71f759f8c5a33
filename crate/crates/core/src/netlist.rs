//! Line-oriented circuit descriptions and their mapping to model parameters.
//!
//! ```text
//! # LC resonator with a CPB at the inductive position
//! [resonator]
//! C_R = 1e-13
//! L_R = 1e-8
//! [qubit]
//! C_J = 1e-14
//! E_J = 2e-23
//! position = inductive
//! [coupling]
//! C_C = 1e-15
//! [line]
//! Z_T = 50
//! ```
//!
//! Values are SI numbers. `#` starts a comment. The resonator geometry is
//! picked by its keys: `C_R`/`L_R` (lumped LC), `eta`/`length`
//! (Fabry-Perot mirror), or `C_T`/`length` (transmission-line resonator,
//! whose impedance is the `[line]` `Z_T`). The last two take an optional
//! `mode` (default 1); the transmission-line resonator also accepts an
//! explicit `omega_m` in rad/s.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result, Warning};
use crate::models::{cpb_params, CpbParams, ModelParams, Variant};
use crate::sec_rates::{BareRate, SecFlavor};

/// Speed of light (m/s).
pub const C_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    /// 1-based source line.
    pub line: usize,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "line {}: {sev}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Resonator {
    Lc { c_r: f64, l_r: f64 },
    FabryPerot { eta: f64, length: f64, mode: usize },
    Tlr { c_t: f64, length: f64, mode: usize, omega_m: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QubitPosition {
    /// In series with the resonator inductor (circuit A).
    Inductive,
    /// In series with the resonator capacitor (circuit B).
    Capacitive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Qubit {
    pub c_j: f64,
    pub e_j: f64,
    pub position: QubitPosition,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircuitSpec {
    pub resonator: Resonator,
    pub qubit: Option<Qubit>,
    /// Coupling capacitance `C_C`.
    pub c_c: Option<f64>,
    /// Line impedance `Z_T`.
    pub z_t: Option<f64>,
}

const SECTIONS: [&str; 4] = ["resonator", "qubit", "coupling", "line"];

fn allowed_keys(section: &str) -> &'static [&'static str] {
    match section {
        "resonator" => &["C_R", "L_R", "eta", "length", "C_T", "mode", "omega_m"],
        "qubit" => &["C_J", "E_J", "position"],
        "coupling" => &["C_C"],
        "line" => &["Z_T"],
        _ => &[],
    }
}

#[derive(Debug, Clone)]
enum Value {
    Num(f64),
    Int(usize),
    Position(QubitPosition),
}

fn error(diags: &mut Vec<ParseDiagnostic>, line: usize, message: String) {
    diags.push(ParseDiagnostic { line, severity: Severity::Error, message });
}

fn require(diags: &mut Vec<ParseDiagnostic>, s: &Section, name: &str, keys: &[&str]) {
    for k in keys {
        if !s.present.contains(*k) {
            error(diags, s.line, format!("missing required key '{k}' in [{name}]"));
        }
    }
}

#[derive(Default)]
struct Section {
    line: usize,
    keys: BTreeMap<String, (usize, Value)>,
    /// Every key seen, valid or not.
    present: BTreeSet<String>,
}

/// Parses a netlist. All problems in the file are collected; the spec is
/// returned only when none of them is an error.
pub fn parse_netlist(text: &str) -> std::result::Result<CircuitSpec, Vec<ParseDiagnostic>> {
    let mut diags = Vec::new();
    let mut err = |line: usize, message: String| error(&mut diags, line, message);
    let mut sections: BTreeMap<&'static str, Section> = BTreeMap::new();
    let mut current: Option<&'static str> = None;
    let mut seen_header = false;
    let mut last_line = 1;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            current = None;
            seen_header = true;
            let Some(name) = rest.strip_suffix(']').map(str::trim) else {
                err(line, format!("malformed section header '{content}'"));
                continue;
            };
            match SECTIONS.iter().find(|s| **s == name) {
                None => err(line, format!("unknown section [{name}]")),
                Some(s) if sections.contains_key(s) => err(line, format!("duplicate section [{name}]")),
                Some(s) => {
                    sections.insert(s, Section { line, ..Default::default() });
                    current = Some(s);
                }
            }
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            err(line, format!("expected 'key = value', got '{content}'"));
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(sec) = current else {
            // keys under an unknown or duplicate section were already reported
            if !seen_header {
                err(line, format!("key '{key}' outside of any section"));
            }
            continue;
        };
        if !allowed_keys(sec).contains(&key) {
            err(line, format!("unknown key '{key}' in [{sec}]"));
            continue;
        }
        sections.get_mut(sec).expect("current section exists").present.insert(key.to_string());
        let parsed = match key {
            "position" => match value {
                "inductive" => Ok(Value::Position(QubitPosition::Inductive)),
                "capacitive" => Ok(Value::Position(QubitPosition::Capacitive)),
                _ => Err(format!("position must be 'inductive' or 'capacitive', got '{value}'")),
            },
            "mode" => match value.parse::<usize>() {
                Ok(m) if m >= 1 => Ok(Value::Int(m)),
                Ok(_) => Err("mode must be at least 1".to_string()),
                Err(_) => Err(format!("mode must be a positive integer, got '{value}'")),
            },
            _ => match value.parse::<f64>() {
                Ok(v) if !v.is_finite() => Err(format!("non-finite value for {key}")),
                Ok(v) if v <= 0.0 => Err(format!("non-positive value {value} for {key}")),
                Ok(v) => Ok(Value::Num(v)),
                Err(_) => Err(format!("invalid number '{value}' for {key}")),
            },
        };
        match parsed {
            Err(m) => err(line, m),
            Ok(v) => {
                let s = sections.get_mut(sec).expect("current section exists");
                if s.keys.contains_key(key) {
                    err(line, format!("duplicate key '{key}' in [{sec}]"));
                } else {
                    s.keys.insert(key.to_string(), (line, v));
                }
            }
        }
    }

    let num = |s: &Section, k: &str| match s.keys.get(k) {
        Some((_, Value::Num(v))) => Some(*v),
        _ => None,
    };
    let int = |s: &Section, k: &str| match s.keys.get(k) {
        Some((_, Value::Int(v))) => Some(*v),
        _ => None,
    };
    let resonator = match sections.get("resonator") {
        None => {
            error(&mut diags, last_line, "missing required section [resonator]".into());
            None
        }
        Some(s) => {
            let has = |k: &str| s.present.contains(k);
            let geometries = [has("C_R") || has("L_R"), has("eta"), has("C_T")];
            match geometries.iter().filter(|g| **g).count() {
                0 => {
                    error(&mut diags, s.line, "[resonator] needs C_R/L_R, eta/length or C_T/length".into());
                    None
                }
                1 if geometries[0] => {
                    require(&mut diags, s, "resonator", &["C_R", "L_R"]);
                    for k in ["length", "mode", "omega_m"] {
                        if let Some((l, _)) = s.keys.get(k) {
                            diags.push(ParseDiagnostic {
                                line: *l,
                                severity: Severity::Error,
                                message: format!("key '{k}' does not apply to an LC resonator"),
                            });
                        }
                    }
                    Some(Resonator::Lc {
                        c_r: num(s, "C_R").unwrap_or(f64::NAN),
                        l_r: num(s, "L_R").unwrap_or(f64::NAN),
                    })
                }
                1 if geometries[1] => {
                    require(&mut diags, s, "resonator", &["eta", "length"]);
                    if let Some((l, _)) = s.keys.get("omega_m") {
                        error(&mut diags, *l, "key 'omega_m' does not apply to a Fabry-Perot resonator".into());
                    }
                    Some(Resonator::FabryPerot {
                        eta: num(s, "eta").unwrap_or(f64::NAN),
                        length: num(s, "length").unwrap_or(f64::NAN),
                        mode: int(s, "mode").unwrap_or(1),
                    })
                }
                1 => {
                    require(&mut diags, s, "resonator", &["C_T", "length"]);
                    Some(Resonator::Tlr {
                        c_t: num(s, "C_T").unwrap_or(f64::NAN),
                        length: num(s, "length").unwrap_or(f64::NAN),
                        mode: int(s, "mode").unwrap_or(1),
                        omega_m: num(s, "omega_m"),
                    })
                }
                _ => {
                    error(&mut diags, s.line, "[resonator] mixes keys of more than one geometry".into());
                    None
                }
            }
        }
    };

    let qubit = sections.get("qubit").map(|s| {
        require(&mut diags, s, "qubit", &["C_J", "E_J", "position"]);
        let position = match s.keys.get("position") {
            Some((_, Value::Position(p))) => *p,
            _ => QubitPosition::Inductive,
        };
        Qubit { c_j: num(s, "C_J").unwrap_or(f64::NAN), e_j: num(s, "E_J").unwrap_or(f64::NAN), position }
    });
    let c_c = sections.get("coupling").map(|s| {
        require(&mut diags, s, "coupling", &["C_C"]);
        num(s, "C_C").unwrap_or(f64::NAN)
    });
    let z_t = sections.get("line").map(|s| {
        require(&mut diags, s, "line", &["Z_T"]);
        num(s, "Z_T").unwrap_or(f64::NAN)
    });

    match resonator {
        Some(Resonator::FabryPerot { .. }) => {
            for name in ["qubit", "coupling", "line"] {
                if let Some(s) = sections.get(name) {
                    error(&mut diags, s.line, format!("section [{name}] does not apply to a Fabry-Perot resonator"));
                }
            }
        }
        Some(r) => {
            let anchor = sections.get("resonator").map(|s| s.line).unwrap_or(last_line);
            if c_c.is_none() {
                error(&mut diags, anchor, "missing required section [coupling]".into());
            }
            if z_t.is_none() {
                error(&mut diags, anchor, "missing required section [line]".into());
            }
            if let (Resonator::Tlr { .. }, Some(s)) = (r, sections.get("qubit")) {
                error(&mut diags, s.line, "section [qubit] is only supported with an LC resonator".into());
            }
        }
        None => {}
    }
    for (name, s) in &sections {
        if s.keys.is_empty() {
            log::warn!("line {}: empty section [{name}]", s.line);
        }
    }

    diags.sort_by_key(|d| d.line);
    if diags.iter().any(|d| d.severity == Severity::Error) {
        return Err(diags);
    }
    Ok(CircuitSpec { resonator: resonator.expect("checked above"), qubit, c_c, z_t })
}

/// Parses or fails with `Error::Netlist`.
pub fn parse(text: &str) -> Result<CircuitSpec> {
    parse_netlist(text).map_err(Error::Netlist)
}

/// Canonical text form: fixed section and key order, shortest
/// round-tripping number format.
pub fn serialize(spec: &CircuitSpec) -> String {
    let mut out = String::from("[resonator]\n");
    match spec.resonator {
        Resonator::Lc { c_r, l_r } => {
            out += &format!("C_R = {c_r:e}\nL_R = {l_r:e}\n");
        }
        Resonator::FabryPerot { eta, length, mode } => {
            out += &format!("eta = {eta:e}\nlength = {length:e}\nmode = {mode}\n");
        }
        Resonator::Tlr { c_t, length, mode, omega_m } => {
            out += &format!("C_T = {c_t:e}\nlength = {length:e}\nmode = {mode}\n");
            if let Some(w) = omega_m {
                out += &format!("omega_m = {w:e}\n");
            }
        }
    }
    if let Some(q) = spec.qubit {
        let pos = match q.position {
            QubitPosition::Inductive => "inductive",
            QubitPosition::Capacitive => "capacitive",
        };
        out += &format!("\n[qubit]\nC_J = {:e}\nE_J = {:e}\nposition = {pos}\n", q.c_j, q.e_j);
    }
    if let Some(c) = spec.c_c {
        out += &format!("\n[coupling]\nC_C = {c:e}\n");
    }
    if let Some(z) = spec.z_t {
        out += &format!("\n[line]\nZ_T = {z:e}\n");
    }
    out
}

/// Lumped-element quantities derived from an LC netlist, all SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LcDerived {
    /// `1/sqrt(L_R C_R)` (rad/s)
    pub omega_z: f64,
    /// `sqrt(L_R/C_R)` (ohm)
    pub z_r: f64,
    /// `1/C'_C = 1/C_C + 1/C_R`
    pub c_c_prime: f64,
    /// `1/C''_C = 1/C_C + 1/C_R + 1/C_J`, with a qubit
    pub c_c_double_prime: Option<f64>,
    /// `zeta(omega)/omega = Z_T C'_C` (s)
    pub zeta_slope: f64,
    /// `zeta'(omega)/omega = Z_T C''_C` (s)
    pub zeta_prime_slope: Option<f64>,
    /// `omega_z Z_T C'_C^2 / (Z_R C_R^2)` (1/s)
    pub kappa_lc0_prime: f64,
    /// `omega_z Z_T C''_C^2 / (Z_R C_R^2)` (1/s)
    pub kappa_lc0_double_prime: Option<f64>,
    /// Good-cavity rate `omega_z Z_T C_C^2 / (Z_R C_R^2)` (1/s)
    pub kappa_lc0: f64,
}

pub fn lc_derived(c_r: f64, l_r: f64, c_c: f64, z_t: f64, c_j: Option<f64>) -> LcDerived {
    let omega_z = 1.0 / (l_r * c_r).sqrt();
    let z_r = (l_r / c_r).sqrt();
    let c_c_prime = 1.0 / (1.0 / c_c + 1.0 / c_r);
    let c_c_double_prime = c_j.map(|cj| 1.0 / (1.0 / c_c + 1.0 / c_r + 1.0 / cj));
    let kappa = |c: f64| omega_z * z_t * c * c / (z_r * c_r * c_r);
    LcDerived {
        omega_z,
        z_r,
        c_c_prime,
        c_c_double_prime,
        zeta_slope: z_t * c_c_prime,
        zeta_prime_slope: c_c_double_prime.map(|c| z_t * c),
        kappa_lc0_prime: kappa(c_c_prime),
        kappa_lc0_double_prime: c_c_double_prime.map(kappa),
        kappa_lc0: kappa(c_c),
    }
}

/// Fabry-Perot mode `m`: `omega_m = m pi c / L` and the bare profile
/// `kappa_FP0(omega) = 2c / (Lambda(omega)^2 L)`, `Lambda = omega eta / c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FabryPerotMode {
    pub omega_m: f64,
    /// `kappa_FP0` as a power law in SI units.
    pub kappa_fp0: BareRate,
}

pub fn fabry_perot_params(eta: f64, length: f64, m: usize) -> Result<FabryPerotMode> {
    if m < 1 {
        return Err(Error::InvalidParameter(format!("invalid mode index {m}")));
    }
    if !(eta > 0.0 && length > 0.0) {
        return Err(Error::InvalidParameter("eta and length must be positive".into()));
    }
    let omega_m = m as f64 * PI * C_LIGHT / length;
    let lambda = omega_m * eta / C_LIGHT;
    let k = 2.0 * C_LIGHT / (lambda * lambda * length);
    Ok(FabryPerotMode { omega_m, kappa_fp0: BareRate::power_law(k, omega_m, -2) })
}

/// Transmission-line resonator mode `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TlrMode {
    pub omega_m: f64,
    /// `2 omega_m^2 Z_T C_C^2 / (C_T L)` (1/s)
    pub kappa_m: f64,
}

/// Mode `m` of a line of impedance `z_t` and capacitance per length `c_t`,
/// with `omega_m = m pi v / L`, `v = 1/(Z_T C_T)`.
pub fn tlr_params(z_t: f64, c_c: f64, c_t: f64, length: f64, m: usize) -> Result<TlrMode> {
    if m < 1 {
        return Err(Error::InvalidParameter(format!("invalid mode index {m}")));
    }
    let omega_m = m as f64 * PI / (z_t * c_t * length);
    tlr_params_at(z_t, c_c, c_t, length, omega_m)
}

/// As `tlr_params` with an explicit mode frequency.
pub fn tlr_params_at(z_t: f64, c_c: f64, c_t: f64, length: f64, omega_m: f64) -> Result<TlrMode> {
    if !(z_t > 0.0 && c_c > 0.0 && c_t > 0.0 && length > 0.0 && omega_m > 0.0) {
        return Err(Error::InvalidParameter("TLR parameters must be positive".into()));
    }
    Ok(TlrMode { omega_m, kappa_m: 2.0 * omega_m * omega_m * z_t * c_c * c_c / (c_t * length) })
}

/// A netlist mapped to dimensionless parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircuitModel {
    pub params: ModelParams,
    /// Frequency unit in rad/s: `omega_x` with a qubit, otherwise the
    /// resonator frequency.
    pub omega_unit: f64,
    /// Flavor matching the topology. For a Fabry-Perot cavity this is the
    /// flux form.
    pub straightforward: SecFlavor,
    /// General-recipe flavor. For a Fabry-Perot cavity this is the charge form.
    pub general: SecFlavor,
    pub lc: Option<LcDerived>,
    pub transmon: Option<bool>,
    #[serde(skip)]
    pub warnings: Vec<Warning>,
}

impl CircuitModel {
    pub fn bad_cavity(&self) -> bool {
        self.warnings.iter().any(|w| matches!(w, Warning::BadCavity { .. }))
    }
}

/// Dimensionless model of a parsed circuit.
pub fn to_model(spec: &CircuitSpec) -> Result<CircuitModel> {
    let mut warnings = Vec::new();
    let model = match spec.resonator {
        Resonator::Lc { c_r, l_r } => {
            let c_c = spec.c_c.ok_or_else(|| Error::InvalidParameter("LC resonator needs C_C".into()))?;
            let z_t = spec.z_t.ok_or_else(|| Error::InvalidParameter("LC resonator needs Z_T".into()))?;
            let d = lc_derived(c_r, l_r, c_c, z_t, spec.qubit.map(|q| q.c_j));
            let (variant, omega_unit, g, transmon) = match spec.qubit {
                None => (Variant::CircuitA, d.omega_z, 0.0, None),
                Some(q) => {
                    let cpb = CpbParams::new(q.c_j, q.e_j)?;
                    let (wx, g) = cpb_params(&cpb, d.z_r)?;
                    let v = match q.position {
                        QubitPosition::Inductive => Variant::CircuitA,
                        QubitPosition::Capacitive => Variant::CircuitB,
                    };
                    (v, wx, g, Some(cpb.is_transmon()))
                }
            };
            let omega_z = d.omega_z / omega_unit;
            let kappa0_ref = d.kappa_lc0 / omega_unit * (1.0 / omega_z).powi(3);
            let params =
                ModelParams { omega_z, omega_x: 1.0, g, variant, kappa0_ref, z_r: Some(d.z_r), allow_bad_cavity: true };
            let straightforward = match variant {
                Variant::CircuitB => SecFlavor::circuit_b(
                    &params,
                    d.kappa_lc0_double_prime.unwrap_or(d.kappa_lc0_prime) / omega_unit,
                    d.zeta_prime_slope.unwrap_or(d.zeta_slope) * omega_unit,
                ),
                _ => SecFlavor::circuit_a(d.kappa_lc0_prime / omega_unit, omega_z, d.zeta_slope * omega_unit),
            };
            let general = SecFlavor::general_flux(d.kappa_lc0 / omega_unit, omega_z);
            CircuitModel { params, omega_unit, straightforward, general, lc: Some(d), transmon, warnings: Vec::new() }
        }
        Resonator::FabryPerot { eta, length, mode } => {
            let fp = fabry_perot_params(eta, length, mode)?;
            let k = fp.kappa_fp0.kappa_ref / fp.omega_m;
            let params = ModelParams {
                omega_z: 1.0,
                omega_x: 1.0,
                g: 0.0,
                variant: Variant::CircuitA,
                kappa0_ref: k,
                z_r: None,
                allow_bad_cavity: true,
            };
            CircuitModel {
                params,
                omega_unit: fp.omega_m,
                straightforward: SecFlavor::fabry_perot(k, 1.0, false),
                general: SecFlavor::fabry_perot(k, 1.0, true),
                lc: None,
                transmon: None,
                warnings: Vec::new(),
            }
        }
        Resonator::Tlr { c_t, length, mode, omega_m } => {
            let c_c = spec.c_c.ok_or_else(|| Error::InvalidParameter("TLR needs C_C".into()))?;
            let z_t = spec.z_t.ok_or_else(|| Error::InvalidParameter("TLR needs Z_T".into()))?;
            let t = match omega_m {
                Some(w) => tlr_params_at(z_t, c_c, c_t, length, w)?,
                None => tlr_params(z_t, c_c, c_t, length, mode)?,
            };
            let k = t.kappa_m / t.omega_m;
            let params = ModelParams {
                omega_z: 1.0,
                omega_x: 1.0,
                g: 0.0,
                variant: Variant::CircuitA,
                kappa0_ref: k,
                z_r: None,
                allow_bad_cavity: true,
            };
            let f = SecFlavor::tlr(k, 1.0);
            CircuitModel {
                params,
                omega_unit: t.omega_m,
                straightforward: f,
                general: f,
                lc: None,
                transmon: None,
                warnings: Vec::new(),
            }
        }
    };
    if let Some(w) = model.params.validate()? {
        warnings.push(w);
    }
    Ok(CircuitModel { warnings, ..model })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const FULL_A: &str = "# circuit A\n[resonator]\nC_R = 1e-13\nL_R = 1e-8\n\n[qubit]\nC_J = 2e-14\nE_J = 1.5e-23\nposition = inductive\n[coupling]\nC_C = 1e-15 # small\n[line]\nZ_T = 50\n";

    #[test]
    fn minimal_lc() {
        let s = parse_netlist("[resonator]\nC_R=1e-12\nL_R=1e-9\n[coupling]\nC_C=1e-15\n[line]\nZ_T=50\n").unwrap();
        assert!(s.qubit.is_none());
        assert_eq!(s.resonator, Resonator::Lc { c_r: 1e-12, l_r: 1e-9 });
    }

    #[test]
    fn full_circuit_a_echo() {
        let s = parse_netlist(FULL_A).unwrap();
        let q = s.qubit.unwrap();
        assert_eq!(q.position, QubitPosition::Inductive);
        assert_eq!(q.e_j, 1.5e-23);
        assert_eq!(s.c_c, Some(1e-15));
        assert_eq!(parse_netlist(&serialize(&s)).unwrap(), s);
    }

    #[test]
    fn negative_value_is_line_anchored() {
        let d = parse_netlist("[resonator]\nC_R = -1e-12\nL_R = 1e-9\n[coupling]\nC_C=1e-15\n[line]\nZ_T=50\n")
            .unwrap_err();
        assert_eq!(d[0].line, 2);
        assert!(d[0].message.contains("non-positive"));
    }

    #[test]
    fn collects_every_problem() {
        let text = "[resonator]\nC_R = 1e-12\nfoo = 1\n[bogus]\n[resonator]\n[coupling]\nC_C = x\n";
        let d = parse_netlist(text).unwrap_err();
        let lines: Vec<usize> = d.iter().map(|d| d.line).collect();
        assert!(lines.contains(&3) && lines.contains(&4) && lines.contains(&5) && lines.contains(&7));
        assert!(d.iter().any(|d| d.message.contains("L_R")));
        assert!(d.iter().any(|d| d.message.contains("[line]")));
    }

    #[test]
    fn derived_formulas() {
        let (c_r, l_r, c_c, z_t, c_j) = (1e-13, 1e-8, 1e-15, 50.0, 2e-14);
        let d = lc_derived(c_r, l_r, c_c, z_t, Some(c_j));
        assert_relative_eq!(d.omega_z, 1.0 / 1e-21f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(d.z_r, 1e5f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(d.kappa_lc0, d.omega_z * z_t * c_c * c_c / (d.z_r * c_r * c_r), max_relative = 1e-14);
        assert!(d.c_c_double_prime.unwrap() < d.c_c_prime && d.c_c_prime < c_c);
    }

    #[test]
    fn identity_cr_over_cj() {
        let spec = parse_netlist(FULL_A).unwrap();
        let m = to_model(&spec).unwrap();
        let p = m.params;
        let (c_r, c_j) = (1e-13, 2e-14);
        assert_relative_eq!(4.0 * p.g * p.g * p.omega_x / p.omega_z, c_r / c_j, max_relative = 1e-12);
    }

    #[test]
    fn closed_cavity_limit() {
        let d = lc_derived(1e-12, 1e-9, 1e-30, 50.0, None);
        assert!(d.kappa_lc0 / d.omega_z < 1e-25);
    }

    #[test]
    fn fabry_perot_scaling() {
        let a = fabry_perot_params(1e-3, 0.1, 1).unwrap();
        let b = fabry_perot_params(2e-3, 0.1, 1).unwrap();
        assert_relative_eq!(a.kappa_fp0.kappa_ref / b.kappa_fp0.kappa_ref, 4.0, max_relative = 1e-14);
        assert!(fabry_perot_params(1e-3, 0.1, 0).is_err());
    }

    #[test]
    fn tlr_scaling() {
        let k1 = tlr_params(50.0, 1e-15, 1.6e-10, 0.01, 1).unwrap();
        let k2 = tlr_params(50.0, 1e-15, 1.6e-10, 0.01, 2).unwrap();
        assert_relative_eq!(k2.kappa_m / k1.kappa_m, 4.0, max_relative = 1e-14);
        let k3 = tlr_params(50.0, 2e-15, 1.6e-10, 0.01, 1).unwrap();
        assert_relative_eq!(k3.kappa_m / k1.kappa_m, 4.0, max_relative = 1e-14);
    }
}

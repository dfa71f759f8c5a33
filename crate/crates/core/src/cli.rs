//! Commands behind the `usc` binary.
//!
//! Every command produces a [`Table`] that is written as CSV (12
//! significant digits, units in the header) or JSON (`{"meta", "rows"}`).
//! Sweeps run on a rayon pool capped by `USC_THREADS`; rows come back in
//! input order.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::{Array1, Array2};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::bogoliubov::hopfield_diagonalize;
use crate::error::Error;
use crate::fock::{self, eig_hermitian, EigenSystem, C64};
use crate::inout::{linspace, spectrum};
use crate::lindblad::{
    build_generator, build_generator_pretrace, build_generator_standard, evolve, fmt_num, project, DensityMatrix,
    Generator,
};
use crate::models::{build, ModelParams, Variant, HBAR, K_B};
use crate::netlist::{self, CircuitModel};
use crate::sec_rates::{
    photon_destroy, rates_circuit_a, rates_circuit_b, rates_general, transition_table, SecFlavor, Transition,
    TransitionRates,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    /// 1 usage, 2 netlist diagnostics, 3 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Lib(Error::Netlist(_)) => 2,
            CliError::Lib(_) => 3,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Coupling derived from the circuit.
    Straightforward,
    /// `(omega/omega_z)^3 |<a+a^dag>|^2` for any circuit.
    General,
    /// Number-conserving coupling through `a`.
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CircuitArg {
    A,
    B,
}

#[derive(Debug, Parser)]
#[command(
    name = "usc",
    version,
    about = "Loss rates, master equation and reflection spectra of ultrastrongly coupled circuits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Polariton frequencies of circuits A and B.
    Spectrum(SweepConfig),
    /// Polariton loss rates of circuits A and B, normalized to kappa0.
    Lossrates(SweepConfig),
    /// Master-equation trajectory in the polariton eigenbasis.
    Master(MasterConfig),
    /// Reflection spectrum from the ground-state transitions.
    Inout(InoutConfig),
}

/// Options shared by every command.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Circuit netlist providing omega_z, g and kappa0.
    #[arg(long)]
    pub netlist: Option<PathBuf>,
    /// Coupling strength g (overrides the netlist).
    #[arg(long)]
    pub g: Option<f64>,
    /// Resonator frequency omega_z/omega_x (overrides the netlist).
    #[arg(long = "wz")]
    pub omega_z: Option<f64>,
    /// Bare loss rate at omega_z = omega_x, in omega_x.
    #[arg(long)]
    pub kappa0: Option<f64>,
    #[arg(long, value_enum, default_value_t = Flavor::Straightforward)]
    pub flavor: Flavor,
    /// Temperature in kelvin; needs a netlist to fix the frequency unit.
    #[arg(long = "temp")]
    pub temp_kelvin: Option<f64>,
    /// Temperature k_B T / (hbar omega_x).
    #[arg(long = "temp-reduced", conflicts_with = "temp_kelvin")]
    pub temp_reduced: Option<f64>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl Default for CommonArgs {
    fn default() -> Self {
        CommonArgs {
            netlist: None,
            g: None,
            omega_z: None,
            kappa0: None,
            flavor: Flavor::Straightforward,
            temp_kelvin: None,
            temp_reduced: None,
            out: None,
            format: Format::Csv,
        }
    }
}

/// A sweep over `omega_z/omega_x` (default) or over `g` when `--gmin` and
/// `--gmax` are given.
#[derive(Debug, Clone, Args)]
pub struct SweepConfig {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 0.5)]
    pub wmin: f64,
    #[arg(long, default_value_t = 1.5)]
    pub wmax: f64,
    #[arg(long, requires = "gmax")]
    pub gmin: Option<f64>,
    #[arg(long, requires = "gmin")]
    pub gmax: Option<f64>,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { common: CommonArgs::default(), wmin: 0.5, wmax: 1.5, gmin: None, gmax: None, points: 101 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    OmegaZ,
    Coupling,
}

impl SweepConfig {
    pub fn variable(&self) -> SweepVariable {
        if self.gmin.is_some() {
            SweepVariable::Coupling
        } else {
            SweepVariable::OmegaZ
        }
    }

    fn range(&self) -> (f64, f64) {
        match (self.gmin, self.gmax) {
            (Some(a), Some(b)) => (a, b),
            _ => (self.wmin, self.wmax),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.points < 2 {
            return Err(CliError::Usage(format!("--points must be at least 2, got {}", self.points)));
        }
        let (lo, hi) = self.range();
        let ok = match self.variable() {
            SweepVariable::OmegaZ => lo > 0.0 && hi > lo,
            SweepVariable::Coupling => lo >= 0.0 && hi > lo,
        };
        if !ok || !hi.is_finite() {
            return Err(CliError::Usage(format!("sweep range [{lo}, {hi}] must be positive and increasing")));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let (lo, hi) = self.range();
        linspace(lo, hi, self.points)
    }
}

#[derive(Debug, Clone, Args)]
pub struct MasterConfig {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Circuit (defaults to the netlist's, else A).
    #[arg(long, value_enum)]
    pub circuit: Option<CircuitArg>,
    #[arg(long, num_args = 2, value_names = ["NA", "NB"], default_values_t = [20, 20])]
    pub dims: Vec<usize>,
    /// Eigenstates kept in the master equation.
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    /// `fock:NA,NB`, `eigen:K` or `thermal`.
    #[arg(long, default_value = "eigen:1")]
    pub initial: String,
    /// Duration in units of 1/kappa_LC0.
    #[arg(long, default_value_t = 10.0)]
    pub t_final: f64,
    /// Time step in 1/omega_x (picked from the rates when absent).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Keep every `stride`-th step.
    #[arg(long, default_value_t = 100)]
    pub stride: usize,
    /// Keep the cross terms between transitions.
    #[arg(long)]
    pub pretrace: bool,
}

impl Default for MasterConfig {
    fn default() -> Self {
        MasterConfig {
            common: CommonArgs::default(),
            circuit: None,
            dims: vec![20, 20],
            levels: 6,
            initial: "eigen:1".into(),
            t_final: 10.0,
            dt: None,
            stride: 100,
            pretrace: false,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InoutConfig {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub circuit: Option<CircuitArg>,
    #[arg(long, num_args = 2, value_names = ["NA", "NB"], default_values_t = [20, 20])]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    /// Probe window in omega_x.
    #[arg(long, default_value_t = 0.5)]
    pub omin: f64,
    #[arg(long, default_value_t = 1.5)]
    pub omax: f64,
    #[arg(long, default_value_t = 1001)]
    pub probe_points: usize,
}

impl Default for InoutConfig {
    fn default() -> Self {
        InoutConfig {
            common: CommonArgs::default(),
            circuit: None,
            dims: vec![20, 20],
            levels: 6,
            omin: 0.5,
            omax: 1.5,
            probe_points: 1001,
        }
    }
}

/// Column-labelled numeric output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub meta: serde_json::Value,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name || c.split(' ').next() == Some(name))?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            writeln!(out, "{}", row.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(","))?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut meta = self.meta.clone();
        meta["columns"] = json!(self.columns);
        serde_json::to_writer_pretty(&mut out, &json!({ "meta": meta, "rows": self.rows }))?;
        writeln!(out)
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }
}

/// Parameters resolved from the command line and an optional netlist.
#[derive(Debug, Clone)]
struct Base {
    model: Option<CircuitModel>,
    g: Option<f64>,
    omega_z: f64,
    kappa0: f64,
    temperature: f64,
}

impl Base {
    fn params(&self, variant: Variant, omega_z: f64, g: f64) -> ModelParams {
        ModelParams {
            omega_z,
            omega_x: 1.0,
            g,
            variant,
            kappa0_ref: self.kappa0,
            z_r: self.model.as_ref().and_then(|m| m.params.z_r),
            allow_bad_cavity: self.model.as_ref().is_some_and(|m| m.bad_cavity()),
        }
    }

    fn g(&self) -> CliResult<f64> {
        self.g.ok_or_else(|| CliError::Usage("give --g or a --netlist with a qubit".into()))
    }
}

/// Reads and maps a netlist file.
pub fn load_netlist(path: &PathBuf) -> CliResult<CircuitModel> {
    let text =
        std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    let spec = netlist::parse(&text)?;
    Ok(netlist::to_model(&spec)?)
}

fn resolve(c: &CommonArgs) -> CliResult<Base> {
    let model = c.netlist.as_ref().map(load_netlist).transpose()?;
    let g = c.g.or_else(|| model.as_ref().filter(|m| m.lc.is_some()).map(|m| m.params.g));
    let omega_z = c.omega_z.or(model.as_ref().map(|m| m.params.omega_z)).unwrap_or(1.0);
    let kappa0 = c.kappa0.or(model.as_ref().map(|m| m.params.kappa0_ref)).unwrap_or(1e-3);
    let temperature = match (c.temp_kelvin, c.temp_reduced, &model) {
        (Some(_), _, None) => return Err(CliError::Usage("--temp needs a --netlist; use --temp-reduced".into())),
        (Some(t), _, Some(m)) => K_B * t / (HBAR * m.omega_unit),
        (None, Some(t), _) => t,
        (None, None, _) => 0.0,
    };
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(CliError::Usage(format!("temperature must be non-negative, got {temperature}")));
    }
    if let Some(g) = g {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(CliError::Usage(format!("--g must be non-negative, got {g}")));
        }
    }
    let base = Base { model, g, omega_z, kappa0, temperature };
    base.params(Variant::CircuitA, omega_z, g.unwrap_or(0.0)).validate()?;
    Ok(base)
}

/// Thread pool honoring `USC_THREADS`.
pub fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("USC_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Usage(format!("invalid USC_THREADS '{v}'")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn sweep<F>(cfg: &SweepConfig, base: &Base, f: F) -> CliResult<Vec<Vec<f64>>>
where
    F: Fn(f64, f64) -> crate::Result<Vec<f64>> + Sync,
{
    cfg.validate()?;
    let grid = cfg.grid();
    let var = cfg.variable();
    let g = if var == SweepVariable::OmegaZ { base.g()? } else { 0.0 };
    let pool = thread_pool()?;
    let rows: crate::Result<Vec<Vec<f64>>> = pool.install(|| {
        grid.par_iter()
            .map(|&x| {
                let (wz, g) = match var {
                    SweepVariable::OmegaZ => (x, g),
                    SweepVariable::Coupling => (base.omega_z, x),
                };
                let mut row = vec![x];
                row.extend(f(wz, g)?);
                Ok(row)
            })
            .collect()
    });
    Ok(rows?)
}

fn sweep_meta(cmd: &str, cfg: &SweepConfig, base: &Base) -> serde_json::Value {
    let (lo, hi) = cfg.range();
    json!({
        "command": cmd,
        "flavor": cfg.common.flavor,
        "g": if cfg.variable() == SweepVariable::OmegaZ { base.g } else { None },
        "omega_z": if cfg.variable() == SweepVariable::Coupling { Some(base.omega_z) } else { None },
        "kappa0": base.kappa0,
        "temperature": base.temperature,
        "grid": { "variable": cfg.variable(), "min": lo, "max": hi, "points": cfg.points },
    })
}

fn first_column(cfg: &SweepConfig) -> String {
    match cfg.variable() {
        SweepVariable::OmegaZ => "omega_z [omega_x]".into(),
        SweepVariable::Coupling => "g [1]".into(),
    }
}

/// Lower and upper polariton frequencies of both circuits.
pub fn cmd_spectrum(cfg: &SweepConfig) -> CliResult<Table> {
    let base = resolve(&cfg.common)?;
    let rows = sweep(cfg, &base, |wz, g| {
        let a = hopfield_diagonalize(&base.params(Variant::CircuitA, wz, g))?.frequencies();
        let b = hopfield_diagonalize(&base.params(Variant::CircuitB, wz, g))?.frequencies();
        Ok(vec![a[0], a[1], b[0], b[1]])
    })?;
    let mut columns = vec![first_column(cfg)];
    columns.extend(["omega_L^A", "omega_U^A", "omega_L^B", "omega_U^B"].map(|c| format!("{c} [omega_x]")));
    Ok(Table { columns, rows, meta: sweep_meta("spectrum", cfg, &base) })
}

/// `[kappa_L, kappa_U]` of both circuits in units of `kappa0_ref`.
pub fn loss_rates(p: &ModelParams, flavor: Flavor) -> crate::Result<[f64; 4]> {
    let k = p.kappa_lc0();
    let ma = hopfield_diagonalize(&p.with_variant(Variant::CircuitA))?;
    let mb = hopfield_diagonalize(&p.with_variant(Variant::CircuitB))?;
    let pair = |t: TransitionRates| [t.transitions[0].kappa, t.transitions[1].kappa];
    let (a, b) = match flavor {
        Flavor::Straightforward => (pair(rates_circuit_a(&ma, k)?), pair(rates_circuit_b(&mb, k, false)?)),
        Flavor::General => {
            (pair(rates_general(&ma, k, Variant::CircuitA)?), pair(rates_general(&mb, k, Variant::CircuitB)?))
        }
        Flavor::Standard => (ma.modes().map(|q| k * q.w.norm_sqr()), mb.modes().map(|q| k * q.w.norm_sqr())),
    };
    let n = p.kappa0_ref;
    Ok([a[0] / n, a[1] / n, b[0] / n, b[1] / n])
}

/// Loss rates of both circuits normalized to `kappa0` at `omega_z = omega_x`.
pub fn cmd_lossrates(cfg: &SweepConfig) -> CliResult<Table> {
    let base = resolve(&cfg.common)?;
    let flavor = cfg.common.flavor;
    let rows = sweep(cfg, &base, |wz, g| {
        let p = base.params(Variant::CircuitA, wz, g);
        let mut row = loss_rates(&p, flavor)?.to_vec();
        row.push(p.kappa_lc0() / p.kappa0_ref);
        Ok(row)
    })?;
    let mut columns = vec![first_column(cfg)];
    columns.extend(["kappa_L^A", "kappa_U^A", "kappa_L^B", "kappa_U^B", "kappa_LC0"].map(|c| format!("{c} [kappa0]")));
    Ok(Table { columns, rows, meta: sweep_meta("lossrates", cfg, &base) })
}

fn circuit(arg: Option<CircuitArg>, base: &Base) -> Variant {
    match arg {
        Some(CircuitArg::A) => Variant::CircuitA,
        Some(CircuitArg::B) => Variant::CircuitB,
        None => base.model.as_ref().map(|m| m.params.variant).unwrap_or(Variant::CircuitA),
    }
}

fn dims2(dims: &[usize]) -> CliResult<[usize; 2]> {
    match dims {
        [a, b] if *a >= 2 && *b >= 2 => Ok([*a, *b]),
        _ => Err(CliError::Usage(format!("--dims needs two values >= 2, got {dims:?}"))),
    }
}

/// The SEC flavor for the resolved circuit. Netlist circuits keep their
/// impedance profile.
fn sec_flavor(base: &Base, p: &ModelParams, flavor: Flavor) -> crate::Result<SecFlavor> {
    let k = p.kappa_lc0();
    match flavor {
        Flavor::General => Ok(SecFlavor::general_flux(k, p.omega_z)),
        _ => match &base.model {
            Some(m) if m.params.variant == p.variant && m.params.omega_z == p.omega_z && m.params.g == p.g => {
                Ok(m.straightforward)
            }
            _ => SecFlavor::straightforward(p, k),
        },
    }
}

struct Prepared {
    params: ModelParams,
    es: EigenSystem,
    levels: usize,
}

fn prepare(base: &Base, circuit_arg: Option<CircuitArg>, dims: &[usize], levels: usize) -> CliResult<Prepared> {
    let dims = dims2(dims)?;
    let g = base.g()?;
    let params = base.params(circuit(circuit_arg, base), base.omega_z, g);
    params.validate()?;
    let es = eig_hermitian(&build(&params, dims)?)?;
    if levels < 2 || levels > es.len() {
        return Err(CliError::Usage(format!("--levels must lie in [2, {}], got {levels}", es.len())));
    }
    Ok(Prepared { params, es, levels })
}

/// Parses `fock:NA,NB`, `eigen:K` or `thermal` into a state on the lowest
/// `levels` eigenstates.
pub fn initial_state(spec: &str, es: &EigenSystem, levels: usize, temperature: f64) -> CliResult<DensityMatrix> {
    let bad = || CliError::Usage(format!("invalid --initial '{spec}': expected fock:NA,NB, eigen:K or thermal"));
    if spec == "thermal" {
        return Ok(DensityMatrix::thermal(&es.frequencies[..levels], temperature)?);
    }
    let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
    match kind {
        "eigen" => {
            let k: usize = arg.trim().parse().map_err(|_| bad())?;
            if k >= levels {
                return Err(CliError::Usage(format!("eigenstate {k} is outside the {levels} kept levels")));
            }
            Ok(DensityMatrix::basis_state(levels, k)?)
        }
        "fock" => {
            let occ: Vec<usize> =
                arg.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
            let [na, nb] = occ[..] else { return Err(bad()) };
            if na >= es.dims[0] || nb >= es.dims[1] {
                return Err(CliError::Usage(format!("Fock state |{na},{nb}> outside dims {:?}", es.dims)));
            }
            let idx = na * es.dims[1] + nb;
            let psi: Array1<C64> = (0..levels).map(|mu| es.states[[idx, mu]].conj()).collect();
            let weight: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            if weight < 1.0 - 1e-6 {
                log::warn!(
                    "Fock state |{na},{nb}> keeps weight {weight:.6} on the {levels} kept levels; renormalizing"
                );
            }
            if weight < 1e-12 {
                return Err(CliError::Usage(format!("Fock state |{na},{nb}> has no weight on the kept levels")));
            }
            Ok(DensityMatrix::pure(&psi.mapv(|z| z / weight.sqrt()))?)
        }
        _ => Err(bad()),
    }
}

/// Populations and bare occupations along a master-equation trajectory.
pub fn cmd_master(cfg: &MasterConfig) -> CliResult<Table> {
    let base = resolve(&cfg.common)?;
    let Prepared { params, es, levels } = prepare(&base, cfg.circuit, &cfg.dims, cfg.levels)?;
    let t = base.temperature;
    let gen: Box<dyn Generator> = match cfg.common.flavor {
        Flavor::Standard => Box::new(build_generator_standard(&es, params.kappa_lc0(), params.omega_z, t, levels)?),
        f => {
            let flavor = sec_flavor(&base, &params, f)?;
            if cfg.pretrace {
                let x = flavor.coupling.operator(&es.dims)?;
                Box::new(build_generator_pretrace(&es, &x, &flavor.bare, t, levels)?)
            } else {
                Box::new(build_generator(&es, &transition_table(&flavor, &es, levels)?, t)?)
            }
        }
    };
    let rho0 = initial_state(&cfg.initial, &es, levels, t)?;
    let t_final = cfg.t_final / params.kappa_lc0();
    let span = es.frequencies[levels - 1] - es.frequencies[0];
    let dt = match cfg.dt {
        Some(dt) => dt,
        None => {
            let by_rate = if gen.max_rate() > 0.0 { 0.02 / gen.max_rate() } else { f64::INFINITY };
            by_rate.min(0.2 / span.max(f64::MIN_POSITIVE))
        }
    };
    let traj = evolve(gen.as_ref(), &rho0, t_final, dt, cfg.stride)?;

    let (a, b) = fock::two_mode_ops([es.dims[0], es.dims[1]])?;
    let observables: Vec<(&str, Array2<C64>)> = vec![
        ("<a^dag a>", project(&es, &a.dagger().dot(&a)?, levels)?),
        ("<b^dag b>", project(&es, &b.dagger().dot(&b)?, levels)?),
    ];
    let mut columns = vec!["t [1/omega_x]".to_string()];
    columns.extend((0..levels).map(|k| format!("p{k} [1]")));
    columns.extend(observables.iter().map(|(n, _)| format!("{n} [1]")));
    let rows = traj
        .times
        .iter()
        .zip(traj.states.iter())
        .map(|(time, rho)| {
            let mut row = vec![*time];
            row.extend(rho.diag().iter().map(|z| z.re));
            for (_, op) in &observables {
                row.push((rho.dot(op)).diag().sum().re);
            }
            row
        })
        .collect();
    let meta = json!({
        "command": "master",
        "flavor": cfg.common.flavor,
        "circuit": params.variant.to_string(),
        "g": params.g,
        "omega_z": params.omega_z,
        "kappa0": params.kappa0_ref,
        "temperature": t,
        "pretrace": cfg.pretrace,
        "initial": cfg.initial,
        "levels": levels,
        "dims": es.dims,
        "dt": dt,
    });
    Ok(Table { columns, rows, meta })
}

/// Downward transitions out of the ground state.
fn ground_transitions(
    base: &Base,
    p: &ModelParams,
    es: &EigenSystem,
    levels: usize,
    flavor: Flavor,
) -> crate::Result<TransitionRates> {
    let mut table = match flavor {
        Flavor::Standard => {
            let a = photon_destroy(&es.dims)?;
            let k = p.kappa_lc0();
            let transitions = (1..levels)
                .map(|nu| {
                    Ok(Transition {
                        lower: 0,
                        upper: nu,
                        omega: es.gap(0, nu),
                        kappa: k * es.element(0, &a, nu)?.norm_sqr(),
                    })
                })
                .collect::<crate::Result<Vec<_>>>()?;
            TransitionRates { levels: es.frequencies[..levels].to_vec(), transitions }
        }
        f => transition_table(&sec_flavor(base, p, f)?, es, levels)?,
    };
    table.transitions.retain(|t| t.lower == 0);
    Ok(table)
}

/// Reflection spectrum of a probe in the ground state.
pub fn cmd_inout(cfg: &InoutConfig) -> CliResult<Table> {
    let base = resolve(&cfg.common)?;
    let Prepared { params, es, levels } = prepare(&base, cfg.circuit, &cfg.dims, cfg.levels)?;
    if cfg.probe_points < 2 || !(cfg.omin > 0.0 && cfg.omax > cfg.omin) {
        return Err(CliError::Usage("probe window must be positive and increasing with at least 2 points".into()));
    }
    let rates = ground_transitions(&base, &params, &es, levels, cfg.common.flavor)?;
    let s = spectrum(&rates, &linspace(cfg.omin, cfg.omax, cfg.probe_points))?;
    let columns = ["omega [omega_x]", "re_r [1]", "im_r [1]", "phase [rad]", "group_delay [1/omega_x]"]
        .map(String::from)
        .to_vec();
    let rows = s.points.iter().map(|p| vec![p.omega, p.amplitude.re, p.amplitude.im, p.phase, p.group_delay]).collect();
    let meta = json!({
        "command": "inout",
        "flavor": cfg.common.flavor,
        "circuit": params.variant.to_string(),
        "g": params.g,
        "omega_z": params.omega_z,
        "kappa0": params.kappa0_ref,
        "transitions": s.transitions,
        "overlapping": s.overlapping,
    });
    Ok(Table { columns, rows, meta })
}

fn write_table(table: &Table, common: &CommonArgs) -> CliResult<()> {
    match &common.out {
        Some(path) => {
            let io_err = |source| CliError::Io { path: path.display().to_string(), source };
            let f = File::create(path).map_err(io_err)?;
            let mut w = BufWriter::new(f);
            table.write(common.format, &mut w).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            table.write(common.format, stdout.lock()).map_err(|source| CliError::Io { path: "stdout".into(), source })
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let (result, common) = match &cli.command {
        Command::Spectrum(c) => (cmd_spectrum(c), &c.common),
        Command::Lossrates(c) => (cmd_lossrates(c), &c.common),
        Command::Master(c) => (cmd_master(c), &c.common),
        Command::Inout(c) => (cmd_inout(c), &c.common),
    };
    match result.and_then(|t| write_table(&t, common)) {
        Ok(()) => 0,
        Err(e) => {
            match (&e, &common.netlist) {
                (CliError::Lib(Error::Netlist(diags)), path) => {
                    let name = path.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
                    for d in diags {
                        eprintln!("{name}:{d}");
                    }
                }
                _ => eprintln!("usc: {e}"),
            }
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sweep_cfg(g: f64, points: usize) -> SweepConfig {
        SweepConfig { common: CommonArgs { g: Some(g), ..Default::default() }, points, ..Default::default() }
    }

    #[test]
    fn decoupled_spectrum_crosses() {
        let t = cmd_spectrum(&sweep_cfg(0.0, 11)).unwrap();
        for r in &t.rows {
            assert_abs_diff_eq!(r[1], r[0].min(1.0), epsilon = 1e-12);
            assert_abs_diff_eq!(r[2], r[0].max(1.0), epsilon = 1e-12);
            assert_abs_diff_eq!(r[3], r[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn weak_coupling_gap() {
        let mut c = sweep_cfg(0.01, 2);
        c.wmin = 1.0;
        c.wmax = 2.0;
        let r = &cmd_spectrum(&c).unwrap().rows[0];
        assert!((r[2] - r[1] - 0.02).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_config() {
        assert_eq!(cmd_spectrum(&sweep_cfg(0.1, 1)).unwrap_err().exit_code(), 1);
        let mut c = sweep_cfg(0.1, 5);
        c.wmin = -1.0;
        assert_eq!(cmd_lossrates(&c).unwrap_err().exit_code(), 1);
        let c = SweepConfig::default();
        assert!(matches!(cmd_spectrum(&c), Err(CliError::Usage(_))));
    }

    #[test]
    fn csv_is_deterministic() {
        let c = sweep_cfg(0.1, 7);
        let (mut a, mut b) = (Vec::new(), Vec::new());
        cmd_lossrates(&c).unwrap().write_csv(&mut a).unwrap();
        cmd_lossrates(&c).unwrap().write_csv(&mut b).unwrap();
        assert_eq!(a, b);
        assert!(String::from_utf8(a).unwrap().starts_with("omega_z [omega_x],kappa_L^A [kappa0]"));
    }

    #[test]
    fn json_mirrors_csv() {
        let t = cmd_spectrum(&sweep_cfg(0.05, 3)).unwrap();
        let mut buf = Vec::new();
        t.write_json(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 3);
        assert_eq!(v["meta"]["columns"][0], "omega_z [omega_x]");
        assert_eq!(v["meta"]["g"], 0.05);
    }

    #[test]
    fn coupling_sweep() {
        let c = SweepConfig { gmin: Some(0.0), gmax: Some(0.2), points: 3, ..Default::default() };
        let t = cmd_spectrum(&c).unwrap();
        assert_eq!(t.columns[0], "g [1]");
        assert_abs_diff_eq!(t.rows[0][1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bare_cavity_master_decay() {
        let cfg = MasterConfig {
            common: CommonArgs { g: Some(0.0), kappa0: Some(1e-2), ..Default::default() },
            dims: vec![4, 4],
            levels: 4,
            initial: "fock:1,0".into(),
            t_final: 1.0,
            stride: 1000,
            ..Default::default()
        };
        let t = cmd_master(&cfg).unwrap();
        let last = t.rows.last().unwrap();
        let n = t.column("<a^dag").unwrap();
        assert_abs_diff_eq!(*n.last().unwrap(), (-1.0f64).exp(), epsilon = 1e-6);
        assert_abs_diff_eq!(last[0] * 1e-2, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn initial_state_parsing() {
        let es = eig_hermitian(&fock::number(4).unwrap()).unwrap();
        assert!(matches!(initial_state("eigen:9", &es, 4, 0.0), Err(CliError::Usage(_))));
        assert!(matches!(initial_state("bogus", &es, 4, 0.0), Err(CliError::Usage(_))));
        assert_abs_diff_eq!(initial_state("thermal", &es, 4, 0.0).unwrap().populations()[0], 1.0, epsilon = 1e-15);
    }
}

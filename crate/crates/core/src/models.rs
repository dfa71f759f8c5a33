//! Cavity-system Hamiltonians for the two CPB circuits and the generic
//! Rabi form, the polaron-type unitary relating the circuits, and the
//! CPB parameter map.
//!
//! Frequencies are dimensionless, measured in units of the matter
//! frequency `omega_x`. The coupling `g` is `Omega_A / omega_z` for circuit A
//! and `Omega_B / omega_x` for circuit B.

use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::fock::{self, tensor, FockOperator, C64};

/// Elementary charge (C).
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;

pub const DEFAULT_DIMS: [usize; 2] = [20, 20];

/// Upper bound on `kappa0_ref / min(omega_z, omega_x)` for the good-cavity gate.
pub const GOOD_CAVITY_RATIO: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// CPB at the inductive position: flux-type coupling `(a+a^dag)(b+b^dag)`.
    CircuitA,
    /// CPB at the capacitive position: charge-type coupling `(a-a^dag)(b-b^dag)`.
    CircuitB,
    GenericRabi,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::CircuitA => "A",
            Variant::CircuitB => "B",
            Variant::GenericRabi => "rabi",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega_z: f64,
    pub omega_x: f64,
    pub g: f64,
    pub variant: Variant,
    /// Bare resonator loss rate at `omega_z = omega_x`.
    pub kappa0_ref: f64,
    /// Resonator impedance in ohm, when known.
    pub z_r: Option<f64>,
    /// Accept `kappa0_ref` above the good-cavity gate, with a warning.
    pub allow_bad_cavity: bool,
}

impl ModelParams {
    /// Parameters with `omega_x = 1` and a small reference loss rate.
    pub fn new(variant: Variant, omega_z: f64, g: f64) -> Self {
        ModelParams { omega_z, omega_x: 1.0, g, variant, kappa0_ref: 1e-3, z_r: None, allow_bad_cavity: false }
    }

    pub fn with_kappa0(mut self, kappa0_ref: f64) -> Self {
        self.kappa0_ref = kappa0_ref;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    /// Checks the invariants. A good-cavity violation is an error unless
    /// `allow_bad_cavity` is set, in which case it comes back as a warning.
    pub fn validate(&self) -> Result<Option<Warning>> {
        let positive = [("omega_z", self.omega_z), ("omega_x", self.omega_x), ("kappa0_ref", self.kappa0_ref)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.g >= 0.0 && self.g.is_finite()) {
            return Err(Error::InvalidParameter(format!("g must be non-negative, got {}", self.g)));
        }
        if let Some(z) = self.z_r {
            if z.is_nan() || z <= 0.0 {
                return Err(Error::InvalidParameter(format!("z_r must be positive, got {z}")));
            }
        }
        let limit = GOOD_CAVITY_RATIO * self.omega_z.min(self.omega_x);
        if self.kappa0_ref >= limit {
            let w = Warning::BadCavity { kappa: self.kappa0_ref, limit };
            if !self.allow_bad_cavity {
                return Err(Error::InvalidParameter(w.to_string()));
            }
            return Ok(Some(w.emit()));
        }
        Ok(None)
    }

    /// Bare loss rate at the current `omega_z` for a sweep at fixed
    /// resonator impedance, where it scales as `(omega_z/omega_x)^3`.
    pub fn kappa_lc0(&self) -> f64 {
        self.kappa0_ref * (self.omega_z / self.omega_x).powi(3)
    }

    /// `Omega_A = g omega_z`.
    pub fn omega_a(&self) -> f64 {
        self.g * self.omega_z
    }

    /// `Omega_B = g omega_x`.
    pub fn omega_b(&self) -> f64 {
        self.g * self.omega_x
    }
}

fn expect_variant(p: &ModelParams, v: Variant) -> Result<()> {
    if p.variant != v {
        return Err(Error::Variant(format!("expected {v:?} parameters, got {:?}", p.variant)));
    }
    Ok(())
}

struct SingleMode {
    n: FockOperator,
    id: FockOperator,
    /// `a + a^dag`
    x: FockOperator,
    /// `a - a^dag`
    p: FockOperator,
}

fn single_mode(dim: usize) -> Result<SingleMode> {
    let a = fock::destroy(dim)?;
    Ok(SingleMode {
        n: fock::number(dim)?,
        id: FockOperator::identity(&[dim]),
        x: a.add(&a.dagger())?,
        p: a.sub(&a.dagger())?,
    })
}

fn free_part(za: &SingleMode, zb: &SingleMode, omega_z: f64, omega_x: f64) -> Result<FockOperator> {
    tensor(&za.n, &zb.id).scale_real(omega_z).add(&tensor(&za.id, &zb.n).scale_real(omega_x))
}

/// A Hamiltonian split as `sum_k c_k(p) T_k` with parameter-free operators
/// `T_k`, so sweeps can rebuild it from cached pieces.
#[derive(Debug, Clone)]
pub struct HamiltonianTerms {
    pub variant: Variant,
    pub ops: Vec<FockOperator>,
}

impl HamiltonianTerms {
    /// Circuit A: `a^dag a, b^dag b, (a+a^dag)(b+b^dag), (b+b^dag)^2`.
    /// Circuit B: `a^dag a, b^dag b, (a-a^dag)(b-b^dag), [i(a-a^dag)]^2`.
    /// Generic Rabi: `a^dag a, b^dag b, (a+a^dag)(b+b^dag)`.
    pub fn new(variant: Variant, dims: [usize; 2]) -> Result<Self> {
        let (za, zb) = (single_mode(dims[0])?, single_mode(dims[1])?);
        let mut ops = vec![tensor(&za.n, &zb.id), tensor(&za.id, &zb.n)];
        match variant {
            Variant::CircuitA => {
                ops.push(tensor(&za.x, &zb.x));
                ops.push(tensor(&za.id, &zb.x.dot(&zb.x)?));
            }
            Variant::CircuitB => {
                let ip = za.p.scale(C64::i());
                ops.push(tensor(&za.p, &zb.p));
                ops.push(tensor(&ip.dot(&ip)?, &zb.id));
            }
            Variant::GenericRabi => ops.push(tensor(&za.x, &zb.x)),
        }
        Ok(HamiltonianTerms { variant, ops })
    }

    /// The `c_k` for `p.variant`, in the order of `ops`.
    pub fn coefficients(p: &ModelParams) -> Vec<f64> {
        match p.variant {
            Variant::CircuitA => {
                let big = p.omega_a();
                vec![p.omega_z, p.omega_x, big, big * big / p.omega_z]
            }
            Variant::CircuitB => {
                let big = p.omega_b();
                vec![p.omega_z, p.omega_x, -big, big * big / p.omega_x]
            }
            Variant::GenericRabi => vec![p.omega_z, p.omega_x, p.g * p.omega_z],
        }
    }

    pub fn assemble(&self, p: &ModelParams) -> Result<FockOperator> {
        expect_variant(p, self.variant)?;
        let c = Self::coefficients(p);
        let mut h = self.ops[0].scale_real(c[0]);
        for (op, &ck) in self.ops.iter().zip(&c).skip(1) {
            h = h.add(&op.scale_real(ck))?;
        }
        Ok(h)
    }
}

/// `omega_z a^dag a + omega_x b^dag b + Omega_A (a+a^dag)(b+b^dag) + (Omega_A^2/omega_z)(b+b^dag)^2`
pub fn build_circuit_a(p: &ModelParams, dims: [usize; 2]) -> Result<FockOperator> {
    expect_variant(p, Variant::CircuitA)?;
    HamiltonianTerms::new(Variant::CircuitA, dims)?.assemble(p)
}

/// `omega_z a^dag a + omega_x b^dag b - Omega_B (a-a^dag)(b-b^dag) + (Omega_B^2/omega_x)[i(a-a^dag)]^2`
pub fn build_circuit_b(p: &ModelParams, dims: [usize; 2]) -> Result<FockOperator> {
    expect_variant(p, Variant::CircuitB)?;
    HamiltonianTerms::new(Variant::CircuitB, dims)?.assemble(p)
}

/// Builds the Hamiltonian matching `p.variant`. Generic Rabi parameters
/// use a truncated bosonic matter mode of dimension `dims[1]`.
pub fn build(p: &ModelParams, dims: [usize; 2]) -> Result<FockOperator> {
    match p.variant {
        Variant::CircuitA => build_circuit_a(p, dims),
        Variant::CircuitB => build_circuit_b(p, dims),
        Variant::GenericRabi => build_generic_rabi(p.omega_z, p.omega_x, p.g * p.omega_z, dims[1], dims[0]),
    }
}

/// `omega_z a^dag a + rabi (a+a^dag) S_x + H_mat` with the photon as the
/// first mode. Two matter levels give `S_x = sigma_x` and
/// `H_mat = omega_x |e><e|`; more levels give a bosonic matter mode with
/// `S_x = b + b^dag` and `H_mat = omega_x b^dag b`.
pub fn build_generic_rabi(
    omega_z: f64,
    omega_x: f64,
    rabi: f64,
    matter_levels: usize,
    photon_dim: usize,
) -> Result<FockOperator> {
    if matter_levels < 2 {
        return Err(Error::InvalidDimension(matter_levels));
    }
    // for two levels the bosonic forms coincide with sigma_x and |e><e|
    let (za, zb) = (single_mode(photon_dim)?, single_mode(matter_levels)?);
    let coupling = tensor(&za.x, &zb.x).scale_real(rabi);
    free_part(&za, &zb, omega_z, omega_x)?.add(&coupling)
}

/// `exp[-g (a - a^dag)(b + b^dag)]` on a two-mode space.
///
/// The generator factorizes, so the exponential is assembled from the
/// eigenbasis of `b + b^dag` and single-mode exponentials of `a - a^dag`.
pub fn polaron_unitary(dims: [usize; 2], g: f64) -> Result<FockOperator> {
    let (za, zb) = (single_mode(dims[0])?, single_mode(dims[1])?);
    let (na, nb) = (dims[0], dims[1]);
    let (beta, q) = zb.x.data().mapv(|z| z.re).eigh(UPLO::Lower)?;
    // a - a^dag = i W diag(lam) W^dag with -i(a - a^dag) Hermitian
    let (lam, w) = fock::eigh_complex(za.p.scale(-C64::i()).data())?;
    let wd = w.t().mapv(|z| z.conj());
    // E_k = exp(-g beta_k (a - a^dag)), real for a real antisymmetric generator
    let e_k: Vec<Array2<f64>> = beta
        .iter()
        .map(|&b| {
            let mut we = w.clone();
            for (mut col, &l) in we.columns_mut().into_iter().zip(lam.iter()) {
                let ph = C64::from_polar(1.0, -g * b * l);
                col.mapv_inplace(|z| z * ph);
            }
            we.dot(&wd).mapv(|z| z.re)
        })
        .collect();
    let mut u = Array2::<f64>::zeros((na * nb, na * nb));
    for i in 0..na {
        for ip in 0..na {
            let diag: Vec<f64> = e_k.iter().map(|e| e[[i, ip]]).collect();
            if diag.iter().all(|d| d.abs() < 1e-300) {
                continue;
            }
            for j in 0..nb {
                for jp in 0..nb {
                    let v: f64 = (0..nb).map(|k| q[[j, k]] * diag[k] * q[[jp, k]]).sum();
                    u[[i * nb + j, ip * nb + jp]] = v;
                }
            }
        }
    }
    FockOperator::from_real(dims.to_vec(), u)
}

/// `U^dag H U` with `U = exp[-g (a - a^dag)(b + b^dag)]`. Maps the circuit-B
/// Hamiltonian onto circuit A away from the truncation boundary.
pub fn polaron_transform(h: &FockOperator, g: f64) -> Result<FockOperator> {
    let dims: [usize; 2] = h
        .dims()
        .try_into()
        .map_err(|_| Error::Shape(format!("polaron transform needs two modes, got dims {:?}", h.dims())))?;
    let u = polaron_unitary(dims, g)?;
    u.dagger().dot(h)?.dot(&u)
}

/// Cooper-pair-box parameters in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpbParams {
    pub c_j: f64,
    pub e_j: f64,
    /// `(2e)^2 / 2 C_J`
    pub e_cp: f64,
}

impl CpbParams {
    pub fn new(c_j: f64, e_j: f64) -> Result<Self> {
        if !(c_j > 0.0 && e_j > 0.0) {
            return Err(Error::InvalidParameter(format!("C_J and E_J must be positive, got {c_j}, {e_j}")));
        }
        let q = 2.0 * E_CHARGE;
        Ok(CpbParams { c_j, e_j, e_cp: q * q / (2.0 * c_j) })
    }

    pub fn is_transmon(&self) -> bool {
        self.e_j / self.e_cp > 10.0
    }
}

/// `(omega_x [rad/s], g)` for a CPB coupled to a resonator of impedance `z_r`.
pub fn cpb_params(c: &CpbParams, z_r: f64) -> Result<(f64, f64)> {
    if !(c.e_cp > 0.0 && c.e_j > 0.0 && z_r > 0.0) {
        return Err(Error::InvalidParameter("CPB energies and Z_R must be positive".into()));
    }
    let omega_x = (2.0 * c.e_cp * c.e_j).sqrt() / HBAR;
    let g = (c.e_cp / (2.0 * c.e_j)).powf(0.25) * (HBAR / (2.0 * z_r)).sqrt() / (2.0 * E_CHARGE);
    Ok((omega_x, g))
}

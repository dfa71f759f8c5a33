//! Error and warning types shared by every module.

use std::fmt;

use thiserror::Error;

use crate::netlist::ParseDiagnostic;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid truncation dimension {0}: at least 2 levels are required")]
    InvalidDimension(usize),

    #[error("operator is not Hermitian: |H - H^dag| = {residual:.3e} (|H| = {norm:.3e})")]
    NotHermitian { residual: f64, norm: f64 },

    #[error("operator is not anti-Hermitian: |G + G^dag| = {residual:.3e}")]
    NotAntiHermitian { residual: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unstable model: eigenfrequency {re:.6e}{im:+.6e}i is not real")]
    Unstable { re: f64, im: f64 },

    #[error("polariton branch has non-positive symplectic norm {0:.3e}")]
    NegativeNorm(f64),

    #[error("transition {lower} -> {upper} is not downward: upper index must exceed lower")]
    Ordering { lower: usize, upper: usize },

    #[error("model variant mismatch: {0}")]
    Variant(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid rate {rate:.3e} on transition {lower} -> {upper}")]
    InvalidRate { lower: usize, upper: usize, rate: f64 },

    #[error("integration failure: {0}")]
    Integration(String),

    #[error("steady state is not unique: null space has dimension {}", basis.len())]
    NonUniqueSteadyState { basis: Vec<ndarray::Array2<num_complex::Complex64>> },

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error("netlist has {} diagnostic(s), first: {}", .0.len(), .0.first().map(|d| d.to_string()).unwrap_or_default())]
    Netlist(Vec<ParseDiagnostic>),

    #[error(transparent)]
    Linalg(#[from] ndarray_linalg::error::LinalgError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Non-fatal conditions. Functions that can raise one log it and also
/// return it to the caller so tests and the CLI can inspect it.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Result changed by more than the tolerance when the truncation was doubled.
    Convergence { quantity: String, drift: f64 },
    /// The coupling operator has diagonal elements in the eigenbasis; they are dropped.
    Dephasing { max_diagonal: f64 },
    /// Two transitions are closer than the independent-transition guard allows.
    OverlappingTransitions { first: (usize, usize), second: (usize, usize), gap: f64, rate: f64 },
    /// Bare loss rate is not small against the system frequencies.
    BadCavity { kappa: f64, limit: f64 },
    /// Polariton branches are (nearly) degenerate.
    NearDegenerate { gap: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::Convergence { quantity, drift } => {
                write!(f, "{quantity} drifts by {drift:.3e} (relative) when truncation is doubled")
            }
            Warning::Dephasing { max_diagonal } => write!(
                f,
                "coupling operator has diagonal elements up to {max_diagonal:.3e}; pure dephasing is not modeled"
            ),
            Warning::OverlappingTransitions { first, second, gap, rate } => write!(
                f,
                "transitions {}->{} and {}->{} are {gap:.3e} apart with rate {rate:.3e}; post-trace RWA is unreliable",
                first.1, first.0, second.1, second.0
            ),
            Warning::BadCavity { kappa, limit } => {
                write!(f, "bare loss rate {kappa:.3e} exceeds good-cavity limit {limit:.3e}")
            }
            Warning::NearDegenerate { gap } => write!(f, "polariton branches are degenerate (gap {gap:.3e})"),
        }
    }
}

impl Warning {
    pub(crate) fn emit(self) -> Self {
        log::warn!("{self}");
        self
    }
}

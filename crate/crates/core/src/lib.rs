//! Dissipation of ultrastrongly coupled resonator/artificial-atom systems.
//!
//! Frequencies are in units of the atom frequency `omega_x` unless a
//! function says otherwise. The pieces, bottom up:
//!
//! - [`fock`]: truncated two-mode Fock spaces, Hermitian eigensolvers.
//! - [`models`]: the circuit A and B Hamiltonians, the polaron transform
//!   between them, and a generic Rabi model.
//! - [`bogoliubov`]: Hopfield diagonalization of the quadratic models.
//! - [`sec_rates`]: polariton loss rates for the different coupling flavors.
//! - [`lindblad`]: post-trace (secular) and pre-trace master equations.
//! - [`inout`]: reflection spectra.
//! - [`netlist`]: circuit files and their mapping to model parameters.
//! - [`cli`]: the commands behind the `usc` binary.
//!
//! The `examples/` directory has one runnable program per capability:
//! `fock_basics`, `polariton_spectrum`, `loss_rates`, `gauge_equivalence`,
//! `master_equation`, `reflection_spectrum`, `netlist_model`,
//! `fabry_perot` and `generic_rabi`.

pub mod bogoliubov;
pub mod cli;
pub mod error;
pub mod fock;
pub mod inout;
pub mod lindblad;
pub mod models;
pub mod netlist;
pub mod sec_rates;

pub use error::{Error, Result, Warning};
pub use fock::{eig_hermitian, EigenSystem, FockOperator, C64};
pub use models::{ModelParams, Variant};

//! The quantum Rabi model with a two-level atom, and the Hopfield model
//! without a diamagnetic term, which loses stability at strong coupling.

use usc::bogoliubov::hopfield_diagonalize;
use usc::fock::eig_hermitian;
use usc::models::build_generic_rabi;
use usc::{Error, ModelParams, Variant};

fn main() -> usc::Result<()> {
    println!("Rabi model at resonance, lowest gaps:");
    for rabi in [0.05, 0.2, 0.5, 1.0] {
        let es = eig_hermitian(&build_generic_rabi(1.0, 1.0, rabi, 2, 40)?)?;
        println!("  coupling {rabi:.2}: {:.5?}", es.excitation_gaps(3));
    }
    println!("bosonic Hopfield model:");
    for g in [0.2, 0.4, 0.49, 0.51, 0.6] {
        match hopfield_diagonalize(&ModelParams::new(Variant::GenericRabi, 1.0, g)) {
            Ok(m) => println!("  g = {g:.2}: omega = {:.5?}", m.frequencies()),
            Err(e @ Error::Unstable { .. }) => println!("  g = {g:.2}: {e}"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

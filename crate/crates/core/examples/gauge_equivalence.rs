//! Circuit A and B are unitarily equivalent: the polaron transform maps one
//! Hamiltonian onto the other away from the truncation edge, and the rate
//! formulas written in either set of Hopfield coefficients agree.

use usc::bogoliubov::hopfield_diagonalize;
use usc::fock::interior_indices;
use usc::models::{build, polaron_transform};
use usc::sec_rates::rates_circuit_b;
use usc::{ModelParams, Variant};

fn main() -> usc::Result<()> {
    let (wz, g) = (1.2, 0.2);
    let dims = [24, 24];
    let ha = build(&ModelParams::new(Variant::CircuitA, wz, g), dims)?;
    let hb = build(&ModelParams::new(Variant::CircuitB, wz, g), dims)?;
    let mapped = polaron_transform(&hb, g)?;
    let idx = interior_indices(&dims, 8);
    let worst = idx
        .iter()
        .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
        .map(|(i, j)| (mapped.data()[[i, j]] - ha.data()[[i, j]]).norm())
        .fold(0.0, f64::max);
    println!("max |U^dag H_B U - H_A| on states with n < 8: {worst:.2e}");

    let p = ModelParams::new(Variant::CircuitA, wz, g);
    let ma = hopfield_diagonalize(&p)?;
    let mb = hopfield_diagonalize(&p.with_variant(Variant::CircuitB))?;
    let direct = rates_circuit_b(&mb, p.kappa_lc0(), false)?;
    let via_a = rates_circuit_b(&ma, p.kappa_lc0(), true)?;
    for (s, t) in direct.transitions.iter().zip(&via_a.transitions) {
        println!("omega {:.6}: kappa^B {:.9e} from B coefficients, {:.9e} from A", s.omega, s.kappa, t.kappa);
    }
    Ok(())
}

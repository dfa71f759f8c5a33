//! Reflection phase across the lower polariton line of circuit A.

use usc::fock::eig_hermitian;
use usc::inout::{linspace, spectrum};
use usc::models::build;
use usc::sec_rates::{transition_table, SecFlavor, TransitionRates};
use usc::{ModelParams, Variant};

fn main() -> usc::Result<()> {
    let p = ModelParams::new(Variant::CircuitA, 1.0, 0.1).with_kappa0(1e-2);
    let es = eig_hermitian(&build(&p, [16, 16])?)?;
    let all = transition_table(&SecFlavor::general_flux(p.kappa0_ref, p.omega_z), &es, 6)?;
    let from_ground = TransitionRates {
        levels: all.levels.clone(),
        transitions: all.transitions.iter().filter(|t| t.lower == 0 && t.kappa > 0.0).copied().collect(),
    };
    for t in &from_ground.transitions {
        println!("line at {:.6} with width {:.3e}", t.omega, t.kappa);
    }
    // the grid step has to resolve the linewidth for the phase to unwrap cleanly
    let s = spectrum(&from_ground, &linspace(0.88, 0.93, 26))?;
    println!("{:>8} {:>10} {:>10}", "omega", "phase", "delay");
    for q in &s.points {
        println!("{:>8.4} {:>10.4} {:>10.2}", q.omega, q.phase, q.group_delay);
    }
    Ok(())
}

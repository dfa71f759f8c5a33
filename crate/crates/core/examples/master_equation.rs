//! Relaxation of the upper polariton under the secular master equation,
//! and the steady state of the standard cavity-damping model for contrast.

use usc::fock::eig_hermitian;
use usc::lindblad::{build_generator, build_generator_standard, evolve, steady_state, DensityMatrix};
use usc::models::build;
use usc::sec_rates::{transition_table, SecFlavor};
use usc::{ModelParams, Variant};

fn main() -> usc::Result<()> {
    let p = ModelParams::new(Variant::CircuitA, 1.0, 0.3).with_kappa0(1e-2);
    let levels = 6;
    let es = eig_hermitian(&build(&p, [16, 16])?)?;
    let rates = transition_table(&SecFlavor::general_flux(p.kappa0_ref, p.omega_z), &es, levels)?;
    let gen = build_generator(&es, &rates, 0.0)?;

    // at g = 0.3 the levels run G, L, U, LL, ... so index 2 is the upper polariton
    let start = 2;
    let traj = evolve(&gen, &DensityMatrix::basis_state(levels, start)?, 5.0 / p.kappa0_ref, 0.05, 2000)?;
    println!("{:>8}  populations", "t");
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        let pops: Vec<String> = (0..levels).map(|k| format!("{:.4}", rho[[k, k]].re)).collect();
        println!("{t:>8.1}  {}", pops.join(" "));
    }

    let secular = steady_state(&gen)?;
    let standard = steady_state(&build_generator_standard(&es, p.kappa0_ref, 1.0, 0.0, levels)?)?;
    println!(
        "ground population at T = 0: secular {:.8}, standard {:.8}",
        secular.populations()[0],
        standard.populations()[0]
    );
    Ok(())
}

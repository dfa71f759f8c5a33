//! Lower and upper polariton frequencies from the Hopfield diagonalization,
//! checked against exact diagonalization in a truncated Fock space.

use usc::bogoliubov::hopfield_diagonalize;
use usc::fock::{eig_hermitian, lowest_eigenvalues_in, parity_sectors};
use usc::models::build;
use usc::{ModelParams, Variant};

fn main() -> usc::Result<()> {
    let g = 0.1;
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "wz", "wL", "wU", "wL fock", "wU fock");
    let dims = [24, 24];
    let (even, odd) = parity_sectors(&dims);
    for k in 0..=10 {
        let wz = 0.5 + 0.1 * k as f64;
        let p = ModelParams::new(Variant::CircuitA, wz, g);
        let [wl, wu] = hopfield_diagonalize(&p)?.frequencies();
        let h = build(&p, dims)?;
        let e0 = lowest_eigenvalues_in(&h, &even, 1)?[0];
        let e1 = lowest_eigenvalues_in(&h, &odd, 2)?;
        println!("{wz:>6.2} {wl:>10.6} {wu:>10.6} {:>10.6} {:>10.6}", e1[0] - e0, e1[1] - e0);
    }

    // full diagonalization also exposes the two-polariton ladder
    let es = eig_hermitian(&build(&ModelParams::new(Variant::CircuitB, 1.0, g), [12, 12])?)?;
    println!("circuit B excitation gaps: {:.5?}", es.excitation_gaps(5));
    Ok(())
}

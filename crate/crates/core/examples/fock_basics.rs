//! Ladder operators on a truncated space and the two-mode parity sectors.

use usc::fock::{destroy, eig_hermitian, number, parity_sectors, two_mode_ops};

fn main() -> usc::Result<()> {
    let a = destroy(5)?;
    let comm = a.commutator(&a.dagger())?;
    println!("diag [a, a^dag] on 5 levels:");
    for i in 0..5 {
        println!("  {i}: {:+.1}", comm.data()[[i, i]].re);
    }

    let es = eig_hermitian(&number(4)?)?;
    println!("spectrum of a^dag a: {:?}", es.frequencies);

    let (a, b) = two_mode_ops([3, 3])?;
    println!("[a, b] norm = {:.1e}", a.commutator(&b)?.norm());
    let (even, odd) = parity_sectors(&[3, 3]);
    println!("parity sectors of a 3x3 space: {} even, {} odd", even.len(), odd.len());
    Ok(())
}

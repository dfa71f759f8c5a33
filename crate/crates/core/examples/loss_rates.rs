//! Polariton loss rates of both circuits across the resonance, in units of
//! the bare rate at `omega_z = omega_x`.

use usc::cli::{loss_rates, Flavor};
use usc::{ModelParams, Variant};

fn main() -> usc::Result<()> {
    for (name, flavor) in
        [("straightforward", Flavor::Straightforward), ("general", Flavor::General), ("standard", Flavor::Standard)]
    {
        println!("{name}");
        println!("{:>6} {:>9} {:>9} {:>9} {:>9}", "wz", "kL^A", "kU^A", "kL^B", "kU^B");
        for k in 0..=10 {
            let wz = 0.5 + 0.1 * k as f64;
            let r = loss_rates(&ModelParams::new(Variant::CircuitA, wz, 0.1), flavor)?;
            println!("{wz:>6.2} {:>9.5} {:>9.5} {:>9.5} {:>9.5}", r[0], r[1], r[2], r[3]);
        }
    }
    Ok(())
}

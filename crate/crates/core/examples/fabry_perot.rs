//! Mode frequencies and bare loss rates of a Fabry-Perot cavity and a
//! transmission-line resonator.

use usc::netlist::{fabry_perot_params, tlr_params};

fn main() -> usc::Result<()> {
    println!("Fabry-Perot, eta = 0.1, L = 2 cm");
    for m in 1..=4 {
        let f = fabry_perot_params(0.1, 0.02, m)?;
        println!("  m = {m}: omega = {:.4e} rad/s, kappa = {:.4e} 1/s", f.omega_m, f.kappa_fp0.kappa_ref);
    }
    println!("transmission line, Z_T = 50, C_C = 5 fF, C_T = 160 pF/m, L = 12 mm");
    for m in 1..=4 {
        let t = tlr_params(50.0, 5e-15, 1.6e-10, 0.012, m)?;
        println!(
            "  m = {m}: omega = {:.4e} rad/s, kappa = {:.4e} 1/s, Q = {:.0}",
            t.omega_m,
            t.kappa_m,
            t.omega_m / t.kappa_m
        );
    }
    Ok(())
}

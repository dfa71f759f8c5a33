//! Parse a lumped-element circuit and map it to model parameters.

use usc::netlist::{parse_netlist, serialize, to_model};

const CIRCUIT: &str = "\
[resonator]
C_R = 6.3e-15
L_R = 1.6e-7

[qubit]
C_J = 1.65e-13
E_J = 1.67e-23
position = capacitive

[coupling]
C_C = 1e-16

[line]
Z_T = 50
";

fn main() -> usc::Result<()> {
    let spec = match parse_netlist(CIRCUIT) {
        Ok(s) => s,
        Err(diags) => {
            for d in diags {
                eprintln!("{d}");
            }
            std::process::exit(2);
        }
    };
    println!("canonical form:\n{}", serialize(&spec));
    let m = to_model(&spec)?;
    let lc = m.lc.expect("LC resonator");
    println!("omega_z = {:.6e} rad/s, Z_R = {:.3} ohm", lc.omega_z, lc.z_r);
    println!("variant {}, g = {:.5}, omega_z / omega_x = {:.5}", m.params.variant, m.params.g, m.params.omega_z);
    println!("kappa_LC0 = {:.4e} 1/s, kappa0 / omega_x = {:.4e}", lc.kappa_lc0, m.params.kappa0_ref);
    println!("transmon regime: {:?}, bad cavity: {}", m.transmon, m.bad_cavity());

    let broken = CIRCUIT.replace("C_R = 6.3e-15", "C_R = -1");
    if let Err(diags) = parse_netlist(&broken) {
        println!("diagnostics for a broken copy:");
        for d in diags {
            println!("  {d}");
        }
    }
    Ok(())
}

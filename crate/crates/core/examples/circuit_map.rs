//! Maps the reference circuit to spin-model parameters, once with inverse
//! capacitances calibrated to the reference targets and once from the
//! assumed netlist.

use spin_transistor::circuit::{
    calibrate_inverse_capacitance, map_circuit, CircuitMap, CircuitParams, KMatrixSpec, ReferenceTargets,
};
use spin_transistor::units::{to_2pi_ghz, to_2pi_mhz, to_inverse_ff};

fn show(label: &str, m: &CircuitMap) {
    let c = &m.couplings;
    let r = &m.ratios;
    println!("{label}");
    println!("  E_J1/E_C1 = {:.3}   E_J2/E_C2 = {:.3}   E_L2/E_J2 = {:.4}", r.ej1_over_ec1, r.ej2_over_ec2, r.el2_over_ej2);
    println!("  E_CCM     = {:.4} 2pi*GHz", to_2pi_ghz(m.energies.e_ccm));
    println!("  Omega     = {:.4} 2pi*GHz   Delta = {:.4} 2pi*GHz", to_2pi_ghz(c.omega), to_2pi_ghz(c.delta));
    println!("  J_z       = {:.3} 2pi*MHz", to_2pi_mhz(c.j_z));
    println!("  J_x/J_z = {:.4}   J_2/J_z = {:.4}   J_4/J_z = {:.4e}", r.jx_over_jz, r.j2_over_jz, r.j4_over_jz);
    for w in &m.energies.warnings {
        println!("  warning: {w}");
    }
}

fn main() -> spin_transistor::Result<()> {
    let p = CircuitParams::reference();

    let kinv = calibrate_inverse_capacitance(&p, &ReferenceTargets::reference())?;
    println!("calibrated inverse capacitances (1/fF):");
    for ((i, j), v) in kinv.entries() {
        println!("  ({i},{j}) = {:.6e}", to_inverse_ff(v));
    }
    show("calibrated", &map_circuit(&p, &KMatrixSpec::ExplicitInverseEntries(kinv))?);
    show("assumed netlist", &map_circuit(&p, &KMatrixSpec::Netlist)?);
    Ok(())
}

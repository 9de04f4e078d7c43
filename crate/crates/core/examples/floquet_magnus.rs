//! Effective Hamiltonian of the detuned transistor: transfer time, the
//! integer condition on G, the one-up spectrum and how well stroboscopic
//! evolution follows it as Δ grows.

use spin_transistor::dynamics::SolverOptions;
use spin_transistor::hamiltonian::DiamondCouplings;
use spin_transistor::transfer::{floquet_eigensystem_b1, magnus_floquet, stroboscopic_error};
use spin_transistor::units::{from_2pi_ghz, to_2pi_mhz, to_us};

fn main() -> spin_transistor::Result<()> {
    let c = DiamondCouplings::reference().without_crosstalk();
    let f = magnus_floquet(&c)?;
    println!("t_f = {:.4} us, G = {:.3} (nearest {}), kappa = {:.3} 2pi*MHz", to_us(f.t_f), f.g, f.g_nearest(), to_2pi_mhz(f.kappa));

    let eig = floquet_eigensystem_b1(&c)?;
    for (k, (num, closed)) in eig.energies.iter().zip(&eig.closed_form).enumerate() {
        println!("  E{} = {:>10.4} 2pi*MHz (closed form {:>10.4})", k + 1, to_2pi_mhz(*num), to_2pi_mhz(*closed));
    }
    let [r23, r24] = eig.transfer_phase_residuals(f.t_f);
    println!("  phase residuals at t_f: {r23:.3} rad, {r24:.3} rad");

    let opts = SolverOptions::default();
    for delta in [0.5, 1.0, 2.0] {
        let s = stroboscopic_error(&DiamondCouplings { delta: from_2pi_ghz(delta), ..c }, &opts)?;
        println!("Delta = {delta} 2pi*GHz: {} periods, ||U - exp(-i H_F t)|| = {:.4}", s.periods, s.error);
    }
    Ok(())
}

//! Single-excitation spectrum of the static diamond and the coupling ratios
//! that give perfect transfer.

use spin_transistor::dynamics::unitary;
use spin_transistor::hamiltonian::{build_general_diamond, GeneralCouplings};
use spin_transistor::basis::parse_label;
use spin_transistor::transfer::{eigensystem_b1, resonant_coupling, resonant_transfer_criterion};
use spin_transistor::units::from_2pi_mhz;

/// Best |⟨↓↓↓↑|U(t)|↑↓↓↓⟩|² over a fine scan of [0, 2π/|J_z|].
fn scan_peak(j12: f64, jz: f64) -> (f64, f64) {
    let h = build_general_diamond(&GeneralCouplings::reduced(j12, jz));
    let (from, to) = (parse_label("uddd").unwrap(), parse_label("dddu").unwrap());
    let t_end = 2.0 * std::f64::consts::PI / jz.abs();
    (0..=4000)
        .map(|i| {
            let t = t_end * i as f64 / 4000.0;
            (t * jz.abs() / std::f64::consts::PI, unitary(&h, t).0[(to, from)].norm_sqr())
        })
        .fold((0.0, 0.0), |best, x| if x.1 > best.1 { x } else { best })
}

fn main() -> spin_transistor::Result<()> {
    let jz = from_2pi_mhz(-41.99);
    let e = eigensystem_b1(resonant_coupling(1, jz), jz)?;
    println!("E = {:?} (rad/s), zeta = {:.6}, eigen residual {:.2e}", e.energies, e.zeta, e.max_residual);
    for m in 1..=3 {
        let j12 = resonant_coupling(m, jz);
        let check = resonant_transfer_criterion(j12, jz)?;
        let (at, peak) = scan_peak(j12, jz);
        println!("m = {m}: J12/Jz = {:.6}, residual {:.1e}, scanned peak {:.12} at t = {at:.4} t_f", j12 / jz, check.residual, peak);
    }
    let (at, peak) = scan_peak(jz, jz);
    println!("J12/Jz = 1.0 (off criterion): scanned peak {peak:.10} at t = {at:.4} t_f");
    Ok(())
}

//! Rabi flip of the gate pair between open and closed under a resonant
//! drive, and what happens when the drive sits at the literal |Ω − 3J_z|
//! with the reference J_x.

use spin_transistor::dynamics::SolverOptions;
use spin_transistor::experiments::{run_state_prep, Gate};
use spin_transistor::hamiltonian::{DiamondCouplings, DriveParams};
use spin_transistor::units::{from_us, to_2pi_ghz, to_us};

fn main() -> spin_transistor::Result<()> {
    let opts = SolverOptions::default();
    let a = DriveParams::pi_amplitude(from_us(0.05));
    let t1 = DiamondCouplings::reference();
    let symmetric = DiamondCouplings { j_x: -t1.j_z, ..t1 };
    let cases = [
        ("J_x = -J_z, omega_d = |Omega - 3J_z|", symmetric, DriveParams::resonant(a, &symmetric)?),
        ("reference, omega_d = |Omega + J_x - 2J_z|", t1, DriveParams::resonant_exact(a, &t1)?),
        ("reference, omega_d = |Omega - 3J_z|", t1, DriveParams::resonant(a, &t1)?),
    ];
    for (label, c, d) in cases {
        for start in [Gate::Open, Gate::Closed] {
            let r = run_state_prep(&d, &c, start, None, &opts)?;
            println!(
                "{label:<44} omega_d = {:.4} 2pi*GHz  {} -> {}: {:.5} at {:.4} us, max up-up {:.1e}",
                to_2pi_ghz(d.omega_d),
                start.label(),
                r.target().label(),
                r.t_pi.value,
                to_us(r.t_pi.time),
                r.max_up_up
            );
        }
    }
    Ok(())
}

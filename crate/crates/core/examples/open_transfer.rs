//! Perfect transfer through the open gate of the static resonant diamond,
//! including the sign flip on the |↓⟩ component.

use spin_transistor::dynamics::{fidelity, propagate, SolverOptions, TimeGrid};
use spin_transistor::hamiltonian::{build_general_diamond, GeneralCouplings};
use spin_transistor::state::{down, gate_state, left_state, register_state, GateSetting};
use spin_transistor::transfer::{open_transfer_phase_check, resonant_coupling};
use spin_transistor::units::{from_2pi_mhz, to_us};

fn main() -> spin_transistor::Result<()> {
    let jz = from_2pi_mhz(-41.99);
    let h = build_general_diamond(&GeneralCouplings::reduced(resonant_coupling(1, jz), jz));
    let t_f = std::f64::consts::PI / jz.abs();
    println!("t_f = pi/|J_z| = {:.5} us", to_us(t_f));

    let grid = TimeGrid::new(0.0, t_f, 201)?;
    for (r, theta) in [(0.0, 0.0), (0.5, 1.0), (1.0, 2.5)] {
        let left = left_state(r, theta);
        let psi0 = register_state(&left, &gate_state(GateSetting::Open), &down());
        let states = propagate(&h, &psi0, &grid, &SolverOptions::default())?;
        let amps = left.as_pure().unwrap();
        let target = open_transfer_phase_check(amps[0], amps[1])?;
        let naive = open_transfer_phase_check(amps[0], -amps[1])?;
        let end = states.last().unwrap();
        println!(
            "r = {r:.2}, theta = {theta:.2}:  F(a|up> - b|down>) = {:.12}   F(a|up> + b|down>) = {:.6}",
            fidelity(end, &target)?,
            fidelity(end, &naive)?
        );
    }
    Ok(())
}

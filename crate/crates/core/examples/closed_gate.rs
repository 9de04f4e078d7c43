//! Blockade conditions for the closed gate and its remain fidelity in the
//! rotating-frame and cross-talk models.

use spin_transistor::experiments::{run_scenario, Gate, Model, Scenario};
use spin_transistor::hamiltonian::DiamondCouplings;
use spin_transistor::transfer::{check_closed, closed_for_arbitrary_right};
use spin_transistor::units::{from_us, to_us};

fn main() -> spin_transistor::Result<()> {
    let c = DiamondCouplings::reference();
    let general = c.without_crosstalk().as_general();
    let report = check_closed(&general, std::f64::consts::FRAC_PI_4);
    println!("static couplings without J4: max residual {:.2e}", report.max_residual());
    println!("  closing gate angles: {:?}", report.theta_solutions);
    println!("  closed for arbitrary left/right states: {}", closed_for_arbitrary_right(&general));
    let with_j4 = check_closed(&c.as_general(), std::f64::consts::FRAC_PI_4);
    println!("with J4: J14 residual {:.2e} (the gate leaks)", with_j4.j14_residual);

    for model in [Model::RotatingFrame, Model::Circuit] {
        let r = run_scenario(&Scenario::new(model.label(), model, Gate::Closed))?;
        let worst = &r.band.min;
        println!(
            "{:<15} min F over 0.7 us = {:.6}   min F over {:.1} us = {:.6}",
            model.label(),
            worst.min_until(from_us(0.7)),
            to_us(*worst.times.last().unwrap()),
            worst.min()
        );
    }
    Ok(())
}

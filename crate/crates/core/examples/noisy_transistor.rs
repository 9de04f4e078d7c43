//! Closed- and open-gate fidelity bands for the rotating-frame, cross-talk
//! and dephasing models, written as CSV and SVG.
//!
//! Usage: `cargo run --release --example noisy_transistor [out_dir]`

use std::path::PathBuf;

use spin_transistor::experiments::{plot_bands, run_scenario, write_scenario_csv, Gate, Model, Scenario};
use spin_transistor::units::{from_us, to_us};

fn main() -> spin_transistor::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/noisy_transistor".into()));
    for gate in [Gate::Closed, Gate::Open] {
        let mut results = Vec::new();
        for model in [Model::RotatingFrame, Model::Circuit, Model::CircuitNoisy] {
            let s = Scenario::new(format!("{}_{}", gate.label(), model.label()), model, gate);
            let r = run_scenario(&s)?;
            let worst = &r.band.min;
            let peak = worst.peak().unwrap();
            println!(
                "{:<28} F(0.7 us) = {:.4}   worst-case peak {:.4} at {:.3} us",
                s.name,
                worst.at(from_us(0.7)).unwrap(),
                peak.value,
                to_us(peak.time)
            );
            write_scenario_csv(&out, &r)?;
            results.push(r);
        }
        let refs: Vec<_> = results.iter().collect();
        let path = plot_bands(&out.join(format!("{}.svg", gate.label())), &format!("{} gate", gate.label()), &refs)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

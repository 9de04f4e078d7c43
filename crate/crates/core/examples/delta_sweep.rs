//! Transfer fidelity for several detunings with the other spin parameters
//! fixed, one curve per Δ.
//!
//! Usage: `cargo run --release --example delta_sweep [out_dir]`

use std::path::PathBuf;

use spin_transistor::experiments::{plot_sweep, run_delta_sweep, write_sweep_csv, Gate, InitialLeft, Model, Scenario};
use spin_transistor::units::to_us;

fn main() -> spin_transistor::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/delta_sweep".into()));
    let mut base = Scenario::new("open_circuit", Model::Circuit, Gate::Open);
    base.initial_left = InitialLeft::single(0.0, 0.0);
    let table = run_delta_sweep(&base, &[0.5, 1.0, 1.067, 2.0])?;
    for r in &table.rows {
        println!(
            "Delta = {:<5} 2pi*GHz  t_peak = {:.4} us  (analytic {:.4} us)  F = {:.6}",
            r.value,
            to_us(r.peak_time),
            to_us(r.t_f.unwrap()),
            r.peak_fidelity
        );
    }
    write_sweep_csv(&out, "delta_sweep", &table)?;
    println!("wrote {}", plot_sweep(&out.join("delta_sweep.svg"), "transfer vs detuning", &table)?.display());
    Ok(())
}

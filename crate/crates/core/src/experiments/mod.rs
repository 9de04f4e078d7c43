//! Config-driven runs: fidelity scenarios over a lattice of initial states,
//! parameter sweeps, driven gate preparation, and their CSV/SVG output.

pub mod config;
mod emit;
mod scenario;
mod state_prep;
mod sweep;

pub use emit::{
    band_csv, crosstalk_csv, plot_bands, plot_state_prep, plot_sweep, plot_traces, state_prep_csv, sweep_csv, write_scenario_csv,
    write_state_prep_csv, write_sweep_csv, OutputFormat,
};
pub use scenario::{named_couplings, run_scenario, Drift, FidelityBand, Gate, InitialLeft, Model, SampledTrace, Scenario, ScenarioResult, Tolerances};
pub use state_prep::{default_state_prep_grid, first_maximum, nominal_pi_time, run_state_prep, GatePopulations, StatePrepResult};
pub use sweep::{analytic_transfer_time, power_law_exponent, run_delta_sweep, run_sweep, Reduction, SweepParameter, SweepRow, SweepSpec, SweepTable};

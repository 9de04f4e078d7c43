use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve_columns, FidelityTrace, Peak, SolverOptions, TimeGrid, TraceMetadata};
use crate::error::{Error, Result};
use crate::hamiltonian::{circuit_hamiltonian, drive_hamiltonian, DiamondCouplings, DriveParams};
use crate::operator::C64;
use crate::state::{down, gate_state, register_state};
use crate::units;

use super::scenario::Gate;

/// Gate-pair populations from the reduced density matrix of qubits 2, 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GatePopulations {
    pub open: f64,
    pub closed: f64,
    pub up_up: f64,
    pub singlet: f64,
}

impl GatePopulations {
    fn from_register(psi: &nalgebra::DVectorView<C64>) -> Self {
        // Index = 8·q1 + 4·q2 + 2·q3 + q4 with bit 0 = ↑; gate index g = 2·q2 + q3.
        let mut rho = [[C64::from(0.0); 4]; 4];
        for outer in 0..4 {
            let (q1, q4) = (outer >> 1, outer & 1);
            let idx = |g: usize| 8 * q1 + 2 * g + q4;
            for (a, row) in rho.iter_mut().enumerate() {
                for (b, x) in row.iter_mut().enumerate() {
                    *x += psi[idx(a)] * psi[idx(b)].conj();
                }
            }
        }
        let sym = (rho[1][1] + rho[2][2]).re;
        let cross = (rho[1][2] + rho[2][1]).re;
        GatePopulations {
            open: rho[3][3].re,
            closed: 0.5 * (sym + cross),
            up_up: rho[0][0].re,
            singlet: 0.5 * (sym - cross),
        }
    }

    pub fn of(&self, gate: Gate) -> f64 {
        match gate {
            Gate::Open => self.open,
            Gate::Closed => self.closed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePrepResult {
    pub start: Gate,
    pub drive: DriveParams,
    /// Population of the opposite gate state over time.
    pub trace: FidelityTrace,
    pub populations: Vec<GatePopulations>,
    /// First population maximum of the target state.
    pub t_pi: Peak,
    pub max_up_up: f64,
    pub max_norm_drift: f64,
    pub warnings: Vec<String>,
}

impl StatePrepResult {
    pub fn target(&self) -> Gate {
        opposite(self.start)
    }
}

fn opposite(g: Gate) -> Gate {
    match g {
        Gate::Open => Gate::Closed,
        Gate::Closed => Gate::Open,
    }
}

/// On-resonance π time for amplitude A, π/(√2·A).
pub fn nominal_pi_time(amplitude: f64) -> Option<f64> {
    (amplitude > 0.0).then(|| PI / (SQRT_2 * amplitude))
}

/// Default window: 2.5 nominal π times, or 1 μs without a drive.
pub fn default_state_prep_grid(d: &DriveParams) -> TimeGrid {
    let t1 = nominal_pi_time(d.amplitude).map_or(units::from_us(1.0), |t| 2.5 * t);
    TimeGrid {
        t0: 0.0,
        t1,
        n_points: 2001,
    }
}

/// Drives the gate pair of the cross-talk model, starting from the given
/// gate state with both outer qubits |↓⟩.
pub fn run_state_prep(d: &DriveParams, c: &DiamondCouplings, start: Gate, grid: Option<TimeGrid>, opts: &SolverOptions) -> Result<StatePrepResult> {
    DriveParams::new(d.amplitude, d.omega_d)?;
    c.validate()?;
    let grid = grid.unwrap_or_else(|| default_state_prep_grid(d));
    grid.validate()?;
    let mut warnings = Vec::new();
    if d.amplitude >= c.j_z.abs() {
        warnings.push(format!(
            "drive amplitude {:.4} 2pi*MHz is not small against |J_z| = {:.4} 2pi*MHz; the resonant-drive picture breaks down",
            units::to_2pi_mhz(d.amplitude),
            units::to_2pi_mhz(c.j_z.abs())
        ));
    }
    let h = circuit_hamiltonian(c).plus(&drive_hamiltonian(d, c.omega));
    let psi0 = register_state(&down(), &gate_state(start.setting()), &down());
    let v = psi0.as_pure().expect("pure product state");
    let y0 = DMatrix::from_column_slice(v.len(), 1, v.as_slice());

    let target = opposite(start);
    let mut populations = Vec::with_capacity(grid.n_points);
    let mut max_norm_drift: f64 = 0.0;
    evolve_columns(&h, y0, &grid.points(), opts, |_, _, y| {
        let col = y.column(0);
        max_norm_drift = max_norm_drift.max((col.norm() - 1.0).abs());
        populations.push(GatePopulations::from_register(&col));
    })?;
    let trace = FidelityTrace::new(
        grid.points(),
        populations.iter().map(|p| p.of(target)).collect(),
        TraceMetadata {
            scenario: "state_prep".into(),
            initial_state: start.label().into(),
            gate: target.label().into(),
            model: "circuit_driven".into(),
        },
    )?;
    let t_pi = first_maximum(&trace).ok_or_else(|| Error::InvalidState("empty state-prep trace".into()))?;
    Ok(StatePrepResult {
        start,
        drive: *d,
        max_up_up: populations.iter().map(|p| p.up_up).fold(0.0, f64::max),
        trace,
        populations,
        t_pi,
        max_norm_drift,
        warnings,
    })
}

/// First hump of the trace: the maximum between the first upward and the
/// following downward crossing of half the global maximum. Fast ripple on
/// top of the Rabi envelope never crosses that level, so it cannot masquerade
/// as the first maximum.
pub fn first_maximum(trace: &FidelityTrace) -> Option<Peak> {
    let global = trace.peak()?;
    let f = &trace.fidelities;
    let base = f[0];
    let level = base + 0.5 * (global.value - base);
    let Some(rise) = f.iter().position(|&x| x > level) else {
        return Some(global);
    };
    let fall = f[rise..].iter().position(|&x| x < level).map_or(f.len() - 1, |k| rise + k);
    trace.peak_in(trace.times[rise.saturating_sub(1)], trace.times[fall])
}

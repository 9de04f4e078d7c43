//! Analytic results for the transistor: blockade constraints, the
//! single-excitation spectrum, the resonance criterion and the effective
//! Hamiltonian of the detuned device.

mod closed;
mod floquet;
mod resonant;

use std::path::Path;

use serde::Serialize;

pub use closed::{check_closed, closed_for_arbitrary_right, ClosedGateReport};
pub use floquet::{
    floquet_eigensystem_b1, kappa, magnus_floquet, phase_from_pi, stroboscopic_error, FloquetEigensystem,
    FloquetResult, FloquetSummary, StroboscopicError,
};
pub use resonant::{
    eigensystem_b1, open_transfer_phase_check, resonant_coupling, resonant_transfer_criterion, EigensystemB1,
    ResonanceCheck,
};

/// Writes any report as pretty-printed JSON.
pub fn write_report<T: Serialize>(path: &Path, report: &T) -> crate::Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(report)?)?;
    Ok(())
}

//! Transfer through the open gate without driving: the single-excitation
//! sector of the reduced model.

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::basis::SpinSector;
use crate::error::{Error, Result};
use crate::hamiltonian::{build_general_diamond, GeneralCouplings};
use crate::operator::{C64, DIM};
use crate::state::QuantumState;
use crate::basis::parse_label;

/// Eigenpairs of the reduced model in the one-up sector, ordered basis
/// |↑↓↓↓⟩, |↓↑↓↓⟩, |↓↓↑↓⟩, |↓↓↓↑⟩. Vectors are not normalised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigensystemB1 {
    pub energies: [f64; 4],
    pub states: [[f64; 4]; 4],
    pub zeta: f64,
    pub l: f64,
    /// Largest ‖Hv − Ev‖/‖v‖ against the assembled Hamiltonian block.
    pub max_residual: f64,
}

pub fn eigensystem_b1(j12: f64, jz: f64) -> Result<EigensystemB1> {
    if j12 == 0.0 || !j12.is_finite() || !jz.is_finite() {
        return Err(Error::Degenerate(format!(
            "single-excitation eigensystem needs a finite nonzero J12, got {j12}"
        )));
    }
    let l = (4.0 * j12 * j12 + jz * jz).sqrt();
    let zeta = (jz + l) / (2.0 * j12);
    let energies = [-jz, jz, -l, l];
    let states = [
        [0.0, 1.0, 1.0, 0.0],
        [-1.0, 0.0, 0.0, 1.0],
        [1.0, -zeta, zeta, 1.0],
        [1.0, 1.0 / zeta, -1.0 / zeta, 1.0],
    ];
    let sector = SpinSector::new(-1)?;
    let block = build_general_diamond(&GeneralCouplings::reduced(j12, jz)).restrict(sector.basis());
    let max_residual = energies
        .iter()
        .zip(&states)
        .map(|(e, v)| {
            let v = DVector::from_iterator(4, v.iter().map(|x| C64::from(*x)));
            (&block.0 * &v - &v * C64::from(*e)).norm() / v.norm()
        })
        .fold(0.0, f64::max);
    Ok(EigensystemB1 {
        energies,
        states,
        zeta,
        l,
        max_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceCheck {
    pub m: u32,
    pub residual: f64,
    /// π/|J23ᶻ| (s).
    pub t_f: f64,
}

impl ResonanceCheck {
    pub fn is_perfect(&self, tol: f64) -> bool {
        self.residual <= tol
    }
}

/// Perfect transfer requires |J12/J23ᶻ| = √(m² − ¼) for some integer m ≥ 1.
pub fn resonant_transfer_criterion(j12: f64, jz: f64) -> Result<ResonanceCheck> {
    if jz == 0.0 || !jz.is_finite() {
        return Err(Error::Degenerate("resonance criterion needs a nonzero J23ᶻ".into()));
    }
    let ratio = (j12 / jz).abs();
    let residual = |m: u32| (ratio - ((m * m) as f64 - 0.25).sqrt()).abs();
    let guess = (ratio * ratio + 0.25).sqrt();
    let m = [guess.floor(), guess.ceil()]
        .into_iter()
        .map(|x| (x as u32).max(1))
        .min_by(|a, b| residual(*a).total_cmp(&residual(*b)))
        .unwrap_or(1);
    Ok(ResonanceCheck {
        m,
        residual: residual(m),
        t_f: PI / jz.abs(),
    })
}

/// Coupling J12 satisfying the criterion exactly for a given m.
pub fn resonant_coupling(m: u32, jz: f64) -> f64 {
    ((m * m) as f64 - 0.25).sqrt() * jz
}

/// Open-gate target |↓⟩|↓↓⟩(a|↑⟩ − b|↓⟩) reached from |L⟩ = a|↑⟩ + b|↓⟩.
pub fn open_transfer_phase_check(a: C64, b: C64) -> Result<QuantumState> {
    let norm = a.norm_sqr() + b.norm_sqr();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState(format!("|a|² + |b|² = {norm} != 1")));
    }
    let mut v = DVector::from_element(DIM, C64::new(0.0, 0.0));
    v[parse_label("↓↓↓↑")?] = a;
    v[parse_label("↓↓↓↓")?] = -b;
    Ok(QuantumState::Pure(v))
}

//! First-order Magnus (average-Hamiltonian) treatment of the detuned,
//! rotating-frame transistor.

use std::f64::consts::PI;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::basis::SpinSector;
use crate::dynamics::{propagator, unitary, SolverOptions};
use crate::error::{Error, Result};
use crate::hamiltonian::{circuit_hamiltonian, rotating_frame_parts, DiamondCouplings};
use crate::operator::{DenseOperator, C64};

#[derive(Debug, Clone)]
pub struct FloquetResult {
    pub h_f: DenseOperator,
    pub kappa: f64,
    /// 2J_z + J_x.
    pub j_tilde: f64,
    /// π|Δ|/(4J₂²) (s).
    pub t_f: f64,
    /// (J_x + 2J_z)Δ/(8J₂²); transfer is clean when this is an integer.
    pub g: f64,
}

impl FloquetResult {
    /// G rounded half away from zero.
    pub fn g_nearest(&self) -> i64 {
        self.g.round() as i64
    }

    /// |G − round(G)|/|G|, the predicted infidelity scale.
    pub fn g_infidelity_scale(&self) -> f64 {
        (self.g - self.g.round()).abs() / self.g.abs()
    }

    pub fn summary(&self) -> FloquetSummary {
        FloquetSummary {
            kappa: self.kappa,
            j_tilde: self.j_tilde,
            t_f: self.t_f,
            g: self.g,
            g_nearest: self.g_nearest(),
            g_infidelity_scale: self.g_infidelity_scale(),
        }
    }
}

/// Scalar part of [`FloquetResult`], for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloquetSummary {
    pub kappa: f64,
    pub j_tilde: f64,
    pub t_f: f64,
    pub g: f64,
    pub g_nearest: i64,
    pub g_infidelity_scale: f64,
}

/// κ = √(64J₂⁴/Δ² + 16J₂²J̃(J̃ + Δ)/Δ² + J̃²).
pub fn kappa(j2: f64, j_tilde: f64, delta: f64) -> f64 {
    let d2 = delta * delta;
    (64.0 * j2.powi(4) / d2 + 16.0 * j2 * j2 * j_tilde * (j_tilde + delta) / d2 + j_tilde * j_tilde).sqrt()
}

/// H_F = H₀ + ([H₁,H₁†] − [H₁,H₀] + [H₁†,H₀])/Δ, with commutators taken
/// numerically. Any J₄ in `c` stays in H₀.
pub fn magnus_floquet(c: &DiamondCouplings) -> Result<FloquetResult> {
    c.validate()?;
    if c.delta == 0.0 {
        return Err(Error::Degenerate(
            "zero detuning has no Magnus expansion; use the resonant criterion".into(),
        ));
    }
    if c.j_2 == 0.0 {
        return Err(Error::Degenerate("J2 = 0 decouples the outer spins; no transfer time".into()));
    }
    let (h0, h1) = rotating_frame_parts(c);
    let h1d = h1.dagger();
    let correction = h1.commutator(&h1d) - h1.commutator(&h0) + h1d.commutator(&h0);
    let h_f = h0 + (1.0 / c.delta) * correction;
    let j_tilde = 2.0 * c.j_z + c.j_x;
    Ok(FloquetResult {
        h_f,
        kappa: kappa(c.j_2, j_tilde, c.delta),
        j_tilde,
        t_f: PI * c.delta.abs() / (4.0 * c.j_2 * c.j_2),
        g: j_tilde * c.delta / (8.0 * c.j_2 * c.j_2),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloquetEigensystem {
    /// Numeric eigenvalues of H_F on the one-up sector, matched to the
    /// labels E₁..E₄ of `closed_form`.
    pub energies: [f64; 4],
    /// J_x − J_z, J_z, −(J_x + κ)/2, −(J_x − κ)/2.
    pub closed_form: [f64; 4],
    /// Eigenvectors in the ordered one-up basis, one per label.
    pub states: Vec<Vec<C64>>,
    pub max_mismatch: f64,
}

/// Distance of a phase from π modulo 2π.
pub fn phase_from_pi(phase: f64) -> f64 {
    let x = (phase - PI).rem_euclid(2.0 * PI);
    x.min(2.0 * PI - x)
}

impl FloquetEigensystem {
    /// Residuals of the paired transfer conditions (E₂−E₃)t ≡ π and
    /// (E₂−E₄)t ≡ π (mod 2π), from the numeric energies.
    pub fn transfer_phase_residuals(&self, t: f64) -> [f64; 2] {
        let e = &self.energies;
        [phase_from_pi((e[1] - e[2]) * t), phase_from_pi((e[1] - e[3]) * t)]
    }
}

/// Diagonalises H_F on the one-up sector. The closed-form energies hold
/// without cross-talk.
pub fn floquet_eigensystem_b1(c: &DiamondCouplings) -> Result<FloquetEigensystem> {
    let f = magnus_floquet(c)?;
    let sector = SpinSector::new(-1)?;
    let block = f.h_f.restrict(sector.basis()).hermitian_part();
    let eig = SymmetricEigen::new(block.0);
    let closed_form = [
        c.j_x - c.j_z,
        c.j_z,
        -(c.j_x + f.kappa) / 2.0,
        -(c.j_x - f.kappa) / 2.0,
    ];
    let mut used = [false; 4];
    let mut energies = [0.0; 4];
    let mut states = Vec::with_capacity(4);
    let mut max_mismatch: f64 = 0.0;
    for (label, target) in closed_form.iter().enumerate() {
        let k = (0..4)
            .filter(|k| !used[*k])
            .min_by(|a, b| {
                (eig.eigenvalues[*a] - target)
                    .abs()
                    .total_cmp(&(eig.eigenvalues[*b] - target).abs())
            })
            .expect("four eigenvalues");
        used[k] = true;
        energies[label] = eig.eigenvalues[k];
        states.push(eig.eigenvectors.column(k).iter().copied().collect());
        max_mismatch = max_mismatch.max((eig.eigenvalues[k] - target).abs());
    }
    Ok(FloquetEigensystem {
        energies,
        closed_form,
        states,
        max_mismatch,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StroboscopicError {
    pub periods: u64,
    /// n·2π/|Δ| (s).
    pub time: f64,
    /// ‖U(nT, 0) − exp(−iH_F nT)‖₂.
    pub error: f64,
}

/// Compares the exact one-period propagator, raised to the number of
/// periods closest to t_f, with the Magnus prediction.
pub fn stroboscopic_error(c: &DiamondCouplings, opts: &SolverOptions) -> Result<StroboscopicError> {
    let f = magnus_floquet(c)?;
    let period = 2.0 * PI / c.delta.abs();
    let periods = (f.t_f / period).round().max(1.0) as u64;
    let one = propagator(&circuit_hamiltonian(c), 0.0, period, opts)?;
    let mut u = DenseOperator::identity(one.dim());
    let mut base = one;
    let mut n = periods;
    while n > 0 {
        if n & 1 == 1 {
            u = &u * &base;
        }
        base = &base * &base;
        n >>= 1;
    }
    let time = periods as f64 * period;
    let predicted = unitary(&f.h_f, time);
    Ok(StroboscopicError {
        periods,
        time,
        error: (&u - &predicted).spectral_norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units;

    #[test]
    fn reference_transfer_time() {
        let f = magnus_floquet(&DiamondCouplings::reference()).unwrap();
        assert!((units::to_us(f.t_f) - 0.84).abs() < 0.005, "{}", f.t_f);
        assert!(f.h_f.is_hermitian(1e-12));
    }

    #[test]
    fn errors_for_degenerate_parameters() {
        let mut c = DiamondCouplings::reference();
        c.delta = 0.0;
        assert!(matches!(magnus_floquet(&c), Err(Error::Degenerate(_))));
        let mut c = DiamondCouplings::reference();
        c.j_2 = 0.0;
        assert!(magnus_floquet(&c).is_err());
    }

    #[test]
    fn kappa_without_gate_shift() {
        let (j2, delta) = (0.3, -5.0);
        assert!((kappa(j2, 0.0, delta) - 8.0 * j2 * j2 / delta.abs()).abs() < 1e-15);
    }

    #[test]
    fn phase_distance() {
        assert!(phase_from_pi(PI).abs() < 1e-15);
        assert!(phase_from_pi(-PI).abs() < 1e-15);
        assert!((phase_from_pi(0.0) - PI).abs() < 1e-15);
        assert!(phase_from_pi(3.0 * PI + 1e-3) - 1e-3 < 1e-12);
    }
}

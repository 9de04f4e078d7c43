//! Unitary and dephasing dynamics on the register or an invariant subspace.

mod integrator;
mod trace;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use integrator::{integrate, SolverOptions, SolverStats};
pub use trace::{FidelityTrace, Peak, TraceMetadata};

use crate::basis::{spins_of, Subspace};
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::operator::{DenseOperator, C64, DIM, I, ZERO};
use crate::state::QuantumState;
use crate::units;

pub use crate::state::fidelity;

/// Uniform grid of `n_points` times from `t0` to `t1` inclusive (seconds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    #[serde(with = "units::time_us")]
    pub t0: f64,
    #[serde(with = "units::time_us")]
    pub t1: f64,
    pub n_points: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, n_points: usize) -> Result<Self> {
        let g = TimeGrid { t0, t1, n_points };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {}", self.n_points)));
        }
        if !(self.t0.is_finite() && self.t1.is_finite() && self.t1 > self.t0) {
            return Err(Error::InvalidGrid(format!("need t0 < t1, got {} and {}", self.t0, self.t1)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.t1 - self.t0) / (self.n_points - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let dt = self.spacing();
        let mut v: Vec<f64> = (0..self.n_points).map(|i| self.t0 + i as f64 * dt).collect();
        v[self.n_points - 1] = self.t1;
        v
    }
}

/// Pure dephasing σz on every qubit, with the gate qubits dephasing twice
/// as fast as the outer ones.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseConfig {
    #[serde(with = "units::angular_mhz")]
    pub gamma: f64,
}

impl NoiseConfig {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("dephasing rate must be >= 0, got {gamma}")));
        }
        Ok(NoiseConfig { gamma })
    }

    /// Rate used for the reference device, γ/2π = 0.0016 MHz.
    pub fn reference() -> Self {
        NoiseConfig {
            gamma: units::from_2pi_mhz(0.0016),
        }
    }

    /// Per-qubit rates γ₁..γ₄.
    pub fn rates(&self) -> [f64; 4] {
        let g = self.gamma;
        [g, 2.0 * g, 2.0 * g, g]
    }

    /// Elementwise decay rates of ρ between the given basis states: since
    /// σz² = 1, γ(σz ρ σz − ρ) multiplies ρₘₙ by −2γ whenever the qubit
    /// differs between m and n.
    pub fn decay_matrix(&self, indices: &[usize]) -> DMatrix<f64> {
        let rates = self.rates();
        let n = indices.len();
        DMatrix::from_fn(n, n, |a, b| {
            let (sa, sb) = (spins_of(indices[a]), spins_of(indices[b]));
            -2.0 * (0..4).filter(|&q| sa[q] != sb[q]).map(|q| rates[q]).sum::<f64>()
        })
    }
}

fn step_cap(h: &dyn Hamiltonian, opts: &SolverOptions) -> f64 {
    opts.max_step.unwrap_or_else(|| {
        let f = h.max_frequency();
        if f > 0.0 {
            2.0 * PI / (20.0 * f)
        } else {
            f64::INFINITY
        }
    })
}

/// Solves i dY/dt = H(t) Y for a block of column states.
pub fn evolve_columns<O>(
    h: &dyn Hamiltonian,
    y0: DMatrix<C64>,
    times: &[f64],
    opts: &SolverOptions,
    observe: O,
) -> Result<SolverStats>
where
    O: FnMut(usize, f64, &DMatrix<C64>),
{
    if y0.nrows() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: y0.nrows(),
        });
    }
    let mut hbuf = DMatrix::zeros(h.dim(), h.dim());
    integrate(
        |t, y, dy| {
            h.write_at(t, &mut hbuf);
            dy.gemm(-I, &hbuf, y, ZERO);
        },
        y0,
        times,
        opts,
        step_cap(h, opts),
        observe,
    )
}

fn check_pure(psi0: &QuantumState, dim: usize) -> Result<DMatrix<C64>> {
    let QuantumState::Pure(v) = psi0 else {
        return Err(Error::InvalidState("expected a pure state".into()));
    };
    if v.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: v.len(),
        });
    }
    if (v.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState(format!("state norm {} != 1", v.norm())));
    }
    Ok(DMatrix::from_column_slice(dim, 1, v.as_slice()))
}

/// Schrödinger evolution of a pure state, sampled on the grid.
pub fn propagate(
    h: &dyn Hamiltonian,
    psi0: &QuantumState,
    grid: &TimeGrid,
    opts: &SolverOptions,
) -> Result<Vec<QuantumState>> {
    grid.validate()?;
    let y0 = check_pure(psi0, h.dim())?;
    let mut out = Vec::with_capacity(grid.n_points);
    evolve_columns(h, y0, &grid.points(), opts, |_, _, y| {
        out.push(QuantumState::Pure(y.column(0).into_owned()));
    })?;
    Ok(out)
}

/// Time-ordered propagator U(t1, t0).
pub fn propagator(h: &dyn Hamiltonian, t0: f64, t1: f64, opts: &SolverOptions) -> Result<DenseOperator> {
    let mut u = DMatrix::identity(h.dim(), h.dim());
    evolve_columns(h, u.clone(), &[t0, t1], opts, |i, _, y| {
        if i == 1 {
            u.copy_from(y);
        }
    })?;
    Ok(DenseOperator(u))
}

/// exp(−iHt) for a time-independent H.
pub fn unitary(h: &DenseOperator, t: f64) -> DenseOperator {
    DenseOperator((&h.0 * C64::new(0.0, -t)).exp())
}

/// ρ̇ = −i[H, ρ] + Σᵢ γᵢ(σzⁱ ρ σzⁱ − ρ) for operators supported on
/// `subspace`. The operator need not be a density matrix, which lets callers
/// evolve coherences |a⟩⟨b| and combine them linearly.
pub fn evolve_lindblad_in<O>(
    h: &dyn Hamiltonian,
    subspace: &Subspace,
    rho0: DMatrix<C64>,
    noise: &NoiseConfig,
    times: &[f64],
    opts: &SolverOptions,
    observe: O,
) -> Result<SolverStats>
where
    O: FnMut(usize, f64, &DMatrix<C64>),
{
    let n = subspace.dim();
    if h.dim() != n || rho0.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if h.dim() != n { h.dim() } else { rho0.nrows() },
        });
    }
    let decay = noise.decay_matrix(subspace.indices());
    let mut hbuf = DMatrix::zeros(n, n);
    integrate(
        |t, rho, drho| {
            h.write_at(t, &mut hbuf);
            drho.gemm(-I, &hbuf, rho, ZERO);
            drho.gemm(I, rho, &hbuf, C64::new(1.0, 0.0));
            for ((d, r), g) in drho.iter_mut().zip(rho.iter()).zip(decay.iter()) {
                *d += r * *g;
            }
        },
        rho0,
        times,
        opts,
        step_cap(h, opts),
        observe,
    )
}

/// Dephasing master-equation evolution of a register density matrix.
pub fn evolve_lindblad(
    h: &dyn Hamiltonian,
    rho0: &QuantumState,
    noise: &NoiseConfig,
    grid: &TimeGrid,
    opts: &SolverOptions,
) -> Result<Vec<QuantumState>> {
    grid.validate()?;
    let QuantumState::Density(r) = rho0 else {
        return Err(Error::InvalidState("expected a density matrix".into()));
    };
    QuantumState::density(r.clone())?;
    let subspace = if h.dim() == DIM {
        Subspace::full()
    } else {
        return Err(Error::DimensionMismatch {
            expected: DIM,
            found: h.dim(),
        });
    };
    let mut out = Vec::with_capacity(grid.n_points);
    evolve_lindblad_in(h, &subspace, r.clone(), noise, &grid.points(), opts, |_, _, y| {
        out.push(QuantumState::Density(y.clone()));
    })?;
    Ok(out)
}

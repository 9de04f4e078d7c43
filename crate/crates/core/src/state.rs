//! Pure and mixed states of the register (or of a subspace of it).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::operator::{C64, ONE, ZERO};

const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(DVector<C64>),
    Density(DMatrix<C64>),
}

impl QuantumState {
    /// Normalised pure state; rejects zero vectors.
    pub fn pure(v: DVector<C64>) -> Result<Self> {
        let n = v.norm();
        if n < 1e-300 || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalise a zero vector".into()));
        }
        Ok(QuantumState::Pure(v.unscale(n)))
    }

    /// Density matrix; must be Hermitian with unit trace.
    pub fn density(rho: DMatrix<C64>) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::DimensionMismatch {
                expected: rho.nrows(),
                found: rho.ncols(),
            });
        }
        let herm = (&rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > NORM_TOL {
            return Err(Error::InvalidState(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = rho.trace();
        if (tr - ONE).norm() > NORM_TOL {
            return Err(Error::InvalidState(format!("density matrix trace {tr} != 1")));
        }
        Ok(QuantumState::Density(rho))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::from_element(dim, ZERO);
        v[index] = ONE;
        QuantumState::Pure(v)
    }

    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Pure(v) => v.len(),
            QuantumState::Density(r) => r.nrows(),
        }
    }

    pub fn to_density(&self) -> DMatrix<C64> {
        match self {
            QuantumState::Pure(v) => v * v.adjoint(),
            QuantumState::Density(r) => r.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&DVector<C64>> {
        match self {
            QuantumState::Pure(v) => Some(v),
            QuantumState::Density(_) => None,
        }
    }

    /// Tensor product, `self` as the left factor.
    pub fn tensor(&self, other: &QuantumState) -> QuantumState {
        match (self, other) {
            (QuantumState::Pure(a), QuantumState::Pure(b)) => QuantumState::Pure(a.kronecker(b)),
            _ => QuantumState::Density(self.to_density().kronecker(&other.to_density())),
        }
    }

    /// Components on the given basis indices, in order.
    pub fn restrict(&self, indices: &[usize]) -> QuantumState {
        match self {
            QuantumState::Pure(v) => {
                QuantumState::Pure(DVector::from_iterator(indices.len(), indices.iter().map(|&i| v[i])))
            }
            QuantumState::Density(r) => {
                let n = indices.len();
                QuantumState::Density(DMatrix::from_fn(n, n, |i, j| r[(indices[i], indices[j])]))
            }
        }
    }

    /// Inverse of [`restrict`](Self::restrict): zero outside the subspace.
    pub fn embed(&self, indices: &[usize], dim: usize) -> QuantumState {
        match self {
            QuantumState::Pure(v) => {
                let mut out = DVector::from_element(dim, ZERO);
                for (k, &i) in indices.iter().enumerate() {
                    out[i] = v[k];
                }
                QuantumState::Pure(out)
            }
            QuantumState::Density(r) => {
                let mut out = DMatrix::from_element(dim, dim, ZERO);
                for (a, &i) in indices.iter().enumerate() {
                    for (b, &j) in indices.iter().enumerate() {
                        out[(i, j)] = r[(a, b)];
                    }
                }
                QuantumState::Density(out)
            }
        }
    }

    /// Norm for pure states, trace for density matrices.
    pub fn weight(&self) -> f64 {
        match self {
            QuantumState::Pure(v) => v.norm(),
            QuantumState::Density(r) => r.trace().re,
        }
    }
}

pub fn qubit_state(up: C64, down: C64) -> Result<QuantumState> {
    QuantumState::pure(DVector::from_vec(vec![up, down]))
}

pub fn up() -> QuantumState {
    QuantumState::basis(2, 0)
}

pub fn down() -> QuantumState {
    QuantumState::basis(2, 1)
}

/// (|↑⟩ + r e^{iθ}|↓⟩)/√(1+r²).
pub fn left_state(r: f64, theta: f64) -> QuantumState {
    let s = 1.0 / (1.0 + r * r).sqrt();
    QuantumState::Pure(DVector::from_vec(vec![C64::from(s), C64::from_polar(r * s, theta)]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateSetting {
    /// |↓↓⟩.
    Open,
    /// cos θ|↑↓⟩ + sin θ|↓↑⟩.
    Closed(f64),
}

impl GateSetting {
    pub fn closed() -> Self {
        GateSetting::Closed(std::f64::consts::FRAC_PI_4)
    }
}

/// Two-qubit state of the gate pair (qubits 2 and 3).
pub fn gate_state(which: GateSetting) -> QuantumState {
    let amps = match which {
        GateSetting::Open => [ZERO, ZERO, ZERO, ONE],
        GateSetting::Closed(theta) => [ZERO, C64::from(theta.cos()), C64::from(theta.sin()), ZERO],
    };
    QuantumState::Pure(DVector::from_row_slice(&amps))
}

/// |left⟩ ⊗ |gate⟩ ⊗ |right⟩ on the full register.
pub fn register_state(left: &QuantumState, gate: &QuantumState, right: &QuantumState) -> QuantumState {
    left.tensor(gate).tensor(right)
}

/// Overlap fidelity ⟨f|ρ|f⟩ of `state` with `target`; |⟨f|ψ⟩|² for pure
/// pairs and Tr(σρ) when both are mixed.
pub fn fidelity(state: &QuantumState, target: &QuantumState) -> Result<f64> {
    if target.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            found: state.dim(),
        });
    }
    Ok(match (target, state) {
        (QuantumState::Pure(a), QuantumState::Pure(b)) => a.dotc(b).norm_sqr(),
        (QuantumState::Pure(a), QuantumState::Density(r)) => (a.adjoint() * r * a)[(0, 0)].re,
        (QuantumState::Density(s), QuantumState::Pure(b)) => (b.adjoint() * s * b)[(0, 0)].re,
        (QuantumState::Density(s), QuantumState::Density(r)) => (s * r).trace().re,
    })
}

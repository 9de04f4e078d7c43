//! Dense operators on the four-qubit register and single-qubit Pauli factors.
//!
//! Basis index `b` in `0..16` encodes the register with qubit 1 as the most
//! significant bit; a zero bit is spin up, so σz|↑⟩ = +|↑⟩. Qubit 1 is the
//! leftmost Kronecker factor.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const N_QUBITS: usize = 4;
pub const DIM: usize = 1 << N_QUBITS;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// One of the four qubits of the diamond, 1-based as in the usual labelling:
/// 1 is the left spin, 2 and 3 form the gate, 4 is the right spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Qubit(u8);

impl Qubit {
    pub const LEFT: Qubit = Qubit(1);
    pub const GATE_A: Qubit = Qubit(2);
    pub const GATE_B: Qubit = Qubit(3);
    pub const RIGHT: Qubit = Qubit(4);

    pub fn new(label: u8) -> Result<Self> {
        if (1..=4).contains(&label) {
            Ok(Qubit(label))
        } else {
            Err(Error::InvalidQubit(label))
        }
    }

    pub fn label(self) -> u8 {
        self.0
    }

    /// Bit position of this qubit inside a basis index.
    pub fn bit(self) -> usize {
        N_QUBITS - self.0 as usize
    }

    pub fn all() -> [Qubit; 4] {
        [Qubit(1), Qubit(2), Qubit(3), Qubit(4)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
    /// σ+ = (σx + iσy)/2, raising |↓⟩ to |↑⟩.
    Plus,
    /// σ− = (σx − iσy)/2.
    Minus,
}

impl Pauli {
    /// 2×2 matrix in the (|↑⟩, |↓⟩) basis.
    pub fn matrix(self) -> DMatrix<C64> {
        let m = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -I, I, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
            Pauli::Plus => [ZERO, ONE, ZERO, ZERO],
            Pauli::Minus => [ZERO, ZERO, ONE, ZERO],
        };
        DMatrix::from_row_slice(2, 2, &m)
    }
}

/// A dense complex operator. Dimension is 16 for the full register, smaller
/// after restriction to a subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator(pub DMatrix<C64>);

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        DenseOperator(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        DenseOperator(DMatrix::identity(dim, dim))
    }

    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        Ok(DenseOperator(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn dagger(&self) -> Self {
        DenseOperator(self.0.adjoint())
    }

    /// Hermitian part (A + A†)/2.
    pub fn hermitian_part(&self) -> Self {
        DenseOperator((&self.0 + self.0.adjoint()).scale(0.5))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        DenseOperator(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// Largest entry of |A − A†|.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = &self.0 - self.0.adjoint();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol * self.max_abs().max(1.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Block selected by the given basis indices, in the order given.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let n = indices.len();
        DenseOperator(DMatrix::from_fn(n, n, |i, j| self.0[(indices[i], indices[j])]))
    }

    pub fn scale(&self, s: C64) -> Self {
        DenseOperator(self.0.map(|z| z * s))
    }

    /// Operator 2-norm (largest singular value).
    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(&self.0)
    }
}

pub(crate) fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

impl Add for DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: Self) -> Self {
        DenseOperator(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a DenseOperator> for &'a DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: Self) -> DenseOperator {
        DenseOperator(&self.0 + &rhs.0)
    }
}

impl AddAssign<&DenseOperator> for DenseOperator {
    fn add_assign(&mut self, rhs: &DenseOperator) {
        self.0 += &rhs.0;
    }
}

impl Sub for DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: Self) -> Self {
        DenseOperator(self.0 - rhs.0)
    }
}

impl<'a> Sub<&'a DenseOperator> for &'a DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: Self) -> DenseOperator {
        DenseOperator(&self.0 - &rhs.0)
    }
}

impl Neg for DenseOperator {
    type Output = DenseOperator;
    fn neg(self) -> Self {
        DenseOperator(-self.0)
    }
}

impl<'a> Mul<&'a DenseOperator> for &'a DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: Self) -> DenseOperator {
        DenseOperator(&self.0 * &rhs.0)
    }
}

impl Mul for DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: Self) -> Self {
        DenseOperator(self.0 * rhs.0)
    }
}

impl Mul<DenseOperator> for f64 {
    type Output = DenseOperator;
    fn mul(self, rhs: DenseOperator) -> DenseOperator {
        DenseOperator(rhs.0 * C64::from(self))
    }
}

impl Mul<DenseOperator> for C64 {
    type Output = DenseOperator;
    fn mul(self, rhs: DenseOperator) -> DenseOperator {
        DenseOperator(rhs.0 * self)
    }
}

fn kron_all(factors: &[DMatrix<C64>]) -> DMatrix<C64> {
    factors[1..]
        .iter()
        .fold(factors[0].clone(), |acc, f| acc.kronecker(f))
}

/// Single-qubit Pauli embedded in the 16-dimensional register.
pub fn pauli(qubit: Qubit, kind: Pauli) -> DenseOperator {
    pauli_string(&[(qubit, kind)])
}

/// Tensor product of single-qubit factors; unlisted qubits get the identity.
/// Repeating a qubit multiplies its factors left to right.
pub fn pauli_string(factors: &[(Qubit, Pauli)]) -> DenseOperator {
    let mut slots: Vec<DMatrix<C64>> = (0..N_QUBITS).map(|_| Pauli::I.matrix()).collect();
    for &(q, p) in factors {
        let slot = &mut slots[q.label() as usize - 1];
        *slot = &*slot * p.matrix();
    }
    DenseOperator(kron_all(&slots))
}

/// σ−ᵃ σ+ᵇ + σ+ᵃ σ−ᵇ, the flip-flop exchange between two qubits.
pub fn flip_flop(a: Qubit, b: Qubit) -> DenseOperator {
    pauli_string(&[(a, Pauli::Minus), (b, Pauli::Plus)])
        + pauli_string(&[(a, Pauli::Plus), (b, Pauli::Minus)])
}

/// Total spin projection Σσz.
pub fn total_sz() -> DenseOperator {
    Qubit::all()
        .iter()
        .map(|&q| pauli(q, Pauli::Z))
        .fold(DenseOperator::zeros(DIM), |acc, z| acc + z)
}

//! Computational basis labels, fixed-magnetisation sectors and subspaces.

use crate::error::{Error, Result};
use crate::operator::{DIM, N_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn sz(self) -> i32 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }
}

/// Basis index of a product of four spins, qubit 1 first.
pub fn basis_index(spins: [Spin; 4]) -> usize {
    spins.iter().fold(0, |acc, s| (acc << 1) | usize::from(*s == Spin::Down))
}

pub fn spins_of(index: usize) -> [Spin; 4] {
    let mut out = [Spin::Up; 4];
    for (k, slot) in out.iter_mut().enumerate() {
        if index >> (N_QUBITS - 1 - k) & 1 == 1 {
            *slot = Spin::Down;
        }
    }
    out
}

/// Parses labels like `"↑↓↓↓"` or `"uddd"`.
pub fn parse_label(label: &str) -> Result<usize> {
    let spins: Vec<Spin> = label
        .chars()
        .filter(|c| !matches!(c, ' ' | '|' | '⟩' | '>'))
        .map(|c| match c {
            '↑' | 'u' | 'U' | '0' => Ok(Spin::Up),
            '↓' | 'd' | 'D' | '1' => Ok(Spin::Down),
            other => Err(Error::InvalidState(format!("bad spin symbol `{other}` in `{label}`"))),
        })
        .collect::<Result<_>>()?;
    let spins: [Spin; 4] = spins
        .try_into()
        .map_err(|_| Error::InvalidState(format!("`{label}` does not name four spins")))?;
    Ok(basis_index(spins))
}

pub fn label_of(index: usize) -> String {
    spins_of(index)
        .iter()
        .map(|s| if *s == Spin::Up { '↑' } else { '↓' })
        .collect()
}

/// Twice the total spin projection, i.e. the Σσz eigenvalue of a basis state.
pub fn sigma_z_total(index: usize) -> i32 {
    spins_of(index).iter().map(|s| s.sz()).sum()
}

/// Basis states sharing a Σσz eigenvalue of 2k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinSector {
    projection: i32,
    basis: Vec<usize>,
}

impl SpinSector {
    /// Sector with total projection `k` in `-2..=2`; dimensions are 1, 4, 6, 4, 1.
    pub fn new(k: i32) -> Result<Self> {
        if !(-2..=2).contains(&k) {
            return Err(Error::InvalidSector(k));
        }
        let basis = (0..DIM).filter(|&b| sigma_z_total(b) == 2 * k).collect();
        Ok(SpinSector { projection: k, basis })
    }

    pub fn projection(&self) -> i32 {
        self.projection
    }

    /// Basis indices in increasing order.
    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// An ordered set of computational basis states spanning an invariant
/// subspace, used to evolve in fewer dimensions than the full register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    indices: Vec<usize>,
}

impl Subspace {
    pub fn full() -> Self {
        Subspace {
            indices: (0..DIM).collect(),
        }
    }

    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() || indices.iter().any(|&i| i >= DIM) {
            return Err(Error::InvalidState(format!("bad subspace indices {indices:?}")));
        }
        Ok(Subspace { indices })
    }

    pub fn from_sectors(ks: &[i32]) -> Result<Self> {
        let mut all = Vec::new();
        for &k in ks {
            all.extend_from_slice(SpinSector::new(k)?.basis());
        }
        Subspace::new(all)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Position of a full-register basis index inside this subspace.
    pub fn position(&self, index: usize) -> Option<usize> {
        self.indices.binary_search(&index).ok()
    }

    pub fn is_full(&self) -> bool {
        self.indices.len() == DIM
    }
}

//! Spin-model Hamiltonians of the diamond transistor.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{flip_flop, pauli, pauli_string, DenseOperator, Pauli, Qubit, C64, DIM, I};
use crate::units;

/// A possibly time-dependent Hamiltonian, evaluated into a caller buffer so
/// integrators do not allocate per stage.
pub trait Hamiltonian: Send + Sync {
    fn dim(&self) -> usize;

    fn write_at(&self, t: f64, out: &mut DMatrix<C64>);

    /// Fastest angular frequency of the explicit time dependence, used to
    /// cap integrator steps. Zero for static operators.
    fn max_frequency(&self) -> f64;

    fn at(&self, t: f64) -> DenseOperator {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        self.write_at(t, &mut m);
        DenseOperator(m)
    }
}

impl Hamiltonian for DenseOperator {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn write_at(&self, _t: f64, out: &mut DMatrix<C64>) {
        out.copy_from(&self.0);
    }

    fn max_frequency(&self) -> f64 {
        0.0
    }
}

/// Adapter for an arbitrary `t -> H(t)` closure.
pub struct TimeDependent<F> {
    dim: usize,
    max_frequency: f64,
    f: F,
}

impl<F: Fn(f64) -> DenseOperator + Send + Sync> TimeDependent<F> {
    pub fn new(dim: usize, max_frequency: f64, f: F) -> Self {
        TimeDependent { dim, max_frequency, f }
    }
}

impl<F: Fn(f64) -> DenseOperator + Send + Sync> Hamiltonian for TimeDependent<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn write_at(&self, t: f64, out: &mut DMatrix<C64>) {
        out.copy_from(&(self.f)(t).0);
    }

    fn max_frequency(&self) -> f64 {
        self.max_frequency
    }
}

#[derive(Debug, Clone)]
struct Harmonic {
    frequency: f64,
    op: DMatrix<C64>,
    op_dag: DMatrix<C64>,
}

/// H(t) = S + Σₖ (Aₖ e^{iωₖt} + Aₖ† e^{−iωₖt}) with S Hermitian, so H(t) is
/// Hermitian at every t.
#[derive(Debug, Clone)]
pub struct HarmonicHamiltonian {
    static_part: DMatrix<C64>,
    terms: Vec<Harmonic>,
}

impl HarmonicHamiltonian {
    pub fn new(static_part: DenseOperator) -> Self {
        HarmonicHamiltonian {
            static_part: static_part.0,
            terms: Vec::new(),
        }
    }

    pub fn with_term(mut self, frequency: f64, op: DenseOperator) -> Self {
        assert_eq!(op.dim(), self.static_part.nrows(), "harmonic term dimension");
        self.terms.push(Harmonic {
            frequency,
            op_dag: op.0.adjoint(),
            op: op.0,
        });
        self
    }

    /// Sum of two harmonic Hamiltonians of equal dimension.
    pub fn plus(mut self, other: &HarmonicHamiltonian) -> Self {
        self.static_part += &other.static_part;
        self.terms.extend(other.terms.iter().cloned());
        self
    }

    pub fn static_part(&self) -> DenseOperator {
        DenseOperator(self.static_part.clone())
    }

    /// (frequency, operator) pairs of the oscillating terms.
    pub fn harmonics(&self) -> impl Iterator<Item = (f64, DenseOperator)> + '_ {
        self.terms.iter().map(|h| (h.frequency, DenseOperator(h.op.clone())))
    }

    /// Same Hamiltonian on the span of the given basis states. Only
    /// meaningful when that span is invariant under every term.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let n = indices.len();
        let pick = |m: &DMatrix<C64>| DMatrix::from_fn(n, n, |i, j| m[(indices[i], indices[j])]);
        HarmonicHamiltonian {
            static_part: pick(&self.static_part),
            terms: self
                .terms
                .iter()
                .map(|h| Harmonic {
                    frequency: h.frequency,
                    op: pick(&h.op),
                    op_dag: pick(&h.op_dag),
                })
                .collect(),
        }
    }

    /// Largest matrix entry coupling the given basis states to the rest,
    /// over every term. Zero means the span is invariant.
    pub fn leakage_out_of(&self, indices: &[usize]) -> f64 {
        let inside = |i: usize| indices.contains(&i);
        let mut worst: f64 = 0.0;
        let mats = std::iter::once(&self.static_part).chain(self.terms.iter().flat_map(|h| [&h.op, &h.op_dag]));
        for m in mats {
            for &j in indices {
                for i in 0..m.nrows() {
                    if !inside(i) {
                        worst = worst.max(m[(i, j)].norm());
                    }
                }
            }
        }
        worst
    }
}

impl Hamiltonian for HarmonicHamiltonian {
    fn dim(&self) -> usize {
        self.static_part.nrows()
    }

    fn write_at(&self, t: f64, out: &mut DMatrix<C64>) {
        out.copy_from(&self.static_part);
        for h in &self.terms {
            let phase = C64::from_polar(1.0, h.frequency * t);
            out.zip_zip_apply(&h.op, &h.op_dag, |o, a, ad| *o += a * phase + ad * phase.conj());
        }
    }

    fn max_frequency(&self) -> f64 {
        self.terms.iter().map(|h| h.frequency.abs()).fold(0.0, f64::max)
    }
}

/// Couplings of the most general real diamond: a ZZ term on the gate pair
/// and flip-flop terms between every pair of qubits. All in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GeneralCouplings {
    pub j23_z: f64,
    pub j12: f64,
    pub j13: f64,
    pub j14: f64,
    pub j23_x: f64,
    pub j24: f64,
    pub j34: f64,
}

impl GeneralCouplings {
    /// The symmetric reduced model J12 = J24 = −J13 = −J34, no J14 or gate flip-flop.
    pub fn reduced(j12: f64, j23_z: f64) -> Self {
        GeneralCouplings {
            j23_z,
            j12,
            j13: -j12,
            j14: 0.0,
            j23_x: 0.0,
            j24: j12,
            j34: -j12,
        }
    }

    /// Flip-flop coupling between qubits `a` and `b` (order irrelevant).
    pub fn x(&self, a: Qubit, b: Qubit) -> f64 {
        match (a.label().min(b.label()), a.label().max(b.label())) {
            (1, 2) => self.j12,
            (1, 3) => self.j13,
            (1, 4) => self.j14,
            (2, 3) => self.j23_x,
            (2, 4) => self.j24,
            (3, 4) => self.j34,
            _ => 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.j23_z, self.j12, self.j13, self.j14, self.j23_x, self.j24, self.j34]
            .iter()
            .all(|v| v.is_finite())
    }

    pub fn scale(&self) -> f64 {
        [self.j23_z, self.j12, self.j13, self.j14, self.j23_x, self.j24, self.j34]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Spin-model parameters of the transistor in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiamondCouplings {
    #[serde(with = "units::angular_mhz")]
    pub j_z: f64,
    #[serde(with = "units::angular_mhz")]
    pub j_x: f64,
    #[serde(with = "units::angular_mhz")]
    pub j_2: f64,
    #[serde(with = "units::angular_mhz", default)]
    pub j_4: f64,
    #[serde(with = "units::angular_ghz")]
    pub omega: f64,
    #[serde(with = "units::angular_ghz")]
    pub delta: f64,
}

impl DiamondCouplings {
    /// Builds from values in the customary display units: Ω and Δ in
    /// 2π·GHz, J_z in 2π·MHz and the remaining couplings as ratios to J_z.
    pub fn from_display(
        omega_ghz: f64,
        delta_ghz: f64,
        jz_mhz: f64,
        jx_over_jz: f64,
        j2_over_jz: f64,
        j4_over_jz: f64,
    ) -> Self {
        let j_z = units::from_2pi_mhz(jz_mhz);
        DiamondCouplings {
            j_z,
            j_x: jx_over_jz * j_z,
            j_2: j2_over_jz * j_z,
            j_4: j4_over_jz * j_z,
            omega: units::from_2pi_ghz(omega_ghz),
            delta: units::from_2pi_ghz(delta_ghz),
        }
    }

    /// Reference device parameters derived from the circuit of the design
    /// study.
    pub fn reference() -> Self {
        DiamondCouplings::from_display(-13.67, 1.067, -41.99, 0.8690, 0.3003, -9.898e-4)
    }

    pub fn without_crosstalk(mut self) -> Self {
        self.j_4 = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.j_z, self.j_x, self.j_2, self.j_4, self.omega, self.delta];
        if vals.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("non-finite coupling in {self:?}")))
        }
    }

    /// Static-frame couplings seen when Δ = 0.
    pub fn as_general(&self) -> GeneralCouplings {
        GeneralCouplings {
            j23_z: self.j_z,
            j12: self.j_2,
            j13: -self.j_2,
            j14: self.j_4,
            j23_x: self.j_x,
            j24: self.j_2,
            j34: -self.j_2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    #[serde(with = "units::angular_mhz")]
    pub amplitude: f64,
    #[serde(with = "units::angular_ghz")]
    pub omega_d: f64,
}

impl DriveParams {
    pub fn new(amplitude: f64, omega_d: f64) -> Result<Self> {
        if !(amplitude >= 0.0 && amplitude.is_finite() && omega_d.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "drive amplitude must be finite and non-negative, got {amplitude}"
            )));
        }
        Ok(DriveParams { amplitude, omega_d })
    }

    /// Drive at |Ω − 3J_z|, the open/closed splitting when J_x = −J_z.
    pub fn resonant(amplitude: f64, c: &DiamondCouplings) -> Result<Self> {
        DriveParams::new(amplitude, (c.omega - 3.0 * c.j_z).abs())
    }

    /// Drive at |Ω + J_x − 2J_z|, the open/closed splitting for any J_x.
    pub fn resonant_exact(amplitude: f64, c: &DiamondCouplings) -> Result<Self> {
        DriveParams::new(amplitude, (c.omega + c.j_x - 2.0 * c.j_z).abs())
    }

    /// Amplitude giving a full open→closed flip in time `t_pi` on resonance.
    /// The gate-pair matrix element is √2·A/2 per rotating component.
    pub fn pi_amplitude(t_pi: f64) -> f64 {
        std::f64::consts::PI / (std::f64::consts::SQRT_2 * t_pi)
    }
}

fn q(n: u8) -> Qubit {
    Qubit::new(n).expect("static qubit label")
}

/// J₂₃ᶻ σz²σz³ + Σᵢ<ⱼ Jᵢⱼ (σ−ⁱσ+ʲ + σ+ⁱσ−ʲ).
pub fn build_general_diamond(c: &GeneralCouplings) -> DenseOperator {
    let mut h = c.j23_z * pauli_string(&[(q(2), Pauli::Z), (q(3), Pauli::Z)]);
    for a in 1..=4u8 {
        for b in a + 1..=4 {
            let j = c.x(q(a), q(b));
            if j != 0.0 {
                h += &(j * flip_flop(q(a), q(b)));
            }
        }
    }
    h
}

/// Static part and Δ-harmonic of the rotating-frame Hamiltonian,
/// H(t) = H₀ + H₁e^{iΔt} + H₁†e^{−iΔt}. H₀ includes the J₄ cross-talk.
pub fn rotating_frame_parts(c: &DiamondCouplings) -> (DenseOperator, DenseOperator) {
    let zz = pauli_string(&[(q(2), Pauli::Z), (q(3), Pauli::Z)]);
    let mut h0 = c.j_z * zz + c.j_x * flip_flop(q(2), q(3));
    if c.j_4 != 0.0 {
        h0 += &(c.j_4 * flip_flop(q(1), q(4)));
    }
    let outer = pauli(q(1), Pauli::Plus) + pauli(q(4), Pauli::Plus);
    let gate = pauli(q(2), Pauli::Minus) - pauli(q(3), Pauli::Minus);
    let h1 = c.j_2 * (&outer * &gate);
    (h0, h1)
}

/// Rotating-frame Hamiltonian as a harmonic series; includes J₄ if nonzero.
pub fn circuit_hamiltonian(c: &DiamondCouplings) -> HarmonicHamiltonian {
    let (h0, h1) = rotating_frame_parts(c);
    HarmonicHamiltonian::new(h0).with_term(c.delta, h1)
}

/// Rotating-frame model without cross-talk.
pub fn rotating_frame_hamiltonian(c: &DiamondCouplings) -> HarmonicHamiltonian {
    circuit_hamiltonian(&c.without_crosstalk())
}

pub fn build_rotating_frame(c: &DiamondCouplings, t: f64) -> DenseOperator {
    rotating_frame_hamiltonian(c).at(t)
}

pub fn build_circuit_model(c: &DiamondCouplings, t: f64) -> DenseOperator {
    circuit_hamiltonian(c).at(t)
}

/// Gate drive iA cos(ω_d t)[S₊e^{iΩt} − S₋e^{−iΩt}] with S± = σ±² + σ±³,
/// written as the two co- and counter-rotating harmonics at Ω ± ω_d.
pub fn drive_hamiltonian(d: &DriveParams, omega: f64) -> HarmonicHamiltonian {
    let raise = pauli(q(2), Pauli::Plus) + pauli(q(3), Pauli::Plus);
    let half = (I * (d.amplitude / 2.0)) * raise;
    HarmonicHamiltonian::new(DenseOperator::zeros(DIM))
        .with_term(omega + d.omega_d, half.clone())
        .with_term(omega - d.omega_d, half)
}

pub fn build_drive(d: &DriveParams, omega: f64, t: f64) -> DenseOperator {
    drive_hamiltonian(d, omega).at(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{parse_label, Subspace};
    use crate::operator::total_sz;
    use nalgebra::DVector;

    fn elem(h: &DenseOperator, bra: &str, ket: &str) -> C64 {
        h.0[(parse_label(bra).unwrap(), parse_label(ket).unwrap())]
    }

    #[test]
    fn zero_couplings_give_zero() {
        assert_eq!(build_general_diamond(&GeneralCouplings::default()).max_abs(), 0.0);
        let d = DriveParams::new(0.0, 1.0).unwrap();
        assert_eq!(build_drive(&d, 3.0, 0.4).max_abs(), 0.0);
    }

    #[test]
    fn zz_element() {
        let c = GeneralCouplings {
            j23_z: 1.0,
            ..Default::default()
        };
        let h = build_general_diamond(&c);
        assert_eq!(elem(&h, "↓↑↓↓", "↓↑↓↓"), C64::from(-1.0));
    }

    #[test]
    fn reduced_block_matches_hand_assembly() {
        let (j, jz) = (0.7, -1.3);
        let h = build_general_diamond(&GeneralCouplings::reduced(j, jz));
        let b = h.restrict(&[7, 11, 13, 14]);
        #[rustfmt::skip]
        let hand = DMatrix::from_row_slice(4, 4, &[
            jz, j, -j, 0.0,
            j, -jz, 0.0, j,
            -j, 0.0, -jz, -j,
            0.0, j, -j, jz,
        ]).map(C64::from);
        assert!((b.0 - hand).norm() < 1e-15);
    }

    #[test]
    fn static_frame_limit() {
        let mut c = DiamondCouplings::reference().without_crosstalk();
        c.delta = 0.0;
        let g = GeneralCouplings {
            j14: 0.0,
            ..c.as_general()
        };
        let diff = build_rotating_frame(&c, 1.234e-7) - build_general_diamond(&g);
        assert!(diff.max_abs() < 1e-6 * c.j_z.abs());
    }

    #[test]
    fn periodic_in_delta() {
        let c = DiamondCouplings::reference();
        let t = 3.3e-8;
        let period = 2.0 * std::f64::consts::PI / c.delta;
        let d = build_rotating_frame(&c, t) - build_rotating_frame(&c, t + period);
        assert!(d.max_abs() < 1e-9 * c.j_z.abs());
    }

    #[test]
    fn crosstalk_element() {
        let c = DiamondCouplings::reference();
        let h = build_circuit_model(&c, 0.0);
        assert_eq!(elem(&h, "↑↓↓↓", "↓↓↓↑"), C64::from(c.j_4));
        let h0 = build_circuit_model(&c.without_crosstalk(), 0.2e-6);
        assert_eq!(h0, build_rotating_frame(&c, 0.2e-6));
    }

    #[test]
    fn drive_spares_singlet() {
        let c = DiamondCouplings::reference();
        let d = DriveParams::resonant(1e7, &c).unwrap();
        let h = build_drive(&d, c.omega, 1.7e-9);
        assert!(h.is_hermitian(1e-12));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // gate singlet and triplet, with spins 1 and 4 down
        let gate = |a: f64, b: f64| {
            let mut v = DVector::from_element(16, C64::from(0.0));
            v[parse_label("↓↑↓↓").unwrap()] = C64::from(a);
            v[parse_label("↓↓↑↓").unwrap()] = C64::from(b);
            v
        };
        let singlet = gate(s, -s);
        let triplet = gate(s, s);
        let mut up_up = DVector::from_element(16, C64::from(0.0));
        up_up[parse_label("↓↑↑↓").unwrap()] = C64::from(1.0);
        let mut open = DVector::from_element(16, C64::from(0.0));
        open[parse_label("↓↓↓↓").unwrap()] = C64::from(1.0);
        for t0 in [&triplet, &up_up, &open] {
            assert!(singlet.dotc(&(&h.0 * t0)).norm() < 1e-9 * d.amplitude);
        }
        assert!(triplet.dotc(&(&h.0 * &open)).norm() > 0.1 * d.amplitude);
    }

    #[test]
    fn harmonic_restriction_matches_full() {
        let hh = circuit_hamiltonian(&DiamondCouplings::reference());
        let sub = Subspace::from_sectors(&[-1, -2]).unwrap();
        assert_eq!(hh.leakage_out_of(sub.indices()), 0.0);
        let t = 4.2e-8;
        assert_eq!(hh.restrict(sub.indices()).at(t), hh.at(t).restrict(sub.indices()));
        assert!(hh.at(t).commutator(&total_sz()).max_abs() < 1e-6);
    }
}

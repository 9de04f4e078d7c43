//! From superconducting-circuit element values to spin-model parameters.
//!
//! Energies are angular frequencies (E/ħ) like everything else in the crate.
//! Inverse-capacitance entries are indexed 1..=7 over the coordinates
//! (φ₁, φ₂, φ₃, φ₄, φ_LR, φ_RR, φ_CM).

mod netlist;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::DiamondCouplings;
use crate::units::{self, inductive_energy, pair_charge_energy};

pub use netlist::{assumed_netlist, coordinate_transform, inverse_capacitance_from_netlist, Capacitor, Netlist, Node};

/// Transmon-regime threshold for E_J/E_C below which a warning is raised.
pub const TRANSMON_RATIO_WARNING: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    #[serde(rename = "L", with = "units::inductance_nh")]
    pub l: f64,
    #[serde(rename = "L_prime", with = "units::inductance_nh")]
    pub l_prime: f64,
    #[serde(rename = "L_R", with = "units::inductance_nh")]
    pub l_r: f64,
    #[serde(rename = "E_J", with = "units::angular_ghz")]
    pub e_j: f64,
    #[serde(rename = "E_J_prime", with = "units::angular_ghz")]
    pub e_j_prime: f64,
    #[serde(rename = "E_q", with = "units::angular_ghz")]
    pub e_q: f64,
    #[serde(rename = "E_R", with = "units::angular_ghz")]
    pub e_r: f64,
    #[serde(rename = "C", with = "units::capacitance_ff")]
    pub c: f64,
    #[serde(rename = "C_J", with = "units::capacitance_ff")]
    pub c_j: f64,
    #[serde(rename = "C_prime", with = "units::capacitance_ff")]
    pub c_prime: f64,
    #[serde(rename = "C_c", with = "units::capacitance_ff")]
    pub c_c: f64,
    #[serde(rename = "C_R", with = "units::capacitance_ff")]
    pub c_r: f64,
}

impl CircuitParams {
    /// Element values of the reference design.
    pub fn reference() -> Self {
        CircuitParams {
            l: units::from_nh(20.0),
            l_prime: units::from_nh(2.0),
            l_r: units::from_nh(20.0),
            e_j: units::from_2pi_ghz(38.0),
            e_j_prime: units::from_2pi_ghz(38.0),
            e_q: units::from_2pi_ghz(15.0),
            e_r: units::from_2pi_ghz(41.0),
            c: units::from_ff(91.0),
            c_j: units::from_ff(20.0),
            c_prime: units::from_ff(47.0),
            c_c: units::from_ff(17.0),
            c_r: units::from_ff(2000.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            ("L", self.l),
            ("L_prime", self.l_prime),
            ("L_R", self.l_r),
            ("E_J", self.e_j),
            ("E_J_prime", self.e_j_prime),
            ("E_q", self.e_q),
            ("E_R", self.e_r),
            ("C", self.c),
            ("C_J", self.c_j),
            ("C_prime", self.c_prime),
            ("C_c", self.c_c),
            ("C_R", self.c_r),
        ];
        match all.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            Some((name, v)) => Err(Error::InvalidParameter(format!("{name} must be positive, got {v}"))),
            None => Ok(()),
        }
    }
}

/// Symmetric set of inverse-capacitance entries (1/F), 1-based indices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InverseCapacitance {
    entries: BTreeMap<(usize, usize), f64>,
}

impl InverseCapacitance {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(i: usize, j: usize) -> (usize, usize) {
        (i.min(j), i.max(j))
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if !(1..=7).contains(&i) || !(1..=7).contains(&j) {
            return Err(Error::InvalidParameter(format!("inverse capacitance index ({i},{j}) outside 1..=7")));
        }
        self.entries.insert(Self::key(i, j), value);
        Ok(())
    }

    pub fn with(mut self, i: usize, j: usize, value: f64) -> Result<Self> {
        self.set(i, j, value)?;
        Ok(self)
    }

    pub fn get(&self, i: usize, j: usize) -> Result<f64> {
        self.entries
            .get(&Self::key(i, j))
            .copied()
            .ok_or(Error::MissingInverseCapacitance(i.min(j), i.max(j)))
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KMatrixSpec {
    /// Entries supplied directly; only the ones the formulas need are required.
    ExplicitInverseEntries(InverseCapacitance),
    /// Assemble K from the assumed circuit topology and invert it.
    Netlist,
}

impl KMatrixSpec {
    pub fn resolve(&self, p: &CircuitParams) -> Result<InverseCapacitance> {
        match self {
            KMatrixSpec::ExplicitInverseEntries(k) => Ok(k.clone()),
            KMatrixSpec::Netlist => inverse_capacitance_from_netlist(&assumed_netlist(p)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveEnergies {
    #[serde(with = "units::angular_ghz")]
    pub e_c1: f64,
    #[serde(with = "units::angular_ghz")]
    pub e_c2: f64,
    #[serde(with = "units::angular_ghz")]
    pub e_ccm: f64,
    #[serde(with = "units::angular_ghz")]
    pub e_j1: f64,
    #[serde(with = "units::angular_ghz")]
    pub e_j2: f64,
    #[serde(with = "units::angular_ghz")]
    pub e_jcm: f64,
    #[serde(with = "units::angular_ghz")]
    pub e_l2: f64,
    #[serde(with = "units::angular_ghz")]
    pub e_lcm: f64,
    pub warnings: Vec<String>,
}

impl EffectiveEnergies {
    /// E_L2 + E_J2/2, the effective gate-mode stiffness.
    pub fn gate_stiffness(&self) -> f64 {
        self.e_l2 + 0.5 * self.e_j2
    }

    fn cm_stiffness(&self) -> f64 {
        self.e_lcm + 0.5 * self.e_jcm
    }

    fn refresh_warnings(&mut self) {
        self.warnings.clear();
        for (name, ej, ec) in [("left/right", self.e_j1, self.e_c1), ("gate", self.e_j2, self.e_c2)] {
            let r = ej / ec;
            if r < TRANSMON_RATIO_WARNING {
                self.warnings
                    .push(format!("{name} qubits: E_J/E_C = {r:.2} is below {TRANSMON_RATIO_WARNING}"));
            }
        }
    }
}

pub fn charging_energy(inverse_capacitance: f64) -> f64 {
    pair_charge_energy(inverse_capacitance) / 8.0
}

/// Inverse capacitance giving a charging energy E_C = (2e)²K⁻¹/8.
pub fn inverse_capacitance_for_charging(e_c: f64) -> f64 {
    8.0 * e_c / pair_charge_energy(1.0)
}

pub fn effective_energies(p: &CircuitParams, k: &KMatrixSpec) -> Result<EffectiveEnergies> {
    p.validate()?;
    let kinv = k.resolve(p)?;
    let mut e = EffectiveEnergies {
        e_c1: charging_energy(kinv.get(1, 1)?),
        e_c2: charging_energy(kinv.get(2, 2)?),
        e_ccm: charging_energy(kinv.get(7, 7)?),
        e_j1: p.e_r,
        e_j2: (p.e_j_prime + p.e_j + 17.0 * p.e_q) / 16.0,
        e_jcm: p.e_q / 8.0,
        e_l2: (inductive_energy(p.l) + inductive_energy(p.l_prime)) / 8.0
            + 3.0 / 32.0 * (p.e_j_prime + p.e_j + p.e_q),
        e_lcm: 3.0 * p.e_q / 16.0,
        warnings: Vec::new(),
    };
    e.refresh_warnings();
    Ok(e)
}

fn cm_term(e: &EffectiveEnergies) -> f64 {
    (e.e_c2 * e.e_ccm / (e.gate_stiffness() * e.cm_stiffness())).sqrt()
}

/// Gate-qubit frequency Ω.
pub fn gate_frequency(e: &EffectiveEnergies, p: &CircuitParams) -> f64 {
    let s = e.gate_stiffness();
    -(16.0 * e.e_c2 * s).sqrt()
        + e.e_j2 * e.e_c2 / (2.0 * s)
        + e.e_c2 * (p.e_j_prime + p.e_j + 8.0 * p.e_q) / (16.0 * s)
        + 5.0 * p.e_q / 32.0 * cm_term(e)
}

pub fn spin_parameters(e: &EffectiveEnergies, p: &CircuitParams, k: &KMatrixSpec) -> Result<DiamondCouplings> {
    let kinv = k.resolve(p)?;
    let (k13, k23, k14) = (kinv.get(1, 3)?, kinv.get(2, 3)?, kinv.get(1, 4)?);
    let s = e.gate_stiffness();
    let root = (e.e_c2 / s).sqrt();

    let j_2 = -0.25 * (e.e_j1 * s / (2.0 * e.e_c1 * e.e_c2)).powf(0.25) * pair_charge_energy(k13);
    let j_z = -e.e_c2 * (p.e_j_prime + p.e_j + 8.0 * p.e_q) / (64.0 * s);
    let j_x = root * (inductive_energy(p.l_prime) - inductive_energy(p.l)) / 4.0
        + root * ((p.e_j_prime - p.e_j) / 4.0 - p.e_q)
        + 0.25 / root * pair_charge_energy(k23)
        - e.e_c2 * (p.e_j_prime - p.e_j - 10.0 * p.e_q) / (32.0 * s)
        + p.e_q / 8.0 * cm_term(e);
    let j_4 = 0.25 * (e.e_j1 / (2.0 * e.e_c1)).sqrt() * pair_charge_energy(k14);
    let omega = gate_frequency(e, p);
    let delta = -(8.0 * e.e_c1 * e.e_j1).sqrt() + e.e_c1 - omega;
    Ok(DiamondCouplings {
        j_z,
        j_x,
        j_2,
        j_4,
        omega,
        delta,
    })
}

/// Spin-model targets of the reference design, in display units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTargets {
    pub ej1_over_ec1: f64,
    pub ej2_over_ec2: f64,
    pub el2_over_ej2: f64,
    pub omega_2pi_ghz: f64,
    pub delta_2pi_ghz: f64,
    pub jz_2pi_mhz: f64,
    pub jx_over_jz: f64,
    pub j2_over_jz: f64,
    pub j4_over_jz: f64,
}

impl ReferenceTargets {
    pub fn reference() -> Self {
        ReferenceTargets {
            ej1_over_ec1: 78.01,
            ej2_over_ec2: 50.10,
            el2_over_ej2: 0.9556,
            omega_2pi_ghz: -13.67,
            delta_2pi_ghz: 1.067,
            jz_2pi_mhz: -41.99,
            jx_over_jz: 0.8690,
            j2_over_jz: 0.3003,
            j4_over_jz: -9.898e-4,
        }
    }
}

/// E_CCM that makes the Ω formula return `omega`. Ω depends on E_CCM only
/// through a term ∝ √E_CCM, so this is closed form.
pub fn solve_e_ccm(e: &EffectiveEnergies, p: &CircuitParams, omega: f64) -> Result<f64> {
    let mut without = e.clone();
    without.e_ccm = 0.0;
    let base = gate_frequency(&without, p);
    let coef = 5.0 * p.e_q / 32.0 * (e.e_c2 / (e.gate_stiffness() * e.cm_stiffness())).sqrt();
    let root = (omega - base) / coef;
    if !(root >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "no E_CCM >= 0 gives Ω = {:.4} 2pi*GHz (E_CCM-free part is {:.4})",
            units::to_2pi_ghz(omega),
            units::to_2pi_ghz(base)
        )));
    }
    Ok(root * root)
}

/// Explicit inverse-capacitance entries that reproduce the target spin
/// parameters: diagonal entries from the E_J/E_C ratios, (7,7) from Ω and
/// the off-diagonal entries from J_x, J₂ and J₄.
pub fn calibrate_inverse_capacitance(p: &CircuitParams, t: &ReferenceTargets) -> Result<InverseCapacitance> {
    p.validate()?;
    let e_c1 = p.e_r / t.ej1_over_ec1;
    let e_j2 = (p.e_j_prime + p.e_j + 17.0 * p.e_q) / 16.0;
    let e_c2 = e_j2 / t.ej2_over_ec2;
    let mut kinv = InverseCapacitance::new()
        .with(1, 1, inverse_capacitance_for_charging(e_c1))?
        .with(2, 2, inverse_capacitance_for_charging(e_c2))?
        // placeholder so the energies can be evaluated before E_CCM is known
        .with(7, 7, 0.0)?
        .with(1, 3, 0.0)?
        .with(2, 3, 0.0)?
        .with(1, 4, 0.0)?;
    let mut e = effective_energies(p, &KMatrixSpec::ExplicitInverseEntries(kinv.clone()))?;
    e.e_ccm = solve_e_ccm(&e, p, units::from_2pi_ghz(t.omega_2pi_ghz))?;
    kinv.set(7, 7, inverse_capacitance_for_charging(e.e_ccm))?;

    // every coupling is affine in its own entry
    let zero = spin_parameters(&e, p, &KMatrixSpec::ExplicitInverseEntries(kinv.clone()))?;
    let unit = 1e12;
    let probe = |i: usize, j: usize| -> Result<DiamondCouplings> {
        let k = kinv.clone().with(i, j, unit)?;
        spin_parameters(&e, p, &KMatrixSpec::ExplicitInverseEntries(k))
    };
    let jz = units::from_2pi_mhz(t.jz_2pi_mhz);
    let d23 = probe(2, 3)?.j_x - zero.j_x;
    let d13 = probe(1, 3)?.j_2 - zero.j_2;
    let d14 = probe(1, 4)?.j_4 - zero.j_4;
    kinv.set(2, 3, unit * (t.jx_over_jz * jz - zero.j_x) / d23)?;
    kinv.set(1, 3, unit * (t.j2_over_jz * jz - zero.j_2) / d13)?;
    kinv.set(1, 4, unit * (t.j4_over_jz * jz - zero.j_4) / d14)?;
    Ok(kinv)
}

/// Full mapping: energies and spin parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitMap {
    pub energies: EffectiveEnergies,
    pub couplings: DiamondCouplings,
    pub ratios: MapRatios,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapRatios {
    pub ej1_over_ec1: f64,
    pub ej2_over_ec2: f64,
    pub el2_over_ej2: f64,
    pub jx_over_jz: f64,
    pub j2_over_jz: f64,
    pub j4_over_jz: f64,
}

pub fn map_circuit(p: &CircuitParams, k: &KMatrixSpec) -> Result<CircuitMap> {
    let energies = effective_energies(p, k)?;
    let c = spin_parameters(&energies, p, k)?;
    let ratios = MapRatios {
        ej1_over_ec1: energies.e_j1 / energies.e_c1,
        ej2_over_ec2: energies.e_j2 / energies.e_c2,
        el2_over_ej2: energies.e_l2 / energies.e_j2,
        jx_over_jz: c.j_x / c.j_z,
        j2_over_jz: c.j_2 / c.j_z,
        j4_over_jz: c.j_4 / c.j_z,
    };
    Ok(CircuitMap {
        energies,
        couplings: c,
        ratios,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkRow {
    pub c_r_multiplier: f64,
    pub j4_over_j2: f64,
    pub j4_over_jz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkScan {
    pub rows: Vec<CrosstalkRow>,
    /// |J₄/J₂| strictly decreasing in C_R.
    pub strictly_decreasing: bool,
    /// Smallest multiplier with |J₄/J_z| below 1%, if any.
    pub first_below_one_percent: Option<f64>,
}

/// Rescales C_R by each factor, reassembles the netlist and records the
/// cross-talk ratios.
pub fn crosstalk_scaling_scan(base: &CircuitParams, factors: &[f64]) -> Result<CrosstalkScan> {
    let mut factors = factors.to_vec();
    factors.sort_by(f64::total_cmp);
    let rows = factors
        .iter()
        .map(|&f| {
            if !(f > 0.0) {
                return Err(Error::InvalidParameter(format!("C_R multiplier must be positive, got {f}")));
            }
            let p = CircuitParams {
                c_r: base.c_r * f,
                ..*base
            };
            let m = map_circuit(&p, &KMatrixSpec::Netlist)?;
            Ok(CrosstalkRow {
                c_r_multiplier: f,
                j4_over_j2: (m.couplings.j_4 / m.couplings.j_2).abs(),
                j4_over_jz: (m.couplings.j_4 / m.couplings.j_z).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let strictly_decreasing = rows.windows(2).all(|w| w[1].j4_over_j2 < w[0].j4_over_j2);
    let first_below_one_percent = rows.iter().find(|r| r.j4_over_jz < 0.01).map(|r| r.c_r_multiplier);
    Ok(CrosstalkScan {
        rows,
        strictly_decreasing,
        first_below_one_percent,
    })
}

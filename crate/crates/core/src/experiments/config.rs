//! JSON run descriptions for the four experiment kinds, and the threshold
//! checks they may carry.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize};

use crate::circuit::{calibrate_inverse_capacitance, CircuitMap, CircuitParams, CrosstalkScan, InverseCapacitance, KMatrixSpec, ReferenceTargets};
use crate::dynamics::{SolverOptions, TimeGrid};
use crate::error::{Error, Result};
use crate::hamiltonian::{DiamondCouplings, DriveParams};
use crate::units::{self, parse_quantity, Dimension};

use super::scenario::{deserialize_couplings, Gate, Scenario, ScenarioResult, Tolerances};
use super::state_prep::StatePrepResult;
use super::sweep::{SweepSpec, SweepTable};

/// Conservation drift allowed on any run.
pub const DRIFT_TOLERANCE: f64 = 1e-8;

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub label: String,
    pub value: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn at_least(label: String, value: f64, bound: f64) -> Self {
        CheckOutcome {
            label: format!("{label} >= {bound}"),
            value,
            passed: value >= bound,
        }
    }

    fn at_most(label: String, value: f64, bound: f64) -> Self {
        CheckOutcome {
            label: format!("{label} <= {bound}"),
            value,
            passed: value <= bound,
        }
    }
}

fn quantity<'de, D: Deserializer<'de>>(d: D, dim: Dimension) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Number(f64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Number(x) => Ok(x),
        Raw::Text(s) => parse_quantity(&s, dim).map_err(serde::de::Error::custom),
    }
}

fn opt_time<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
    quantity(d, Dimension::Time).map(Some)
}

fn opt_angular<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
    quantity(d, Dimension::AngularFrequency).map(Some)
}

fn inverse_capacitance<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    quantity(d, Dimension::InverseCapacitance)
}

// ---- scenario ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "metric", rename_all = "snake_case")]
pub enum ScenarioCheck {
    /// Worst-case fidelity over [t0, t] stays at or above the bound.
    MinFidelityUntil {
        scenario: String,
        #[serde(with = "units::time_us")]
        t: f64,
        at_least: f64,
    },
    /// Worst-case fidelity at the grid point nearest t.
    FidelityAt {
        scenario: String,
        #[serde(with = "units::time_us")]
        t: f64,
        at_least: f64,
    },
    PeakFidelity { scenario: String, at_least: f64 },
    PeakTime {
        scenario: String,
        #[serde(with = "units::time_us")]
        from: f64,
        #[serde(with = "units::time_us")]
        to: f64,
    },
    /// Best minus worst per-state peak fidelity.
    PeakSpread { scenario: String, at_most: f64 },
}

impl ScenarioCheck {
    fn scenario(&self) -> &str {
        match self {
            ScenarioCheck::MinFidelityUntil { scenario, .. }
            | ScenarioCheck::FidelityAt { scenario, .. }
            | ScenarioCheck::PeakFidelity { scenario, .. }
            | ScenarioCheck::PeakTime { scenario, .. }
            | ScenarioCheck::PeakSpread { scenario, .. } => scenario,
        }
    }

    pub fn evaluate(&self, results: &[ScenarioResult]) -> Result<CheckOutcome> {
        let name = self.scenario();
        let r = results
            .iter()
            .find(|r| r.scenario.name == name)
            .ok_or_else(|| Error::Config(format!("check refers to unknown scenario `{name}`")))?;
        let worst = &r.band.min;
        let peak = || worst.peak().ok_or_else(|| Error::InvalidState(format!("{name}: empty trace")));
        Ok(match *self {
            ScenarioCheck::MinFidelityUntil { t, at_least, .. } => CheckOutcome::at_least(
                format!("{name}: min F over t <= {:.3} us", units::to_us(t)),
                worst.min_until(t),
                at_least,
            ),
            ScenarioCheck::FidelityAt { t, at_least, .. } => {
                let v = worst
                    .at(t)
                    .ok_or_else(|| Error::Config(format!("{name}: t = {t} s is outside the grid")))?;
                CheckOutcome::at_least(format!("{name}: min F at t = {:.3} us", units::to_us(t)), v, at_least)
            }
            ScenarioCheck::PeakFidelity { at_least, .. } => {
                CheckOutcome::at_least(format!("{name}: worst-case peak F"), peak()?.value, at_least)
            }
            ScenarioCheck::PeakTime { from, to, .. } => {
                let p = peak()?;
                CheckOutcome {
                    label: format!("{name}: peak time in [{:.3}, {:.3}] us", units::to_us(from), units::to_us(to)),
                    value: units::to_us(p.time),
                    passed: (from..=to).contains(&p.time),
                }
            }
            ScenarioCheck::PeakSpread { at_most, .. } => {
                CheckOutcome::at_most(format!("{name}: peak spread over initial states"), r.peak_spread(), at_most)
            }
        })
    }
}

pub fn drift_check(r: &ScenarioResult) -> CheckOutcome {
    CheckOutcome::at_most(format!("{}: conservation drift", r.scenario.name), r.drift.worst(), DRIFT_TOLERANCE)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenarios: Vec<Scenario>,
    #[serde(default)]
    pub checks: Vec<ScenarioCheck>,
    /// Title of the combined band plot.
    #[serde(default)]
    pub title: Option<String>,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scenarios.is_empty() {
            return Err(Error::Config("no scenarios".into()));
        }
        let mut names: Vec<&str> = self.scenarios.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Config(format!("duplicate scenario name `{}`", w[0])));
        }
        for s in &self.scenarios {
            s.validate().map_err(|e| e.in_scenario(&s.name))?;
        }
        Ok(())
    }
}

// ---- sweep ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "metric", rename_all = "snake_case")]
pub enum SweepCheck {
    MinPeakFidelity { at_least: f64 },
    /// Log-log slope of peak time against the swept value.
    Exponent { expected: f64, tolerance: f64 },
    /// |J₄/J₂| strictly decreasing along a C_R scan.
    CrosstalkDecreasing,
}

impl SweepCheck {
    pub fn evaluate(&self, table: Option<&SweepTable>, scan: Option<&CrosstalkScan>) -> Result<CheckOutcome> {
        let need_table = || table.ok_or_else(|| Error::Config("check needs a dynamics sweep".into()));
        Ok(match *self {
            SweepCheck::MinPeakFidelity { at_least } => {
                CheckOutcome::at_least("min peak fidelity over sweep".into(), need_table()?.min_peak_fidelity(), at_least)
            }
            SweepCheck::Exponent { expected, tolerance } => {
                let k = need_table()?.peak_time_exponent()?;
                CheckOutcome {
                    label: format!("peak-time exponent = {expected} +/- {tolerance}"),
                    value: k,
                    passed: (k - expected).abs() <= tolerance,
                }
            }
            SweepCheck::CrosstalkDecreasing => {
                let s = scan.ok_or_else(|| Error::Config("crosstalk_decreasing needs a c_r_multiplier sweep".into()))?;
                CheckOutcome {
                    label: "|J4/J2| strictly decreasing in C_R".into(),
                    value: f64::from(u8::from(s.strictly_decreasing)),
                    passed: s.strictly_decreasing,
                }
            }
        })
    }
}

fn default_sweep_name() -> String {
    "sweep".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(default = "default_sweep_name")]
    pub name: String,
    /// Scenario held fixed apart from the swept parameter.
    #[serde(default)]
    pub base: Option<Scenario>,
    /// Circuit for `c_r_multiplier` sweeps.
    #[serde(default)]
    pub circuit: Option<CircuitSource>,
    pub sweep: SweepSpec,
    #[serde(default)]
    pub checks: Vec<SweepCheck>,
}

// ---- state preparation ----

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveTuning {
    /// |Ω − 3J_z|.
    Resonant,
    /// |Ω + J_x − 2J_z|.
    ResonantExact,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DriveSpec {
    #[serde(default, deserialize_with = "opt_angular", skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    /// Nominal π time; sets A = π/(√2 t_π) when no amplitude is given.
    #[serde(default, deserialize_with = "opt_time", skip_serializing_if = "Option::is_none")]
    pub t_pi: Option<f64>,
    #[serde(default, deserialize_with = "opt_angular", skip_serializing_if = "Option::is_none")]
    pub omega_d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuning: Option<DriveTuning>,
}

impl DriveSpec {
    pub fn resolve(&self, c: &DiamondCouplings) -> Result<DriveParams> {
        let amplitude = match (self.amplitude, self.t_pi) {
            (Some(a), None) => a,
            (None, Some(t)) if t > 0.0 => DriveParams::pi_amplitude(t),
            (None, None) => DriveParams::pi_amplitude(units::from_us(0.05)),
            _ => return Err(Error::Config("give either drive.amplitude or a positive drive.t_pi".into())),
        };
        match (self.omega_d, self.tuning) {
            (Some(_), Some(_)) => Err(Error::Config("give either drive.omega_d or drive.tuning".into())),
            (Some(w), None) => DriveParams::new(amplitude, w),
            (None, Some(DriveTuning::ResonantExact)) => DriveParams::resonant_exact(amplitude, c),
            (None, _) => DriveParams::resonant(amplitude, c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "metric", rename_all = "snake_case")]
pub enum StatePrepCheck {
    /// Target population at the first maximum.
    MinPopulation { at_least: f64 },
    MaxUpUp { at_most: f64 },
}

impl StatePrepCheck {
    pub fn evaluate(&self, r: &StatePrepResult) -> CheckOutcome {
        match *self {
            StatePrepCheck::MinPopulation { at_least } => {
                CheckOutcome::at_least(format!("{} population at t_pi", r.target().label()), r.t_pi.value, at_least)
            }
            StatePrepCheck::MaxUpUp { at_most } => CheckOutcome::at_most("max up-up population".into(), r.max_up_up, at_most),
        }
    }
}

fn default_state_prep_name() -> String {
    "state_prep".into()
}

fn default_start() -> Gate {
    Gate::Open
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePrepConfig {
    #[serde(default = "default_state_prep_name")]
    pub name: String,
    #[serde(default = "DiamondCouplings::reference", deserialize_with = "deserialize_couplings")]
    pub params: DiamondCouplings,
    #[serde(default = "default_start")]
    pub start: Gate,
    #[serde(default)]
    pub drive: DriveSpec,
    #[serde(default)]
    pub grid: Option<TimeGrid>,
    #[serde(default)]
    pub solver: Tolerances,
    #[serde(default)]
    pub checks: Vec<StatePrepCheck>,
}

impl StatePrepConfig {
    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions::default().with_tolerances(self.solver.rtol, self.solver.atol)
    }
}

// ---- circuit map ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CircuitSource {
    Preset(String),
    Explicit(CircuitParams),
}

impl Default for CircuitSource {
    fn default() -> Self {
        CircuitSource::Preset("reference".into())
    }
}

impl CircuitSource {
    pub fn resolve(&self) -> Result<CircuitParams> {
        let p = match self {
            CircuitSource::Preset(name) if name == "reference" => CircuitParams::reference(),
            CircuitSource::Preset(name) => return Err(Error::Config(format!("unknown circuit preset `{name}`"))),
            CircuitSource::Explicit(p) => *p,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseEntry {
    pub i: usize,
    pub j: usize,
    #[serde(deserialize_with = "inverse_capacitance")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum KMatrixConfig {
    ExplicitInverseEntries { entries: Vec<InverseEntry> },
    Netlist,
    /// Entries fitted to the given spin-model targets.
    Calibrated {
        #[serde(default = "ReferenceTargets::reference")]
        targets: ReferenceTargets,
    },
}

impl Default for KMatrixConfig {
    fn default() -> Self {
        KMatrixConfig::Calibrated {
            targets: ReferenceTargets::reference(),
        }
    }
}

impl KMatrixConfig {
    pub fn resolve(&self, p: &CircuitParams) -> Result<KMatrixSpec> {
        Ok(match self {
            KMatrixConfig::ExplicitInverseEntries { entries } => {
                let mut k = InverseCapacitance::new();
                for e in entries {
                    k.set(e.i, e.j, e.value)?;
                }
                KMatrixSpec::ExplicitInverseEntries(k)
            }
            KMatrixConfig::Netlist => KMatrixSpec::Netlist,
            KMatrixConfig::Calibrated { targets } => KMatrixSpec::ExplicitInverseEntries(calibrate_inverse_capacitance(p, targets)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "metric", rename_all = "snake_case")]
pub enum CircuitCheck {
    /// Both E_J/E_C ratios at or above the bound.
    TransmonRegime { at_least: f64 },
    MaxCrosstalk { at_most: f64 },
    CrosstalkDecreasing,
}

impl CircuitCheck {
    pub fn evaluate(&self, map: &CircuitMap, scan: Option<&CrosstalkScan>) -> Result<CheckOutcome> {
        Ok(match *self {
            CircuitCheck::TransmonRegime { at_least } => CheckOutcome::at_least(
                "min E_J/E_C".into(),
                map.ratios.ej1_over_ec1.min(map.ratios.ej2_over_ec2),
                at_least,
            ),
            CircuitCheck::MaxCrosstalk { at_most } => CheckOutcome::at_most("|J4/Jz|".into(), map.ratios.j4_over_jz.abs(), at_most),
            CircuitCheck::CrosstalkDecreasing => SweepCheck::CrosstalkDecreasing.evaluate(None, scan)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitMapConfig {
    #[serde(default)]
    pub circuit: CircuitSource,
    #[serde(default)]
    pub k_matrix: KMatrixConfig,
    /// C_R multipliers for the cross-talk scan (netlist based).
    #[serde(default)]
    pub crosstalk_factors: Vec<f64>,
    #[serde(default)]
    pub checks: Vec<CircuitCheck>,
}

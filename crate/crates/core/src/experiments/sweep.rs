use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{FidelityTrace, TimeGrid};
use crate::error::{Error, Result};
use crate::hamiltonian::DiamondCouplings;
use crate::units;

use super::scenario::{run_scenario, Model, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Detuning Δ, values in 2π·GHz.
    Delta,
    /// J₂, values as multiples of J_z.
    #[serde(rename = "j_2")]
    J2,
    /// J₄, values as multiples of J_z.
    #[serde(rename = "j_4")]
    J4,
    /// C_R scale factor; acts on the circuit rather than the spin model.
    CRMultiplier,
}

impl SweepParameter {
    pub fn label(self) -> &'static str {
        match self {
            SweepParameter::Delta => "delta_2pi_ghz",
            SweepParameter::J2 => "j2_over_jz",
            SweepParameter::J4 => "j4_over_jz",
            SweepParameter::CRMultiplier => "c_r_multiplier",
        }
    }

    /// `base` with this parameter set to `value` in the parameter's units.
    pub fn apply(self, base: &DiamondCouplings, value: f64) -> Result<DiamondCouplings> {
        let mut c = *base;
        match self {
            SweepParameter::Delta => c.delta = units::from_2pi_ghz(value),
            SweepParameter::J2 => c.j_2 = value * base.j_z,
            SweepParameter::J4 => c.j_4 = value * base.j_z,
            SweepParameter::CRMultiplier => {
                return Err(Error::Config(
                    "c_r_multiplier changes the circuit, not the spin model; use crosstalk_scaling_scan".into(),
                ))
            }
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    PeakFidelity,
    #[default]
    PeakTime,
    FullTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    #[serde(default)]
    pub reduction: Reduction,
    /// Per-value horizon as a multiple of the analytic transfer time
    /// π|Δ|/(4J₂²). `None` keeps the base scenario's grid for every value.
    #[serde(default)]
    pub horizon: Option<f64>,
}

impl SweepSpec {
    pub fn new(parameter: SweepParameter, values: Vec<f64>) -> Self {
        SweepSpec {
            parameter,
            values,
            reduction: Reduction::default(),
            horizon: Some(1.5),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep needs at least one value".into()));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("non-finite sweep value {v}")));
        }
        if let Some(h) = self.horizon {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Config(format!("sweep horizon must be positive, got {h}")));
            }
        }
        Ok(())
    }
}

/// π|Δ|/(4J₂²), or `None` when either vanishes.
pub fn analytic_transfer_time(c: &DiamondCouplings) -> Option<f64> {
    (c.delta != 0.0 && c.j_2 != 0.0).then(|| std::f64::consts::PI * c.delta.abs() / (4.0 * c.j_2 * c.j_2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    /// Analytic transfer time (s), when defined.
    pub t_f: Option<f64>,
    /// Time of the worst-case (band minimum) fidelity maximum (s).
    pub peak_time: f64,
    pub peak_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub parameter: SweepParameter,
    pub reduction: Reduction,
    pub rows: Vec<SweepRow>,
    /// Worst-case traces, one per value; empty unless the reduction is
    /// `full_trace`.
    pub traces: Vec<FidelityTrace>,
}

impl SweepTable {
    /// Log-log slope of peak time against |value|.
    pub fn peak_time_exponent(&self) -> Result<f64> {
        let xs: Vec<f64> = self.rows.iter().map(|r| r.value).collect();
        let ys: Vec<f64> = self.rows.iter().map(|r| r.peak_time).collect();
        power_law_exponent(&xs, &ys)
    }

    pub fn min_peak_fidelity(&self) -> f64 {
        self.rows.iter().map(|r| r.peak_fidelity).fold(f64::INFINITY, f64::min)
    }
}

/// Least-squares slope of ln|y| against ln|x|.
pub fn power_law_exponent(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), found: ys.len() });
    }
    if xs.len() < 2 || xs.iter().chain(ys).any(|v| *v == 0.0 || !v.is_finite()) {
        return Err(Error::Degenerate("power-law fit needs two or more finite nonzero points".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.abs().ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("power-law fit needs distinct x values".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Runs `base` once per sweep value, holding every other parameter fixed.
pub fn run_sweep(base: &Scenario, spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let rows: Vec<(SweepRow, FidelityTrace)> = spec
        .values
        .par_iter()
        .map(|&value| {
            let mut s = base.clone();
            s.name = format!("{}_{}={}", base.name, spec.parameter.label(), value);
            s.params = spec.parameter.apply(&base.params, value)?;
            let t_f = match s.model {
                Model::IdealResonant => None,
                _ => analytic_transfer_time(&s.params),
            };
            if let Some(factor) = spec.horizon {
                let tf = t_f.ok_or_else(|| {
                    Error::Config(format!("{}: no analytic transfer time to scale the horizon by", s.name))
                })?;
                s.grid = TimeGrid::new(0.0, factor * tf, base.grid.n_points)?;
            }
            let result = run_scenario(&s)?;
            let worst = result.band.min;
            let peak = worst
                .peak()
                .ok_or_else(|| Error::InvalidState(format!("{}: empty trace", s.name)))?;
            Ok((
                SweepRow {
                    value,
                    t_f,
                    peak_time: peak.time,
                    peak_fidelity: peak.value,
                },
                worst,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let (rows, traces): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    Ok(SweepTable {
        parameter: spec.parameter,
        reduction: spec.reduction,
        rows,
        traces: if spec.reduction == Reduction::FullTrace { traces } else { Vec::new() },
    })
}

/// Detuning sweep of `base` over `values` (2π·GHz).
pub fn run_delta_sweep(base: &Scenario, values: &[f64]) -> Result<SweepTable> {
    let mut spec = SweepSpec::new(SweepParameter::Delta, values.to_vec());
    spec.reduction = Reduction::FullTrace;
    run_sweep(base, &spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exponent_of_exact_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-2.0)).collect();
        assert!((power_law_exponent(&xs, &ys).unwrap() + 2.0).abs() < 1e-12);
        assert!(power_law_exponent(&[1.0, 1.0], &[2.0, 3.0]).is_err());
        assert!(power_law_exponent(&[1.0], &[2.0]).is_err());
    }

    #[test]
    fn empty_sweep_rejected() {
        let spec = SweepSpec::new(SweepParameter::Delta, vec![]);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn parameter_units() {
        let t = DiamondCouplings::reference();
        let c = SweepParameter::Delta.apply(&t, 2.0).unwrap();
        assert!((c.delta - units::from_2pi_ghz(2.0)).abs() < 1e-3);
        let c = SweepParameter::J2.apply(&t, 0.5).unwrap();
        assert_eq!(c.j_2, 0.5 * t.j_z);
        assert_eq!(c.j_x, t.j_x);
        assert!(SweepParameter::CRMultiplier.apply(&t, 2.0).is_err());
    }

    #[test]
    fn spec_parses() {
        let s: SweepSpec = serde_json::from_str(r#"{"parameter": "j_2", "values": [0.2, 0.3], "reduction": "peak_fidelity"}"#).unwrap();
        assert_eq!(s.parameter, SweepParameter::J2);
        assert_eq!(s.horizon, None);
        let s: SweepSpec = serde_json::from_str(r#"{"parameter": "c_r_multiplier", "values": [1]}"#).unwrap();
        assert_eq!(s.parameter, SweepParameter::CRMultiplier);
    }

    proptest! {
        #[test]
        fn exponent_recovers_slope(k in -3.0f64..3.0, a in 0.1f64..10.0) {
            let xs = [0.5, 1.0, 1.7, 3.2];
            let ys: Vec<f64> = xs.iter().map(|x: &f64| a * x.powf(k)).collect();
            prop_assert!((power_law_exponent(&xs, &ys).unwrap() - k).abs() < 1e-9);
        }
    }
}

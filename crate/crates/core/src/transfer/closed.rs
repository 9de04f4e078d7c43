//! Blockade conditions for the closed gate.

use std::f64::consts::FRAC_PI_4;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::dynamics::unitary;
use crate::hamiltonian::{build_general_diamond, GeneralCouplings};
use crate::operator::C64;
use crate::state::{down, gate_state, left_state, qubit_state, register_state, up, GateSetting, QuantumState};

/// Residuals are divided by the largest coupling magnitude, so they are
/// dimensionless and comparable across parameter scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedGateReport {
    pub theta: f64,
    pub j14_residual: f64,
    /// |J12 cosθ + J13 sinθ|, |J13 cosθ + J12 sinθ|, |J24 cosθ + J34 sinθ|
    /// and |J23ˣ cos2θ|.
    pub constraint_residuals: Vec<f64>,
    /// Gate angles for which every constraint holds.
    pub theta_solutions: Vec<f64>,
    /// Energy of the closed register state (rad/s).
    pub e_c: f64,
    /// ‖Hv − E v‖ for the closed state with the left spin down and up.
    pub eigen_residuals: [f64; 2],
    /// Energy difference between the two left-spin configurations.
    pub energy_mismatch: f64,
    pub coupling_scale: f64,
}

impl ClosedGateReport {
    pub fn max_residual(&self) -> f64 {
        self.constraint_residuals
            .iter()
            .chain(&self.eigen_residuals)
            .chain([&self.j14_residual, &self.energy_mismatch])
            .fold(0.0f64, |m, r| m.max(*r))
    }

    pub fn is_closed(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

fn closed_register(left: &QuantumState, theta: f64, right: &QuantumState) -> DVector<C64> {
    let s = register_state(left, &gate_state(GateSetting::Closed(theta)), right);
    s.as_pure().expect("pure product").clone()
}

fn rayleigh(h: &crate::operator::DenseOperator, v: &DVector<C64>) -> (f64, f64) {
    let hv = &h.0 * v;
    let e = v.dotc(&hv).re;
    (e, (hv - v * C64::from(e)).norm())
}

fn report_at(c: &GeneralCouplings, theta: f64) -> ClosedGateReport {
    let scale = c.scale().max(f64::MIN_POSITIVE);
    let (cs, sn) = (theta.cos(), theta.sin());
    let h = build_general_diamond(c);
    let (e_down, r_down) = rayleigh(&h, &closed_register(&down(), theta, &down()));
    let (e_up, r_up) = rayleigh(&h, &closed_register(&up(), theta, &down()));
    ClosedGateReport {
        theta,
        j14_residual: c.j14.abs() / scale,
        constraint_residuals: vec![
            (c.j12 * cs + c.j13 * sn).abs() / scale,
            (c.j13 * cs + c.j12 * sn).abs() / scale,
            (c.j24 * cs + c.j34 * sn).abs() / scale,
            (c.j23_x * (2.0 * theta).cos()).abs() / scale,
        ],
        theta_solutions: Vec::new(),
        e_c: e_down,
        eigen_residuals: [r_down / scale, r_up / scale],
        energy_mismatch: (e_down - e_up).abs() / scale,
        coupling_scale: scale,
    }
}

/// Checks whether cosθ|↑↓⟩ + sinθ|↓↑⟩ on the gate blocks transfer for the
/// given couplings.
pub fn check_closed(c: &GeneralCouplings, theta: f64) -> ClosedGateReport {
    let mut report = report_at(c, theta);
    let mut candidates = vec![FRAC_PI_4, -FRAC_PI_4];
    if c.j12 != 0.0 || c.j13 != 0.0 {
        let t = (-c.j12).atan2(c.j13);
        let t = t - std::f64::consts::PI * (t / std::f64::consts::PI).round();
        candidates.push(t);
    }
    for t in candidates {
        if report_at(c, t).is_closed(1e-12)
            && !report.theta_solutions.iter().any(|s: &f64| (s - t).abs() < 1e-9)
        {
            report.theta_solutions.push(t);
        }
    }
    report
}

/// Propagates |L⟩|closed⟩|R⟩ for several left and right spin states and
/// checks it stays put over t ∈ [0, 10/|J23ᶻ|].
pub fn closed_for_arbitrary_right(c: &GeneralCouplings) -> bool {
    let report = check_closed(c, FRAC_PI_4);
    let Some(&theta) = report.theta_solutions.first() else {
        return false;
    };
    let h = build_general_diamond(c);
    let rate = if c.j23_z != 0.0 { c.j23_z.abs() } else { report.coupling_scale };
    let t_end = 10.0 / rate;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let rights = [
        down(),
        up(),
        qubit_state(C64::from(s), C64::from(s)).expect("normalised"),
        qubit_state(C64::from(0.6), C64::new(0.0, 0.8)).expect("normalised"),
    ];
    let lefts = [up(), down(), left_state(1.0, 0.0), left_state(0.5, 2.1)];
    let steps = 40;
    let propagators: Vec<_> = (1..=steps)
        .map(|k| unitary(&h, t_end * k as f64 / steps as f64))
        .collect();
    for l in &lefts {
        for r in &rights {
            let psi = closed_register(l, theta, r);
            for u in &propagators {
                let f = psi.dotc(&(&u.0 * &psi)).norm_sqr();
                if (f - 1.0).abs() > 1e-9 {
                    return false;
                }
            }
        }
    }
    true
}

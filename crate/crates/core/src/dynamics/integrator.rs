//! Dormand–Prince 5(4) with embedded error control, landing exactly on
//! requested output times.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operator::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the step; `None` lets the caller's Hamiltonian decide.
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: None,
            max_steps: 500_000_000,
        }
    }
}

impl SolverOptions {
    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolverStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combine(out: &mut DMatrix<C64>, y: &DMatrix<C64>, h: f64, terms: &[(f64, &DMatrix<C64>)]) {
    out.as_mut_slice().copy_from_slice(y.as_slice());
    accumulate(out, h, terms);
}

fn accumulate(out: &mut DMatrix<C64>, h: f64, terms: &[(f64, &DMatrix<C64>)]) {
    let out = out.as_mut_slice();
    for (c, k) in terms {
        let s = h * c;
        for (o, v) in out.iter_mut().zip(k.as_slice()) {
            *o += v * s;
        }
    }
}

fn scaled_norm(err: &DMatrix<C64>, y0: &DMatrix<C64>, y1: &DMatrix<C64>, atol: f64, rtol: f64) -> f64 {
    let n = err.len() as f64;
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1.iter()))
        .map(|(e, (a, b))| {
            let sc = atol + rtol * a.norm().max(b.norm());
            (e.norm() / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

/// Integrates dy/dt = f(t, y) through the strictly increasing `times`,
/// calling `observe(i, t, y)` at each of them (including the first).
pub fn integrate<F, O>(
    mut rhs: F,
    y0: DMatrix<C64>,
    times: &[f64],
    opts: &SolverOptions,
    max_step: f64,
    mut observe: O,
) -> Result<SolverStats>
where
    F: FnMut(f64, &DMatrix<C64>, &mut DMatrix<C64>),
    O: FnMut(usize, f64, &DMatrix<C64>),
{
    let mut stats = SolverStats::default();
    let Some(&t_start) = times.first() else {
        return Ok(stats);
    };
    let (r, c) = y0.shape();
    let zeros = || DMatrix::<C64>::zeros(r, c);
    let (mut k1, mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (zeros(), zeros(), zeros(), zeros(), zeros(), zeros(), zeros());
    let mut ytmp = zeros();
    let mut ynew = zeros();
    let mut err = zeros();

    let mut t = t_start;
    let mut y = y0;
    observe(0, t, &y);
    if times.len() == 1 {
        return Ok(stats);
    }

    rhs(t, &y, &mut k1);
    stats.evaluations += 1;

    let span = times[times.len() - 1] - t_start;
    let max_step = max_step.min(span).max(f64::MIN_POSITIVE);
    let mut h = {
        let zero = zeros();
        let d0 = scaled_norm(&y, &zero, &y, opts.atol, opts.rtol);
        let d1 = scaled_norm(&k1, &zero, &y, opts.atol, opts.rtol);
        let guess = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
        guess.min(max_step)
    };

    for (idx, &target) in times.iter().enumerate().skip(1) {
        while t < target {
            let remaining = target - t;
            let mut step = h.min(max_step);
            let landing = remaining <= step * (1.0 + 1e-9);
            if landing {
                step = remaining;
            }
            if step <= 1e-14 * t.abs().max(span) {
                return Err(Error::StepSizeUnderflow { t, h: step, err: f64::NAN });
            }

            combine(&mut ytmp, &y, step, &[(A21, &k1)]);
            rhs(t + C2 * step, &ytmp, &mut k2);
            combine(&mut ytmp, &y, step, &[(A31, &k1), (A32, &k2)]);
            rhs(t + C3 * step, &ytmp, &mut k3);
            combine(&mut ytmp, &y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            rhs(t + C4 * step, &ytmp, &mut k4);
            combine(&mut ytmp, &y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            rhs(t + C5 * step, &ytmp, &mut k5);
            combine(
                &mut ytmp,
                &y,
                step,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            );
            rhs(t + step, &ytmp, &mut k6);
            combine(
                &mut ynew,
                &y,
                step,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            rhs(t + step, &ynew, &mut k7);
            stats.evaluations += 6;

            err.fill(C64::new(0.0, 0.0));
            accumulate(
                &mut err,
                step,
                &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
            );
            let e = scaled_norm(&err, &y, &ynew, opts.atol, opts.rtol);
            if !e.is_finite() {
                return Err(Error::StepSizeUnderflow { t, h: step, err: e });
            }

            let factor = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
            if e <= 1.0 {
                t = if landing { target } else { t + step };
                std::mem::swap(&mut y, &mut ynew);
                std::mem::swap(&mut k1, &mut k7);
                stats.accepted += 1;
                let proposal = step * factor;
                h = if landing { h.max(proposal) } else { proposal };
            } else {
                stats.rejected += 1;
                h = step * factor.min(1.0);
                if h <= 1e-14 * t.abs().max(span) {
                    return Err(Error::StepSizeUnderflow { t, h, err: e });
                }
            }
            if stats.accepted + stats.rejected > opts.max_steps {
                return Err(Error::StepBudgetExhausted {
                    steps: opts.max_steps,
                    t,
                });
            }
        }
        observe(idx, t, &y);
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_is_accurate() {
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.3).collect();
        let mut out = Vec::new();
        integrate(
            |_, y, dy| dy.copy_from(&y.map(|v| -v)),
            DMatrix::from_element(1, 1, C64::new(1.0, 0.0)),
            &times,
            &SolverOptions::default(),
            f64::INFINITY,
            |_, t, y| out.push((t, y[(0, 0)].re)),
        )
        .unwrap();
        for (t, v) in out {
            assert!((v - (-t).exp()).abs() < 1e-9, "t={t} v={v}");
        }
    }

    #[test]
    fn lands_on_output_times() {
        let times = [0.0, 0.1, 0.1 + 1e-7, 2.0];
        let mut seen = Vec::new();
        integrate(
            |_, y, dy| dy.copy_from(y),
            DMatrix::from_element(1, 1, C64::new(1.0, 0.0)),
            &times,
            &SolverOptions::default(),
            f64::INFINITY,
            |_, t, _| seen.push(t),
        )
        .unwrap();
        assert_eq!(seen, times);
    }

    #[test]
    fn blow_up_reports_underflow() {
        let r = integrate(
            |_, y, dy| dy.copy_from(&y.map(|v| v * v)),
            DMatrix::from_element(1, 1, C64::new(1.0, 0.0)),
            &[0.0, 2.0],
            &SolverOptions::default(),
            f64::INFINITY,
            |_, _, _| {},
        );
        assert!(matches!(r, Err(Error::StepSizeUnderflow { .. })), "{r:?}");
    }
}

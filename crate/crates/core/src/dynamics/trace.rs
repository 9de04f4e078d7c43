use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units;

const RANGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceMetadata {
    pub scenario: String,
    pub initial_state: String,
    pub gate: String,
    pub model: String,
}

/// Fidelity sampled on a time grid. Times are stored in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityTrace {
    pub times: Vec<f64>,
    pub fidelities: Vec<f64>,
    pub metadata: TraceMetadata,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub index: usize,
    /// Interpolated time of the maximum (s).
    pub time: f64,
    /// Interpolated value at the maximum.
    pub value: f64,
}

impl FidelityTrace {
    pub fn new(times: Vec<f64>, fidelities: Vec<f64>, metadata: TraceMetadata) -> Result<Self> {
        if times.len() != fidelities.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                found: fidelities.len(),
            });
        }
        if let Some(f) = fidelities
            .iter()
            .find(|f| !(**f >= -RANGE_TOL && **f <= 1.0 + RANGE_TOL))
        {
            return Err(Error::InvalidState(format!("fidelity {f} outside [0, 1]")));
        }
        Ok(FidelityTrace {
            times,
            fidelities,
            metadata,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.fidelities.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.fidelities.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Fidelity at the sample closest to `t`.
    pub fn at(&self, t: f64) -> Option<f64> {
        let i = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))?
            .0;
        Some(self.fidelities[i])
    }

    /// Minimum over samples with t ≤ `t_max`.
    pub fn min_until(&self, t_max: f64) -> f64 {
        self.times
            .iter()
            .zip(&self.fidelities)
            .filter(|(t, _)| **t <= t_max * (1.0 + 1e-12))
            .map(|(_, f)| *f)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn peak(&self) -> Option<Peak> {
        self.peak_in(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Largest sample inside [lo, hi], refined by a parabola through the
    /// neighbouring samples when they exist.
    pub fn peak_in(&self, lo: f64, hi: f64) -> Option<Peak> {
        let (index, _) = self
            .times
            .iter()
            .zip(&self.fidelities)
            .enumerate()
            .filter(|(_, (t, _))| **t >= lo && **t <= hi)
            .max_by(|a, b| a.1 .1.total_cmp(b.1 .1))?;
        let (t, f) = (&self.times, &self.fidelities);
        let mut peak = Peak {
            index,
            time: t[index],
            value: f[index],
        };
        if index > 0 && index + 1 < t.len() {
            let (fm, f0, fp) = (f[index - 1], f[index], f[index + 1]);
            let curvature = fm - 2.0 * f0 + fp;
            let dt = 0.5 * (t[index + 1] - t[index - 1]);
            if curvature < 0.0 {
                let offset = 0.5 * (fm - fp) / curvature;
                peak.time = t[index] + offset * dt;
                peak.value = f0 - 0.25 * (fm - fp) * offset;
            }
        }
        Some(peak)
    }

    /// CSV with header `t_us,fidelity` and 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t_us,fidelity\n");
        for (t, f) in self.times.iter().zip(&self.fidelities) {
            let _ = writeln!(s, "{:.11e},{:.11e}", units::to_us(*t), f);
        }
        s
    }

    pub fn from_csv(text: &str, metadata: TraceMetadata) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "t_us,fidelity" => {}
            _ => {
                return Err(Error::TraceFormat {
                    line: 1,
                    reason: "expected header `t_us,fidelity`".into(),
                })
            }
        }
        let mut times = Vec::new();
        let mut fids = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |reason: &str| Error::TraceFormat {
                line: i + 1,
                reason: reason.to_string(),
            };
            let (a, b) = line.split_once(',').ok_or_else(|| bad("expected two columns"))?;
            let t: f64 = a.trim().parse().map_err(|_| bad("bad time"))?;
            let f: f64 = b.trim().parse().map_err(|_| bad("bad fidelity"))?;
            times.push(units::from_us(t));
            fids.push(f);
        }
        FidelityTrace::new(times, fids, metadata)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

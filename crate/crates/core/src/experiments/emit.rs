use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use plotters::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::CrosstalkScan;
use crate::dynamics::FidelityTrace;
use crate::error::{Error, Result};
use crate::units;

use super::scenario::{FidelityBand, ScenarioResult};
use super::state_prep::StatePrepResult;
use super::sweep::SweepTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Plot,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn plot(self) -> bool {
        matches!(self, OutputFormat::Plot | OutputFormat::Both)
    }
}

fn write(path: &Path, text: &str) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(path.to_path_buf())
}

pub fn band_csv(band: &FidelityBand) -> String {
    let mut out = String::from("t_us,min,mean,max\n");
    for i in 0..band.mean.len() {
        let _ = writeln!(
            out,
            "{:.11e},{:.11e},{:.11e},{:.11e}",
            units::to_us(band.mean.times[i]),
            band.min.fidelities[i],
            band.mean.fidelities[i],
            band.max.fidelities[i]
        );
    }
    out
}

pub fn sweep_csv(table: &SweepTable) -> String {
    let mut out = format!("{},t_f_us,peak_time_us,peak_fidelity\n", table.parameter.label());
    for r in &table.rows {
        let t_f = r.t_f.map_or(String::new(), |t| format!("{:.11e}", units::to_us(t)));
        let _ = writeln!(out, "{},{},{:.11e},{:.11e}", r.value, t_f, units::to_us(r.peak_time), r.peak_fidelity);
    }
    out
}

pub fn state_prep_csv(r: &StatePrepResult) -> String {
    let mut out = String::from("t_us,open,closed,up_up,singlet\n");
    for (t, p) in r.trace.times.iter().zip(&r.populations) {
        let _ = writeln!(
            out,
            "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
            units::to_us(*t),
            p.open,
            p.closed,
            p.up_up,
            p.singlet
        );
    }
    out
}

pub fn crosstalk_csv(scan: &CrosstalkScan) -> String {
    let mut out = String::from("c_r_multiplier,j4_over_j2,j4_over_jz\n");
    for r in &scan.rows {
        let _ = writeln!(out, "{},{:.11e},{:.11e}", r.c_r_multiplier, r.j4_over_j2, r.j4_over_jz);
    }
    out
}

/// Writes `<name>.csv` (mean trace) and `<name>_band.csv`.
pub fn write_scenario_csv(dir: &Path, result: &ScenarioResult) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let name = &result.scenario.name;
    let mean = dir.join(format!("{name}.csv"));
    result.band.mean.write_csv(&mean)?;
    let band = write(&dir.join(format!("{name}_band.csv")), &band_csv(&result.band))?;
    Ok(vec![mean, band])
}

pub fn write_sweep_csv(dir: &Path, name: &str, table: &SweepTable) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files = vec![write(&dir.join(format!("{name}.csv")), &sweep_csv(table))?];
    for (row, trace) in table.rows.iter().zip(&table.traces) {
        let path = dir.join(format!("{name}_{}.csv", row.value));
        trace.write_csv(&path)?;
        files.push(path);
    }
    Ok(files)
}

pub fn write_state_prep_csv(dir: &Path, name: &str, r: &StatePrepResult) -> Result<Vec<PathBuf>> {
    Ok(vec![write(&dir.join(format!("{name}.csv")), &state_prep_csv(r))?])
}

const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(23, 190, 207),
];

fn plot_err<E: std::fmt::Display>(e: E) -> Error {
    Error::Plot(e.to_string())
}

struct Curve<'a> {
    label: String,
    trace: &'a FidelityTrace,
    band: Option<(&'a FidelityTrace, &'a FidelityTrace)>,
}

fn y_range(curves: &[Curve]) -> (f64, f64) {
    let lo = curves
        .iter()
        .map(|c| c.band.map_or(c.trace.min(), |(lo, _)| lo.min()))
        .fold(f64::INFINITY, f64::min);
    let hi = curves
        .iter()
        .map(|c| c.band.map_or(c.trace.max(), |(_, hi)| hi.max()))
        .fold(f64::NEG_INFINITY, f64::max);
    let pad = ((hi - lo) * 0.05).max(1e-3);
    ((lo - pad).max(0.0), (hi + pad).min(1.0 + 1e-3).max(lo + 2.0 * pad))
}

fn draw(path: &Path, title: &str, y_label: &str, curves: &[Curve]) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let t_max = curves
        .iter()
        .filter_map(|c| c.trace.times.last())
        .fold(0.0f64, |a, &b| a.max(units::to_us(b)));
    let (y0, y1) = y_range(curves);
    let root = SVGBackend::new(path, (900, 560)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 22))
        .margin(16)
        .x_label_area_size(44)
        .y_label_area_size(64)
        .build_cartesian_2d(0.0..t_max.max(1e-9), y0..y1)
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc("t (us)")
        .y_desc(y_label)
        .draw()
        .map_err(plot_err)?;
    for (k, c) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if let Some((lo, hi)) = c.band {
            let mut outline: Vec<(f64, f64)> = hi.times.iter().zip(&hi.fidelities).map(|(t, f)| (units::to_us(*t), *f)).collect();
            outline.extend(lo.times.iter().zip(&lo.fidelities).rev().map(|(t, f)| (units::to_us(*t), *f)));
            chart
                .draw_series(std::iter::once(Polygon::new(outline, color.mix(0.2).filled())))
                .map_err(plot_err)?;
        }
        chart
            .draw_series(LineSeries::new(
                c.trace.times.iter().zip(&c.trace.fidelities).map(|(t, f)| (units::to_us(*t), *f)),
                color.stroke_width(2),
            ))
            .map_err(plot_err)?
            .label(c.label.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .position(SeriesLabelPosition::LowerRight)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)?;
    Ok(path.to_path_buf())
}

/// Mean fidelity with the min/max band shaded, one curve per scenario.
pub fn plot_bands(path: &Path, title: &str, results: &[&ScenarioResult]) -> Result<PathBuf> {
    let curves: Vec<Curve> = results
        .iter()
        .map(|r| Curve {
            label: r.scenario.name.clone(),
            trace: &r.band.mean,
            band: Some((&r.band.min, &r.band.max)),
        })
        .collect();
    draw(path, title, "fidelity", &curves)
}

/// One line per trace.
pub fn plot_traces(path: &Path, title: &str, y_label: &str, traces: &[(String, &FidelityTrace)]) -> Result<PathBuf> {
    let curves: Vec<Curve> = traces
        .iter()
        .map(|(label, trace)| Curve {
            label: label.clone(),
            trace,
            band: None,
        })
        .collect();
    draw(path, title, y_label, &curves)
}

/// Worst-case trace per swept value.
pub fn plot_sweep(path: &Path, title: &str, table: &SweepTable) -> Result<PathBuf> {
    let traces: Vec<(String, &FidelityTrace)> = table
        .rows
        .iter()
        .zip(&table.traces)
        .map(|(r, t)| (format!("{} = {}", table.parameter.label(), r.value), t))
        .collect();
    if traces.is_empty() {
        return Err(Error::Plot("sweep kept no traces; use the full_trace reduction".into()));
    }
    plot_traces(path, title, "fidelity", &traces)
}

pub fn plot_state_prep(path: &Path, r: &StatePrepResult) -> Result<PathBuf> {
    let series = |f: fn(&super::state_prep::GatePopulations) -> f64, tag| {
        FidelityTrace::new(
            r.trace.times.clone(),
            r.populations.iter().map(f).collect(),
            crate::dynamics::TraceMetadata {
                gate: tag,
                ..r.trace.metadata.clone()
            },
        )
    };
    let open = series(|p| p.open, "open".into())?;
    let closed = series(|p| p.closed, "closed".into())?;
    let up_up = series(|p| p.up_up, "up_up".into())?;
    plot_traces(
        path,
        "gate populations under drive",
        "population",
        &[("open".into(), &open), ("closed".into(), &closed), ("up-up".into(), &up_up)],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::TraceMetadata;

    fn trace(f: impl Fn(f64) -> f64) -> FidelityTrace {
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 2e-8).collect();
        let fid = times.iter().map(|&t| f(t)).collect();
        FidelityTrace::new(times, fid, TraceMetadata::default()).unwrap()
    }

    #[test]
    fn traces_render_to_svg() {
        let dir = std::env::temp_dir().join(format!("spin-transistor-plot-{}", std::process::id()));
        let a = trace(|t| (t * 1e7).sin().powi(2));
        let b = trace(|t| 0.5 + 0.4 * (t * 2e7).cos());
        let path = plot_traces(&dir.join("x.svg"), "test", "fidelity", &[("a".into(), &a), ("b".into(), &b)]).unwrap();
        let svg = fs::read_to_string(&path).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("polyline"));
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn band_csv_has_header_and_rows() {
        let m = trace(|_| 0.5);
        let band = FidelityBand {
            min: trace(|_| 0.25),
            mean: m.clone(),
            max: trace(|_| 0.75),
        };
        let text = band_csv(&band);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t_us,min,mean,max"));
        assert_eq!(lines.count(), 50);
    }
}

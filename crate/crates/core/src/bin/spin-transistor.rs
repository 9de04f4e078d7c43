use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spin_transistor::circuit::{crosstalk_scaling_scan, map_circuit};
use spin_transistor::experiments::config::{
    drift_check, load, CheckOutcome, CircuitMapConfig, ScenarioConfig, StatePrepConfig, SweepConfig, DRIFT_TOLERANCE,
};
use spin_transistor::experiments::{
    crosstalk_csv, plot_bands, plot_state_prep, plot_sweep, run_scenario, run_state_prep, run_sweep, write_scenario_csv,
    write_state_prep_csv, write_sweep_csv, OutputFormat, Reduction, ScenarioResult, SweepParameter,
};
use spin_transistor::transfer::write_report;
use spin_transistor::{units, Error, Result};

#[derive(Parser)]
#[command(version, about = "Diamond spin transistor experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fidelity traces over the initial-state lattice.
    Scenario(Common),
    /// One scenario per parameter value, peak time and fidelity per value.
    Sweep(Common),
    /// Driven open/closed gate preparation.
    StatePrep(Common),
    /// Circuit parameters to spin-model couplings.
    CircuitMap(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run description; circuit-map falls back to the reference circuit.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
    /// Exit nonzero if any configured threshold is violated.
    #[arg(long)]
    check: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Plot,
    Both,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Plot => OutputFormat::Plot,
            Format::Both => OutputFormat::Both,
        }
    }
}

fn config_path(c: &Common) -> Result<&Path> {
    c.config
        .as_deref()
        .ok_or_else(|| Error::Config("--config <path> is required for this subcommand".into()))
}

fn report(outcomes: &[CheckOutcome]) -> bool {
    for o in outcomes {
        println!("[{}] {} (value {:.6})", if o.passed { "PASS" } else { "FAIL" }, o.label, o.value);
    }
    outcomes.iter().all(|o| o.passed)
}

fn announce(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn scenario(c: &Common) -> Result<bool> {
    let cfg: ScenarioConfig = load(config_path(c)?)?;
    cfg.validate()?;
    let format = OutputFormat::from(c.format);
    let mut results: Vec<ScenarioResult> = Vec::new();
    for s in &cfg.scenarios {
        let r = run_scenario(s)?;
        let peak = r.band.min.peak().expect("non-empty grid");
        println!(
            "{}: {} states, worst-case peak F = {:.6} at {:.4} us, min F = {:.6}, drift {:.2e}",
            s.name,
            r.samples.len(),
            peak.value,
            units::to_us(peak.time),
            r.band.min.min(),
            r.drift.worst()
        );
        if format.csv() {
            announce(&write_scenario_csv(&c.out, &r)?);
        }
        if format.plot() {
            announce(&[plot_bands(&c.out.join(format!("{}.svg", s.name)), &s.name, &[&r])?]);
        }
        results.push(r);
    }
    if format.plot() && results.len() > 1 {
        let refs: Vec<&ScenarioResult> = results.iter().collect();
        let title = cfg.title.as_deref().unwrap_or("fidelity");
        announce(&[plot_bands(&c.out.join("overview.svg"), title, &refs)?]);
    }
    let mut outcomes: Vec<CheckOutcome> = results.iter().map(drift_check).collect();
    for check in &cfg.checks {
        outcomes.push(check.evaluate(&results)?);
    }
    Ok(report(&outcomes))
}

fn sweep(c: &Common) -> Result<bool> {
    let cfg: SweepConfig = load(config_path(c)?)?;
    let format = OutputFormat::from(c.format);
    let mut outcomes = Vec::new();
    if cfg.sweep.parameter == SweepParameter::CRMultiplier {
        let p = cfg.circuit.clone().unwrap_or_default().resolve()?;
        let scan = crosstalk_scaling_scan(&p, &cfg.sweep.values)?;
        for r in &scan.rows {
            println!("C_R x {:<6} |J4/J2| = {:.4e}  |J4/Jz| = {:.4e}", r.c_r_multiplier, r.j4_over_j2, r.j4_over_jz);
        }
        if format.csv() {
            let path = c.out.join(format!("{}.csv", cfg.name));
            std::fs::create_dir_all(&c.out)?;
            std::fs::write(&path, crosstalk_csv(&scan))?;
            announce(&[path]);
        }
        for check in &cfg.checks {
            outcomes.push(check.evaluate(None, Some(&scan))?);
        }
        return Ok(report(&outcomes));
    }
    let base = cfg
        .base
        .clone()
        .ok_or_else(|| Error::Config("sweep needs a `base` scenario".into()))?;
    let mut spec = cfg.sweep.clone();
    if format.plot() {
        spec.reduction = Reduction::FullTrace;
    }
    let table = run_sweep(&base, &spec)?;
    for r in &table.rows {
        println!(
            "{} = {:<8} t_peak = {:.4} us  F_peak = {:.6}{}",
            table.parameter.label(),
            r.value,
            units::to_us(r.peak_time),
            r.peak_fidelity,
            r.t_f.map_or(String::new(), |t| format!("  t_f = {:.4} us", units::to_us(t)))
        );
    }
    if table.rows.len() > 1 {
        if let Ok(k) = table.peak_time_exponent() {
            println!("fitted peak-time exponent {k:.4}");
        }
    }
    if format.csv() {
        announce(&write_sweep_csv(&c.out, &cfg.name, &table)?);
    }
    if format.plot() {
        announce(&[plot_sweep(&c.out.join(format!("{}.svg", cfg.name)), &cfg.name, &table)?]);
    }
    for check in &cfg.checks {
        outcomes.push(check.evaluate(Some(&table), None)?);
    }
    Ok(report(&outcomes))
}

fn state_prep(c: &Common) -> Result<bool> {
    let cfg: StatePrepConfig = load(config_path(c)?)?;
    let format = OutputFormat::from(c.format);
    let drive = cfg.drive.resolve(&cfg.params)?;
    let r = run_state_prep(&drive, &cfg.params, cfg.start, cfg.grid, &cfg.solver_options())?;
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "A = {:.4} 2pi*MHz, omega_d = {:.6} 2pi*GHz: {} population {:.6} at t_pi = {:.4} us, max up-up {:.2e}",
        units::to_2pi_mhz(drive.amplitude),
        units::to_2pi_ghz(drive.omega_d),
        r.target().label(),
        r.t_pi.value,
        units::to_us(r.t_pi.time),
        r.max_up_up
    );
    if format.csv() {
        announce(&write_state_prep_csv(&c.out, &cfg.name, &r)?);
    }
    if format.plot() {
        announce(&[plot_state_prep(&c.out.join(format!("{}.svg", cfg.name)), &r)?]);
    }
    let mut outcomes = vec![CheckOutcome {
        label: format!("norm drift <= {DRIFT_TOLERANCE}"),
        value: r.max_norm_drift,
        passed: r.max_norm_drift <= DRIFT_TOLERANCE,
    }];
    outcomes.extend(cfg.checks.iter().map(|chk| chk.evaluate(&r)));
    Ok(report(&outcomes))
}

fn circuit_map(c: &Common) -> Result<bool> {
    let cfg: CircuitMapConfig = match &c.config {
        Some(p) => load(p)?,
        None => serde_json::from_str("{}")?,
    };
    let p = cfg.circuit.resolve()?;
    let k = cfg.k_matrix.resolve(&p)?;
    let map = map_circuit(&p, &k)?;
    for w in &map.energies.warnings {
        eprintln!("warning: {w}");
    }
    let r = &map.ratios;
    let cpl = &map.couplings;
    println!(
        "E_J1/E_C1 = {:.3}  E_J2/E_C2 = {:.3}  E_L2/E_J2 = {:.4}",
        r.ej1_over_ec1, r.ej2_over_ec2, r.el2_over_ej2
    );
    println!(
        "Omega = {:.4} 2pi*GHz  Delta = {:.4} 2pi*GHz  J_z = {:.3} 2pi*MHz",
        units::to_2pi_ghz(cpl.omega),
        units::to_2pi_ghz(cpl.delta),
        units::to_2pi_mhz(cpl.j_z)
    );
    println!(
        "J_x/J_z = {:.4}  J_2/J_z = {:.4}  J_4/J_z = {:.4e}",
        r.jx_over_jz, r.j2_over_jz, r.j4_over_jz
    );
    let scan = if cfg.crosstalk_factors.is_empty() {
        None
    } else {
        Some(crosstalk_scaling_scan(&p, &cfg.crosstalk_factors)?)
    };
    let mut files = vec![c.out.join("circuit_map.json")];
    std::fs::create_dir_all(&c.out)?;
    write_report(&files[0], &map)?;
    if let Some(s) = &scan {
        let path = c.out.join("crosstalk.csv");
        std::fs::write(&path, crosstalk_csv(s))?;
        files.push(path);
    }
    announce(&files);
    let outcomes = cfg
        .checks
        .iter()
        .map(|chk| chk.evaluate(&map, scan.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(report(&outcomes))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, fn(&Common) -> Result<bool>) = match &cli.command {
        Command::Scenario(c) => (c, scenario),
        Command::Sweep(c) => (c, sweep),
        Command::StatePrep(c) => (c, state_prep),
        Command::CircuitMap(c) => (c, circuit_map),
    };
    match run(common) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) if common.check => {
            eprintln!("threshold check failed");
            ExitCode::from(1)
        }
        Ok(false) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

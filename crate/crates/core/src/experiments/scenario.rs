use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::basis::{parse_label, sigma_z_total, Subspace};
use crate::dynamics::{evolve_columns, evolve_lindblad_in, FidelityTrace, NoiseConfig, SolverOptions, SolverStats, TimeGrid, TraceMetadata};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_general_diamond, circuit_hamiltonian, rotating_frame_hamiltonian, DiamondCouplings, GeneralCouplings, HarmonicHamiltonian};
use crate::operator::{C64, DIM};
use crate::state::{down, gate_state, register_state, up, GateSetting, QuantumState};
use crate::units;

/// Which Hamiltonian a scenario evolves under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Static reduced diamond with J₁₂ = J₂₄ = −J₁₃ = −J₃₄ = `j_2` and
    /// J₂₃ᶻ = `j_z`; the remaining parameters are ignored.
    IdealResonant,
    /// Rotating-frame model without cross-talk.
    RotatingFrame,
    /// Rotating-frame model with cross-talk J₄.
    Circuit,
    /// `Circuit` plus σz dephasing from the scenario's noise config.
    CircuitNoisy,
}

impl Model {
    pub fn label(self) -> &'static str {
        match self {
            Model::IdealResonant => "ideal_resonant",
            Model::RotatingFrame => "rotating_frame",
            Model::Circuit => "circuit",
            Model::CircuitNoisy => "circuit_noisy",
        }
    }

    pub fn hamiltonian(self, c: &DiamondCouplings) -> HarmonicHamiltonian {
        match self {
            Model::IdealResonant => HarmonicHamiltonian::new(build_general_diamond(&GeneralCouplings::reduced(c.j_2, c.j_z))),
            Model::RotatingFrame => rotating_frame_hamiltonian(c),
            Model::Circuit | Model::CircuitNoisy => circuit_hamiltonian(c),
        }
    }

    pub fn is_noisy(self) -> bool {
        self == Model::CircuitNoisy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    Open,
    Closed,
}

impl Gate {
    pub fn setting(self) -> GateSetting {
        match self {
            Gate::Open => GateSetting::Open,
            Gate::Closed => GateSetting::closed(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Gate::Open => "open",
            Gate::Closed => "closed",
        }
    }
}

/// Left-qubit initial states (|↑⟩ + r e^{iθ}|↓⟩)/√(1+r²) to sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInitialLeft", into = "RawInitialLeft")]
pub enum InitialLeft {
    /// r ∈ {0, ¼, ½, ¾, 1} × θ ∈ {0, π/4, …, 7π/4}.
    Lattice,
    States(Vec<(f64, f64)>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawInitialLeft {
    Named(String),
    Single { r: f64, theta: f64 },
    List(Vec<RawPoint>),
}

#[derive(Serialize, Deserialize)]
struct RawPoint {
    r: f64,
    theta: f64,
}

impl TryFrom<RawInitialLeft> for InitialLeft {
    type Error = String;

    fn try_from(raw: RawInitialLeft) -> std::result::Result<Self, String> {
        let left = match raw {
            RawInitialLeft::Named(s) if s == "lattice" => InitialLeft::Lattice,
            RawInitialLeft::Named(s) => return Err(format!("unknown initial_left `{s}`")),
            RawInitialLeft::Single { r, theta } => InitialLeft::States(vec![(r, theta)]),
            RawInitialLeft::List(v) => InitialLeft::States(v.into_iter().map(|p| (p.r, p.theta)).collect()),
        };
        left.validate().map_err(|e| e.to_string())?;
        Ok(left)
    }
}

impl From<InitialLeft> for RawInitialLeft {
    fn from(left: InitialLeft) -> Self {
        match left {
            InitialLeft::Lattice => RawInitialLeft::Named("lattice".into()),
            InitialLeft::States(v) => RawInitialLeft::List(v.into_iter().map(|(r, theta)| RawPoint { r, theta }).collect()),
        }
    }
}

impl InitialLeft {
    pub fn single(r: f64, theta: f64) -> Self {
        InitialLeft::States(vec![(r, theta)])
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        match self {
            InitialLeft::Lattice => (0..5)
                .flat_map(|i| (0..8).map(move |k| (0.25 * i as f64, k as f64 * PI / 4.0)))
                .collect(),
            InitialLeft::States(v) => v.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pts = self.points();
        if pts.is_empty() {
            return Err(Error::Config("initial_left lists no states".into()));
        }
        for (r, theta) in pts {
            if !((0.0..=1.0).contains(&r) && (0.0..2.0 * PI).contains(&theta)) {
                return Err(Error::Config(format!(
                    "initial state (r = {r}, theta = {theta}) outside r in [0,1], theta in [0, 2pi)"
                )));
            }
        }
        Ok(())
    }
}

/// Spin parameters named by preset or given explicitly.
pub fn named_couplings(name: &str) -> Result<DiamondCouplings> {
    let t = DiamondCouplings::reference();
    match name {
        "reference" => Ok(t),
        "reference_no_crosstalk" => Ok(t.without_crosstalk()),
        "ideal_resonant" => Ok(DiamondCouplings {
            j_2: (0.75f64).sqrt() * t.j_z,
            j_x: 0.0,
            j_4: 0.0,
            delta: 0.0,
            ..t
        }),
        _ => Err(Error::Config(format!("unknown parameter preset `{name}`"))),
    }
}

pub(crate) fn deserialize_couplings<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<DiamondCouplings, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Preset(String),
        Explicit(DiamondCouplings),
    }
    match Raw::deserialize(d)? {
        Raw::Preset(name) => named_couplings(&name).map_err(serde::de::Error::custom),
        Raw::Explicit(c) => Ok(c),
    }
}

fn default_grid() -> TimeGrid {
    TimeGrid {
        t0: 0.0,
        t1: units::from_us(1.5),
        n_points: 3000,
    }
}

fn default_couplings() -> DiamondCouplings {
    DiamondCouplings::reference()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let d = SolverOptions::default();
        Tolerances { rtol: d.rtol, atol: d.atol }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub model: Model,
    pub gate: Gate,
    #[serde(default = "default_initial_left")]
    pub initial_left: InitialLeft,
    #[serde(default = "default_grid")]
    pub grid: TimeGrid,
    #[serde(default = "default_couplings", deserialize_with = "deserialize_couplings")]
    pub params: DiamondCouplings,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub solver: Tolerances,
}

fn default_initial_left() -> InitialLeft {
    InitialLeft::Lattice
}

impl Scenario {
    /// Reference device parameters, the full lattice and the default 1.5 μs grid.
    pub fn new(name: impl Into<String>, model: Model, gate: Gate) -> Self {
        Scenario {
            name: name.into(),
            model,
            gate,
            initial_left: InitialLeft::Lattice,
            grid: default_grid(),
            params: DiamondCouplings::reference(),
            noise: if model.is_noisy() { NoiseConfig::reference() } else { NoiseConfig::default() },
            solver: Tolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.params.validate()?;
        self.initial_left.validate()?;
        NoiseConfig::new(self.noise.gamma)?;
        if !(self.solver.rtol > 0.0 && self.solver.atol > 0.0) {
            return Err(Error::Config("solver tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions::default().with_tolerances(self.solver.rtol, self.solver.atol)
    }
}

/// Pointwise min, mean and max over the sampled initial states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityBand {
    pub min: FidelityTrace,
    pub mean: FidelityTrace,
    pub max: FidelityTrace,
}

impl FidelityBand {
    pub fn from_traces(traces: &[&FidelityTrace], metadata: TraceMetadata) -> Result<Self> {
        let first = traces
            .first()
            .ok_or_else(|| Error::InvalidState("no traces to aggregate".into()))?;
        let n = first.len();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        let mut sum = vec![0.0; n];
        for tr in traces {
            if tr.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: tr.len() });
            }
            for (i, &f) in tr.fidelities.iter().enumerate() {
                lo[i] = lo[i].min(f);
                hi[i] = hi[i].max(f);
                sum[i] += f;
            }
        }
        let mean = sum.iter().map(|s| s / traces.len() as f64).collect();
        let with = |tag: &str| TraceMetadata {
            initial_state: tag.to_string(),
            ..metadata.clone()
        };
        Ok(FidelityBand {
            min: FidelityTrace::new(first.times.clone(), lo, with("band_min"))?,
            mean: FidelityTrace::new(first.times.clone(), mean, with("band_mean"))?,
            max: FidelityTrace::new(first.times.clone(), hi, with("band_max"))?,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.mean.times
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledTrace {
    pub r: f64,
    pub theta: f64,
    pub trace: FidelityTrace,
}

/// Worst conservation-law violation seen over the run. For pure runs
/// `norm` is the largest |‖ψ‖ − 1|; for dephasing runs it is the largest
/// |Tr ρ − 1| over all sampled states.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    pub norm: f64,
    /// Largest |⟨ψ_A|ψ_B⟩| (pure) or ‖ρ − ρ†‖ (mixed).
    pub orthogonality: f64,
    /// Most negative eigenvalue of any final density matrix, 0 for pure runs.
    pub min_eigenvalue: f64,
}

impl Drift {
    pub fn worst(&self) -> f64 {
        self.norm.max(self.orthogonality).max(-self.min_eigenvalue)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario: Scenario,
    pub samples: Vec<SampledTrace>,
    pub band: FidelityBand,
    pub drift: Drift,
    /// Dimension of the invariant subspace that was integrated.
    pub subspace_dim: usize,
    #[serde(skip)]
    pub stats: Vec<SolverStats>,
}

impl ScenarioResult {
    pub fn trace(&self, r: f64, theta: f64) -> Option<&FidelityTrace> {
        self.samples
            .iter()
            .find(|s| (s.r - r).abs() < 1e-12 && (s.theta - theta).abs() < 1e-12)
            .map(|s| &s.trace)
    }

    /// Worst-case peak over initial states, and the spread between the best
    /// and worst per-state peaks.
    pub fn peak_spread(&self) -> f64 {
        let peaks: Vec<f64> = self.samples.iter().filter_map(|s| s.trace.peak()).map(|p| p.value).collect();
        let hi = peaks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = peaks.iter().copied().fold(f64::INFINITY, f64::min);
        hi - lo
    }
}

/// The two register states whose span contains every sampled initial
/// state, the matching targets, and an invariant subspace containing them.
struct Frame {
    subspace: Subspace,
    inputs: [nalgebra::DVector<C64>; 2],
    targets: [nalgebra::DVector<C64>; 2],
}

fn frame(scenario: &Scenario, h: &HarmonicHamiltonian) -> Result<Frame> {
    let g = gate_state(scenario.gate.setting());
    let full = |s: QuantumState| s.as_pure().expect("pure product state").clone();
    let a = full(register_state(&up(), &g, &down()));
    let b = full(register_state(&down(), &g, &down()));
    let (ta, tb) = match scenario.gate {
        Gate::Closed => (a.clone(), b.clone()),
        Gate::Open => {
            let mut ta = nalgebra::DVector::zeros(DIM);
            let mut tb = nalgebra::DVector::zeros(DIM);
            ta[parse_label("dddu")?] = C64::from(1.0);
            tb[parse_label("dddd")?] = C64::from(-1.0);
            (ta, tb)
        }
    };
    let mut sectors: Vec<i32> = [&a, &b]
        .iter()
        .flat_map(|v| v.iter().enumerate().filter(|(_, x)| x.norm() > 0.0).map(|(i, _)| sigma_z_total(i)))
        .collect();
    sectors.sort_unstable();
    sectors.dedup();
    let mut subspace = Subspace::from_sectors(&sectors.iter().map(|s| s / 2).collect::<Vec<_>>())?;
    if h.leakage_out_of(subspace.indices()) > 0.0 {
        subspace = Subspace::full();
    }
    let pick = |v: &nalgebra::DVector<C64>| nalgebra::DVector::from_iterator(subspace.dim(), subspace.indices().iter().map(|&i| v[i]));
    Ok(Frame {
        inputs: [pick(&a), pick(&b)],
        targets: [pick(&ta), pick(&tb)],
        subspace,
    })
}

fn coefficients(r: f64, theta: f64) -> [C64; 2] {
    let s = 1.0 / (1.0 + r * r).sqrt();
    [C64::from(s), C64::from_polar(r * s, theta)]
}

/// Runs a scenario. Every sampled state lies in the span of two fixed
/// register states and has a target that is the same combination of two
/// fixed targets, so only two columns (pure) or three operators |a⟩⟨b|
/// (dephasing) are integrated and the sampled fidelities follow by
/// linearity.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioResult> {
    run_inner(scenario).map_err(|e| e.in_scenario(&scenario.name))
}

fn run_inner(scenario: &Scenario) -> Result<ScenarioResult> {
    scenario.validate()?;
    let h_full = scenario.model.hamiltonian(&scenario.params);
    let fr = frame(scenario, &h_full)?;
    let h = h_full.restrict(fr.subspace.indices());
    let times = scenario.grid.points();
    let opts = scenario.solver_options();
    let points = scenario.initial_left.points();

    let (fidelities, drift, stats) = if scenario.model.is_noisy() {
        run_mixed(scenario, &h, &fr, &times, &opts, &points)?
    } else {
        run_pure(&h, &fr, &times, &opts, &points)?
    };

    let meta = |tag: String| TraceMetadata {
        scenario: scenario.name.clone(),
        initial_state: tag,
        gate: scenario.gate.label().to_string(),
        model: scenario.model.label().to_string(),
    };
    let samples = points
        .iter()
        .zip(fidelities)
        .map(|(&(r, theta), f)| {
            Ok(SampledTrace {
                r,
                theta,
                trace: FidelityTrace::new(times.clone(), f, meta(format!("r={r},theta={theta}")))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&FidelityTrace> = samples.iter().map(|s| &s.trace).collect();
    let band = FidelityBand::from_traces(&refs, meta(String::new()))?;
    Ok(ScenarioResult {
        scenario: scenario.clone(),
        samples,
        band,
        drift,
        subspace_dim: fr.subspace.dim(),
        stats,
    })
}

type Runs = (Vec<Vec<f64>>, Drift, Vec<SolverStats>);

fn run_pure(h: &HarmonicHamiltonian, fr: &Frame, times: &[f64], opts: &SolverOptions, points: &[(f64, f64)]) -> Result<Runs> {
    let n = fr.subspace.dim();
    let mut y0 = DMatrix::zeros(n, 2);
    y0.set_column(0, &fr.inputs[0]);
    y0.set_column(1, &fr.inputs[1]);
    // overlaps[t][x][y] = ⟨T_x|ψ_y(t)⟩
    let mut overlaps = Vec::with_capacity(times.len());
    let mut drift = Drift::default();
    let stats = evolve_columns(h, y0, times, opts, |_, _, y| {
        let mut m = [[C64::from(0.0); 2]; 2];
        for (x, tx) in fr.targets.iter().enumerate() {
            for (c, row) in m[x].iter_mut().enumerate() {
                *row = tx.dotc(&y.column(c));
            }
        }
        overlaps.push(m);
        for c in 0..2 {
            drift.norm = drift.norm.max((y.column(c).norm() - 1.0).abs());
        }
        drift.orthogonality = drift.orthogonality.max(y.column(0).dotc(&y.column(1)).norm());
    })?;
    let fidelities = points
        .iter()
        .map(|&(r, theta)| {
            let c = coefficients(r, theta);
            overlaps
                .iter()
                .map(|m| {
                    let mut amp = C64::from(0.0);
                    for x in 0..2 {
                        for y in 0..2 {
                            amp += c[x].conj() * c[y] * m[x][y];
                        }
                    }
                    amp.norm_sqr()
                })
                .collect()
        })
        .collect();
    Ok((fidelities, drift, vec![stats]))
}

fn run_mixed(
    scenario: &Scenario,
    h: &HarmonicHamiltonian,
    fr: &Frame,
    times: &[f64],
    opts: &SolverOptions,
    points: &[(f64, f64)],
) -> Result<Runs> {
    let outer = |a: &nalgebra::DVector<C64>, b: &nalgebra::DVector<C64>| a * b.adjoint();
    let pairs = [(0usize, 0usize), (1, 1), (0, 1)];
    struct Run {
        // blocks[t][x][w] = ⟨T_x|E(t)|T_w⟩
        blocks: Vec<[[C64; 2]; 2]>,
        norm: f64,
        hermiticity: f64,
        last: DMatrix<C64>,
        stats: SolverStats,
    }
    let runs: Vec<Run> = pairs
        .par_iter()
        .map(|&(p, q)| {
            let e0 = outer(&fr.inputs[p], &fr.inputs[q]);
            let expect_trace = if p == q { 1.0 } else { 0.0 };
            let mut run = Run {
                blocks: Vec::with_capacity(times.len()),
                norm: 0.0,
                hermiticity: 0.0,
                last: e0.clone(),
                stats: SolverStats::default(),
            };
            run.stats = evolve_lindblad_in(h, &fr.subspace, e0, &scenario.noise, times, opts, |i, _, e| {
                let mut m = [[C64::from(0.0); 2]; 2];
                for (x, tx) in fr.targets.iter().enumerate() {
                    let etx = e.adjoint() * tx;
                    for (w, tw) in fr.targets.iter().enumerate() {
                        // ⟨T_x|E|T_w⟩ = conj(⟨T_w|E†|T_x⟩)
                        m[x][w] = tw.dotc(&etx).conj();
                    }
                }
                run.blocks.push(m);
                run.norm = run.norm.max((e.trace() - C64::from(expect_trace)).norm());
                if p == q {
                    run.hermiticity = run.hermiticity.max((e - e.adjoint()).camax());
                }
                if i + 1 == times.len() {
                    run.last = e.clone();
                }
            })?;
            Ok(run)
        })
        .collect::<Result<Vec<_>>>()?;
    let (aa, bb, ab) = (&runs[0], &runs[1], &runs[2]);
    let mut drift = Drift {
        norm: runs.iter().map(|r| r.norm).fold(0.0, f64::max),
        orthogonality: aa.hermiticity.max(bb.hermiticity),
        min_eigenvalue: 0.0,
    };
    let fidelities = points
        .iter()
        .map(|&(r, theta)| {
            let c = coefficients(r, theta);
            let rho = |t: usize, x: usize, w: usize| {
                // ρ = Σ c_y c̄_z E_yz with E_ba = E_ab†.
                let ba = ab.blocks[t][w][x].conj();
                c[0].norm_sqr() * aa.blocks[t][x][w]
                    + c[1].norm_sqr() * bb.blocks[t][x][w]
                    + c[0] * c[1].conj() * ab.blocks[t][x][w]
                    + c[1] * c[0].conj() * ba
            };
            (0..times.len())
                .map(|t| {
                    let mut f = C64::from(0.0);
                    for x in 0..2 {
                        for w in 0..2 {
                            f += c[x].conj() * c[w] * rho(t, x, w);
                        }
                    }
                    f.re
                })
                .collect()
        })
        .collect();
    for &(r, theta) in points {
        let c = coefficients(r, theta);
        let rho = &aa.last * C64::from(c[0].norm_sqr())
            + &bb.last * C64::from(c[1].norm_sqr())
            + &ab.last * (c[0] * c[1].conj())
            + ab.last.adjoint() * (c[1] * c[0].conj());
        let herm = (&rho + rho.adjoint()) * C64::from(0.5);
        let lowest = herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        drift.min_eigenvalue = drift.min_eigenvalue.min(lowest);
    }
    Ok((fidelities, drift, runs.iter().map(|r| r.stats).collect()))
}

//! Experiment files: TOML with a fixed schema. Unknown keys are rejected at
//! parse time; everything else is checked by [`Experiment::from_raw`], which
//! reports all problems at once.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use fluxqmc_core::pimc::PimcConfig;
use fluxqmc_core::stoquastic::DEFAULT_TOL;
use fluxqmc_core::{ChargingConvention, CircuitSpec, FluxGrid, Inductive, Junction};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    EdOnly,
    PimcFlux,
    PimcTim,
    Project,
    Stoqcheck,
    Figure3,
    Figure4,
    ConvergenceSweep,
}

impl Pipeline {
    const ALL: [Pipeline; 8] = [
        Pipeline::EdOnly,
        Pipeline::PimcFlux,
        Pipeline::PimcTim,
        Pipeline::Project,
        Pipeline::Stoqcheck,
        Pipeline::Figure3,
        Pipeline::Figure4,
        Pipeline::ConvergenceSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pipeline::EdOnly => "ed_only",
            Pipeline::PimcFlux => "pimc_flux",
            Pipeline::PimcTim => "pimc_tim",
            Pipeline::Project => "project",
            Pipeline::Stoqcheck => "stoqcheck",
            Pipeline::Figure3 => "figure3",
            Pipeline::Figure4 => "figure4",
            Pipeline::ConvergenceSweep => "convergence_sweep",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }

    fn needs_temperature(self) -> bool {
        !matches!(self, Pipeline::Project | Pipeline::Stoqcheck)
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

// ---------------------------------------------------------------- raw schema

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub pipeline: Option<String>,
    pub temperature_ghz: Option<f64>,
    pub low_temperature_ghz: Option<f64>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub circuit: Option<RawCircuit>,
    #[serde(default)]
    pub pimc: RawPimc,
    #[serde(default)]
    pub ed: RawEd,
    pub sweep: Option<RawSweep>,
    #[serde(default)]
    pub stoqcheck: RawStoq,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCircuit {
    pub n_qubits: Option<usize>,
    pub capacitance_ff: Option<Vec<Vec<f64>>>,
    pub charging_ghz: Option<Vec<f64>>,
    pub coupling_ff: Option<Vec<Vec<f64>>>,
    pub charging_convention: Option<ChargingConvention>,
    pub inductance_nh: Option<Vec<Vec<f64>>>,
    pub inductive_energy_ghz: Option<Vec<Vec<f64>>>,
    pub junctions: Option<Vec<RawJunction>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawJunction {
    pub ej_ghz: Option<f64>,
    pub phi_cjj_pi: Option<f64>,
    pub phi_q_pi: Option<f64>,
    pub tilt_over_2pi: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPimc {
    pub trotter_m: Option<usize>,
    pub total_iterations: Option<u64>,
    pub equilibration_iterations: Option<u64>,
    pub sample_stride: Option<u64>,
    pub local_update_prob: Option<f64>,
    pub shift_halfwidth: Option<f64>,
    pub n_chains: Option<usize>,
    pub m_values: Option<Vec<usize>>,
    pub low_temperature_slice_factor: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEd {
    pub half_width: Option<f64>,
    pub points_per_dim: Option<usize>,
    pub n_states: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    pub kind: Option<String>,
    pub values: Option<Vec<f64>>,
    pub engine: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawStoq {
    pub tol: Option<f64>,
    pub model: Option<String>,
}

// ----------------------------------------------------------- resolved schema

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum CapacitanceInput {
    Matrix {
        capacitance_ff: Vec<Vec<f64>>,
    },
    Charging {
        charging_ghz: Vec<f64>,
        coupling_ff: Vec<Vec<f64>>,
        charging_convention: ChargingConvention,
    },
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum InductiveInput {
    Inductance { inductance_nh: Vec<Vec<f64>> },
    Energy { inductive_energy_ghz: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, Serialize)]
pub struct JunctionConfig {
    pub ej_ghz: f64,
    pub phi_cjj_pi: f64,
    pub phi_q_pi: f64,
    pub tilt_over_2pi: f64,
}

impl JunctionConfig {
    pub fn junction(&self) -> Junction {
        Junction {
            ej_ghz: self.ej_ghz,
            phi_cjj: self.phi_cjj_pi * PI,
            phi_q: self.phi_q_pi * PI + 2.0 * PI * self.tilt_over_2pi,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CircuitConfig {
    pub n_qubits: usize,
    #[serde(flatten)]
    pub capacitance: CapacitanceInput,
    #[serde(flatten)]
    pub inductive: InductiveInput,
    pub junctions: Vec<JunctionConfig>,
}

impl CircuitConfig {
    pub fn spec(&self) -> fluxqmc_core::Result<CircuitSpec> {
        let inductive = match &self.inductive {
            InductiveInput::Inductance { inductance_nh } => Inductive::InductanceNh(matrix(inductance_nh)),
            InductiveInput::Energy { inductive_energy_ghz } => {
                Inductive::EnergyGhz(matrix(inductive_energy_ghz))
            }
        };
        let junctions = self.junctions.iter().map(JunctionConfig::junction).collect();
        match &self.capacitance {
            CapacitanceInput::Matrix { capacitance_ff } => {
                CircuitSpec::new(matrix(capacitance_ff), inductive, junctions)
            }
            CapacitanceInput::Charging {
                charging_ghz,
                coupling_ff,
                charging_convention,
            } => CircuitSpec::from_charging_energy(
                charging_ghz,
                &matrix(coupling_ff),
                *charging_convention,
                inductive,
                junctions,
            ),
        }
    }

    /// Same circuit with every off-diagonal coupling capacitance set to `cc`.
    pub fn with_coupling(&self, cc: f64) -> Option<CircuitConfig> {
        let mut out = self.clone();
        match &mut out.capacitance {
            CapacitanceInput::Charging { coupling_ff, .. } => {
                for (i, row) in coupling_ff.iter_mut().enumerate() {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = if i == j { 0.0 } else { cc };
                    }
                }
                Some(out)
            }
            CapacitanceInput::Matrix { .. } => None,
        }
    }
}

fn matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(n, m, |i, j| rows[i][j])
}

#[derive(Clone, Debug, Serialize)]
pub struct PimcSettings {
    pub trotter_m: usize,
    pub total_iterations: u64,
    pub equilibration_iterations: u64,
    pub sample_stride: u64,
    pub local_update_prob: f64,
    pub shift_halfwidth: f64,
    pub n_chains: usize,
    pub m_values: Vec<usize>,
    pub low_temperature_slice_factor: usize,
}

impl PimcSettings {
    pub fn config(&self, beta_tilde: f64, trotter_m: usize, seed: u64) -> PimcConfig {
        PimcConfig {
            beta_tilde,
            trotter_m,
            total_iterations: self.total_iterations,
            equilibration_iterations: self.equilibration_iterations,
            sample_stride: self.sample_stride,
            local_update_prob: self.local_update_prob,
            shift_halfwidth: self.shift_halfwidth,
            rng_seed: seed,
            n_chains: self.n_chains,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EdSettings {
    pub half_width: f64,
    pub points_per_dim: usize,
    pub n_states: usize,
}

impl EdSettings {
    pub fn grid(&self, n_dims: usize) -> fluxqmc_core::Result<FluxGrid> {
        FluxGrid::new(n_dims, self.half_width, self.points_per_dim)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    TrotterM,
    CouplingFf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Flux,
    Tim,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSettings {
    pub kind: SweepKind,
    pub values: Vec<f64>,
    pub engine: Engine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StoqModel {
    WellBasis,
    EnergyBasis,
    Tim,
}

#[derive(Clone, Debug, Serialize)]
pub struct StoqSettings {
    pub tol: f64,
    pub model: StoqModel,
}

/// Fully resolved experiment: every default filled in. This is what gets
/// echoed into `results.json` (minus the output directory).
#[derive(Clone, Debug, Serialize)]
pub struct Experiment {
    pub pipeline: Pipeline,
    pub temperature_ghz: Option<f64>,
    pub low_temperature_ghz: Option<f64>,
    pub seed: u64,
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub circuit: CircuitConfig,
    pub pimc: PimcSettings,
    pub ed: EdSettings,
    pub sweep: Option<SweepSettings>,
    pub stoqcheck: StoqSettings,
}

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TROTTER_M: usize = 50;
pub const DEFAULT_M_VALUES: [usize; 8] = [4, 6, 8, 12, 16, 24, 32, 50];
pub const DEFAULT_SLICE_FACTOR: usize = 3;
pub const DEFAULT_N_STATES: usize = 6;

/// Command-line overrides, applied before validation.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub n_chains: Option<usize>,
    pub pipeline: Option<Pipeline>,
}

pub fn load(path: &Path, overrides: &Overrides) -> Result<Experiment, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(vec![format!("{}: {e}", path.display())]))?;
    parse(&text, overrides)
}

pub fn parse(text: &str, overrides: &Overrides) -> Result<Experiment, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(vec![e.to_string()]))?;
    Experiment::from_raw(raw, overrides).map_err(CliError::Config)
}

fn square(rows: &[Vec<f64>], n: usize, key: &str, out: &mut Vec<String>) -> bool {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        out.push(format!("circuit.{key}: expected a {n}x{n} matrix"));
        return false;
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        out.push(format!("circuit.{key}: entries must be finite"));
        return false;
    }
    true
}

fn circuit(raw: Option<RawCircuit>, out: &mut Vec<String>) -> Option<CircuitConfig> {
    let Some(raw) = raw else {
        out.push("circuit: missing section".into());
        return None;
    };
    let Some(n) = raw.n_qubits.filter(|&n| n > 0) else {
        out.push("circuit.n_qubits: missing or zero".into());
        return None;
    };
    let start = out.len();

    let capacitance = match (raw.capacitance_ff, raw.charging_ghz, raw.coupling_ff) {
        (Some(c), None, None) => square(&c, n, "capacitance_ff", out)
            .then_some(CapacitanceInput::Matrix { capacitance_ff: c }),
        (None, Some(e), coupling) => {
            let coupling = coupling.unwrap_or_else(|| vec![vec![0.0; n]; n]);
            let mut ok = square(&coupling, n, "coupling_ff", out);
            if e.len() != n {
                out.push(format!("circuit.charging_ghz: expected {n} entries, found {}", e.len()));
                ok = false;
            }
            for (i, row) in coupling.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    if *v < 0.0 {
                        out.push(format!("circuit.coupling_ff[{i}][{j}]: must be non-negative, got {v}"));
                        ok = false;
                    }
                    if i == j && *v != 0.0 {
                        out.push(format!("circuit.coupling_ff[{i}][{i}]: diagonal must be zero"));
                        ok = false;
                    }
                    if ok && coupling[j][i] != *v {
                        out.push("circuit.coupling_ff: must be symmetric".into());
                        ok = false;
                    }
                }
            }
            ok.then(|| CapacitanceInput::Charging {
                charging_ghz: e,
                coupling_ff: coupling,
                charging_convention: raw
                    .charging_convention
                    .unwrap_or(ChargingConvention::TotalDiagonal),
            })
        }
        (None, None, _) => {
            out.push("circuit: give either capacitance_ff or charging_ghz".into());
            None
        }
        _ => {
            out.push("circuit: capacitance_ff excludes charging_ghz and coupling_ff".into());
            None
        }
    };

    let inductive = match (raw.inductance_nh, raw.inductive_energy_ghz) {
        (Some(l), None) => {
            square(&l, n, "inductance_nh", out).then_some(InductiveInput::Inductance { inductance_nh: l })
        }
        (None, Some(l)) => square(&l, n, "inductive_energy_ghz", out)
            .then_some(InductiveInput::Energy { inductive_energy_ghz: l }),
        (None, None) => {
            out.push("circuit: give either inductance_nh or inductive_energy_ghz".into());
            None
        }
        _ => {
            out.push("circuit: inductance_nh and inductive_energy_ghz are exclusive".into());
            None
        }
    };

    let raw_junctions = raw.junctions.unwrap_or_default();
    if raw_junctions.len() != n {
        out.push(format!(
            "circuit.junctions: {} entries for n_qubits = {n}",
            raw_junctions.len()
        ));
    }
    let mut junctions = Vec::new();
    for (k, j) in raw_junctions.into_iter().enumerate() {
        let mut need = |v: Option<f64>, key: &str| {
            if v.is_none() {
                out.push(format!("circuit.junctions[{k}].{key}: missing"));
            }
            v.unwrap_or(f64::NAN)
        };
        let ej_ghz = need(j.ej_ghz, "ej_ghz");
        let phi_cjj_pi = need(j.phi_cjj_pi, "phi_cjj_pi");
        junctions.push(JunctionConfig {
            ej_ghz,
            phi_cjj_pi,
            phi_q_pi: j.phi_q_pi.unwrap_or(1.0),
            tilt_over_2pi: j.tilt_over_2pi.unwrap_or(0.0),
        });
    }

    if out.len() > start {
        return None;
    }
    let config = CircuitConfig {
        n_qubits: n,
        capacitance: capacitance?,
        inductive: inductive?,
        junctions,
    };
    match config.spec() {
        Ok(_) => Some(config),
        Err(fluxqmc_core::Error::InvalidCircuit(msg)) => {
            out.extend(msg.split("; ").map(|m| format!("circuit: {m}")));
            None
        }
        Err(e) => {
            out.push(format!("circuit: {e}"));
            None
        }
    }
}

impl Experiment {
    /// Resolves defaults and checks every field. On failure, returns the
    /// full list of problems.
    pub fn from_raw(raw: RawConfig, ov: &Overrides) -> Result<Experiment, Vec<String>> {
        let mut out = Vec::new();

        let pipeline = match (ov.pipeline, raw.pipeline.as_deref()) {
            (Some(p), _) => Some(p),
            (None, Some(s)) => {
                let p = Pipeline::parse(s);
                if p.is_none() {
                    let names: Vec<_> = Pipeline::ALL.iter().map(|p| p.name()).collect();
                    out.push(format!("pipeline: unknown '{s}', expected one of {}", names.join(", ")));
                }
                p
            }
            (None, None) => {
                out.push("pipeline: missing".into());
                None
            }
        };

        let positive = |v: Option<f64>, key: &str, out: &mut Vec<String>| {
            if let Some(t) = v {
                if !(t > 0.0 && t.is_finite()) {
                    out.push(format!("{key}: must be positive, got {t}"));
                }
            }
        };
        positive(raw.temperature_ghz, "temperature_ghz", &mut out);
        positive(raw.low_temperature_ghz, "low_temperature_ghz", &mut out);
        if raw.temperature_ghz.is_none() && pipeline.is_some_and(Pipeline::needs_temperature) {
            out.push("temperature_ghz: missing".into());
        }
        if pipeline == Some(Pipeline::Figure4) && raw.low_temperature_ghz.is_none() {
            out.push("low_temperature_ghz: missing (required by figure4)".into());
        }

        let circuit = circuit(raw.circuit, &mut out);

        let p = raw.pimc;
        let pimc = PimcSettings {
            trotter_m: p.trotter_m.unwrap_or(DEFAULT_TROTTER_M),
            total_iterations: p.total_iterations.unwrap_or(PimcConfig::DEFAULT_TOTAL),
            equilibration_iterations: p
                .equilibration_iterations
                .unwrap_or(PimcConfig::DEFAULT_EQUILIBRATION),
            sample_stride: p.sample_stride.unwrap_or(PimcConfig::DEFAULT_STRIDE),
            local_update_prob: p.local_update_prob.unwrap_or(PimcConfig::DEFAULT_LOCAL_PROB),
            shift_halfwidth: p.shift_halfwidth.unwrap_or(PimcConfig::DEFAULT_HALFWIDTH),
            n_chains: ov.n_chains.or(p.n_chains).unwrap_or(1),
            m_values: p.m_values.unwrap_or_else(|| DEFAULT_M_VALUES.to_vec()),
            low_temperature_slice_factor: p.low_temperature_slice_factor.unwrap_or(DEFAULT_SLICE_FACTOR),
        };
        let probe = pimc.config(1.0, pimc.trotter_m, 0);
        out.extend(probe.violations().into_iter().map(|v| format!("pimc: {v}")));
        if pimc.m_values.is_empty() || pimc.m_values.iter().any(|&m| m < 2) {
            out.push("pimc.m_values: must be non-empty with every entry at least 2".into());
        }
        if pimc.low_temperature_slice_factor == 0 {
            out.push("pimc.low_temperature_slice_factor: must be at least 1".into());
        }

        let n_dims = circuit.as_ref().map_or(1, |c| c.n_qubits);
        let default_grid = FluxGrid::default_for(n_dims.clamp(1, 2)).expect("default grid");
        let ed = EdSettings {
            half_width: raw.ed.half_width.unwrap_or(default_grid.half_width),
            points_per_dim: raw.ed.points_per_dim.unwrap_or(default_grid.points_per_dim),
            n_states: raw.ed.n_states.unwrap_or(DEFAULT_N_STATES),
        };
        if let Err(e) = ed.grid(1) {
            out.push(format!("ed: {e}"));
        }
        if ed.n_states == 0 {
            out.push("ed.n_states: must be at least 1".into());
        }

        let sweep = raw.sweep.and_then(|s| {
            let kind = match s.kind.as_deref() {
                Some("trotter_m") => Some(SweepKind::TrotterM),
                Some("coupling_ff") => Some(SweepKind::CouplingFf),
                Some(k) => {
                    out.push(format!("sweep.kind: unknown '{k}', expected trotter_m or coupling_ff"));
                    None
                }
                None => {
                    out.push("sweep.kind: missing".into());
                    None
                }
            };
            let engine = match s.engine.as_deref() {
                None | Some("flux") => Some(Engine::Flux),
                Some("tim") => Some(Engine::Tim),
                Some(e) => {
                    out.push(format!("sweep.engine: unknown '{e}', expected flux or tim"));
                    None
                }
            };
            let values = s.values.unwrap_or_default();
            if values.is_empty() {
                out.push("sweep.values: missing or empty".into());
            }
            match kind {
                Some(SweepKind::TrotterM) if values.iter().any(|v| v.fract() != 0.0 || *v < 2.0) => {
                    out.push("sweep.values: Trotter numbers must be integers of at least 2".into())
                }
                Some(SweepKind::CouplingFf) if values.iter().any(|v| !(*v >= 0.0)) => {
                    out.push("sweep.values: coupling capacitances must be non-negative".into())
                }
                _ => {}
            }
            Some(SweepSettings {
                kind: kind?,
                values,
                engine: engine?,
            })
        });

        let stoqcheck = StoqSettings {
            tol: raw.stoqcheck.tol.unwrap_or(DEFAULT_TOL),
            model: match raw.stoqcheck.model.as_deref() {
                None | Some("well_basis") => StoqModel::WellBasis,
                Some("energy_basis") => StoqModel::EnergyBasis,
                Some("tim") => StoqModel::Tim,
                Some(m) => {
                    out.push(format!(
                        "stoqcheck.model: unknown '{m}', expected well_basis, energy_basis or tim"
                    ));
                    StoqModel::WellBasis
                }
            },
        };
        if !(stoqcheck.tol > 0.0) {
            out.push(format!("stoqcheck.tol: must be positive, got {}", stoqcheck.tol));
        }

        if let (Some(p), Some(c)) = (pipeline, &circuit) {
            let n = c.n_qubits;
            let two_only = match p {
                Pipeline::Project | Pipeline::Figure3 | Pipeline::Figure4 => true,
                Pipeline::Stoqcheck => stoqcheck.model != StoqModel::Tim,
                _ => false,
            };
            if two_only && n != 2 {
                out.push(format!("pipeline {p}: needs exactly two qubits, circuit has {n}"));
            }
            if p == Pipeline::EdOnly && n > 2 {
                out.push(format!("pipeline ed_only: grid diagonalization handles at most two qubits, circuit has {n}"));
            }
            if p == Pipeline::Stoqcheck
                && stoqcheck.model == StoqModel::EnergyBasis
                && c.junctions.iter().any(|j| j.phi_q_pi != 1.0 || j.tilt_over_2pi != 0.0)
            {
                out.push("stoqcheck.model: energy_basis needs every qubit at the symmetric point".into());
            }
            if p == Pipeline::ConvergenceSweep {
                match &sweep {
                    None if !out.iter().any(|m| m.starts_with("sweep")) => {
                        out.push("sweep: section required by convergence_sweep".into())
                    }
                    Some(s) if s.kind == SweepKind::CouplingFf => {
                        if n < 2 {
                            out.push("sweep.kind: coupling_ff needs at least two qubits".into());
                        }
                        if matches!(c.capacitance, CapacitanceInput::Matrix { .. }) {
                            out.push("sweep.kind: coupling_ff needs circuit.charging_ghz rather than capacitance_ff".into());
                        }
                    }
                    _ => {}
                }
            }
        }

        if !out.is_empty() {
            return Err(out);
        }
        Ok(Experiment {
            pipeline: pipeline.expect("checked"),
            temperature_ghz: raw.temperature_ghz,
            low_temperature_ghz: raw.low_temperature_ghz,
            seed: ov.seed.or(raw.seed).unwrap_or(DEFAULT_SEED),
            output_dir: ov
                .output_dir
                .clone()
                .or(raw.output_dir)
                .unwrap_or_else(|| PathBuf::from("results")),
            circuit: circuit.expect("checked"),
            pimc,
            ed,
            sweep,
            stoqcheck,
        })
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature_ghz.expect("temperature checked at load")
    }
}

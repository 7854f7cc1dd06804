//! The experiment pipelines. Each returns a JSON results block and a list of
//! tabular rows for the CSV and plot files.

use fluxqmc_core::pimc::{exact_thermal_energy, run_pimc_flux, run_pimc_tim, PathEnsembleStats};
use fluxqmc_core::spectral::thermal_average_energy;
use fluxqmc_core::{
    build_params, build_tim, check_stoquastic, project_symmetric_energy_basis, project_two_qubit,
    solve_spectrum, solve_thermal, FluxGrid, HamiltonianParams, QubitModel, Result, SpectralResult,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Engine, Experiment, Pipeline, StoqModel, SweepKind};

/// Rows used for single-qubit projections.
const SINGLE_QUBIT_POINTS: usize = 201;
const SINGLE_QUBIT_STATES: usize = 4;
const SEED_STEP: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub series: String,
    pub temperature_ghz: Option<f64>,
    pub m: Option<usize>,
    pub coupling_ff: Option<f64>,
    pub estimate: f64,
    pub std_error: Option<f64>,
    pub exact_reference: Option<f64>,
}

impl Row {
    fn pimc(series: &str, t: f64, m: usize, s: &PathEnsembleStats, exact: Option<f64>) -> Row {
        Row {
            series: series.into(),
            temperature_ghz: Some(t),
            m: Some(m),
            coupling_ff: None,
            estimate: s.mean_energy,
            std_error: Some(s.std_error),
            exact_reference: exact,
        }
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Value,
    pub rows: Vec<Row>,
}

pub fn run(exp: &Experiment) -> Result<Outcome> {
    let spec = exp.circuit.spec()?;
    let params = build_params(&spec)?;
    match exp.pipeline {
        Pipeline::EdOnly => ed_only(exp, &params),
        Pipeline::PimcFlux => pimc_flux(exp, &params),
        Pipeline::PimcTim => pimc_tim(exp, &params),
        Pipeline::Project => project(exp, &params),
        Pipeline::Stoqcheck => stoqcheck(exp, &params),
        Pipeline::Figure3 => figure3(exp, &params),
        Pipeline::Figure4 => figure4(exp, &params),
        Pipeline::ConvergenceSweep => convergence_sweep(exp, &params),
    }
}

fn point_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add(SEED_STEP.wrapping_mul(i as u64))
}

fn single_grid(exp: &Experiment) -> Result<FluxGrid> {
    FluxGrid::new(1, exp.ed.half_width, exp.ed.points_per_dim.max(SINGLE_QUBIT_POINTS))
}

fn ed_thermal(exp: &Experiment, params: &HamiltonianParams, beta: f64) -> Result<(SpectralResult, f64)> {
    solve_thermal(params, &exp.ed.grid(params.n())?, beta)
}

/// Circuit thermal energy, when the circuit is small enough for the grid.
fn ed_reference(exp: &Experiment, params: &HamiltonianParams, beta: f64) -> Result<Option<f64>> {
    if params.n() > 2 {
        return Ok(None);
    }
    Ok(Some(ed_thermal(exp, params, beta)?.1))
}

fn untransformed_singles(exp: &Experiment, params: &HamiltonianParams) -> Result<Vec<SpectralResult>> {
    let grid = single_grid(exp)?;
    (0..params.n())
        .map(|k| solve_spectrum(&params.qubit(k, true), &grid, SINGLE_QUBIT_STATES))
        .collect()
}

fn tim_model(exp: &Experiment, params: &HamiltonianParams) -> Result<QubitModel> {
    let t = params.canonical_transform(params.default_ec0())?;
    let grid = single_grid(exp)?;
    let singles = (0..t.n())
        .map(|k| solve_spectrum(&t.qubit(k, true), &grid, SINGLE_QUBIT_STATES))
        .collect::<Result<Vec<_>>>()?;
    build_tim(&singles, &t)
}

fn well_model(exp: &Experiment, params: &HamiltonianParams) -> Result<QubitModel> {
    let q = untransformed_singles(exp, params)?;
    let tilts = params.tilts();
    project_two_qubit(&q[0], &q[1], params.ec[(0, 1)], params.el[(0, 1)], [tilts[0], tilts[1]])
}

fn energy_model(exp: &Experiment, params: &HamiltonianParams) -> Result<QubitModel> {
    let q = untransformed_singles(exp, params)?;
    project_symmetric_energy_basis(&q[0], &q[1], params.ec[(0, 1)], params.el[(0, 1)])
}

fn flux_sweep(
    exp: &Experiment,
    params: &HamiltonianParams,
    beta: f64,
    ms: &[usize],
    seed_offset: usize,
) -> Result<Vec<PathEnsembleStats>> {
    ms.par_iter()
        .enumerate()
        .map(|(i, &m)| {
            let cfg = exp.pimc.config(beta, m, point_seed(exp.seed, seed_offset + i));
            run_pimc_flux(params, &cfg)
        })
        .collect()
}

fn tim_sweep(
    exp: &Experiment,
    model: &QubitModel,
    beta: f64,
    ms: &[usize],
    seed_offset: usize,
) -> Result<Vec<PathEnsembleStats>> {
    ms.par_iter()
        .enumerate()
        .map(|(i, &m)| {
            let cfg = exp.pimc.config(beta, m, point_seed(exp.seed, seed_offset + i));
            run_pimc_tim(model, &cfg)
        })
        .collect()
}

fn points(ms: &[usize], stats: &[PathEnsembleStats]) -> Value {
    ms.iter()
        .zip(stats)
        .map(|(m, s)| json!({ "trotter_m": m, "stats": s }))
        .collect()
}

fn ed_only(exp: &Experiment, params: &HamiltonianParams) -> Result<Outcome> {
    let beta = exp.beta();
    let grid = exp.ed.grid(params.n())?;
    let spec = solve_spectrum(params, &grid, exp.ed.n_states.min(grid.len()))?;
    let (_, thermal) = solve_thermal(params, &grid, beta)?;
    let e = &spec.energies;
    let mut results = json!({
        "ground_energy": spec.ground_energy(),
        "thermal_energy": thermal,
        "energies": e,
        "u_min": spec.u_min,
        "phi_min": spec.phi_min,
        "grid": grid,
    });
    if e.len() >= 3 {
        results["gap_10"] = json!(e[1] - e[0]);
        results["gap_20"] = json!(e[2] - e[0]);
        results["gap_21"] = json!(e[2] - e[1]);
    }
    if params.n() == 1 && params.is_parity_symmetric() && e.len() >= 2 {
        results["tunnel_splitting"] = json!(spec.tunnel_splitting());
    }
    Ok(Outcome {
        results,
        rows: vec![Row {
            series: "ed".into(),
            temperature_ghz: exp.temperature_ghz,
            m: None,
            coupling_ff: None,
            estimate: thermal,
            std_error: None,
            exact_reference: Some(thermal),
        }],
    })
}

fn pimc_flux(exp: &Experiment, params: &HamiltonianParams) -> Result<Outcome> {
    let beta = exp.beta();
    let t = exp.temperature_ghz.expect("checked");
    let exact = ed_reference(exp, params, beta)?;
    let m = exp.pimc.trotter_m;
    let stats = run_pimc_flux(params, &exp.pimc.config(beta, m, exp.seed))?;
    Ok(Outcome {
        results: json!({ "trotter_m": m, "stats": stats, "ed_thermal_energy": exact }),
        rows: vec![Row::pimc("flux", t, m, &stats, exact)],
    })
}

fn pimc_tim(exp: &Experiment, params: &HamiltonianParams) -> Result<Outcome> {
    let beta = exp.beta();
    let t = exp.temperature_ghz.expect("checked");
    let model = tim_model(exp, params)?;
    let tim_exact = exact_thermal_energy(&model, beta)?;
    let circuit_exact = ed_reference(exp, params, beta)?;
    let m = exp.pimc.trotter_m;
    let stats = run_pimc_tim(&model, &exp.pimc.config(beta, m, exp.seed))?;
    Ok(Outcome {
        results: json!({
            "model": model,
            "trotter_m": m,
            "stats": stats,
            "tim_exact_thermal_energy": tim_exact,
            "ed_thermal_energy": circuit_exact,
        }),
        rows: vec![Row::pimc("tim", t, m, &stats, Some(tim_exact))],
    })
}

fn project(exp: &Experiment, params: &HamiltonianParams) -> Result<Outcome> {
    let energy = if params.is_parity_symmetric() {
        Some(energy_model(exp, params)?)
    } else {
        None
    };
    Ok(Outcome {
        results: json!({
            "well_basis": well_model(exp, params)?,
            "energy_basis": energy,
            "tim": tim_model(exp, params)?,
        }),
        rows: Vec::new(),
    })
}

fn stoqcheck(exp: &Experiment, params: &HamiltonianParams) -> Result<Outcome> {
    let model = match exp.stoqcheck.model {
        StoqModel::WellBasis => well_model(exp, params)?,
        StoqModel::EnergyBasis => energy_model(exp, params)?,
        StoqModel::Tim => tim_model(exp, params)?,
    };
    let report = check_stoquastic(&model, exp.stoqcheck.tol)?;
    Ok(Outcome {
        results: json!({ "verdict": report.verdict, "model": model, "report": report }),
        rows: Vec::new(),
    })
}

fn figure3(exp: &Experiment, params: &HamiltonianParams) -> Result<Outcome> {
    let beta = exp.beta();
    let t = exp.temperature_ghz.expect("checked");
    let (ed, thermal) = ed_thermal(exp, params, beta)?;
    let model = tim_model(exp, params)?;
    let tim_exact = exact_thermal_energy(&model, beta)?;
    let ms = &exp.pimc.m_values;
    let flux = flux_sweep(exp, params, beta, ms, 0)?;
    let tim = tim_sweep(exp, &model, beta, ms, ms.len())?;
    let mut rows = Vec::new();
    rows.extend(ms.iter().zip(&flux).map(|(&m, s)| Row::pimc("flux", t, m, s, Some(thermal))));
    rows.extend(ms.iter().zip(&tim).map(|(&m, s)| Row::pimc("tim", t, m, s, Some(thermal))));
    Ok(Outcome {
        results: json!({
            "ground_energy": ed.ground_energy(),
            "ed_thermal_energy": thermal,
            "tim_model": model,
            "tim_exact_thermal_energy": tim_exact,
            "flux": points(ms, &flux),
            "tim": points(ms, &tim),
        }),
        rows,
    })
}

fn figure4(exp: &Experiment, params: &HamiltonianParams) -> Result<Outcome> {
    let beta = exp.beta();
    let t = exp.temperature_ghz.expect("checked");
    let t_low = exp.low_temperature_ghz.expect("checked");
    let (ed, thermal) = ed_thermal(exp, params, beta)?;
    let thermal_low = match thermal_average_energy(&ed, 1.0 / t_low) {
        Ok(e) => e,
        Err(_) => ed_thermal(exp, params, 1.0 / t_low)?.1,
    };
    let verdict = check_stoquastic(&well_model(exp, params)?, exp.stoqcheck.tol)?.verdict;
    let ms = &exp.pimc.m_values;
    let ms_low: Vec<usize> = ms.iter().map(|m| m * exp.pimc.low_temperature_slice_factor).collect();
    let hi = flux_sweep(exp, params, beta, ms, 0)?;
    let lo = flux_sweep(exp, params, 1.0 / t_low, &ms_low, ms.len())?;
    let mut rows = Vec::new();
    rows.extend(ms.iter().zip(&hi).map(|(&m, s)| Row::pimc("flux", t, m, s, Some(thermal))));
    rows.extend(ms_low.iter().zip(&lo).map(|(&m, s)| Row::pimc("flux_low_t", t_low, m, s, Some(thermal_low))));
    let g = ed.ground_energy();
    Ok(Outcome {
        results: json!({
            "ground_energy": g,
            "ed_thermal_energy": thermal,
            "ed_thermal_energy_low_t": thermal_low,
            "low_t_relative_to_ground": (thermal_low - g) / g,
            "well_basis_verdict": verdict,
            "flux": points(ms, &hi),
            "flux_low_t": points(&ms_low, &lo),
        }),
        rows,
    })
}

fn convergence_sweep(exp: &Experiment, params: &HamiltonianParams) -> Result<Outcome> {
    let sweep = exp.sweep.as_ref().expect("checked");
    match sweep.kind {
        SweepKind::TrotterM => {
            let beta = exp.beta();
            let t = exp.temperature_ghz.expect("checked");
            let ms: Vec<usize> = sweep.values.iter().map(|&v| v as usize).collect();
            let (series, stats, exact, model) = match sweep.engine {
                Engine::Flux => ("flux", flux_sweep(exp, params, beta, &ms, 0)?, ed_reference(exp, params, beta)?, None),
                Engine::Tim => {
                    let model = tim_model(exp, params)?;
                    let exact = exact_thermal_energy(&model, beta)?;
                    ("tim", tim_sweep(exp, &model, beta, &ms, 0)?, Some(exact), Some(model))
                }
            };
            let rows = ms.iter().zip(&stats).map(|(&m, s)| Row::pimc(series, t, m, s, exact)).collect();
            Ok(Outcome {
                results: json!({ "engine": sweep.engine, "exact_reference": exact, "tim_model": model, "points": points(&ms, &stats) }),
                rows,
            })
        }
        SweepKind::CouplingFf => {
            let models = sweep
                .values
                .par_iter()
                .map(|&cc| {
                    let circuit = exp.circuit.with_coupling(cc).expect("checked");
                    let p = build_params(&circuit.spec()?)?;
                    Ok((cc, p.ec[(0, 1)], tim_model(exp, &p)?))
                })
                .collect::<Result<Vec<_>>>()?;
            let rows = models
                .iter()
                .map(|(cc, _, m)| Row {
                    series: "j_zz_01".into(),
                    temperature_ghz: None,
                    m: None,
                    coupling_ff: Some(*cc),
                    estimate: m.zz(0, 1),
                    std_error: None,
                    exact_reference: None,
                })
                .collect();
            let pts: Value = models
                .iter()
                .map(|(cc, ec12, m)| json!({ "coupling_ff": cc, "ec12": ec12, "tim_model": m }))
                .collect();
            Ok(Outcome {
                results: json!({ "points": pts }),
                rows,
            })
        }
    }
}

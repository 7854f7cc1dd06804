//! Circuit descriptions, dimensionless Hamiltonian parameters and the
//! symplectic rescaling that removes capacitive couplings.
//!
//! The Hamiltonian handled here is
//!
//! ```text
//! H/h = 4 qᵀ E_C q + ½ φᵀ E_L φ − Σ_k E_Jk^eff cos((S φ)_k + φ_qk^x)
//! ```
//!
//! with `S = 1` until [`HamiltonianParams::canonical_transform`] is applied.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::units::{CHARGING_GHZ_FF, INDUCTIVE_GHZ_NH};

/// One compound-junction flux qubit loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Junction {
    /// Bare Josephson energy `E_J/h` in GHz.
    pub ej_ghz: f64,
    /// Flux through the CJJ loop, radians.
    pub phi_cjj: f64,
    /// Flux through the main qubit loop, radians.
    pub phi_q: f64,
}

impl Junction {
    pub fn effective_ej(&self) -> f64 {
        self.ej_ghz * (self.phi_cjj / 2.0).cos()
    }
}

/// Inductive part of a circuit, either as physical inductances or directly
/// as an energy matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inductive {
    InductanceNh(#[serde(with = "crate::serde_matrix")] DMatrix<f64>),
    EnergyGhz(#[serde(with = "crate::serde_matrix")] DMatrix<f64>),
}

impl Inductive {
    fn matrix(&self) -> &DMatrix<f64> {
        match self {
            Inductive::InductanceNh(m) | Inductive::EnergyGhz(m) => m,
        }
    }
}

/// How a target charging energy is turned into qubit capacitances when
/// coupling capacitors are present.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChargingConvention {
    /// The diagonal of the full `E_C` matrix (coupling capacitors included)
    /// equals the target.
    TotalDiagonal,
    /// The target is `e²/2C_k` of the bare qubit capacitor; coupling
    /// capacitors are added on top.
    QubitOnly,
}

/// Physical circuit: capacitances in fF, inductances in nH (or `E_L/h` in
/// GHz), one junction record per qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub n_qubits: usize,
    #[serde(with = "crate::serde_matrix")]
    pub capacitance_ff: DMatrix<f64>,
    pub inductive: Inductive,
    pub junctions: Vec<Junction>,
}

impl CircuitSpec {
    pub fn new(
        capacitance_ff: DMatrix<f64>,
        inductive: Inductive,
        junctions: Vec<Junction>,
    ) -> Result<Self> {
        let spec = CircuitSpec {
            n_qubits: junctions.len(),
            capacitance_ff,
            inductive,
            junctions,
        };
        let violations = spec.violations();
        if violations.is_empty() {
            Ok(spec)
        } else {
            Err(Error::InvalidCircuit(violations.join("; ")))
        }
    }

    /// Builds the capacitance matrix from a target charging energy per qubit
    /// and a symmetric matrix of coupling capacitances (zero diagonal).
    pub fn from_charging_energy(
        charging_ghz: &[f64],
        coupling_ff: &DMatrix<f64>,
        convention: ChargingConvention,
        inductive: Inductive,
        junctions: Vec<Junction>,
    ) -> Result<Self> {
        let n = charging_ghz.len();
        if coupling_ff.nrows() != n || coupling_ff.ncols() != n {
            return Err(Error::InvalidCircuit(format!(
                "coupling matrix is {}x{}, expected {n}x{n}",
                coupling_ff.nrows(),
                coupling_ff.ncols()
            )));
        }
        if charging_ghz.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(Error::InvalidCircuit(
                "charging energies must be positive".into(),
            ));
        }
        let coupling_sum: Vec<f64> = (0..n)
            .map(|k| (0..n).filter(|&l| l != k).map(|l| coupling_ff[(k, l)]).sum())
            .collect();
        let assemble = |qubit_c: &[f64]| {
            DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    qubit_c[i] + coupling_sum[i]
                } else {
                    -coupling_ff[(i, j)]
                }
            })
        };
        let mut qubit_c: Vec<f64> = charging_ghz.iter().map(|e| CHARGING_GHZ_FF / e).collect();
        if convention == ChargingConvention::TotalDiagonal {
            // Fixed-point iteration on the total diagonal capacitance.
            let mut total: Vec<f64> = qubit_c.iter().zip(&coupling_sum).map(|(c, s)| c + s).collect();
            for _ in 0..500 {
                let c = assemble(
                    &total
                        .iter()
                        .zip(&coupling_sum)
                        .map(|(t, s)| t - s)
                        .collect::<Vec<_>>(),
                );
                let inv = linalg::sym_inverse(&c, "capacitance")?;
                let mut change: f64 = 0.0;
                for k in 0..n {
                    let ec = CHARGING_GHZ_FF * inv[(k, k)];
                    let next = total[k] * ec / charging_ghz[k];
                    change = change.max(((next - total[k]) / total[k]).abs());
                    total[k] = next;
                }
                if change < 1e-15 {
                    break;
                }
            }
            qubit_c = total.iter().zip(&coupling_sum).map(|(t, s)| t - s).collect();
            if qubit_c.iter().any(|&c| c <= 0.0) {
                return Err(Error::InvalidCircuit(
                    "coupling capacitance too large for the requested charging energy".into(),
                ));
            }
        }
        CircuitSpec::new(assemble(&qubit_c), inductive, junctions)
    }

    /// Lists every invariant violation without stopping at the first one.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.n_qubits;
        if n == 0 {
            out.push("n_qubits must be positive".into());
        }
        if self.junctions.len() != n {
            out.push(format!(
                "expected {n} junction records, found {}",
                self.junctions.len()
            ));
        }
        let c = &self.capacitance_ff;
        if c.nrows() != n || c.ncols() != n {
            out.push(format!(
                "capacitance matrix is {}x{}, expected {n}x{n}",
                c.nrows(),
                c.ncols()
            ));
        } else {
            for i in 0..n {
                if !(c[(i, i)] > 0.0) {
                    out.push(format!("capacitance[{i}][{i}] = {} must be positive", c[(i, i)]));
                }
                for j in 0..n {
                    if i != j && c[(i, j)] > 0.0 {
                        out.push(format!(
                            "capacitance[{i}][{j}] = {} must be non-positive",
                            c[(i, j)]
                        ));
                    }
                }
            }
            if n > 0 {
                if let Err(e) = linalg::check_spd(c, "capacitance") {
                    out.push(e.to_string());
                }
            }
        }
        let l = self.inductive.matrix();
        let name = match self.inductive {
            Inductive::InductanceNh(_) => "inductance",
            Inductive::EnergyGhz(_) => "inductive energy",
        };
        if l.nrows() != n || l.ncols() != n {
            out.push(format!(
                "{name} matrix is {}x{}, expected {n}x{n}",
                l.nrows(),
                l.ncols()
            ));
        } else if n > 0 {
            if let Err(e) = linalg::check_spd(l, name) {
                out.push(e.to_string());
            }
        }
        for (k, j) in self.junctions.iter().enumerate() {
            if !(j.ej_ghz >= 0.0 && j.ej_ghz.is_finite()) {
                out.push(format!("junction {k}: E_J must be non-negative, got {}", j.ej_ghz));
            }
            if !j.phi_cjj.is_finite() || !j.phi_q.is_finite() {
                out.push(format!("junction {k}: external fluxes must be finite"));
            }
        }
        out
    }
}

/// Dimensionless Hamiltonian parameters, all energies as `E/h` in GHz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianParams {
    #[serde(with = "crate::serde_matrix")]
    pub ec: DMatrix<f64>,
    #[serde(with = "crate::serde_matrix")]
    pub el: DMatrix<f64>,
    pub ej_eff: Vec<f64>,
    pub phi_q: Vec<f64>,
    #[serde(with = "crate::serde_matrix")]
    pub s: DMatrix<f64>,
    pub s_applied: bool,
}

/// A local minimum of the potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
}

const MINIMIZER_STARTS: usize = 32;
const MINIMIZER_ITERATIONS: usize = 20_000;
const MINIMIZER_TOL: f64 = 1e-10;

impl HamiltonianParams {
    /// Builds parameters directly from energy matrices (`S = 1`).
    pub fn new(
        ec: DMatrix<f64>,
        el: DMatrix<f64>,
        ej_eff: Vec<f64>,
        phi_q: Vec<f64>,
    ) -> Result<Self> {
        let n = ej_eff.len();
        if ec.shape() != (n, n) || el.shape() != (n, n) || phi_q.len() != n {
            return Err(Error::InvalidArgument(format!(
                "dimension mismatch: E_C {:?}, E_L {:?}, {} junctions, {} biases",
                ec.shape(),
                el.shape(),
                n,
                phi_q.len()
            )));
        }
        linalg::check_spd(&ec, "charging energy")?;
        linalg::check_spd(&el, "inductive energy")?;
        Ok(HamiltonianParams {
            ec,
            el,
            ej_eff,
            phi_q,
            s: DMatrix::identity(n, n),
            s_applied: false,
        })
    }

    pub fn n(&self) -> usize {
        self.ej_eff.len()
    }

    /// Mean of the `E_C` diagonal, the default rescaling energy.
    pub fn default_ec0(&self) -> f64 {
        self.ec.diagonal().mean()
    }

    /// Rescales charges by `S = (E_C/E_C0)^{1/2}` and fluxes by `S⁻¹`, which
    /// makes the kinetic term diagonal: `E_C → E_C0·1`, `E_L → S E_L S`.
    pub fn canonical_transform(&self, ec0: f64) -> Result<Self> {
        if self.s_applied {
            return Err(Error::InvalidArgument(
                "canonical transformation already applied".into(),
            ));
        }
        if !(ec0 > 0.0 && ec0.is_finite()) {
            return Err(Error::InvalidArgument(format!("E_C0 must be positive, got {ec0}")));
        }
        let s = linalg::sym_sqrt(&(&self.ec / ec0), "charging energy")?;
        let el = linalg::symmetrize(&(s.transpose() * &self.el * &s));
        let n = self.n();
        Ok(HamiltonianParams {
            ec: DMatrix::identity(n, n) * ec0,
            el,
            ej_eff: self.ej_eff.clone(),
            phi_q: self.phi_q.clone(),
            s,
            s_applied: true,
        })
    }

    /// `E_C0` of a transformed parameter set.
    pub fn ec0(&self) -> Option<f64> {
        self.s_applied.then(|| self.ec[(0, 0)])
    }

    /// `U(φ)/h` in GHz.
    pub fn potential(&self, phi: &[f64]) -> f64 {
        let n = self.n();
        let mut u = 0.0;
        for i in 0..n {
            let row: f64 = (0..n).map(|j| self.el[(i, j)] * phi[j]).sum();
            u += 0.5 * phi[i] * row;
        }
        for k in 0..n {
            let arg: f64 = (0..n).map(|l| self.s[(k, l)] * phi[l]).sum::<f64>() + self.phi_q[k];
            u -= self.ej_eff[k] * arg.cos();
        }
        u
    }

    /// Potential and its gradient; `grad` must have length `n`.
    pub fn potential_and_gradient(&self, phi: &[f64], grad: &mut [f64]) -> f64 {
        let n = self.n();
        let mut u = 0.0;
        for i in 0..n {
            let row: f64 = (0..n).map(|j| self.el[(i, j)] * phi[j]).sum();
            grad[i] = row;
            u += 0.5 * phi[i] * row;
        }
        for k in 0..n {
            let arg: f64 = (0..n).map(|l| self.s[(k, l)] * phi[l]).sum::<f64>() + self.phi_q[k];
            let (sin, cos) = arg.sin_cos();
            u -= self.ej_eff[k] * cos;
            for l in 0..n {
                grad[l] += self.ej_eff[k] * sin * self.s[(k, l)];
            }
        }
        u
    }

    pub fn gradient(&self, phi: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.n()];
        self.potential_and_gradient(phi, &mut g);
        g
    }

    /// True when every loop is biased at the symmetric point `φ_q = π` and no
    /// rescaling is in force, so `U(−φ) = U(φ)`.
    pub fn is_parity_symmetric(&self) -> bool {
        !self.s_applied && self.phi_q.iter().all(|&p| is_pi(p))
    }

    /// Flux-bias offsets `δ_q = φ_q − π`.
    pub fn tilts(&self) -> Vec<f64> {
        self.phi_q.iter().map(|p| p - PI).collect()
    }

    /// The uncoupled single-qubit Hamiltonian of loop `k`: diagonal `E_C`,
    /// `E_L` and `S` entries, optionally re-biased to the symmetric point.
    pub fn qubit(&self, k: usize, symmetric: bool) -> HamiltonianParams {
        let one = |v: f64| DMatrix::from_element(1, 1, v);
        HamiltonianParams {
            ec: one(self.ec[(k, k)]),
            el: one(self.el[(k, k)]),
            ej_eff: vec![self.ej_eff[k]],
            phi_q: vec![if symmetric { PI } else { self.phi_q[k] }],
            s: one(self.s[(k, k)]),
            s_applied: self.s_applied,
        }
    }

    /// Same parameters with the flux biases replaced.
    pub fn with_phi_q(&self, phi_q: Vec<f64>) -> HamiltonianParams {
        HamiltonianParams {
            phi_q,
            ..self.clone()
        }
    }

    /// Global minimum of the potential.
    pub fn potential_minimum(&self) -> Result<Minimum> {
        let minima = self.potential_minima()?;
        Ok(minima.into_iter().next().expect("at least one minimum"))
    }

    /// Distinct local minima found by multi-start descent, lowest first.
    pub fn potential_minima(&self) -> Result<Vec<Minimum>> {
        let starts = self.start_points();
        minimize_multistart(
            |x: &[f64], g: &mut [f64]| self.potential_and_gradient(x, g),
            &starts,
        )
    }

    /// Start lattice: products of the per-qubit well positions, padded with
    /// deterministic offsets up to the fixed start budget.
    fn start_points(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let wells: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                one_dimensional_wells(
                    self.el[(k, k)],
                    self.ej_eff[k],
                    self.s[(k, k)],
                    self.phi_q[k],
                )
            })
            .collect();
        lattice_starts(&wells, MINIMIZER_STARTS)
    }
}

pub(crate) fn is_pi(p: f64) -> bool {
    (p - PI).abs() < 1e-12
}

/// Local minima of `½ el φ² − ej cos(s φ + φ_q)` by a fine scan.
pub(crate) fn one_dimensional_wells(el: f64, ej: f64, s: f64, phi_q: f64) -> Vec<f64> {
    let reach = if el > 0.0 { (ej.abs() * s.abs() / el).max(0.0) + 1.0 } else { 2.0 * PI };
    let points = 4001;
    let f = |x: f64| 0.5 * el * x * x - ej * (s * x + phi_q).cos();
    let xs: Vec<f64> = (0..points)
        .map(|i| -reach + 2.0 * reach * i as f64 / (points - 1) as f64)
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut wells: Vec<f64> = (1..points - 1)
        .filter(|&i| vals[i] <= vals[i - 1] && vals[i] < vals[i + 1])
        .map(|i| xs[i])
        .collect();
    if wells.is_empty() {
        wells.push(0.0);
    }
    wells
}

pub(crate) fn lattice_starts(wells: &[Vec<f64>], budget: usize) -> Vec<Vec<f64>> {
    let n = wells.len();
    let mut starts: Vec<Vec<f64>> = vec![vec![]];
    for w in wells {
        starts = starts
            .into_iter()
            .flat_map(|prefix| {
                w.iter().map(move |&x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
        if starts.len() > budget {
            starts.truncate(budget);
        }
    }
    // Deterministic padding around the lattice points.
    let base = starts.clone();
    let mut i = 0usize;
    while starts.len() < budget && n > 0 {
        let p = &base[i % base.len()];
        let round = (i / base.len()) as f64 + 1.0;
        let shifted: Vec<f64> = p
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let phase = ((i * 7 + k * 13) % 17) as f64 / 17.0 - 0.5;
                x + 0.3 * round * phase
            })
            .collect();
        starts.push(shifted);
        i += 1;
    }
    starts
}

/// Gradient descent with Barzilai–Borwein trial steps and Armijo
/// backtracking. Returns `(point, value, converged, iterations)`.
pub(crate) fn descend<F>(f: &F, start: &[f64]) -> (Vec<f64>, f64, bool, usize)
where
    F: Fn(&[f64], &mut [f64]) -> f64,
{
    let n = start.len();
    let mut x = start.to_vec();
    let mut g = vec![0.0; n];
    let mut fx = f(&x, &mut g);
    let mut step = 1e-3;
    let mut trial = vec![0.0; n];
    let mut g_trial = vec![0.0; n];
    let mut small_changes = 0;
    for it in 0..MINIMIZER_ITERATIONS {
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm < 1e-9 {
            return (x, fx, true, it);
        }
        let mut t = step;
        let accepted = loop {
            for i in 0..n {
                trial[i] = x[i] - t * g[i];
            }
            let ft = f(&trial, &mut g_trial);
            if ft <= fx - 1e-4 * t * gnorm * gnorm {
                break Some(ft);
            }
            t *= 0.5;
            if t < 1e-20 {
                break None;
            }
        };
        let Some(ft) = accepted else {
            // No descent possible at machine precision: stationary.
            return (x, fx, true, it);
        };
        // BB1 step for the next iteration.
        let mut sy = 0.0;
        let mut ss = 0.0;
        for i in 0..n {
            let s = trial[i] - x[i];
            let y = g_trial[i] - g[i];
            sy += s * y;
            ss += s * s;
        }
        step = if sy > 0.0 { (ss / sy).clamp(1e-8, 1.0) } else { (2.0 * t).min(1.0) };
        let change = fx - ft;
        x.copy_from_slice(&trial);
        g.copy_from_slice(&g_trial);
        fx = ft;
        if change < MINIMIZER_TOL {
            small_changes += 1;
            if small_changes >= 5 {
                return (x, fx, true, it);
            }
        } else {
            small_changes = 0;
        }
    }
    (x, fx, false, MINIMIZER_ITERATIONS)
}

pub(crate) fn minimize_multistart<F>(f: F, starts: &[Vec<f64>]) -> Result<Vec<Minimum>>
where
    F: Fn(&[f64], &mut [f64]) -> f64,
{
    let mut found: Vec<Minimum> = Vec::new();
    let mut best_failed: Option<(Vec<f64>, f64)> = None;
    for s in starts {
        let (x, v, ok, _) = descend(&f, s);
        if !ok {
            if best_failed.as_ref().is_none_or(|b| v < b.1) {
                best_failed = Some((x, v));
            }
            continue;
        }
        let dup = found.iter().any(|m| {
            m.point
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt()
                < 1e-4
        });
        if !dup {
            found.push(Minimum { point: x, value: v });
        }
    }
    found.sort_by(|a, b| a.value.total_cmp(&b.value));
    match (found.first(), best_failed) {
        (None, Some((x, v))) => Err(Error::MinimizationFailed {
            iterations: MINIMIZER_ITERATIONS,
            best_point: x,
            best_value: v,
        }),
        (Some(m), Some((x, v))) if v < m.value - 1e-6 => Err(Error::MinimizationFailed {
            iterations: MINIMIZER_ITERATIONS,
            best_point: x,
            best_value: v,
        }),
        (None, None) => Err(Error::InvalidArgument("no start points".into())),
        _ => Ok(found),
    }
}

/// Converts a circuit into dimensionless energies (`S = 1`).
pub fn build_params(spec: &CircuitSpec) -> Result<HamiltonianParams> {
    let violations = spec.violations();
    if !violations.is_empty() {
        return Err(Error::InvalidCircuit(violations.join("; ")));
    }
    let ec = linalg::sym_inverse(&spec.capacitance_ff, "capacitance")? * CHARGING_GHZ_FF;
    let el = match &spec.inductive {
        Inductive::InductanceNh(l) => linalg::sym_inverse(l, "inductance")? * INDUCTIVE_GHZ_NH,
        Inductive::EnergyGhz(e) => e.clone(),
    };
    let ej_eff = spec.junctions.iter().map(Junction::effective_ej).collect();
    let phi_q = spec.junctions.iter().map(|j| j.phi_q).collect();
    HamiltonianParams::new(ec, el, ej_eff, phi_q)
}

/// Numerical gradient helper used by tests across the crate.
#[doc(hidden)]
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> DVector<f64> {
    let mut out = DVector::zeros(x.len());
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        xp[i] = x[i] + h;
        let fp = f(&xp);
        xp[i] = x[i] - h;
        let fm = f(&xp);
        xp[i] = x[i];
        out[i] = (fp - fm) / (2.0 * h);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_one_junction(phi_q: f64) -> Junction {
        Junction {
            ej_ghz: 1600.0,
            phi_cjj: 0.685550 * PI,
            phi_q,
        }
    }

    fn two_qubit(coupling_ff: f64) -> CircuitSpec {
        let cc = DMatrix::from_row_slice(2, 2, &[0.0, coupling_ff, coupling_ff, 0.0]);
        CircuitSpec::from_charging_energy(
            &[0.124, 0.124],
            &cc,
            ChargingConvention::TotalDiagonal,
            Inductive::EnergyGhz(DMatrix::identity(2, 2) * 704.0),
            vec![table_one_junction(PI), table_one_junction(PI)],
        )
        .unwrap()
    }

    #[test]
    fn effective_josephson_energy() {
        let j = table_one_junction(PI);
        // Table value is quoted to two significant figures.
        assert!((j.effective_ej() - 760.0).abs() / 760.0 < 0.005, "{}", j.effective_ej());
        let off = Junction { phi_cjj: PI, ..j };
        assert!(off.effective_ej().abs() < 1e-12);
    }

    #[test]
    fn coupling_energies_match_reported_values() {
        let p = build_params(&two_qubit(10.0)).unwrap();
        assert!((p.ec[(0, 0)] - 0.124).abs() < 1e-12);
        assert!((p.ec[(0, 1)] - 0.008).abs() < 0.0005, "{}", p.ec[(0, 1)]);
        let p = build_params(&two_qubit(104.0)).unwrap();
        assert!((p.ec[(0, 1)] - 0.062).abs() < 0.0005, "{}", p.ec[(0, 1)]);
    }

    #[test]
    fn qubit_only_convention_adds_coupling_to_diagonal() {
        let cc = DMatrix::from_row_slice(2, 2, &[0.0, 10.0, 10.0, 0.0]);
        let spec = CircuitSpec::from_charging_energy(
            &[0.124, 0.124],
            &cc,
            ChargingConvention::QubitOnly,
            Inductive::EnergyGhz(DMatrix::identity(2, 2) * 704.0),
            vec![table_one_junction(PI), table_one_junction(PI)],
        )
        .unwrap();
        let c1 = CHARGING_GHZ_FF / 0.124;
        assert!((spec.capacitance_ff[(0, 0)] - (c1 + 10.0)).abs() < 1e-9);
        let p = build_params(&spec).unwrap();
        assert!((p.ec[(0, 1)] - 0.00704).abs() < 1e-4, "{}", p.ec[(0, 1)]);
    }

    #[test]
    fn charging_matrix_is_entrywise_nonnegative() {
        let p = build_params(&two_qubit(50.0)).unwrap();
        assert!(p.ec.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn rejects_singular_capacitance() {
        let spec = CircuitSpec {
            n_qubits: 2,
            capacitance_ff: DMatrix::from_row_slice(2, 2, &[10.0, -10.0, -10.0, 10.0]),
            inductive: Inductive::InductanceNh(DMatrix::identity(2, 2)),
            junctions: vec![table_one_junction(PI); 2],
        };
        let err = build_params(&spec).unwrap_err().to_string();
        assert!(err.contains("capacitance"), "{err}");
    }

    #[test]
    fn rejects_indefinite_inductance() {
        let spec = CircuitSpec {
            n_qubits: 2,
            capacitance_ff: DMatrix::identity(2, 2) * 100.0,
            inductive: Inductive::InductanceNh(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])),
            junctions: vec![table_one_junction(PI); 2],
        };
        let err = build_params(&spec).unwrap_err().to_string();
        assert!(err.contains("inductance"), "{err}");
    }

    #[test]
    fn inductance_in_nanohenry() {
        let l = INDUCTIVE_GHZ_NH / 704.0;
        let spec = CircuitSpec::new(
            DMatrix::from_element(1, 1, CHARGING_GHZ_FF / 0.124),
            Inductive::InductanceNh(DMatrix::from_element(1, 1, l)),
            vec![table_one_junction(PI)],
        )
        .unwrap();
        let p = build_params(&spec).unwrap();
        assert!((p.el[(0, 0)] - 704.0).abs() < 1e-9);
        assert!((p.ec[(0, 0)] - 0.124).abs() < 1e-12);
    }

    #[test]
    fn identity_transform_is_noop() {
        let p = HamiltonianParams::new(
            DMatrix::identity(2, 2) * 0.124,
            DMatrix::identity(2, 2) * 704.0,
            vec![758.0, 758.0],
            vec![PI, PI],
        )
        .unwrap();
        let t = p.canonical_transform(0.124).unwrap();
        assert!((&t.s - DMatrix::identity(2, 2)).amax() < 1e-14);
        assert!((&t.el - &p.el).amax() < 1e-10);
        assert!(t.s_applied);
        assert!(t.canonical_transform(0.124).is_err());
    }

    #[test]
    fn small_coupling_square_root_first_order() {
        let delta = 1e-4;
        let p = HamiltonianParams::new(
            DMatrix::from_row_slice(2, 2, &[0.124, delta, delta, 0.124]),
            DMatrix::identity(2, 2) * 704.0,
            vec![0.0, 0.0],
            vec![0.0, 0.0],
        )
        .unwrap();
        let t = p.canonical_transform(0.124).unwrap();
        let first_order = delta / (2.0 * 0.124);
        assert!((t.s[(0, 1)] - first_order).abs() / first_order < 1e-3);
        // Against an independent dense eigendecomposition.
        let eig = nalgebra::SymmetricEigen::new(&p.ec / 0.124);
        let root = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
            * eig.eigenvectors.transpose();
        assert!((&root - &t.s).amax() < 1e-14);
    }

    #[test]
    fn transformed_energies() {
        let p = build_params(&two_qubit(104.0)).unwrap();
        let ec0 = p.default_ec0();
        let t = p.canonical_transform(ec0).unwrap();
        let expected = t.s.transpose() * &p.el * &t.s;
        let scale = expected.amax();
        assert!((&t.el - &expected).amax() / scale < 1e-12);
        assert!((&t.ec - DMatrix::identity(2, 2) * ec0).amax() / ec0 < 1e-12);
        assert!((&t.s - t.s.transpose()).amax() < 1e-15);
        linalg::check_spd(&t.el, "transformed").unwrap();
    }

    #[test]
    fn potential_is_zero_for_pure_harmonic_origin() {
        let p = HamiltonianParams::new(
            DMatrix::identity(2, 2) * 0.124,
            DMatrix::identity(2, 2) * 704.0,
            vec![0.0, 0.0],
            vec![PI, PI],
        )
        .unwrap();
        assert_eq!(p.potential(&[0.0, 0.0]), 0.0);
        let m = p.potential_minimum().unwrap();
        assert!(m.value.abs() < 1e-10);
        assert!(m.point.iter().all(|x| x.abs() < 1e-5));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = build_params(&two_qubit(50.0)).unwrap().canonical_transform(0.124).unwrap();
        let p = p.with_phi_q(vec![PI + 0.01, PI - 0.02]);
        for x in [[0.3, -0.7], [-1.1, 0.2], [0.9, 1.4]] {
            let g = p.gradient(&x);
            let fd = central_difference(|y| p.potential(y), &x, 1e-5);
            for i in 0..2 {
                assert!((g[i] - fd[i]).abs() <= 1e-6 * g[i].abs().max(1.0), "{g:?} {fd:?}");
            }
        }
    }

    fn grid_scan_1d(p: &HamiltonianParams) -> (f64, f64) {
        let n = 600_001;
        (0..n)
            .map(|i| -3.0 + 6.0 * i as f64 / (n - 1) as f64)
            .map(|x| (x, p.potential(&[x])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
    }

    #[test]
    fn symmetric_double_well_minima() {
        let spec = CircuitSpec::new(
            DMatrix::from_element(1, 1, CHARGING_GHZ_FF / 0.124),
            Inductive::EnergyGhz(DMatrix::from_element(1, 1, 704.0)),
            vec![table_one_junction(PI)],
        )
        .unwrap();
        let p = build_params(&spec).unwrap();
        let minima = p.potential_minima().unwrap();
        assert_eq!(minima.len(), 2);
        assert!((minima[0].value - minima[1].value).abs() < 1e-9);
        assert!((minima[0].point[0] + minima[1].point[0]).abs() < 1e-5);
        let (_, scan) = grid_scan_1d(&p);
        assert!((minima[0].value - scan).abs() < 1e-6);
        // parity
        for x in [0.1, 0.5, 1.7] {
            assert!((p.potential(&[x]) - p.potential(&[-x])).abs() < 1e-9);
        }
    }

    #[test]
    fn tilted_well_selects_deeper_minimum() {
        let spec = CircuitSpec::new(
            DMatrix::from_element(1, 1, CHARGING_GHZ_FF / 0.124),
            Inductive::EnergyGhz(DMatrix::from_element(1, 1, 704.0)),
            vec![table_one_junction(PI + 0.01)],
        )
        .unwrap();
        let p = build_params(&spec).unwrap();
        let m = p.potential_minimum().unwrap();
        let (x, scan) = grid_scan_1d(&p);
        assert!((m.value - scan).abs() < 1e-6);
        assert!((m.point[0] - x).abs() < 1e-4);
        assert!(m.point[0] > 0.0);
    }

    #[test]
    fn violations_are_named() {
        let spec = CircuitSpec {
            n_qubits: 2,
            capacitance_ff: DMatrix::from_row_slice(2, 2, &[-5.0, 1.0, 1.0, 100.0]),
            inductive: Inductive::EnergyGhz(DMatrix::identity(2, 2)),
            junctions: vec![table_one_junction(PI)],
        };
        let v = spec.violations();
        assert!(v.iter().any(|s| s.contains("junction records")));
        assert!(v.iter().any(|s| s.contains("capacitance[0][0]")));
        assert!(v.iter().any(|s| s.contains("non-positive")));
    }
}

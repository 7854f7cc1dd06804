//! Exact diagonalization of the circuit Hamiltonian on a rectangular flux grid.
//!
//! `H/h = 4 Σ_kl E_C,kl q̂_k q̂_l + U(φ)` with `q̂_k = −i ∂/∂φ_k`. Diagonal
//! kinetic terms use the three-point second derivative, cross terms the
//! product of two central first derivatives, so the matrix is real symmetric.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{HamiltonianParams, Minimum};
use crate::eigen::{lowest_eigenpairs, StencilOperator};
use crate::error::{Error, Result};

/// Largest number of eigenpairs a single solve may request.
pub const MAX_STATES: usize = 64;
/// Minimum distance between any potential minimum and the grid edge.
pub const GRID_MARGIN: f64 = 1.0;
/// Relative Boltzmann weight of the highest retained level above which a
/// thermal average is rejected.
pub const TRUNCATION_WEIGHT: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluxGrid {
    pub n_dims: usize,
    pub half_width: f64,
    pub points_per_dim: usize,
}

impl FluxGrid {
    pub fn new(n_dims: usize, half_width: f64, points_per_dim: usize) -> Result<Self> {
        if points_per_dim < 16 {
            return Err(Error::InvalidArgument(format!(
                "points_per_dim must be at least 16, got {points_per_dim}"
            )));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "half-width must be positive, got {half_width}"
            )));
        }
        if !(1..=2).contains(&n_dims) {
            return Err(Error::InvalidArgument(format!(
                "grid diagonalization supports one or two fluxes, got {n_dims}"
            )));
        }
        Ok(FluxGrid {
            n_dims,
            half_width,
            points_per_dim,
        })
    }

    /// Half-width 3; 201 points for one flux, 141 per axis for two.
    pub fn default_for(n_dims: usize) -> Result<Self> {
        let points = if n_dims == 1 { 201 } else { 141 };
        FluxGrid::new(n_dims, 3.0, points)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points_per_dim - 1) as f64
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn len(&self) -> usize {
        self.points_per_dim.pow(self.n_dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Volume element `spacingᴺ`.
    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.n_dims as i32)
    }

    /// Coordinates of flat (row-major) point `i`.
    pub fn point(&self, mut i: usize, out: &mut [f64]) {
        let n = self.points_per_dim;
        for k in (0..self.n_dims).rev() {
            out[k] = self.coordinate(i % n);
            i /= n;
        }
    }

    /// Flat index of the point reflected through the origin.
    pub fn mirror(&self, i: usize) -> usize {
        self.len() - 1 - i
    }

    fn stride(&self, k: usize) -> usize {
        self.points_per_dim.pow((self.n_dims - 1 - k) as u32)
    }

    fn axis_index(&self, i: usize, k: usize) -> usize {
        (i / self.stride(k)) % self.points_per_dim
    }

    fn check_covers(&self, minima: &[Minimum]) -> Result<()> {
        for m in minima {
            let worst = m.point.iter().map(|x| x.abs()).fold(0.0, f64::max);
            if worst > self.half_width - GRID_MARGIN {
                return Err(Error::GridTooSmall {
                    minimum: m.point.clone(),
                    margin: GRID_MARGIN,
                    half_width: self.half_width,
                });
            }
        }
        Ok(())
    }
}

/// Grid operator kinds for [`SpectralResult::matrix_element`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "axis")]
pub enum Operator {
    Flux(usize),
    Charge(usize),
    /// `sin(S_kk φ_k)` with `S` from the solved parameters.
    SinScaledFlux(usize),
}

impl std::str::FromStr for Operator {
    type Err = Error;

    /// Parses `flux_k`, `charge_k` or `sin_scaled_flux_k`.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownOperator(s.to_string());
        let (name, axis) = s.rsplit_once('_').ok_or_else(unknown)?;
        let axis: usize = axis.parse().map_err(|_| unknown())?;
        match name {
            "flux" => Ok(Operator::Flux(axis)),
            "charge" => Ok(Operator::Charge(axis)),
            "sin_scaled_flux" => Ok(Operator::SinScaledFlux(axis)),
            _ => Err(unknown()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    /// Ascending, in GHz above `u_min`.
    pub energies: Vec<f64>,
    /// Grid wavefunctions normalized so that `Σ|ψ|²·cell = 1`; may be empty
    /// after a light-weight export.
    pub states: Vec<Vec<f64>>,
    pub grid: FluxGrid,
    pub n_converged: usize,
    pub u_min: f64,
    pub phi_min: Vec<f64>,
    pub params: HamiltonianParams,
}

fn stencil_operator(params: &HamiltonianParams, grid: &FluxGrid, with_potential: bool) -> StencilOperator {
    let n = params.n();
    let h = grid.spacing();
    let h2 = h * h;
    let kinetic_diag: f64 = (0..n).map(|k| 8.0 * params.ec[(k, k)] / h2).sum();
    let mut x = vec![0.0; n];
    let diag: Vec<f64> = (0..grid.len())
        .map(|i| {
            grid.point(i, &mut x);
            if with_potential {
                kinetic_diag + params.potential(&x)
            } else {
                kinetic_diag
            }
        })
        .collect();
    let mut stencil = Vec::new();
    let unit = |k: usize, s: isize| {
        let mut v = vec![0isize; n];
        v[k] = s;
        v
    };
    for k in 0..n {
        let c = -4.0 * params.ec[(k, k)] / h2;
        stencil.push((unit(k, 1), c));
        stencil.push((unit(k, -1), c));
        for l in k + 1..n {
            let e = params.ec[(k, l)];
            if e == 0.0 {
                continue;
            }
            for (sk, sl) in [(1isize, 1isize), (-1, -1), (1, -1), (-1, 1)] {
                let mut v = vec![0isize; n];
                v[k] = sk;
                v[l] = sl;
                let sign = if sk == sl { -1.0 } else { 1.0 };
                stencil.push((v, sign * 2.0 * e / h2));
            }
        }
    }
    StencilOperator::new(vec![grid.points_per_dim; n], diag, stencil)
}

/// Lowest `n_states` eigenpairs of `params` on `grid`.
pub fn solve_spectrum(
    params: &HamiltonianParams,
    grid: &FluxGrid,
    n_states: usize,
) -> Result<SpectralResult> {
    if grid.n_dims != params.n() {
        return Err(Error::InvalidArgument(format!(
            "grid has {} axes but the circuit has {} fluxes",
            grid.n_dims,
            params.n()
        )));
    }
    if n_states == 0 || n_states > MAX_STATES {
        return Err(Error::InvalidArgument(format!(
            "n_states must be in 1..={MAX_STATES}, got {n_states}"
        )));
    }
    let minima = params.potential_minima()?;
    grid.check_covers(&minima)?;
    let floor = &minima[0];
    let op = stencil_operator(params, grid, true);
    let pairs = lowest_eigenpairs(&op, n_states, floor.value - 1.0)?;
    let norm = grid.cell().sqrt().recip();
    let states = pairs
        .vectors
        .column_iter()
        .map(|c| {
            let mut v: Vec<f64> = c.iter().map(|x| x * norm).collect();
            fix_sign(&mut v);
            v
        })
        .collect();
    Ok(SpectralResult {
        energies: pairs.values.iter().map(|e| e - floor.value).collect(),
        states,
        grid: *grid,
        n_converged: n_states,
        u_min: floor.value,
        phi_min: floor.point.clone(),
        params: params.clone(),
    })
}

fn fix_sign(v: &mut [f64]) {
    let max = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-3 * max) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// `Σ E_n e^{−β̃E_n} / Σ e^{−β̃E_n}` over the retained levels.
pub fn thermal_average_energy(spec: &SpectralResult, beta_tilde: f64) -> Result<f64> {
    if !(beta_tilde > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "inverse temperature must be positive, got {beta_tilde}"
        )));
    }
    let e0 = spec.energies[0];
    let w: Vec<f64> = spec.energies.iter().map(|e| (-(e - e0) * beta_tilde).exp()).collect();
    let z: f64 = w.iter().sum();
    let last = *w.last().expect("non-empty spectrum") / z;
    if last >= TRUNCATION_WEIGHT {
        let top = spec.energies[spec.energies.len() - 1] - e0;
        let needed = (z / TRUNCATION_WEIGHT).ln() / beta_tilde;
        let ratio = (needed / top.max(f64::MIN_POSITIVE)).powi(spec.grid.n_dims as i32);
        return Err(Error::Truncated {
            weight: last,
            required: (spec.energies.len() as f64 * ratio).ceil() as usize,
        });
    }
    Ok(spec.energies.iter().zip(&w).map(|(e, w)| e * w).sum::<f64>() / z)
}

/// Solves with a growing number of states until the thermal average at
/// `beta_tilde` passes the truncation test.
pub fn solve_thermal(
    params: &HamiltonianParams,
    grid: &FluxGrid,
    beta_tilde: f64,
) -> Result<(SpectralResult, f64)> {
    let mut last_err = None;
    for n in [24, 40, MAX_STATES] {
        let n = n.min(grid.len());
        let spec = solve_spectrum(params, grid, n)?;
        match thermal_average_energy(&spec, beta_tilde) {
            Ok(e) => return Ok((spec, e)),
            Err(e @ Error::Truncated { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

impl SpectralResult {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// `E_1 − E_0`.
    pub fn tunnel_splitting(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }

    fn state(&self, i: usize) -> Result<&[f64]> {
        self.states.get(i).map(Vec::as_slice).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "state {i} not available ({} stored)",
                self.states.len()
            ))
        })
    }

    /// `⟨i|Ô|j⟩` between stored eigenstates.
    pub fn matrix_element(&self, op: Operator, i: usize, j: usize) -> Result<Complex64> {
        self.element_between(op, self.state(i)?, self.state(j)?)
    }

    /// `⟨a|Ô|b⟩` for arbitrary real grid functions.
    pub fn element_between(&self, op: Operator, a: &[f64], b: &[f64]) -> Result<Complex64> {
        let grid = &self.grid;
        let axis = match op {
            Operator::Flux(k) | Operator::Charge(k) | Operator::SinScaledFlux(k) => k,
        };
        if axis >= grid.n_dims {
            return Err(Error::UnknownOperator(format!("{op:?}: axis out of range")));
        }
        if a.len() != grid.len() || b.len() != grid.len() {
            return Err(Error::InvalidArgument("state length does not match grid".into()));
        }
        let cell = grid.cell();
        match op {
            Operator::Flux(k) => {
                let s: f64 = (0..grid.len())
                    .map(|i| a[i] * grid.coordinate(grid.axis_index(i, k)) * b[i])
                    .sum();
                Ok(Complex64::new(s * cell, 0.0))
            }
            Operator::SinScaledFlux(k) => {
                let skk = self.params.s[(k, k)];
                let s: f64 = (0..grid.len())
                    .map(|i| a[i] * (skk * grid.coordinate(grid.axis_index(i, k))).sin() * b[i])
                    .sum();
                Ok(Complex64::new(s * cell, 0.0))
            }
            Operator::Charge(k) => {
                let d = derivative(grid, b, k);
                let s: f64 = a.iter().zip(&d).map(|(x, y)| x * y).sum();
                // q̂ = −i ∂/∂φ
                Ok(Complex64::new(0.0, -s * cell))
            }
        }
    }

    /// `⟨n|K|n⟩` for the discretized kinetic operator.
    pub fn kinetic_expectation(&self, n: usize) -> Result<f64> {
        let psi = self.state(n)?;
        let kinetic = stencil_operator(&self.params, &self.grid, false);
        let mut y = vec![0.0; psi.len()];
        kinetic.apply(psi, &mut y);
        Ok(psi.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() * self.grid.cell())
    }

    /// `½⟨n|φ·∇U|n⟩`.
    pub fn virial_expectation(&self, n: usize) -> Result<f64> {
        let psi = self.state(n)?;
        let dims = self.grid.n_dims;
        let mut x = vec![0.0; dims];
        let mut g = vec![0.0; dims];
        let s: f64 = (0..psi.len())
            .map(|i| {
                self.grid.point(i, &mut x);
                self.params.potential_and_gradient(&x, &mut g);
                let v: f64 = x.iter().zip(&g).map(|(a, b)| a * b).sum();
                psi[i] * psi[i] * 0.5 * v
            })
            .sum();
        Ok(s * self.grid.cell())
    }

    /// Parity of stored state `n` (`+1` even, `−1` odd) together with the
    /// residual `‖ψ(φ) ∓ ψ(−φ)‖` (grid L² norm).
    pub fn parity(&self, n: usize) -> Result<(i8, f64)> {
        let psi = self.state(n)?;
        let cell = self.grid.cell();
        let norm = |sign: f64| {
            (0..psi.len())
                .map(|i| (psi[i] - sign * psi[self.grid.mirror(i)]).powi(2))
                .sum::<f64>()
                .sqrt()
                * cell.sqrt()
        };
        let (even, odd) = (norm(1.0), norm(-1.0));
        Ok(if even <= odd { (1, even) } else { (-1, odd) })
    }

    /// Well-localized states `|0⟩ = (|g⟩+|e⟩)/√2`, `|1⟩ = (|g⟩−|e⟩)/√2`,
    /// with `|0⟩` in the left well (`⟨0|φ̂|0⟩ < 0`).
    pub fn computational_basis(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.grid.n_dims != 1 {
            return Err(Error::NotParityPaired(
                "computational basis needs a single-qubit spectrum".into(),
            ));
        }
        let (pg, rg) = self.parity(0)?;
        let (pe, re) = self.parity(1)?;
        const PAIRING_TOL: f64 = 1e-6;
        if pg != 1 || pe != -1 || rg > PAIRING_TOL || re > PAIRING_TOL {
            return Err(Error::NotParityPaired(format!(
                "ground parity {pg:+} (residual {rg:.1e}), excited parity {pe:+} (residual {re:.1e})"
            )));
        }
        let g = self.state(0)?;
        let e = self.state(1)?;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut zero: Vec<f64> = g.iter().zip(e).map(|(a, b)| r * (a + b)).collect();
        let mut one: Vec<f64> = g.iter().zip(e).map(|(a, b)| r * (a - b)).collect();
        if self.element_between(Operator::Flux(0), &zero, &zero)?.re > 0.0 {
            std::mem::swap(&mut zero, &mut one);
        }
        Ok((zero, one))
    }

    /// Writes the result as JSON; wavefunctions are dropped unless requested.
    pub fn write_json(&self, path: &Path, include_states: bool) -> Result<()> {
        let out = if include_states {
            serde_json::to_string(self)
        } else {
            serde_json::to_string(&SpectralResult {
                states: Vec::new(),
                ..self.clone()
            })
        }
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        std::fs::write(path, out).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Central first derivative along `axis`, zero outside the grid.
fn derivative(grid: &FluxGrid, f: &[f64], axis: usize) -> Vec<f64> {
    let stride = grid.stride(axis);
    let n = grid.points_per_dim;
    let inv = 1.0 / (2.0 * grid.spacing());
    (0..f.len())
        .map(|i| {
            let j = grid.axis_index(i, axis);
            let up = if j + 1 < n { f[i + stride] } else { 0.0 };
            let down = if j > 0 { f[i - stride] } else { 0.0 };
            (up - down) * inv
        })
        .collect()
}

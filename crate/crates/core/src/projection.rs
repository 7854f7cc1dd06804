//! Effective qubit Hamiltonians from single-qubit spectra: lowest-order
//! projection of the coupled circuit, with or without the prior canonical
//! transformation.
//!
//! A [`QubitModel`] in the well basis reads
//!
//! ```text
//! H/h = offset − Σ_k (Δ_k/2 X_k + ε_k/2 Z_k) + Σ_(k,l) Σ_ij β_ij σ_i^(k) σ_j^(l)
//! ```
//!
//! and in the energy basis the roles of `X` and `Z` in the fields swap:
//! `−Δ_k/2 Z_k − ε_k/2 X_k`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::circuit::{self, is_pi, HamiltonianParams};
use crate::error::{Error, Result};
use crate::pauli;
use crate::spectral::{Operator, SpectralResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitBasis {
    /// `|0⟩, |1⟩` localized in the left and right wells.
    WellBasis,
    /// `|g⟩, |e⟩` single-qubit eigenstates.
    EnergyBasis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub pair: (usize, usize),
    /// `β_ij` for `σ_i^(k) σ_j^(l)`, indices `X, Y, Z`.
    pub beta: [[f64; 3]; 3],
}

impl Coupling {
    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.beta[i][j])
    }

    /// Numerical rank of `β`, singular values below `1e-12` of the largest
    /// counting as zero.
    pub fn rank(&self) -> usize {
        let sv = self.matrix().singular_values();
        let max = sv.max();
        if max == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > 1e-12 * max).count()
    }
}

/// Pauli coefficients of an effective N-qubit Hamiltonian, in GHz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitModel {
    pub n_qubits: usize,
    pub delta: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub couplings: Vec<Coupling>,
    pub basis: QubitBasis,
    /// Identity coefficient, measured from the minimum of the potential the
    /// model was projected from.
    pub offset: f64,
}

impl QubitModel {
    /// A transverse-field Ising model with couplings `J_kl Z_k Z_l`.
    pub fn tim(delta: Vec<f64>, epsilon: Vec<f64>, couplings: &[((usize, usize), f64)]) -> Self {
        QubitModel {
            n_qubits: delta.len(),
            delta,
            epsilon,
            couplings: couplings
                .iter()
                .map(|&(pair, j)| {
                    let mut beta = [[0.0; 3]; 3];
                    beta[2][2] = j;
                    Coupling { pair, beta }
                })
                .collect(),
            basis: QubitBasis::WellBasis,
            offset: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits;
        if self.delta.len() != n || self.epsilon.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{n} qubits but {} tunnel couplings and {} fields",
                self.delta.len(),
                self.epsilon.len()
            )));
        }
        for c in &self.couplings {
            let (k, l) = c.pair;
            if k >= n || l >= n || k == l {
                return Err(Error::InvalidArgument(format!("invalid coupling pair ({k}, {l})")));
            }
        }
        let finite = self.delta.iter().chain(&self.epsilon).all(|v| v.is_finite())
            && self.couplings.iter().flat_map(|c| c.beta.iter().flatten()).all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(())
    }

    /// True for a well-basis model whose couplings are pure `ZZ`.
    pub fn is_tim(&self) -> bool {
        self.basis == QubitBasis::WellBasis
            && self.couplings.iter().all(|c| {
                (0..3).all(|i| (0..3).all(|j| (i == 2 && j == 2) || c.beta[i][j] == 0.0))
            })
    }

    /// `J_kl` of a TIM coupling between `k` and `l`, zero if absent.
    pub fn zz(&self, k: usize, l: usize) -> f64 {
        self.couplings
            .iter()
            .filter(|c| c.pair == (k, l) || c.pair == (l, k))
            .map(|c| c.beta[2][2])
            .sum()
    }

    /// Single-qubit field vectors `(h_x, h_y, h_z)`.
    pub fn fields(&self) -> Vec<Vector3<f64>> {
        (0..self.n_qubits)
            .map(|k| {
                let (d, e) = (-0.5 * self.delta[k], -0.5 * self.epsilon[k]);
                match self.basis {
                    QubitBasis::WellBasis => Vector3::new(d, 0.0, e),
                    QubitBasis::EnergyBasis => Vector3::new(e, 0.0, d),
                }
            })
            .collect()
    }

    /// Dense `2ᴺ × 2ᴺ` matrix, qubit 0 most significant.
    pub fn dense_matrix(&self) -> DMatrix<pauli::C> {
        crate::stoquastic::PauliHamiltonian::from(self).matrix()
    }
}

/// Well-basis states and the matrix elements needed for projection.
struct WellQubit {
    delta: f64,
    /// Absolute `(E_g + E_e)/2`, i.e. not referenced to the potential floor.
    mean_energy: f64,
    ej: f64,
    /// Pauli coefficients `(a₀, a_x, a_y, a_z)` in the chosen basis.
    flux: [f64; 4],
    charge: [f64; 4],
    sin_flux: [f64; 4],
}

fn well_qubit(spec: &SpectralResult) -> Result<WellQubit> {
    if spec.grid.n_dims != 1 {
        return Err(Error::InvalidArgument("projection needs single-qubit spectra".into()));
    }
    if spec.energies.len() < 2 || spec.states.len() < 2 {
        return Err(Error::InvalidArgument(
            "projection needs the two lowest eigenstates".into(),
        ));
    }
    let (zero, one) = spec.computational_basis()?;
    let coeffs = |op: Operator| -> Result<[f64; 4]> {
        let a00 = spec.element_between(op, &zero, &zero)?;
        let a01 = spec.element_between(op, &zero, &one)?;
        let a11 = spec.element_between(op, &one, &one)?;
        Ok(chop(pauli::decompose_entries(a00.re, a01, a11.re)))
    };
    Ok(WellQubit {
        delta: spec.energies[1] - spec.energies[0],
        mean_energy: 0.5 * (spec.energies[0] + spec.energies[1]) + spec.u_min,
        ej: spec.params.ej_eff[0],
        flux: coeffs(Operator::Flux(0))?,
        charge: coeffs(Operator::Charge(0))?,
        sin_flux: coeffs(Operator::SinScaledFlux(0))?,
    })
}

fn energy_qubit(spec: &SpectralResult) -> Result<WellQubit> {
    let mut q = well_qubit(spec)?;
    let coeffs = |op: Operator| -> Result<[f64; 4]> {
        let a00 = spec.matrix_element(op, 0, 0)?;
        let a01 = spec.matrix_element(op, 0, 1)?;
        let a11 = spec.matrix_element(op, 1, 1)?;
        Ok(chop(pauli::decompose_entries(a00.re, a01, a11.re)))
    };
    q.flux = coeffs(Operator::Flux(0))?;
    q.charge = coeffs(Operator::Charge(0))?;
    q.sin_flux = coeffs(Operator::SinScaledFlux(0))?;
    Ok(q)
}

/// Zeroes Pauli components that parity forbids and only round-off produces.
fn chop(mut a: [f64; 4]) -> [f64; 4] {
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for v in &mut a[1..] {
        if v.abs() <= 1e-10 * scale {
            *v = 0.0;
        }
    }
    a
}

/// `Σ_ij β_ij` of `scale · A ⊗ B` restricted to the traceless parts.
fn outer(scale: f64, a: &[f64; 4], b: &[f64; 4]) -> [[f64; 3]; 3] {
    let mut beta = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            beta[i][j] = scale * a[i + 1] * b[j + 1];
        }
    }
    beta
}

fn add(a: [[f64; 3]; 3], b: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = a;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] += b[i][j];
        }
    }
    out
}

fn check_untransformed_symmetric(spec: &SpectralResult, k: usize) -> Result<()> {
    if !is_pi(spec.params.phi_q[0]) {
        return Err(Error::InvalidArgument(format!(
            "qubit {k} must be solved at the symmetric point φ_q = π"
        )));
    }
    Ok(())
}

/// Full two-qubit parameters matching two single-qubit spectra.
fn pair_params(
    q1: &SpectralResult,
    q2: &SpectralResult,
    ec12: f64,
    el12: f64,
    tilts: [f64; 2],
) -> Result<HamiltonianParams> {
    let (a, b) = (&q1.params, &q2.params);
    HamiltonianParams::new(
        DMatrix::from_row_slice(2, 2, &[a.ec[(0, 0)], ec12, ec12, b.ec[(0, 0)]]),
        DMatrix::from_row_slice(2, 2, &[a.el[(0, 0)], el12, el12, b.el[(0, 0)]]),
        vec![a.ej_eff[0], b.ej_eff[0]],
        vec![PI + tilts[0], PI + tilts[1]],
    )
}

/// Lowest-order projection of two coupled flux qubits onto the product of
/// their well bases. `q1`, `q2` are solved at the symmetric point; the flux
/// tilts `δ_k = φ_qk − π` enter linearly through `ε_k`.
///
/// The coupling `8 E_C12 q̂₁q̂₂ + E_L12 φ̂₁φ̂₂` is projected directly, so
/// `J_YY = 8 E_C12 a₁a₂` with `a_k = −Im⟨0|q̂|1⟩_k` and
/// `J_ZZ = E_L12 ⟨0|φ̂₁|0⟩⟨0|φ̂₂|0⟩`.
pub fn project_two_qubit(
    q1: &SpectralResult,
    q2: &SpectralResult,
    ec12: f64,
    el12: f64,
    tilts: [f64; 2],
) -> Result<QubitModel> {
    check_untransformed_symmetric(q1, 0)?;
    check_untransformed_symmetric(q2, 1)?;
    if q1.params.s_applied || q2.params.s_applied {
        return Err(Error::InvalidArgument(
            "project_two_qubit expects untransformed single-qubit spectra".into(),
        ));
    }
    let qs = [well_qubit(q1)?, well_qubit(q2)?];
    let beta = add(
        outer(8.0 * ec12, &qs[0].charge, &qs[1].charge),
        outer(el12, &qs[0].flux, &qs[1].flux),
    );
    let floor = pair_params(q1, q2, ec12, el12, tilts)?.potential_minimum()?.value;
    Ok(QubitModel {
        n_qubits: 2,
        delta: qs.iter().map(|q| q.delta).collect(),
        // −E_J δ sin φ projects onto −(ε/2) Z with ε = E_J δ (s₀₀ − s₁₁).
        epsilon: qs
            .iter()
            .zip(tilts)
            .map(|(q, t)| 2.0 * q.ej * t * q.sin_flux[3])
            .collect(),
        couplings: vec![Coupling { pair: (0, 1), beta }],
        basis: QubitBasis::WellBasis,
        offset: qs.iter().map(|q| q.mean_energy).sum::<f64>() - floor,
    })
}

/// Projection of two symmetric flux qubits onto their energy eigenbases:
/// `−Δ₁/2 Z₁ − Δ₂/2 Z₂ + J_XX X₁X₂ + J_YY Y₁Y₂` with
/// `J_XX = E_L12 ⟨g|φ̂₁|e⟩⟨g|φ̂₂|e⟩` and
/// `J_YY = −8 E_C12 ⟨g|q̂₁|e⟩⟨g|q̂₂|e⟩`.
pub fn project_symmetric_energy_basis(
    q1: &SpectralResult,
    q2: &SpectralResult,
    ec12: f64,
    el12: f64,
) -> Result<QubitModel> {
    check_untransformed_symmetric(q1, 0)?;
    check_untransformed_symmetric(q2, 1)?;
    let qs = [energy_qubit(q1)?, energy_qubit(q2)?];
    let beta = add(
        outer(8.0 * ec12, &qs[0].charge, &qs[1].charge),
        outer(el12, &qs[0].flux, &qs[1].flux),
    );
    let floor = pair_params(q1, q2, ec12, el12, [0.0, 0.0])?.potential_minimum()?.value;
    Ok(QubitModel {
        n_qubits: 2,
        delta: qs.iter().map(|q| q.delta).collect(),
        epsilon: vec![0.0, 0.0],
        couplings: vec![Coupling { pair: (0, 1), beta }],
        basis: QubitBasis::EnergyBasis,
        offset: qs.iter().map(|q| q.mean_energy).sum::<f64>() - floor,
    })
}

/// The potential the transformed TIM is a projection of: the exact
/// single-qubit terms plus the couplings to first order in `S_kl`,
///
/// `Ũ = Σ_k [½E'_kk φ_k² − E_Jk cos(S_kk φ_k + φ_qk)] + Σ_{k<l} E'_kl φ_kφ_l
///      + Σ_k Σ_{l≠k} E_Jk sin(S_kk φ_k + φ_qk) S_kl φ_l`.
pub fn first_order_potential(p: &HamiltonianParams, phi: &[f64], grad: &mut [f64]) -> f64 {
    let n = p.n();
    let mut u = 0.0;
    grad.iter_mut().for_each(|g| *g = 0.0);
    for k in 0..n {
        let skk = p.s[(k, k)];
        let arg = skk * phi[k] + p.phi_q[k];
        let (sin, cos) = arg.sin_cos();
        let ej = p.ej_eff[k];
        u += 0.5 * p.el[(k, k)] * phi[k] * phi[k] - ej * cos;
        grad[k] += p.el[(k, k)] * phi[k] + ej * skk * sin;
        for l in 0..n {
            if l == k {
                continue;
            }
            if l > k {
                u += p.el[(k, l)] * phi[k] * phi[l];
                grad[k] += p.el[(k, l)] * phi[l];
                grad[l] += p.el[(k, l)] * phi[k];
            }
            let skl = p.s[(k, l)];
            u += ej * sin * skl * phi[l];
            grad[k] += ej * cos * skk * skl * phi[l];
            grad[l] += ej * sin * skl;
        }
    }
    u
}

fn first_order_minimum(p: &HamiltonianParams) -> Result<f64> {
    let wells: Vec<Vec<f64>> = (0..p.n())
        .map(|k| circuit::one_dimensional_wells(p.el[(k, k)], p.ej_eff[k], p.s[(k, k)], p.phi_q[k]))
        .collect();
    let starts = circuit::lattice_starts(&wells, 32);
    let minima = circuit::minimize_multistart(|x, g| first_order_potential(p, x, g), &starts)?;
    Ok(minima[0].value)
}

/// Effective TIM after the canonical transformation. `singles[k]` must be the
/// spectrum of `params.qubit(k, true)`.
///
/// `J_kl = E'_kl f_k f_l − E_Jk S_kl g_k f_l − E_Jl S_lk g_l f_k` with
/// `f = ⟨0|φ̂|0⟩`, `g = ⟨0|sin(S φ̂)|0⟩` in the well basis: both Josephson
/// cross terms of `H_c^jj` contribute to each pair.
pub fn build_tim(singles: &[SpectralResult], params: &HamiltonianParams) -> Result<QubitModel> {
    if !params.s_applied {
        return Err(Error::InvalidArgument(
            "build_tim requires canonically transformed parameters".into(),
        ));
    }
    let n = params.n();
    if singles.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} single-qubit spectra for {n} qubits",
            singles.len()
        )));
    }
    for (k, spec) in singles.iter().enumerate() {
        let expected = params.qubit(k, true);
        let same = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1.0);
        let p = &spec.params;
        if !(p.s_applied
            && same(p.ec[(0, 0)], expected.ec[(0, 0)])
            && same(p.el[(0, 0)], expected.el[(0, 0)])
            && same(p.s[(0, 0)], expected.s[(0, 0)])
            && same(p.ej_eff[0], expected.ej_eff[0])
            && is_pi(p.phi_q[0]))
        {
            return Err(Error::InvalidArgument(format!(
                "spectrum {k} was not solved from the transformed single-qubit Hamiltonian"
            )));
        }
    }
    let qs: Vec<WellQubit> = singles.iter().map(well_qubit).collect::<Result<_>>()?;
    let tilts = params.tilts();
    let mut couplings = Vec::new();
    for k in 0..n {
        for l in k + 1..n {
            let (fk, fl) = (qs[k].flux[3], qs[l].flux[3]);
            let (gk, gl) = (qs[k].sin_flux[3], qs[l].sin_flux[3]);
            let j = params.el[(k, l)] * fk * fl
                - params.ej_eff[k] * params.s[(k, l)] * gk * fl
                - params.ej_eff[l] * params.s[(l, k)] * gl * fk;
            if params.el[(k, l)] != 0.0 || params.s[(k, l)] != 0.0 {
                let mut beta = [[0.0; 3]; 3];
                beta[2][2] = j;
                couplings.push(Coupling { pair: (k, l), beta });
            }
        }
    }
    let floor = first_order_minimum(params)?;
    Ok(QubitModel {
        n_qubits: n,
        delta: qs.iter().map(|q| q.delta).collect(),
        epsilon: qs
            .iter()
            .zip(&tilts)
            .map(|(q, t)| 2.0 * q.ej * t * q.sin_flux[3])
            .collect(),
        couplings,
        basis: QubitBasis::WellBasis,
        offset: qs.iter().map(|q| q.mean_energy).sum::<f64>() - floor,
    })
}

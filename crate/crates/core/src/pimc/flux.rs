//! Flux-basis PIMC for the circuit Hamiltonian `4 qᵀE_C q + U(φ)`.
//!
//! With `τ = β̃/M` the Trotterized weight of a closed path is `e^{−S}`,
//!
//! ```text
//! S = M/(16β̃) Σ_s Δφ_sᵀ E_C⁻¹ Δφ_s + β̃/M Σ_s U(φ_s),   Δφ_s = φ_{s+1} − φ_s,
//! ```
//!
//! a sum of real quadratic and potential terms, so every weight is positive.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{run_chains, ChainRecord, PathEnsembleStats, PimcConfig};
use crate::circuit::HamiltonianParams;
use crate::error::{Error, Result};
use crate::linalg;

/// `M × N` fluxes, periodic in the slice index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathConfiguration {
    pub m: usize,
    pub n: usize,
    data: Vec<f64>,
}

impl PathConfiguration {
    pub fn constant(m: usize, point: &[f64]) -> Self {
        PathConfiguration {
            m,
            n: point.len(),
            data: point.iter().copied().cycle().take(m * point.len()).collect(),
        }
    }

    pub fn from_slices(slices: &[Vec<f64>]) -> Result<Self> {
        let m = slices.len();
        let n = slices.first().map_or(0, Vec::len);
        if m < 2 || n == 0 || slices.iter().any(|s| s.len() != n) {
            return Err(Error::InvalidArgument(
                "path needs at least two slices of equal, nonzero length".into(),
            ));
        }
        if slices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("path contains non-finite flux".into()));
        }
        Ok(PathConfiguration {
            m,
            n,
            data: slices.concat(),
        })
    }

    pub fn slice(&self, s: usize) -> &[f64] {
        &self.data[s * self.n..(s + 1) * self.n]
    }

    fn slice_mut(&mut self, s: usize) -> &mut [f64] {
        &mut self.data[s * self.n..(s + 1) * self.n]
    }
}

/// Normalized free-particle kernel `⟨φ'|e^{−τ·4E_C q̂²}|φ⟩` for one flux,
/// `(16π E_C τ)^{−1/2} exp(−(φ'−φ)²/(16 E_C τ))`.
pub fn kinetic_kernel(ec: f64, tau: f64, dphi: f64) -> f64 {
    (16.0 * std::f64::consts::PI * ec * tau).powf(-0.5) * (-dphi * dphi / (16.0 * ec * tau)).exp()
}

fn link(inv: &[f64], n: usize, a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        let di = b[i] - a[i];
        for j in 0..n {
            s += di * inv[i * n + j] * (b[j] - a[j]);
        }
    }
    s
}

fn inverse_charging(params: &HamiltonianParams) -> Result<Vec<f64>> {
    let inv: DMatrix<f64> = linalg::sym_inverse(&params.ec, "charging energy")?;
    let n = params.n();
    Ok((0..n * n).map(|k| inv[(k / n, k % n)]).collect())
}

/// `S[path]` for inverse temperature `beta_tilde` and `M = path.m`.
pub fn classical_action(params: &HamiltonianParams, path: &PathConfiguration, beta_tilde: f64) -> Result<f64> {
    if path.n != params.n() {
        return Err(Error::InvalidArgument(format!(
            "path has {} fluxes per slice, circuit has {}",
            path.n,
            params.n()
        )));
    }
    if !(beta_tilde > 0.0) {
        return Err(Error::InvalidArgument("beta_tilde must be positive".into()));
    }
    let inv = inverse_charging(params)?;
    let m = path.m;
    let kin = m as f64 / (16.0 * beta_tilde);
    let pot = beta_tilde / m as f64;
    Ok((0..m)
        .map(|s| {
            kin * link(&inv, path.n, path.slice(s), path.slice((s + 1) % m))
                + pot * params.potential(path.slice(s))
        })
        .sum())
}

/// Proposal kernel for the flux moves.
#[derive(Clone, Debug, PartialEq)]
pub enum Proposal {
    /// Local: one slice shifted by `δ ∈ [−h, h]ᴺ`; global: every slice
    /// shifted by one common `δ`.
    Uniform { halfwidth: f64 },
    /// Fluxes restricted to `origin + step·i`, `i < count`. Local: one slice
    /// redrawn uniformly on the lattice; global: all fluxes moved by `±step`
    /// together, rejected if any leaves the lattice.
    Lattice { origin: f64, step: f64, count: usize },
}

/// One Markov chain over flux paths.
pub struct FluxChain<'a> {
    params: &'a HamiltonianParams,
    inv: Vec<f64>,
    kin: f64,
    pot: f64,
    u_min: f64,
    path: PathConfiguration,
    potentials: Vec<f64>,
    action: f64,
    proposal: Proposal,
    local_prob: f64,
    rng: ChaCha8Rng,
    trial: Vec<f64>,
    trial_potentials: Vec<f64>,
    grad: Vec<f64>,
    pub local: (u64, u64),
    pub global: (u64, u64),
}

impl<'a> FluxChain<'a> {
    pub fn new(
        params: &'a HamiltonianParams,
        config: &PimcConfig,
        proposal: Proposal,
        start: PathConfiguration,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        if start.m != config.trotter_m || start.n != params.n() {
            return Err(Error::InvalidArgument(format!(
                "start path is {}x{}, expected {}x{}",
                start.m,
                start.n,
                config.trotter_m,
                params.n()
            )));
        }
        let inv = inverse_charging(params)?;
        let m = config.trotter_m;
        let potentials: Vec<f64> = (0..m).map(|s| params.potential(start.slice(s))).collect();
        let action = classical_action(params, &start, config.beta_tilde)?;
        Ok(FluxChain {
            params,
            inv,
            kin: m as f64 / (16.0 * config.beta_tilde),
            pot: config.beta_tilde / m as f64,
            u_min: params.potential_minimum()?.value,
            path: start,
            potentials,
            action,
            proposal,
            local_prob: config.local_update_prob,
            rng,
            trial: vec![0.0; params.n()],
            trial_potentials: vec![0.0; m],
            grad: vec![0.0; params.n()],
            local: (0, 0),
            global: (0, 0),
        })
    }

    pub fn path(&self) -> &PathConfiguration {
        &self.path
    }

    /// Running action, updated by the incremental differences.
    pub fn action(&self) -> f64 {
        self.action
    }

    fn accept(&mut self, delta_s: f64) -> bool {
        delta_s <= 0.0 || self.rng.random::<f64>() < (-delta_s).exp()
    }

    /// One Metropolis-Hastings iteration; returns whether the move was accepted.
    pub fn step(&mut self) -> bool {
        if self.rng.random::<f64>() < self.local_prob {
            self.local_move()
        } else {
            self.global_move()
        }
    }

    fn local_move(&mut self) -> bool {
        let (m, n) = (self.path.m, self.path.n);
        let s = self.rng.random_range(0..m);
        let old = self.path.slice(s);
        match self.proposal {
            Proposal::Uniform { halfwidth } => {
                for i in 0..n {
                    self.trial[i] = old[i] + self.rng.random_range(-halfwidth..=halfwidth);
                }
            }
            Proposal::Lattice { origin, step, count } => {
                for i in 0..n {
                    self.trial[i] = origin + step * self.rng.random_range(0..count) as f64;
                }
            }
        }
        let prev = self.path.slice((s + m - 1) % m);
        let next = self.path.slice((s + 1) % m);
        let old = self.path.slice(s);
        let u_new = self.params.potential(&self.trial);
        let delta_s = self.kin
            * (link(&self.inv, n, prev, &self.trial) + link(&self.inv, n, &self.trial, next)
                - link(&self.inv, n, prev, old)
                - link(&self.inv, n, old, next))
            + self.pot * (u_new - self.potentials[s]);
        self.local.1 += 1;
        if self.accept(delta_s) {
            let trial = std::mem::take(&mut self.trial);
            self.path.slice_mut(s).copy_from_slice(&trial);
            self.trial = trial;
            self.potentials[s] = u_new;
            self.action += delta_s;
            self.local.0 += 1;
            true
        } else {
            false
        }
    }

    fn global_move(&mut self) -> bool {
        let (m, n) = (self.path.m, self.path.n);
        self.global.1 += 1;
        match self.proposal {
            Proposal::Uniform { halfwidth } => {
                for i in 0..n {
                    self.trial[i] = self.rng.random_range(-halfwidth..=halfwidth);
                }
            }
            Proposal::Lattice { origin, step, count } => {
                let d = if self.rng.random::<bool>() { step } else { -step };
                let top = origin + step * (count - 1) as f64 + 0.5 * step;
                let bottom = origin - 0.5 * step;
                if self.path.data.iter().any(|&v| v + d > top || v + d < bottom) {
                    return false;
                }
                self.trial.iter_mut().for_each(|t| *t = d);
            }
        }
        let mut point = vec![0.0; n];
        let mut delta_u = 0.0;
        for s in 0..m {
            for (i, p) in point.iter_mut().enumerate() {
                *p = self.path.slice(s)[i] + self.trial[i];
            }
            self.trial_potentials[s] = self.params.potential(&point);
            delta_u += self.trial_potentials[s] - self.potentials[s];
        }
        let delta_s = self.pot * delta_u;
        if self.accept(delta_s) {
            for s in 0..m {
                for i in 0..n {
                    self.path.slice_mut(s)[i] += self.trial[i];
                }
            }
            std::mem::swap(&mut self.potentials, &mut self.trial_potentials);
            self.action += delta_s;
            self.global.0 += 1;
            true
        } else {
            false
        }
    }

    /// Virial estimator `(1/M) Σ_s [U(φ_s) − u_min + ½ φ_s·∇U(φ_s)]`.
    pub fn energy(&mut self) -> f64 {
        let m = self.path.m;
        let mut total = 0.0;
        for s in 0..m {
            let phi = self.path.slice(s);
            let u = self.params.potential_and_gradient(phi, &mut self.grad);
            let virial: f64 = phi.iter().zip(&self.grad).map(|(a, b)| a * b).sum();
            total += u - self.u_min + 0.5 * virial;
        }
        total / m as f64
    }
}

fn run_chain(params: &HamiltonianParams, config: &PimcConfig, chain: usize) -> Result<ChainRecord> {
    let start = PathConfiguration::constant(config.trotter_m, &params.potential_minimum()?.point);
    let proposal = Proposal::Uniform {
        halfwidth: config.shift_halfwidth,
    };
    let mut c = FluxChain::new(params, config, proposal, start, config.chain_rng(chain))?;
    let mut accepted = 0u64;
    for _ in 0..config.equilibration_iterations {
        accepted += c.step() as u64;
    }
    if accepted == 0 {
        return Err(Error::MixingFailure(config.equilibration_iterations as usize));
    }
    let mut samples = Vec::with_capacity(config.n_samples());
    for i in 1..=config.total_iterations - config.equilibration_iterations {
        c.step();
        if i % config.sample_stride == 0 {
            samples.push(c.energy());
        }
    }
    Ok(ChainRecord {
        samples,
        local: c.local,
        global: c.global,
    })
}

/// Flux-basis PIMC estimate of the thermal energy above the potential
/// minimum, starting every chain from the constant path at the global minimum.
pub fn run_pimc_flux(params: &HamiltonianParams, config: &PimcConfig) -> Result<PathEnsembleStats> {
    config.validate()?;
    linalg::check_spd(&params.ec, "charging energy")?;
    run_chains(config, |k| run_chain(params, config, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn double_well() -> HamiltonianParams {
        HamiltonianParams::new(
            DMatrix::from_row_slice(2, 2, &[0.124, 0.008, 0.008, 0.124]),
            DMatrix::identity(2, 2) * 704.0,
            vec![758.55, 758.55],
            vec![std::f64::consts::PI; 2],
        )
        .unwrap()
    }

    #[test]
    fn constant_path_has_pure_potential_action() {
        let p = double_well();
        let min = p.potential_minimum().unwrap();
        let path = PathConfiguration::constant(7, &min.point);
        let beta = 1.0 / 0.93;
        let s = classical_action(&p, &path, beta).unwrap();
        assert!((s - beta * min.value).abs() < 1e-9 * s.abs());
    }

    #[test]
    fn kernel_matches_fourier_quadrature() {
        let (ec, tau): (f64, f64) = (0.124, 1.0 / (0.93 * 50.0));
        // (1/2π) ∫ dq e^{−4 E_C τ q²} cos(q Δφ), trapezoid on a wide q range.
        let width = 1.0 / (4.0 * ec * tau).sqrt();
        let (lo, hi, steps) = (-14.0 * width, 14.0 * width, 200_000);
        let h = (hi - lo) / steps as f64;
        // Up to three kernel widths; beyond that the oscillatory integral is
        // below double-precision cancellation.
        let sigma = (8.0 * ec * tau).sqrt();
        for dphi in [0.0, 0.5 * sigma, sigma, 2.0 * sigma, 3.0 * sigma] {
            let f = |q: f64| (-4.0 * ec * tau * q * q).exp() * (q * dphi).cos();
            let integral: f64 = (0..=steps)
                .map(|i| {
                    let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
                    w * f(lo + h * i as f64)
                })
                .sum::<f64>()
                * h
                / (2.0 * std::f64::consts::PI);
            let exact = kinetic_kernel(ec, tau, dphi);
            assert!((integral - exact).abs() < 1e-8 * exact, "{dphi}: {integral} vs {exact}");
        }
    }

    #[test]
    fn action_is_finite_and_real_for_wild_paths() {
        let p = double_well();
        let slices: Vec<Vec<f64>> = (0..9).map(|s| vec![(s as f64).sin() * 30.0, -(s as f64) * 4.0]).collect();
        let path = PathConfiguration::from_slices(&slices).unwrap();
        let s = classical_action(&p, &path, 2.0).unwrap();
        assert!(s.is_finite());
        assert!((-s).exp() >= 0.0);
    }

    #[test]
    fn incremental_action_matches_recomputation() {
        let p = double_well();
        let mut config = PimcConfig::new(1.0 / 0.93, 6);
        config.local_update_prob = 0.7;
        let start = PathConfiguration::constant(6, &p.potential_minimum().unwrap().point);
        let mut c = FluxChain::new(
            &p,
            &config,
            Proposal::Uniform { halfwidth: 0.3 },
            start,
            ChaCha8Rng::seed_from_u64(9),
        )
        .unwrap();
        for _ in 0..20 {
            for _ in 0..500 {
                c.step();
            }
            let full = classical_action(&p, c.path(), config.beta_tilde).unwrap();
            assert!((c.action() - full).abs() < 1e-9 * full.abs(), "{} vs {full}", c.action());
        }
        assert!(c.local.0 > 0 && c.global.0 > 0);
    }

    #[test]
    fn singular_charging_rejected() {
        let mut p = double_well();
        p.ec = DMatrix::from_element(2, 2, 0.1);
        let path = PathConfiguration::constant(3, &[0.0, 0.0]);
        assert!(classical_action(&p, &path, 1.0).is_err());
    }

    #[test]
    fn no_accepted_move_is_a_mixing_failure() {
        let p = double_well();
        let mut config = PimcConfig::new(1e6, 4);
        config.total_iterations = 2_000;
        config.equilibration_iterations = 1_000;
        config.sample_stride = 1;
        assert!(matches!(run_pimc_flux(&p, &config), Err(Error::MixingFailure(1_000))));
    }
}

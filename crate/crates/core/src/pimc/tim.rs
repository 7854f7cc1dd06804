//! Spin-path PIMC for a transverse-field Ising model
//!
//! ```text
//! H = offset − Σ_k (Δ_k/2) X_k − Σ_k (ε_k/2) Z_k + Σ_{k<l} J_kl Z_k Z_l.
//! ```
//!
//! Trotterized, each `e^{(τΔ/2)X}` factor becomes a ferromagnetic bond
//! `K_k σ_k^(s) σ_k^(s+1)` between neighbouring slices with
//! `K_k = (β̃/M) J_k⊥`, `J_k⊥ = −(M/2β̃) ln tanh(Δ_k β̃/2M)`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{run_chains, ChainRecord, PathEnsembleStats, PimcConfig};
use crate::error::{Error, Result};
use crate::projection::QubitModel;

/// `J_k⊥` in GHz.
pub fn perpendicular_coupling(delta: f64, beta_tilde: f64, m: usize) -> f64 {
    let m = m as f64;
    -(m / (2.0 * beta_tilde)) * (delta * beta_tilde / (2.0 * m)).tanh().ln()
}

/// `M × N` classical spins, periodic in the slice index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinPathConfiguration {
    pub m: usize,
    pub n: usize,
    spins: Vec<i8>,
}

impl SpinPathConfiguration {
    pub fn aligned(m: usize, spins: &[i8]) -> Self {
        SpinPathConfiguration {
            m,
            n: spins.len(),
            spins: spins.iter().copied().cycle().take(m * spins.len()).collect(),
        }
    }

    pub fn get(&self, s: usize, k: usize) -> i8 {
        self.spins[s * self.n + k]
    }

    fn flip(&mut self, s: usize, k: usize) {
        self.spins[s * self.n + k] *= -1;
    }
}

/// Dense TIM couplings and single-qubit data used by the chain.
struct TimTerms {
    n: usize,
    offset: f64,
    delta: Vec<f64>,
    epsilon: Vec<f64>,
    /// Symmetric, zero diagonal.
    j: Vec<f64>,
}

impl TimTerms {
    fn new(model: &QubitModel) -> Result<Self> {
        model.validate()?;
        if !model.is_tim() {
            return Err(Error::NotTim(
                "spin PIMC needs a well-basis model with ZZ couplings only".into(),
            ));
        }
        if let Some(k) = model.delta.iter().position(|&d| !(d > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "tunnel coupling Δ_{k} = {} must be positive for the spin mapping",
                model.delta[k]
            )));
        }
        let n = model.n_qubits;
        let mut j = vec![0.0; n * n];
        for c in &model.couplings {
            let (k, l) = c.pair;
            j[k * n + l] += c.beta[2][2];
            j[l * n + k] += c.beta[2][2];
        }
        Ok(TimTerms {
            n,
            offset: model.offset,
            delta: model.delta.clone(),
            epsilon: model.epsilon.clone(),
            j,
        })
    }

    /// `H_z(σ)` for one slice.
    fn diagonal(&self, spins: &[i8]) -> f64 {
        let mut e = 0.0;
        for k in 0..self.n {
            let sk = spins[k] as f64;
            e -= 0.5 * self.epsilon[k] * sk;
            for l in k + 1..self.n {
                e += self.j[k * self.n + l] * sk * spins[l] as f64;
            }
        }
        e
    }

    /// Local field `∂H_z/∂σ_k` excluding the spin itself.
    fn field(&self, spins: &[i8], k: usize) -> f64 {
        let mut f = -0.5 * self.epsilon[k];
        for l in 0..self.n {
            if l != k {
                f += self.j[k * self.n + l] * spins[l] as f64;
            }
        }
        f
    }
}

pub struct SpinChain {
    terms: TimTerms,
    path: SpinPathConfiguration,
    /// `K_k = (β̃/M) J_k⊥`.
    bond: Vec<f64>,
    /// `2a_k = β̃Δ_k/M`.
    two_a: Vec<f64>,
    tau: f64,
    local_prob: f64,
    rng: ChaCha8Rng,
    pub local: (u64, u64),
    pub global: (u64, u64),
}

impl SpinChain {
    pub fn new(model: &QubitModel, config: &PimcConfig, rng: ChaCha8Rng) -> Result<Self> {
        let terms = TimTerms::new(model)?;
        let m = config.trotter_m;
        let tau = config.beta_tilde / m as f64;
        let bond = terms
            .delta
            .iter()
            .map(|&d| tau * perpendicular_coupling(d, config.beta_tilde, m))
            .collect();
        let two_a = terms.delta.iter().map(|&d| tau * d).collect();
        let path = SpinPathConfiguration::aligned(m, &vec![1; terms.n]);
        Ok(SpinChain {
            terms,
            path,
            bond,
            two_a,
            tau,
            local_prob: config.local_update_prob,
            rng,
            local: (0, 0),
            global: (0, 0),
        })
    }

    pub fn path(&self) -> &SpinPathConfiguration {
        &self.path
    }

    fn slice(&self, s: usize) -> &[i8] {
        &self.path.spins[s * self.terms.n..(s + 1) * self.terms.n]
    }

    fn accept(&mut self, delta_s: f64) -> bool {
        delta_s <= 0.0 || self.rng.random::<f64>() < (-delta_s).exp()
    }

    pub fn step(&mut self) -> bool {
        let (m, n) = (self.path.m, self.terms.n);
        let k = self.rng.random_range(0..n);
        if self.rng.random::<f64>() < self.local_prob {
            let s = self.rng.random_range(0..m);
            let sk = self.path.get(s, k) as f64;
            let neighbours = (self.path.get((s + m - 1) % m, k) + self.path.get((s + 1) % m, k)) as f64;
            // Flipping σ → −σ changes τ·H_z by −2τσ·field and the bond term by 2Kσ·neighbours.
            let delta_s = -2.0 * self.tau * sk * self.terms.field(self.slice(s), k)
                + 2.0 * self.bond[k] * sk * neighbours;
            self.local.1 += 1;
            let ok = self.accept(delta_s);
            if ok {
                self.path.flip(s, k);
                self.local.0 += 1;
            }
            ok
        } else {
            let delta_s: f64 = (0..m)
                .map(|s| -2.0 * self.tau * self.path.get(s, k) as f64 * self.terms.field(self.slice(s), k))
                .sum();
            self.global.1 += 1;
            let ok = self.accept(delta_s);
            if ok {
                (0..m).for_each(|s| self.path.flip(s, k));
                self.global.0 += 1;
            }
            ok
        }
    }

    /// `−∂ ln Z_M/∂β̃`: `offset + (1/M) Σ_s H_z(σ^(s))
    /// − Σ_k (Δ_k/2)[coth 2a_k − (C_k/M)/sinh 2a_k]` with
    /// `C_k = Σ_s σ_k^(s) σ_k^(s+1)`.
    pub fn energy(&self) -> f64 {
        let (m, n) = (self.path.m, self.terms.n);
        let diagonal: f64 = (0..m).map(|s| self.terms.diagonal(self.slice(s))).sum::<f64>() / m as f64;
        let transverse: f64 = (0..n)
            .map(|k| {
                let c: i64 = (0..m)
                    .map(|s| (self.path.get(s, k) * self.path.get((s + 1) % m, k)) as i64)
                    .sum();
                let x = self.two_a[k];
                -0.5 * self.terms.delta[k] * (1.0 / x.tanh() - (c as f64 / m as f64) / x.sinh())
            })
            .sum();
        self.terms.offset + diagonal + transverse
    }
}

fn run_chain(model: &QubitModel, config: &PimcConfig, chain: usize) -> Result<ChainRecord> {
    let mut c = SpinChain::new(model, config, config.chain_rng(chain))?;
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

/// Spin-path PIMC estimate of `⟨H⟩` for a TIM, offset included.
pub fn run_pimc_tim(model: &QubitModel, config: &PimcConfig) -> Result<PathEnsembleStats> {
    config.validate()?;
    TimTerms::new(model)?;
    run_chains(config, |k| run_chain(model, config, k))
}

/// `Tr(H e^{−β̃H})/Tr(e^{−β̃H})` from the dense matrix of `model`.
pub fn exact_thermal_energy(model: &QubitModel, beta_tilde: f64) -> Result<f64> {
    model.validate()?;
    let h = model.dense_matrix();
    if h.iter().any(|v| v.im.abs() > 1e-12) {
        return Err(Error::InvalidArgument("exact thermal energy needs a real Hamiltonian".into()));
    }
    let real = DMatrix::from_fn(h.nrows(), h.ncols(), |i, j| h[(i, j)].re);
    let e = real.symmetric_eigenvalues();
    let e0 = e.min();
    let (mut z, mut num) = (0.0, 0.0);
    for &v in e.iter() {
        let w = (-beta_tilde * (v - e0)).exp();
        z += w;
        num += w * v;
    }
    Ok(num / z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn perpendicular_coupling_grows_with_slices() {
        let beta = 1.0 / 0.93;
        let mut last = 0.0;
        for m in [2, 3, 5, 8, 12, 20, 30, 50, 100, 150, 1000] {
            let j = perpendicular_coupling(1.36, beta, m);
            assert!(j > 0.0 && j > last, "M = {m}: {j}");
            last = j;
        }
    }

    /// Exact `−∂ ln Z_M/∂β̃` of a single spin ring by transfer matrices.
    fn ring_energy(delta: f64, eps: f64, beta: f64, m: usize) -> f64 {
        let z = |b: f64| {
            let tau = b / m as f64;
            let k = tau * perpendicular_coupling(delta, b, m);
            let c2 = 0.5 * (delta * tau).sinh();
            // T_{σσ'} = C e^{Kσσ'} e^{τ(ε/2)(σ+σ')/2}
            let t = nalgebra::Matrix2::new(
                c2.sqrt() * (k + 0.5 * tau * eps).exp(),
                c2.sqrt() * (-k).exp(),
                c2.sqrt() * (-k).exp(),
                c2.sqrt() * (k - 0.5 * tau * eps).exp(),
            );
            t.pow(m as u32).trace().ln()
        };
        let h = 1e-5 * beta;
        -(z(beta + h) - z(beta - h)) / (2.0 * h)
    }

    #[test]
    fn estimator_matches_transfer_matrix() {
        let model = QubitModel::tim(vec![1.3], vec![0.4], &[]);
        let mut config = PimcConfig::new(2.0, 8);
        config.local_update_prob = 0.8;
        let mut c = SpinChain::new(&model, &config, ChaCha8Rng::seed_from_u64(5)).unwrap();
        let mut sum = 0.0;
        let n = 400_000;
        for _ in 0..n {
            c.step();
            sum += c.energy();
        }
        let exact = ring_energy(1.3, 0.4, 2.0, 8);
        assert!((sum / n as f64 - exact).abs() < 0.01, "{} vs {exact}", sum / n as f64);
    }

    #[test]
    fn single_qubit_tends_to_two_level_result() {
        let (delta, beta) = (1.36, 1.0 / 0.93);
        let mut config = PimcConfig::new(beta, 64);
        config.total_iterations = 2_000_000;
        config.equilibration_iterations = 100_000;
        config.sample_stride = 100;
        config.rng_seed = 11;
        let model = QubitModel::tim(vec![delta], vec![0.0], &[]);
        let stats = run_pimc_tim(&model, &config).unwrap();
        let exact = -0.5 * delta * (0.5 * beta * delta).tanh();
        assert!(
            (stats.mean_energy - exact).abs() < 3.0 * stats.std_error + 2e-3,
            "{} ± {} vs {exact}",
            stats.mean_energy,
            stats.std_error
        );
    }

    #[test]
    fn non_tim_and_zero_tunnelling_rejected() {
        let mut m = QubitModel::tim(vec![1.0, 1.0], vec![0.0, 0.0], &[((0, 1), 0.2)]);
        m.couplings[0].beta[1][1] = 0.1;
        let config = PimcConfig::new(1.0, 4);
        assert!(matches!(run_pimc_tim(&m, &config), Err(Error::NotTim(_))));
        let z = QubitModel::tim(vec![0.0], vec![0.0], &[]);
        assert!(run_pimc_tim(&z, &config).is_err());
    }
}

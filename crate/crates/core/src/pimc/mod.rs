//! Path-integral Monte Carlo: Trotterized partition functions sampled with
//! Metropolis-Hastings, in the flux basis of the circuit ([`flux`]) and in the
//! spin representation of a transverse-field Ising model ([`tim`]).

pub mod flux;
pub mod stats;
pub mod tim;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use flux::{classical_action, kinetic_kernel, run_pimc_flux, FluxChain, PathConfiguration, Proposal};
pub use stats::{autocorrelation_time, summarize, SeriesSummary};
pub use tim::{exact_thermal_energy, perpendicular_coupling, run_pimc_tim, SpinChain, SpinPathConfiguration};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PimcConfig {
    /// `hβ` in ns.
    pub beta_tilde: f64,
    pub trotter_m: usize,
    pub total_iterations: u64,
    pub equilibration_iterations: u64,
    pub sample_stride: u64,
    pub local_update_prob: f64,
    pub shift_halfwidth: f64,
    pub rng_seed: u64,
    pub n_chains: usize,
}

impl PimcConfig {
    pub const DEFAULT_TOTAL: u64 = 30_000_000;
    pub const DEFAULT_EQUILIBRATION: u64 = 5_000_000;
    pub const DEFAULT_STRIDE: u64 = 1000;
    pub const DEFAULT_LOCAL_PROB: f64 = 0.9;
    pub const DEFAULT_HALFWIDTH: f64 = 0.75;

    pub fn new(beta_tilde: f64, trotter_m: usize) -> Self {
        PimcConfig {
            beta_tilde,
            trotter_m,
            total_iterations: Self::DEFAULT_TOTAL,
            equilibration_iterations: Self::DEFAULT_EQUILIBRATION,
            sample_stride: Self::DEFAULT_STRIDE,
            local_update_prob: Self::DEFAULT_LOCAL_PROB,
            shift_halfwidth: Self::DEFAULT_HALFWIDTH,
            rng_seed: 0,
            n_chains: 1,
        }
    }

    /// Divides the iteration budget (total and equilibration) by `factor`.
    pub fn scaled_down(mut self, factor: u64) -> Self {
        self.total_iterations /= factor;
        self.equilibration_iterations /= factor;
        self
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.beta_tilde > 0.0 && self.beta_tilde.is_finite()) {
            v.push(format!("beta_tilde must be positive and finite, got {}", self.beta_tilde));
        }
        if self.trotter_m < 2 {
            v.push(format!("trotter_m must be at least 2, got {}", self.trotter_m));
        }
        if self.equilibration_iterations >= self.total_iterations {
            v.push(format!(
                "equilibration_iterations ({}) must be below total_iterations ({})",
                self.equilibration_iterations, self.total_iterations
            ));
        }
        if self.sample_stride == 0 {
            v.push("sample_stride must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.local_update_prob) {
            v.push(format!("local_update_prob must lie in [0, 1], got {}", self.local_update_prob));
        }
        if !(self.shift_halfwidth > 0.0 && self.shift_halfwidth.is_finite()) {
            v.push(format!("shift_halfwidth must be positive, got {}", self.shift_halfwidth));
        }
        if self.n_chains == 0 {
            v.push("n_chains must be at least 1".into());
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v.join("; ")))
        }
    }

    pub fn n_samples(&self) -> usize {
        ((self.total_iterations - self.equilibration_iterations) / self.sample_stride) as usize
    }

    /// Independent generator for chain `chain`: the seed picks the key and
    /// the chain index the stream.
    pub fn chain_rng(&self, chain: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(chain as u64);
        rng
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathEnsembleStats {
    /// GHz, above the potential minimum (flux) or including the model offset
    /// (TIM).
    pub mean_energy: f64,
    pub std_error: f64,
    /// Integrated autocorrelation time in Monte Carlo iterations
    /// (`τ_samples × sample_stride`), averaged over chains.
    pub autocorrelation_time: f64,
    pub n_samples: usize,
    pub acceptance_local: f64,
    pub acceptance_global: f64,
    pub n_chains: usize,
    pub chain_means: Vec<f64>,
    /// Recorded estimator values, one series per chain.
    #[serde(skip)]
    pub series: Vec<Vec<f64>>,
}

/// What one chain hands back for aggregation.
#[derive(Clone, Debug)]
pub(crate) struct ChainRecord {
    pub samples: Vec<f64>,
    pub local: (u64, u64),
    pub global: (u64, u64),
}

pub(crate) fn run_chains<F>(config: &PimcConfig, chain: F) -> Result<PathEnsembleStats>
where
    F: Fn(usize) -> Result<ChainRecord> + Sync,
{
    let records: Vec<ChainRecord> = (0..config.n_chains)
        .into_par_iter()
        .map(&chain)
        .collect::<Result<_>>()?;
    aggregate(config, records)
}

fn ratio((acc, tried): (u64, u64)) -> f64 {
    if tried == 0 {
        0.0
    } else {
        acc as f64 / tried as f64
    }
}

fn aggregate(config: &PimcConfig, records: Vec<ChainRecord>) -> Result<PathEnsembleStats> {
    let summaries: Vec<SeriesSummary> = records
        .iter()
        .map(|r| summarize(&r.samples))
        .collect::<Result<_>>()?;
    let k = summaries.len() as f64;
    let sum = |f: fn(&ChainRecord) -> (u64, u64)| {
        records.iter().map(f).fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    };
    Ok(PathEnsembleStats {
        mean_energy: summaries.iter().map(|s| s.mean).sum::<f64>() / k,
        std_error: summaries.iter().map(|s| s.std_error.powi(2)).sum::<f64>().sqrt() / k,
        autocorrelation_time: summaries.iter().map(|s| s.tau).sum::<f64>() / k
            * config.sample_stride as f64,
        n_samples: summaries.iter().map(|s| s.n).sum(),
        acceptance_local: ratio(sum(|r| r.local)),
        acceptance_global: ratio(sum(|r| r.global)),
        n_chains: records.len(),
        chain_means: summaries.iter().map(|s| s.mean).collect(),
        series: records.into_iter().map(|r| r.samples).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn default_budget_and_validation() {
        let c = PimcConfig::new(1.0 / 0.93, 50);
        assert!(c.validate().is_ok());
        assert_eq!(c.n_samples(), 25_000);
        let mut bad = c.clone();
        bad.trotter_m = 1;
        bad.sample_stride = 0;
        bad.local_update_prob = 1.5;
        assert_eq!(bad.violations().len(), 3);
        assert_eq!(c.scaled_down(10).n_samples(), 2_500);
    }

    #[test]
    fn chain_streams_differ_and_repeat() {
        let c = PimcConfig::new(1.0, 4);
        let draw = |k| c.chain_rng(k).random::<u64>();
        assert_eq!(draw(0), draw(0));
        assert_ne!(draw(0), draw(1));
    }
}

//! Integrated autocorrelation time and error bars for correlated series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 100;
/// Sokal window factor: sum lags up to the first `W ≥ c·τ(W)`.
pub const WINDOW_FACTOR: f64 = 6.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub mean: f64,
    pub std_error: f64,
    /// `τ = 1 + 2 Σ_t ρ(t)`, in units of the series spacing.
    pub tau: f64,
    pub n: usize,
}

fn check(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::SeriesTooShort {
            len: samples.len(),
            min: MIN_SAMPLES,
        });
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("series contains non-finite values".into()));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if var <= (4.0 * f64::EPSILON * mean.abs()).powi(2) {
        return Err(Error::DegenerateSeries);
    }
    Ok((mean, var))
}

/// Integrated autocorrelation time with the self-consistent window
/// `W ≥ 6τ(W)`; white noise gives `τ ≈ 1`.
pub fn autocorrelation_time(samples: &[f64]) -> Result<f64> {
    let (mean, var) = check(samples)?;
    let n = samples.len();
    let centered: Vec<f64> = samples.iter().map(|v| v - mean).collect();
    let mut tau = 1.0;
    for t in 1..n / 2 {
        let c: f64 = centered[..n - t]
            .iter()
            .zip(&centered[t..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64;
        tau += 2.0 * c / var;
        if t as f64 >= WINDOW_FACTOR * tau {
            break;
        }
    }
    Ok(tau.max(1.0))
}

/// Mean with standard error `σ·√(τ/n)`.
pub fn summarize(samples: &[f64]) -> Result<SeriesSummary> {
    let (mean, var) = check(samples)?;
    let tau = autocorrelation_time(samples)?;
    let n = samples.len();
    let sample_var = var * n as f64 / (n - 1) as f64;
    Ok(SeriesSummary {
        mean,
        std_error: (sample_var * tau / n as f64).sqrt(),
        tau,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
        // Box-Muller.
        let u: f64 = rng.random::<f64>().max(1e-300);
        let v: f64 = rng.random();
        (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
    }

    #[test]
    fn white_noise_has_unit_tau() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s: Vec<f64> = (0..100_000).map(|_| gaussian(&mut rng)).collect();
        let tau = autocorrelation_time(&s).unwrap();
        assert!((tau - 1.0).abs() < 0.2, "{tau}");
    }

    #[test]
    fn ar1_matches_closed_form() {
        let rho: f64 = 0.9;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut x = 0.0;
        let s: Vec<f64> = (0..200_000)
            .map(|_| {
                x = rho * x + (1.0 - rho * rho).sqrt() * gaussian(&mut rng);
                x
            })
            .collect();
        let tau = autocorrelation_time(&s).unwrap();
        let exact = (1.0 + rho) / (1.0 - rho);
        assert!((tau - exact).abs() < 0.2 * exact, "{tau}");
    }

    #[test]
    fn constant_series_is_degenerate() {
        assert_eq!(autocorrelation_time(&[3.5; 500]), Err(Error::DegenerateSeries));
    }

    #[test]
    fn short_series_rejected() {
        assert_eq!(
            autocorrelation_time(&[0.0, 1.0, 2.0]),
            Err(Error::SeriesTooShort { len: 3, min: MIN_SAMPLES })
        );
    }

    #[test]
    fn error_bar_grows_with_correlation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let white: Vec<f64> = (0..10_000).map(|_| gaussian(&mut rng)).collect();
        let mut x = 0.0;
        let red: Vec<f64> = (0..10_000)
            .map(|_| {
                x = 0.9 * x + (1.0f64 - 0.81).sqrt() * gaussian(&mut rng);
                x
            })
            .collect();
        let (w, r) = (summarize(&white).unwrap(), summarize(&red).unwrap());
        assert!(r.std_error > 3.0 * w.std_error);
    }
}

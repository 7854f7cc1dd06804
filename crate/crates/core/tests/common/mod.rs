#![allow(dead_code)]

use std::f64::consts::PI;

use fluxqmc_core::{
    build_params, ChargingConvention, CircuitSpec, HamiltonianParams, Inductive, Junction,
};
use nalgebra::DMatrix;

pub const EC: f64 = 0.124;
pub const EL: f64 = 704.0;
pub const EJ: f64 = 1600.0;
pub const PHI_CJJ: f64 = 0.685550 * PI;

pub fn junction(tilt: f64) -> Junction {
    Junction {
        ej_ghz: EJ,
        phi_cjj: PHI_CJJ,
        phi_q: PI + tilt,
    }
}

/// Two identical qubits joined by a coupling capacitor `cc` (fF), with the
/// charging-energy diagonal held at `EC`.
pub fn pair(cc: f64, tilts: [f64; 2]) -> HamiltonianParams {
    let coupling = DMatrix::from_row_slice(2, 2, &[0.0, cc, cc, 0.0]);
    let spec = CircuitSpec::from_charging_energy(
        &[EC, EC],
        &coupling,
        ChargingConvention::TotalDiagonal,
        Inductive::EnergyGhz(DMatrix::identity(2, 2) * EL),
        vec![junction(tilts[0]), junction(tilts[1])],
    )
    .unwrap();
    build_params(&spec).unwrap()
}

pub fn weak_pair() -> HamiltonianParams {
    pair(10.0, [0.0, 0.0])
}

pub fn strong_pair() -> HamiltonianParams {
    pair(104.0, [2.0 * PI * 1e-4, 2.0 * PI * 2e-4])
}

/// Virial energy `E_L⟨φ²⟩` of the M-slice Gaussian path integral, from the
/// normal modes of the cyclic action.
pub fn discrete_harmonic_energy(ec: f64, el: f64, beta: f64, m: usize) -> f64 {
    let kin = m as f64 / (16.0 * beta * ec);
    let pot = beta / m as f64 * el;
    let phi2: f64 = (0..m)
        .map(|k| {
            let c = (2.0 * PI * k as f64 / m as f64).cos();
            1.0 / (2.0 * kin * (2.0 - 2.0 * c) + pot)
        })
        .sum::<f64>()
        / m as f64;
    el * phi2
}

/// Upper 0.999 quantile of χ²(k), Wilson-Hilferty.
pub fn chi2_critical(k: f64) -> f64 {
    let z = 3.090;
    k * (1.0 - 2.0 / (9.0 * k) + z * (2.0 / (9.0 * k)).sqrt()).powi(3)
}

/// Histogram of a one-flux, three-slice chain on a five-point lattice
/// against exhaustive Boltzmann weights. Returns `(χ², critical value)`.
pub fn toy_chain_chi_square(seed: u64, samples: usize) -> (f64, f64) {
    use fluxqmc_core::pimc::{classical_action, FluxChain, PathConfiguration, PimcConfig, Proposal};
    use rand::SeedableRng;

    let params = HamiltonianParams::new(
        DMatrix::from_element(1, 1, 1.0),
        DMatrix::from_element(1, 1, 2.0),
        vec![1.5],
        vec![PI],
    )
    .unwrap();
    let (m, points) = (3usize, 5usize);
    let (origin, step) = (-1.0, 0.5);
    let mut config = PimcConfig::new(1.0, m);
    config.local_update_prob = 0.8;
    let states = points.pow(m as u32);
    let path_of = |mut idx: usize| {
        let slices: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                let v = origin + step * (idx % points) as f64;
                idx /= points;
                vec![v]
            })
            .collect();
        PathConfiguration::from_slices(&slices).unwrap()
    };
    let weights: Vec<f64> = (0..states)
        .map(|i| (-classical_action(&params, &path_of(i), config.beta_tilde).unwrap()).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    let mut chain = FluxChain::new(
        &params,
        &config,
        Proposal::Lattice { origin, step, count: points },
        path_of(0),
        rand_chacha::ChaCha8Rng::seed_from_u64(seed),
    )
    .unwrap();
    let index = |p: &PathConfiguration| {
        (0..m).rev().fold(0, |acc, s| acc * points + ((p.slice(s)[0] - origin) / step).round() as usize)
    };
    for _ in 0..10_000 {
        chain.step();
    }
    let mut counts = vec![0u64; states];
    for _ in 0..samples {
        for _ in 0..5 {
            chain.step();
        }
        counts[index(chain.path())] += 1;
    }
    let chi2: f64 = counts
        .iter()
        .zip(&weights)
        .map(|(&c, w)| {
            let expected = samples as f64 * w / z;
            (c as f64 - expected).powi(2) / expected
        })
        .sum();
    (chi2, chi2_critical((states - 1) as f64))
}

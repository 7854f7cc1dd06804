mod common;

use fluxqmc_core::pimc::{exact_thermal_energy, run_pimc_flux, run_pimc_tim, PimcConfig};
use fluxqmc_core::projection::QubitModel;
use fluxqmc_core::HamiltonianParams;
use nalgebra::DMatrix;

const T_GHZ: f64 = 0.93;

fn harmonic() -> HamiltonianParams {
    HamiltonianParams::new(
        DMatrix::from_element(1, 1, common::EC),
        DMatrix::from_element(1, 1, common::EL),
        vec![0.0],
        vec![std::f64::consts::PI],
    )
    .unwrap()
}

fn harmonic_run(m: usize) -> (f64, f64) {
    let mut config = PimcConfig::new(1.0 / T_GHZ, m).scaled_down(10);
    config.rng_seed = 17;
    let s = run_pimc_flux(&harmonic(), &config).unwrap();
    (s.mean_energy, s.std_error)
}

#[test]
fn harmonic_matches_closed_form_at_64_slices() {
    let f = (8.0 * common::EC * common::EL).sqrt();
    let beta = 1.0 / T_GHZ;
    let exact = 0.5 * f / (0.5 * beta * f).tanh();
    let (e, err) = harmonic_run(64);
    assert!((e - exact).abs() < 3.0 * err, "{e} ± {err} vs {exact}");
}

#[test]
fn harmonic_matches_discrete_path_integral() {
    let beta = 1.0 / T_GHZ;
    for m in [16, 64] {
        let exact = common::discrete_harmonic_energy(common::EC, common::EL, beta, m);
        let (e, err) = harmonic_run(m);
        assert!((e - exact).abs() < 3.0 * err, "M = {m}: {e} ± {err} vs {exact}");
    }
}

#[test]
fn toy_chain_samples_boltzmann_weights() {
    let (chi2, critical) = common::toy_chain_chi_square(4, 400_000);
    assert!(chi2 < critical, "χ² = {chi2}, critical {critical}");
}

#[test]
fn two_qubit_tim_matches_dense_thermal_energy() {
    let model = QubitModel {
        offset: 3.0,
        ..QubitModel::tim(vec![1.36, 1.2], vec![0.3, -0.1], &[((0, 1), 0.25)])
    };
    let beta = 1.0 / T_GHZ;
    let exact = exact_thermal_energy(&model, beta).unwrap();
    for m in [32, 64] {
        let mut config = PimcConfig::new(beta, m).scaled_down(10);
        config.sample_stride = 100;
        config.rng_seed = m as u64;
        let s = run_pimc_tim(&model, &config).unwrap();
        assert!(
            (s.mean_energy - exact).abs() < 3.0 * s.std_error,
            "M = {m}: {} ± {} vs {exact}",
            s.mean_energy,
            s.std_error
        );
    }
}

#[test]
fn identical_seeds_reproduce_bitwise() {
    let p = common::weak_pair();
    let mut config = PimcConfig::new(1.0 / T_GHZ, 8);
    config.total_iterations = 200_000;
    config.equilibration_iterations = 50_000;
    config.sample_stride = 100;
    config.n_chains = 3;
    let a = run_pimc_flux(&p, &config).unwrap();
    let b = run_pimc_flux(&p, &config).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.chain_means.len(), 3);
    assert_ne!(a.chain_means[0], a.chain_means[1]);
}

//! Fixtures shared by the benchmarks: a single qubit and a capacitively
//! coupled pair with the usual device parameters.

use std::f64::consts::PI;

use fluxqmc_core::{build_params, ChargingConvention, CircuitSpec, HamiltonianParams, Inductive, Junction};
use nalgebra::DMatrix;

const EC: f64 = 0.124;
const EL: f64 = 704.0;
const EJ: f64 = 1600.0;
const PHI_CJJ: f64 = 0.68555 * PI;

fn junction(tilt: f64) -> Junction {
    Junction {
        ej_ghz: EJ,
        phi_cjj: PHI_CJJ,
        phi_q: PI + tilt,
    }
}

pub fn single_qubit() -> HamiltonianParams {
    HamiltonianParams::new(
        DMatrix::from_element(1, 1, EC),
        DMatrix::from_element(1, 1, EL),
        vec![junction(0.0).effective_ej()],
        vec![PI],
    )
    .expect("valid single qubit")
}

/// Two qubits joined by `cc` fF, charging diagonal held at the single-qubit value.
pub fn pair(cc: f64, tilts: [f64; 2]) -> HamiltonianParams {
    let coupling = DMatrix::from_row_slice(2, 2, &[0.0, cc, cc, 0.0]);
    let spec = CircuitSpec::from_charging_energy(
        &[EC, EC],
        &coupling,
        ChargingConvention::TotalDiagonal,
        Inductive::EnergyGhz(DMatrix::identity(2, 2) * EL),
        vec![junction(tilts[0]), junction(tilts[1])],
    )
    .expect("valid pair");
    build_params(&spec).expect("valid pair")
}

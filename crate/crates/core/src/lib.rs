//! Flux-qubit circuit toolkit: circuit Hamiltonians, exact diagonalization on
//! flux grids, projection onto qubit models with stoquasticity analysis, and
//! path-integral Monte Carlo in the flux and spin representations.

pub mod circuit;
pub mod eigen;
pub mod error;
pub mod linalg;
pub mod pauli;
pub mod pimc;
pub mod projection;
pub mod spectral;
pub mod stoquastic;
mod serde_matrix;
pub mod units;

pub use circuit::{
    build_params, ChargingConvention, CircuitSpec, HamiltonianParams, Inductive, Junction, Minimum,
};
pub use error::{Error, Result};
pub use projection::{
    build_tim, project_symmetric_energy_basis, project_two_qubit, Coupling, QubitBasis, QubitModel,
};
pub use spectral::{solve_spectrum, solve_thermal, FluxGrid, Operator, SpectralResult};
pub use stoquastic::{check_stoquastic, StoquasticReport, Verdict};

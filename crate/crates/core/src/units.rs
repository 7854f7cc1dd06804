//! Physical constants and conversions into frequency units.
//!
//! Energies are stored as `E/h` in GHz and inverse temperatures as `h·β` in ns,
//! so the Boltzmann exponent is the plain product of the two.

/// Elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Planck constant (J·s).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Superconducting flux quantum h/2e (Wb).
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);

/// `e²/2h` expressed in GHz·fF: `E_C/h [GHz] = CHARGING_GHZ_FF · (C⁻¹)[1/fF]`.
pub const CHARGING_GHZ_FF: f64 =
    ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * PLANCK) * 1e15 / 1e9;

/// `Φ₀²/4π²h` expressed in GHz·nH: `E_L/h [GHz] = INDUCTIVE_GHZ_NH · (L⁻¹)[1/nH]`.
pub const INDUCTIVE_GHZ_NH: f64 = FLUX_QUANTUM * FLUX_QUANTUM
    / (4.0 * std::f64::consts::PI * std::f64::consts::PI * PLANCK)
    * 1e9
    / 1e9;

/// Inverse temperature `h·β` in ns for a temperature given as `(hβ)⁻¹` in GHz.
pub fn beta_from_ghz(temperature_ghz: f64) -> f64 {
    1.0 / temperature_ghz
}

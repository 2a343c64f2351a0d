//! Physical constants and shared numerical tolerances.
//!
//! All frequencies and loss rates exposed by this crate are ordinary
//! frequencies in Hz (cycles per second). Formulas that require angular
//! quantities insert the 2π factors internally; photon energies ħω always
//! use the angular frequency.

/// Reduced Planck constant in J·s (CODATA 2018).
pub const HBAR: f64 = 1.054571817e-34;

/// Vacuum permittivity in F/m (CODATA 2018).
pub const EPSILON_0: f64 = 8.8541878128e-12;

/// Speed of light in vacuum in m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default pump-detuning acceptance window, as a fraction of the red-mode
/// total linewidth. A pump further than this from the red resonance is
/// rejected rather than silently treated as on-resonance.
pub const PUMP_DETUNING_TOLERANCE: f64 = 0.01;

/// Residual threshold in Hz below which the frequency-matching solver
/// declares success. Far below every linewidth handled by this crate.
pub const MATCHING_RESIDUAL_TOLERANCE_HZ: f64 = 1e3;

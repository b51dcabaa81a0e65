//! Normalizations of the closed-form kernels, pinned by the partial-wave
//! calibration (`calibration::calibrate`) and frozen here.

use std::f64::consts::PI;

/// Prefactor of the geometric coefficient A: 1/(4π).
pub const C_GEO: f64 = 1.0 / (4.0 * PI);
/// Prefactor of the diffractive coefficient B: 1/(4π²).
pub const C_DIFF: f64 = 1.0 / (4.0 * PI * PI);
/// Free heat/Schrödinger kernel c_free·T^{-1}e^{-|x-y|²/(4T)}: 1/(4π).
pub const C_FREE: f64 = 1.0 / (4.0 * PI);
/// Free spectral density c_sm·λ·J_0(λ|x-y|): 1/(2π).
pub const C_SM: f64 = 1.0 / (2.0 * PI);

/// Below this distance of Φ from ℤ the diffractive term is dropped.
pub const INTEGER_FLUX_GUARD: f64 = 1e-8;

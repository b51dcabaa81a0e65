//! Closed-form and partial-wave kernels of the Aharonov-Bohm operator.

pub mod calibration;
mod coeff;
pub mod constants;
mod evolution;
mod grid;
mod spectral;

pub use coeff::{
    coeff_a, coeff_b, coeff_b_complex, diffractive_rate, poisson_closed_form, poisson_closed_form_complex,
    poisson_truncated_sum, GeometricDistances,
};
pub use constants::{C_DIFF, C_FREE, C_GEO, C_SM, INTEGER_FLUX_GUARD};
pub use evolution::{
    heat_kernel_closed, heat_kernel_series, kernel_closed, kernel_series, kernel_series_spectrum, modes_needed,
    schrodinger_kernel_closed, schrodinger_kernel_closed_complex, schrodinger_kernel_series, KernelEval,
    KernelOptions,
};
pub use grid::{KernelGrid, KernelKind, KernelMethod};
pub use spectral::{
    resolvent_mode, spectral_measure_closed, spectral_measure_series, stone_check, stone_value, ResolventSide,
};

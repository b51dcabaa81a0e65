//! Mode-wise evolution of initial data and frequency-localized propagator kernels.

mod datum;
mod flow;
mod localized;
mod state;

pub use datum::{RadialDatum, ANGULAR_NORM};
pub use flow::{Equation, FlowSpec};
pub use localized::{
    localized_kernel, localized_kernel_sweep, low_kernel, low_kernel_sweep, windowed_kernel_sweep, SpectralSource,
};
pub use state::{angle_count, angle_grid, FieldState, ModeComponent, SpectralFilter};

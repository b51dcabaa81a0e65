//! The angular operator (i∂_θ + α(θ))² + a(θ) on the circle.

mod flux;
mod galerkin;
mod jacobi;
mod trig;

pub use flux::{explicit_eigenpair, ExplicitEigenfunction, FluxConfig};
pub use galerkin::{
    asymptotics_check, galerkin_matrix, minimum_truncation, solve_angular, AngularSpectrum,
};
pub use jacobi::{jacobi_eigen, HermitianMatrix};
pub use trig::{convolve, TrigPoly};

//! Explicit kernels, spectral calculus and dispersive-estimate harness for the
//! planar Aharonov-Bohm operator `(i∇ + A/|x|)² + a(θ)/|x|²`.

pub mod angular;
pub mod error;
pub mod estimates;
pub mod kernels;
pub mod propagators;
pub mod quad;
pub mod specfun;
pub mod transforms;
pub mod cli;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// A point of the punctured plane in polar form.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Self {
        let tau = std::f64::consts::TAU;
        let theta = theta.rem_euclid(tau);
        PolarPoint { r, theta }
    }

    pub fn to_cartesian(self) -> (f64, f64) {
        (self.r * self.theta.cos(), self.r * self.theta.sin())
    }

    pub fn dist(self, other: PolarPoint) -> f64 {
        let d2 = self.r * self.r + other.r * other.r
            - 2.0 * self.r * other.r * (self.theta - other.theta).cos();
        d2.max(0.0).sqrt()
    }
}

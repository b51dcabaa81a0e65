use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::specfun::smooth_step;
use crate::transforms::{bump, weber_rhs};
use crate::Result;

/// Radial profile of one angular component of the initial data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialDatum {
    /// r^ν e^{−r²/(4S)}; Hankel transform (2S)^{ν+1}ρ^ν e^{−Sρ²}.
    Gaussian { spread: f64 },
    /// (2S)^{-1}e^{−(r²+r₀²)/(4S)}I_ν(r r₀/(2S)), a Gaussian ring at r₀;
    /// Hankel transform e^{−Sρ²}J_ν(r₀ρ).
    Ring { spread: f64, center: f64 },
    /// Smooth compactly supported bump on [inner, outer] (physical space only).
    Annulus { inner: f64, outer: f64 },
    /// Frequency-space packet φ(2^{−j}ρ)e^{iρ·shift}.
    Window { band: i32, shift: f64 },
}

/// Frequency cutoff for Gaussian factors e^{−Sρ²}.
fn gaussian_cutoff(spread: f64) -> f64 {
    (45.0 / spread).sqrt()
}

impl RadialDatum {
    /// Whether the Hankel transform is available in closed form.
    pub fn has_spectrum(&self) -> bool {
        !matches!(self, RadialDatum::Annulus { .. })
    }

    /// Hankel transform of order ν at frequency ρ.
    pub fn spectral(&self, nu: f64, rho: f64) -> Result<Complex64> {
        Ok(match *self {
            RadialDatum::Gaussian { spread } => {
                let v = (2.0 * spread).powf(nu + 1.0) * rho.powf(nu) * (-spread * rho * rho).exp();
                Complex64::new(v, 0.0)
            }
            RadialDatum::Ring { spread, center } => {
                Complex64::new((-spread * rho * rho).exp() * crate::specfun::bessel_j(nu, center * rho)?, 0.0)
            }
            RadialDatum::Annulus { .. } => {
                return Err(crate::Error::Parameter(
                    "annulus data are not band limited; use a ring datum for spectral evolution".into(),
                ))
            }
            RadialDatum::Window { band, shift } => {
                Complex64::new(0.0, rho * shift).exp() * bump(rho * 2f64.powi(-band))
            }
        })
    }

    /// Interval outside which the transform is below double precision.
    pub fn frequency_support(&self) -> (f64, f64) {
        match *self {
            RadialDatum::Gaussian { spread } | RadialDatum::Ring { spread, .. } => (0.0, gaussian_cutoff(spread)),
            RadialDatum::Annulus { inner, outer } => (0.0, 64.0 / (outer - inner)),
            RadialDatum::Window { band, .. } => (2f64.powi(band - 1), 2f64.powi(band + 1)),
        }
    }

    /// Frequencies where the transform is not analytic.
    pub fn knots(&self) -> Vec<f64> {
        match *self {
            RadialDatum::Window { band, .. } => crate::transforms::DyadicWindow::Band(band).knots(),
            _ => Vec::new(),
        }
    }

    /// Oscillation rate of the transform in ρ.
    pub fn oscillation(&self) -> f64 {
        match *self {
            RadialDatum::Gaussian { .. } => 0.0,
            RadialDatum::Ring { center, .. } => center,
            RadialDatum::Annulus { outer, .. } => outer,
            RadialDatum::Window { shift, .. } => shift.abs(),
        }
    }

    /// Radius beyond which the physical profile is negligible.
    pub fn extent(&self) -> f64 {
        match *self {
            RadialDatum::Gaussian { spread } => (4.0 * spread * 45.0).sqrt(),
            RadialDatum::Ring { spread, center } => center + (4.0 * spread * 45.0).sqrt(),
            RadialDatum::Annulus { outer, .. } => outer,
            RadialDatum::Window { band, shift } => shift.abs() + 96.0 * 2f64.powi(-band),
        }
    }

    /// Physical profile after heat time T (Re T ≥ 0, T = 0 for the datum
    /// itself), when a closed form exists.
    pub fn evolved_closed(&self, nu: f64, time: Complex64, r: f64) -> Option<Result<Complex64>> {
        match *self {
            RadialDatum::Gaussian { spread } => {
                let total = time + spread;
                let ratio = (total.inv() * spread).powf(nu + 1.0);
                Some(Ok(ratio * r.powf(nu) * (-(r * r) / (total * 4.0)).exp()))
            }
            RadialDatum::Ring { spread, center } => Some(weber_rhs(nu, time + spread, r, center)),
            RadialDatum::Annulus { inner, outer } if time.norm() == 0.0 => {
                let w = outer - inner;
                let u = (r - inner) / w;
                let up = smooth_step(4.0 * u);
                let down = smooth_step(4.0 * (1.0 - u));
                Some(Ok(Complex64::new(up * down, 0.0)))
            }
            _ => None,
        }
    }
}

/// Angular normalization: |ψ_k| = (2π)^{-1/2} for the explicit eigenfunctions.
pub const ANGULAR_NORM: f64 = 0.398_942_280_401_432_7;

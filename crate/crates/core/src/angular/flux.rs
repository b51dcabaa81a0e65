use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::trig::TrigPoly;
use crate::{Error, Result};

/// Magnetic profile α(θ) and electric profile a(θ) of the operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxConfig {
    pub alpha: TrigPoly,
    #[serde(default)]
    pub a: TrigPoly,
}

impl FluxConfig {
    pub fn new(alpha: TrigPoly, a: TrigPoly) -> Self {
        FluxConfig { alpha, a }
    }

    /// Constant α with no electric potential.
    pub fn constant(flux: f64) -> Self {
        FluxConfig { alpha: TrigPoly::constant(flux), a: TrigPoly::default() }
    }

    pub fn with_potential(mut self, a: TrigPoly) -> Self {
        self.a = a;
        self
    }

    /// Φ = (2π)^{-1}∫α.
    pub fn mean_flux(&self) -> f64 {
        self.alpha.mean()
    }

    /// Distance from Φ to the nearest integer.
    pub fn flux_distance_to_integer(&self) -> f64 {
        let phi = self.mean_flux();
        (phi - phi.round()).abs()
    }

    /// min_k |k − Φ|², the Hardy constant of the magnetic gradient.
    pub fn hardy_constant(&self) -> f64 {
        self.flux_distance_to_integer().powi(2)
    }

    /// Φ − ⌊Φ⌋ ∈ [0, 1).
    pub fn reduced_flux(&self) -> f64 {
        let phi = self.mean_flux();
        phi - phi.floor()
    }

    /// Φ − ⌊Φ + 1/2⌋ ∈ [−1/2, 1/2).
    pub fn centered_flux(&self) -> f64 {
        let phi = self.mean_flux();
        phi - (phi + 0.5).floor()
    }

    pub fn is_resonant(&self) -> bool {
        let twice = 2.0 * self.mean_flux();
        (twice - twice.round()).abs() < 1e-12
    }

    pub fn has_potential(&self) -> bool {
        !self.a.is_zero()
    }

    /// sup of the negative part of a.
    pub fn negative_part_sup(&self) -> f64 {
        (-self.a.minimum()).max(0.0)
    }

    /// Checks finiteness and the negative-part bound ‖a_-‖_∞ < min_k |k − Φ|².
    pub fn validate(&self) -> Result<()> {
        let all = self.alpha.cos.iter().chain(&self.alpha.sin).chain(&self.a.cos).chain(&self.a.sin);
        if all.clone().any(|c| !c.is_finite()) {
            return Err(Error::Config("non-finite coefficient in alpha or a".into()));
        }
        if self.has_potential() {
            let neg = self.negative_part_sup();
            let bound = self.hardy_constant();
            if neg > 0.0 && neg >= bound {
                return Err(Error::NegativePartBound { neg_sup: neg, bound });
            }
        }
        Ok(())
    }

    /// e^{i(∫_{θ2}^{θ1} α − Φ(θ1 − θ2))}: the multiplier relating this profile to
    /// the constant profile with the same mean.
    pub fn gauge_factor(&self, theta1: f64, theta2: f64) -> Complex64 {
        let b = self.alpha.oscillating_primitive(theta1) - self.alpha.oscillating_primitive(theta2);
        Complex64::new(0.0, b).exp()
    }

    /// ∫_{θ1}^{θ2} α.
    pub fn alpha_integral(&self, theta1: f64, theta2: f64) -> f64 {
        self.alpha.primitive(theta2) - self.alpha.primitive(theta1)
    }
}

/// The eigenfunction φ_k of the purely magnetic angular operator.
#[derive(Debug, Clone)]
pub struct ExplicitEigenfunction {
    pub k: i64,
    alpha: TrigPoly,
}

impl ExplicitEigenfunction {
    /// (2π)^{-1/2} exp(−i(θ(k+Φ) − ∫_0^θ α)).
    pub fn eval(&self, theta: f64) -> Complex64 {
        let phase = -(self.k as f64 * theta - self.alpha.oscillating_primitive(theta));
        Complex64::new(0.0, phase).exp() / (2.0 * PI).sqrt()
    }
}

/// Eigenvalue (k+Φ)² and eigenfunction φ_k for a ≡ 0.
pub fn explicit_eigenpair(k: i64, flux: &FluxConfig) -> Result<(f64, ExplicitEigenfunction)> {
    if flux.has_potential() {
        return Err(Error::Parameter("explicit eigenpairs need a ≡ 0".into()));
    }
    let mu = (k as f64 + flux.mean_flux()).powi(2);
    Ok((mu, ExplicitEigenfunction { k, alpha: flux.alpha.clone() }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validator_names_the_bound() {
        let f = FluxConfig::constant(0.5).with_potential(TrigPoly::new(vec![0.0, -0.3], vec![]));
        let err = f.validate().unwrap_err();
        assert!(err.to_string().contains("negative part bound"));
        let ok = FluxConfig::constant(0.5).with_potential(TrigPoly::new(vec![0.0, -0.2], vec![]));
        assert!(ok.validate().is_ok());
    }

    #[test]
    fn explicit_pair_solves_the_eigen_equation() {
        // (i∂ + α)² φ = μ φ checked with fourth-order differences
        let flux = FluxConfig::new(TrigPoly::new(vec![0.5, 0.3], vec![]), TrigPoly::default());
        let (mu, phi) = explicit_eigenpair(1, &flux).unwrap();
        assert!((mu - 2.25).abs() < 1e-15);
        let h = 1e-3;
        for i in 0..16 {
            let t = 0.37 * i as f64;
            let d1 = |f: &dyn Fn(f64) -> Complex64, t: f64| {
                (f(t - 2.0 * h) - f(t - h) * 8.0 + f(t + h) * 8.0 - f(t + 2.0 * h)) / (12.0 * h)
            };
            let i_unit = Complex64::new(0.0, 1.0);
            let inner = |s: f64| i_unit * d1(&|x| phi.eval(x), s) + phi.eval(s) * flux.alpha.eval(s);
            let outer = i_unit * d1(&inner, t) + inner(t) * flux.alpha.eval(t);
            assert!((outer - phi.eval(t) * mu).norm() < 1e-7, "t={t}");
            let expected_phase = Complex64::new(0.0, 0.3 * t.sin() - t).exp() / (2.0 * PI).sqrt();
            assert!((phi.eval(t) - expected_phase).norm() < 1e-15);
        }
    }
}

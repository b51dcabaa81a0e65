use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::constants::{C_DIFF, C_GEO, INTEGER_FLUX_GUARD};
use crate::angular::FluxConfig;
use crate::{Error, PolarPoint, Result};

/// Distances |x−y| and d_s = (r₁² + r₂² + 2r₁r₂ cosh s)^{1/2}.
#[derive(Debug, Clone, Copy)]
pub struct GeometricDistances {
    pub r1: f64,
    pub r2: f64,
    pub d: f64,
}

impl GeometricDistances {
    pub fn new(x: PolarPoint, y: PolarPoint) -> Self {
        GeometricDistances { r1: x.r, r2: y.r, d: x.dist(y) }
    }

    pub fn d_s(&self, s: f64) -> f64 {
        (self.r1 * self.r1 + self.r2 * self.r2 + 2.0 * self.r1 * self.r2 * s.cosh()).sqrt()
    }

    /// d_s at complex s (principal square root).
    pub fn d_s_complex(&self, s: Complex64) -> Complex64 {
        (s.cosh() * (2.0 * self.r1 * self.r2) + self.r1 * self.r1 + self.r2 * self.r2).sqrt()
    }
}

/// Angle reduced to (−π, π].
pub(crate) fn wrap_pi(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(TAU) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

/// sin(|Ā|π)e^{−|Ā|s} + sin(Āπ)·((e^{−s} − cos(Δθ+π))sinh(Ās) + i sin(Δθ+π)cosh(Ās)) / (cosh s − cos(Δθ+π)),
/// the closed form of Σ_j sin(π|j+Ā|)e^{−s|j+Ā|}e^{ijΔθ}, at complex s.
pub fn poisson_closed_form_complex(s: Complex64, dtheta: f64, abar: f64) -> Result<Complex64> {
    if abar == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let c = (dtheta + PI).cos();
    let sn = (dtheta + PI).sin();
    let den = s.cosh() - c;
    if den.norm() < 1e-14 {
        return Err(Error::Degenerate(format!("Poisson closed form pole at s={s}, dtheta={dtheta}")));
    }
    let a = abar.abs();
    let first = (-s * a).exp() * (a * PI).sin();
    let num = ((-s).exp() - c) * (s * abar).sinh() + Complex64::new(0.0, sn) * (s * abar).cosh();
    Ok(first + num * (abar * PI).sin() / den)
}

/// Real-s form of [`poisson_closed_form_complex`].
pub fn poisson_closed_form(s: f64, dtheta: f64, abar: f64) -> Result<Complex64> {
    poisson_closed_form_complex(Complex64::new(s, 0.0), dtheta, abar)
}

/// Σ_{|j| ≤ n} sin(π|j+Ā|)e^{−s|j+Ā|}e^{ijΔθ}.
pub fn poisson_truncated_sum(s: f64, dtheta: f64, abar: f64, n: i64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in -n..=n {
        let m = (j as f64 + abar).abs();
        acc += Complex64::new(0.0, j as f64 * dtheta).exp() * ((PI * m).sin() * (-s * m).exp());
    }
    acc
}

/// Geometric coefficient A(θ₁, θ₂) = c_geo·e^{i∫_{θ₁}^{θ₂}α}·χ, where χ = 1 for
/// |θ₂−θ₁| < π and e^{−2πiΦ·sgn(θ₂−θ₁)} past π (angles taken in [0, 2π)).
/// At |θ₂−θ₁| = π the two branches are averaged.
pub fn coeff_a(theta1: f64, theta2: f64, flux: &FluxConfig) -> Complex64 {
    let t1 = theta1.rem_euclid(TAU);
    let t2 = theta2.rem_euclid(TAU);
    let delta = t2 - t1;
    let phase = Complex64::new(0.0, flux.alpha_integral(t1, t2)).exp();
    let far = Complex64::new(0.0, -TAU * flux.mean_flux() * delta.signum()).exp();
    let gap = delta.abs() - PI;
    let branch = if gap.abs() < 1e-13 {
        (far + 1.0) * 0.5
    } else if gap < 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        far
    };
    phase * branch * C_GEO
}

/// Diffractive coefficient at complex s:
/// B = −c_diff·e^{i∫_{θ₂}^{θ₁}α − iα̃(θ₁−θ₂)}·P(s, θ₂−θ₁, α̃), α̃ = Φ − ⌊Φ⌋,
/// with P the Poisson closed form.
pub fn coeff_b_complex(s: Complex64, theta1: f64, theta2: f64, flux: &FluxConfig) -> Result<Complex64> {
    if flux.flux_distance_to_integer() < INTEGER_FLUX_GUARD {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let at = flux.reduced_flux();
    let delta = theta1 - theta2;
    let gauge = flux.alpha_integral(theta2, theta1) - at * delta;
    let mut dth = wrap_pi(-delta);
    // exactly on the indicator boundary the odd part is dropped (midpoint)
    if (dth.abs() - PI).abs() < 1e-12 {
        dth = PI;
    }
    let p = poisson_closed_form_complex(s, dth, at)?;
    Ok(-Complex64::new(0.0, gauge).exp() * p * C_DIFF)
}

/// Diffractive coefficient at real s ≥ 0.
pub fn coeff_b(s: f64, theta1: f64, theta2: f64, flux: &FluxConfig) -> Result<Complex64> {
    if s < 0.0 {
        return Err(Error::Domain(format!("s must be >= 0, got {s}")));
    }
    coeff_b_complex(Complex64::new(s, 0.0), theta1, theta2, flux)
}

/// Decay rate min(α̃, 1 − α̃) of the diffractive coefficient in s.
pub fn diffractive_rate(flux: &FluxConfig) -> f64 {
    let at = flux.reduced_flux();
    at.min(1.0 - at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::TrigPoly;

    #[test]
    fn poisson_matches_truncated_sum() {
        for abar in [0.3, -0.45, 0.7] {
            for dth in [1.0, -2.0, 0.0] {
                let c = poisson_closed_form(0.7, dth, abar).unwrap();
                let s = poisson_truncated_sum(0.7, dth, abar, 80);
                assert!((c - s).norm() < 1e-13, "abar={abar} dth={dth}");
            }
        }
        assert!(poisson_closed_form(0.0, PI, 0.3).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let f0 = FluxConfig::constant(0.0);
        assert!((coeff_a(0.3, 2.0, &f0) - C_GEO).norm() < 1e-15);
        assert_eq!(coeff_b(1.0, 0.3, 2.0, &f0).unwrap(), Complex64::new(0.0, 0.0));
        let f = FluxConfig::constant(0.5);
        let a = coeff_a(0.2, 0.2 + PI / 2.0, &f);
        assert!((a - Complex64::from_polar(C_GEO, PI / 4.0)).norm() < 1e-15);
        let a = coeff_a(0.2, 0.2 + 1.5 * PI, &f);
        assert!((a - Complex64::from_polar(C_GEO, 0.75 * PI - PI)).norm() < 1e-15);
        for s in [0.1, 1.0, 3.0] {
            let b = coeff_b(s, 1.0, 1.0, &f).unwrap();
            let want = -C_DIFF * (-s / 2.0f64).exp() * (1.0 + (s / 2.0).tanh());
            assert!((b - want).norm() < 1e-15, "s={s}");
        }
    }

    #[test]
    fn gauge_factor_enters_b() {
        let f = FluxConfig::new(TrigPoly::new(vec![0.3, 0.2], vec![]), TrigPoly::default());
        let g = FluxConfig::constant(0.3);
        let b1 = coeff_b(1.0, 2.0, 1.0, &f).unwrap();
        let b2 = coeff_b(1.0, 2.0, 1.0, &g).unwrap();
        assert!((b1.norm() - b2.norm()).abs() < 1e-15);
        assert!((b1 - b2 * f.gauge_factor(2.0, 1.0)).norm() < 1e-15);
    }
}

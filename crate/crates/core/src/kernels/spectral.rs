use std::f64::consts::PI;

use num_complex::Complex64;

use super::coeff::{coeff_a, coeff_b, coeff_b_complex, diffractive_rate, wrap_pi, GeometricDistances};
use super::constants::{C_SM, INTEGER_FLUX_GUARD};
use super::evolution::KernelOptions;
use crate::angular::FluxConfig;
use crate::estimates::{Criterion, EstimateReport};
use crate::quad::integrate_breaks;
use crate::specfun::{bessel_j, bessel_j_seq, hankel_h, ln_gamma, AmplitudePair, HankelKind};
use crate::{Error, PolarPoint, Result};

/// Argument beyond which a_± are taken from the complex Hankel expansion.
const CONTOUR_START: f64 = 25.0;
/// Angle of the complex tail of the s-contour.
const TAIL_ANGLE: f64 = PI / 4.0;

/// Spectral measure dE_{√L}(λ; x, y) from the closed form
/// (λ/π)[Σ_± a_±(λd)e^{±iλd}A + ∫₀^∞ Σ_± a_±(λd_s)e^{±iλd_s}B(s) ds].
///
/// Once λd_s passes 25 each oscillating branch is continued into the half
/// plane where e^{±iλd_s} decays.
pub fn spectral_measure_closed(
    lambda: f64,
    x: PolarPoint,
    y: PolarPoint,
    flux: &FluxConfig,
    opts: &KernelOptions,
) -> Result<Complex64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("spectral parameter must be > 0, got {lambda}")));
    }
    if !(x.r > 0.0 && y.r > 0.0) {
        return Err(Error::Domain("radii must be positive".into()));
    }
    if flux.has_potential() {
        return Err(Error::Parameter("closed-form spectral measure needs a ≡ 0".into()));
    }
    let pair = AmplitudePair::default();
    let g = GeometricDistances::new(x, y);
    if flux.flux_distance_to_integer() < INTEGER_FLUX_GUARD {
        let phase = Complex64::new(0.0, flux.alpha_integral(y.theta, x.theta)).exp();
        return Ok(phase * (C_SM * lambda * bessel_j(0.0, lambda * g.d)?));
    }
    let geometric = pair.recombine(lambda * g.d) * coeff_a(y.theta, x.theta, flux);

    let rate = diffractive_rate(flux);
    let s_envelope = (-opts.tol.ln() / rate).ceil() + 5.0;
    // start of the complex tail: λd_s = CONTOUR_START
    let target = CONTOUR_START / lambda;
    let cosh_s1 = (target * target - g.r1 * g.r1 - g.r2 * g.r2) / (2.0 * g.r1 * g.r2);
    let s1 = if cosh_s1 <= 1.0 { 0.0 } else { cosh_s1.acosh() };
    let abs_tol = opts.tol * super::constants::C_GEO;

    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    if s1 > 0.0 {
        let gap = PI - wrap_pi(x.theta - y.theta).abs();
        let mut breaks = vec![0.0];
        for f in [0.25, 1.0, 4.0] {
            if gap < 0.5 && f * gap > 1e-300 && f * gap < s1 {
                breaks.push(f * gap);
            }
        }
        // a few breaks per oscillation of J_0(λd_s)
        let n_osc = ((lambda * (g.d_s(s1) - g.d_s(0.0))) / PI).ceil().max(1.0) as usize;
        for j in 1..n_osc.min(200) {
            breaks.push(s1 * j as f64 / n_osc.min(200) as f64);
        }
        breaks.push(s1);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let f = |s: f64| match coeff_b(s, x.theta, y.theta, flux) {
            Ok(b) => pair.recombine(lambda * g.d_s(s)) * b,
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        };
        let q = integrate_breaks(f, &breaks, abs_tol, opts.tol, opts.max_panels);
        total += q.value;
        err += q.error;
    }
    for (kind, sign) in [(HankelKind::First, 1.0), (HankelKind::Second, -1.0)] {
        let beta = sign * TAIL_ANGLE;
        let contour = |v: f64| Complex64::new(s1 + v, beta * v.tanh());
        let dcontour = |v: f64| Complex64::new(1.0, beta / v.cosh().powi(2));
        let mut v_max = s_envelope;
        let mut v = 0.25;
        while v < s_envelope {
            if sign * lambda * g.d_s_complex(contour(v)).im > 40.0 {
                v_max = v;
                break;
            }
            v += 0.25;
        }
        let mut breaks = vec![0.0];
        let mut b = 0.5;
        while b < v_max {
            breaks.push(b);
            b *= 2.0;
        }
        breaks.push(v_max);
        let f = |v: f64| -> Complex64 {
            let s = contour(v);
            let zeta = g.d_s_complex(s) * lambda;
            let amp = AmplitudePair::asymptotic_complex(kind, zeta);
            let b = coeff_b_complex(s, x.theta, y.theta, flux);
            match (amp, b) {
                (Some(a), Ok(b)) => a * (Complex64::new(0.0, sign) * zeta).exp() * b * dcontour(v),
                _ => Complex64::new(f64::NAN, f64::NAN),
            }
        };
        let q = integrate_breaks(f, &breaks, abs_tol, opts.tol, opts.max_panels);
        total += q.value;
        err += q.error;
    }
    if !total.re.is_finite() || !total.im.is_finite() {
        return Err(Error::Degenerate("spectral integrand could not be evaluated".into()));
    }
    if err > 1e3 * abs_tol.max(opts.tol * total.norm()) {
        return Err(Error::Convergence(format!("spectral s-integral error {err:.3e}")));
    }
    Ok((geometric + total) * (lambda / PI))
}

/// Spectral measure by partial waves, λ Σ_{|k|≤k_max} φ_k(θ₁)φ̄_k(θ₂)J_{ν_k}(λr₁)J_{ν_k}(λr₂).
/// Returns the value and a bound on the omitted modes.
pub fn spectral_measure_series(
    lambda: f64,
    x: PolarPoint,
    y: PolarPoint,
    flux: &FluxConfig,
    k_max: usize,
) -> Result<(Complex64, f64)> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("spectral parameter must be > 0, got {lambda}")));
    }
    if flux.has_potential() {
        return Err(Error::Parameter("explicit series needs a ≡ 0".into()));
    }
    let phi = flux.mean_flux();
    let nf = phi.floor() as i64;
    let at = phi - phi.floor();
    let km = k_max as i64;
    let up_n = (km + nf + 1).max(0) as usize;
    let down_n = (km - nf).max(0) as usize;
    let seq = |nu0: f64, n: usize| -> Result<(Vec<f64>, Vec<f64>)> {
        if n == 0 {
            return Ok((vec![], vec![]));
        }
        Ok((bessel_j_seq(nu0, lambda * x.r, n - 1)?, bessel_j_seq(nu0, lambda * y.r, n - 1)?))
    };
    let (u1, u2) = seq(at, up_n)?;
    let (d1, d2) = seq(1.0 - at, down_n)?;
    let dtheta = x.theta - y.theta;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in -km..=km {
        let prod = if k >= -nf {
            let i = (k + nf) as usize;
            if i >= u1.len() {
                continue;
            }
            u1[i] * u2[i]
        } else {
            let i = (-k - nf - 1) as usize;
            if i >= d1.len() {
                continue;
            }
            d1[i] * d2[i]
        };
        sum += Complex64::new(0.0, -(k as f64) * dtheta).exp() * prod;
    }
    let value = sum * flux.gauge_factor(x.theta, y.theta) * (lambda / (2.0 * PI));
    // |J_ν(a)J_ν(b)| ≤ (ab/4)^ν/Γ(ν+1)²
    let ab = 0.25 * lambda * lambda * x.r * y.r;
    let mut tail = 0.0;
    for nu0 in [at + up_n as f64, 1.0 - at + down_n as f64] {
        for n in 0..200 {
            let nu = nu0 + n as f64;
            let term = (nu * ab.ln() - 2.0 * ln_gamma(nu + 1.0)).exp();
            tail += term;
            if term < 1e-20 * tail.max(1e-300) {
                break;
            }
        }
    }
    Ok((value, tail * lambda / (2.0 * PI)))
}

/// Side of the real axis for a limiting resolvent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolventSide {
    /// (L_ν − λ² − i0)^{-1}
    Upper,
    /// (L_ν − λ² + i0)^{-1}
    Lower,
}

/// Radial kernel of the limiting resolvent of one partial wave,
/// ±(iπ/2)J_ν(λr_<)H^{(1,2)}_ν(λr_>).
pub fn resolvent_mode(side: ResolventSide, nu: f64, lambda: f64, r1: f64, r2: f64) -> Result<Complex64> {
    if !(lambda > 0.0 && r1 > 0.0 && r2 > 0.0) {
        return Err(Error::Domain("resolvent needs λ, r₁, r₂ > 0".into()));
    }
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    let j = bessel_j(nu, lambda * lo)?;
    let (kind, sign) = match side {
        ResolventSide::Upper => (HankelKind::First, 1.0),
        ResolventSide::Lower => (HankelKind::Second, -1.0),
    };
    Ok(hankel_h(kind, nu, lambda * hi)? * Complex64::new(0.0, sign * PI / 2.0) * j)
}

/// Stone's formula (λ/iπ)Σ_{|k|≤k_max} φ_kφ̄_k(R_+ − R_−) at one point pair.
pub fn stone_value(lambda: f64, x: PolarPoint, y: PolarPoint, flux: &FluxConfig, k_max: usize) -> Result<Complex64> {
    if flux.has_potential() {
        return Err(Error::Parameter("Stone's formula here uses the explicit spectrum (a ≡ 0)".into()));
    }
    let phi = flux.mean_flux();
    let dtheta = x.theta - y.theta;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in -(k_max as i64)..=(k_max as i64) {
        let nu = (k as f64 + phi).abs();
        let jump = resolvent_mode(ResolventSide::Upper, nu, lambda, x.r, y.r)?
            - resolvent_mode(ResolventSide::Lower, nu, lambda, x.r, y.r)?;
        // Y_ν overflows once the mode is far below the noise floor; J_νH_ν then is negligible
        if !jump.re.is_finite() || !jump.im.is_finite() {
            continue;
        }
        sum += Complex64::new(0.0, -(k as f64) * dtheta).exp() * jump;
    }
    Ok(sum * flux.gauge_factor(x.theta, y.theta) / (2.0 * PI) * (lambda / (Complex64::i() * PI)))
}

/// Compares Stone's formula with the closed-form spectral measure over the
/// given pairs; passes when the largest relative error is ≤ `tol`.
pub fn stone_check(
    lambda: f64,
    pairs: &[(PolarPoint, PolarPoint)],
    flux: &FluxConfig,
    k_max: usize,
    tol: f64,
) -> Result<EstimateReport> {
    let mut rel = Vec::with_capacity(pairs.len());
    for &(x, y) in pairs {
        let stone = stone_value(lambda, x, y, flux, k_max)?;
        let closed = spectral_measure_closed(lambda, x, y, flux, &KernelOptions::default())?;
        rel.push((stone - closed).norm() / closed.norm().max(1e-300));
    }
    Ok(EstimateReport::new("stone_formula")
        .grid("lambda", lambda)
        .grid("flux", flux.mean_flux())
        .grid("k_max", k_max)
        .grid("pairs", pairs.len())
        .series("relative_error", rel)
        .criterion(Criterion::AtMost { series: "relative_error".into(), limit: tol })
        .finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_matches_series() {
        let pts = [
            (PolarPoint::new(1.0, 0.3), PolarPoint::new(1.5, 2.0)),
            (PolarPoint::new(0.7, 0.1), PolarPoint::new(0.9, 3.5)),
            (PolarPoint::new(1.0, 1.0), PolarPoint::new(1.0, 1.0)),
        ];
        for alpha in [0.3, 0.5, -1.2] {
            let flux = FluxConfig::constant(alpha);
            for lambda in [0.5, 2.0, 9.0] {
                for (x, y) in pts {
                    let c = spectral_measure_closed(lambda, x, y, &flux, &KernelOptions::default()).unwrap();
                    let (s, tail) = spectral_measure_series(lambda, x, y, &flux, 120).unwrap();
                    assert!(tail < 1e-14);
                    assert!((c - s).norm() < 1e-9 * (1.0 + s.norm()), "α={alpha} λ={lambda}: {c} vs {s}");
                }
            }
        }
    }

    #[test]
    fn free_density_and_stone() {
        let x = PolarPoint::new(1.0, 0.0);
        let y = PolarPoint::new(2.0, 1.0);
        let lambda = 1.7;
        let (s, _) = spectral_measure_series(lambda, x, y, &FluxConfig::constant(0.0), 120).unwrap();
        let want = C_SM * lambda * bessel_j(0.0, lambda * x.dist(y)).unwrap();
        assert!((s - want).norm() < 1e-13);
        let flux = FluxConfig::constant(0.37);
        let stone = stone_value(lambda, x, y, &flux, 60).unwrap();
        let (series, _) = spectral_measure_series(lambda, x, y, &flux, 60).unwrap();
        assert!((stone - series).norm() < 1e-12, "{stone} vs {series}");
        let report = stone_check(lambda, &[(x, y)], &flux, 60, 1e-8).unwrap();
        assert!(report.pass);
    }
}

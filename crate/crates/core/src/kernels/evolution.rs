use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coeff::{coeff_a, coeff_b_complex, diffractive_rate, wrap_pi, GeometricDistances};
use super::constants::{C_FREE, INTEGER_FLUX_GUARD};
use crate::angular::{minimum_truncation, solve_angular, AngularSpectrum, FluxConfig};
use crate::quad::integrate_breaks;
use crate::specfun::{bessel_i_scaled, bessel_i_seq_scaled, bessel_i_tail_bound_ln};
use crate::{Error, PolarPoint, Result};

/// Accuracy controls for kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelOptions {
    pub tol: f64,
    pub max_panels: usize,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions { tol: 1e-12, max_panels: 4000 }
    }
}

/// A kernel value stored as `mantissa · exp(log_factor)` so that heat kernels
/// far in the Gaussian tail keep their relative accuracy.
#[derive(Debug, Clone, Copy)]
pub struct KernelEval {
    pub mantissa: Complex64,
    pub log_factor: Complex64,
    /// Absolute error bound on the mantissa (quadrature estimate or series tail).
    pub error: f64,
    /// Heat time T of e^{−TL}.
    pub time: Complex64,
    pub dist_sq: f64,
    /// Quadrature panels or retained modes.
    pub work: usize,
}

impl KernelEval {
    pub fn value(&self) -> Complex64 {
        self.mantissa * self.log_factor.exp()
    }

    pub fn value_error(&self) -> f64 {
        self.error * self.log_factor.re.exp()
    }

    /// T·e^{|x−y|²/(4T)}·K.
    pub fn gauss_scaled(&self) -> Complex64 {
        let shift = self.log_factor + self.time.ln() + self.dist_sq / (self.time * 4.0);
        self.mantissa * shift.exp()
    }

    pub fn gauss_scaled_error(&self) -> f64 {
        let shift = self.log_factor + self.time.ln() + self.dist_sq / (self.time * 4.0);
        self.error * shift.re.exp()
    }
}

fn check_points(x: PolarPoint, y: PolarPoint) -> Result<()> {
    if !(x.r > 0.0 && y.r > 0.0) || !x.r.is_finite() || !y.r.is_finite() {
        return Err(Error::Domain(format!("radii must be positive, got {} and {}", x.r, y.r)));
    }
    Ok(())
}

fn check_time(time: Complex64) -> Result<()> {
    if time.norm() == 0.0 || time.re < 0.0 || !time.re.is_finite() || !time.im.is_finite() {
        return Err(Error::Domain(format!("time must be nonzero with Re T >= 0, got {time}")));
    }
    Ok(())
}

/// Breakpoints for the s-integral: dyadic in s, refined near 0 when the
/// angular separation is close to π (B then peaks on the scale π − |Δ|).
fn s_breaks(limit: f64, gap: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    if gap < 0.5 {
        for f in [0.25, 1.0, 4.0] {
            let v = f * gap;
            if v > 1e-300 && v < 0.5 && v < limit {
                b.push(v);
            }
        }
    }
    let mut v = 0.5;
    while v < limit {
        b.push(v);
        v *= 2.0;
    }
    b.push(limit);
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// Kernel of e^{−TL} from the closed form T^{-1}e^{−d²/4T}(A + ∫₀^∞ e^{−2r₁r₂(cosh s + cos Δ)/4T}B(s) ds).
///
/// For complex T the s-contour is bent to s = u + iβ·tanh u with β = arg(T)/2,
/// which keeps the Gaussian factor decaying; B has its poles on the imaginary axis.
pub fn kernel_closed(
    time: Complex64,
    x: PolarPoint,
    y: PolarPoint,
    flux: &FluxConfig,
    opts: &KernelOptions,
) -> Result<KernelEval> {
    check_points(x, y)?;
    check_time(time)?;
    if flux.has_potential() {
        return Err(Error::Parameter("closed-form kernels need a ≡ 0; use the series".into()));
    }
    let g = GeometricDistances::new(x, y);
    let dist_sq = g.d * g.d;
    let log_factor = -time.ln() - dist_sq / (time * 4.0);
    if flux.flux_distance_to_integer() < INTEGER_FLUX_GUARD {
        let phase = Complex64::new(0.0, flux.alpha_integral(y.theta, x.theta)).exp();
        return Ok(KernelEval { mantissa: phase * C_FREE, log_factor, error: 0.0, time, dist_sq, work: 0 });
    }
    let geometric = coeff_a(y.theta, x.theta, flux);

    let z = time.inv() * (0.5 * x.r * y.r);
    let cos_delta = (x.theta - y.theta).cos();
    let beta = 0.5 * time.arg();
    let contour = |u: f64| Complex64::new(u, beta * u.tanh());
    let dcontour = |u: f64| Complex64::new(1.0, beta / u.cosh().powi(2));

    let rate = diffractive_rate(flux);
    let s_envelope = (-opts.tol.ln() / rate).ceil() + 5.0;
    let mut s_max = s_envelope;
    let mut u = 0.25;
    while u < s_envelope {
        if (z * (contour(u).cosh() + cos_delta)).re > 40.0 {
            s_max = u;
            break;
        }
        u += 0.25;
    }
    let gap = PI - wrap_pi(x.theta - y.theta).abs();
    let breaks = s_breaks(s_max, gap);

    let integrand = |u: f64| -> Complex64 {
        let s = contour(u);
        match coeff_b_complex(s, x.theta, y.theta, flux) {
            Ok(b) => b * (-(z * (s.cosh() + cos_delta))).exp() * dcontour(u),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let abs_tol = opts.tol * super::constants::C_GEO;
    let q = integrate_breaks(integrand, &breaks, abs_tol, opts.tol, opts.max_panels);
    if !q.value.re.is_finite() || !q.value.im.is_finite() {
        return Err(Error::Degenerate("diffractive integrand hit the Poisson pole".into()));
    }
    let target = abs_tol.max(opts.tol * q.value.norm());
    if q.error > 1e3 * target {
        return Err(Error::Convergence(format!(
            "diffractive integral error {:.3e} exceeds target {target:.3e} after {} panels",
            q.error, q.panels
        )));
    }
    Ok(KernelEval { mantissa: geometric + q.value, log_factor, error: q.error, time, dist_sq, work: q.panels })
}

/// Heat kernel e^{−tL}(x, y), t > 0, by the closed form.
pub fn heat_kernel_closed(t: f64, x: PolarPoint, y: PolarPoint, flux: &FluxConfig) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("heat time must be > 0, got {t}")));
    }
    Ok(kernel_closed(Complex64::new(t, 0.0), x, y, flux, &KernelOptions::default())?.value())
}

/// Schrödinger kernel e^{−itL}(x, y), real t ≠ 0, by the closed form.
pub fn schrodinger_kernel_closed(t: f64, x: PolarPoint, y: PolarPoint, flux: &FluxConfig) -> Result<Complex64> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("Schrödinger time must be finite and nonzero, got {t}")));
    }
    Ok(kernel_closed(Complex64::new(0.0, t), x, y, flux, &KernelOptions::default())?.value())
}

/// Schrödinger kernel e^{−iτL} at complex time τ with Im τ ≤ 0.
pub fn schrodinger_kernel_closed_complex(
    tau: Complex64,
    x: PolarPoint,
    y: PolarPoint,
    flux: &FluxConfig,
) -> Result<Complex64> {
    Ok(kernel_closed(tau * Complex64::i(), x, y, flux, &KernelOptions::default())?.value())
}

/// Scaling shared by all partial-wave sums:
/// K = (2T)^{-1}e^{−(r₁²+r₂²)/4T + Re z}·Σ_k φ_k(θ₁)φ̄_k(θ₂)e^{−Re z}I_{ν_k}(z), z = r₁r₂/2T.
fn series_frame(time: Complex64, x: PolarPoint, y: PolarPoint) -> (Complex64, Complex64) {
    let z = time.inv() * (0.5 * x.r * y.r);
    let log_factor = -(time * 2.0).ln() - (x.r * x.r + y.r * y.r) / (time * 4.0) + z.re;
    (z, log_factor)
}

/// Bound on Σ_{n≥0} e^{−Re z}|I_{ν0+n}(z)|·weight.
fn tail_sum(nu0: f64, z: Complex64, weight: f64) -> f64 {
    let mut total = 0.0;
    for n in 0..400 {
        let ln_b = bessel_i_tail_bound_ln(nu0 + n as f64, z) - z.re;
        let term = weight * ln_b.exp();
        total += term;
        if n > 4 && term < 1e-20 * total.max(1e-300) {
            break;
        }
    }
    total
}

/// Partial-wave sum over the explicit spectrum (a ≡ 0), |k| ≤ k_max.
pub fn kernel_series(
    time: Complex64,
    x: PolarPoint,
    y: PolarPoint,
    flux: &FluxConfig,
    k_max: usize,
) -> Result<KernelEval> {
    check_points(x, y)?;
    check_time(time)?;
    if flux.has_potential() {
        return Err(Error::Parameter("explicit series needs a ≡ 0".into()));
    }
    let (z, log_factor) = series_frame(time, x, y);
    let phi = flux.mean_flux();
    let n_floor = phi.floor();
    let at = phi - n_floor;
    let nf = n_floor as i64;
    let km = k_max as i64;
    // k ≥ −⌊Φ⌋ has order (k + ⌊Φ⌋) + α̃; k < −⌊Φ⌋ has order (−k − ⌊Φ⌋ − 1) + 1 − α̃
    let up_count = (km + nf).max(-1) + 1;
    let down_count = (km - nf).max(0);
    let up = if up_count > 0 { bessel_i_seq_scaled(at, z, up_count as usize - 1)? } else { vec![] };
    let down =
        if down_count > 0 { bessel_i_seq_scaled(1.0 - at, z, down_count as usize - 1)? } else { vec![] };
    let gauge = flux.gauge_factor(x.theta, y.theta);
    let dtheta = x.theta - y.theta;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut modes = 0;
    for k in -km..=km {
        let ival = if k >= -nf {
            up.get((k + nf) as usize)
        } else {
            down.get((-k - nf - 1) as usize)
        };
        let Some(ival) = ival else { continue };
        // φ_k(θ₁)φ̄_k(θ₂) = e^{−ikΔ}·gauge/(2π)
        sum += Complex64::new(0.0, -(k as f64) * dtheta).exp() * ival;
        modes += 1;
    }
    sum *= gauge / (2.0 * PI);
    let w = 1.0 / (2.0 * PI);
    let tail = tail_sum(at + up.len() as f64, z, w) + tail_sum(1.0 - at + down.len() as f64, z, w);
    Ok(KernelEval { mantissa: sum, log_factor, error: tail, time, dist_sq: x.dist(y).powi(2), work: modes })
}

/// Partial-wave sum over a computed angular spectrum (orders √μ). Only
/// eigenfunctions with |label| ≤ M/2 are used.
pub fn kernel_series_spectrum(
    time: Complex64,
    x: PolarPoint,
    y: PolarPoint,
    spectrum: &AngularSpectrum,
    flux: &FluxConfig,
) -> Result<KernelEval> {
    check_points(x, y)?;
    check_time(time)?;
    let (z, log_factor) = series_frame(time, x, y);
    let k_lim = (spectrum.truncation / 2) as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut modes = 0;
    for idx in 0..spectrum.len() {
        if spectrum.labels[idx].abs() > k_lim {
            continue;
        }
        let mu = spectrum.eigenvalues[idx];
        if mu < 0.0 {
            return Err(Error::Domain(format!("negative angular eigenvalue {mu}")));
        }
        let ival = bessel_i_scaled(mu.sqrt(), z)?;
        sum += spectrum.eval(idx, x.theta) * spectrum.eval(idx, y.theta).conj() * ival;
        modes += 1;
    }
    // beyond the cutoff μ_k ≥ (|k| − |Φ|)² + min a
    let a_min = flux.a.minimum().min(0.0);
    let phi = flux.mean_flux().abs();
    let first = ((k_lim + 1) as f64 - phi).max(0.0);
    let nu0 = (first * first + a_min).max(0.0).sqrt().max(first - 1.0).max(0.0);
    let tail = 2.0 * tail_sum(nu0, z, 1.5 / (2.0 * PI));
    Ok(KernelEval { mantissa: sum, log_factor, error: tail, time, dist_sq: x.dist(y).powi(2), work: modes })
}

/// Number of partial waves after which the tail bound drops below `tol` (relative to e^{Re z}).
pub fn modes_needed(time: Complex64, x: PolarPoint, y: PolarPoint, tol: f64) -> usize {
    let z = time.inv() * (0.5 * x.r * y.r);
    let mut k = 8usize;
    while k < 100_000 {
        if tail_sum(k as f64 - 1.0, z, 1.0) < tol {
            return k;
        }
        k += k / 4 + 4;
    }
    k
}

/// Schrödinger kernel e^{−iτL} by partial waves; needs Im τ < 0 (τ = |t|e^{−iγ}).
pub fn schrodinger_kernel_series(
    tau: Complex64,
    x: PolarPoint,
    y: PolarPoint,
    flux: &FluxConfig,
    k_max: usize,
) -> Result<Complex64> {
    if !(tau.im < 0.0) {
        return Err(Error::Domain(format!("series needs Im τ < 0 for convergence, got {tau}")));
    }
    Ok(kernel_series(tau * Complex64::i(), x, y, flux, k_max)?.value())
}

/// Heat kernel by partial waves; the only route when a ≢ 0. Uses the explicit
/// spectrum for a ≡ 0 and a Galerkin spectrum of truncation `m_trunc` otherwise.
pub fn heat_kernel_series(
    t: f64,
    x: PolarPoint,
    y: PolarPoint,
    flux: &FluxConfig,
    m_trunc: usize,
) -> Result<KernelEval> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("heat time must be > 0, got {t}")));
    }
    flux.validate()?;
    let time = Complex64::new(t, 0.0);
    if flux.has_potential() {
        let spec = solve_angular(flux, m_trunc.max(minimum_truncation(flux)))?;
        kernel_series_spectrum(time, x, y, &spec, flux)
    } else {
        kernel_series(time, x, y, flux, m_trunc)
    }
}

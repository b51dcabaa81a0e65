use num_complex::Complex64;
use rayon::prelude::*;

use super::flow::{Equation, FlowSpec};
use crate::angular::FluxConfig;
use crate::kernels::{spectral_measure_closed, spectral_measure_series, KernelOptions};
use crate::transforms::{DyadicWindow, RadialGrid};
use crate::{Error, PolarPoint, Result};

/// Largest λ-grid a single localized kernel may use.
const MAX_LAMBDA_NODES: usize = 2_000_000;

/// How dE(λ; x, y) is evaluated inside the λ-integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralSource {
    Closed(KernelOptions),
    /// Partial-wave sum over |k| ≤ k_max.
    Series { k_max: usize },
}

impl Default for SpectralSource {
    fn default() -> Self {
        SpectralSource::Closed(KernelOptions::default())
    }
}

impl SpectralSource {
    fn density(&self, lambda: f64, x: PolarPoint, y: PolarPoint, flux: &FluxConfig) -> Result<Complex64> {
        match self {
            SpectralSource::Closed(opts) => spectral_measure_closed(lambda, x, y, flux, opts),
            SpectralSource::Series { k_max } => {
                let (v, tail) = spectral_measure_series(lambda, x, y, flux, *k_max)?;
                if tail > 1e-10 * v.norm().max(1e-300) && tail > 1e-14 {
                    return Err(Error::Convergence(format!("mode series tail {tail:.2e} at λ = {lambda}")));
                }
                Ok(v)
            }
        }
    }
}

/// λ-quadrature nodes for the window with KG phase up to |t_max| and pair spread.
fn lambda_grid(window: DyadicWindow, t_max: f64, x: PolarPoint, y: PolarPoint) -> Result<RadialGrid> {
    let (lo, hi) = window.support();
    let rate = t_max.abs() + x.r + y.r + 1.0;
    let grid = RadialGrid::graded_with_knots(lo, hi, rate, &window.knots());
    if grid.len() > MAX_LAMBDA_NODES {
        return Err(Error::Resolution(format!(
            "λ-grid needs {} nodes to resolve |t| = {t_max} on [{lo}, {hi}]",
            grid.len()
        )));
    }
    Ok(grid)
}

/// ∫ e^{it√(1+λ²)}·window(λ)·dE(λ; x, y) dλ for each t, tabulating dE once.
pub fn windowed_kernel_sweep(
    window: DyadicWindow,
    times: &[f64],
    x: PolarPoint,
    y: PolarPoint,
    flux: &FluxConfig,
    source: SpectralSource,
) -> Result<Vec<Complex64>> {
    let t_max = times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let grid = lambda_grid(window, t_max, x, y)?;
    let weighted: Result<Vec<Complex64>> = grid
        .nodes
        .par_iter()
        .zip(grid.weights.par_iter())
        .map(|(&lambda, &w)| {
            let win = window.eval(lambda);
            if win == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            // grid weights carry a factor λ
            Ok(source.density(lambda, x, y, flux)? * (win * w / lambda))
        })
        .collect();
    let weighted = weighted?;
    let kg = FlowSpec::new(Equation::KleinGordon);
    Ok(times
        .iter()
        .map(|&t| grid.nodes.iter().zip(&weighted).map(|(&l, v)| v * kg.multiplier(t, l)).sum())
        .collect())
}

fn check_band(k: i32) -> Result<()> {
    if k < 1 {
        return Err(Error::Parameter(format!("localized kernel needs k >= 1, got {k}")));
    }
    Ok(())
}

/// U_k(t)(x, y) with the window φ(2^{−k}λ).
pub fn localized_kernel(k: i32, t: f64, x: PolarPoint, y: PolarPoint, flux: &FluxConfig) -> Result<Complex64> {
    check_band(k)?;
    Ok(windowed_kernel_sweep(DyadicWindow::Band(k), &[t], x, y, flux, SpectralSource::default())?[0])
}

pub fn localized_kernel_sweep(
    k: i32,
    times: &[f64],
    x: PolarPoint,
    y: PolarPoint,
    flux: &FluxConfig,
    source: SpectralSource,
) -> Result<Vec<Complex64>> {
    check_band(k)?;
    windowed_kernel_sweep(DyadicWindow::Band(k), times, x, y, flux, source)
}

/// U^low(t)(x, y) with the window φ₀.
pub fn low_kernel(t: f64, x: PolarPoint, y: PolarPoint, flux: &FluxConfig) -> Result<Complex64> {
    Ok(windowed_kernel_sweep(DyadicWindow::Low, &[t], x, y, flux, SpectralSource::default())?[0])
}

pub fn low_kernel_sweep(
    times: &[f64],
    x: PolarPoint,
    y: PolarPoint,
    flux: &FluxConfig,
    source: SpectralSource,
) -> Result<Vec<Complex64>> {
    windowed_kernel_sweep(DyadicWindow::Low, times, x, y, flux, source)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::C_SM;
    use crate::specfun::bessel_j;

    #[test]
    fn diagonal_at_time_zero_is_positive() {
        let flux = FluxConfig::constant(0.5);
        let x = PolarPoint::new(0.7, 1.0);
        let v = localized_kernel(2, 0.0, x, x, &flux).unwrap();
        assert!(v.re > 0.0 && v.im.abs() < 1e-10 * v.re);
        let v = low_kernel(0.0, x, x, &flux).unwrap();
        assert!(v.re > 0.0 && v.im.abs() < 1e-10 * v.re);
    }

    #[test]
    fn integer_flux_matches_free_density() {
        let flux = FluxConfig::constant(1.0);
        let (x, y) = (PolarPoint::new(0.4, 0.2), PolarPoint::new(0.9, 2.0));
        let d = x.dist(y);
        let got = localized_kernel_sweep(3, &[0.0, 1.5], x, y, &flux, SpectralSource::default()).unwrap();
        let window = DyadicWindow::Band(3);
        let grid = lambda_grid(window, 1.5, x, y).unwrap();
        let phase = Complex64::new(0.0, flux.alpha_integral(y.theta, x.theta)).exp();
        for (t, g) in [0.0, 1.5].iter().zip(&got) {
            let kg = FlowSpec::new(Equation::KleinGordon);
            let want: Complex64 = grid
                .nodes
                .iter()
                .zip(&grid.weights)
                .map(|(&l, &w)| kg.multiplier(*t, l) * window.eval(l) * w * C_SM * bessel_j(0.0, l * d).unwrap())
                .sum::<Complex64>()
                * phase;
            assert!((g - want).norm() < 1e-9 * want.norm().max(1.0), "{g} vs {want}");
        }
    }

    #[test]
    fn low_kernel_matches_mode_series() {
        let flux = FluxConfig::constant(0.5);
        let (x, y) = (PolarPoint::new(1.0, 0.3), PolarPoint::new(2.0, 2.5));
        let times = [0.0, 4.0, 64.0];
        let closed = low_kernel_sweep(&times, x, y, &flux, SpectralSource::default()).unwrap();
        let series = low_kernel_sweep(&times, x, y, &flux, SpectralSource::Series { k_max: 40 }).unwrap();
        for (a, b) in closed.iter().zip(&series) {
            assert!((a - b).norm() < 1e-5 * b.norm().max(1e-3), "{a} vs {b}");
        }
    }

    #[test]
    fn rejects_band_zero() {
        let x = PolarPoint::new(1.0, 0.0);
        assert!(localized_kernel(0, 0.0, x, x, &FluxConfig::constant(0.5)).is_err());
    }
}

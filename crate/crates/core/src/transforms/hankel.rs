use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::radial::{RadialGrid, RadialProfile};
use crate::estimates::{Criterion, EstimateReport};
use crate::quad::integrate_breaks;
use crate::specfun::{bessel_i_scaled, bessel_j};
use crate::{Error, Result};

/// (H_ν f)(ρ) = ∫ J_ν(rρ) f(r) r dr evaluated on `target` nodes.
pub fn hankel_transform_onto(nu: f64, f: &RadialProfile, target: &RadialGrid, bandwidth: f64) -> Result<RadialProfile> {
    if !(nu >= 0.0) {
        return Err(Error::Domain(format!("Hankel order must be >= 0, got {nu}")));
    }
    let fw: Vec<Complex64> = f.values.iter().zip(&f.grid.weights).map(|(v, w)| v * *w).collect();
    let values: Result<Vec<Complex64>> = target
        .nodes
        .par_iter()
        .map(|&rho| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (&r, &v) in f.grid.nodes.iter().zip(&fw) {
                if v.re == 0.0 && v.im == 0.0 {
                    continue;
                }
                acc += v * bessel_j(nu, r * rho)?;
            }
            Ok(acc)
        })
        .collect();
    let mut out = RadialProfile { grid: target.clone(), values: values?, bandwidth, warnings: f.warnings.clone() };
    out.check_truncation(1e-10);
    Ok(out)
}

/// Hankel transform of order ν onto the conjugate grid: the output lives on
/// [0, f.bandwidth] and resolves oscillations up to f's radius.
pub fn hankel_transform(nu: f64, f: &RadialProfile) -> Result<RadialProfile> {
    let target = RadialGrid::graded(f.bandwidth, f.grid.radius);
    hankel_transform_onto(nu, f, &target, f.grid.radius)
}

/// H_ν[F(ρ)·H_ν f]: the multiplier F(√L) on one angular mode with Bessel
/// order ν. `spread` is a bound on |d arg F/dρ| (how far F moves mass
/// outward); the output grid is widened by it.
pub fn mode_multiplier(
    multiplier: impl Fn(f64) -> Complex64 + Sync,
    nu: f64,
    f: &RadialProfile,
    spread: f64,
) -> Result<RadialProfile> {
    let out_radius = f.grid.radius + spread.abs();
    let freq = RadialGrid::graded(f.bandwidth, out_radius);
    let mut g = hankel_transform_onto(nu, f, &freq, out_radius)?;
    for (v, &rho) in g.values.iter_mut().zip(&g.grid.nodes) {
        *v *= multiplier(rho);
    }
    let edge = g.values.last().map(|v| v.norm()).unwrap_or(0.0);
    if edge > 1e-8 * g.max_abs().max(f64::MIN_POSITIVE) {
        g.warnings.push(format!("multiplied transform not negligible at frequency cutoff {}", f.bandwidth));
    }
    let target = if spread == 0.0 { f.grid.clone() } else { RadialGrid::graded(out_radius, f.bandwidth) };
    hankel_transform_onto(nu, &g, &target, f.bandwidth)
}

/// ∫₀^∞ e^{−tρ²}J_ν(r₁ρ)J_ν(r₂ρ)ρ dρ by adaptive quadrature.
pub fn weber_lhs(nu: f64, t: Complex64, r1: f64, r2: f64) -> Result<(Complex64, f64)> {
    if !(t.re > 0.0) {
        return Err(Error::Domain(format!("Weber integral needs Re t > 0, got {t}")));
    }
    let top = (40.0 / t.re).sqrt();
    let rate = r1 + r2 + 2.0 * t.im.abs() * top;
    let width = (PI / rate.max(1e-300)).min(top / 8.0);
    let n = (top / width).ceil() as usize;
    let breaks: Vec<f64> = (0..=n).map(|i| top * i as f64 / n as f64).collect();
    let f = |rho: f64| -> Complex64 {
        let (Ok(a), Ok(b)) = (bessel_j(nu, r1 * rho), bessel_j(nu, r2 * rho)) else {
            return Complex64::new(f64::NAN, 0.0);
        };
        (-t * rho * rho).exp() * (a * b * rho)
    };
    let q = integrate_breaks(f, &breaks, 1e-15, 1e-13, 20_000);
    Ok((q.value, q.error))
}

/// (2t)^{-1}e^{−(r₁²+r₂²)/4t}I_ν(r₁r₂/2t).
pub fn weber_rhs(nu: f64, t: Complex64, r1: f64, r2: f64) -> Result<Complex64> {
    let z = (t * 2.0).inv() * (r1 * r2);
    let ln = -(t * 2.0).ln() - (r1 * r1 + r2 * r2) / (t * 4.0) + z.re;
    Ok(bessel_i_scaled(nu, z)? * ln.exp())
}

/// Quadrature check of the Weber identity; passes when the relative error is ≤ `tol`.
pub fn weber_check(nu: f64, t: Complex64, r1: f64, r2: f64, tol: f64) -> Result<EstimateReport> {
    let (lhs, qerr) = weber_lhs(nu, t, r1, r2)?;
    let rhs = weber_rhs(nu, t, r1, r2)?;
    let diff = (lhs - rhs).norm();
    let rel = if diff == 0.0 { 0.0 } else { diff / rhs.norm().max(f64::MIN_POSITIVE) };
    Ok(EstimateReport::new("weber_identity")
        .grid("nu", nu)
        .grid("t", t)
        .grid("r1", r1)
        .grid("r2", r2)
        .series("relative_error", vec![rel])
        .series("lhs_abs", vec![lhs.norm()])
        .series("quadrature_error", vec![qerr])
        .criterion(Criterion::AtMost { series: "relative_error".into(), limit: tol })
        .finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn gaussian_is_self_reciprocal() {
        let f = RadialProfile::from_fn(9.0, 9.0, |r| c((-r * r / 2.0).exp()));
        let g = hankel_transform(0.0, &f).unwrap();
        for (rho, v) in g.grid.nodes.iter().zip(&g.values) {
            assert!((v - c((-rho * rho / 2.0).exp())).norm() < 1e-8, "rho={rho}");
        }
        assert!(g.warnings.is_empty());
        let nu = 0.3;
        let f = RadialProfile::from_fn(9.0, 9.0, |r| c(r.powf(nu) * (-r * r / 2.0).exp()));
        let g = hankel_transform(nu, &f).unwrap();
        for (rho, v) in g.grid.nodes.iter().zip(&g.values) {
            assert!((v - c(rho.powf(nu) * (-rho * rho / 2.0).exp())).norm() < 1e-8);
        }
        assert!((f.norm_sq() - g.norm_sq()).abs() < 1e-10);
    }

    #[test]
    fn weber_identity_half_order() {
        let lhs = weber_lhs(0.5, c(1.0), 1.0, 1.0).unwrap().0;
        // I_{1/2}(z) = sqrt(2/(πz)) sinh z
        let exact = 0.5 * (-0.5f64).exp() * (2.0 / (PI * 0.5)).sqrt() * 0.5f64.sinh();
        assert!((lhs - c(exact)).norm() < 1e-12);
        let rep = weber_check(0.3, Complex64::new(0.5, 0.2), 2.0, 3.0, 1e-7).unwrap();
        assert!(rep.pass, "{:?}", rep.values);
    }
}

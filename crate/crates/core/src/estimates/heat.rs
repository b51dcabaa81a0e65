use super::report::{Criterion, EstimateReport};
use crate::angular::{minimum_truncation, solve_angular, FluxConfig};
use crate::kernels::{kernel_closed, kernel_series, kernel_series_spectrum, modes_needed, KernelEval, KernelOptions};
use crate::{Complex64, Error, PolarPoint, Result};

/// Gaussian exponents c in e^{|x−y|²/(ct)}.
pub const GAUSSIAN_EXPONENTS: [f64; 3] = [4.0, 4.5, 8.0];
/// Pairs are also sampled at this multiple of √t, deep in the Gaussian regime.
const FAR_SCALE: f64 = 10.0;
/// Series values whose estimated cancellation error exceeds this fraction are skipped.
const CANCELLATION_TOL: f64 = 1e-6;

/// Allowed relative variation of C(c) across the time grid.
pub const HEAT_VARIATION_LIMIT: f64 = 0.10;

/// Whether a(π − θ) = a(π + θ): every sine coefficient of a(· + π) vanishes,
/// i.e. a has no sine terms.
pub fn is_symmetric_potential(flux: &FluxConfig) -> bool {
    flux.a.sin.iter().skip(1).all(|c| c.abs() < 1e-14)
}

/// The heat-bound hypothesis for a ≠ 0: non-resonant flux or symmetric a.
/// The negative-part bound is not required here; a negative angular
/// eigenvalue is still rejected when the kernel is evaluated.
pub fn check_heat_hypothesis(flux: &FluxConfig) -> Result<()> {
    if flux.has_potential() && flux.is_resonant() && !is_symmetric_potential(flux) {
        return Err(Error::Parameter(
            "heat bound hypothesis violated: resonant flux needs a(pi - theta) = a(pi + theta)".into(),
        ));
    }
    Ok(())
}

/// C(c) = max over pairs of |K(t;x,y)|·t·e^{|x−y|²/(ct)} at each t, for c in
/// [`GAUSSIAN_EXPONENTS`]. Pairs are `pairs` together with copies scaled by √t
/// and 10√t. Partial-wave values lost to cancellation are skipped and counted.
/// Passes when C(4) (a ≡ 0) or C(4.5) (a ≠ 0) varies by less than 10%.
pub fn heat_bound_fit(flux: &FluxConfig, times: &[f64], pairs: &[(PolarPoint, PolarPoint)]) -> Result<EstimateReport> {
    check_heat_hypothesis(flux)?;
    let scaled_pairs = |t: f64| {
        pairs.iter().flat_map(move |&(x, y)| {
            [1.0, t.sqrt(), FAR_SCALE * t.sqrt()].map(|s| (PolarPoint::new(x.r * s, x.theta), PolarPoint::new(y.r * s, y.theta)))
        })
    };
    let spectrum = if flux.has_potential() {
        let mut modes = 0;
        for &t in times {
            for (x, y) in scaled_pairs(t) {
                modes = modes.max(modes_needed(Complex64::new(t, 0.0), x, y, 1e-15));
            }
        }
        Some(solve_angular(flux, 2 * modes + minimum_truncation(flux))?)
    } else {
        None
    };
    let integer = flux.flux_distance_to_integer() < crate::kernels::INTEGER_FLUX_GUARD;
    let eval = |t: f64, x: PolarPoint, y: PolarPoint| -> Result<KernelEval> {
        let time = Complex64::new(t, 0.0);
        match &spectrum {
            Some(spec) => kernel_series_spectrum(time, x, y, spec, flux),
            None if integer => kernel_series(time, x, y, flux, 64),
            None => kernel_closed(time, x, y, flux, &KernelOptions::default()),
        }
    };
    let mut columns = vec![Vec::with_capacity(times.len()); GAUSSIAN_EXPONENTS.len()];
    let mut skipped = Vec::with_capacity(times.len());
    for &t in times {
        if !(t > 0.0) {
            return Err(Error::Parameter(format!("heat times must be positive, got {t}")));
        }
        let mut best = [0.0f64; GAUSSIAN_EXPONENTS.len()];
        let mut skip = 0.0;
        for (x, y) in scaled_pairs(t) {
            let k = eval(t, x, y)?;
            // partial-wave terms are O(1/2π) before the common factor; their
            // rounding is amplified by e^{Re log_factor}/|K|
            let rounding = f64::EPSILON * (k.work.max(1) as f64) / (2.0 * std::f64::consts::PI);
            if spectrum.is_some() || integer {
                if rounding > CANCELLATION_TOL * k.mantissa.norm() {
                    skip += 1.0;
                    continue;
                }
            }
            let base = k.gauss_scaled().norm();
            for (b, c) in best.iter_mut().zip(GAUSSIAN_EXPONENTS) {
                let extra = k.dist_sq / t * (1.0 / c - 0.25);
                *b = b.max(base * extra.exp());
            }
        }
        for (col, b) in columns.iter_mut().zip(best) {
            col.push(b);
        }
        skipped.push(skip);
    }
    let tested = if flux.has_potential() { "C4.5" } else { "C4" };
    let mut report = EstimateReport::new("heat_gaussian_bound")
        .grid("flux", flux.mean_flux())
        .grid("potential", flux.has_potential())
        .grid("negative_part_bound_ok", flux.validate().is_ok())
        .grid("truncation", spectrum.as_ref().map(|s| s.truncation).unwrap_or(0))
        .grid("pairs", pairs.len())
        .grid("variation_limit", HEAT_VARIATION_LIMIT)
        .grid("method", if spectrum.is_some() { "galerkin_series" } else if integer { "series" } else { "closed" })
        .grid("cancellation_tol", CANCELLATION_TOL)
        .series("t", times.to_vec())
        .series("skipped_pairs", skipped);
    for (col, c) in columns.into_iter().zip(GAUSSIAN_EXPONENTS) {
        report = report.series(&format!("C{c}"), col);
    }
    Ok(report
        .criterion(Criterion::Finite { series: tested.into() })
        .criterion(Criterion::VariationBelow { series: tested.into(), limit: HEAT_VARIATION_LIMIT })
        .finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::TrigPoly;

    fn pairs() -> Vec<(PolarPoint, PolarPoint)> {
        vec![
            (PolarPoint::new(1.0, 0.0), PolarPoint::new(1.0, 0.0)),
            (PolarPoint::new(1.0, 0.2), PolarPoint::new(1.5, 1.0)),
        ]
    }

    #[test]
    fn free_constant_is_saturated() {
        let r = heat_bound_fit(&FluxConfig::constant(1.0), &[0.1, 1.0], &pairs()).unwrap();
        for v in &r.values["C4"] {
            assert!((v - 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-10, "{v}");
        }
        assert!(r.pass);
    }

    #[test]
    fn resonant_asymmetric_potential_is_rejected() {
        let flux = FluxConfig::constant(0.5).with_potential(TrigPoly::new(vec![0.0], vec![0.0, 0.1]));
        assert!(heat_bound_fit(&flux, &[1.0], &pairs()).unwrap_err().to_string().contains("hypothesis"));
        let sym = FluxConfig::constant(0.5).with_potential(TrigPoly::new(vec![0.0, 0.1], vec![]));
        assert!(check_heat_hypothesis(&sym).is_ok());
    }
}

use num_complex::Complex64;

use super::besov::besov_norm;
use super::norms::{lp_norms, sup_norm};
use super::report::{Criterion, EstimateReport};
use crate::angular::FluxConfig;
use crate::propagators::{
    localized_kernel_sweep, low_kernel_sweep, Equation, FieldState, FlowSpec, SpectralFilter, SpectralSource,
};
use crate::{PolarPoint, Result};

/// Per-decade drift allowed for a bounded ratio.
pub const DRIFT_LIMIT: f64 = 0.15;
/// Allowed max/min of the frequency-localized constants across k.
pub const UNIFORMITY_LIMIT: f64 = 4.0;

/// Unscaled point pairs; localized sweeps shrink them by 2^{−k}.
pub const BASE_PAIRS: [((f64, f64), (f64, f64)); 3] =
    [((1.0, 0.0), (1.0, 0.0)), ((1.0, 0.3), (2.0, 2.5)), ((0.5, 0.0), (3.0, 1.5))];

/// Angles of the second point of the pairs placed on the propagation cone.
const CONE_ANGLES: [f64; 2] = [0.0, 2.0];

/// Data norm and time power of the decay rate for a flow.
fn decay_normalization(flow: FlowSpec, state: &FieldState) -> Result<(&'static str, f64, f64)> {
    Ok(match flow.equation {
        Equation::Schrodinger | Equation::Heat => {
            ("L1", lp_norms(state, None, &[0.0], SpectralFilter::None, 1.0, None)?[0], 1.0)
        }
        Equation::HalfWave => ("homogeneous_besov_3/2", besov_norm(state, 1.5, true)?, 0.5),
        Equation::KleinGordon => ("inhomogeneous_besov_1/2", besov_norm(state, 0.5, false)?, 0.5),
    })
}

/// |t|^γ·sup_x|u(t)|/‖f‖ over the time grid; passes when the running maximum
/// grows by less than 15% across every decade of t.
pub fn decay_sweep(flow: FlowSpec, state: &FieldState, family: &str, times: &[f64]) -> Result<EstimateReport> {
    let (norm_name, norm, power) = decay_normalization(flow, state)?;
    let sups = sup_norm(state, Some(flow), times, SpectralFilter::None)?;
    let ratio: Vec<f64> = times.iter().zip(&sups).map(|(t, s)| t.abs().powf(power) * s.value / norm).collect();
    Ok(EstimateReport::new(&format!("decay_{:?}", flow.equation).to_lowercase())
        .grid("flux", state.flux.mean_flux())
        .grid("family", family)
        .grid("norm", norm_name)
        .grid("norm_value", format!("{norm:.12e}"))
        .grid("time_power", power)
        .grid("drift_limit", DRIFT_LIMIT)
        .series("t", times.to_vec())
        .series("sup", sups.iter().map(|s| s.value).collect())
        .series("sup_bias", sups.iter().map(|s| s.bias).collect())
        .series("ratio", ratio)
        .criterion(Criterion::Finite { series: "ratio".into() })
        .criterion(Criterion::DecadeDriftBelow { series: "ratio".into(), axis: "t".into(), limit: DRIFT_LIMIT })
        .note("sup by coarse scan plus refined patch; sup_bias is the half-resolution difference")
        .finish())
}

/// Time grid {0} ∪ {2^{−k}·2^i : 0 ≤ i ≤ 2k}.
pub fn localized_times(k: i32) -> Vec<f64> {
    let mut t = vec![0.0];
    t.extend((0..=2 * k).map(|i| 2f64.powi(i - k)));
    t
}

/// Largest |U_k(t)(x,y)| at each t over the scaled base pairs and the cone pairs.
pub fn localized_maxima(k: i32, times: &[f64], flux: &FluxConfig, source: SpectralSource) -> Result<Vec<f64>> {
    let scale = 2f64.powi(-k);
    let mut best = vec![0.0f64; times.len()];
    for &((r1, a1), (r2, a2)) in &BASE_PAIRS {
        let (x, y) = (PolarPoint::new(r1 * scale, a1), PolarPoint::new(r2 * scale, a2));
        let vals = localized_kernel_sweep(k, times, x, y, flux, source)?;
        for (b, v) in best.iter_mut().zip(&vals) {
            *b = b.max(v.norm());
        }
    }
    for (ti, &t) in times.iter().enumerate() {
        for &angle in &CONE_ANGLES {
            let (x, y) = (PolarPoint::new(scale, 0.0), PolarPoint::new(scale + t.abs(), angle));
            let v = localized_kernel_sweep(k, &[t], x, y, flux, source)?[0];
            best[ti] = best[ti].max(v.norm());
        }
    }
    Ok(best)
}

/// C_k(η) = max_t |U_k|·2^{−k(3+η)/2}(2^{−k}+|t|)^{(1+η)/2} for each k and η;
/// passes when max_k C_k / min_k C_k < 4 for every η.
pub fn localized_decay_sweep(
    ks: &[i32],
    etas: &[f64],
    flux: &FluxConfig,
    source: SpectralSource,
) -> Result<EstimateReport> {
    let mut report = EstimateReport::new("localized_decay")
        .grid("flux", flux.mean_flux())
        .grid("uniformity_limit", UNIFORMITY_LIMIT)
        .grid("pairs", "base pairs scaled by 2^-k plus cone pairs |x-y| ~ |t|")
        .series("k", ks.iter().map(|&k| k as f64).collect());
    let mut columns = vec![Vec::new(); etas.len()];
    for &k in ks {
        let times = localized_times(k);
        let maxima = localized_maxima(k, &times, flux, source)?;
        let kf = k as f64;
        for (col, &eta) in columns.iter_mut().zip(etas) {
            let c = times
                .iter()
                .zip(&maxima)
                .map(|(t, m)| m * 2f64.powf(-kf * (3.0 + eta) / 2.0) * (2f64.powf(-kf) + t.abs()).powf((1.0 + eta) / 2.0))
                .fold(0.0, f64::max);
            col.push(c);
        }
    }
    for (col, eta) in columns.into_iter().zip(etas) {
        let name = format!("C_eta{eta}");
        report = report
            .series(&name, col)
            .criterion(Criterion::SpreadBelow { series: name, limit: UNIFORMITY_LIMIT });
    }
    Ok(report.finish())
}

/// (1+|t|)·max_pairs|U^low(t)(x,y)| over the base pairs and two cone speeds.
/// Passes when finite and the maximum over the last decade [T/10, T] exceeds
/// the earlier maximum by less than 15%.
pub fn low_decay_sweep(times: &[f64], flux: &FluxConfig, source: SpectralSource) -> Result<EstimateReport> {
    let mut best = vec![0.0f64; times.len()];
    for &((r1, a1), (r2, a2)) in &BASE_PAIRS {
        let vals = low_kernel_sweep(times, PolarPoint::new(r1, a1), PolarPoint::new(r2, a2), flux, source)?;
        for (b, v) in best.iter_mut().zip(&vals) {
            *b = b.max(v.norm());
        }
    }
    for (ti, &t) in times.iter().enumerate() {
        for speed in [0.5, 0.85] {
            let (x, y) = (PolarPoint::new(1.0, 0.0), PolarPoint::new(1.0 + speed * t.abs(), CONE_ANGLES[1]));
            let v: Complex64 = low_kernel_sweep(&[t], x, y, flux, source)?[0];
            best[ti] = best[ti].max(v.norm());
        }
    }
    let scaled: Vec<f64> = times.iter().zip(&best).map(|(t, b)| (1.0 + t.abs()) * b).collect();
    let t_end = times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let (mut early, mut late) = (0.0f64, 0.0f64);
    for (t, v) in times.iter().zip(&scaled) {
        if t.abs() < 0.1 * t_end {
            early = early.max(*v);
        } else {
            late = late.max(*v);
        }
    }
    let growth = if early > 0.0 { late / early - 1.0 } else { f64::INFINITY };
    Ok(EstimateReport::new("low_frequency_decay")
        .grid("flux", flux.mean_flux())
        .grid("growth_limit", DRIFT_LIMIT)
        .series("t", times.to_vec())
        .series("scaled_kernel", scaled)
        .series("final_decade_growth", vec![growth])
        .criterion(Criterion::Finite { series: "scaled_kernel".into() })
        .criterion(Criterion::AtMost { series: "final_decade_growth".into(), limit: DRIFT_LIMIT })
        .finish())
}

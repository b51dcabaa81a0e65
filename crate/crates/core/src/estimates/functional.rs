use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::heat::check_heat_hypothesis;
use super::norms::lp_norms;
use super::report::{Criterion, EstimateReport};
use super::spacetime::{time_norm, PolarSampler, SpaceTimeWindow};
use super::strichartz::{DataFamily, FAMILY_SPREAD_LIMIT};
use crate::angular::FluxConfig;
use crate::propagators::{Equation, FieldState, FlowSpec, SpectralFilter};
use crate::transforms::{DyadicWindow, RadialGrid};
use crate::{Error, Result};

/// Relative step of the five-point radial derivative.
const DERIVATIVE_STEP: f64 = 1e-3;

/// (weighted L² of f/r, magnetic Dirichlet energy) for a ≡ 0, mode by mode:
/// ∫|c_k|²/r² and ∫(|c_k'|² + μ_k|c_k|²/r²) over r dr.
pub fn hardy_terms(state: &FieldState) -> Result<(f64, f64)> {
    if state.flux.has_potential() {
        return Err(Error::Parameter("the Hardy check needs a ≡ 0".into()));
    }
    let reach = state.reach(None, 0.0);
    let grid = RadialGrid::graded(reach, state.bandwidth().max(1.0));
    let offsets = [-2.0, -1.0, 1.0, 2.0];
    let mut radii = grid.nodes.clone();
    for o in offsets {
        radii.extend(grid.nodes.iter().map(|r| r * (1.0 + o * DERIVATIVE_STEP)));
    }
    let (labels, tables) = state.label_tables(None, &[0.0], SpectralFilter::None, &radii)?;
    let n = grid.len();
    let mut weighted = 0.0;
    let mut energy = 0.0;
    for (label, table) in labels.iter().zip(&tables) {
        let mu = state.spectrum.eigenvalues[state.spectrum.index_of(*label).unwrap()];
        let c = &table[0];
        for (i, (&r, &w)) in grid.nodes.iter().zip(&grid.weights).enumerate() {
            let h = r * DERIVATIVE_STEP;
            let d = (c[n + i] - c[2 * n + i] * 8.0 + c[3 * n + i] * 8.0 - c[4 * n + i]) / (12.0 * h);
            let v = c[i].norm_sqr() / (r * r);
            weighted += v * w;
            energy += (d.norm_sqr() + mu * v) * w;
        }
    }
    Ok((weighted, energy))
}

/// min_k|k−Φ|²·∫|f|²/|x|² over ∫|∇_A f|² for each member of `data`.
pub fn hardy_check(flux: &FluxConfig, data: &[(String, FieldState)]) -> Result<EstimateReport> {
    if flux.has_potential() {
        return Err(Error::Parameter("the Hardy check needs a ≡ 0".into()));
    }
    let constant = flux.hardy_constant();
    let terms = data.par_iter().map(|(_, s)| hardy_terms(s)).collect::<Result<Vec<_>>>()?;
    let ratio: Vec<f64> = terms.iter().map(|(w, e)| if constant == 0.0 { 0.0 } else { constant * w / e }).collect();
    let mut report = EstimateReport::new("hardy")
        .grid("flux", flux.mean_flux())
        .grid("hardy_constant", constant)
        .grid("derivative_step", DERIVATIVE_STEP)
        .series("weighted_l2", terms.iter().map(|t| t.0).collect())
        .series("energy", terms.iter().map(|t| t.1).collect())
        .series("ratio", ratio)
        .criterion(Criterion::AtMost { series: "ratio".into(), limit: 1.0 });
    for (name, _) in data {
        report = report.note(format!("datum {name}"));
    }
    Ok(report.finish())
}

/// ‖f‖_{L^q}/‖L^{σ/2}f‖_{L^p} with σ = 2(1/p − 1/q).
pub fn sobolev_ratio(state: &FieldState, p: f64, q: f64) -> Result<f64> {
    let sigma = sobolev_index(p, q)?;
    let top = lp_norms(state, None, &[0.0], SpectralFilter::None, q, None)?[0];
    let bottom = if p == 2.0 {
        state.l2_norm_sq_filtered(SpectralFilter::Power(sigma))?.sqrt()
    } else {
        lp_norms(state, None, &[0.0], SpectralFilter::Power(sigma), p, None)?[0]
    };
    Ok(top / bottom)
}

fn sobolev_index(p: f64, q: f64) -> Result<f64> {
    let sigma = 2.0 * (1.0 / p - 1.0 / q);
    if !(p > 1.0 && q > 1.0 && p.is_finite() && q.is_finite() && (0.0..2.0).contains(&sigma)) {
        return Err(Error::Parameter(format!("Sobolev exponents (p, q) = ({p}, {q}) out of range")));
    }
    Ok(sigma)
}

pub fn sobolev_ratio_check(flux: &FluxConfig, family: &DataFamily, p: f64, q: f64) -> Result<EstimateReport> {
    let sigma = sobolev_index(p, q)?;
    check_heat_hypothesis(flux)?;
    let members = family.members(flux)?;
    let ratio = members.par_iter().map(|(_, _, s)| sobolev_ratio(s, p, q)).collect::<Result<Vec<_>>>()?;
    Ok(EstimateReport::new("sobolev")
        .grid("flux", flux.mean_flux())
        .grid("p", p)
        .grid("q", q)
        .grid("sigma", sigma)
        .grid("band", family.band)
        .grid("spread_limit", FAMILY_SPREAD_LIMIT)
        .series("seed", members.iter().map(|m| m.0 as f64).collect())
        .series("scale", members.iter().map(|m| m.1).collect())
        .series("ratio", ratio)
        .criterion(Criterion::SpreadBelow { series: "ratio".into(), limit: FAMILY_SPREAD_LIMIT })
        .finish())
}

/// Frequency branch of the local smoothing estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothingBranch {
    Low,
    High,
}

/// Smallest √μ over the angular labels carried by the data.
pub fn lowest_angular_frequency(state: &FieldState) -> f64 {
    state
        .labels()
        .iter()
        .map(|&l| state.spectrum.eigenvalues[state.spectrum.index_of(l).unwrap()].max(0.0).sqrt())
        .fold(f64::INFINITY, f64::min)
}

fn check_beta(beta: f64, branch: SmoothingBranch, nu0: f64) -> Result<()> {
    let ok = match branch {
        SmoothingBranch::Low => beta >= 1.0 && beta < 1.0 + nu0,
        SmoothingBranch::High => beta > 0.5 && beta < 1.0 + nu0,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Parameter(format!("beta = {beta} outside the {branch:?} range for nu0 = {nu0}")))
    }
}

/// (‖r^{−β}·window(√L)v‖_{L²_{t,x}}, data norm) for v = e^{it√(1+L)}v₀, which
/// solves the Klein-Gordon equation with v(0) = v₀ and ∂_t v(0) = i√(1+L)v₀.
/// The data norm is ‖v₀‖ + ‖(1+L)^{1/2}v₀‖ on the low branch and
/// 2‖(1+L)^{(β−1/2)/2}v₀‖ on the high branch.
pub fn local_smoothing_norms(
    state: &FieldState,
    beta: f64,
    branch: SmoothingBranch,
    window: &SpaceTimeWindow,
) -> Result<(f64, f64)> {
    let filter = match branch {
        SmoothingBranch::Low => SpectralFilter::Window(DyadicWindow::Low),
        SmoothingBranch::High => SpectralFilter::High,
    };
    let rhs = match branch {
        SmoothingBranch::Low => {
            state.l2_norm_sq_spectral()?.sqrt() + state.l2_norm_sq_filtered(SpectralFilter::Bessel(1.0))?.sqrt()
        }
        SmoothingBranch::High => 2.0 * state.l2_norm_sq_filtered(SpectralFilter::Bessel(beta - 0.5))?.sqrt(),
    };
    if state.components.iter().all(|c| c.amplitude.norm() == 0.0) {
        return Ok((0.0, rhs));
    }
    let sampler = PolarSampler::new(state, FlowSpec::new(Equation::KleinGordon), window, filter, false)?;
    let per_time: Vec<f64> = (0..sampler.times.len())
        .into_par_iter()
        .map(|ti| {
            let a = sampler.angular_l2(ti);
            a.iter()
                .zip(&sampler.radii)
                .zip(&sampler.radial_weights)
                .map(|((v, r), w)| v * r.powf(-2.0 * beta) * w)
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let lhs = time_norm(&sampler.times, &sampler.time_weights, &per_time, 2.0, window.t_max);
    Ok((lhs, rhs))
}

pub fn local_smoothing_check(
    flux: &FluxConfig,
    family: &DataFamily,
    beta: f64,
    branch: SmoothingBranch,
    window: &SpaceTimeWindow,
) -> Result<EstimateReport> {
    let members = family.members(flux)?;
    let nu0 = members.iter().map(|m| lowest_angular_frequency(&m.2)).fold(f64::INFINITY, f64::min);
    check_beta(beta, branch, nu0)?;
    let norms = members
        .iter()
        .map(|(_, _, s)| local_smoothing_norms(s, beta, branch, window))
        .collect::<Result<Vec<_>>>()?;
    Ok(EstimateReport::new("local_smoothing")
        .grid("flux", flux.mean_flux())
        .grid("beta", beta)
        .grid("branch", format!("{branch:?}"))
        .grid("nu0", nu0)
        .grid("band", family.band)
        .grid("min_mode", family.min_mode)
        .grid("t_max", window.t_max)
        .grid("r_min", window.r_min)
        .grid("r_max", window.r_max)
        .grid("spread_limit", FAMILY_SPREAD_LIMIT)
        .series("seed", members.iter().map(|m| m.0 as f64).collect())
        .series("scale", members.iter().map(|m| m.1).collect())
        .series("lhs", norms.iter().map(|n| n.0).collect())
        .series("rhs", norms.iter().map(|n| n.1).collect())
        .series("ratio", norms.iter().map(|n| n.0 / n.1).collect())
        .criterion(Criterion::SpreadBelow { series: "ratio".into(), limit: FAMILY_SPREAD_LIMIT })
        .note("nu0 is the smallest square-root angular eigenvalue among the modes present in the data")
        .finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn hardy_mode_zero_at_half_flux() {
        let flux = FluxConfig::constant(0.5);
        let state = FieldState::gaussian(&flux, 0.0, 1.0, 0).unwrap();
        let (w, e) = hardy_terms(&state).unwrap();
        let ratio = 0.25 * w / e;
        assert!(ratio > 0.0 && ratio <= 1.0, "{ratio}");
        let spread = FieldState::annulus(&flux, 4.0, 6.0, 3).unwrap();
        let (w, e) = hardy_terms(&spread).unwrap();
        assert!(0.25 * w / e < 0.1);
    }

    #[test]
    fn sobolev_equal_exponents_give_one() {
        let flux = FluxConfig::constant(0.5);
        let state = FieldState::lp_random(&flux, 2, 0, 1).unwrap();
        assert!((sobolev_ratio(&state, 2.0, 2.0).unwrap() - 1.0).abs() < 1e-8);
        assert!(sobolev_ratio(&state, 2.0, 1.0).is_err());
    }

    #[test]
    fn zero_data_smooths_to_zero() {
        let flux = FluxConfig::constant(0.5);
        let mut state = FieldState::lp_random(&flux, 2, 1, 1).unwrap();
        for c in state.components.iter_mut() {
            c.amplitude = Complex64::new(0.0, 0.0);
        }
        let (l, r) = local_smoothing_norms(&state, 1.0, SmoothingBranch::High, &SpaceTimeWindow::default()).unwrap();
        assert_eq!((l, r), (0.0, 0.0));
    }

    #[test]
    fn beta_range_is_enforced() {
        assert!(check_beta(0.5, SmoothingBranch::High, 0.5).is_err());
        assert!(check_beta(0.9, SmoothingBranch::Low, 0.5).is_err());
        assert!(check_beta(1.2, SmoothingBranch::Low, 0.5).is_ok());
    }
}

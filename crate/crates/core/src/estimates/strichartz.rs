use rayon::prelude::*;

use super::admissible::AdmissiblePair;
use super::heat::check_heat_hypothesis;
use super::report::{Criterion, EstimateReport};
use super::spacetime::{time_norm, PolarSampler, SpaceTimeWindow};
use crate::angular::FluxConfig;
use crate::propagators::{Equation, FieldState, FlowSpec, SpectralFilter};
use crate::{Error, Result};

/// Ratios between family members must stay within this factor.
pub const FAMILY_SPREAD_LIMIT: f64 = 3.0;

/// Seeded LP data family and the dilations applied to each member.
#[derive(Debug, Clone, PartialEq)]
pub struct DataFamily {
    pub seeds: Vec<u64>,
    pub band: i32,
    pub k_span: i64,
    /// Modes with |label| below this are dropped.
    pub min_mode: i64,
    pub scales: Vec<f64>,
}

impl Default for DataFamily {
    fn default() -> Self {
        DataFamily { seeds: (1..=10).collect(), band: 0, k_span: 2, min_mode: 0, scales: vec![0.5, 1.0, 2.0] }
    }
}

impl DataFamily {
    pub fn members(&self, flux: &FluxConfig) -> Result<Vec<(u64, f64, FieldState)>> {
        let mut out = Vec::new();
        for &seed in &self.seeds {
            let mut base = FieldState::lp_random(flux, seed, self.band, self.k_span)?;
            base.components.retain(|c| c.label.abs() >= self.min_mode);
            for &scale in &self.scales {
                out.push((seed, scale, base.dilated(scale)?));
            }
        }
        Ok(out)
    }
}

/// Regularity allowed by the global Strichartz estimate for this profile:
/// s < 1 always, s < (2+η)/2 when the heat-bound hypothesis holds.
pub fn check_strichartz_range(pair: &AdmissiblePair, flux: &FluxConfig) -> Result<()> {
    if pair.s < 1.0 {
        return Ok(());
    }
    check_heat_hypothesis(flux)?;
    if pair.s < 0.5 * (2.0 + pair.eta) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("regularity s = {} outside the admissible range", pair.s)))
    }
}

/// ‖u‖_{L^q_t L^p_x} on the window and on its first half, for each pair.
pub fn spacetime_norms(
    state: &FieldState,
    flow: FlowSpec,
    pairs: &[AdmissiblePair],
    window: &SpaceTimeWindow,
) -> Result<Vec<(f64, f64)>> {
    let sampler = PolarSampler::new(state, flow, window, SpectralFilter::None, false)?;
    let ps: Vec<f64> = {
        let mut v: Vec<f64> = pairs.iter().map(|p| p.p).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let per_time: Vec<Vec<f64>> = (0..sampler.times.len())
        .into_par_iter()
        .map(|ti| {
            let m = sampler.moduli(ti);
            ps.iter()
                .map(|&p| {
                    let s: f64 = m
                        .iter()
                        .zip(&sampler.radial_weights)
                        .map(|(row, w)| row.iter().map(|v| v.powf(p)).sum::<f64>() * w * sampler.angle_weight)
                        .sum();
                    s.powf(1.0 / p)
                })
                .collect()
        })
        .collect();
    Ok(pairs
        .iter()
        .map(|pair| {
            let pi = ps.iter().position(|&p| p == pair.p).unwrap();
            let vals: Vec<f64> = per_time.iter().map(|row| row[pi]).collect();
            let full = time_norm(&sampler.times, &sampler.time_weights, &vals, pair.q, window.t_max);
            let half = time_norm(&sampler.times, &sampler.time_weights, &vals, pair.q, 0.5 * window.t_max);
            (full, half)
        })
        .collect())
}

fn pair_key(pair: &AdmissiblePair) -> String {
    let q = if pair.q.is_infinite() { "inf".to_string() } else { pair.q.to_string() };
    format!("q{q}_p{}_eta{}", pair.p, pair.eta)
}

/// ‖u‖_{L^q_t L^p_x}/‖u₀‖_{H^s} for the Klein-Gordon flow over a data family,
/// with H^s the inhomogeneous spectral Sobolev space of the operator.
pub fn strichartz_sweep(
    pairs: &[AdmissiblePair],
    flux: &FluxConfig,
    family: &DataFamily,
    window: &SpaceTimeWindow,
) -> Result<EstimateReport> {
    for pair in pairs {
        check_strichartz_range(pair, flux)?;
    }
    let flow = FlowSpec::new(Equation::KleinGordon);
    let members = family.members(flux)?;
    let results: Vec<(Vec<(f64, f64)>, Vec<f64>)> = members
        .iter()
        .map(|(_, _, state)| {
            let norms = spacetime_norms(state, flow, pairs, window)?;
            let data = pairs
                .iter()
                .map(|p| state.l2_norm_sq_filtered(SpectralFilter::Bessel(p.s)).map(f64::sqrt))
                .collect::<Result<Vec<f64>>>()?;
            Ok((norms, data))
        })
        .collect::<Result<_>>()?;
    let mut report = EstimateReport::new("strichartz")
        .grid("flux", flux.mean_flux())
        .grid("t_max", window.t_max)
        .grid("r_min", window.r_min)
        .grid("r_max", window.r_max)
        .grid("time_panel", window.time_panel)
        .grid("band", family.band)
        .grid("k_span", family.k_span)
        .grid("spread_limit", FAMILY_SPREAD_LIMIT)
        .series("seed", members.iter().map(|m| m.0 as f64).collect())
        .series("scale", members.iter().map(|m| m.1).collect());
    for (i, pair) in pairs.iter().enumerate() {
        let key = pair_key(pair);
        let ratio: Vec<f64> = results.iter().map(|(n, d)| n[i].0 / d[i]).collect();
        let change: Vec<f64> = results.iter().map(|(n, _)| (n[i].0 - n[i].1) / n[i].0).collect();
        report = report
            .grid(&format!("{key}_s"), pair.s)
            .series(&format!("ratio_{key}"), ratio)
            .series(&format!("window_doubling_change_{key}"), change)
            .criterion(Criterion::SpreadBelow { series: format!("ratio_{key}"), limit: FAMILY_SPREAD_LIMIT });
    }
    Ok(report
        .note("ratio = space-time norm on the truncated window over the inhomogeneous spectral Sobolev norm of the data")
        .note("window_doubling_change compares the norm on [0, t_max] with the norm on [0, t_max/2]")
        .finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_pair_has_unit_ratio() {
        let flux = FluxConfig::constant(0.5);
        let state = FieldState::lp_random(&flux, 3, 0, 1).unwrap();
        let pair = AdmissiblePair::new(f64::INFINITY, 2.0, 1.0).unwrap();
        let data = state.l2_norm_sq_spectral().unwrap().sqrt();
        let flow = FlowSpec::new(Equation::KleinGordon);
        // the default radius cuts off a little of the data's tail
        for (r_max, tol) in [(32.0, 1e-5), (128.0, 1e-10)] {
            let window = SpaceTimeWindow { t_max: 8.0, r_max, ..Default::default() };
            let norms = spacetime_norms(&state, flow, &[pair], &window).unwrap();
            assert!((norms[0].0 / data - 1.0).abs() < tol, "{}", norms[0].0 / data);
        }
    }
}

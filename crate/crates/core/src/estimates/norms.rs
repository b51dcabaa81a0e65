use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::propagators::{angle_count, angle_grid, FieldState, FlowSpec, SpectralFilter};
use crate::transforms::RadialGrid;
use crate::{Error, Result};

/// Cap on coarse radial samples per sup evaluation.
const MAX_SUP_RADII: usize = 40_000;
/// Points per side of the refinement patch spanning ± one coarse step.
const PATCH_POINTS: usize = 17;
/// Candidate peaks refined per time.
const CANDIDATES: usize = 3;

/// Grid maximum of |u| on a refined patch around the coarse peaks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupValue {
    /// Finest maximum plus the parabolic vertex correction.
    pub value: f64,
    /// Maximum on the finest sampled grid.
    pub grid_max: f64,
    /// Finest minus half-resolution maximum (grid bias estimate).
    pub bias: f64,
    pub radius: f64,
    pub theta: f64,
}

fn effective_bandwidth(state: &FieldState, filter: SpectralFilter) -> f64 {
    state.bandwidth().min(filter.support().1).max(1.0)
}

/// |Σ_c v_c ψ_c(θ)| for each angle.
fn moduli(values: &[Complex64], angular: &[Vec<Complex64>]) -> Vec<f64> {
    angular
        .iter()
        .map(|ang| values.iter().zip(ang).map(|(v, a)| v * a).sum::<Complex64>().norm())
        .collect()
}

/// Rise of the parabola through the three samples around an interior maximum.
fn parabola_gain(left: f64, mid: f64, right: f64) -> f64 {
    let curv = 2.0 * mid - left - right;
    if curv <= 0.0 {
        return 0.0;
    }
    (right - left).powi(2) / (8.0 * curv)
}

fn vertex_gain(grid: &[Vec<f64>], ri: usize, ai: usize) -> f64 {
    let mut gain = 0.0;
    if ri > 0 && ri + 1 < grid.len() {
        gain += parabola_gain(grid[ri - 1][ai], grid[ri][ai], grid[ri + 1][ai]);
    }
    let row = &grid[ri];
    if ai > 0 && ai + 1 < row.len() {
        gain += parabola_gain(row[ai - 1], row[ai], row[ai + 1]);
    }
    gain
}

/// sup_x |filter(√L) u(t)| for each t (u evolved by `flow` after the state's history).
pub fn sup_norm(
    state: &FieldState,
    flow: Option<FlowSpec>,
    times: &[f64],
    filter: SpectralFilter,
) -> Result<Vec<SupValue>> {
    let t_max = times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let reach = state.reach(flow, t_max);
    let hi = effective_bandwidth(state, filter);
    let n_r = ((reach * 2.0 * hi / std::f64::consts::PI).ceil() as usize).clamp(64, MAX_SUP_RADII);
    let h = reach / n_r as f64;
    let radii: Vec<f64> = (0..=n_r).map(|i| i as f64 * h).collect();
    let n_th = angle_count(state);
    let thetas = angle_grid(n_th);
    let dth = TAU / n_th as f64;
    let labels: Vec<i64> = state.components.iter().map(|c| c.label).collect();
    let ang_at = |ths: &[f64]| -> Vec<Vec<Complex64>> {
        ths.iter().map(|&th| labels.iter().map(|&l| state.eigenfunction(l, th)).collect()).collect()
    };
    let coarse_ang = ang_at(&thetas);
    let tables = state.radial_tables(flow, times, filter, &radii)?;
    let mut out = Vec::with_capacity(times.len());
    for (ti, &t) in times.iter().enumerate() {
        // max over θ per radius
        let mut profile: Vec<(f64, usize)> = Vec::with_capacity(radii.len());
        for ri in 0..radii.len() {
            let vals: Vec<Complex64> = tables.iter().map(|c| c[ti][ri]).collect();
            let m = moduli(&vals, &coarse_ang);
            let (ai, v) = m.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
            profile.push((v, ai));
        }
        let mut peaks: Vec<usize> = (0..profile.len())
            .filter(|&i| {
                let left = if i == 0 { f64::NEG_INFINITY } else { profile[i - 1].0 };
                let right = profile.get(i + 1).map(|p| p.0).unwrap_or(f64::NEG_INFINITY);
                profile[i].0 >= left && profile[i].0 >= right
            })
            .collect();
        peaks.sort_by(|&a, &b| profile[b].0.total_cmp(&profile[a].0));
        peaks.truncate(CANDIDATES);
        let coarse_max = peaks.first().map(|&i| profile[i].0).unwrap_or(0.0);
        let mut best = SupValue { value: coarse_max, grid_max: coarse_max, bias: 0.0, radius: 0.0, theta: 0.0 };
        let mut half_max = coarse_max;
        let mut fine_max = coarse_max;
        let mut vertex = 0.0;
        for &pi in &peaks {
            let (r0, th0) = (radii[pi], thetas[profile[pi].1]);
            let step = 2.0 * h / (PATCH_POINTS - 1) as f64;
            let fine: Vec<(usize, f64)> =
                (0..PATCH_POINTS).map(|i| (i, r0 - h + i as f64 * step)).filter(|&(_, r)| r >= 0.0).collect();
            let fr: Vec<f64> = fine.iter().map(|f| f.1).collect();
            let fth: Vec<f64> = if n_th == 1 {
                vec![0.0]
            } else {
                let s = 2.0 * dth / (PATCH_POINTS - 1) as f64;
                (0..PATCH_POINTS).map(|i| th0 - dth + i as f64 * s).collect()
            };
            let fine_ang = ang_at(&fth);
            let patch = state.radial_tables(flow, &[t], filter, &fr)?;
            let grid: Vec<Vec<f64>> = (0..fine.len())
                .map(|ri| moduli(&patch.iter().map(|c| c[0][ri]).collect::<Vec<_>>(), &fine_ang))
                .collect();
            for (ri, &(idx, r)) in fine.iter().enumerate() {
                for (ai, &v) in grid[ri].iter().enumerate() {
                    if v > fine_max {
                        fine_max = v;
                        best.radius = r;
                        best.theta = fth[ai];
                        vertex = vertex_gain(&grid, ri, ai);
                    }
                    if idx % 2 == 0 && (n_th == 1 || ai % 2 == 0) {
                        half_max = half_max.max(v);
                    }
                }
            }
        }
        best.grid_max = fine_max;
        best.bias = (fine_max - half_max).abs();
        best.value = fine_max + vertex;
        out.push(best);
    }
    Ok(out)
}

/// ‖filter(√L) u(t)‖_{L^p} on the disc of radius `radius` (default: the state's reach).
pub fn lp_norms(
    state: &FieldState,
    flow: Option<FlowSpec>,
    times: &[f64],
    filter: SpectralFilter,
    p: f64,
    radius: Option<f64>,
) -> Result<Vec<f64>> {
    if p.is_infinite() {
        return Ok(sup_norm(state, flow, times, filter)?.into_iter().map(|s| s.value).collect());
    }
    if !(p >= 1.0) {
        return Err(Error::Parameter(format!("L^p exponent must be >= 1, got {p}")));
    }
    let t_max = times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let reach = radius.unwrap_or_else(|| state.reach(flow, t_max));
    let grid = RadialGrid::graded(reach, effective_bandwidth(state, filter));
    let n_th = if angle_count(state) == 1 { 1 } else { 2 * angle_count(state) };
    let thetas = angle_grid(n_th);
    let dth = TAU / n_th as f64;
    let table = state.field_table(flow, times, filter, &grid.nodes, &thetas)?;
    Ok(table
        .iter()
        .map(|rows| {
            let s: f64 = rows
                .iter()
                .zip(&grid.weights)
                .map(|(row, w)| row.iter().map(|v| v.norm().powf(p)).sum::<f64>() * w * dth)
                .sum();
            s.powf(1.0 / p)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::FluxConfig;
    use crate::propagators::Equation;

    #[test]
    fn sup_of_free_gaussian_is_exact() {
        // mode 0 at integer flux: u = S/(S+it)·e^{−r²/4(S+it)}/√(2π), peak at r = 0
        let flux = FluxConfig::constant(0.0);
        let s = FieldState::gaussian(&flux, 0.0, 1.0, 0).unwrap();
        let sch = FlowSpec::new(Equation::Schrodinger);
        let sups = sup_norm(&s, Some(sch), &[0.0, 3.0], SpectralFilter::None).unwrap();
        for (t, sv) in [0.0f64, 3.0].iter().zip(&sups) {
            let want = 0.5 / (0.25 + t * t).sqrt() / TAU.sqrt();
            assert!((sv.value - want).abs() < 1e-9, "{} vs {want}", sv.value);
        }
    }

    #[test]
    fn off_centre_peak_is_refined() {
        let flux = FluxConfig::constant(0.5);
        let s = FieldState::gaussian(&flux, 0.0, 1.0, 0).unwrap();
        // |u| ∝ r^{1/2} e^{−r²/2}: maximum at r = 1/√2
        let sv = sup_norm(&s, None, &[0.0], SpectralFilter::None).unwrap()[0];
        let peak = (0.5f64.sqrt()).sqrt() * (-0.25f64).exp() / TAU.sqrt();
        assert!((sv.value - peak).abs() < 1e-6 * peak, "{} vs {peak}", sv.value);
        assert!((sv.radius - 0.5f64.sqrt()).abs() < 0.02);
    }

    #[test]
    fn l2_matches_parseval() {
        let flux = FluxConfig::constant(0.3);
        let s = FieldState::lp_random(&flux, 3, 1, 2).unwrap();
        let l2 = lp_norms(&s, None, &[0.0], SpectralFilter::None, 2.0, None).unwrap()[0];
        let parseval = s.l2_norm_sq_spectral().unwrap().sqrt();
        assert!((l2 - parseval).abs() < 1e-8 * parseval, "{l2} vs {parseval}");
    }
}

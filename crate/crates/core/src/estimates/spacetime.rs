use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::propagators::{angle_count, angle_grid, FieldState, FlowSpec, SpectralFilter};
use crate::quad::composite_rule;
use crate::Result;

/// Truncated space-time region [0, t_max] × {r_min ≤ |x| ≤ r_max}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceTimeWindow {
    pub t_max: f64,
    pub r_min: f64,
    pub r_max: f64,
    /// Width of the Gauss–Legendre time panels.
    pub time_panel: f64,
}

impl Default for SpaceTimeWindow {
    fn default() -> Self {
        SpaceTimeWindow { t_max: 64.0, r_min: 1e-3, r_max: 32.0, time_panel: 2.0 }
    }
}

impl SpaceTimeWindow {
    /// Gauss–Legendre nodes and weights on [0, t_max], 8 per panel, with an
    /// even panel count so [0, t_max/2] is a union of panels.
    pub fn time_rule(&self) -> (Vec<f64>, Vec<f64>) {
        let n = ((self.t_max / self.time_panel).ceil() as usize).max(2).next_multiple_of(2);
        let breaks: Vec<f64> = (0..=n).map(|i| self.t_max * i as f64 / n as f64).collect();
        composite_rule(&breaks, 8)
    }

    /// Radial nodes and r·dr weights: dyadic panels from r_min up to 1, then
    /// panels of width min(2π/rate, 1).
    pub fn radial_rule(&self, rate: f64) -> (Vec<f64>, Vec<f64>) {
        let mut breaks = vec![self.r_min];
        let mut r = self.r_min;
        while 2.0 * r < self.r_max.min(1.0) {
            r *= 2.0;
            breaks.push(r);
        }
        let width = (2.0 * std::f64::consts::PI / rate.max(1e-12)).min(1.0);
        let start = *breaks.last().unwrap();
        let n = ((self.r_max - start) / width).ceil().max(1.0) as usize;
        breaks.extend((1..=n).map(|i| start + (self.r_max - start) * i as f64 / n as f64));
        let (x, w) = composite_rule(&breaks, 16);
        let w = x.iter().zip(&w).map(|(r, w)| r * w).collect();
        (x, w)
    }
}

/// Values of u on the window's polar grid, produced one time at a time.
pub(crate) struct PolarSampler {
    pub radii: Vec<f64>,
    pub radial_weights: Vec<f64>,
    pub times: Vec<f64>,
    pub time_weights: Vec<f64>,
    angular: Vec<Vec<Complex64>>,
    /// [label][time][radius]
    tables: Vec<Vec<Vec<Complex64>>>,
    pub angle_weight: f64,
}

impl PolarSampler {
    pub fn new(
        state: &FieldState,
        flow: FlowSpec,
        window: &SpaceTimeWindow,
        filter: SpectralFilter,
        extra_angles: bool,
    ) -> Result<Self> {
        let (mut times, mut time_weights) = window.time_rule();
        times.insert(0, 0.0);
        time_weights.insert(0, 0.0);
        let (radii, radial_weights) = window.radial_rule(state.bandwidth().min(filter.support().1));
        let n_th = if angle_count(state) == 1 { 1 } else { angle_count(state) * if extra_angles { 2 } else { 1 } };
        let thetas = angle_grid(n_th);
        let (labels, tables) = state.label_tables(Some(flow), &times, filter, &radii)?;
        let angular = thetas
            .iter()
            .map(|&th| labels.iter().map(|&l| state.eigenfunction(l, th)).collect())
            .collect();
        Ok(PolarSampler {
            radii,
            radial_weights,
            times,
            time_weights,
            angular,
            tables,
            angle_weight: std::f64::consts::TAU / n_th as f64,
        })
    }

    /// |u(t_i, r, θ)| for every radius and angle.
    pub fn moduli(&self, ti: usize) -> Vec<Vec<f64>> {
        (0..self.radii.len())
            .map(|ri| {
                self.angular
                    .iter()
                    .map(|ang| ang.iter().zip(&self.tables).map(|(a, tab)| a * tab[ti][ri]).sum::<Complex64>().norm())
                    .collect()
            })
            .collect()
    }

    /// Σ_labels |c_l(t_i, r)|², the angular integral of |u|².
    pub fn angular_l2(&self, ti: usize) -> Vec<f64> {
        (0..self.radii.len()).map(|ri| self.tables.iter().map(|tab| tab[ti][ri].norm_sqr()).sum()).collect()
    }
}

/// L^q over time of a per-time quantity, on [0, t_end].
pub(crate) fn time_norm(times: &[f64], weights: &[f64], values: &[f64], q: f64, t_end: f64) -> f64 {
    let keep = times.iter().zip(weights).zip(values).filter(|((t, _), _)| **t <= t_end + 1e-12);
    if q.is_infinite() {
        return keep.map(|(_, v)| *v).fold(0.0, f64::max);
    }
    keep.map(|((_, w), v)| w * v.powf(q)).sum::<f64>().powf(1.0 / q)
}

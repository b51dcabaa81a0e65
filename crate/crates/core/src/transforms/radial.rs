use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::quad::gauss_legendre;
use crate::{Error, Result};

/// Minimum panels between consecutive knots.
const KNOT_PANELS: usize = 8;
const NODES_PER_PANEL: usize = 16;
const GRADING_LEVELS: i32 = 10;

/// Composite Gauss-Legendre grid on [0, radius] for ∫ · r dr.
///
/// Panels are at most one period 2π/`max_conjugate` wide, so a Bessel factor
/// J_ν(rρ) with ρ ≤ max_conjugate gets ≥ 16 nodes per oscillation; the first
/// panel is split geometrically toward r = 0 for the r^ν behaviour there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    /// Weights of ∫ · r dr (Gauss weight times node).
    pub weights: Vec<f64>,
    pub radius: f64,
    pub max_conjugate: f64,
}

impl RadialGrid {
    pub fn graded(radius: f64, max_conjugate: f64) -> Self {
        Self::graded_on(0.0, radius, max_conjugate)
    }

    /// Same construction on [lo, radius]; grading is applied only when lo = 0.
    pub fn graded_on(lo: f64, radius: f64, max_conjugate: f64) -> Self {
        Self::graded_with_knots(lo, radius, max_conjugate, &[])
    }

    /// As [`graded_on`](Self::graded_on), with panel breaks at `knots` (points
    /// where the integrand is not analytic) and at least `KNOT_PANELS` panels
    /// between consecutive knots.
    pub fn graded_with_knots(lo: f64, radius: f64, max_conjugate: f64, knots: &[f64]) -> Self {
        assert!(radius > lo && max_conjugate > 0.0);
        let width = (2.0 * PI / max_conjugate).min(1.0);
        let mut fixed: Vec<f64> = knots.iter().cloned().filter(|&k| k > lo && k < radius).collect();
        fixed.sort_by(f64::total_cmp);
        fixed.dedup();
        let min_panels = if knots.is_empty() { 1 } else { KNOT_PANELS };
        let mut breaks = vec![lo];
        let mut start = lo;
        if lo == 0.0 {
            let first = width.min(radius).min(fixed.first().map(|k| k / min_panels as f64).unwrap_or(f64::INFINITY));
            for i in (1..=GRADING_LEVELS).rev() {
                breaks.push(first * 2f64.powi(-i));
            }
            breaks.push(first);
            start = first;
        }
        fixed.retain(|&k| k > start);
        fixed.push(radius);
        for end in fixed {
            let n = (((end - start) / width).ceil() as usize).max(min_panels);
            for i in 1..=n {
                breaks.push(start + (end - start) * i as f64 / n as f64);
            }
            start = end;
        }
        let (gx, gw) = gauss_legendre(NODES_PER_PANEL);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for p in breaks.windows(2) {
            let half = 0.5 * (p[1] - p[0]);
            let mid = 0.5 * (p[1] + p[0]);
            for (x, w) in gx.iter().zip(&gw) {
                let r = mid + half * x;
                nodes.push(r);
                weights.push(half * w * r);
            }
        }
        RadialGrid { nodes, weights, radius, max_conjugate }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Samples of a radial function on a [`RadialGrid`]. `bandwidth` is the
/// frequency beyond which its Hankel transforms are treated as negligible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub grid: RadialGrid,
    pub values: Vec<Complex64>,
    pub bandwidth: f64,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl RadialProfile {
    /// Samples `f` on a grid resolving frequencies up to `bandwidth`.
    pub fn from_fn(radius: f64, bandwidth: f64, f: impl Fn(f64) -> Complex64) -> Self {
        let grid = RadialGrid::graded(radius, bandwidth.max(radius.recip()));
        Self::on_grid(grid, bandwidth, f)
    }

    pub fn on_grid(grid: RadialGrid, bandwidth: f64, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes.iter().map(|&r| f(r)).collect();
        let mut p = RadialProfile { grid, values, bandwidth, warnings: Vec::new() };
        p.check_truncation(1e-10);
        p
    }

    /// ∫|f|² r dr.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().zip(&self.grid.weights).map(|(v, w)| v.norm_sqr() * w).sum()
    }

    /// ∫ f·conj(g) r dr over a shared grid.
    pub fn inner(&self, other: &RadialProfile) -> Result<Complex64> {
        if self.grid.nodes != other.grid.nodes {
            return Err(Error::Parameter("profiles live on different grids".into()));
        }
        Ok(self.values.iter().zip(&other.values).zip(&self.grid.weights).map(|((a, b), w)| a * b.conj() * *w).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Records a warning when the outermost samples carry more than `tol` of the peak.
    pub fn check_truncation(&mut self, tol: f64) {
        let peak = self.max_abs();
        let n = self.values.len();
        let edge = self.values[n.saturating_sub(NODES_PER_PANEL)..].iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak > 0.0 && edge > tol * peak {
            self.warnings.push(format!(
                "boundary mass {:.3e} of peak at truncation radius {}",
                edge / peak,
                self.grid.radius
            ));
        }
    }

    /// CSV with columns r,re,im.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        wr.write_record(["r", "re", "im"]).map_err(io)?;
        for (r, v) in self.grid.nodes.iter().zip(&self.values) {
            wr.write_record([format!("{r:.17e}"), format!("{:.17e}", v.re), format!("{:.17e}", v.im)]).map_err(io)?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_integrates_gaussian_moments() {
        let g = RadialGrid::graded(12.0, 6.0);
        let m: f64 = g.nodes.iter().zip(&g.weights).map(|(r, w)| (-r * r).exp() * w).sum();
        assert!((m - 0.5).abs() < 1e-14);
        let s: f64 = g.nodes.iter().zip(&g.weights).map(|(r, w)| r.powf(-0.6) * w).sum::<f64>();
        let exact = 12f64.powf(1.4) / 1.4;
        assert!((s - exact).abs() < 1e-8 * exact);
    }
}

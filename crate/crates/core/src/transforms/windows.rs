use serde::{Deserialize, Serialize};

use crate::specfun::smooth_step;
use crate::{Error, Result};

/// ψ: 1 on [0, 1], 0 on [2, ∞), smooth in between.
pub fn low_cutoff(x: f64) -> f64 {
    1.0 - smooth_step(x - 1.0)
}

/// φ(x) = ψ(x) − ψ(2x), supported in [1/2, 2]; Σ_j φ(2^{−j}λ) telescopes to 1.
pub fn bump(x: f64) -> f64 {
    low_cutoff(x) - low_cutoff(2.0 * x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DyadicWindow {
    /// φ(2^{−j}λ), supported in [2^{j−1}, 2^{j+1}].
    Band(i32),
    /// φ₀ = Σ_{j≤0} φ(2^{−j}·) = ψ, equal to 1 on [0, 1].
    Low,
}

impl DyadicWindow {
    pub fn eval(self, lambda: f64) -> f64 {
        match self {
            DyadicWindow::Band(j) => bump(lambda * 2f64.powi(-j)),
            DyadicWindow::Low => low_cutoff(lambda),
        }
    }

    /// Points where the window is not analytic.
    pub fn knots(self) -> Vec<f64> {
        match self {
            DyadicWindow::Band(j) => {
                let base = 2f64.powi(j - 1);
                vec![base, 2.0 * base, 4.0 * base]
            }
            DyadicWindow::Low => vec![1.0, 2.0],
        }
    }

    /// Closed support interval.
    pub fn support(self) -> (f64, f64) {
        match self {
            DyadicWindow::Band(j) => (2f64.powi(j - 1), 2f64.powi(j + 1)),
            DyadicWindow::Low => (0.0, 2.0),
        }
    }
}

/// Bands j_min..=j_max plus the low-frequency lump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpPartition {
    pub low: DyadicWindow,
    pub bands: Vec<DyadicWindow>,
}

impl LpPartition {
    /// Σ of all bands; equals 1 on [2^{j_min}, 2^{j_max−1}].
    pub fn homogeneous_sum(&self, lambda: f64) -> f64 {
        self.bands.iter().map(|w| w.eval(lambda)).sum()
    }

    /// φ₀ + Σ_{j≥1} bands; equals 1 on [0, 2^{j_max−1}].
    pub fn inhomogeneous_sum(&self, lambda: f64) -> f64 {
        let high: f64 = self.bands.iter().filter(|w| matches!(w, DyadicWindow::Band(j) if *j >= 1)).map(|w| w.eval(lambda)).sum();
        self.low.eval(lambda) + high
    }
}

pub fn lp_windows(j_min: i32, j_max: i32) -> Result<LpPartition> {
    if !(j_min <= 0 && 0 < j_max) {
        return Err(Error::Parameter(format!("need j_min <= 0 < j_max, got {j_min}, {j_max}")));
    }
    Ok(LpPartition { low: DyadicWindow::Low, bands: (j_min..=j_max).map(DyadicWindow::Band).collect() })
}

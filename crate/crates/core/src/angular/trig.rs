use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Real trigonometric polynomial c_0 + Σ_{j≥1} (c_j cos jθ + s_j sin jθ).
///
/// `sin[0]` is ignored.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrigPoly {
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl TrigPoly {
    pub fn constant(c: f64) -> Self {
        TrigPoly { cos: vec![c], sin: vec![] }
    }

    pub fn new(cos: Vec<f64>, sin: Vec<f64>) -> Self {
        TrigPoly { cos, sin }
    }

    fn c(&self, j: usize) -> f64 {
        self.cos.get(j).copied().unwrap_or(0.0)
    }

    fn s(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.sin.get(j).copied().unwrap_or(0.0)
        }
    }

    /// Highest frequency with a nonzero coefficient.
    pub fn bandwidth(&self) -> usize {
        let n = self.cos.len().max(self.sin.len());
        (0..n).rev().find(|&j| self.c(j) != 0.0 || self.s(j) != 0.0).unwrap_or(0)
    }

    pub fn mean(&self) -> f64 {
        self.c(0)
    }

    pub fn is_zero(&self) -> bool {
        self.cos.iter().all(|&c| c == 0.0) && self.sin.iter().skip(1).all(|&s| s == 0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.bandwidth() == 0
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut v = self.c(0);
        for j in 1..=self.bandwidth() {
            let (s, c) = (j as f64 * theta).sin_cos();
            v += self.c(j) * c + self.s(j) * s;
        }
        v
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        let mut v = 0.0;
        for j in 1..=self.bandwidth() {
            let jf = j as f64;
            let (s, c) = (jf * theta).sin_cos();
            v += jf * (-self.c(j) * s + self.s(j) * c);
        }
        v
    }

    /// ∫_0^θ (f − mean), exact.
    pub fn oscillating_primitive(&self, theta: f64) -> f64 {
        let mut v = 0.0;
        for j in 1..=self.bandwidth() {
            let jf = j as f64;
            let (s, c) = (jf * theta).sin_cos();
            v += self.c(j) * s / jf + self.s(j) * (1.0 - c) / jf;
        }
        v
    }

    /// ∫_0^θ f, exact.
    pub fn primitive(&self, theta: f64) -> f64 {
        self.mean() * theta + self.oscillating_primitive(theta)
    }

    /// Complex Fourier coefficients f̂_j = (2π)^{-1}∫ f e^{-ijθ}, indexed j + bandwidth.
    pub fn fourier(&self) -> Vec<Complex64> {
        let b = self.bandwidth();
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * b + 1];
        out[b] = Complex64::new(self.c(0), 0.0);
        for j in 1..=b {
            out[b + j] = Complex64::new(0.5 * self.c(j), -0.5 * self.s(j));
            out[b - j] = Complex64::new(0.5 * self.c(j), 0.5 * self.s(j));
        }
        out
    }

    /// Minimum over a dense grid refined by golden-section search around the best sample.
    pub fn minimum(&self) -> f64 {
        if self.is_constant() {
            return self.mean();
        }
        let n = 64 * (self.bandwidth() + 1);
        let h = TAU / n as f64;
        let (mut best_t, mut best) = (0.0, f64::INFINITY);
        for i in 0..n {
            let t = i as f64 * h;
            let v = self.eval(t);
            if v < best {
                best = v;
                best_t = t;
            }
        }
        let (mut a, mut b) = (best_t - h, best_t + h);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let x1 = b - g * (b - a);
            let x2 = a + g * (b - a);
            if self.eval(x1) < self.eval(x2) {
                b = x2;
            } else {
                a = x1;
            }
        }
        best.min(self.eval(0.5 * (a + b)))
    }

    /// Whether f(π − θ) = f(π + θ) for all θ (no sine terms).
    pub fn symmetric_about_pi(&self) -> bool {
        self.sin.iter().skip(1).all(|&s| s == 0.0)
    }

    pub fn scaled(&self, k: f64) -> Self {
        TrigPoly {
            cos: self.cos.iter().map(|c| c * k).collect(),
            sin: self.sin.iter().map(|s| s * k).collect(),
        }
    }

    pub fn plus(&self, other: &TrigPoly) -> Self {
        let n = self.cos.len().max(other.cos.len());
        let m = self.sin.len().max(other.sin.len());
        TrigPoly {
            cos: (0..n).map(|j| self.c(j) + other.c(j)).collect(),
            sin: (0..m).map(|j| self.s(j) + other.s(j)).collect(),
        }
    }
}

/// Linear convolution of two centred coefficient vectors.
pub fn convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

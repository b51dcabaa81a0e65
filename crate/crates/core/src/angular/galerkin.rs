use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::flux::FluxConfig;
use super::jacobi::{jacobi_eigen, HermitianMatrix};
use super::trig::{convolve, TrigPoly};
use crate::estimates::{Criterion, EstimateReport};
use crate::{Error, Result};

/// Eigenvalues and eigenfunctions of the angular operator.
///
/// Eigenfunction `i` is `e^{iβ(θ)} Σ_m vectors[i][m + M] e^{imθ}/√(2π)` where
/// β is the oscillating primitive of `gauge` (zero for Galerkin spectra).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AngularSpectrum {
    pub eigenvalues: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
    /// Signed index k of each eigenfunction (dominant Fourier mode is e^{−ikθ}).
    pub labels: Vec<i64>,
    pub truncation: usize,
    pub gauge: TrigPoly,
    /// False when the negative-part bound fails for the electric profile.
    pub condition_ok: bool,
}

impl AngularSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eval(&self, idx: usize, theta: f64) -> Complex64 {
        let m0 = self.truncation as i64;
        let mut s = Complex64::new(0.0, 0.0);
        for (pos, c) in self.vectors[idx].iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            let m = pos as i64 - m0;
            s += c * Complex64::new(0.0, m as f64 * theta).exp();
        }
        s * Complex64::new(0.0, self.gauge.oscillating_primitive(theta)).exp() / (2.0 * PI).sqrt()
    }

    /// Index of the eigenfunction with signed label k.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        self.labels.iter().position(|&l| l == k)
    }

    /// Explicit spectrum of the purely magnetic operator for |k| ≤ k_max.
    pub fn explicit(flux: &FluxConfig, k_max: usize) -> Result<Self> {
        if flux.has_potential() {
            return Err(Error::Parameter("explicit spectrum needs a ≡ 0".into()));
        }
        let m0 = k_max;
        let phi = flux.mean_flux();
        let mut entries: Vec<(f64, i64)> =
            (-(k_max as i64)..=(k_max as i64)).map(|k| ((k as f64 + phi).powi(2), k)).collect();
        sort_by_spectrum(&mut entries, |e| *e);
        let mut vectors = Vec::with_capacity(entries.len());
        for &(_, k) in &entries {
            let mut v = vec![Complex64::new(0.0, 0.0); 2 * m0 + 1];
            v[(m0 as i64 - k) as usize] = Complex64::new(1.0, 0.0);
            vectors.push(v);
        }
        Ok(AngularSpectrum {
            eigenvalues: entries.iter().map(|e| e.0).collect(),
            vectors,
            labels: entries.iter().map(|e| e.1).collect(),
            truncation: m0,
            gauge: flux.alpha.clone(),
            condition_ok: true,
        })
    }

    /// Eigenvalues plus a constant shift c (the spectrum of a + c).
    pub fn shifted(&self, c: f64) -> Self {
        let mut s = self.clone();
        for e in s.eigenvalues.iter_mut() {
            *e += c;
        }
        s
    }
}

/// Ascending eigenvalue; runs of near-equal eigenvalues ordered by the signed label.
fn sort_by_spectrum<T>(entries: &mut [T], key: impl Fn(&T) -> (f64, i64)) {
    entries.sort_by(|a, b| key(a).0.total_cmp(&key(b).0));
    let mut start = 0;
    while start < entries.len() {
        let mut end = start + 1;
        while end < entries.len() {
            let (x, y) = (key(&entries[end - 1]).0, key(&entries[end]).0);
            if (y - x).abs() > 1e-9 * (1.0 + y.abs()) {
                break;
            }
            end += 1;
        }
        entries[start..end].sort_by_key(|e| key(e).1);
        start = end;
    }
}

/// Galerkin matrix of −∂² + (α² + a + iα') + 2iα∂ in the basis e^{imθ}, |m| ≤ M.
pub fn galerkin_matrix(flux: &FluxConfig, m_trunc: usize) -> HermitianMatrix {
    let ah = flux.alpha.fourier();
    let ba = flux.alpha.bandwidth() as i64;
    let a2 = convolve(&ah, &ah);
    let b2 = 2 * ba;
    let pot = flux.a.fourier();
    let bp = flux.a.bandwidth() as i64;
    let coeff = |v: &[Complex64], b: i64, j: i64| -> Complex64 {
        if j.abs() > b {
            Complex64::new(0.0, 0.0)
        } else {
            v[(j + b) as usize]
        }
    };
    let n = 2 * m_trunc + 1;
    let mut h = HermitianMatrix::zeros(n);
    let m0 = m_trunc as i64;
    for row in 0..n {
        let m = row as i64 - m0;
        for col in 0..n {
            let nn = col as i64 - m0;
            let d = m - nn;
            let mut v = coeff(&a2, b2, d) + coeff(&pot, bp, d) - coeff(&ah, ba, d) * (m + nn) as f64;
            if d == 0 {
                v += Complex64::new((nn * nn) as f64, 0.0);
            }
            h.set(row, col, v);
        }
    }
    h
}

/// Minimum truncation for a given profile.
pub fn minimum_truncation(flux: &FluxConfig) -> usize {
    4 * flux.alpha.bandwidth().max(flux.a.bandwidth()) + 16
}

/// Eigen-decomposition of the angular operator truncated to |m| ≤ M.
pub fn solve_angular(flux: &FluxConfig, m_trunc: usize) -> Result<AngularSpectrum> {
    let need = minimum_truncation(flux);
    if m_trunc < need {
        return Err(Error::Parameter(format!("truncation {m_trunc} below the minimum {need}")));
    }
    let condition_ok = flux.validate().is_ok();
    let h = galerkin_matrix(flux, m_trunc);
    let n = h.n;
    let (vals, vecs) = jacobi_eigen(h);
    let m0 = m_trunc as i64;
    let mut entries: Vec<(f64, i64, usize)> = (0..n)
        .map(|col| {
            let mut best = (0usize, -1.0);
            for row in 0..n {
                let mag = vecs[row * n + col].norm();
                if mag > best.1 + 1e-12 {
                    best = (row, mag);
                }
            }
            let m = best.0 as i64 - m0;
            (vals[col], -m, col)
        })
        .collect();
    sort_by_spectrum(&mut entries, |e| (e.0, e.1));
    let mut vectors = Vec::with_capacity(n);
    for &(_, _, col) in &entries {
        let mut v: Vec<Complex64> = (0..n).map(|row| vecs[row * n + col]).collect();
        // fix the phase so the dominant coefficient is real positive
        let dom = v.iter().cloned().fold(Complex64::new(0.0, 0.0), |acc, z| if z.norm() > acc.norm() + 1e-12 { z } else { acc });
        let ph = dom.conj() / dom.norm();
        for z in v.iter_mut() {
            *z *= ph;
        }
        vectors.push(v);
    }
    Ok(AngularSpectrum {
        eigenvalues: entries.iter().map(|e| e.0).collect(),
        vectors,
        labels: entries.iter().map(|e| e.1).collect(),
        truncation: m_trunc,
        gauge: TrigPoly::default(),
        condition_ok,
    })
}

/// Residual of the large-index eigenvalue asymptotics
/// μ_j = ã + (j + Ā)² + O(j^{-2}), scaled by j², over |j| ∈ [j_lo, j_hi].
pub fn asymptotics_check(
    spec: &AngularSpectrum,
    flux: &FluxConfig,
    j_lo: usize,
    j_hi: usize,
) -> Result<EstimateReport> {
    if flux.is_resonant() {
        return Err(Error::ResonantFlux(flux.mean_flux()));
    }
    if j_lo == 0 || j_hi < j_lo {
        return Err(Error::Parameter("index range must satisfy 1 <= j_lo <= j_hi".into()));
    }
    let phi = flux.mean_flux();
    let shift = (phi + 0.5).floor() as i64;
    let abar = flux.centered_flux();
    let amean = flux.a.mean();
    let mut js = Vec::new();
    let mut scaled = Vec::new();
    for m in j_lo..=j_hi {
        let mut worst: f64 = 0.0;
        for j in [m as i64, -(m as i64)] {
            let k = j - shift;
            if k.unsigned_abs() as usize > spec.truncation / 2 {
                return Err(Error::Parameter(format!(
                    "index {j} outside the resolved interior (truncation {})",
                    spec.truncation
                )));
            }
            let idx = spec
                .index_of(k)
                .ok_or_else(|| Error::Convergence(format!("no eigenfunction labelled {k}")))?;
            let jf = j as f64;
            let r = (spec.eigenvalues[idx] - amean - (jf + abar).powi(2)).abs() * jf * jf;
            worst = worst.max(r);
        }
        js.push(m as f64);
        scaled.push(worst);
    }
    let half = js.len() / 2;
    let top: Vec<f64> = scaled[half..].to_vec();
    let bound = 2.0 * scaled[0].max(1e-12);
    Ok(EstimateReport::new("eigenvalue_asymptotics")
        .grid("j_lo", j_lo)
        .grid("j_hi", j_hi)
        .grid("truncation", spec.truncation)
        .grid("flux", phi)
        .series("j", js)
        .series("scaled_residual", scaled)
        .series("scaled_residual_top_half", top)
        .criterion(Criterion::Finite { series: "scaled_residual".into() })
        .criterion(Criterion::AtMost { series: "scaled_residual".into(), limit: bound })
        .criterion(Criterion::NonIncreasing { series: "scaled_residual_top_half".into(), slack: 1e-9 })
        .note("bound: twice the scaled residual at the first index")
        .finish())
}

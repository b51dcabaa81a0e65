use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::evolution::{kernel_closed, kernel_series, kernel_series_spectrum, KernelOptions};
use super::spectral::{spectral_measure_closed, spectral_measure_series};
use crate::angular::{minimum_truncation, solve_angular, AngularSpectrum, FluxConfig};
use crate::{Error, PolarPoint, Result};

/// Which operator function the grid tabulates; the parameter is t, t or λ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Schrodinger,
    Heat,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMethod {
    Closed,
    Series,
}

impl KernelMethod {
    pub fn name(self) -> &'static str {
        match self {
            KernelMethod::Closed => "closed",
            KernelMethod::Series => "series",
        }
    }
}

/// Kernel values on a grid of parameters × point pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelGrid {
    pub kind: KernelKind,
    pub method: KernelMethod,
    pub flux: FluxConfig,
    pub params: Vec<f64>,
    pub pairs: Vec<(PolarPoint, PolarPoint)>,
    /// Row-major: `values[i * pairs.len() + j]` is parameter i at pair j.
    pub values: Vec<Complex64>,
    pub errors: Vec<f64>,
    pub tol: f64,
    pub k_max: usize,
}

impl KernelGrid {
    /// Evaluates every (parameter, pair) in parallel; output order is fixed.
    pub fn compute(
        kind: KernelKind,
        method: KernelMethod,
        flux: &FluxConfig,
        params: &[f64],
        pairs: &[(PolarPoint, PolarPoint)],
        tol: f64,
        k_max: usize,
    ) -> Result<Self> {
        flux.validate()?;
        if method == KernelMethod::Closed && flux.has_potential() {
            return Err(Error::Parameter("closed form needs a ≡ 0; choose method = series".into()));
        }
        if kind == KernelKind::Schrodinger && method == KernelMethod::Series {
            return Err(Error::Parameter(
                "real-time Schrödinger partial waves do not converge absolutely; use the closed form".into(),
            ));
        }
        let spectrum: Option<AngularSpectrum> = if method == KernelMethod::Series && flux.has_potential() {
            Some(solve_angular(flux, (2 * k_max).max(minimum_truncation(flux)))?)
        } else {
            None
        };
        let opts = KernelOptions { tol, ..KernelOptions::default() };
        let jobs: Vec<(f64, PolarPoint, PolarPoint)> =
            params.iter().flat_map(|&p| pairs.iter().map(move |&(x, y)| (p, x, y))).collect();
        let out: Vec<Result<(Complex64, f64)>> = jobs
            .par_iter()
            .map(|&(p, x, y)| match (kind, method) {
                (KernelKind::Schrodinger, _) => {
                    let e = kernel_closed(Complex64::new(0.0, p), x, y, flux, &opts)?;
                    Ok((e.value(), e.value_error()))
                }
                (KernelKind::Heat, KernelMethod::Closed) => {
                    let e = kernel_closed(Complex64::new(p, 0.0), x, y, flux, &opts)?;
                    Ok((e.value(), e.value_error()))
                }
                (KernelKind::Heat, KernelMethod::Series) => {
                    let time = Complex64::new(p, 0.0);
                    let e = match &spectrum {
                        Some(s) => kernel_series_spectrum(time, x, y, s, flux)?,
                        None => kernel_series(time, x, y, flux, k_max)?,
                    };
                    Ok((e.value(), e.value_error()))
                }
                (KernelKind::Spectral, KernelMethod::Closed) => {
                    Ok((spectral_measure_closed(p, x, y, flux, &opts)?, 0.0))
                }
                (KernelKind::Spectral, KernelMethod::Series) => spectral_measure_series(p, x, y, flux, k_max),
            })
            .collect();
        let mut values = Vec::with_capacity(out.len());
        let mut errors = Vec::with_capacity(out.len());
        for r in out {
            let (v, e) = r?;
            values.push(v);
            errors.push(e);
        }
        Ok(KernelGrid {
            kind,
            method,
            flux: flux.clone(),
            params: params.to_vec(),
            pairs: pairs.to_vec(),
            values,
            errors,
            tol,
            k_max,
        })
    }

    pub fn value(&self, param_idx: usize, pair_idx: usize) -> Complex64 {
        self.values[param_idx * self.pairs.len() + pair_idx]
    }

    /// CSV with columns param,r1,th1,r2,th2,re,im,method,tol.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        wr.write_record(["param", "r1", "th1", "r2", "th2", "re", "im", "method", "tol"]).map_err(io)?;
        let f = |v: f64| format!("{v:.17e}");
        for (i, &p) in self.params.iter().enumerate() {
            for (j, (x, y)) in self.pairs.iter().enumerate() {
                let v = self.value(i, j);
                wr.write_record([
                    f(p),
                    f(x.r),
                    f(x.theta),
                    f(y.r),
                    f(y.theta),
                    f(v.re),
                    f(v.im),
                    self.method.name().to_string(),
                    f(self.tol),
                ])
                .map_err(io)?;
            }
        }
        wr.flush()?;
        Ok(())
    }

    /// Metadata for the sidecar JSON.
    pub fn meta(&self) -> serde_json::Value {
        let max_err = self.errors.iter().cloned().fold(0.0, f64::max);
        serde_json::json!({
            "kind": self.kind,
            "method": self.method,
            "flux": self.flux,
            "params": self.params.len(),
            "pairs": self.pairs.len(),
            "tol": self.tol,
            "k_max": self.k_max,
            "max_error_estimate": max_err,
        })
    }
}

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{DatumFamily, RunConfig, Scenario};
use crate::angular::{asymptotics_check, solve_angular};
use crate::estimates::{
    decay_sweep, hardy_check, heat_bound_fit, local_smoothing_check, localized_decay_sweep, low_decay_sweep,
    sobolev_ratio_check, strichartz_sweep, Criterion, EstimateReport,
};
use crate::kernels::{
    kernel_closed, kernel_series, stone_check, KernelGrid, KernelKind, KernelMethod, KernelOptions,
};
use crate::propagators::{FieldState, FlowSpec, SpectralSource};
use crate::{Error, PolarPoint, Result};

/// Reports plus any extra raw tables (file stem, CSV bytes).
#[derive(Debug, Default)]
pub struct ScenarioOutput {
    pub reports: Vec<EstimateReport>,
    pub tables: Vec<(String, Vec<u8>)>,
}

fn to_pairs(specs: &[[f64; 4]]) -> Vec<(PolarPoint, PolarPoint)> {
    specs.iter().map(|p| (PolarPoint::new(p[0], p[1]), PolarPoint::new(p[2], p[3]))).collect()
}

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut wr = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    wr.write_record(header).map_err(io)?;
    for r in rows {
        wr.write_record(&r).map_err(io)?;
    }
    wr.into_inner().map_err(|e| Error::Io(e.to_string()))
}

/// Long-format CSV of every series in a report: series,index,value.
pub fn report_csv(report: &EstimateReport) -> Result<Vec<u8>> {
    let rows = report
        .values
        .iter()
        .flat_map(|(k, v)| v.iter().enumerate().map(move |(i, x)| vec![k.clone(), i.to_string(), fmt(*x)]));
    csv_bytes(&["series", "index", "value"], rows)
}

pub const COMPARISON_COLUMNS: [&str; 11] =
    ["param", "rotation", "r1", "th1", "r2", "th2", "closed_re", "closed_im", "series_re", "series_im", "rel_diff"];

pub fn run_scenario(cfg: &RunConfig) -> Result<ScenarioOutput> {
    let flux = &cfg.flux;
    let mut out = ScenarioOutput::default();
    match cfg.scenario {
        Scenario::Kernel => kernel_scenario(cfg, &mut out)?,
        Scenario::Decay => {
            let d = &cfg.decay;
            let (name, state) = match d.family {
                DatumFamily::Gaussian => ("gaussian", FieldState::gaussian(flux, 0.0, d.width, d.mode)?),
                DatumFamily::Ring => ("ring", FieldState::gaussian(flux, d.center, d.width, d.mode)?),
                DatumFamily::Lp => ("lp_random", FieldState::lp_random(flux, cfg.seed, d.band, d.k_span)?),
            };
            out.reports.push(decay_sweep(FlowSpec::new(d.equation), &state, name, &d.times)?);
        }
        Scenario::Localized => {
            let l = &cfg.localized;
            let ks: Vec<i32> = (l.k_min..=l.k_max).collect();
            out.reports.push(localized_decay_sweep(&ks, &l.etas, flux, SpectralSource::default())?);
            out.reports.push(low_decay_sweep(&l.low_times, flux, SpectralSource::default())?);
        }
        Scenario::HeatBound => {
            let h = &cfg.heat_bound;
            out.reports.push(heat_bound_fit(flux, &h.times, &to_pairs(&h.pairs))?);
        }
        Scenario::Stone => {
            let pairs = random_pairs(cfg.seed, cfg.stone.pairs);
            for &lambda in &cfg.stone.lambdas {
                out.reports.push(stone_check(lambda, &pairs, flux, cfg.stone.k_max, cfg.stone.tol)?);
            }
        }
        Scenario::Strichartz => {
            let s = &cfg.strichartz;
            let pairs = s.admissible_pairs()?;
            out.reports.push(strichartz_sweep(&pairs, flux, &s.data.family(cfg.seed), &s.window)?);
        }
        Scenario::Sobolev => {
            let s = &cfg.sobolev;
            out.reports.push(sobolev_ratio_check(flux, &s.data.family(cfg.seed), s.p, s.q)?);
        }
        Scenario::Eigs => eigs_scenario(cfg, &mut out)?,
        Scenario::Hardy => {
            let h = &cfg.hardy;
            let mut data = Vec::new();
            for &w in &h.widths {
                for &k in &h.modes {
                    data.push((format!("gaussian width {w} mode {k}"), FieldState::gaussian(flux, 0.0, w, k)?));
                }
            }
            for seed in cfg.seed..cfg.seed + h.lp_count {
                data.push((format!("lp seed {seed} band {}", h.band), FieldState::lp_random(flux, seed, h.band, 2)?));
            }
            out.reports.push(hardy_check(flux, &data)?);
        }
        Scenario::Smoothing => {
            let s = &cfg.smoothing;
            out.reports.push(local_smoothing_check(flux, &s.data.family(cfg.seed), s.beta, s.branch, &s.window)?);
        }
    }
    Ok(out)
}

/// Seeded point pairs with radii in [0.5, 2], kept away from antipodal angles.
pub fn random_pairs(seed: u64, n: usize) -> Vec<(PolarPoint, PolarPoint)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = PolarPoint::new(rng.gen_range(0.5..2.0), rng.gen_range(0.0..TAU));
        let y = PolarPoint::new(rng.gen_range(0.5..2.0), rng.gen_range(0.0..TAU));
        let gap = (x.theta - y.theta).rem_euclid(TAU);
        if (gap - PI).abs() > 0.3 {
            out.push((x, y));
        }
    }
    out
}

fn kernel_scenario(cfg: &RunConfig, out: &mut ScenarioOutput) -> Result<()> {
    let k = &cfg.kernel;
    let flux = &cfg.flux;
    let pairs = to_pairs(&k.pairs);
    if flux.has_potential() {
        let grid = KernelGrid::compute(k.kind, KernelMethod::Series, flux, &k.params, &pairs, k.tol, k.k_max)?;
        let mut buf = Vec::new();
        grid.write_csv(&mut buf)?;
        out.tables.push(("kernel_series".into(), buf));
        out.reports.push(
            EstimateReport::new("kernel_series")
                .grid("kind", format!("{:?}", k.kind))
                .grid("k_max", k.k_max)
                .series("abs_value", grid.values.iter().map(|v| v.norm()).collect())
                .series("error_estimate", grid.errors.clone())
                .criterion(Criterion::Finite { series: "abs_value".into() })
                .note("closed form needs a = 0; series values only")
                .finish(),
        );
        return Ok(());
    }
    let closed = KernelGrid::compute(k.kind, KernelMethod::Closed, flux, &k.params, &pairs, k.tol, k.k_max)?;
    let mut buf = Vec::new();
    closed.write_csv(&mut buf)?;
    out.tables.push(("kernel_closed".into(), buf));
    let opts = KernelOptions { tol: k.tol, ..KernelOptions::default() };
    let n_pairs = pairs.len();
    // (param, rotation, pair) → (closed, series)
    let jobs: Vec<(f64, f64, usize)> = match k.kind {
        KernelKind::Schrodinger => k
            .params
            .iter()
            .flat_map(|&p| k.rotations.iter().flat_map(move |&g| (0..n_pairs).map(move |j| (p, g, j))))
            .collect(),
        _ => k.params.iter().flat_map(|&p| (0..n_pairs).map(move |j| (p, 0.0, j))).collect(),
    };
    let series = match k.kind {
        KernelKind::Schrodinger => None,
        kind => Some(KernelGrid::compute(kind, KernelMethod::Series, flux, &k.params, &pairs, k.tol, k.k_max)?),
    };
    let values: Vec<(Complex64, Complex64)> = jobs
        .par_iter()
        .enumerate()
        .map(|(idx, &(p, g, j))| {
            let (x, y) = pairs[j];
            match &series {
                Some(s) => Ok((closed.values[idx], s.values[idx])),
                None => {
                    // heat time i·τ with τ = t·e^{−iγ}
                    let time = Complex64::from_polar(p, 0.5 * PI - g);
                    let c = kernel_closed(time, x, y, flux, &opts)?.value();
                    let s = kernel_series(time, x, y, flux, k.k_max)?.value();
                    Ok((c, s))
                }
            }
        })
        .collect::<Result<_>>()?;
    let rel: Vec<f64> = values.iter().map(|(c, s)| (c - s).norm() / s.norm().max(1e-300)).collect();
    let rows = jobs.iter().zip(&values).zip(&rel).map(|((&(p, g, j), (c, s)), r)| {
        let (x, y) = pairs[j];
        vec![fmt(p), fmt(g), fmt(x.r), fmt(x.theta), fmt(y.r), fmt(y.theta), fmt(c.re), fmt(c.im), fmt(s.re), fmt(s.im), fmt(*r)]
    });
    out.tables.push(("kernel_comparison".into(), csv_bytes(&COMPARISON_COLUMNS, rows)?));
    let mut report = EstimateReport::new("kernel_agreement")
        .grid("kind", format!("{:?}", k.kind))
        .grid("flux", flux.mean_flux())
        .grid("tol", k.tol)
        .grid("k_max", k.k_max)
        .grid("agreement", k.agreement)
        .series("relative_difference", rel)
        .criterion(Criterion::AtMost { series: "relative_difference".into(), limit: k.agreement });
    if (flux.mean_flux() - flux.mean_flux().round()).abs() == 0.0 {
        report = report.note("integer flux: the closed form reduces to the gauge-transformed free kernel");
    }
    if k.kind == KernelKind::Schrodinger {
        report = report.note("schrodinger comparison at rotated times t*exp(-i*rotation)");
    }
    out.reports.push(report.finish());
    Ok(())
}

fn eigs_scenario(cfg: &RunConfig, out: &mut ScenarioOutput) -> Result<()> {
    let e = &cfg.eigs;
    let flux = &cfg.flux;
    let spec = solve_angular(flux, e.truncation)?;
    let rows = spec
        .labels
        .iter()
        .zip(&spec.eigenvalues)
        .enumerate()
        .map(|(i, (l, v))| vec![i.to_string(), l.to_string(), fmt(*v)]);
    out.tables.push(("eigenvalues".into(), csv_bytes(&["index", "label", "eigenvalue"], rows)?));
    if !flux.has_potential() {
        let phi = flux.mean_flux();
        let half = (e.truncation / 2) as i64;
        let dev: Vec<f64> = spec
            .labels
            .iter()
            .zip(&spec.eigenvalues)
            .filter(|(l, _)| l.abs() <= half)
            .map(|(l, v)| (v - (*l as f64 + phi).powi(2)).abs())
            .collect();
        out.reports.push(
            EstimateReport::new("eigenvalues_explicit")
                .grid("truncation", e.truncation)
                .grid("flux", phi)
                .series("deviation", dev)
                .criterion(Criterion::AtMost { series: "deviation".into(), limit: e.tol })
                .finish(),
        );
    }
    if !flux.is_resonant() {
        out.reports.push(asymptotics_check(&spec, flux, e.j_lo, e.j_hi)?);
    } else if flux.has_potential() {
        out.reports.push(
            EstimateReport::new("eigenvalues")
                .grid("truncation", e.truncation)
                .series("eigenvalue", spec.eigenvalues.clone())
                .criterion(Criterion::Finite { series: "eigenvalue".into() })
                .note("resonant flux: the asymptotic residual check does not apply")
                .finish(),
        );
    }
    Ok(())
}

//! Acceptance suite: one line per criterion with the measured value and runtime.
//! Exits nonzero when a criterion fails, unless it is listed in
//! `DOCUMENTED_FAILURES` together with the reason it cannot be met.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use ab_kernels::angular::{asymptotics_check, solve_angular, FluxConfig, TrigPoly};
use ab_kernels::cli::{random_pairs, run_calibrate, run_config_file, RunSummary};
use ab_kernels::estimates::{strichartz_sweep, AdmissiblePair, DataFamily, EstimateReport, SpaceTimeWindow};
use ab_kernels::kernels::calibration::calibrate;
use ab_kernels::kernels::{
    coeff_b, heat_kernel_series, kernel_closed, kernel_series, modes_needed,
    poisson_closed_form, poisson_truncated_sum, schrodinger_kernel_closed_complex, stone_check, KernelOptions, C_FREE,
};
use ab_kernels::propagators::{angle_grid, Equation, FieldState, FlowSpec, SpectralFilter};
use ab_kernels::quad::{integrate, integrate_real};
use ab_kernels::specfun::{bessel_i, bessel_j, bessel_y};
use ab_kernels::transforms::{hankel_transform, weber_check, RadialProfile};
use ab_kernels::{Complex64, PolarPoint, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria whose stated tolerance is out of reach for the stated oracle.
const DOCUMENTED_FAILURES: [(u32, &str); 1] =
    [(5, "the |j| <= 80 truncated sum has a tail of order e^{-81 s} > 1e-8 for s < 0.23")];

struct Outcome {
    pass: bool,
    measured: String,
}

fn outcome(pass: bool, measured: impl Into<String>) -> Outcome {
    Outcome { pass, measured: measured.into() }
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

struct Runner {
    root: tempfile::TempDir,
    summaries: Vec<(String, RunSummary)>,
}

impl Runner {
    fn new() -> Self {
        let root = tempfile::tempdir().expect("temporary output root");
        run_calibrate(root.path()).expect("calibration");
        Runner { root, summaries: Vec::new() }
    }

    /// Runs a shipped config and returns its reports.
    fn run(&mut self, name: &str) -> Result<Vec<EstimateReport>> {
        let summary = run_config_file(&configs_dir().join(format!("{name}.toml")), self.root.path())?;
        let mut reports = Vec::new();
        for (file, _) in &summary.outputs {
            if file.ends_with(".json") {
                let text = std::fs::read_to_string(summary.dir.join(file))?;
                reports.push(serde_json::from_str(&text).map_err(|e| ab_kernels::Error::Io(e.to_string()))?);
            }
        }
        self.summaries.push((name.to_string(), summary));
        Ok(reports)
    }

    fn run_all(&mut self, names: &[&str]) -> Result<Outcome> {
        let mut pass = true;
        let mut parts = Vec::new();
        for name in names {
            for r in self.run(name)? {
                pass &= r.pass;
                parts.push(format!("{name}/{} {}", r.name, fmt_stats(&r)));
            }
        }
        Ok(outcome(pass, parts.join("; ")))
    }
}

fn fmt_stats(r: &EstimateReport) -> String {
    let stats: Vec<String> = r
        .criteria
        .iter()
        .zip(&r.statistics)
        .map(|(c, s)| format!("{}={s:.3e}", c.series()))
        .collect();
    format!("[{}]{}", stats.join(", "), if r.pass { "" } else { " FAILED" })
}

// --- 1. special functions -------------------------------------------------

/// J_ν and Y_ν from their integral representations on [0, π] and [0, ∞).
fn jy_oracle(nu: f64, x: f64) -> (f64, f64) {
    let (j1, _) = integrate_real(|t| (nu * t - x * t.sin()).cos(), 0.0, PI, 1e-16, 1e-15, 4000);
    let (y1, _) = integrate_real(|t| (x * t.sin() - nu * t).sin(), 0.0, PI, 1e-16, 1e-15, 4000);
    // the tails decay like e^{νt − x sinh t}; integrate until 40 e-folds past the peak
    let peak_t = (nu / x).acosh().max(0.0);
    let log_peak = nu * peak_t - x * peak_t.sinh();
    let mut top = peak_t + 1.0;
    while nu * top - x * top.sinh() > log_peak - 40.0 {
        top += 0.5;
    }
    let (j2, _) = integrate_real(|t| (-x * t.sinh() - nu * t).exp(), 0.0, top, 0.0, 1e-15, 4000);
    let (y2, _) = integrate_real(
        |t| (nu * t - x * t.sinh()).exp() + (-nu * t - x * t.sinh()).exp() * (nu * PI).cos(),
        0.0,
        top,
        0.0,
        1e-15,
        4000,
    );
    (j1 / PI - (nu * PI).sin() / PI * j2, y1 / PI - y2 / PI)
}

/// I_ν(z), Re z > 0, from its integral representation; also returns the
/// magnitude scale of the integrand, used to skip ill-conditioned points.
fn i_oracle(nu: f64, z: Complex64) -> (Complex64, f64) {
    let a = integrate(|t| (z * t.cos()).exp() * (nu * t).cos(), 0.0, PI, 1e-300, 1e-15, 4000).value;
    let mut top: f64 = 1.0;
    while z.re * top.cosh() + nu * top < 40.0 + z.re {
        top += 0.5;
    }
    let b = integrate(|t| (-z * t.cosh() - nu * t).exp(), 0.0, top, 1e-300, 1e-15, 4000).value;
    let scale = integrate_real(|t| (z.re * t.cos()).exp(), 0.0, PI, 0.0, 1e-14, 400).0 / PI;
    (a / PI - b * ((nu * PI).sin() / PI), scale)
}

fn special_functions() -> Result<Outcome> {
    let nus = [0.0, 0.25, 0.5, 1.0, 2.5, 7.3, 15.0, 30.5, 50.0];
    let xs = [0.05, 0.3, 1.0, 2.5, 6.0, 12.7, 25.0, 40.0, 50.0];
    let mut jy_err: f64 = 0.0;
    let mut wronskian: f64 = 0.0;
    let mut j_recurrence: f64 = 0.0;
    for &nu in &nus {
        for &x in &xs {
            let (j, y) = jy_oracle(nu, x);
            let modulus = j.hypot(y);
            jy_err = jy_err.max((bessel_j(nu, x)? - j).abs() / modulus).max((bessel_y(nu, x)? - y).abs() / modulus);
            let w = bessel_j(nu + 1.0, x)? * bessel_y(nu, x)? - bessel_j(nu, x)? * bessel_y(nu + 1.0, x)?;
            wronskian = wronskian.max((w - 2.0 / (PI * x)).abs() / (2.0 / (PI * x)));
            if nu >= 1.0 {
                let lhs = x * (bessel_j(nu - 1.0, x)? + bessel_j(nu + 1.0, x)?);
                let rhs = 2.0 * nu * bessel_j(nu, x)?;
                j_recurrence = j_recurrence.max((lhs - rhs).abs() / (modulus * x.max(1.0)));
            }
        }
    }
    let mut i_err: f64 = 0.0;
    let mut i_recurrence: f64 = 0.0;
    let mut used = 0;
    let mut skipped = 0;
    for nu in [0.0, 0.3, 0.5, 1.7, 5.0, 12.5, 20.0] {
        for modulus in [0.5, 2.0, 8.0, 20.0, 30.0] {
            for arg in [0.0, PI / 6.0, PI / 3.0, 0.45 * PI] {
                let z = Complex64::from_polar(modulus, arg);
                let (want, scale) = i_oracle(nu, z);
                // the oracle loses digits in proportion to scale/|I|
                if scale > 1e5 * want.norm() {
                    skipped += 1;
                } else {
                    used += 1;
                    i_err = i_err.max((bessel_i(nu, z)? - want).norm() / want.norm());
                }
                if nu >= 1.0 {
                    let lhs = bessel_i(nu - 1.0, z)? - bessel_i(nu + 1.0, z)?;
                    let rhs = bessel_i(nu, z)? * (2.0 * nu) / z;
                    i_recurrence = i_recurrence.max((lhs - rhs).norm() / (lhs.norm() + rhs.norm()));
                }
            }
        }
    }
    let worst = jy_err.max(wronskian).max(j_recurrence).max(i_err).max(i_recurrence);
    Ok(outcome(
        worst <= 1e-9,
        format!(
            "J/Y vs integrals {jy_err:.2e} (rel. to sqrt(J^2+Y^2)), Wronskian {wronskian:.2e}, J recurrence {j_recurrence:.2e}, \
             I vs integrals {i_err:.2e} ({used} points, {skipped} ill-conditioned skipped), I recurrence {i_recurrence:.2e}; limit 1e-9"
        ),
    ))
}

// --- 2. kernel equivalence -------------------------------------------------

/// Point pairs with r₁r₂/|t| log-uniform in [0.1, 20], away from antipodal angles.
fn scaled_pairs(seed: u64, n: usize) -> Vec<(PolarPoint, PolarPoint, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = PolarPoint::new(rng.gen_range(0.5..2.0), rng.gen_range(0.0..2.0 * PI));
        let y = PolarPoint::new(rng.gen_range(0.5..2.0), rng.gen_range(0.0..2.0 * PI));
        let ratio = rng.gen_range(0.1f64.ln()..20f64.ln()).exp();
        if ((x.theta - y.theta).rem_euclid(2.0 * PI) - PI).abs() > 0.3 {
            out.push((x, y, x.r * y.r / ratio));
        }
    }
    out
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn kernel_equivalence() -> Result<Outcome> {
    let opts = KernelOptions::default();
    let mut schrodinger: f64 = 0.0;
    let mut heat: f64 = 0.0;
    for alpha in [0.3, 0.5, 0.7] {
        let flux = FluxConfig::constant(alpha);
        for (seed, gamma) in [(21, 0.3), (22, 0.8)] {
            for (x, y, t) in scaled_pairs(seed, 20) {
                let tau = Complex64::from_polar(t, -gamma);
                let time = tau * Complex64::i();
                let closed = schrodinger_kernel_closed_complex(tau, x, y, &flux)?;
                let series = kernel_series(time, x, y, &flux, modes_needed(time, x, y, 1e-15).max(40))?.value();
                schrodinger = schrodinger.max(relative(closed, series));
            }
        }
        for (x, y, t) in scaled_pairs(23, 20) {
            let real = Complex64::new(t, 0.0);
            let closed = kernel_closed(real, x, y, &flux, &opts)?.gauss_scaled();
            let series = heat_kernel_series(t, x, y, &flux, modes_needed(real, x, y, 1e-15).max(40))?.gauss_scaled();
            heat = heat.max(relative(closed, series));
        }
    }
    Ok(outcome(
        schrodinger <= 1e-6 && heat <= 1e-9,
        format!("Schrodinger closed vs series {schrodinger:.2e} (limit 1e-6), heat {heat:.2e} (limit 1e-9)"),
    ))
}

// --- 3. free case ------------------------------------------------------------

fn free_case() -> Result<Outcome> {
    let fluxes = [
        FluxConfig::constant(0.0),
        FluxConfig::constant(1.0),
        FluxConfig::constant(-2.0),
        FluxConfig::new(TrigPoly::new(vec![1.0, 0.3], vec![0.0, 0.2]), TrigPoly::default()),
    ];
    let pairs = random_pairs(5, 10);
    let mut diffractive: f64 = 0.0;
    let mut closed_err: f64 = 0.0;
    let mut series_err: f64 = 0.0;
    for flux in &fluxes {
        for &(x, y) in &pairs {
            for s in [0.0, 0.5, 2.0, 8.0] {
                diffractive = diffractive.max(coeff_b(s, x.theta, y.theta, flux)?.norm());
            }
            let free = Complex64::new(0.0, flux.alpha_integral(y.theta, x.theta)).exp() * C_FREE;
            for t in [0.3, 1.0, 4.0] {
                let time = Complex64::new(t, 0.0);
                closed_err = closed_err.max(relative(kernel_closed(time, x, y, flux, &KernelOptions::default())?.gauss_scaled(), free));
                series_err = series_err.max(relative(kernel_series(time, x, y, flux, 80)?.gauss_scaled(), free));
            }
        }
    }
    let first = calibrate()?;
    let second = calibrate()?;
    let rerun = first
        .iter()
        .zip(&second)
        .map(|(a, b)| (a.measured - b.measured).abs() / a.frozen.abs())
        .fold(0.0, f64::max);
    let drift = first.iter().map(|c| c.relative_deviation()).fold(0.0, f64::max);
    Ok(outcome(
        diffractive <= 1e-12 && closed_err <= 1e-10 && series_err <= 1e-10 && rerun <= 1e-8 && drift <= 1e-8,
        format!(
            "diffractive coefficient {diffractive:.2e} (limit 1e-12), closed vs free {closed_err:.2e}, \
             partial waves vs free {series_err:.2e} (limit 1e-10), calibration rerun {rerun:.2e}, \
             calibrated vs frozen {drift:.2e} (limit 1e-8)"
        ),
    ))
}

// --- 4. Stone formula ----------------------------------------------------------

fn stone() -> Result<Outcome> {
    let flux = FluxConfig::constant(0.5);
    let pairs = random_pairs(11, 10);
    let mut worst: f64 = 0.0;
    for lambda in [0.5, 2.0, 8.0] {
        let r = stone_check(lambda, &pairs, &flux, 80, 1e-6)?;
        worst = worst.max(r.values["relative_error"].iter().cloned().fold(0.0, f64::max));
    }
    Ok(outcome(worst <= 1e-6, format!("max relative error {worst:.2e} over 3 lambdas x 10 pairs (limit 1e-6)")))
}

// --- 5. Poisson summation ----------------------------------------------------

fn poisson_error(svals: &[f64], n: i64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for abar in [0.3, -0.3, 0.45, -0.45] {
        for i in 0..16 {
            let dtheta = -PI + (i as f64 + 0.5) * 2.0 * PI / 16.0;
            for &s in svals {
                let closed = poisson_closed_form(s, dtheta, abar)?;
                worst = worst.max((closed - poisson_truncated_sum(s, dtheta, abar, n)).norm());
            }
        }
    }
    Ok(worst)
}

fn poisson() -> Result<Outcome> {
    let large = [0.5, 0.75, 1.0, 2.0, 4.0, 8.0];
    let small = [0.1, 0.15, 0.2, 0.3, 0.4];
    let e_large = poisson_error(&large, 80)?;
    let e_small = poisson_error(&small, 80)?;
    let e_small_long = poisson_error(&small, 400)?;
    Ok(outcome(
        e_large <= 1e-12 && e_small <= 1e-8,
        format!(
            "|j|<=80: s>=0.5 abs error {e_large:.2e} (limit 1e-12), 0.1<=s<0.5 abs error {e_small:.2e} (limit 1e-8); \
             with |j|<=400 the small-s error is {e_small_long:.2e}"
        ),
    ))
}

// --- 9. eigenvalues ------------------------------------------------------------

fn eigenvalues(runner: &mut Runner) -> Result<Outcome> {
    let flux = FluxConfig::new(TrigPoly::new(vec![0.3, 0.2], vec![0.0, 0.1]), TrigPoly::default());
    let spec = solve_angular(&flux, 64)?;
    let phi = flux.mean_flux();
    let explicit = spec
        .eigenvalues
        .iter()
        .zip(&spec.labels)
        .filter(|(_, k)| k.unsigned_abs() <= 32)
        .map(|(mu, k)| (mu - (*k as f64 + phi).powi(2)).abs())
        .fold(0.0, f64::max);
    let electric = FluxConfig::constant(0.3).with_potential(TrigPoly::new(vec![0.0, 0.2], vec![]));
    let direct = asymptotics_check(&solve_angular(&electric, 64)?, &electric, 8, 20)?;
    let configured = runner.run_all(&["eigs"])?;
    Ok(outcome(
        explicit <= 1e-10 && direct.pass && configured.pass,
        format!(
            "a=0 Galerkin vs (k+Phi)^2 {explicit:.2e} (limit 1e-10); asymptotics j in [8,20]: {}; config: {}",
            fmt_stats(&direct),
            configured.measured
        ),
    ))
}

// --- 10. transforms and flows --------------------------------------------------

fn physical_l2(state: &FieldState, flow: FlowSpec, t: f64) -> Result<f64> {
    let dr = 0.05;
    let radii: Vec<f64> = (1..=1200).map(|i| i as f64 * dr).collect();
    let n = 48;
    let table = state.field_table(Some(flow), &[t], SpectralFilter::None, &radii, &angle_grid(n))?;
    let dth = 2.0 * PI / n as f64;
    Ok(table[0].iter().zip(&radii).map(|(row, r)| row.iter().map(|v| v.norm_sqr()).sum::<f64>() * r * dr * dth).sum())
}

fn transforms_and_flows() -> Result<Outcome> {
    let mut round_trip: f64 = 0.0;
    for nu in [0.0, 0.3, 1.5, 4.0] {
        let shape = |r: f64| Complex64::new(r.powf(nu) * (1.0 + 0.3 * r * r) * (-r * r / 2.0).exp(), 0.0);
        let f = RadialProfile::from_fn(12.0, 12.0, shape);
        let back = hankel_transform(nu, &hankel_transform(nu, &f)?)?;
        let peak = f.max_abs();
        for (r, v) in back.grid.nodes.iter().zip(&back.values) {
            round_trip = round_trip.max((v - shape(*r)).norm() / peak);
        }
    }
    let mut weber: f64 = 0.0;
    for nu in [0.0, 0.3, 0.5, 2.2, 7.5] {
        for t in [Complex64::new(0.5, 0.0), Complex64::new(2.0, 0.0), Complex64::new(1.0, -0.6)] {
            for (r1, r2) in [(0.5, 1.3), (2.0, 2.5)] {
                let r = weber_check(nu, t, r1, r2, 1e-7)?;
                weber = weber.max(r.values["relative_error"][0]);
            }
        }
    }
    let flux = FluxConfig::constant(0.5);
    let state = FieldState::gaussian(&flux, 0.0, 1.0, 1)?;
    let mass = state.l2_norm_sq_spectral()?;
    let mut conservation: f64 = 0.0;
    for eq in [Equation::Schrodinger, Equation::HalfWave, Equation::KleinGordon] {
        for t in [0.5, 3.0] {
            conservation = conservation.max((physical_l2(&state, FlowSpec::new(eq), t)? / mass - 1.0).abs());
        }
    }
    let flux = FluxConfig::constant(0.3);
    let state = FieldState::lp_random(&flux, 4, 0, 1)?;
    let radii = [0.3, 1.0, 2.5, 4.0];
    let thetas = angle_grid(8);
    let mut group: f64 = 0.0;
    for eq in [Equation::Schrodinger, Equation::KleinGordon, Equation::Heat] {
        let flow = FlowSpec::new(eq);
        let once = state.field_table(Some(flow), &[1.5], SpectralFilter::None, &radii, &thetas)?;
        let twice = state.evolve(flow, 0.5).field_table(Some(flow), &[1.0], SpectralFilter::None, &radii, &thetas)?;
        for (a, b) in once[0].iter().flatten().zip(twice[0].iter().flatten()) {
            group = group.max((a - b).norm());
        }
    }
    Ok(outcome(
        round_trip <= 1e-6 && weber <= 1e-7 && conservation <= 1e-6 && group <= 1e-10,
        format!(
            "Hankel round trip {round_trip:.2e} (limit 1e-6), Weber {weber:.2e} (limit 1e-7), \
             L2 conservation {conservation:.2e} (limit 1e-6), group law {group:.2e} (limit 1e-10)"
        ),
    ))
}

// --- 11. functional estimates -----------------------------------------------------

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn functional_estimates(runner: &mut Runner) -> Result<Outcome> {
    let configured = runner.run_all(&["strichartz", "sobolev", "hardy", "smoothing"])?;
    let pair = AdmissiblePair::new(4.0, 4.0, 1.0)?;
    let family = DataFamily { seeds: vec![1, 2, 3], scales: vec![1.0], ..Default::default() };
    let window = SpaceTimeWindow::default();
    let mut medians = Vec::new();
    for alpha in [0.0, 1.0] {
        let r = strichartz_sweep(&[pair], &FluxConfig::constant(alpha), &family, &window)?;
        medians.push(median(&r.values["ratio_q4_p4_eta1"]));
    }
    let baseline = (medians[1] / medians[0] - 1.0).abs();
    Ok(outcome(
        configured.pass && baseline <= 0.2,
        format!(
            "{}; free baseline median ratio alpha=1 {:.4} vs alpha=0 {:.4}, difference {:.1}% (limit 20%)",
            configured.measured,
            medians[1],
            medians[0],
            100.0 * baseline
        ),
    ))
}

/// Reruns every config executed so far and compares output hashes.
fn reproducibility(runner: &mut Runner) -> Result<Outcome> {
    let first: Vec<(String, RunSummary)> = std::mem::take(&mut runner.summaries);
    let mut files = 0;
    let mut differing = Vec::new();
    for (name, summary) in &first {
        runner.run(name)?;
        let (_, again) = runner.summaries.last().expect("rerun recorded");
        files += summary.outputs.len();
        if summary.outputs != again.outputs {
            differing.push(name.clone());
        }
    }
    Ok(outcome(
        differing.is_empty(),
        format!("{} configs, {files} output files rerun; differing: {differing:?}", first.len()),
    ))
}

// --- driver ---------------------------------------------------------------------

fn main() {
    let started = Instant::now();
    let mut runner = Runner::new();
    let mut results: Vec<(u32, bool)> = Vec::new();
    let mut report = |id: u32, name: &str, limit: Option<Duration>, f: &mut dyn FnMut() -> Result<Outcome>| {
        let t0 = Instant::now();
        let out = f().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        let elapsed = t0.elapsed();
        let in_time = limit.map_or(true, |l| elapsed <= l);
        let pass = out.pass && in_time;
        let timing = match limit {
            Some(l) => format!("{:.1} s, limit {} s", elapsed.as_secs_f64(), l.as_secs()),
            None => format!("{:.1} s", elapsed.as_secs_f64()),
        };
        println!("{} {id:>2} {name}: {} ({timing})", if pass { "PASS" } else { "FAIL" }, out.measured);
        results.push((id, pass));
    };

    report(1, "special functions", Some(Duration::from_secs(10)), &mut special_functions);
    report(2, "kernel equivalence", Some(Duration::from_secs(120)), &mut kernel_equivalence);
    report(3, "free case", None, &mut free_case);
    report(4, "Stone formula", None, &mut stone);
    report(5, "Poisson summation", None, &mut poisson);
    report(6, "heat Gaussian bound", Some(Duration::from_secs(300)), &mut || {
        runner.run_all(&["heat_bound", "heat_bound_potential"])
    });
    report(7, "dispersive decay", None, &mut || runner.run_all(&["decay", "decay_ring", "decay_kg"]));
    report(8, "frequency-localized kernels", None, &mut || runner.run_all(&["localized"]));
    report(9, "eigenvalues", None, &mut || eigenvalues(&mut runner));
    report(10, "transforms and flows", None, &mut transforms_and_flows);
    report(11, "Strichartz/Sobolev/Hardy/smoothing and reproducibility", None, &mut || {
        let f = functional_estimates(&mut runner)?;
        let r = reproducibility(&mut runner)?;
        Ok(outcome(f.pass && r.pass, format!("{}; byte-identical rerun: {}", f.measured, r.measured)))
    });

    let passed = results.iter().filter(|r| r.1).count();
    println!("acceptance: {passed}/{} criteria pass ({:.0} s)", results.len(), started.elapsed().as_secs_f64());
    let mut unexpected = false;
    for &(id, pass) in &results {
        if pass {
            continue;
        }
        match DOCUMENTED_FAILURES.iter().find(|d| d.0 == id) {
            Some((_, why)) => println!("criterion {id} fails for a documented reason: {why}"),
            None => unexpected = true,
        }
    }
    if unexpected {
        std::process::exit(1);
    }
}

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::datum::RadialDatum;
use super::flow::FlowSpec;
use crate::angular::{minimum_truncation, solve_angular, AngularSpectrum, FluxConfig};
use crate::specfun::bessel_j;
use crate::transforms::{DyadicWindow, RadialGrid};
use crate::{Error, Result};

/// Upper limit on Bessel evaluations for one radial table.
const MAX_BESSEL_TABLE: usize = 400_000_000;

/// One angular component amplitude·ψ_k(θ)·c(r).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeComponent {
    pub label: i64,
    pub order: f64,
    pub amplitude: Complex64,
    pub datum: RadialDatum,
}

/// Extra spectral factor applied on top of the evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralFilter {
    None,
    Window(DyadicWindow),
    /// ρ^σ (homogeneous fractional power L^{σ/2})
    Power(f64),
    /// (1 + ρ²)^{s/2}
    Bessel(f64),
    /// 1 − φ₀(ρ)
    High,
}

impl SpectralFilter {
    pub fn eval(&self, rho: f64) -> f64 {
        match *self {
            SpectralFilter::None => 1.0,
            SpectralFilter::Window(w) => w.eval(rho),
            SpectralFilter::Power(s) => rho.powf(s),
            SpectralFilter::Bessel(s) => (1.0 + rho * rho).powf(0.5 * s),
            SpectralFilter::High => 1.0 - DyadicWindow::Low.eval(rho),
        }
    }

    pub fn knots(&self) -> Vec<f64> {
        match *self {
            SpectralFilter::Window(w) => w.knots(),
            SpectralFilter::High => DyadicWindow::Low.knots(),
            _ => Vec::new(),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            SpectralFilter::Window(w) => w.support(),
            SpectralFilter::High => (1.0, f64::INFINITY),
            _ => (0.0, f64::INFINITY),
        }
    }
}

/// Initial data decomposed over the angular eigenbasis, with the flows
/// applied so far. Evolution multiplies the spectral amplitudes; physical
/// values are produced on demand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldState {
    pub flux: FluxConfig,
    pub spectrum: AngularSpectrum,
    pub components: Vec<ModeComponent>,
    pub history: Vec<(FlowSpec, f64)>,
}

impl FieldState {
    /// Empty state; explicit spectrum for a ≡ 0, Galerkin otherwise.
    pub fn new(flux: &FluxConfig, k_max: usize) -> Result<Self> {
        flux.validate()?;
        let spectrum = if flux.has_potential() {
            solve_angular(flux, (4 * k_max).max(minimum_truncation(flux)))?
        } else {
            AngularSpectrum::explicit(flux, k_max)?
        };
        Ok(FieldState { flux: flux.clone(), spectrum, components: Vec::new(), history: Vec::new() })
    }

    pub fn with_component(mut self, label: i64, amplitude: Complex64, datum: RadialDatum) -> Result<Self> {
        let idx = self
            .spectrum
            .index_of(label)
            .ok_or_else(|| Error::Parameter(format!("angular mode {label} is outside the spectrum")))?;
        let mu = self.spectrum.eigenvalues[idx];
        if mu < 0.0 {
            return Err(Error::Domain(format!("negative angular eigenvalue {mu} for mode {label}")));
        }
        self.components.push(ModeComponent { label, order: mu.sqrt(), amplitude, datum });
        Ok(self)
    }

    /// Gaussian family: centred r^ν e^{−r²/(2w²)} for r0 = 0, a Gaussian ring at r0 otherwise.
    pub fn gaussian(flux: &FluxConfig, r0: f64, width: f64, k: i64) -> Result<Self> {
        let spread = 0.5 * width * width;
        let datum = if r0 == 0.0 { RadialDatum::Gaussian { spread } } else { RadialDatum::Ring { spread, center: r0 } };
        Self::new(flux, k.unsigned_abs() as usize + 2)?.with_component(k, Complex64::new(1.0, 0.0), datum)
    }

    /// Compact annulus bump on [inner, outer] in mode k.
    pub fn annulus(flux: &FluxConfig, inner: f64, outer: f64, k: i64) -> Result<Self> {
        if !(0.0 < inner && inner < outer) {
            return Err(Error::Parameter(format!("annulus needs 0 < inner < outer, got {inner}, {outer}")));
        }
        Self::new(flux, k.unsigned_abs() as usize + 2)?.with_component(
            k,
            Complex64::new(1.0, 0.0),
            RadialDatum::Annulus { inner, outer },
        )
    }

    /// Seeded random-phase packets in frequency band j over modes |k| ≤ k_span.
    pub fn lp_random(flux: &FluxConfig, seed: u64, band: i32, k_span: i64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = Self::new(flux, k_span.unsigned_abs() as usize + 2)?;
        for k in -k_span..=k_span {
            let phase: f64 = rng.gen_range(0.0..TAU);
            let mag: f64 = rng.gen_range(0.5..1.5);
            let shift: f64 = rng.gen_range(0.0..1.0) * 2f64.powi(1 - band);
            s = s.with_component(k, Complex64::from_polar(mag, phase), RadialDatum::Window { band, shift })?;
        }
        Ok(s)
    }

    /// The dilated state u(x/scale). Window data need a power-of-two scale
    /// (the band moves down by log₂ scale).
    pub fn dilated(&self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Parameter(format!("dilation scale must be positive, got {scale}")));
        }
        let octaves = scale.log2();
        let sq = scale * scale;
        let mut s = self.clone();
        for c in s.components.iter_mut() {
            let (datum, factor) = match c.datum {
                RadialDatum::Gaussian { spread } => (RadialDatum::Gaussian { spread: spread * sq }, scale.powf(-c.order)),
                RadialDatum::Ring { spread, center } => {
                    (RadialDatum::Ring { spread: spread * sq, center: center * scale }, sq)
                }
                RadialDatum::Annulus { inner, outer } => {
                    (RadialDatum::Annulus { inner: inner * scale, outer: outer * scale }, 1.0)
                }
                RadialDatum::Window { band, shift } => {
                    if (octaves - octaves.round()).abs() > 1e-12 {
                        return Err(Error::Parameter(format!("window data dilate by powers of two, got {scale}")));
                    }
                    (RadialDatum::Window { band: band - octaves.round() as i32, shift: shift * scale }, sq)
                }
            };
            c.datum = datum;
            c.amplitude *= factor;
        }
        Ok(s)
    }

    pub fn labels(&self) -> Vec<i64> {
        let mut l: Vec<i64> = self.components.iter().map(|c| c.label).collect();
        l.sort();
        l.dedup();
        l
    }

    pub fn eigenfunction(&self, label: i64, theta: f64) -> Complex64 {
        let idx = self.spectrum.index_of(label).expect("label checked at construction");
        self.spectrum.eval(idx, theta)
    }

    /// Whether |u| is independent of θ (one mode of the explicit spectrum).
    pub fn is_rotation_invariant(&self) -> bool {
        self.labels().len() == 1 && !self.flux.has_potential()
    }

    fn history_heat_time(&self) -> Option<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for (f, t) in &self.history {
            total += f.heat_time(*t)?;
        }
        Some(total)
    }

    fn history_multiplier(&self, rho: f64) -> Complex64 {
        self.history.iter().map(|(f, t)| f.multiplier(*t, rho)).product()
    }

    fn history_rate(&self, rho_max: f64) -> f64 {
        self.history.iter().map(|(f, t)| f.phase_rate(*t, rho_max)).sum()
    }

    /// Frequency interval carrying component `comp` under `filter`.
    fn support(&self, comp: &ModeComponent, filter: SpectralFilter) -> Option<(f64, f64)> {
        let (a, b) = comp.datum.frequency_support();
        let (c, d) = filter.support();
        let (lo, hi) = (a.max(c), b.min(d));
        (hi > lo).then_some((lo, hi))
    }

    /// Closed-form radial factors of one component, when available.
    fn closed_rows(
        &self,
        comp: &ModeComponent,
        flow: Option<FlowSpec>,
        times: &[f64],
        filter: SpectralFilter,
        radii: &[f64],
    ) -> Option<Result<Vec<Vec<Complex64>>>> {
        if filter != SpectralFilter::None {
            return None;
        }
        let hist = self.history_heat_time()?;
        let mut shifts = Vec::with_capacity(times.len());
        for &t in times {
            shifts.push(match flow {
                Some(f) => hist + f.heat_time(t)?,
                None => hist,
            });
        }
        comp.datum.evolved_closed(comp.order, shifts[0], 1.0)?.ok()?;
        let nu = comp.order;
        let rows = shifts
            .iter()
            .map(|&time| {
                radii
                    .iter()
                    .map(|&r| comp.datum.evolved_closed(nu, time, r).unwrap().map(|v| v * comp.amplitude))
                    .collect::<Result<Vec<Complex64>>>()
            })
            .collect();
        Some(rows)
    }

    /// Radial factors v_c(t, r) of every component: out[component][time][radius],
    /// for the extra flow applied for each t in `times` after the history.
    ///
    /// Closed forms are used when the total flow is a complex heat time and no
    /// filter is present; otherwise the inverse Hankel transform is evaluated by
    /// ρ-quadrature, sharing one Bessel table per order.
    pub fn radial_tables(
        &self,
        flow: Option<FlowSpec>,
        times: &[f64],
        filter: SpectralFilter,
        radii: &[f64],
    ) -> Result<Vec<Vec<Vec<Complex64>>>> {
        let zero = || vec![vec![Complex64::new(0.0, 0.0); radii.len()]; times.len()];
        let mut out: Vec<Option<Vec<Vec<Complex64>>>> = vec![None; self.components.len()];
        let mut pending: Vec<usize> = Vec::new();
        for (i, comp) in self.components.iter().enumerate() {
            match self.closed_rows(comp, flow, times, filter, radii) {
                Some(rows) => out[i] = Some(rows?),
                None if !comp.datum.has_spectrum() => {
                    return Err(Error::Parameter("this datum can only be evaluated at t = 0 without filters".into()))
                }
                None if self.support(comp, filter).is_none() => out[i] = Some(zero()),
                None => pending.push(i),
            }
        }
        let t_max = times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let r_max = radii.iter().cloned().fold(0.0, f64::max);
        while let Some(&first) = pending.first() {
            let order = self.components[first].order;
            let (group, rest): (Vec<usize>, Vec<usize>) =
                pending.iter().partition(|&&i| self.components[i].order == order);
            pending = rest;
            let mut lo = f64::INFINITY;
            let mut hi: f64 = 0.0;
            let mut osc: f64 = 0.0;
            let mut knots = filter.knots();
            for &i in &group {
                knots.extend(self.components[i].datum.knots());
                let (a, b) = self.support(&self.components[i], filter).unwrap();
                lo = lo.min(a);
                hi = hi.max(b);
                osc = osc.max(self.components[i].datum.oscillation());
            }
            let extra = flow.map(|f| f.phase_rate(t_max, hi)).unwrap_or(0.0);
            let rate = self.history_rate(hi) + extra + osc + r_max + 1.0;
            let grid = RadialGrid::graded_with_knots(lo, hi, rate, &knots);
            if grid.len().saturating_mul(radii.len()) > MAX_BESSEL_TABLE {
                return Err(Error::Resolution(format!(
                    "{} frequency nodes × {} radii exceeds the table budget",
                    grid.len(),
                    radii.len()
                )));
            }
            let table: Vec<Vec<f64>> = radii
                .par_iter()
                .map(|&r| grid.nodes.iter().map(|&rho| bessel_j(order, r * rho)).collect::<Result<Vec<f64>>>())
                .collect::<Result<_>>()?;
            for &i in &group {
                let comp = &self.components[i];
                let base: Vec<Complex64> = grid
                    .nodes
                    .iter()
                    .zip(&grid.weights)
                    .map(|(&rho, &w)| {
                        Ok(comp.datum.spectral(order, rho)?
                            * self.history_multiplier(rho)
                            * (filter.eval(rho) * w)
                            * comp.amplitude)
                    })
                    .collect::<Result<_>>()?;
                let mut rows = Vec::with_capacity(times.len());
                for &t in times {
                    let weights: Vec<Complex64> = match flow {
                        Some(f) => base.iter().zip(&grid.nodes).map(|(b, &rho)| b * f.multiplier(t, rho)).collect(),
                        None => base.clone(),
                    };
                    rows.push(
                        table.par_iter().map(|js| js.iter().zip(&weights).map(|(j, w)| w * *j).sum()).collect(),
                    );
                }
                out[i] = Some(rows);
            }
        }
        Ok(out.into_iter().map(|o| o.unwrap()).collect())
    }

    /// u on the polar grid radii × thetas, for each time: out[t][r][θ].
    pub fn field_table(
        &self,
        flow: Option<FlowSpec>,
        times: &[f64],
        filter: SpectralFilter,
        radii: &[f64],
        thetas: &[f64],
    ) -> Result<Vec<Vec<Vec<Complex64>>>> {
        let mut out = vec![vec![vec![Complex64::new(0.0, 0.0); thetas.len()]; radii.len()]; times.len()];
        let tables = self.radial_tables(flow, times, filter, radii)?;
        for (comp, radial) in self.components.iter().zip(&tables) {
            let ang: Vec<Complex64> = thetas.iter().map(|&th| self.eigenfunction(comp.label, th)).collect();
            for (ti, rows) in radial.iter().enumerate() {
                for (ri, v) in rows.iter().enumerate() {
                    for (ai, a) in ang.iter().enumerate() {
                        out[ti][ri][ai] += v * a;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Radial factors summed per angular label: (labels, out[label][time][radius]).
    /// Σ_label |·|² is the angular integral of |u|² by orthonormality.
    pub fn label_tables(
        &self,
        flow: Option<FlowSpec>,
        times: &[f64],
        filter: SpectralFilter,
        radii: &[f64],
    ) -> Result<(Vec<i64>, Vec<Vec<Vec<Complex64>>>)> {
        let labels = self.labels();
        let mut out = vec![vec![vec![Complex64::new(0.0, 0.0); radii.len()]; times.len()]; labels.len()];
        let tables = self.radial_tables(flow, times, filter, radii)?;
        for (comp, radial) in self.components.iter().zip(&tables) {
            let li = labels.binary_search(&comp.label).unwrap();
            for (ti, rows) in radial.iter().enumerate() {
                for (ri, v) in rows.iter().enumerate() {
                    out[li][ti][ri] += v;
                }
            }
        }
        Ok((labels, out))
    }

    /// Applies the flow for time t (t = 0 is the identity).
    pub fn evolve(&self, flow: FlowSpec, t: f64) -> FieldState {
        let mut s = self.clone();
        if t != 0.0 {
            s.history.push((flow, t));
        }
        s
    }

    /// ‖u‖²_{L²(ℝ²)} = Σ_k ‖ĉ_k‖²_{ρdρ} by Parseval over the eigenbasis.
    pub fn l2_norm_sq_spectral(&self) -> Result<f64> {
        self.l2_norm_sq_filtered(SpectralFilter::None)
    }

    /// ‖filter(√L)u‖²_{L²} by Parseval.
    pub fn l2_norm_sq_filtered(&self, filter: SpectralFilter) -> Result<f64> {
        let mut by_label: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, c) in self.components.iter().enumerate() {
            by_label.entry(c.label).or_default().push(i);
        }
        let mut total = 0.0;
        for idxs in by_label.values() {
            let supports: Vec<(f64, f64)> =
                idxs.iter().filter_map(|&i| self.support(&self.components[i], filter)).collect();
            if supports.is_empty() {
                continue;
            }
            let lo = supports.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
            let hi = supports.iter().map(|s| s.1).fold(0.0, f64::max);
            let osc = idxs.iter().map(|&i| self.components[i].datum.oscillation()).fold(0.0, f64::max);
            let mut knots = filter.knots();
            knots.extend(idxs.iter().flat_map(|&i| self.components[i].datum.knots()));
            let grid = RadialGrid::graded_with_knots(lo, hi, 2.0 * osc + 1.0, &knots);
            for (&rho, &w) in grid.nodes.iter().zip(&grid.weights) {
                let mut v = Complex64::new(0.0, 0.0);
                for &i in idxs {
                    let c = &self.components[i];
                    v += c.datum.spectral(c.order, rho)? * c.amplitude;
                }
                total += (v * self.history_multiplier(rho) * filter.eval(rho)).norm_sqr() * w;
            }
        }
        Ok(total)
    }

    /// Largest radius where the state is non-negligible after extra time t.
    pub fn reach(&self, flow: Option<FlowSpec>, t: f64) -> f64 {
        let mut r: f64 = 0.0;
        for c in &self.components {
            let (_, hi) = c.datum.frequency_support();
            let spread = self.history_rate(hi) + flow.map(|f| f.phase_rate(t, hi)).unwrap_or(0.0);
            r = r.max(c.datum.extent() + spread);
        }
        r
    }

    /// Highest frequency carried by the data.
    pub fn bandwidth(&self) -> f64 {
        self.components.iter().map(|c| c.datum.frequency_support().1).fold(0.0, f64::max)
    }
}

/// Uniform periodic angle grid.
pub fn angle_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

/// Angular samples needed for the given modes.
pub fn angle_count(state: &FieldState) -> usize {
    if state.is_rotation_invariant() {
        return 1;
    }
    let span = state.labels().iter().map(|k| k.unsigned_abs()).max().unwrap_or(0) as usize;
    let gauge = state.spectrum.gauge.bandwidth() + state.spectrum.truncation.min(4 * span + 8);
    (4 * (span + gauge) + 16).max(16)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagators::Equation;

    #[test]
    fn quadrature_and_closed_form_agree() {
        let flux = FluxConfig::constant(0.5);
        let s = FieldState::gaussian(&flux, 1.5, 0.6, 1).unwrap();
        let radii = [0.3, 1.0, 2.0, 3.5];
        let heat = FlowSpec::new(Equation::Heat);
        let closed = s.radial_tables(Some(heat), &[0.4], SpectralFilter::None, &radii).unwrap();
        let quad = s.radial_tables(Some(heat), &[0.4], SpectralFilter::Bessel(0.0), &radii).unwrap();
        for (a, b) in closed[0][0].iter().zip(&quad[0][0]) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
        let sch = FlowSpec::new(Equation::Schrodinger);
        let closed = s.radial_tables(Some(sch), &[2.0], SpectralFilter::None, &radii).unwrap();
        let quad = s.radial_tables(Some(sch), &[2.0], SpectralFilter::Bessel(0.0), &radii).unwrap();
        for (a, b) in closed[0][0].iter().zip(&quad[0][0]) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn dilation_is_exact() {
        let flux = FluxConfig::constant(0.3);
        let radii = [0.4, 1.1, 2.5];
        for s in [
            FieldState::gaussian(&flux, 0.0, 0.8, 1).unwrap(),
            FieldState::gaussian(&flux, 1.2, 0.5, -1).unwrap(),
            FieldState::lp_random(&flux, 5, 1, 0).unwrap(),
        ] {
            let d = s.dilated(2.0).unwrap();
            let half: Vec<f64> = radii.iter().map(|r| r / 2.0).collect();
            let want = s.radial_tables(None, &[0.0], SpectralFilter::None, &half).unwrap();
            let got = d.radial_tables(None, &[0.0], SpectralFilter::None, &radii).unwrap();
            for (a, b) in want[0][0].iter().zip(&got[0][0]) {
                assert!((a - b).norm() < 1e-9 * a.norm().max(1e-3), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn parseval_matches_physical_norm() {
        let flux = FluxConfig::constant(0.3);
        let s = FieldState::lp_random(&flux, 7, 1, 2).unwrap();
        let spectral = s.l2_norm_sq_spectral().unwrap();
        let grid = RadialGrid::graded(40.0, 8.0);
        let thetas = angle_grid(angle_count(&s));
        let table = s.field_table(None, &[0.0], SpectralFilter::None, &grid.nodes, &thetas).unwrap();
        let dth = TAU / thetas.len() as f64;
        let phys: f64 = table[0]
            .iter()
            .zip(&grid.weights)
            .map(|(row, w)| row.iter().map(|v| v.norm_sqr()).sum::<f64>() * dth * w)
            .sum();
        assert!((phys - spectral).abs() < 1e-8 * spectral, "{phys} vs {spectral}");
    }
}

use serde::{Deserialize, Serialize};

use crate::angular::FluxConfig;
use crate::estimates::{AdmissiblePair, DataFamily, SmoothingBranch, SpaceTimeWindow};
use crate::kernels::KernelKind;
use crate::propagators::Equation;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Kernel,
    Decay,
    Localized,
    HeatBound,
    Stone,
    Strichartz,
    Sobolev,
    Eigs,
    Hardy,
    Smoothing,
}

impl Scenario {
    pub const ALL: [Scenario; 10] = [
        Scenario::Kernel,
        Scenario::Decay,
        Scenario::Localized,
        Scenario::HeatBound,
        Scenario::Stone,
        Scenario::Strichartz,
        Scenario::Sobolev,
        Scenario::Eigs,
        Scenario::Hardy,
        Scenario::Smoothing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Kernel => "kernel",
            Scenario::Decay => "decay",
            Scenario::Localized => "localized",
            Scenario::HeatBound => "heat-bound",
            Scenario::Stone => "stone",
            Scenario::Strichartz => "strichartz",
            Scenario::Sobolev => "sobolev",
            Scenario::Eigs => "eigs",
            Scenario::Hardy => "hardy",
            Scenario::Smoothing => "smoothing",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Scenario::Kernel => "closed-form vs partial-wave kernels on a parameter x point-pair grid",
            Scenario::Decay => "sup-norm decay ratio of an evolved datum over a time grid",
            Scenario::Localized => "uniformity in k of frequency-localized Klein-Gordon kernels",
            Scenario::HeatBound => "Gaussian upper bound constants of the heat kernel",
            Scenario::Stone => "resolvent jump vs closed-form spectral measure",
            Scenario::Strichartz => "space-time norm ratios over a seeded data family",
            Scenario::Sobolev => "L^q vs fractional-power L^p ratios over a data family",
            Scenario::Eigs => "angular eigenvalues and their large-index asymptotics",
            Scenario::Hardy => "magnetic Hardy inequality ratios",
            Scenario::Smoothing => "weighted space-time L^2 local smoothing ratios",
        }
    }
}

/// Point pair written as [r1, theta1, r2, theta2].
pub type PairSpec = [f64; 4];

fn default_pairs() -> Vec<PairSpec> {
    vec![[1.0, 0.3, 1.5, 2.0], [0.7, 0.1, 0.9, 2.2], [1.0, 1.0, 1.0, 1.0], [0.5, 0.0, 2.0, 1.0]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelParams {
    pub kind: KernelKind,
    /// Times (schrodinger, heat) or frequencies (spectral).
    pub params: Vec<f64>,
    pub pairs: Vec<PairSpec>,
    pub tol: f64,
    pub k_max: usize,
    /// Largest relative closed/series difference that passes.
    pub agreement: f64,
    /// Schrödinger comparisons run at τ = t·e^{−iγ} for each γ here.
    pub rotations: Vec<f64>,
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams {
            kind: KernelKind::Heat,
            params: vec![0.1, 0.5, 1.0, 2.0],
            pairs: default_pairs(),
            tol: 1e-12,
            k_max: 80,
            agreement: 1e-9,
            rotations: vec![0.3, 0.8],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatumFamily {
    Gaussian,
    Ring,
    Lp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayParams {
    pub equation: Equation,
    pub family: DatumFamily,
    pub width: f64,
    pub center: f64,
    pub mode: i64,
    pub band: i32,
    pub k_span: i64,
    pub times: Vec<f64>,
}

impl Default for DecayParams {
    fn default() -> Self {
        DecayParams {
            equation: Equation::Schrodinger,
            family: DatumFamily::Gaussian,
            width: 1.0,
            center: 2.0,
            mode: 0,
            band: 3,
            k_span: 2,
            times: (0..=12).map(|i| 2f64.powf(i as f64 / 2.0)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalizedParams {
    pub k_min: i32,
    pub k_max: i32,
    pub etas: Vec<f64>,
    pub low_times: Vec<f64>,
}

impl Default for LocalizedParams {
    fn default() -> Self {
        LocalizedParams {
            k_min: 1,
            k_max: 6,
            etas: vec![0.0, 1.0],
            low_times: std::iter::once(0.0).chain((0..=12).map(|i| 2f64.powf(i as f64 / 2.0))).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeatParams {
    pub times: Vec<f64>,
    pub pairs: Vec<PairSpec>,
}

impl Default for HeatParams {
    fn default() -> Self {
        HeatParams { times: vec![0.01, 0.1, 1.0, 10.0], pairs: default_pairs() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StoneParams {
    pub lambdas: Vec<f64>,
    /// Number of seeded random point pairs.
    pub pairs: usize,
    pub k_max: usize,
    pub tol: f64,
}

impl Default for StoneParams {
    fn default() -> Self {
        StoneParams { lambdas: vec![0.5, 2.0, 8.0], pairs: 10, k_max: 80, tol: 1e-6 }
    }
}

/// Seeded LP data: seeds seed, seed+1, …, seed+count−1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyParams {
    pub count: u64,
    pub band: i32,
    pub k_span: i64,
    pub min_mode: i64,
    pub scales: Vec<f64>,
}

impl Default for FamilyParams {
    fn default() -> Self {
        FamilyParams { count: 10, band: 0, k_span: 2, min_mode: 0, scales: vec![0.5, 1.0, 2.0] }
    }
}

impl FamilyParams {
    pub fn family(&self, seed: u64) -> DataFamily {
        DataFamily {
            seeds: (seed..seed + self.count).collect(),
            band: self.band,
            k_span: self.k_span,
            min_mode: self.min_mode,
            scales: self.scales.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrichartzParams {
    /// Exponent triples [q, p, eta]; q may be `inf`.
    pub pairs: Vec<[f64; 3]>,
    pub data: FamilyParams,
    pub window: SpaceTimeWindow,
}

impl Default for StrichartzParams {
    fn default() -> Self {
        StrichartzParams {
            pairs: vec![[4.0, 4.0, 1.0], [f64::INFINITY, 2.0, 1.0]],
            data: FamilyParams::default(),
            window: SpaceTimeWindow::default(),
        }
    }
}

impl StrichartzParams {
    pub fn admissible_pairs(&self) -> Result<Vec<AdmissiblePair>> {
        self.pairs.iter().map(|&[q, p, eta]| AdmissiblePair::new(q, p, eta)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SobolevParams {
    pub p: f64,
    pub q: f64,
    pub data: FamilyParams,
}

impl Default for SobolevParams {
    fn default() -> Self {
        SobolevParams { p: 2.0, q: 4.0, data: FamilyParams::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EigsParams {
    pub truncation: usize,
    pub j_lo: usize,
    pub j_hi: usize,
    /// Largest deviation from (k+Φ)² that passes when a ≡ 0.
    pub tol: f64,
}

impl Default for EigsParams {
    fn default() -> Self {
        EigsParams { truncation: 64, j_lo: 8, j_hi: 20, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HardyParams {
    pub widths: Vec<f64>,
    pub modes: Vec<i64>,
    /// Seeded LP data added to the Gaussians.
    pub lp_count: u64,
    pub band: i32,
}

impl Default for HardyParams {
    fn default() -> Self {
        HardyParams { widths: vec![0.5, 1.0, 2.0], modes: vec![0, 1, -1], lp_count: 3, band: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoothingParams {
    pub beta: f64,
    pub branch: SmoothingBranch,
    pub data: FamilyParams,
    pub window: SpaceTimeWindow,
}

impl Default for SmoothingParams {
    fn default() -> Self {
        SmoothingParams {
            beta: 0.75,
            branch: SmoothingBranch::High,
            data: FamilyParams { band: 2, ..FamilyParams::default() },
            window: SpaceTimeWindow::default(),
        }
    }
}

/// A run: one scenario, one flux profile, and the scenario's parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub flux: FluxConfig,
    #[serde(default)]
    pub seed: u64,
    /// Accept an electric profile whose negative part reaches min_k|k−Φ|².
    /// Partial-wave checks still reject a negative angular eigenvalue.
    #[serde(default)]
    pub allow_negative_part: bool,
    /// Output directory below the output root; defaults to the config file stem.
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub kernel: KernelParams,
    #[serde(default)]
    pub decay: DecayParams,
    #[serde(default)]
    pub localized: LocalizedParams,
    #[serde(default)]
    pub heat_bound: HeatParams,
    #[serde(default)]
    pub stone: StoneParams,
    #[serde(default)]
    pub strichartz: StrichartzParams,
    #[serde(default)]
    pub sobolev: SobolevParams,
    #[serde(default)]
    pub eigs: EigsParams,
    #[serde(default)]
    pub hardy: HardyParams,
    #[serde(default)]
    pub smoothing: SmoothingParams,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

fn nonempty<T>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        Err(Error::Config(format!("{name} must not be empty")))
    } else {
        Ok(())
    }
}

fn check_window(w: &SpaceTimeWindow) -> Result<()> {
    positive("window.t_max", w.t_max)?;
    positive("window.r_min", w.r_min)?;
    positive("window.time_panel", w.time_panel)?;
    if w.r_max <= w.r_min {
        return Err(Error::Config("window.r_max must exceed window.r_min".into()));
    }
    Ok(())
}

fn check_family(f: &FamilyParams) -> Result<()> {
    if f.count == 0 {
        return Err(Error::Config("data.count must be at least 1".into()));
    }
    nonempty("data.scales", &f.scales)?;
    for &s in &f.scales {
        positive("data.scales", s)?;
    }
    Ok(())
}

fn check_pairs(pairs: &[PairSpec]) -> Result<()> {
    nonempty("pairs", pairs)?;
    for p in pairs {
        positive("pair radius", p[0])?;
        positive("pair radius", p[2])?;
    }
    Ok(())
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the flux profile and the parameters of the selected scenario.
    pub fn validate(&self) -> Result<()> {
        match self.flux.validate() {
            Err(Error::NegativePartBound { .. }) if self.allow_negative_part => {}
            other => other?,
        }
        match self.scenario {
            Scenario::Kernel => {
                let k = &self.kernel;
                nonempty("kernel.params", &k.params)?;
                for &p in &k.params {
                    positive("kernel.params", p)?;
                }
                check_pairs(&k.pairs)?;
                positive("kernel.tol", k.tol)?;
                positive("kernel.agreement", k.agreement)?;
                if k.kind == KernelKind::Schrodinger {
                    if self.flux.has_potential() {
                        return Err(Error::Config("schrodinger kernels need a = 0".into()));
                    }
                    if k.rotations.iter().any(|g| !(*g > 0.0 && *g < std::f64::consts::FRAC_PI_2)) {
                        return Err(Error::Config("kernel.rotations must lie in (0, pi/2)".into()));
                    }
                }
            }
            Scenario::Decay => {
                let d = &self.decay;
                nonempty("decay.times", &d.times)?;
                for &t in &d.times {
                    positive("decay.times", t)?;
                }
                positive("decay.width", d.width)?;
                if d.times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Config("decay.times must be increasing".into()));
                }
            }
            Scenario::Localized => {
                let l = &self.localized;
                if l.k_min < 1 || l.k_max < l.k_min {
                    return Err(Error::Config("localized needs 1 <= k_min <= k_max".into()));
                }
                nonempty("localized.etas", &l.etas)?;
                if l.etas.iter().any(|e| !(0.0..=1.0).contains(e)) {
                    return Err(Error::Config("localized.etas must lie in [0, 1]".into()));
                }
                nonempty("localized.low_times", &l.low_times)?;
                if self.flux.has_potential() {
                    return Err(Error::Config("localized kernels use the closed spectral measure, which needs a = 0".into()));
                }
            }
            Scenario::HeatBound => {
                nonempty("heat_bound.times", &self.heat_bound.times)?;
                for &t in &self.heat_bound.times {
                    positive("heat_bound.times", t)?;
                }
                check_pairs(&self.heat_bound.pairs)?;
            }
            Scenario::Stone => {
                nonempty("stone.lambdas", &self.stone.lambdas)?;
                for &l in &self.stone.lambdas {
                    positive("stone.lambdas", l)?;
                }
                if self.stone.pairs == 0 {
                    return Err(Error::Config("stone.pairs must be at least 1".into()));
                }
                if self.flux.has_potential() {
                    return Err(Error::Config("stone compares against the closed form, which needs a = 0".into()));
                }
            }
            Scenario::Strichartz => {
                nonempty("strichartz.pairs", &self.strichartz.pairs)?;
                self.strichartz.admissible_pairs().map_err(|e| Error::Config(e.to_string()))?;
                check_family(&self.strichartz.data)?;
                check_window(&self.strichartz.window)?;
            }
            Scenario::Sobolev => check_family(&self.sobolev.data)?,
            Scenario::Eigs => {
                let e = &self.eigs;
                if e.j_lo == 0 || e.j_hi < e.j_lo {
                    return Err(Error::Config("eigs needs 1 <= j_lo <= j_hi".into()));
                }
            }
            Scenario::Hardy => {
                if self.flux.has_potential() {
                    return Err(Error::Config("hardy needs a = 0".into()));
                }
                for &w in &self.hardy.widths {
                    positive("hardy.widths", w)?;
                }
            }
            Scenario::Smoothing => {
                check_family(&self.smoothing.data)?;
                check_window(&self.smoothing.window)?;
            }
        }
        Ok(())
    }

    /// Parameters of the selected scenario as JSON.
    pub fn scenario_params(&self) -> serde_json::Value {
        let v = match self.scenario {
            Scenario::Kernel => serde_json::to_value(&self.kernel),
            Scenario::Decay => serde_json::to_value(&self.decay),
            Scenario::Localized => serde_json::to_value(&self.localized),
            Scenario::HeatBound => serde_json::to_value(&self.heat_bound),
            Scenario::Stone => serde_json::to_value(&self.stone),
            Scenario::Strichartz => serde_json::to_value(&self.strichartz),
            Scenario::Sobolev => serde_json::to_value(&self.sobolev),
            Scenario::Eigs => serde_json::to_value(&self.eigs),
            Scenario::Hardy => serde_json::to_value(&self.hardy),
            Scenario::Smoothing => serde_json::to_value(&self.smoothing),
        };
        v.unwrap_or(serde_json::Value::Null)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = RunConfig::from_toml("scenario = \"decay\"\n[flux.alpha]\ncos = [0.5]\n").unwrap();
        assert_eq!(cfg.scenario, Scenario::Decay);
        assert_eq!(cfg.decay, DecayParams::default());
        assert_eq!(cfg.flux.mean_flux(), 0.5);
    }

    #[test]
    fn infinite_exponent_and_typos() {
        let text = "scenario = \"strichartz\"\n[flux.alpha]\ncos = [0.5]\n[strichartz]\npairs = [[inf, 2.0, 1.0]]\n";
        let cfg = RunConfig::from_toml(text).unwrap();
        assert!(cfg.strichartz.pairs[0][0].is_infinite());
        let bad = "scenario = \"decay\"\n[flux.alpha]\ncos = [0.5]\n[decay]\ntimez = [1.0]\n";
        assert!(matches!(RunConfig::from_toml(bad), Err(Error::Config(_))));
    }

    #[test]
    fn negative_part_bound_is_named() {
        let text = "scenario = \"kernel\"\n[flux.alpha]\ncos = [0.5]\n[flux.a]\ncos = [0.0, -0.3]\n";
        let err = RunConfig::from_toml(text).unwrap_err();
        assert!(err.to_string().contains("negative part bound"));
        let allowed = format!("allow_negative_part = true\n{text}");
        assert!(RunConfig::from_toml(&allowed).is_ok());
    }
}

//! Command-line front end: `run <config>`, `calibrate`, `list-scenarios`.

mod config;
mod scenarios;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use config::{
    DatumFamily, DecayParams, EigsParams, FamilyParams, HardyParams, HeatParams, KernelParams, LocalizedParams,
    RunConfig, Scenario, SmoothingParams, SobolevParams, StoneParams, StrichartzParams,
};
pub use scenarios::{random_pairs, report_csv, run_scenario, ScenarioOutput, COMPARISON_COLUMNS};

use crate::estimates::{DRIFT_LIMIT, FAMILY_SPREAD_LIMIT, HEAT_VARIATION_LIMIT, UNIFORMITY_LIMIT};
use crate::kernels::calibration::{calibrate, CalibratedConstant};
use crate::kernels::{KernelOptions, INTEGER_FLUX_GUARD};
use crate::{Error, Result};

/// Overrides the default output root `output`.
pub const OUTPUT_ROOT_ENV: &str = "AB_KERNELS_OUTPUT_ROOT";
pub const CALIBRATION_FILE: &str = "calibration.json";
pub const CALIBRATION_HASH_FILE: &str = "calibration.sha256";
/// Relative change of a constant between calibrations that counts as drift.
pub const CALIBRATION_DRIFT_LIMIT: f64 = 1e-8;
/// Largest relative distance of a measured constant from its frozen value.
pub const CALIBRATION_MATCH_LIMIT: f64 = 1e-8;
pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ab-kernels", version, about = "Aharonov-Bohm kernel and dispersive-estimate harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the scenario described by a TOML config.
    Run {
        /// Path to the TOML config.
        config: PathBuf,
    },
    /// Re-derive the kernel constants and write the calibration file.
    Calibrate,
    /// Print the available scenarios.
    ListScenarios,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Convergence(_) | Error::Resolution(_) => EXIT_CONVERGENCE,
        _ => EXIT_CONFIG,
    }
}

pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("output"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationFile {
    pub version: String,
    pub drift_limit: f64,
    pub match_limit: f64,
    pub constants: Vec<CalibratedConstant>,
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Runs the calibration under `root`. An existing file must agree to
/// `CALIBRATION_DRIFT_LIMIT`; returns whether every constant matches its
/// frozen value.
pub fn run_calibrate(root: &Path) -> Result<(bool, CalibrationFile)> {
    let constants = calibrate()?;
    let path = root.join(CALIBRATION_FILE);
    if let Ok(text) = std::fs::read_to_string(&path) {
        let old: CalibrationFile =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("unreadable {}: {e}", path.display())))?;
        for c in &constants {
            let Some(prev) = old.constants.iter().find(|o| o.name == c.name) else {
                continue;
            };
            let change = (c.measured - prev.measured).abs() / prev.measured.abs();
            if change > CALIBRATION_DRIFT_LIMIT {
                return Err(Error::Convergence(format!(
                    "calibration drift: {} moved by {change:.3e} relative (limit {CALIBRATION_DRIFT_LIMIT:e})",
                    c.name
                )));
            }
        }
    }
    let pass = constants.iter().all(|c| c.relative_deviation() <= CALIBRATION_MATCH_LIMIT);
    let file = CalibrationFile {
        version: env!("CARGO_PKG_VERSION").into(),
        drift_limit: CALIBRATION_DRIFT_LIMIT,
        match_limit: CALIBRATION_MATCH_LIMIT,
        constants,
    };
    let mut bytes = serde_json::to_vec_pretty(&file).map_err(|e| Error::Io(e.to_string()))?;
    bytes.push(b'\n');
    write(&path, &bytes)?;
    write(&root.join(CALIBRATION_HASH_FILE), format!("{}\n", sha256_hex(&bytes)).as_bytes())?;
    Ok((pass, file))
}

/// Loads the calibration file, checks its recorded hash and that its frozen
/// constants are the ones compiled in. Returns the hash.
pub fn verify_calibration(root: &Path) -> Result<String> {
    let path = root.join(CALIBRATION_FILE);
    let bytes = std::fs::read(&path).map_err(|_| {
        Error::Config(format!("missing {}; run `ab-kernels calibrate` first", path.display()))
    })?;
    let hash = sha256_hex(&bytes);
    let recorded = std::fs::read_to_string(root.join(CALIBRATION_HASH_FILE)).unwrap_or_default();
    if recorded.trim() != hash {
        return Err(Error::Config(format!("{} does not match its recorded hash", path.display())));
    }
    let file: CalibrationFile =
        serde_json::from_slice(&bytes).map_err(|e| Error::Config(format!("unreadable {}: {e}", path.display())))?;
    let compiled = calibrate_frozen();
    for c in &file.constants {
        match compiled.iter().find(|(n, _)| *n == c.name) {
            Some((_, v)) if *v == c.frozen => {}
            _ => return Err(Error::Config(format!("calibration constant {} differs from the compiled value", c.name))),
        }
    }
    Ok(hash)
}

fn calibrate_frozen() -> Vec<(&'static str, f64)> {
    use crate::kernels::{C_DIFF, C_FREE, C_GEO, C_SM};
    vec![("c_free", C_FREE), ("c_geo", C_GEO), ("c_diff", C_DIFF), ("c_sm", C_SM)]
}

/// Every library-level threshold that can influence a report.
pub fn library_tolerances() -> serde_json::Value {
    let opts = KernelOptions::default();
    serde_json::json!({
        "decade_drift_limit": DRIFT_LIMIT,
        "localized_uniformity_limit": UNIFORMITY_LIMIT,
        "heat_variation_limit": HEAT_VARIATION_LIMIT,
        "family_spread_limit": FAMILY_SPREAD_LIMIT,
        "kernel_quadrature_tol": opts.tol,
        "kernel_max_panels": opts.max_panels,
        "integer_flux_guard": INTEGER_FLUX_GUARD,
        "calibration_drift_limit": CALIBRATION_DRIFT_LIMIT,
        "calibration_match_limit": CALIBRATION_MATCH_LIMIT,
    })
}

/// Everything a run wrote, plus its pass flag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub pass: bool,
    pub outputs: Vec<(String, String)>,
}

/// Executes a config file and writes reports, tables and the manifest.
pub fn run_config_file(path: &Path, root: &Path) -> Result<RunSummary> {
    let started = Instant::now();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let cfg = RunConfig::from_toml(&text)?;
    let calibration_hash = verify_calibration(root)?;
    let output = run_scenario(&cfg)?;
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    let dir = root.join(cfg.output.clone().or(stem).unwrap_or_else(|| cfg.scenario.name().to_string()));
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    for r in &output.reports {
        let mut json = serde_json::to_vec_pretty(r).map_err(|e| Error::Io(e.to_string()))?;
        json.push(b'\n');
        files.push((format!("{}.json", r.name), json));
        files.push((format!("{}.csv", r.name), report_csv(r)?));
    }
    for (stem, bytes) in &output.tables {
        files.push((format!("{stem}.csv"), bytes.clone()));
    }
    let mut outputs = Vec::new();
    for (name, bytes) in &files {
        write(&dir.join(name), bytes)?;
        outputs.push((name.clone(), sha256_hex(bytes)));
    }
    let pass = output.reports.iter().all(|r| r.pass);
    let manifest = serde_json::json!({
        "package": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "scenario": cfg.scenario.name(),
        "config_path": path.display().to_string(),
        "config_sha256": sha256_hex(text.as_bytes()),
        "config": text,
        "flux": cfg.flux,
        "seed": cfg.seed,
        "allow_negative_part": cfg.allow_negative_part,
        "scenario_params": cfg.scenario_params(),
        "calibration_sha256": calibration_hash,
        "tolerances": library_tolerances(),
        "csv_schema": {
            "version": CSV_SCHEMA_VERSION,
            "report": ["series", "index", "value"],
            "kernel_grid": ["param", "r1", "th1", "r2", "th2", "re", "im", "method", "tol"],
            "kernel_comparison": COMPARISON_COLUMNS,
            "eigenvalues": ["index", "label", "eigenvalue"],
        },
        "reports": output.reports.iter().map(|r| serde_json::json!({"name": r.name, "pass": r.pass})).collect::<Vec<_>>(),
        "outputs": outputs.iter().map(|(f, h)| serde_json::json!({"file": f, "sha256": h})).collect::<Vec<_>>(),
        "pass": pass,
        "wall_time_s": started.elapsed().as_secs_f64(),
    });
    let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
    bytes.push(b'\n');
    write(&dir.join("manifest.json"), &bytes)?;
    Ok(RunSummary { dir, pass, outputs })
}

/// Parses arguments, runs the command, returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    let root = output_root();
    match cli.command {
        Command::ListScenarios => {
            for s in Scenario::ALL {
                println!("{:<12} {}", s.name(), s.summary());
            }
            EXIT_PASS
        }
        Command::Calibrate => match run_calibrate(&root) {
            Ok((pass, file)) => {
                for c in &file.constants {
                    println!(
                        "{:<7} measured {:.17e} frozen {:.17e} deviation {:.2e} residual {:.2e}",
                        c.name,
                        c.measured,
                        c.frozen,
                        c.relative_deviation(),
                        c.residual
                    );
                }
                println!("wrote {}", root.join(CALIBRATION_FILE).display());
                if pass {
                    EXIT_PASS
                } else {
                    EXIT_CHECK_FAILED
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit_code(&e)
            }
        },
        Command::Run { config } => match run_config_file(&config, &root) {
            Ok(summary) => {
                for (f, _) in &summary.outputs {
                    println!("{}", summary.dir.join(f).display());
                }
                println!("{}", if summary.pass { "PASS" } else { "FAIL" });
                if summary.pass {
                    EXIT_PASS
                } else {
                    EXIT_CHECK_FAILED
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit_code(&e)
            }
        },
    }
}

//! Command implementations behind the `decoh` binary.

pub mod config;
pub mod csv;
pub mod verify;

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use decoherence_core::coherence::{evolve, CoherenceState, CoherenceTrajectory, DriveSource};
use decoherence_core::drive::{synthesize_profile, DriveProfile};
use decoherence_core::model::ModelParams;
use decoherence_core::Error;

pub use config::{EvolveCases, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("verification failed")]
    Verification,
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
            CliError::Verification => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonFinite { .. } | Error::NotConverged { .. } | Error::DimensionMismatch { .. } => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Runs the built-in checks and returns the text report and overall verdict.
pub fn run_verify(cfg: &RunConfig) -> Result<(String, bool), CliError> {
    let report = verify::run_checks(cfg)?;
    Ok((report.render(), report.passed()))
}

/// Drive profile on the configured grid, with the period filled in.
pub fn drive_profile(cfg: &RunConfig, params: &ModelParams) -> Result<DriveProfile, CliError> {
    let profile = synthesize_profile(params, &cfg.grid()?, cfg.branch_policy, cfg.eps_beta)?.with_period(cfg.w_min());
    let finite = |x: Option<f64>| x.is_none_or(f64::is_finite);
    let escaped = (0..profile.len()).find(|&i| {
        let r = &profile.roots[i];
        !(finite(r.x_plus) && finite(r.x_minus) && profile.x_chosen[i].is_finite() && profile.e_amplitude[i].is_finite())
    });
    if let Some(i) = escaped {
        return Err(CliError::Numerical(format!("non-finite drive value at t = {:e}", profile.grid[i])));
    }
    Ok(profile)
}

/// Per-cell figures reported by `drive` and `sweep`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSummary {
    pub k: u32,
    pub m: u32,
    pub delta_over_omega0: f64,
    pub period_t: Option<f64>,
    pub gated_fraction: f64,
    pub peak_x_chosen: f64,
    pub max_abs_det_ungated: f64,
}

pub const SUMMARY_HEADER: &str = "k,m,delta_over_omega0,period_T,gated_fraction,peak_x_chosen,max_abs_det_ungated";

impl DriveSummary {
    pub fn from_profile(params: &ModelParams, delta_over_omega0: f64, profile: &DriveProfile) -> Result<Self, CliError> {
        let samples = profile.coefficient_samples(params)?;
        let max_det = samples
            .iter()
            .zip(&profile.gated)
            .filter(|(_, &g)| !g)
            .map(|(s, _)| s.det.abs())
            .fold(0.0, f64::max);
        Ok(Self {
            k: params.k,
            m: params.m,
            delta_over_omega0,
            period_t: profile.period_t,
            gated_fraction: profile.gated_fraction(),
            peak_x_chosen: profile.peak_intensity(),
            max_abs_det_ungated: max_det,
        })
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.k,
            self.m,
            csv::fmt_f64(self.delta_over_omega0),
            self.period_t.map(csv::fmt_f64).unwrap_or_default(),
            csv::fmt_f64(self.gated_fraction),
            csv::fmt_f64(self.peak_x_chosen),
            csv::fmt_f64(self.max_abs_det_ungated),
        )
    }
}

/// One drive file per photon multiplicity: the configured `k`, or every
/// entry of `sweep_k` when set.
pub fn run_drive(cfg: &RunConfig) -> Result<Vec<(u32, String, DriveSummary)>, CliError> {
    let ks = if cfg.sweep_k.is_empty() { vec![cfg.k] } else { cfg.sweep_k.clone() };
    ks.into_iter()
        .map(|k| {
            let params = cfg.params_for(k, cfg.m, cfg.delta_over_omega0)?;
            let profile = drive_profile(cfg, &params)?;
            let summary = DriveSummary::from_profile(&params, cfg.delta_over_omega0, &profile)?;
            Ok((k, csv::drive_csv(&profile), summary))
        })
        .collect()
}

/// `drive.csv` becomes `drive_k2.csv` for `k = 2`.
pub fn per_k_path(base: &Path, k: u32) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "drive".into());
    let name = match base.extension() {
        Some(ext) => format!("{stem}_k{k}.{}", ext.to_string_lossy()),
        None => format!("{stem}_k{k}"),
    };
    base.with_file_name(name)
}

/// Coherence trajectories for the requested cases. The driven case samples
/// `drive` when given, otherwise a profile synthesized on the same grid.
pub fn evolve_runs(cfg: &RunConfig, drive: Option<&DriveProfile>) -> Result<Vec<(&'static str, CoherenceTrajectory)>, CliError> {
    let params = cfg.params()?;
    let grid = cfg.grid()?;
    let rho0 = CoherenceState::physical(cfg.rho_mp).map_err(|e| CliError::Config(e.to_string()))?;
    let integrator = cfg.integrator();
    let mut runs = Vec::new();
    if matches!(cfg.evolve_cases, EvolveCases::Driven | EvolveCases::Both) {
        let owned;
        let profile = match drive {
            Some(p) => p,
            None => {
                owned = drive_profile(cfg, &params)?;
                &owned
            }
        };
        runs.push(("driven", evolve(&params, DriveSource::Sampled(profile), rho0, &grid, &integrator)?));
    }
    if matches!(cfg.evolve_cases, EvolveCases::Free | EvolveCases::Both) {
        runs.push(("free", evolve(&params, DriveSource::Zero, rho0, &grid, &integrator)?));
    }
    Ok(runs)
}

pub fn run_evolve(cfg: &RunConfig, drive_csv: Option<&Path>) -> Result<String, CliError> {
    let drive = match drive_csv {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
            Some(csv::read_drive_csv(&text)?)
        }
        None => None,
    };
    let runs = evolve_runs(cfg, drive.as_ref())?;
    let refs: Vec<(&str, &CoherenceTrajectory)> = runs.iter().map(|(n, t)| (*n, t)).collect();
    Ok(csv::evolve_csv(&refs))
}

/// Sweep summary; cells run in parallel and are emitted in axis order.
pub fn run_sweep(cfg: &RunConfig) -> Result<String, CliError> {
    let cells = cfg.sweep_cells()?;
    let rows: Vec<DriveSummary> = cells
        .par_iter()
        .map(|&(k, m, d)| {
            let params = cfg.params_for(k, m, d)?;
            let profile = drive_profile(cfg, &params)?;
            DriveSummary::from_profile(&params, d, &profile)
        })
        .collect::<Result<_, CliError>>()?;
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    Ok(out)
}

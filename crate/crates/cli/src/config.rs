//! Flat `key = value` run configuration with `#` comments.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use decoherence_core::coherence::{CoherenceState, IntegratorConfig, Representation};
use decoherence_core::drive::{uniform_grid, BranchPolicy, DEFAULT_EPS_BETA};
use decoherence_core::fock::DEFAULT_CUTOFF_MARGIN;
use decoherence_core::model::ModelParams;
use decoherence_core::Complex64;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvolveCases {
    #[default]
    Driven,
    Free,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub omega0: f64,
    pub delta_over_omega0: f64,
    pub k: u32,
    pub m: u32,
    pub g_sq: f64,
    pub d_sq: f64,
    /// `None` means `2π / (200 ω₀)`.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub branch_policy: BranchPolicy,
    pub eps_beta: f64,
    /// `None` means one grid step.
    pub w_min: Option<f64>,
    pub n_max_margin: usize,
    pub out: Option<PathBuf>,
    pub sweep_k: Vec<u32>,
    pub sweep_m: Vec<u32>,
    pub sweep_delta: Vec<f64>,
    pub steps_per_period: usize,
    pub halving_tol: Option<f64>,
    pub representation: Representation,
    pub rho_mp: Complex64,
    pub evolve_cases: EvolveCases,
    pub algebra_tol: f64,
    pub transform_tol: f64,
    pub oracle_tol: f64,
    pub oracle_panels: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            omega0: 1.0e11,
            delta_over_omega0: 0.0,
            k: 1,
            m: 100,
            g_sq: 1.0,
            d_sq: 1.0,
            dt: None,
            t_end: 3.0e-10,
            branch_policy: BranchPolicy::default(),
            eps_beta: DEFAULT_EPS_BETA,
            w_min: None,
            n_max_margin: DEFAULT_CUTOFF_MARGIN,
            out: None,
            sweep_k: Vec::new(),
            sweep_m: Vec::new(),
            sweep_delta: Vec::new(),
            steps_per_period: 200,
            halving_tol: Some(1.0e-8),
            representation: Representation::default(),
            rho_mp: Complex64::new(0.25, 0.1),
            evolve_cases: EvolveCases::default(),
            algebra_tol: 1.0e-12,
            transform_tol: 1.0e-10,
            oracle_tol: 1.0e-6,
            oracle_panels: 512,
        }
    }
}

fn bad(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Config(format!("line {line}: {}", msg.into()))
}

fn num<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| bad(line, format!("cannot parse `{value}` for `{key}`")))
}

fn list<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>, CliError> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| num(line, key, s)).collect()
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut rho_re = cfg.rho_mp.re;
        let mut rho_im = cfg.rho_mp.im;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| bad(line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "omega0" => cfg.omega0 = num(line, key, value)?,
                "delta_over_omega0" => cfg.delta_over_omega0 = num(line, key, value)?,
                "k" => cfg.k = num(line, key, value)?,
                "m" => cfg.m = num(line, key, value)?,
                "g_sq" => cfg.g_sq = num(line, key, value)?,
                "d_sq" => cfg.d_sq = num(line, key, value)?,
                "dt" => cfg.dt = Some(num(line, key, value)?),
                "t_end" => cfg.t_end = num(line, key, value)?,
                "branch_policy" => {
                    cfg.branch_policy = match value {
                        "least" => BranchPolicy::LeastIntensity,
                        "plus" => BranchPolicy::Plus,
                        "minus" => BranchPolicy::Minus,
                        _ => return Err(bad(line, "branch_policy must be least, plus or minus")),
                    }
                }
                "eps_beta" => cfg.eps_beta = num(line, key, value)?,
                "w_min" => cfg.w_min = Some(num(line, key, value)?),
                "n_max_margin" => cfg.n_max_margin = num(line, key, value)?,
                "out" => cfg.out = Some(PathBuf::from(value)),
                "sweep_k" => cfg.sweep_k = list(line, key, value)?,
                "sweep_m" => cfg.sweep_m = list(line, key, value)?,
                "sweep_delta" => cfg.sweep_delta = list(line, key, value)?,
                "steps_per_period" => cfg.steps_per_period = num(line, key, value)?,
                "halving_tol" => cfg.halving_tol = if value == "off" { None } else { Some(num(line, key, value)?) },
                "representation" => {
                    cfg.representation = match value {
                        "constrained" => Representation::ConjugateConstrained,
                        "independent" => Representation::Independent,
                        _ => return Err(bad(line, "representation must be constrained or independent")),
                    }
                }
                "rho_mp_re" => rho_re = num(line, key, value)?,
                "rho_mp_im" => rho_im = num(line, key, value)?,
                "evolve_cases" => {
                    cfg.evolve_cases = match value {
                        "driven" => EvolveCases::Driven,
                        "free" => EvolveCases::Free,
                        "both" => EvolveCases::Both,
                        _ => return Err(bad(line, "evolve_cases must be driven, free or both")),
                    }
                }
                "algebra_tol" => cfg.algebra_tol = num(line, key, value)?,
                "transform_tol" => cfg.transform_tol = num(line, key, value)?,
                "oracle_tol" => cfg.oracle_tol = num(line, key, value)?,
                "oracle_panels" => cfg.oracle_panels = num(line, key, value)?,
                _ => return Err(bad(line, format!("unknown key `{key}`"))),
            }
        }
        cfg.rho_mp = Complex64::new(rho_re, rho_im);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        let dt = self.dt();
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(CliError::Config("dt must be positive".into()));
        }
        if !(self.t_end >= dt && self.t_end.is_finite()) {
            return Err(CliError::Config("t_end must be at least dt".into()));
        }
        if self.eps_beta.is_nan() || self.eps_beta < 0.0 {
            return Err(CliError::Config("eps_beta must be non-negative".into()));
        }
        if self.w_min().is_nan() || self.w_min() < 0.0 {
            return Err(CliError::Config("w_min must be non-negative".into()));
        }
        if self.steps_per_period == 0 {
            return Err(CliError::Config("steps_per_period must be positive".into()));
        }
        if self.oracle_panels == 0 || self.oracle_panels % 2 == 1 {
            return Err(CliError::Config("oracle_panels must be even and positive".into()));
        }
        CoherenceState::physical(self.rho_mp).map_err(|e| CliError::Config(format!("initial coherence: {e}")))?;
        Ok(())
    }

    /// Model parameters for the base cell.
    pub fn params(&self) -> Result<ModelParams, CliError> {
        self.params_for(self.k, self.m, self.delta_over_omega0)
    }

    pub fn params_for(&self, k: u32, m: u32, delta_over_omega0: f64) -> Result<ModelParams, CliError> {
        ModelParams::new(self.omega0, delta_over_omega0 * self.omega0, k, m, self.g_sq, self.d_sq)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or(2.0 * PI / (200.0 * self.omega0))
    }

    pub fn w_min(&self) -> f64 {
        self.w_min.unwrap_or_else(|| self.dt())
    }

    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        uniform_grid(self.dt(), self.t_end).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            steps_per_period: self.steps_per_period,
            halving_tol: self.halving_tol,
            representation: self.representation,
        }
    }

    /// Sweep cells in lexicographic `(k, m, δ/ω₀)` order. Missing axes fall
    /// back to the base value; all axes empty is an error.
    pub fn sweep_cells(&self) -> Result<Vec<(u32, u32, f64)>, CliError> {
        if self.sweep_k.is_empty() && self.sweep_m.is_empty() && self.sweep_delta.is_empty() {
            return Err(CliError::Config("sweep needs at least one of sweep_k, sweep_m, sweep_delta".into()));
        }
        let or = |v: &[u32], d: u32| if v.is_empty() { vec![d] } else { v.to_vec() };
        let mut ks = or(&self.sweep_k, self.k);
        let mut ms = or(&self.sweep_m, self.m);
        let mut ds = if self.sweep_delta.is_empty() { vec![self.delta_over_omega0] } else { self.sweep_delta.clone() };
        ks.sort_unstable();
        ms.sort_unstable();
        ds.sort_by(f64::total_cmp);
        let mut cells = Vec::with_capacity(ks.len() * ms.len() * ds.len());
        for &k in &ks {
            for &m in &ms {
                for &d in &ds {
                    cells.push((k, m, d));
                }
            }
        }
        Ok(cells)
    }
}

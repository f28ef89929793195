//! Built-in verification instances: operator algebra, interaction-picture
//! construction and the brute-force Markoff comparison.

use std::fmt::Write as _;

use rayon::prelude::*;

use decoherence_core::coherence::oracle::{compare_oracle, MarkoffOracle, SpinMatrix};
use decoherence_core::fock::{
    build_interaction_hamiltonian, build_operators, check_susy_relations, interaction_via_transform, Couplings,
    HilbertConfig, SusyRelation, DEFAULT_CUTOFF_MARGIN,
};
use decoherence_core::matrix::OperatorExt;
use decoherence_core::model::ModelParams;
use decoherence_core::Complex64;

use crate::{CliError, RunConfig};

/// Worst residual of one relation over all `(k, m)` instances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationResult {
    pub relation: SusyRelation,
    pub residual: f64,
    pub relative: f64,
    pub worst: (u32, u32),
}

/// Algebra residuals for `k ∈ 1..=3`, `m ∈ 1..=10`, `n_max = m + 2k + 2`.
pub fn algebra_suite() -> Result<Vec<RelationResult>, CliError> {
    let mut out: Vec<RelationResult> = SusyRelation::ALL
        .iter()
        .map(|&relation| RelationResult { relation, residual: 0.0, relative: 0.0, worst: (0, 0) })
        .collect();
    for k in 1..=3u32 {
        for m in 1..=10u32 {
            let cfg = HilbertConfig { n_max: (m + 2 * k) as usize + DEFAULT_CUTOFF_MARGIN };
            let report = check_susy_relations(&build_operators(cfg, k)?);
            for (slot, &(rel, r)) in out.iter_mut().zip(&report.residuals) {
                debug_assert_eq!(slot.relation, rel);
                if r > slot.residual {
                    *slot = RelationResult { relation: rel, residual: r, relative: r / report.scale.max(1.0), worst: (k, m) };
                }
            }
        }
    }
    Ok(out)
}

pub fn transform_params(k: u32) -> ModelParams {
    ModelParams { omega0: 1.0, delta: 0.3, k, m: 3, g_sq: 0.04, d_sq: 0.5 }
}

/// Largest entrywise difference between the direct interaction Hamiltonian
/// and the conjugated lab-frame one, over 100 times in `(0, 10]`, `k ∈ {1, 2}`.
pub fn transform_check() -> Result<f64, CliError> {
    let mut worst = 0.0f64;
    let e = Complex64::new(0.3, -0.2);
    for k in 1..=2 {
        let p = transform_params(k);
        let couplings = Couplings::from_params(&p);
        let ops = build_operators(HilbertConfig::for_model(&p, DEFAULT_CUTOFF_MARGIN), k)?;
        for j in 1..=100 {
            let t = 0.1 * f64::from(j);
            let direct = build_interaction_hamiltonian(t, &p, &couplings, e, &ops);
            let via = interaction_via_transform(t, &p, &couplings, e, &ops);
            worst = worst.max(direct.max_abs_diff(&via));
        }
    }
    Ok(worst)
}

/// `((k, m), max relative deviation)`.
pub type InstanceDeviation = ((u32, u32), f64);

pub const ORACLE_INSTANCES: [(u32, u32); 3] = [(1, 2), (2, 3), (1, 5)];

pub fn oracle_params(k: u32, m: u32) -> ModelParams {
    ModelParams { omega0: 1.0, delta: 0.3, k, m, g_sq: 0.04, d_sq: 0.5 }
}

/// Generic Hermitian spin state used for the comparison.
pub fn oracle_state() -> SpinMatrix {
    [
        [Complex64::new(0.6, 0.0), Complex64::new(0.2, -0.3)],
        [Complex64::new(0.2, 0.3), Complex64::new(0.4, 0.0)],
    ]
}

/// Largest relative deviation between the coefficient model and the
/// double-commutator integral, per instance, at 20 times in `(0, 10]`.
pub fn oracle_check(panels: usize) -> Result<Vec<InstanceDeviation>, CliError> {
    let points: Vec<(f64, Complex64)> = (1..=20).map(|j| (0.5 * f64::from(j), Complex64::new(0.3, 0.0))).collect();
    ORACLE_INSTANCES
        .par_iter()
        .map(|&(k, m)| {
            let p = oracle_params(k, m);
            let oracle =
                MarkoffOracle::new(&p, Couplings::from_params(&p), HilbertConfig::for_model(&p, DEFAULT_CUTOFF_MARGIN))?;
            let rows = compare_oracle(&oracle, &points, &oracle_state(), panels)?;
            Ok(((k, m), rows.iter().map(|r| r.relative_error).fold(0.0, f64::max)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub algebra: Vec<RelationResult>,
    pub transform: f64,
    pub oracle: Vec<InstanceDeviation>,
    pub algebra_ok: bool,
    pub transform_ok: bool,
    pub oracle_ok: bool,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.algebra_ok && self.transform_ok && self.oracle_ok
    }

    pub fn render(&self) -> String {
        let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };
        let mut s = String::new();
        let _ = writeln!(s, "algebra relations (k=1..3, m=1..10): {}", verdict(self.algebra_ok));
        for r in &self.algebra {
            let _ = write!(s, "  {:<20} {:.3e}", r.relation.name(), r.residual);
            if r.residual > 0.0 {
                let _ = write!(s, "  (relative {:.3e}, worst at k={} m={})", r.relative, r.worst.0, r.worst.1);
            }
            s.push('\n');
        }
        let _ = writeln!(s, "interaction picture (k=1,2, 100 times): {:.3e} {}", self.transform, verdict(self.transform_ok));
        let _ = writeln!(s, "markoff oracle: {}", verdict(self.oracle_ok));
        for ((k, m), dev) in &self.oracle {
            let _ = writeln!(s, "  k={k} m={m}: max relative deviation {dev:.3e}");
        }
        let _ = writeln!(s, "overall: {}", verdict(self.passed()));
        s
    }
}

pub fn run_checks(cfg: &RunConfig) -> Result<VerifyReport, CliError> {
    let algebra = algebra_suite()?;
    let transform = transform_check()?;
    let oracle = oracle_check(cfg.oracle_panels)?;
    Ok(VerifyReport {
        algebra_ok: algebra.iter().all(|r| r.residual < cfg.algebra_tol),
        transform_ok: transform < cfg.transform_tol,
        oracle_ok: oracle.iter().all(|&(_, d)| d <= cfg.oracle_tol),
        algebra,
        transform,
        oracle,
    })
}

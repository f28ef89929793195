//! Brute-force Markoff right-hand side.
//!
//! Builds `H_I(t)` and `H_I(t′)` as explicit matrices on the truncated space,
//! forms `[H_I(t), [H_I(t′), ρ_s ⊗ |m⟩⟨m|]]`, traces out the oscillator and
//! integrates `t′` over `[0, t]` with composite Simpson. Nothing from
//! [`crate::coefficients`] is used on this path.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::coefficients::CoefficientSample;
use crate::fock::{build_interaction_hamiltonian, build_operators, Couplings, HilbertConfig, OperatorSet};
use crate::matrix::{self, CMatrix};
use crate::model::{derived_rates, ModelParams, RateSet};
use crate::{Error, Result};

/// Spin density matrix indexed `[s][s′]` with 0 = upper, 1 = lower.
pub type SpinMatrix = [[Complex64; 2]; 2];

/// Absolute floor in the relative-error denominator.
pub const RELATIVE_FLOOR: f64 = 1.0e-30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOutput {
    /// Full `ρ̇₋₊` from the double commutator.
    pub total: Complex64,
    /// Part multiplying `e^{−iω₀(t+t′)}` (the rapidly rotating drive term).
    pub fast_term: Complex64,
}

impl OracleOutput {
    /// `total − fast_term`, the part the coefficient model describes.
    pub fn retained(&self) -> Complex64 {
        self.total - self.fast_term
    }
}

#[derive(Debug, Clone)]
pub struct MarkoffOracle {
    params: ModelParams,
    rates: RateSet,
    couplings: Couplings,
    ops: OperatorSet,
}

fn simpson<F: FnMut(f64) -> Complex64>(t: f64, panels: usize, mut f: F) -> Complex64 {
    let h = t / panels as f64;
    let mut acc = f(0.0) + f(t);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(h * i as f64) * w;
    }
    acc * (h / 3.0)
}

impl MarkoffOracle {
    pub fn new(params: &ModelParams, couplings: Couplings, config: HilbertConfig) -> Result<Self> {
        config.validate_for(params)?;
        Ok(Self {
            params: *params,
            rates: derived_rates(params)?,
            couplings,
            ops: build_operators(config, params.k)?,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    fn reservoir_state(&self, rho_s: &SpinMatrix) -> CMatrix {
        let cfg = self.ops.config;
        let mut r = matrix::zeros(cfg.dim());
        let m = self.params.m as usize;
        for (s, row) in rho_s.iter().enumerate() {
            for (sp, &v) in row.iter().enumerate() {
                r[(cfg.index(s == 0, m), cfg.index(sp == 0, m))] = v;
            }
        }
        r
    }

    fn lower_upper_trace(&self, x: &CMatrix) -> Complex64 {
        let cfg = self.ops.config;
        (0..cfg.fock_dim()).map(|n| x[(cfg.index(false, n), cfg.index(true, n))]).sum()
    }

    /// `ρ̇₋₊(t) = −∫₀ᵗ Tr_r ⟨−|[H_I(t), [H_I(t′), ρ_s ⊗ |m⟩⟨m|]]|+⟩ dt′`.
    /// `panels` must be even and positive.
    pub fn evaluate(&self, t: f64, rho_s: &SpinMatrix, e_field: Complex64, panels: usize) -> Result<OracleOutput> {
        if panels == 0 || panels % 2 == 1 {
            return Err(Error::InvalidParameter("Simpson panel count must be even and positive"));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidParameter("time must be non-negative and finite"));
        }
        let r = self.reservoir_state(rho_s);
        let h_t = build_interaction_hamiltonian(t, &self.params, &self.couplings, e_field, &self.ops);
        let integral = simpson(t, panels, |tp| {
            let h_tp = build_interaction_hamiltonian(tp, &self.params, &self.couplings, e_field, &self.ops);
            let inner = matrix::commutator(&h_tp, &r);
            self.lower_upper_trace(&matrix::commutator(&h_t, &inner))
        });

        let w0 = self.params.omega0;
        let amp = self.couplings.d.conj() * e_field.conj();
        let fast = simpson(t, panels, |tp| Complex64::cis(-w0 * (t + tp)));
        let fast_term = amp * amp * 0.5 * rho_s[0][1] * fast;
        Ok(OracleOutput { total: -integral, fast_term })
    }

    /// Oracle values of `(c₁, −c₂)`: the retained right-hand side for
    /// `ρ = |−⟩⟨+|` and for `ρ = |+⟩⟨−|`.
    pub fn extract_coefficients(&self, t: f64, e_field: Complex64, panels: usize) -> Result<(Complex64, Complex64)> {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let mp = self.evaluate(t, &[[zero, zero], [one, zero]], e_field, panels)?;
        let pm = self.evaluate(t, &[[zero, one], [zero, zero]], e_field, panels)?;
        Ok((mp.retained(), pm.retained()))
    }

    /// Coefficient-model right-hand side at the drive intensity `|E|²`.
    pub fn analytic(&self, t: f64, rho_s: &SpinMatrix, e_field: Complex64) -> Complex64 {
        let sample = CoefficientSample::evaluate(&self.params, &self.rates, t, e_field.norm_sqr());
        sample.rhs(rho_s[1][0], rho_s[0][1])
    }
}

/// One oracle/model comparison point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    pub t: f64,
    pub oracle: OracleOutput,
    pub analytic: Complex64,
    pub relative_error: f64,
}

/// Evaluates both routes at every `(t, E)` pair.
pub fn compare_oracle(
    oracle: &MarkoffOracle,
    points: &[(f64, Complex64)],
    rho_s: &SpinMatrix,
    panels: usize,
) -> Result<Vec<OracleComparison>> {
    points
        .iter()
        .map(|&(t, e)| {
            let out = oracle.evaluate(t, rho_s, e, panels)?;
            let analytic = oracle.analytic(t, rho_s, e);
            let relative_error = (out.retained() - analytic).norm() / (analytic.norm() + RELATIVE_FLOOR);
            Ok(OracleComparison { t, oracle: out, analytic, relative_error })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{alpha_beta, phase_integral};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn oracle(delta: f64, k: u32, m: u32) -> MarkoffOracle {
        let p = ModelParams::new(1.0, delta, k, m, 0.04, 0.5).unwrap();
        MarkoffOracle::new(&p, Couplings::from_params(&p), HilbertConfig::for_model(&p, 1)).unwrap()
    }

    #[test]
    fn rejects_small_cutoff_and_odd_panels() {
        let p = ModelParams::new(1.0, 0.0, 2, 3, 0.04, 0.5).unwrap();
        let err = MarkoffOracle::new(&p, Couplings::from_params(&p), HilbertConfig { n_max: 5 }).unwrap_err();
        assert_eq!(err, Error::CutoffTooSmall { n_max: 5, required: 7 });
        let o = oracle(0.1, 1, 2);
        let rho = [[c(0.5, 0.0), c(0.1, 0.0)], [c(0.1, 0.0), c(0.5, 0.0)]];
        assert!(o.evaluate(1.0, &rho, c(0.0, 0.0), 7).is_err());
    }

    #[test]
    fn zero_time_gives_zero() {
        let o = oracle(0.3, 1, 2);
        let rho = [[c(0.6, 0.0), c(0.2, -0.3)], [c(0.2, 0.3), c(0.4, 0.0)]];
        let out = o.evaluate(0.0, &rho, c(0.4, 0.1), 2).unwrap();
        assert_eq!(out.total, c(0.0, 0.0));
    }

    #[test]
    fn noise_coefficient_of_rho_mp_is_alpha() {
        for &(delta, k, m) in &[(0.3, 1, 2), (0.0, 2, 3), (-0.7, 3, 4)] {
            let o = oracle(delta, k, m);
            let t = 1.7;
            let (c_mp, _) = o.extract_coefficients(t, c(0.0, 0.0), 400).unwrap();
            let (alpha, _) = alpha_beta(o.params(), &o.rates, t);
            assert!((c_mp - alpha).norm() <= 1e-9 * alpha.norm(), "k = {k}: {c_mp} vs {alpha}");
        }
    }

    #[test]
    fn drive_contribution_is_half_dipole_intensity_times_phase_integral() {
        let o = oracle(0.3, 1, 2);
        let (t, e) = (2.3, c(0.3, -0.2));
        let (with_e, _) = o.extract_coefficients(t, e, 400).unwrap();
        let (without, _) = o.extract_coefficients(t, c(0.0, 0.0), 400).unwrap();
        let expected = -phase_integral(o.params().omega0, t) * (0.5 * o.params().d_sq * e.norm_sqr());
        assert!((with_e - without - expected).norm() <= 1e-9 * expected.norm());
    }

    #[test]
    fn noise_does_not_couple_rho_pm_into_rho_mp() {
        let o = oracle(0.3, 2, 3);
        let (_, c_pm) = o.extract_coefficients(1.3, c(0.0, 0.0), 200).unwrap();
        assert_eq!(c_pm, c(0.0, 0.0));
    }

    #[test]
    fn fast_term_only_with_field() {
        let o = oracle(0.2, 1, 2);
        let rho = [[c(0.6, 0.0), c(0.2, -0.3)], [c(0.2, 0.3), c(0.4, 0.0)]];
        let out = o.evaluate(1.1, &rho, c(0.0, 0.0), 100).unwrap();
        assert_eq!(out.fast_term, c(0.0, 0.0));
        let out = o.evaluate(1.1, &rho, c(0.5, 0.0), 100).unwrap();
        assert!(out.fast_term.norm() > 0.0);
    }

    #[test]
    fn comparison_reports_each_point() {
        let o = oracle(0.2, 1, 2);
        let rho = [[c(0.6, 0.0), c(0.2, -0.3)], [c(0.2, 0.3), c(0.4, 0.0)]];
        let pts = [(0.5, c(0.1, 0.0)), (1.0, c(0.2, 0.1))];
        let rows = compare_oracle(&o, &pts, &rho, 100).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.relative_error.is_finite()));
    }
}

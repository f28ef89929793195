//! Finite-window Markoff coefficients of the off-diagonal density-matrix
//! equations
//!
//! ```text
//! ρ̇₋₊ = c₁ ρ₋₊ − c₂ ρ₊₋,     c₁ = α + β x,     x = E*E
//! ```
//!
//! All detuning dependence goes through the phase integral
//! `∫₀ᵗ e^{iδ(t'−t)} dt' = (1 − e^{−iδt})/(iδ)`, which is evaluated in a form
//! that stays exact as δ → 0.

use num_complex::Complex64;
// Float supplies the math methods when std is absent from the build.
#[allow(unused_imports)]
use num_traits::Float;

use crate::model::{ModelParams, RateSet};

/// Below this `|z|`, `sin z / z` switches to its Taylor series.
pub const SINC_SERIES_THRESHOLD: f64 = 1.0e-4;

/// `sin z / z`, with `sinc 0 = 1`.
pub fn sinc(z: f64) -> f64 {
    if z.abs() < SINC_SERIES_THRESHOLD {
        let z2 = z * z;
        1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0))
    } else {
        z.sin() / z
    }
}

/// `(1 − e^{−iδt})/(iδ) = t e^{−iδt/2} sinc(δt/2)`; equals `t` at δ = 0.
pub fn phase_integral(delta: f64, t: f64) -> Complex64 {
    let half = 0.5 * delta * t;
    Complex64::cis(-half) * (t * sinc(half))
}

/// `α(t) = −g_sum · (1 − e^{−iδt})/(iδ)` and `β(t) = κ sin ω₀t`.
pub fn alpha_beta(params: &ModelParams, rates: &RateSet, t: f64) -> (Complex64, f64) {
    let alpha = -phase_integral(params.delta, t) * rates.g_sum;
    let beta = rates.kappa * (params.omega0 * t).sin();
    (alpha, beta)
}

/// `c₂(t) = −g_plus · [P + P*]` with `P` the phase integral. Real by
/// construction.
pub fn coefficient_c2(params: &ModelParams, rates: &RateSet, t: f64) -> f64 {
    -rates.g_plus * (2.0 * phase_integral(params.delta, t).re)
}

pub fn coefficient_c1(alpha: Complex64, beta: f64, x: f64) -> Complex64 {
    alpha + beta * x
}

/// `α + α*` (real) and `α − α*` (purely imaginary, stored as its imaginary
/// part).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaParts {
    pub sum: f64,
    pub diff_im: f64,
}

impl AlphaParts {
    pub fn diff(&self) -> Complex64 {
        Complex64::new(0.0, self.diff_im)
    }
}

/// `α + α* = −g_sum · 2 sin(δt)/δ` and `α − α* = −g_sum · 2(1 − cos δt)/(iδ)`,
/// through `sin(δt)/δ = t sinc(δt)` and `(1 − cos δt)/δ = t sin(δt/2) sinc(δt/2)`.
pub fn alpha_sum_diff(params: &ModelParams, rates: &RateSet, t: f64) -> AlphaParts {
    let dt = params.delta * t;
    let half = 0.5 * dt;
    let sum = -2.0 * rates.g_sum * t * sinc(dt);
    // 1/i = −i, so −g_sum · 2v/(iδ) = +i · 2 g_sum v/δ.
    let diff_im = 2.0 * rates.g_sum * t * half.sin() * sinc(half);
    AlphaParts { sum, diff_im }
}

/// Every coefficient at one time for a given drive intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSample {
    pub t: f64,
    pub alpha: Complex64,
    pub beta: f64,
    pub c1: Complex64,
    pub c2: f64,
    /// `|c₁|² − c₂²`
    pub det: f64,
}

impl CoefficientSample {
    pub fn evaluate(params: &ModelParams, rates: &RateSet, t: f64, x: f64) -> Self {
        let (alpha, beta) = alpha_beta(params, rates, t);
        let c1 = coefficient_c1(alpha, beta, x);
        let c2 = coefficient_c2(params, rates, t);
        Self { t, alpha, beta, c1, c2, det: (c1 * c1.conj()).re - c2 * c2 }
    }

    /// `|c₁|² + c₂²`, the natural scale for the determinant.
    pub fn det_scale(&self) -> f64 {
        self.c1.norm_sqr() + self.c2 * self.c2
    }

    /// Right-hand side `c₁ ρ₋₊ − c₂ ρ₊₋`.
    pub fn rhs(&self, rho_mp: Complex64, rho_pm: Complex64) -> Complex64 {
        self.c1 * rho_mp - rho_pm * self.c2
    }
}

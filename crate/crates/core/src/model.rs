//! Model parameters and the Fock-state factor ratios shared by every other
//! module.
//!
//! Units: time in seconds, frequencies in rad/s. The drive intensity
//! `x = E*E` is expressed in units where `|d|² · x` has dimension rad²/s².

use crate::{Error, Result};

/// Physical constants of the two-state system, noise mode and drive coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Two-state transition frequency ω₀ (rad/s).
    pub omega0: f64,
    /// Detuning δ between the k-photon energy and the transition (rad/s).
    pub delta: f64,
    /// Photons created or annihilated per transition.
    pub k: u32,
    /// Occupation of the reservoir Fock state |m⟩.
    pub m: u32,
    /// Squared noise coupling |g|² (rad²/s²).
    pub g_sq: f64,
    /// Squared transition dipole |d|².
    pub d_sq: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { omega0: 1.0e11, delta: 0.0, k: 1, m: 100, g_sq: 1.0, d_sq: 1.0 }
    }
}

impl ModelParams {
    pub fn new(omega0: f64, delta: f64, k: u32, m: u32, g_sq: f64, d_sq: f64) -> Result<Self> {
        let params = Self { omega0, delta, k, m, g_sq, d_sq };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::InvalidParameter("omega0 must be positive and finite"));
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidParameter("delta must be finite"));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("photon multiplicity k must be at least 1"));
        }
        if self.m < self.k {
            return Err(Error::OccupationBelowMultiplicity { m: self.m, k: self.k });
        }
        if !(self.g_sq.is_finite() && self.g_sq >= 0.0) {
            return Err(Error::InvalidParameter("g_sq must be non-negative and finite"));
        }
        if !(self.d_sq.is_finite() && self.d_sq > 0.0) {
            return Err(Error::InvalidParameter("d_sq must be positive and finite"));
        }
        Ok(())
    }

    /// Noise-mode frequency ω for which the interaction-picture phases
    /// `e^{∓iδt}` on `Q`, `Q†` follow from the free evolution.
    ///
    /// Conjugating `(a†)^k σ₋` with the free evolution yields `e^{i(kω − ω₀)t}`,
    /// so the detuning carried by the interaction Hamiltonian is `ω₀ − kω`.
    pub fn mode_frequency(&self) -> f64 {
        (self.omega0 - self.delta) / f64::from(self.k)
    }
}

/// Rate prefactors that appear in the Markoff coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    /// `(m+k)!/m!`
    pub r_plus: f64,
    /// `m!/(m−k)!`
    pub r_minus: f64,
    /// `|g|² · r_plus`
    pub g_plus: f64,
    /// `|g|² · (r_plus + r_minus)`
    pub g_sum: f64,
    /// `|d|² / (2ω₀)`
    pub kappa: f64,
}

/// `(m+k)!/m! = ∏_{j=1..k} (m+j)`, accumulated as a floating product.
pub fn rising_ratio(m: u32, k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * (f64::from(m) + f64::from(j)))
}

/// `m!/(m−k)! = ∏_{j=0..k−1} (m−j)`; requires `m ≥ k`.
///
/// Factors are accumulated in ascending order, the same order as
/// [`rising_ratio`], so `falling_ratio(m + k, k) == rising_ratio(m, k)` bitwise.
pub fn falling_ratio(m: u32, k: u32) -> Result<f64> {
    if m < k {
        return Err(Error::OccupationBelowMultiplicity { m, k });
    }
    Ok(rising_ratio(m - k, k))
}

pub fn derived_rates(params: &ModelParams) -> Result<RateSet> {
    params.validate()?;
    let r_plus = rising_ratio(params.m, params.k);
    let r_minus = falling_ratio(params.m, params.k)?;
    Ok(RateSet {
        r_plus,
        r_minus,
        g_plus: params.g_sq * r_plus,
        g_sum: params.g_sq * (r_plus + r_minus),
        kappa: params.d_sq / (2.0 * params.omega0),
    })
}

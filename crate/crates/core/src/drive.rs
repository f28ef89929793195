//! Drive-field synthesis.
//!
//! The coherence generator becomes singular when `|c₁|² = c₂²`. With
//! `c₁ = α + βx` this is a quadratic in the drive intensity `x = E*E`,
//!
//! ```text
//! x² + ((α+α*)/β) x + (α*α − c₂²)/β² = 0,
//! x± = [−(α+α*)/β ± √((α−α*)² + 4c₂²)/|β|] / 2.
//! ```
//!
//! Points where no nonnegative real root exists, or where `β` vanishes, are
//! gated (`E = 0`). A feasible window `[0, T)` can be repeated periodically.

use alloc::vec::Vec;

// Float supplies the math methods when std is absent from the build.
#[allow(unused_imports)]
use num_traits::Float;

use crate::coefficients::{alpha_beta, alpha_sum_diff, coefficient_c2, CoefficientSample};
use crate::model::{derived_rates, ModelParams, RateSet};
use crate::{Error, Result};

/// Default degeneracy threshold on `|β|`, relative to `κ = |d|²/(2ω₀)`.
pub const DEFAULT_EPS_BETA: f64 = 1.0e-6;

/// Relative tolerance below which a negative radicand is treated as zero.
const RADICAND_TOL: f64 = 1.0e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    /// Two real roots.
    Real,
    /// Negative radicand: no real intensity satisfies the condition.
    Complex,
    /// `|β|` below threshold: the quadratic degenerates.
    DegenerateBeta,
}

/// The two candidate intensities at one time. Roots are `None` unless
/// `kind == RootKind::Real`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootPair {
    pub t: f64,
    pub x_plus: Option<f64>,
    pub x_minus: Option<f64>,
    pub kind: RootKind,
}

impl RootPair {
    pub fn degenerate_beta(&self) -> bool {
        self.kind == RootKind::DegenerateBeta
    }

    fn undefined(t: f64, kind: RootKind) -> Self {
        Self { t, x_plus: None, x_minus: None, kind }
    }
}

pub fn drive_roots(params: &ModelParams, rates: &RateSet, t: f64, eps_beta: f64) -> RootPair {
    let (_, beta) = alpha_beta(params, rates, t);
    if beta.abs() < eps_beta * rates.kappa || beta == 0.0 {
        return RootPair::undefined(t, RootKind::DegenerateBeta);
    }
    let parts = alpha_sum_diff(params, rates, t);
    let c2 = coefficient_c2(params, rates, t);

    // (α−α*)² = −|α−α*|², so the radicand is 4c₂² − |α−α*|², factored to keep
    // its sign accurate near the feasibility edge.
    let two_c2 = 2.0 * c2.abs();
    let diff = parts.diff_im.abs();
    let radicand = (two_c2 - diff) * (two_c2 + diff);
    if radicand < -RADICAND_TOL * (two_c2 * two_c2 + diff * diff) {
        return RootPair::undefined(t, RootKind::Complex);
    }
    let root = radicand.max(0.0).sqrt();
    let centre = -parts.sum / beta;
    let half_width = root / beta.abs();
    RootPair {
        t,
        x_plus: Some(0.5 * (centre + half_width)),
        x_minus: Some(0.5 * (centre - half_width)),
        kind: RootKind::Real,
    }
}

/// Relative residual of `x` in `x² + ((α+α*)/β) x + (α*α − c₂²)/β²`.
pub fn quadratic_residual(params: &ModelParams, rates: &RateSet, t: f64, x: f64) -> f64 {
    let (alpha, beta) = alpha_beta(params, rates, t);
    let c2 = coefficient_c2(params, rates, t);
    let linear = (2.0 * alpha.re / beta) * x;
    let constant = (alpha.norm_sqr() - c2 * c2) / (beta * beta);
    let quad = x * x;
    let scale = quad + linear.abs() + constant.abs();
    if scale == 0.0 {
        return 0.0;
    }
    (quad + linear + constant).abs() / scale
}

/// Which root to apply when more than one is nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchPolicy {
    /// Smallest nonnegative root (least drive power).
    #[default]
    LeastIntensity,
    /// Always `x₊`; gated when negative.
    Plus,
    /// Always `x₋`; gated when negative.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
    /// Gated point.
    None,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
            Branch::None => "none",
        }
    }
}

/// Applies the branch policy to one root pair, returning the intensity and
/// branch, or `None` when the point must be gated.
pub fn select_root(roots: &RootPair, policy: BranchPolicy) -> Option<(f64, Branch)> {
    let (plus, minus) = match (roots.kind, roots.x_plus, roots.x_minus) {
        (RootKind::Real, Some(p), Some(m)) => (p, m),
        _ => return None,
    };
    let feasible = |x: f64| x >= 0.0 && x.is_finite();
    let chosen = match policy {
        BranchPolicy::LeastIntensity => {
            if feasible(minus) {
                Some((minus, Branch::Minus))
            } else if feasible(plus) {
                Some((plus, Branch::Plus))
            } else {
                None
            }
        }
        BranchPolicy::Plus => feasible(plus).then_some((plus, Branch::Plus)),
        BranchPolicy::Minus => feasible(minus).then_some((minus, Branch::Minus)),
    };
    // +0.0 turns a negative zero into a positive one.
    chosen.map(|(x, b)| (x + 0.0, b))
}

/// Drive intensity from the closed-form roots at an arbitrary time; zero
/// where gated.
pub fn synthesized_intensity(params: &ModelParams, rates: &RateSet, t: f64, policy: BranchPolicy, eps_beta: f64) -> f64 {
    select_root(&drive_roots(params, rates, t, eps_beta), policy).map_or(0.0, |(x, _)| x)
}

/// Sampled drive on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveProfile {
    pub grid: Vec<f64>,
    pub roots: Vec<RootPair>,
    pub x_chosen: Vec<f64>,
    /// Real field amplitude `√x_chosen`.
    pub e_amplitude: Vec<f64>,
    pub gated: Vec<bool>,
    pub branch: Vec<Branch>,
    pub period_t: Option<f64>,
}

impl DriveProfile {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Fills in `period_t` from [`detect_period`].
    pub fn with_period(mut self, w_min: f64) -> Self {
        self.period_t = detect_period(&self, w_min);
        self
    }

    /// Intensity at `t` by linear interpolation between grid samples.
    /// Returns `None` outside the grid.
    pub fn intensity_at(&self, t: f64) -> Option<f64> {
        let (first, last) = (*self.grid.first()?, *self.grid.last()?);
        if !(t >= first && t <= last) {
            return None;
        }
        let idx = self.grid.partition_point(|&g| g <= t);
        if idx == 0 {
            return Some(self.x_chosen[0]);
        }
        let lo = idx - 1;
        if lo + 1 >= self.grid.len() || self.grid[lo] == t {
            return Some(self.x_chosen[lo]);
        }
        let (t0, t1) = (self.grid[lo], self.grid[lo + 1]);
        let w = (t - t0) / (t1 - t0);
        Some(self.x_chosen[lo] + w * (self.x_chosen[lo + 1] - self.x_chosen[lo]))
    }

    /// Coefficients recomputed from the chosen intensity at every grid point.
    pub fn coefficient_samples(&self, params: &ModelParams) -> Result<Vec<CoefficientSample>> {
        let rates = derived_rates(params)?;
        Ok(self.grid.iter().zip(&self.x_chosen).map(|(&t, &x)| CoefficientSample::evaluate(params, &rates, t, x)).collect())
    }

    pub fn gated_fraction(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.gated.iter().filter(|&&g| g).count() as f64 / self.len() as f64
    }

    pub fn peak_intensity(&self) -> f64 {
        self.x_chosen.iter().copied().fold(0.0, f64::max)
    }
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    match grid.first() {
        None => Err(Error::EmptyGrid),
        Some(&t0) if t0 != 0.0 => Err(Error::MalformedGrid),
        Some(_) if grid.windows(2).any(|w| !w[1].is_finite() || w[1] <= w[0]) => Err(Error::MalformedGrid),
        Some(_) => Ok(()),
    }
}

/// Uniform grid `t_j = j·dt` for `j·dt ≤ t_end`.
pub fn uniform_grid(dt: f64, t_end: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite() && t_end.is_finite() && t_end >= dt) {
        return Err(Error::InvalidParameter("grid needs dt > 0 and t_end >= dt"));
    }
    // Slack keeps t_end itself on the grid despite rounding in t_end / dt.
    let n = (t_end / dt * (1.0 + 1e-12)).floor() as usize;
    Ok((0..=n).map(|j| j as f64 * dt).collect())
}

pub fn synthesize_profile(params: &ModelParams, grid: &[f64], policy: BranchPolicy, eps_beta: f64) -> Result<DriveProfile> {
    validate_grid(grid)?;
    let rates = derived_rates(params)?;
    let n = grid.len();
    let mut profile = DriveProfile {
        grid: grid.to_vec(),
        roots: Vec::with_capacity(n),
        x_chosen: Vec::with_capacity(n),
        e_amplitude: Vec::with_capacity(n),
        gated: Vec::with_capacity(n),
        branch: Vec::with_capacity(n),
        period_t: None,
    };
    for &t in grid {
        let roots = drive_roots(params, &rates, t, eps_beta);
        let (x, branch) = select_root(&roots, policy).unwrap_or((0.0, Branch::None));
        profile.roots.push(roots);
        profile.x_chosen.push(x);
        profile.e_amplitude.push(x.sqrt());
        profile.gated.push(branch == Branch::None);
        profile.branch.push(branch);
    }
    Ok(profile)
}

/// Start of the first run of consecutive gated points spanning at least
/// `w_min` (last gated time minus first gated time).
pub fn detect_period(profile: &DriveProfile, w_min: f64) -> Option<f64> {
    let mut start: Option<usize> = None;
    for i in 0..profile.len() {
        if profile.gated[i] {
            let s = *start.get_or_insert(i);
            if profile.grid[i] - profile.grid[s] >= w_min {
                return Some(profile.grid[s]);
            }
        } else {
            start = None;
        }
    }
    None
}

/// Repeats the window `[0, T)` so that `E(nT + t) = E(t)` on the grid, up to
/// `horizon`. Samples are copied, never recomputed.
pub fn cyclic_extend(profile: &DriveProfile, horizon: f64) -> Result<DriveProfile> {
    let period = profile.period_t.ok_or(Error::MissingPeriod)?;
    let restricted = |limit: f64| {
        let n = profile.grid.partition_point(|&t| t <= limit);
        DriveProfile {
            grid: profile.grid[..n].to_vec(),
            roots: profile.roots[..n].to_vec(),
            x_chosen: profile.x_chosen[..n].to_vec(),
            e_amplitude: profile.e_amplitude[..n].to_vec(),
            gated: profile.gated[..n].to_vec(),
            branch: profile.branch[..n].to_vec(),
            period_t: profile.period_t,
        }
    };
    if horizon <= period {
        return Ok(restricted(horizon));
    }
    let base = profile.grid.partition_point(|&t| t < period);
    if base == 0 {
        return Err(Error::InvalidParameter("period must be positive"));
    }
    let mut out = restricted(-1.0);
    'cycles: for n in 0.. {
        let offset = period * n as f64;
        for i in 0..base {
            let t = offset + profile.grid[i];
            if t > horizon {
                break 'cycles;
            }
            out.grid.push(t);
            out.roots.push(RootPair { t, ..profile.roots[i] });
            out.x_chosen.push(profile.x_chosen[i]);
            out.e_amplitude.push(profile.e_amplitude[i]);
            out.gated.push(profile.gated[i]);
            out.branch.push(profile.branch[i]);
        }
    }
    Ok(out)
}

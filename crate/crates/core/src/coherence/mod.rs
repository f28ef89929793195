//! Time evolution of the off-diagonal density-matrix elements
//!
//! ```text
//! ρ̇₋₊ = c₁ ρ₋₊ − c₂ ρ₊₋
//! ρ̇₊₋ = c₁* ρ₊₋ − c₂ ρ₋₊
//! ```
//!
//! integrated with classical fourth-order Runge–Kutta and a step-halving
//! check. [`oracle`] holds the brute-force double-commutator evaluation used to
//! validate the coefficients.

pub mod oracle;

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
// Float supplies the math methods when std is absent from the build.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::coefficients::CoefficientSample;
use crate::drive::{synthesized_intensity, validate_grid, BranchPolicy, DriveProfile};
use crate::model::{derived_rates, ModelParams, RateSet};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Representation {
    /// `ρ₋₊` and `ρ₊₋` integrated as two independent components.
    Independent,
    /// Only `ρ₋₊` is integrated; `ρ₊₋ = conj(ρ₋₊)` holds exactly.
    #[default]
    ConjugateConstrained,
}

/// Off-diagonal pair `(ρ₋₊, ρ₊₋)` with `ρ₋₊ = ⟨−|ρ|+⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceState {
    pub rho_mp: Complex64,
    pub rho_pm: Complex64,
}

impl CoherenceState {
    /// Hermitian pair `(ρ₋₊, conj ρ₋₊)`; rejects `|ρ₋₊| > 1/2`.
    pub fn physical(rho_mp: Complex64) -> Result<Self> {
        let state = Self { rho_mp, rho_pm: rho_mp.conj() };
        state.check_physical()?;
        Ok(state)
    }

    pub fn check_physical(&self) -> Result<()> {
        let ok = |z: Complex64| z.is_finite() && z.norm() <= 0.5;
        if ok(self.rho_mp) && ok(self.rho_pm) {
            Ok(())
        } else {
            Err(Error::InvalidParameter("coherence magnitude must not exceed 1/2"))
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { rho_mp: self.rho_mp * factor, rho_pm: self.rho_pm * factor }
    }

    fn norm(&self) -> f64 {
        (self.rho_mp.norm_sqr() + self.rho_pm.norm_sqr()).sqrt()
    }

    fn is_finite(&self) -> bool {
        self.rho_mp.is_finite() && self.rho_pm.is_finite()
    }
}

/// `M = [[c₁, −c₂], [−c₂, c₁*]]` acting on `(ρ₋₊, ρ₊₋)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Generator {
    pub entries: [[Complex64; 2]; 2],
}

pub fn generator_matrix(c1: Complex64, c2: f64) -> Generator {
    let off = Complex64::new(-c2, 0.0);
    Generator { entries: [[c1, off], [off, c1.conj()]] }
}

/// Oblique components of a state along the generator's eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeComponents {
    /// Eigenvalue of smallest modulus (zero when the generator is singular).
    pub null_eigenvalue: Complex64,
    pub other_eigenvalue: Complex64,
    /// Coefficient along the unit right eigenvector of `null_eigenvalue`.
    pub null: Complex64,
    pub other: Complex64,
}

impl Generator {
    pub fn det(&self) -> Complex64 {
        let m = &self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.entries;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Eigenvalues ordered `(smallest modulus, largest modulus)`.
    pub fn eigenvalues(&self) -> (Complex64, Complex64) {
        let tr = self.trace();
        let det = self.det();
        let s = (tr * tr - det * 4.0).sqrt();
        let (a, b) = (tr + s, tr - s);
        let big = if a.norm() >= b.norm() { a * 0.5 } else { b * 0.5 };
        let small = if big.is_zero() { Complex64::zero() } else { det / big };
        (small, big)
    }

    /// Unit right eigenvector for `lambda`, first nonzero component real and
    /// positive.
    pub fn eigenvector(&self, lambda: Complex64) -> [Complex64; 2] {
        let m = &self.entries;
        let v = if !m[0][1].is_zero() {
            [m[0][1], lambda - m[0][0]]
        } else if !m[1][0].is_zero() {
            [lambda - m[1][1], m[1][0]]
        } else if (lambda - m[0][0]).norm() <= (lambda - m[1][1]).norm() {
            [Complex64::new(1.0, 0.0), Complex64::zero()]
        } else {
            [Complex64::zero(), Complex64::new(1.0, 0.0)]
        };
        normalize(v)
    }

    /// Decomposes `v = a·r_null + b·r_other` using left eigenvectors. `M` is
    /// complex symmetric, so the left eigenvector is the transposed right one.
    /// Falls back to orthogonal projections when the eigenbasis is defective.
    pub fn mode_components(&self, v: [Complex64; 2]) -> ModeComponents {
        let (null_eigenvalue, other_eigenvalue) = self.eigenvalues();
        let r0 = self.eigenvector(null_eigenvalue);
        let r1 = self.eigenvector(other_eigenvalue);
        let bilinear = |a: [Complex64; 2], b: [Complex64; 2]| a[0] * b[0] + a[1] * b[1];
        let (d0, d1) = (bilinear(r0, r0), bilinear(r1, r1));
        let independent = (r0[0] * r1[1] - r0[1] * r1[0]).norm() > 1e-12;
        let (null, other) = if independent && d0.norm() > 1e-12 && d1.norm() > 1e-12 {
            (bilinear(r0, v) / d0, bilinear(r1, v) / d1)
        } else {
            let ortho = [-r0[1].conj(), r0[0].conj()];
            let inner = |a: [Complex64; 2], b: [Complex64; 2]| a[0].conj() * b[0] + a[1].conj() * b[1];
            (inner(r0, v), inner(ortho, v))
        };
        ModeComponents { null_eigenvalue, other_eigenvalue, null, other }
    }
}

fn normalize(v: [Complex64; 2]) -> [Complex64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let lead = if !v[0].is_zero() { v[0] } else { v[1] };
    let phase = lead / lead.norm();
    let scale = phase.conj() / n;
    [v[0] * scale, v[1] * scale]
}

/// Where the drive intensity comes from during integration.
#[derive(Debug, Clone, Copy)]
pub enum DriveSource<'a> {
    Zero,
    /// Closed-form roots evaluated at every integrator stage.
    Synthesized { policy: BranchPolicy, eps_beta: f64 },
    /// Linear interpolation of a sampled profile.
    Sampled(&'a DriveProfile),
}

impl DriveSource<'_> {
    fn intensity(&self, params: &ModelParams, rates: &RateSet, t: f64) -> Result<f64> {
        match *self {
            DriveSource::Zero => Ok(0.0),
            DriveSource::Synthesized { policy, eps_beta } => Ok(synthesized_intensity(params, rates, t, policy, eps_beta)),
            DriveSource::Sampled(profile) => profile.intensity_at(t).ok_or(Error::GridOutsideDrive),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// Maximum step is `2π / (ω₀ · steps_per_period)`.
    pub steps_per_period: usize,
    /// Largest accepted relative change between step `h` and `h/2`; `None`
    /// skips the comparison run.
    pub halving_tol: Option<f64>,
    pub representation: Representation,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { steps_per_period: 200, halving_tol: Some(1.0e-8), representation: Representation::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceTrajectory {
    pub grid: Vec<f64>,
    pub states: Vec<CoherenceState>,
    pub samples: Vec<CoefficientSample>,
    pub det_trace: Vec<f64>,
    pub modes: Vec<ModeComponents>,
    /// Largest relative change observed when halving the step.
    pub halving_deviation: Option<f64>,
}

struct Rhs<'a> {
    params: &'a ModelParams,
    rates: RateSet,
    drive: DriveSource<'a>,
}

impl Rhs<'_> {
    fn sample(&self, t: f64) -> Result<CoefficientSample> {
        let x = self.drive.intensity(self.params, &self.rates, t)?;
        Ok(CoefficientSample::evaluate(self.params, &self.rates, t, x))
    }

    fn eval(&self, t: f64, y: CoherenceState, repr: Representation) -> Result<CoherenceState> {
        let s = self.sample(t)?;
        let rho_pm = match repr {
            Representation::Independent => y.rho_pm,
            Representation::ConjugateConstrained => y.rho_mp.conj(),
        };
        let d_mp = s.c1 * y.rho_mp - rho_pm * s.c2;
        let d_pm = match repr {
            Representation::Independent => s.c1.conj() * rho_pm - y.rho_mp * s.c2,
            Representation::ConjugateConstrained => d_mp.conj(),
        };
        Ok(CoherenceState { rho_mp: d_mp, rho_pm: d_pm })
    }
}

fn axpy(y: CoherenceState, h: f64, k: CoherenceState) -> CoherenceState {
    CoherenceState { rho_mp: y.rho_mp + k.rho_mp * h, rho_pm: y.rho_pm + k.rho_pm * h }
}

fn rk4_step(rhs: &Rhs<'_>, t: f64, y: CoherenceState, h: f64, repr: Representation) -> Result<CoherenceState> {
    let k1 = rhs.eval(t, y, repr)?;
    let k2 = rhs.eval(t + 0.5 * h, axpy(y, 0.5 * h, k1), repr)?;
    let k3 = rhs.eval(t + 0.5 * h, axpy(y, 0.5 * h, k2), repr)?;
    let k4 = rhs.eval(t + h, axpy(y, h, k3), repr)?;
    let mut next = CoherenceState {
        rho_mp: y.rho_mp + (k1.rho_mp + (k2.rho_mp + k3.rho_mp) * 2.0 + k4.rho_mp) * (h / 6.0),
        rho_pm: y.rho_pm + (k1.rho_pm + (k2.rho_pm + k3.rho_pm) * 2.0 + k4.rho_pm) * (h / 6.0),
    };
    if repr == Representation::ConjugateConstrained {
        next.rho_pm = next.rho_mp.conj();
    }
    Ok(next)
}

fn integrate(
    rhs: &Rhs<'_>,
    grid: &[f64],
    rho0: CoherenceState,
    h_max: f64,
    refine: usize,
    repr: Representation,
) -> Result<Vec<CoherenceState>> {
    let mut states = Vec::with_capacity(grid.len());
    let mut y = rho0;
    states.push(y);
    for w in grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let n_sub = ((t1 - t0) / h_max).ceil().max(1.0) as usize * refine;
        let h = (t1 - t0) / n_sub as f64;
        for i in 0..n_sub {
            let t = t0 + h * i as f64;
            y = rk4_step(rhs, t, y, h, repr)?;
        }
        if !y.is_finite() {
            return Err(Error::NonFinite { t: t1 });
        }
        states.push(y);
    }
    Ok(states)
}

/// Integrates the coherence pair over `grid` (which must start at 0 and
/// increase strictly). Each grid interval is split into equal RK4 steps no
/// longer than `2π/(ω₀ · steps_per_period)`.
pub fn evolve(
    params: &ModelParams,
    drive: DriveSource<'_>,
    rho0: CoherenceState,
    grid: &[f64],
    config: &IntegratorConfig,
) -> Result<CoherenceTrajectory> {
    validate_grid(grid)?;
    rho0.check_physical()?;
    if config.steps_per_period == 0 {
        return Err(Error::InvalidParameter("steps_per_period must be positive"));
    }
    let rates = derived_rates(params)?;
    let rhs = Rhs { params, rates, drive };
    let repr = config.representation;
    let rho0 = match repr {
        Representation::Independent => rho0,
        Representation::ConjugateConstrained => CoherenceState { rho_pm: rho0.rho_mp.conj(), ..rho0 },
    };
    let h_max = 2.0 * PI / (params.omega0 * config.steps_per_period as f64);

    let (states, halving_deviation) = match config.halving_tol {
        None => (integrate(&rhs, grid, rho0, h_max, 1, repr)?, None),
        Some(tol) => {
            let coarse = integrate(&rhs, grid, rho0, h_max, 1, repr)?;
            let fine = integrate(&rhs, grid, rho0, h_max, 2, repr)?;
            let deviation = coarse
                .iter()
                .zip(&fine)
                .map(|(c, f)| {
                    let diff = CoherenceState { rho_mp: c.rho_mp - f.rho_mp, rho_pm: c.rho_pm - f.rho_pm }.norm();
                    if diff == 0.0 {
                        0.0
                    } else {
                        diff / f.norm()
                    }
                })
                .fold(0.0, f64::max);
            if deviation.is_nan() || deviation >= tol {
                return Err(Error::NotConverged { deviation, tolerance: tol });
            }
            (fine, Some(deviation))
        }
    };

    let samples = grid.iter().map(|&t| rhs.sample(t)).collect::<Result<Vec<_>>>()?;
    let modes = samples
        .iter()
        .zip(&states)
        .map(|(s, y)| generator_matrix(s.c1, s.c2).mode_components([y.rho_mp, y.rho_pm]))
        .collect();
    Ok(CoherenceTrajectory {
        grid: grid.to_vec(),
        det_trace: samples.iter().map(|s| s.det).collect(),
        states,
        samples,
        modes,
        halving_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drive::{synthesize_profile, uniform_grid, DEFAULT_EPS_BETA};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn generator_examples() {
        assert_eq!(generator_matrix(c(0.0, 0.0), 0.0).norm(), 0.0);
        let g = generator_matrix(c(0.3, -0.4), 0.2);
        assert!((g.det() - c(0.25 - 0.04, 0.0)).norm() < 1e-15);

        let gamma = 0.7;
        let g = generator_matrix(c(gamma, 0.0), -gamma);
        let (small, big) = g.eigenvalues();
        assert!(small.norm() < 1e-15);
        assert!((big - c(2.0 * gamma, 0.0)).norm() < 1e-15);
        let v = g.eigenvector(small);
        assert!((v[0] + v[1]).norm() < 1e-15);
        assert!((v[0] - c(0.5f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eigenvectors_satisfy_eigen_equation() {
        for &(c1, c2) in &[(c(0.3, 0.9), 0.4), (c(-1.0, 0.2), 2.0), (c(0.5, 0.0), 0.0), (c(0.0, 1.0), 1.0)] {
            let g = generator_matrix(c1, c2);
            let (l0, l1) = g.eigenvalues();
            for l in [l0, l1] {
                let v = g.eigenvector(l);
                let mv = g.apply(v);
                assert!((mv[0] - v[0] * l).norm() < 1e-12 && (mv[1] - v[1] * l).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn mode_components_reconstruct_state() {
        let g = generator_matrix(c(0.3, 0.9), 0.4);
        let v = [c(0.2, -0.1), c(0.05, 0.3)];
        let m = g.mode_components(v);
        let r0 = g.eigenvector(m.null_eigenvalue);
        let r1 = g.eigenvector(m.other_eigenvalue);
        for i in 0..2 {
            assert!((r0[i] * m.null + r1[i] * m.other - v[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_coupling_keeps_state_constant() {
        let p = ModelParams::new(1.0, 0.2, 1, 2, 0.0, 1.0).unwrap();
        let rho0 = CoherenceState::physical(c(0.3, -0.2)).unwrap();
        let grid = uniform_grid(0.25, 10.0).unwrap();
        let traj = evolve(&p, DriveSource::Zero, rho0, &grid, &IntegratorConfig::default()).unwrap();
        assert!(traj.states.iter().all(|s| *s == rho0));
    }

    #[test]
    fn closed_form_at_zero_detuning() {
        // δ = 0, E = 0: c₁ = −g_sum t and c₂ = −2 g_plus t decouple Re and Im.
        let p = ModelParams::new(1.0, 0.0, 1, 2, 0.01, 1.0).unwrap();
        let r = derived_rates(&p).unwrap();
        let rho0 = CoherenceState::physical(c(0.3, 0.2)).unwrap();
        let grid = uniform_grid(0.1, 10.0).unwrap();
        let traj = evolve(&p, DriveSource::Zero, rho0, &grid, &IntegratorConfig::default()).unwrap();
        for (t, s) in grid.iter().zip(&traj.states) {
            let re = 0.3 * ((r.r_plus - r.r_minus) * p.g_sq * t * t / 2.0).exp();
            let im = 0.2 * (-(3.0 * r.r_plus + r.r_minus) * p.g_sq * t * t / 2.0).exp();
            assert!((s.rho_mp.re - re).abs() <= 1e-9 * re);
            assert!((s.rho_mp.im - im).abs() <= 1e-9 * im);
        }
    }

    #[test]
    fn independent_pair_stays_conjugate() {
        let p = ModelParams::new(1.0, 0.4, 2, 3, 0.02, 1.0).unwrap();
        let rho0 = CoherenceState::physical(c(0.25, -0.3)).unwrap();
        let grid = uniform_grid(0.2, 12.0).unwrap();
        // The synthesized drive has kinks where the gate switches, so skip the
        // step-halving check here.
        let cfg = IntegratorConfig { representation: Representation::Independent, halving_tol: None, ..Default::default() };
        let source = DriveSource::Synthesized { policy: BranchPolicy::default(), eps_beta: DEFAULT_EPS_BETA };
        let traj = evolve(&p, source, rho0, &grid, &cfg).unwrap();
        for s in &traj.states {
            assert!((s.rho_pm - s.rho_mp.conj()).norm() <= 1e-10);
        }
    }

    #[test]
    fn evolution_is_linear() {
        let p = ModelParams::new(1.0, 0.3, 1, 2, 0.02, 1.0).unwrap();
        let grid = uniform_grid(0.2, 8.0).unwrap();
        let base = CoherenceState { rho_mp: c(0.1, 0.05), rho_pm: c(-0.2, 0.1) };
        let factor = c(0.6, -1.2);
        let cfg = IntegratorConfig { representation: Representation::Independent, ..Default::default() };
        let a = evolve(&p, DriveSource::Zero, base, &grid, &cfg).unwrap();
        let b = evolve(&p, DriveSource::Zero, base.scaled(factor), &grid, &cfg).unwrap();
        for (x, y) in a.states.iter().zip(&b.states) {
            let scale = x.norm() * factor.norm();
            assert!((x.rho_mp * factor - y.rho_mp).norm() <= 1e-12 * scale);
            assert!((x.rho_pm * factor - y.rho_pm).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn sampled_and_synthesized_drives_agree_on_grid_coefficients() {
        let p = ModelParams::new(1.0, 0.01, 1, 5, 0.001, 1.0).unwrap();
        let grid = uniform_grid(2.0 * PI / 200.0, 20.0).unwrap();
        let profile = synthesize_profile(&p, &grid, BranchPolicy::default(), DEFAULT_EPS_BETA).unwrap();
        let rho0 = CoherenceState::physical(c(0.2, 0.1)).unwrap();
        let cfg = IntegratorConfig { halving_tol: None, ..Default::default() };
        let traj = evolve(&p, DriveSource::Sampled(&profile), rho0, &grid, &cfg).unwrap();
        for (i, s) in traj.samples.iter().enumerate() {
            if !profile.gated[i] {
                assert!(s.det.abs() <= 1e-10 * s.det_scale());
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = ModelParams::new(1.0, 0.0, 1, 2, 0.01, 1.0).unwrap();
        let grid = uniform_grid(0.1, 1.0).unwrap();
        assert!(CoherenceState::physical(c(0.6, 0.0)).is_err());
        let wild = CoherenceState { rho_mp: c(0.9, 0.0), rho_pm: c(0.9, 0.0) };
        assert!(evolve(&p, DriveSource::Zero, wild, &grid, &IntegratorConfig::default()).is_err());
        let rho0 = CoherenceState::physical(c(0.1, 0.0)).unwrap();
        assert_eq!(
            evolve(&p, DriveSource::Zero, rho0, &[], &IntegratorConfig::default()),
            Err(Error::EmptyGrid)
        );
        let short = synthesize_profile(&p, &grid[..3], BranchPolicy::default(), DEFAULT_EPS_BETA).unwrap();
        assert_eq!(
            evolve(&p, DriveSource::Sampled(&short), rho0, &grid, &IntegratorConfig::default()),
            Err(Error::GridOutsideDrive)
        );
    }

    #[test]
    fn divergence_is_reported() {
        let p = ModelParams::new(1.0, 0.0, 1, 2, 1.0e6, 1.0).unwrap();
        let grid = uniform_grid(1.0, 40.0).unwrap();
        let rho0 = CoherenceState::physical(c(0.3, 0.0)).unwrap();
        let cfg = IntegratorConfig { halving_tol: None, ..Default::default() };
        assert!(matches!(evolve(&p, DriveSource::Zero, rho0, &grid, &cfg), Err(Error::NonFinite { .. })));
    }
}

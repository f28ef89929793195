//! Operators of the multiphoton two-state model on a truncated Fock ⊗ spin
//! space.
//!
//! Basis index is `s·(n_max+1) + n`, with `s = 0` for the upper state |+⟩,
//! `s = 1` for the lower state |−⟩ and `n` the photon number. Every 2×2 block
//! operator is therefore a literal block matrix: the upper-left block acts on
//! |+⟩.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
// Float supplies the math methods when std is absent from the build.
#[allow(unused_imports)]
use num_traits::Float;

use crate::matrix::{self, CMatrix, OperatorExt};
use crate::model::{falling_ratio, rising_ratio, ModelParams};
use crate::{Error, Result};

/// Default number of Fock levels kept above `m + 2k`.
pub const DEFAULT_CUTOFF_MARGIN: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertConfig {
    pub n_max: usize,
}

impl HilbertConfig {
    /// Cutoff `n_max = m + 2k + margin`.
    pub fn for_model(params: &ModelParams, margin: usize) -> Self {
        Self { n_max: params.m as usize + 2 * params.k as usize + margin }
    }

    /// Checks the cutoff leaves room for `a^k (a†)^k` acting on `|m⟩`.
    pub fn validate_for(&self, params: &ModelParams) -> Result<()> {
        let required = params.m as usize + 2 * params.k as usize;
        if self.n_max < required {
            return Err(Error::CutoffTooSmall { n_max: self.n_max, required });
        }
        Ok(())
    }

    pub fn fock_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        2 * self.fock_dim()
    }

    pub fn index(&self, upper: bool, n: usize) -> usize {
        if upper {
            n
        } else {
            self.fock_dim() + n
        }
    }
}

/// Annihilation operator on the Fock space `{|0⟩, …, |n_max⟩}`.
pub fn fock_ladder(n_max: usize) -> CMatrix {
    let mut a = matrix::zeros(n_max + 1);
    for n in 0..n_max {
        a[(n, n + 1)] = Complex64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    a
}

/// `(a†)^k` on the truncated Fock space.
///
/// Entries are `√((n+k)!/n!)`, taken as one square root of the exact factor
/// ratio rather than a product of `k` square roots. The matrix agrees with the
/// truncated power of `a†`.
pub fn fock_raise_power(n_max: usize, k: u32) -> CMatrix {
    let mut out = matrix::zeros(n_max + 1);
    let k_us = k as usize;
    for n in 0..=n_max {
        if n + k_us <= n_max {
            out[(n + k_us, n)] = Complex64::new(rising_ratio(n as u32, k).sqrt(), 0.0);
        }
    }
    out
}

/// `⟨m|op|m⟩` for an operator on the Fock space.
pub fn fock_expectation(op: &CMatrix, m: usize) -> Result<Complex64> {
    if m >= op.nrows() {
        return Err(Error::BeyondCutoff { m, n_max: op.nrows().saturating_sub(1) });
    }
    Ok(op[(m, m)])
}

fn spin(entries: [[f64; 2]; 2]) -> CMatrix {
    let c = |x: f64| Complex64::new(x, 0.0);
    CMatrix::from_row_slice(2, 2, &[c(entries[0][0]), c(entries[0][1]), c(entries[1][0]), c(entries[1][1])])
}

/// The model operators lifted to the full Fock ⊗ spin space.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub config: HilbertConfig,
    pub k: u32,
    pub a: CMatrix,
    pub a_dag: CMatrix,
    pub sigma_plus: CMatrix,
    pub sigma_minus: CMatrix,
    pub sigma_z: CMatrix,
    pub q: CMatrix,
    pub q_dag: CMatrix,
    pub n: CMatrix,
    pub n_prime: CMatrix,
}

pub fn build_operators(config: HilbertConfig, k: u32) -> Result<OperatorSet> {
    if k == 0 {
        return Err(Error::InvalidParameter("photon multiplicity k must be at least 1"));
    }
    if config.n_max < k as usize {
        return Err(Error::CutoffTooSmall { n_max: config.n_max, required: k as usize });
    }
    let nf = config.fock_dim();
    let id_f = matrix::identity(nf);
    let id_s = matrix::identity(2);

    let a_f = fock_ladder(config.n_max);
    let raise_k = fock_raise_power(config.n_max, k);
    let lower_k = raise_k.adjoint();

    let sigma_plus = spin([[0.0, 1.0], [0.0, 0.0]]).kronecker(&id_f);
    let sigma_minus = spin([[0.0, 0.0], [1.0, 0.0]]).kronecker(&id_f);
    let sigma_z = spin([[1.0, 0.0], [0.0, -1.0]]).kronecker(&id_f);
    let a = id_s.kronecker(&a_f);
    let a_dag = a.adjoint();

    // Q = (a†)^k σ₋ sits in the lower-left block, Q† = a^k σ₊ in the upper-right.
    let q = spin([[0.0, 0.0], [1.0, 0.0]]).kronecker(&raise_k);
    let q_dag = spin([[0.0, 1.0], [0.0, 0.0]]).kronecker(&lower_k);

    // N = a†a + ((k−1)/2) σ_z + 1/2
    let half_k_minus_one = 0.5 * (f64::from(k) - 1.0);
    let n = &(&(&a_dag * &a) + &sigma_z.scaled_real(half_k_minus_one))
        + &matrix::identity(2 * nf).scaled_real(0.5);

    // N' = diag(a^k (a†)^k, (a†)^k a^k), exact on the Fock diagonal.
    let mut n_prime_diag = Vec::with_capacity(2 * nf);
    n_prime_diag.extend((0..nf).map(|n| rising_ratio(n as u32, k)));
    n_prime_diag.extend((0..nf).map(|n| falling_ratio(n as u32, k).unwrap_or(0.0)));
    let n_prime = matrix::from_real_diagonal(&n_prime_diag);

    Ok(OperatorSet { config, k, a, a_dag, sigma_plus, sigma_minus, sigma_z, q, q_dag, n, n_prime })
}

/// The relations closing the supersymmetric algebra of `(N, N′, Q, Q†)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SusyRelation {
    QSquared,
    QDagSquared,
    CommQDagQ,
    CommNNPrime,
    CommNQ,
    CommNQDag,
    AntiQDagQ,
    AntiQSigmaZ,
    AntiQDagSigmaZ,
    CommQSigmaZ,
    CommQDagSigmaZ,
    DifferenceSquared,
}

impl SusyRelation {
    pub const ALL: [SusyRelation; 12] = [
        Self::QSquared,
        Self::QDagSquared,
        Self::CommQDagQ,
        Self::CommNNPrime,
        Self::CommNQ,
        Self::CommNQDag,
        Self::AntiQDagQ,
        Self::AntiQSigmaZ,
        Self::AntiQDagSigmaZ,
        Self::CommQSigmaZ,
        Self::CommQDagSigmaZ,
        Self::DifferenceSquared,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::QSquared => "Q^2 = 0",
            Self::QDagSquared => "(Q†)^2 = 0",
            Self::CommQDagQ => "[Q†, Q] = N' σz",
            Self::CommNNPrime => "[N, N'] = 0",
            Self::CommNQ => "[N, Q] = Q",
            Self::CommNQDag => "[N, Q†] = -Q†",
            Self::AntiQDagQ => "{Q†, Q} = N'",
            Self::AntiQSigmaZ => "{Q, σz} = 0",
            Self::AntiQDagSigmaZ => "{Q†, σz} = 0",
            Self::CommQSigmaZ => "[Q, σz] = 2Q",
            Self::CommQDagSigmaZ => "[Q†, σz] = -2Q†",
            Self::DifferenceSquared => "(Q† - Q)^2 = -N'",
        }
    }

    /// `(lhs, rhs)` evaluated on the full truncated space.
    fn sides(self, ops: &OperatorSet) -> (CMatrix, CMatrix) {
        let zero = || matrix::zeros(ops.config.dim());
        let (q, qd, n, np, sz) = (&ops.q, &ops.q_dag, &ops.n, &ops.n_prime, &ops.sigma_z);
        match self {
            Self::QSquared => (q * q, zero()),
            Self::QDagSquared => (qd * qd, zero()),
            Self::CommQDagQ => (matrix::commutator(qd, q), np * sz),
            Self::CommNNPrime => (matrix::commutator(n, np), zero()),
            Self::CommNQ => (matrix::commutator(n, q), q.clone()),
            Self::CommNQDag => (matrix::commutator(n, qd), -qd),
            Self::AntiQDagQ => (matrix::anticommutator(qd, q), np.clone()),
            Self::AntiQSigmaZ => (matrix::anticommutator(q, sz), zero()),
            Self::AntiQDagSigmaZ => (matrix::anticommutator(qd, sz), zero()),
            Self::CommQSigmaZ => (matrix::commutator(q, sz), q.scaled_real(2.0)),
            Self::CommQDagSigmaZ => (matrix::commutator(qd, sz), qd.scaled_real(-2.0)),
            Self::DifferenceSquared => {
                let diff = qd - q;
                (&diff * &diff, -np)
            }
        }
    }
}

impl fmt::Display for SusyRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SusyReport {
    /// Absolute Frobenius residual per relation.
    pub residuals: Vec<(SusyRelation, f64)>,
    /// Frobenius norm of `N′` on the same subspace, the natural size of the
    /// quadratic relations.
    pub scale: f64,
}

impl SusyReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|&(_, r)| r).fold(0.0, f64::max)
    }

    /// Largest residual divided by [`SusyReport::scale`].
    pub fn max_relative_residual(&self) -> f64 {
        self.max_residual() / self.scale.max(1.0)
    }

    pub fn get(&self, relation: SusyRelation) -> Option<f64> {
        self.residuals.iter().find(|(r, _)| *r == relation).map(|&(_, v)| v)
    }
}

/// Basis indices with photon number `≤ n_max − k` in both spin blocks.
pub fn projected_indices(config: HilbertConfig, k: u32) -> Vec<usize> {
    let top = config.n_max.saturating_sub(k as usize);
    (0..=top).map(|n| config.index(true, n)).chain((0..=top).map(|n| config.index(false, n))).collect()
}

/// Frobenius residual of every algebra relation, restricted to the subspace
/// below the truncation boundary.
pub fn check_susy_relations(ops: &OperatorSet) -> SusyReport {
    let keep = projected_indices(ops.config, ops.k);
    let residuals = SusyRelation::ALL
        .iter()
        .map(|&rel| {
            let (lhs, rhs) = rel.sides(ops);
            let diff = &lhs - &rhs;
            (rel, diff.principal_submatrix(&keep).norm())
        })
        .collect();
    let scale = ops.n_prime.principal_submatrix(&keep).norm();
    SusyReport { residuals, scale }
}

/// Complex noise coupling `g` and transition dipole `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub g: Complex64,
    pub d: Complex64,
}

impl Couplings {
    /// Real, positive `g = √|g|²` and `d = √|d|²`.
    pub fn from_params(params: &ModelParams) -> Self {
        Self { g: Complex64::new(params.g_sq.sqrt(), 0.0), d: Complex64::new(params.d_sq.sqrt(), 0.0) }
    }
}

/// Interaction-picture Hamiltonian
/// `g e^{−iδt} Q + g* e^{iδt} Q† − ½(dE e^{iω₀t} σ₊ + d*E* e^{−iω₀t} σ₋)`.
pub fn build_interaction_hamiltonian(
    t: f64,
    params: &ModelParams,
    couplings: &Couplings,
    e_field: Complex64,
    ops: &OperatorSet,
) -> CMatrix {
    let noise = couplings.g * Complex64::cis(-params.delta * t);
    let drive = couplings.d * e_field * Complex64::cis(params.omega0 * t) * -0.5;
    let terms = [
        ops.q.scaled(noise),
        ops.q_dag.scaled(noise.conj()),
        ops.sigma_plus.scaled(drive),
        ops.sigma_minus.scaled(drive.conj()),
    ];
    terms.iter().skip(1).fold(terms[0].clone(), |acc, m| &acc + m)
}

/// The same Hamiltonian obtained by conjugating the lab-frame Hamiltonian with
/// the free evolution `V(t) = exp[−i((ω₀/2)σ_z + ω a†a)t]` and removing the
/// free part, with ω from [`ModelParams::mode_frequency`].
pub fn interaction_via_transform(
    t: f64,
    params: &ModelParams,
    couplings: &Couplings,
    e_field: Complex64,
    ops: &OperatorSet,
) -> CMatrix {
    let omega = params.mode_frequency();
    let free = &ops.sigma_z.scaled_real(0.5 * params.omega0) + &(&ops.a_dag * &ops.a).scaled_real(omega);
    let drive = couplings.d * e_field * -0.5;
    let total = [
        ops.q.scaled(couplings.g),
        ops.q_dag.scaled(couplings.g.conj()),
        ops.sigma_plus.scaled(drive),
        ops.sigma_minus.scaled(drive.conj()),
    ]
    .iter()
    .fold(free.clone(), |acc, m| &acc + m);

    let dim = ops.config.dim();
    let phases: Vec<Complex64> = (0..dim).map(|i| Complex64::cis(-free[(i, i)].re * t)).collect();
    let v = matrix::from_diagonal(&phases);
    &(&(&v.adjoint() * &total) * &v) - &free
}

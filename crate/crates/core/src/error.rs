use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("reservoir occupation m = {m} must be at least the photon multiplicity k = {k}")]
    OccupationBelowMultiplicity { m: u32, k: u32 },
    #[error("Fock cutoff n_max = {n_max} is too small, need at least {required}")]
    CutoffTooSmall { n_max: usize, required: usize },
    #[error("occupation {m} lies beyond the Fock cutoff {n_max}")]
    BeyondCutoff { m: usize, n_max: usize },
    #[error("time grid is empty")]
    EmptyGrid,
    #[error("time grid must start at 0 and be strictly increasing")]
    MalformedGrid,
    #[error("time grid extends beyond the drive profile")]
    GridOutsideDrive,
    #[error("drive profile has no detected period")]
    MissingPeriod,
    #[error("non-finite coherence at t = {t:e}")]
    NonFinite { t: f64 },
    #[error("step halving changed the trajectory by {deviation:e} (tolerance {tolerance:e})")]
    NotConverged { deviation: f64, tolerance: f64 },
    #[error("matrix dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

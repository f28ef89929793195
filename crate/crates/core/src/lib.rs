//! Numerical core for keeping a multiphoton two-state system coherent with an
//! external classical drive.
//!
//! The crate is `no_std` (it needs `alloc`) and covers:
//!
//! * [`model`]: model parameters and overflow-safe Fock-state factor ratios,
//! * [`fock`]: dense operators on the truncated Fock ⊗ spin space and the
//!   supersymmetric algebra they close under,
//! * [`coefficients`]: the finite-window Markoff coefficients `c1`, `c2` of the
//!   off-diagonal density-matrix equations,
//! * [`drive`]: the closed-form drive intensity that makes the coherence
//!   generator singular, with gating and cyclic extension,
//! * [`coherence`]: integration of the coherence equations and a brute-force
//!   double-commutator oracle for the coefficients.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod coefficients;
pub mod coherence;
pub mod drive;
mod error;
pub mod fock;
pub mod matrix;
pub mod model;

pub use error::{Error, Result};
pub use num_complex::Complex64;

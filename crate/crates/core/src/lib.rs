//! Numerical laboratory for reproducing kernel Hilbert spaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense Hermitian numerics (PSD certification, eigen-based
//!   factorization, closure checks for hyponormal compressions).
//! - [`kernels`]: kernel specifications, Gram assembly, normalization at a
//!   base point and irreducibility checks.
//! - [`pick`]: Pick matrices, interpolation feasibility and minimal
//!   interpolation norm.
//! - [`cnp`]: the complete Nevanlinna-Pick sample test, the embedding into
//!   the Drury-Arveson ball, coefficient ratio tests and Blaschke sums.
//! - [`fock`]: an exact (rational) and numeric engine for truncated
//!   Drury-Arveson space.
//! - [`reconstruct`]: classification of sampled kernels and recovery of the
//!   factorization `K(l, m) = delta(l) conj(delta(m)) / (1 - j(l) conj(j(m)))`.
//!
//! Every verdict computed from finitely many samples is a sample-level
//! statement. Refutations are certificates; "consistent" never means the
//! full space has the property.

pub mod cnp;
pub mod error;
pub mod fock;
pub mod kernels;
pub mod linalg;
pub mod pick;
pub mod reconstruct;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Default relative tolerance for PSD certification.
pub const DEFAULT_TOL: f64 = 1e-9;

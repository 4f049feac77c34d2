//! Shared numerical kernels: adaptive quadrature, banded LU, symmetric
//! tridiagonal spectra, trigonometric transforms, and scalar root finding.
//!
//! Everything here is dependency-free and deterministic; the domain modules
//! build on these rather than on external linear-algebra crates (the band
//! solver and the Sturm eigensolver are small, and their exact behavior —
//! error estimates, pivot guards, kernel invariance — is contract-relevant).

pub mod band;
pub mod elliptic;
pub mod fourier;
pub mod quad;
pub mod rootfind;
pub mod tridiag;

/// Machine-epsilon-scale guard used by pivoted factorizations and Sturm
/// counts: pivots smaller than this in magnitude are treated as this value
/// (with their original sign convention) to avoid division blow-ups.
pub const MIN_PIVOT: f64 = 1e-300;

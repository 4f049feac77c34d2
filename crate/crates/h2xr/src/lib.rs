//! Numerical laboratory for minimal graphs and minimal annuli in H²×R.
//!
//! H² is modeled on the Poincaré disk with metric g₀ = 4|dz|²/(1−|z|²)²; the
//! ambient space carries the product metric g = g₀ + dt². The library
//! constructs the rotationally invariant catenoid family, its Jacobi
//! spectrum, minimal vertical graphs over the disk, minimal annuli near a
//! catenoid, the flux and center invariants of their ends, the tall-rectangle
//! area comparison, and computable nonexistence gates for boundary curve
//! pairs.
//!
//! Module map:
//! - [`geometry`] — disk model, conformal factor, rotations and dilations.
//! - [`curve`] — 2π-periodic boundary curves (Fourier + samples) and pairs.
//! - [`catenoid`] — profile ODE first integral, κ↔h correspondence, traces.
//! - [`jacobi`] — mode operators, Dirichlet spectra, decaying-kernel count.
//! - [`graphsolver`] — minimal vertical graphs over disk/annulus domains.
//! - [`annulussolver`] — normal-graph minimal annuli near a catenoid.
//! - [`flux_center`] — flux families, conservation residuals, center map.
//! - [`tallrect`] — tall-rectangle profile, elliptic integrals, area ratio.
//! - [`obstruction`] — gap/tilt/admissibility/symmetry gates.
//! - [`verify`] — the acceptance checks behind `h2xr verify-all`.
//! - [`num`] — quadrature, banded LU, tridiagonal spectra, trig transforms.
//! - [`mesh`] — OBJ export of profiles, graphs, and immersions.

pub mod annulussolver;
pub mod catenoid;
pub mod curve;
pub mod error;
pub mod flux_center;
pub mod geometry;
pub mod graphsolver;
pub mod jacobi;
pub mod mesh;
pub mod num;
pub mod obstruction;
pub mod par;
pub mod tallrect;
pub mod verify;

pub use error::{Error, Result};

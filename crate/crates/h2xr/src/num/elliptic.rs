//! Incomplete elliptic integrals in the supercritical parameter regime.
//!
//! For parameter m > 1 the integrands of
//!
//! ```text
//! F(φ|m) = ∫₀^φ dt / √(1 − m sin²t),      E(φ|m) = ∫₀^φ √(1 − m sin²t) dt
//! ```
//!
//! are real only up to the critical angle φ* = asin(1/√m), where
//! 1 − m sin²t has a simple zero: F's integrand blows up like an inverse
//! square root and E's has a square-root cusp.  Generic quadrature stalls
//! there, but the zero factors exactly —
//!
//! ```text
//! 1 − m sin²(φ* − ξ²) = m sin(ξ²) sin(2φ* − ξ²)
//! ```
//!
//! (apply sin²A − sin²B = sin(A+B)·sin(A−B) with m sin²φ* = 1) — so the
//! substitution t = φ* − ξ² makes both integrands smooth through ξ = 0:
//!
//! ```text
//! F-tail:  2 dξ / ( √m · √(sinc ξ²) · √(sin(2φ* − ξ²)) )
//! E-tail:  2 ξ² √m · √(sinc ξ²) · √(sin(2φ* − ξ²)) dξ,   sinc x = sin x / x.
//! ```
//!
//! Each integral is split at φ*/2: a plain adaptive panel on the smooth part
//! and a substituted panel for the half closest to the critical angle.  The
//! returned error is the sum of the two quadrature estimates, so values are
//! usable in certified a-posteriori bounds.
//!
//! Accuracy degrades as m → 1⁺ (the complete integral diverges in that
//! limit); callers working near m = 1 should keep a margin.

use crate::error::{Error, Result};
use crate::num::quad;

/// Value with an additive error bound from the underlying quadratures.
#[derive(Debug, Clone, Copy)]
pub struct EllipticValue {
    pub value: f64,
    pub error: f64,
}

/// φ* = asin(1/√m), the largest real angle for parameter `m > 1`.
pub fn critical_angle(m: f64) -> Result<f64> {
    if !(m > 1.0) {
        return Err(Error::domain(format!(
            "supercritical elliptic integrals need parameter m > 1 (got {m})"
        )));
    }
    Ok((1.0 / m.sqrt()).asin())
}

/// sin(x)/x, stable through x = 0.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Splits [0, φ] into a plain segment and a ξ-substituted tail.
///
/// Returns `(plain_end, tail)` where `tail = Some((ξ_lo, ξ_hi))` covers
/// t ∈ [plain_end, φ] through t = φ* − ξ².
fn split(phi: f64, phi_star: f64) -> Result<(f64, Option<(f64, f64)>)> {
    if !(phi >= 0.0) {
        return Err(Error::domain("elliptic integral angle must be nonnegative"));
    }
    if phi > phi_star * (1.0 + 1e-12) + 1e-15 {
        return Err(Error::domain(format!(
            "angle {phi} exceeds the critical angle {phi_star}"
        )));
    }
    let phi = phi.min(phi_star);
    let cut = 0.5 * phi_star;
    if phi <= cut {
        Ok((phi, None))
    } else {
        Ok((cut, Some(((phi_star - phi).sqrt(), (phi_star - cut).sqrt()))))
    }
}

const TOL: f64 = 1e-13;

/// Incomplete elliptic integral of the first kind, F(φ|m), m > 1, φ ≤ φ*.
pub fn elliptic_f(phi: f64, m: f64) -> Result<EllipticValue> {
    let phi_star = critical_angle(m)?;
    let (plain_end, tail) = split(phi, phi_star)?;
    let sm = m.sqrt();
    let plain = quad::adaptive(
        |t| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(),
        0.0,
        plain_end,
        TOL,
        TOL,
    )?;
    let mut value = plain.value;
    let mut error = plain.error;
    if let Some((lo, hi)) = tail {
        let t = quad::adaptive(
            |xi| {
                let x = xi * xi;
                2.0 / (sm * sinc(x).sqrt() * (2.0 * phi_star - x).sin().sqrt())
            },
            lo,
            hi,
            TOL,
            TOL,
        )?;
        value += t.value;
        error += t.error;
    }
    Ok(EllipticValue { value, error })
}

/// Incomplete elliptic integral of the second kind, E(φ|m), m > 1, φ ≤ φ*.
pub fn elliptic_e(phi: f64, m: f64) -> Result<EllipticValue> {
    let phi_star = critical_angle(m)?;
    let (plain_end, tail) = split(phi, phi_star)?;
    let sm = m.sqrt();
    let plain = quad::adaptive(
        |t| (1.0 - m * t.sin().powi(2)).sqrt(),
        0.0,
        plain_end,
        TOL,
        TOL,
    )?;
    let mut value = plain.value;
    let mut error = plain.error;
    if let Some((lo, hi)) = tail {
        let t = quad::adaptive(
            |xi| {
                let x = xi * xi;
                2.0 * x * sm * (sinc(x) * (2.0 * phi_star - x).sin()).sqrt()
            },
            lo,
            hi,
            TOL,
            TOL,
        )?;
        value += t.value;
        error += t.error;
    }
    Ok(EllipticValue { value, error })
}

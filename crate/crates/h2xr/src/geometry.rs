//! Poincaré-disk model of H²: conformal factor and the isometries used
//! throughout (rotations about the axis, horizontal dilations).
//!
//! The disk carries g₀ = λ²|dz|² with λ² = 4/(1−|z|²)². The reciprocal
//! F = (1−r²)²/4 shows up in every graph functional through the identity
//! λ²·F ≡ 1; in code λ² is stored as 1/F, so the identity holds to the two
//! roundings of a divide and a multiply, independent of position.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Point of the open unit disk, Cartesian coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    pub x: f64,
    pub y: f64,
}

impl DiskPoint {
    /// Constructor enforcing |p| < 1.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if x * x + y * y < 1.0 {
            Ok(DiskPoint { x, y })
        } else {
            Err(Error::Domain(format!(
                "({x}, {y}) is not inside the unit disk"
            )))
        }
    }

    #[must_use]
    pub fn origin() -> Self {
        DiskPoint { x: 0.0, y: 0.0 }
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    #[must_use]
    pub fn abs(&self) -> f64 {
        self.x.hypot(self.y)
    }

    #[must_use]
    pub fn arg(&self) -> f64 {
        self.y.atan2(self.x)
    }

    #[must_use]
    pub(crate) fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    fn from_complex_clamped(z: Complex64) -> Self {
        // Möbius images of interior points are interior; any excursion is
        // round-off, so nudge back rather than erroring.
        let n = z.norm();
        if n < 1.0 {
            DiskPoint { x: z.re, y: z.im }
        } else {
            let s = (1.0 - 1e-15) / n;
            DiskPoint {
                x: z.re * s,
                y: z.im * s,
            }
        }
    }
}

/// Conformal factor λ² and its reciprocal F at a point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MetricSample {
    /// λ² = 4/(1−|z|²)²  (> 0, → ∞ at the ideal boundary)
    pub lambda2: f64,
    /// F = (1−|z|²)²/4 = 1/λ²  (→ 0 at the ideal boundary)
    pub f: f64,
}

/// λ² and F at `p`.
pub fn conformal_factor(p: &DiskPoint) -> Result<MetricSample> {
    let r2 = p.x * p.x + p.y * p.y;
    if r2 >= 1.0 {
        return Err(Error::domain("conformal factor requested outside the disk"));
    }
    let one_minus = 1.0 - r2;
    let f = one_minus * one_minus / 4.0;
    Ok(MetricSample {
        lambda2: 1.0 / f,
        f,
    })
}

/// F = (1−r²)²/4 as a bare function of the radius (hot loops).
#[inline]
#[must_use]
pub fn metric_f(r: f64) -> f64 {
    let one_minus = 1.0 - r * r;
    one_minus * one_minus / 4.0
}

/// Horizontal dilation T_{z0}(z) = (z + z0)/(z̄0·z + 1); maps the axis
/// through 0 to the axis through z0 and is a g₀-isometry.
pub fn apply_dilation(z0: &DiskPoint, p: &DiskPoint) -> Result<DiskPoint> {
    if z0.abs() >= 1.0 || p.abs() >= 1.0 {
        return Err(Error::domain("dilation arguments must lie in the open disk"));
    }
    let z0c = z0.to_complex();
    let z = p.to_complex();
    let image = (z + z0c) / (z0c.conj() * z + Complex64::new(1.0, 0.0));
    Ok(DiskPoint::from_complex_clamped(image))
}

/// Hyperbolic distance in the disk model, via the Möbius-invariant
/// pseudo-distance δ = |z−w|/|1−z̄w| and d = 2·atanh δ.
#[must_use]
pub fn hyperbolic_distance(p: &DiskPoint, q: &DiskPoint) -> f64 {
    let z = p.to_complex();
    let w = q.to_complex();
    let num = (z - w).norm();
    let den = (Complex64::new(1.0, 0.0) - z.conj() * w).norm();
    if num == 0.0 {
        return 0.0;
    }
    // Clamp: near-ideal pairs can push δ to 1 by round-off; keep atanh finite.
    let delta = (num / den).min(1.0 - 1e-15);
    2.0 * delta.atanh()
}

/// Isometry of H² fixing no orientation conventions beyond the two
/// generators actually used: rotations about the origin's vertical axis and
/// horizontal dilations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Isometry {
    /// z ↦ e^{iζ} z
    Rotation(f64),
    /// z ↦ T_{z0}(z)
    Dilation(DiskPoint),
    /// Right-to-left application order: the last element acts first.
    Composition(Vec<Isometry>),
}

impl Isometry {
    pub fn apply(&self, p: &DiskPoint) -> Result<DiskPoint> {
        match self {
            Isometry::Rotation(zeta) => {
                let rotated = p.to_complex() * Complex64::from_polar(1.0, *zeta);
                Ok(DiskPoint::from_complex_clamped(rotated))
            }
            Isometry::Dilation(z0) => apply_dilation(z0, p),
            Isometry::Composition(parts) => {
                let mut cur = *p;
                for part in parts.iter().rev() {
                    cur = part.apply(&cur)?;
                }
                Ok(cur)
            }
        }
    }

    /// Exact group inverse (no numerical inversion involved).
    #[must_use]
    pub fn inverse(&self) -> Isometry {
        match self {
            Isometry::Rotation(zeta) => Isometry::Rotation(-zeta),
            Isometry::Dilation(z0) => Isometry::Dilation(DiskPoint {
                x: -z0.x,
                y: -z0.y,
            }),
            Isometry::Composition(parts) => {
                Isometry::Composition(parts.iter().rev().map(Isometry::inverse).collect())
            }
        }
    }
}

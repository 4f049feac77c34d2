//! Tall rectangles over geodesics and the competitor that beats them.
//!
//! A *tall rectangle* of shape d > 1 is a vertical bi-graph over a geodesic
//! of the hyperbolic plane.  In the upper half-plane model, over the unit
//! half-circle, its upper half is the graph
//!
//! ```text
//! (u cos v, u sin v, λ(v)),    u > 0,  v ∈ (0, θ0],   θ0 = asin(1/d),
//! λ(v) = d · (F(θ0|d²) − F(v|d²))        (so λ(θ0) = 0),
//! ```
//!
//! with F the incomplete elliptic integral of the first kind in the
//! supercritical regime of [`crate::num::elliptic`].  The surface is
//! minimal, has two vertical boundary lines, and its height 2λ(0) always
//! exceeds π — these are exactly the annular-type boundaries a catenoidal
//! annulus can never span.
//!
//! Minimality does not imply area-minimization.  Cutting the rectangle with
//! the vertical planes over |z| = r, 1/r and the horizontal slab |t| ≤ λ(θ)
//! leaves the bi-graph piece over (r, 1/r) × (θ, θ0), whose area has the
//! closed form −2 ln r · B(θ) with
//!
//! ```text
//! B(θ) = 2[ cot θ √(1 − d² sin²θ) + E(θ|d²) − F(θ|d²) + F(θ0|d²) − E(θ0|d²) ].
//! ```
//!
//! A cheaper surface with the same boundary replaces that piece by the
//! horizontal annular sector at the cut height (area −4 ln r · cot θ) plus a
//! band on the cut planes, whose area is below 2λ(0) ln cot²(θ/2).  Along
//! the family r = tanⁿ(θ/2) the ratio of the two costs reduces to
//!
//! ```text
//! f(θ) = n B(θ) / (2n cot θ + 2λ(0)),       f(0⁺) = 1,
//! f′(0⁺) = F(θ0|d²) − E(θ0|d²) − λ(0)/n,
//! ```
//!
//! so for every n above [`TallRectangle::minimal_power`] the ratio climbs
//! above 1 at small angles: the rectangle strictly loses.  Because every
//! quantity carries a quadrature error bound, [`TallRectangle::find_witness`]
//! can certify f(θ*) − error > 1 at a concrete angle, turning the comparison
//! into a verified numerical statement.

use crate::error::{Error, Result};
use crate::num::elliptic::{critical_angle, elliptic_e, elliptic_f, EllipticValue};
use crate::par::{self, Exec};

/// Value with a propagated error bound from the elliptic quadratures.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Certified {
    pub value: f64,
    pub error: f64,
}

/// Certified angle at which the area comparison strictly exceeds 1.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Witness {
    pub d: f64,
    /// Exponent of the cut family r = tanⁿ(θ/2).
    pub n: usize,
    pub theta: f64,
    /// Area ratio f(θ) of the bi-graph piece to its competitor.
    pub ratio: f64,
    /// Additive bound on the quadrature error in `ratio`.
    pub error_bound: f64,
}

impl Witness {
    /// Certified excess over 1; positive means the comparison is proven.
    pub fn margin(&self) -> f64 {
        self.ratio - self.error_bound - 1.0
    }
}

/// A tall rectangle of shape parameter d > 1, with its complete elliptic
/// data precomputed.
#[derive(Debug, Clone)]
pub struct TallRectangle {
    d: f64,
    theta0: f64,
    f_complete: EllipticValue,
    e_complete: EllipticValue,
}

impl TallRectangle {
    pub fn new(d: f64) -> Result<Self> {
        if !(d >= 1.0 + 1e-6) {
            return Err(Error::domain(format!(
                "tall rectangle shape parameter must exceed 1 (got {d}); the \
                 height diverges as d → 1"
            )));
        }
        let m = d * d;
        let theta0 = critical_angle(m)?;
        let f_complete = elliptic_f(theta0, m)?;
        let e_complete = elliptic_e(theta0, m)?;
        Ok(Self {
            d,
            theta0,
            f_complete,
            e_complete,
        })
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Angle θ0 = asin(1/d) at which the graph meets the geodesic plane.
    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    /// λ(0) = d F(θ0|d²), half the total height.
    pub fn half_height(&self) -> f64 {
        self.d * self.f_complete.value
    }

    /// Total height 2λ(0); always strictly greater than π.
    pub fn height(&self) -> f64 {
        2.0 * self.half_height()
    }

    /// Error bound on [`Self::height`].
    pub fn height_error(&self) -> f64 {
        2.0 * self.d * self.f_complete.error
    }

    fn check_angle(&self, theta: f64) -> Result<()> {
        if !(theta > 0.0 && theta <= self.theta0 * (1.0 + 1e-12)) {
            return Err(Error::domain(format!(
                "cut angle must lie in (0, {}] (got {theta})",
                self.theta0
            )));
        }
        Ok(())
    }

    /// Height profile λ(θ) = d (F(θ0|d²) − F(θ|d²)) of the upper graph.
    pub fn half_height_at(&self, theta: f64) -> Result<Certified> {
        if !(theta >= 0.0) {
            return Err(Error::domain("profile angle must be nonnegative"));
        }
        let f = elliptic_f(theta.min(self.theta0), self.d * self.d)?;
        Ok(Certified {
            value: self.d * (self.f_complete.value - f.value),
            error: self.d * (self.f_complete.error + f.error),
        })
    }

    /// The θ-antiderivative B with B(θ0) = 0; the bi-graph piece over
    /// (r, 1/r) × (θ, θ0) has area −2 ln r · B(θ).
    pub fn bracket(&self, theta: f64) -> Result<Certified> {
        self.check_angle(theta)?;
        let m = self.d * self.d;
        let theta = theta.min(self.theta0);
        let e = elliptic_e(theta, m)?;
        let f = elliptic_f(theta, m)?;
        let root = (1.0 - m * theta.sin().powi(2)).max(0.0).sqrt();
        let value = 2.0
            * (theta.cos() / theta.sin() * root + e.value - f.value + self.f_complete.value
                - self.e_complete.value);
        let error =
            2.0 * (e.error + f.error + self.f_complete.error + self.e_complete.error);
        Ok(Certified { value, error })
    }

    fn check_radius(r: f64) -> Result<()> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::domain(format!(
                "window radius must lie in (0, 1) (got {r})"
            )));
        }
        Ok(())
    }

    /// Area of the bi-graph piece of the rectangle over (r, 1/r) × (θ, θ0).
    pub fn bigraph_area(&self, r: f64, theta: f64) -> Result<Certified> {
        Self::check_radius(r)?;
        let b = self.bracket(theta)?;
        let scale = -2.0 * r.ln();
        Ok(Certified {
            value: scale * b.value,
            error: scale * b.error,
        })
    }

    /// Area of the horizontal annular sector (r, 1/r) × (θ, π − θ) at the
    /// cut height: −4 ln r · cot θ, exact.
    pub fn disk_competitor_area(&self, r: f64, theta: f64) -> f64 {
        -4.0 * r.ln() * theta.cos() / theta.sin()
    }

    /// Upper bound 2λ(0) ln cot²(θ/2) for the area of the band the
    /// competitor needs on the two cut planes.
    pub fn band_area_bound(&self, theta: f64) -> Result<Certified> {
        self.check_angle(theta)?;
        let l = ((theta / 2.0).cos() / (theta / 2.0).sin()).powi(2).ln();
        Ok(Certified {
            value: self.height() * l,
            error: self.height_error() * l,
        })
    }

    /// Area ratio f(θ) = n B(θ) / (2n cot θ + 2λ(0)) of the bi-graph piece
    /// to the disk-plus-band competitor along the cuts r = tanⁿ(θ/2).
    ///
    /// The reduced form stays stable where tanⁿ(θ/2) itself underflows.
    pub fn area_ratio(&self, n: usize, theta: f64) -> Result<Certified> {
        if n == 0 {
            return Err(Error::domain("cut family exponent must be positive"));
        }
        let b = self.bracket(theta)?;
        let nf = n as f64;
        let den = 2.0 * nf * theta.cos() / theta.sin() + 2.0 * self.half_height();
        let value = nf * b.value / den;
        let error =
            (nf * b.error + value.abs() * 2.0 * self.d * self.f_complete.error) / den;
        Ok(Certified { value, error })
    }

    /// Smallest exponent for which the axis slope of the ratio is positive:
    /// the least n with λ(0)/n < F(θ0|d²) − E(θ0|d²).
    pub fn minimal_power(&self) -> usize {
        let gap = self.f_complete.value - self.e_complete.value;
        (self.half_height() / gap).floor() as usize + 1
    }

    /// Scans cut angles for a certified ratio above 1.
    ///
    /// `n` defaults to four times [`Self::minimal_power`], which pushes the
    /// maximum of f well clear of its error bound.  Jobs are independent per
    /// angle; `exec` picks the map strategy and the result is identical
    /// either way.
    pub fn find_witness(&self, n: Option<usize>, exec: Exec) -> Result<Witness> {
        let n = n.unwrap_or(4 * self.minimal_power());
        if n == 0 {
            return Err(Error::domain("cut family exponent must be positive"));
        }
        const POINTS: usize = 512;
        let thetas: Vec<f64> = (1..=POINTS)
            .map(|i| self.theta0 * i as f64 / (POINTS + 1) as f64)
            .collect();
        let ratios: Vec<Result<Certified>> =
            par::map(exec, thetas.clone(), |theta| self.area_ratio(n, theta));
        let mut best: Option<Witness> = None;
        for (theta, ratio) in thetas.into_iter().zip(ratios) {
            let ratio = ratio?;
            let w = Witness {
                d: self.d,
                n,
                theta,
                ratio: ratio.value,
                error_bound: ratio.error,
            };
            if best.as_ref().is_none_or(|b| w.margin() > b.margin()) {
                best = Some(w);
            }
        }
        let best = best.expect("scan grid is nonempty");
        if best.margin() > 0.0 {
            Ok(best)
        } else {
            Err(Error::NoWitness(format!(
                "no cut angle certifies the area ratio above 1 for n = {n} \
                 (best margin {:.3e} at θ = {:.6})",
                best.margin(),
                best.theta
            )))
        }
    }

    /// One witness scan per cut exponent, fanned out over `exec`; the inner
    /// angle scans run sequentially so the fan-out is the only parallelism.
    pub fn witness_family(&self, powers: &[usize], exec: Exec) -> Vec<Result<Witness>> {
        par::map(exec, powers.to_vec(), |n| {
            self.find_witness(Some(n), Exec::Sequential)
        })
    }
}

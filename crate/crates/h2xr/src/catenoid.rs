//! The one-parameter family of rotationally invariant minimal annuli.
//!
//! In the upper-half-space product model used throughout this crate, an
//! axially symmetric minimal annulus is determined by its waist parameter
//! κ > 0 through the first integral of the profile ODE:
//!
//! ```text
//!     κ² = (1 − r²)²/(4r²) + (r′/r)²,        r = r(t),  ′ = d/dt,
//! ```
//!
//! where `t` is the vertical coordinate and `r(t)` the Euclidean radius of
//! the horizontal circle at height `t` in the disk model. The profile has a
//! single neck at t = 0 with radius
//!
//! ```text
//!     r_min = √(1+κ²) − κ = 1/R₊,      R₊ = κ + √(1+κ²),
//! ```
//!
//! and reaches the ideal boundary r = 1 at heights t = ±h(κ). The map
//! κ ↦ h(κ) is strictly decreasing, with h → π/2 as κ → 0⁺ and h → 0 as
//! κ → ∞, so annuli exist exactly for half-heights in (0, π/2).
//!
//! # Numerics
//!
//! The radical Q(r) = κ² − (1−r²)²/(4r²) vanishes to first order at the
//! neck, which makes naive quadrature of dt = dr/(r√Q) singular and the
//! defining expression itself cancellation-prone near r_min. Both problems
//! are removed at once:
//!
//! * Q is evaluated in the exactly factored form
//!   `(r−r_min)(r+r_min)(R₊−r)(R₊+r)/(4r²)`, which has no subtractive
//!   cancellation anywhere on [r_min, 1];
//! * the substitution r = r_min + s² turns the height integral into
//!   `t(s) = ∫₀ˢ 4 dσ/√P(r_min+σ²)` with `P(r) = (r+r_min)(R₊−r)(R₊+r)`
//!   strictly positive on the whole range, so the integrand is analytic up
//!   to and including both endpoints.
//!
//! The constructor tabulates the cumulative integral on a fixed s-grid; all
//! later profile queries resolve a height or radius with one bisection into
//! the table plus a single 15-point Kronrod panel, giving near machine
//! accuracy at O(1) cost per query.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::num::quad;
use crate::num::rootfind;

/// Base panels of the cumulative height table. The integrand is analytic,
/// so a couple hundred K15 panels reach ~1e-14; the constructor retries at
/// 4× once if the accumulated estimate disagrees.
const TABLE_PANELS: usize = 256;

/// Waist parameters outside this range are rejected; far outside it the
/// profile collapses onto the ideal boundary (κ → 0) or the axis (κ → ∞)
/// and double precision has nothing left to resolve.
const KAPPA_RANGE: (f64, f64) = (1e-6, 1e6);

/// A rotationally invariant minimal annulus, pinned down by its waist
/// parameter and equipped with a precomputed height table.
#[derive(Debug, Clone)]
pub struct Catenoid {
    kappa: f64,
    r_min: f64,
    r_plus: f64,
    half_height: f64,
    /// s-grid of the cumulative table, s ∈ [0, √(1−r_min)].
    s_base: Vec<f64>,
    /// t(s_base[j]), strictly increasing, t_base.last() = h(κ).
    t_base: Vec<f64>,
}

/// Sampled symmetric profile on a uniform height grid t ∈ [−h, h].
#[derive(Debug, Clone)]
pub struct Profile {
    pub kappa: f64,
    /// Uniform grid, t[0] = −h, t[n−1] = +h.
    pub t: Vec<f64>,
    /// Radii r(t[i]); exactly mirror-symmetric by construction.
    pub r: Vec<f64>,
    /// Analytic derivative r′(t[i]) = sign(t)·r·√Q(r).
    pub r_prime: Vec<f64>,
}

impl Catenoid {
    /// Builds the annulus with waist parameter `kappa`.
    pub fn from_kappa(kappa: f64) -> Result<Self> {
        if !kappa.is_finite() || kappa < KAPPA_RANGE.0 || kappa > KAPPA_RANGE.1 {
            return Err(Error::Domain(format!(
                "waist parameter {kappa} outside supported range [{}, {}]",
                KAPPA_RANGE.0, KAPPA_RANGE.1
            )));
        }
        let r_plus = kappa + kappa.hypot(1.0);
        let r_min = 1.0 / r_plus;
        let s_max = (1.0 - r_min).sqrt();

        let mut panels = TABLE_PANELS;
        loop {
            let mut s_base = Vec::with_capacity(panels + 1);
            let mut t_base = Vec::with_capacity(panels + 1);
            s_base.push(0.0);
            t_base.push(0.0);
            let mut err_sum = 0.0;
            for j in 1..=panels {
                let s_lo = s_max * (j - 1) as f64 / panels as f64;
                let s_hi = s_max * j as f64 / panels as f64;
                let (dv, de) =
                    quad::kronrod15(&|s| height_integrand(r_min, r_plus, s), s_lo, s_hi);
                err_sum += de;
                s_base.push(s_hi);
                t_base.push(t_base[j - 1] + dv);
            }
            let half_height = t_base[panels];
            if err_sum <= 1e-12 * (1.0 + half_height) {
                return Ok(Catenoid {
                    kappa,
                    r_min,
                    r_plus,
                    half_height,
                    s_base,
                    t_base,
                });
            }
            if panels >= 4 * TABLE_PANELS {
                return Err(Error::Numerics {
                    context: "cumulative height table for the profile".into(),
                    achieved: err_sum,
                    required: 1e-12 * (1.0 + half_height),
                });
            }
            panels *= 4;
        }
    }

    /// Builds the annulus whose ideal boundary circles sit at heights ±h.
    ///
    /// Inverts the strictly decreasing map κ ↦ h(κ) by bracketing plus
    /// Brent; valid inputs are 0 < h < π/2.
    pub fn from_half_height(h: f64) -> Result<Self> {
        if !(h > 0.0 && h < FRAC_PI_2) {
            return Err(Error::Domain(format!(
                "half-height {h} outside (0, π/2): no such annulus exists"
            )));
        }
        let objective = |kappa: f64| half_height_of_kappa(kappa) - h;

        let mut lo = 1e-5;
        while objective(lo) < 0.0 {
            lo /= 10.0;
            if lo < KAPPA_RANGE.0 {
                return Err(Error::domain(
                    "half-height too close to π/2 to resolve the waist parameter",
                ));
            }
        }
        let mut hi = 1.0;
        while objective(hi) > 0.0 {
            hi *= 4.0;
            if hi > KAPPA_RANGE.1 {
                return Err(Error::domain(
                    "half-height too close to 0 to resolve the waist parameter",
                ));
            }
        }
        let kappa = rootfind::brent(objective, lo, hi, 1e-13, 200)?;
        Self::from_kappa(kappa)
    }

    #[must_use]
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Neck radius r_min = √(1+κ²) − κ, evaluated cancellation-free.
    #[must_use]
    pub fn neck_radius(&self) -> f64 {
        self.r_min
    }

    /// Outer root R₊ = 1/r_min of the factored radical (lies outside the disk).
    #[must_use]
    pub fn outer_root(&self) -> f64 {
        self.r_plus
    }

    /// h(κ): the annulus spans heights t ∈ [−h, h].
    #[must_use]
    pub fn half_height(&self) -> f64 {
        self.half_height
    }

    /// Q(r) = κ² − (1−r²)²/(4r²) in fully factored form; ≥ 0 on [r_min, 1].
    #[must_use]
    pub fn q_factor(&self, r: f64) -> f64 {
        (r - self.r_min).max(0.0) * (r + self.r_min) * (self.r_plus - r) * (self.r_plus + r)
            / (4.0 * r * r)
    }

    /// |dr/dt| expressed through the radius: r·√Q(r).
    #[must_use]
    pub fn r_prime_of_r(&self, r: f64) -> f64 {
        // r·√Q = √((r−r_min)(r+r_min)(R₊−r)(R₊+r))/2
        ((r - self.r_min).max(0.0) * (r + self.r_min) * (self.r_plus - r) * (self.r_plus + r))
            .sqrt()
            / 2.0
    }

    /// Radial slope du/dρ = 1/r′ of the upper height graph at the ideal
    /// boundary; equals 1/κ identically in the family.
    #[must_use]
    pub fn ideal_boundary_slope(&self) -> f64 {
        1.0 / self.kappa
    }

    /// t(ρ) ∈ [0, h] for ρ ∈ [r_min, 1]: the height at which the upper half
    /// of the profile passes through radius ρ.
    pub fn height_of_radius(&self, rho: f64) -> Result<f64> {
        if rho > 1.0 + 1e-12 || rho < self.r_min - 1e-12 {
            return Err(Error::Domain(format!(
                "radius {rho} outside the profile range [{}, 1]",
                self.r_min
            )));
        }
        let s = (rho - self.r_min).max(0.0).sqrt().min(self.s_max());
        Ok(self.height_of_s(s))
    }

    /// r(t) for |t| ≤ h; even in t.
    pub fn radius_of_height(&self, t: f64) -> Result<f64> {
        let tau = t.abs();
        if tau > self.half_height + 1e-12 {
            return Err(Error::Domain(format!(
                "height {t} outside the annulus range [−{0}, {0}]",
                self.half_height
            )));
        }
        let s = self.s_of_height(tau.min(self.half_height))?;
        Ok(self.r_min + s * s)
    }

    /// Samples the profile on `n ≥ 3` uniform heights spanning [−h, h].
    ///
    /// Mirror symmetry r(−t) = r(t) is enforced structurally: only the
    /// upper half is inverted and the lower half is copied, so downstream
    /// symmetry cancellations are exact.
    pub fn profile(&self, n: usize) -> Result<Profile> {
        if n < 3 {
            return Err(Error::domain("profile needs at least 3 nodes"));
        }
        let h = self.half_height;
        let mut t = vec![0.0; n];
        let mut r = vec![0.0; n];
        let mut r_prime = vec![0.0; n];
        for (i, ti) in t.iter_mut().enumerate() {
            *ti = -h + 2.0 * h * i as f64 / (n - 1) as f64;
        }
        // grid is symmetric under i ↔ n−1−i; resolve the upper half only
        for i in n / 2..n {
            let tau = t[i].max(0.0);
            let s = self.s_of_height(tau.min(h))?;
            r[i] = self.r_min + s * s;
            r_prime[i] = self.r_prime_of_r(r[i]);
            let j = n - 1 - i;
            r[j] = r[i];
            r_prime[j] = -r_prime[i];
        }
        if n % 2 == 1 {
            r_prime[n / 2] = 0.0;
        }
        Ok(Profile {
            kappa: self.kappa,
            t,
            r,
            r_prime,
        })
    }

    fn s_max(&self) -> f64 {
        *self.s_base.last().unwrap()
    }

    /// t(s) by table lookup plus one Kronrod panel from the nearest base
    /// point below.
    fn height_of_s(&self, s: f64) -> f64 {
        let j = match self
            .s_base
            .binary_search_by(|probe| probe.total_cmp(&s))
        {
            Ok(exact) => return self.t_base[exact],
            Err(upper) => upper - 1,
        };
        let (dv, _) =
            quad::kronrod15(&|x| height_integrand(self.r_min, self.r_plus, x), self.s_base[j], s);
        self.t_base[j] + dv
    }

    /// Inverse of `height_of_s` on [0, h].
    fn s_of_height(&self, tau: f64) -> Result<f64> {
        debug_assert!((0.0..=self.half_height).contains(&tau));
        let j = match self
            .t_base
            .binary_search_by(|probe| probe.total_cmp(&tau))
        {
            Ok(exact) => return Ok(self.s_base[exact]),
            Err(upper) => upper - 1,
        };
        let (a, b) = (self.s_base[j], self.s_base[j + 1]);
        rootfind::brent(|s| self.height_of_s(s) - tau, a, b, 1e-15, 120)
    }
}

impl Profile {
    /// Worst-case defect of the first integral over interior nodes, with
    /// r′ replaced by the centered difference of the stored radii.
    ///
    /// The analytic `r_prime` would satisfy the identity to round-off by
    /// construction; differencing the samples instead measures how well the
    /// *sampled* profile solves the ODE, an O(Δt²) quantity that must shrink
    /// by ≈4 per grid doubling.
    #[must_use]
    pub fn first_integral_residual(&self) -> f64 {
        let n = self.t.len();
        let k2 = self.kappa * self.kappa;
        let mut worst = 0.0_f64;
        for i in 1..n - 1 {
            let rp = (self.r[i + 1] - self.r[i - 1]) / (self.t[i + 1] - self.t[i - 1]);
            let r = self.r[i];
            let one_minus = 1.0 - r * r;
            let lhs = one_minus * one_minus / (4.0 * r * r) + (rp / r) * (rp / r);
            worst = worst.max((lhs - k2).abs());
        }
        worst
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.t.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// 4/√P(r_min + s²) with P(r) = (r+r_min)(R₊−r)(R₊+r); analytic in s on
/// the closed range of the substitution.
fn height_integrand(r_min: f64, r_plus: f64, s: f64) -> f64 {
    let r = r_min + s * s;
    let p = (r + r_min) * (r_plus - r) * (r_plus + r);
    4.0 / p.sqrt()
}

/// h(κ) by one adaptive pass (no table); used by the κ ↦ h inversion.
fn half_height_of_kappa(kappa: f64) -> f64 {
    let r_plus = kappa + kappa.hypot(1.0);
    let r_min = 1.0 / r_plus;
    let s_max = (1.0 - r_min).sqrt();
    quad::adaptive(
        |s| height_integrand(r_min, r_plus, s),
        0.0,
        s_max,
        1e-13,
        1e-13,
    )
    .expect("height integrand is analytic on a finite interval")
    .value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neck_radius_closed_form() {
        let cat = Catenoid::from_kappa(0.75).unwrap();
        assert_eq!(cat.neck_radius(), 0.5); // √(1+9/16) = 5/4 exactly
        assert_eq!(cat.outer_root(), 2.0);
        for &kappa in &[0.3, 1.0, 3.0, 40.0] {
            let cat = Catenoid::from_kappa(kappa).unwrap();
            let expected = (1.0 + kappa * kappa).sqrt() - kappa;
            assert!((cat.neck_radius() - expected).abs() < 1e-12 * (1.0 + expected));
            // r_min = 1/R₊ up to the one rounding in the division
            assert!((cat.neck_radius() * cat.outer_root() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn factored_radical_matches_defining_expression() {
        // dual route: product form vs the subtractive definition, away from
        // the neck where the latter is well-conditioned
        let cat = Catenoid::from_kappa(1.3).unwrap();
        let k2 = 1.3 * 1.3;
        for i in 0..200 {
            let r = cat.neck_radius() + (1.0 - cat.neck_radius()) * (i as f64 + 0.5) / 200.0;
            let direct = k2 - (1.0 - r * r) * (1.0 - r * r) / (4.0 * r * r);
            assert!(
                (cat.q_factor(r) - direct).abs() <= 1e-12 * (1.0 + k2),
                "Q mismatch at r = {r}"
            );
        }
    }

    #[test]
    fn height_table_endpoints() {
        let cat = Catenoid::from_kappa(0.6).unwrap();
        assert_eq!(cat.height_of_radius(cat.neck_radius()).unwrap(), 0.0);
        let top = cat.height_of_radius(1.0).unwrap();
        assert!((top - cat.half_height()).abs() < 1e-13);
        assert!(cat.height_of_radius(1.1).is_err());
        assert!(cat.radius_of_height(cat.half_height() * 1.5).is_err());
    }

    #[test]
    fn radius_and_height_are_inverse_maps() {
        let cat = Catenoid::from_kappa(0.9).unwrap();
        for i in 0..=40 {
            let t = cat.half_height() * i as f64 / 40.0;
            let r = cat.radius_of_height(t).unwrap();
            let back = cat.height_of_radius(r).unwrap();
            assert!((back - t).abs() < 1e-11, "round trip failed at t = {t}");
            // even extension
            let r_neg = cat.radius_of_height(-t).unwrap();
            assert_eq!(r, r_neg);
        }
    }

    #[test]
    fn half_height_is_strictly_decreasing_with_known_limits() {
        let kappas = [0.01, 0.05, 0.2, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0];
        let mut prev = FRAC_PI_2;
        for &kappa in &kappas {
            let h = Catenoid::from_kappa(kappa).unwrap().half_height();
            assert!(h < prev, "h(κ) failed to decrease at κ = {kappa}");
            assert!(h > 0.0);
            prev = h;
        }
        // large-κ tail: h ≈ ln(2κ)/κ
        assert!(Catenoid::from_kappa(0.001).unwrap().half_height() > FRAC_PI_2 - 0.02);
        assert!(Catenoid::from_kappa(200.0).unwrap().half_height() < 0.035);
    }

    #[test]
    fn waist_from_half_height_round_trips() {
        for &kappa in &[0.3, 0.75, 1.0, 3.0] {
            let h = Catenoid::from_kappa(kappa).unwrap().half_height();
            let back = Catenoid::from_half_height(h).unwrap();
            assert!(
                (back.kappa() - kappa).abs() < 1e-9 * (1.0 + kappa),
                "κ = {kappa} came back as {}",
                back.kappa()
            );
        }
        assert!(Catenoid::from_half_height(FRAC_PI_2).is_err());
        assert!(Catenoid::from_half_height(0.0).is_err());
        assert!(Catenoid::from_half_height(2.0).is_err());
    }

    #[test]
    fn profile_is_symmetric_and_anchored() {
        let cat = Catenoid::from_kappa(1.0).unwrap();
        for &n in &[64usize, 65] {
            let p = cat.profile(n).unwrap();
            assert!((p.r[0] - 1.0).abs() < 1e-12);
            assert!((p.r[n - 1] - 1.0).abs() < 1e-12);
            for i in 0..n {
                assert_eq!(p.r[i], p.r[n - 1 - i]);
                assert_eq!(p.r_prime[i], -p.r_prime[n - 1 - i]);
            }
            let min = p.r.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(min >= cat.neck_radius() - 1e-12);
            if n % 2 == 1 {
                // odd grids put a node exactly on the neck
                assert!((min - cat.neck_radius()).abs() < 1e-14);
            } else {
                // even grids miss it by O(Δt²)
                assert!(min - cat.neck_radius() < 1e-3);
            }
            // boundary slope of the profile is ±κ
            assert!((p.r_prime[n - 1] - 1.0).abs() < 1e-12); // r√Q at r=1 is κ; κ=1 here
        }
    }

    #[test]
    fn first_integral_residual_shrinks_quadratically() {
        let cat = Catenoid::from_kappa(0.8).unwrap();
        let coarse = cat.profile(256).unwrap().first_integral_residual();
        let fine = cat.profile(512).unwrap().first_integral_residual();
        assert!(coarse < 1e-3);
        assert!(fine < coarse / 3.0, "coarse {coarse}, fine {fine}");
    }
}

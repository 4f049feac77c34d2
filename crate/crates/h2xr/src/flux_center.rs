//! Flux invariants of annulus ends and the center map of the bottom end.
//!
//! For an annulus with two horizontal ends, write each end as a graph near
//! the ideal boundary and sample the radial and angular derivatives of the
//! height on the ideal circle. Pairing the conormal with a Killing field
//! and letting the loop drift to the ideal boundary gives one number per
//! field and end:
//!
//! ```text
//!     vertical  (E₃):  ± ∫ u±_r dθ
//!     rotational (Z):  ∓ ∫ u±_r u±_θ dθ
//!     dilational (H_a): ± ∫ u±_r u±_θ sin(θ−a) dθ
//! ```
//!
//! (upper sign: top end). Flux is a homology invariant, so the top and
//! bottom values of each family must agree; the conservation residuals
//! below measure the defect and are the cheapest smoke test a computed
//! annulus must pass. For the rotationally invariant annulus of waist κ
//! the vertical flux is 2π/κ and the other two families vanish.
//!
//! The *center* of the bottom end weighs the defect w = u⁻_r − v⁻_r
//! between the annulus and the minimal disk v spanning the same bottom
//! curve: with moments f₀ = ∫w, f₁+if₂ = ∫e^{iθ}w the center is
//! (f₁+if₂)/f₀, and membership of the configuration requires w < 0
//! pointwise, which forces the center into the open unit disk. For an
//! axis-translated rotationally invariant annulus the defect is an exact
//! Poisson kernel and the center recovers the axis position.

use serde::{Deserialize, Serialize};

use crate::catenoid::Catenoid;
use crate::curve::BoundaryCurve;
use crate::error::{Error, Result};
use crate::geometry::{apply_dilation, DiskPoint};
use crate::num::fourier::periodic_integral;

/// Which ideal boundary circle an end limits to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum End {
    Top,
    Bottom,
}

impl End {
    fn sign(self) -> f64 {
        match self {
            End::Top => 1.0,
            End::Bottom => -1.0,
        }
    }
}

/// Boundary derivatives of one end's height graph, sampled at
/// θ_j = 2πj/N on the ideal circle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EndTrace {
    pub end: End,
    pub u_r: Vec<f64>,
    pub u_theta: Vec<f64>,
}

impl EndTrace {
    pub fn new(end: End, u_r: Vec<f64>, u_theta: Vec<f64>) -> Result<Self> {
        if u_r.len() != u_theta.len() {
            return Err(Error::domain("trace component lengths differ"));
        }
        if u_r.len() < 8 {
            return Err(Error::domain("trace needs at least 8 angular samples"));
        }
        Ok(EndTrace { end, u_r, u_theta })
    }

    /// Builds a trace from radial-derivative samples plus the boundary
    /// curve itself: on the ideal circle u(1,θ) = γ(θ), so u_θ = γ′.
    pub fn with_boundary_curve(end: End, u_r: Vec<f64>, gamma: &BoundaryCurve) -> Result<Self> {
        let n = u_r.len();
        Self::new(end, u_r, gamma.derivative().sample(n))
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.u_r.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.u_r.is_empty()
    }
}

/// ± ∫ u_r dθ.
#[must_use]
pub fn flux_vertical(trace: &EndTrace) -> f64 {
    trace.end.sign() * periodic_integral(&trace.u_r)
}

/// ∓ ∫ u_r u_θ dθ.
#[must_use]
pub fn flux_rotational(trace: &EndTrace) -> f64 {
    let prod: Vec<f64> = trace
        .u_r
        .iter()
        .zip(&trace.u_theta)
        .map(|(a, b)| a * b)
        .collect();
    -trace.end.sign() * periodic_integral(&prod)
}

/// ± ∫ u_r u_θ sin(θ−a) dθ.
#[must_use]
pub fn flux_dilational(trace: &EndTrace, a: f64) -> f64 {
    let (s, c) = dilational_components(trace);
    // sin(θ−a) = sinθ·cos a − cosθ·sin a
    s * a.cos() - c * a.sin()
}

/// Signed moments (±∫u_ru_θ sinθ, ±∫u_ru_θ cosθ); the dilational flux at
/// angle a is their combination s·cos a − c·sin a.
fn dilational_components(trace: &EndTrace) -> (f64, f64) {
    let n = trace.len();
    let mut with_sin = Vec::with_capacity(n);
    let mut with_cos = Vec::with_capacity(n);
    for (j, (ur, ut)) in trace.u_r.iter().zip(&trace.u_theta).enumerate() {
        let theta = std::f64::consts::TAU * j as f64 / n as f64;
        with_sin.push(ur * ut * theta.sin());
        with_cos.push(ur * ut * theta.cos());
    }
    (
        trace.end.sign() * periodic_integral(&with_sin),
        trace.end.sign() * periodic_integral(&with_cos),
    )
}

/// How far a top/bottom trace pair is from flux conservation, per family.
/// The dilational entry is the maximum defect over all dilation angles.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConservationResiduals {
    pub vertical: f64,
    pub rotational: f64,
    pub dilational: f64,
}

impl ConservationResiduals {
    #[must_use]
    pub fn max(&self) -> f64 {
        self.vertical.max(self.rotational).max(self.dilational)
    }
}

pub fn conservation_residuals(top: &EndTrace, bottom: &EndTrace) -> Result<ConservationResiduals> {
    if top.end != End::Top || bottom.end != End::Bottom {
        return Err(Error::domain("conservation needs one top and one bottom trace"));
    }
    let (ts, tc) = dilational_components(top);
    let (bs, bc) = dilational_components(bottom);
    Ok(ConservationResiduals {
        vertical: (flux_vertical(top) - flux_vertical(bottom)).abs(),
        rotational: (flux_rotational(top) - flux_rotational(bottom)).abs(),
        dilational: (ts - bs).hypot(tc - bc),
    })
}

/// Exact end traces of the rotationally invariant annulus: u±_r ≡ ±1/κ,
/// u±_θ ≡ 0.
#[must_use]
pub fn catenoid_end_traces(cat: &Catenoid, n: usize) -> (EndTrace, EndTrace) {
    let slope = cat.ideal_boundary_slope();
    (
        EndTrace {
            end: End::Top,
            u_r: vec![slope; n],
            u_theta: vec![0.0; n],
        },
        EndTrace {
            end: End::Bottom,
            u_r: vec![-slope; n],
            u_theta: vec![0.0; n],
        },
    )
}

/// Vertical flux of the upper catenoid half through the circle of radius
/// ρ ∈ (r_min, 1): ∫ r·u_r/√(1+F|∇u|²) dθ, with u_r recovered from the
/// height table by finite differences rather than from the closed form —
/// constancy across radii therefore cross-checks table, metric factor, and
/// flux formula at once. The exact value is 2π/κ at every radius.
pub fn finite_radius_vertical_flux(cat: &Catenoid, rho: f64) -> Result<f64> {
    if rho <= cat.neck_radius() || rho > 1.0 {
        return Err(Error::Domain(format!(
            "flux radius {rho} outside (r_min, 1] = ({}, 1]",
            cat.neck_radius()
        )));
    }
    let u_r = if rho >= 1.0 - 1e-9 {
        // one-sided second-order stencil at the ideal boundary
        let d = 1e-4;
        let h = cat.half_height();
        (3.0 * h - 4.0 * cat.height_of_radius(1.0 - d)? + cat.height_of_radius(1.0 - 2.0 * d)?)
            / (2.0 * d)
    } else {
        let d = 1e-6 * (1.0 - cat.neck_radius());
        (cat.height_of_radius(rho + d)? - cat.height_of_radius(rho - d)?) / (2.0 * d)
    };
    let f = crate::geometry::metric_f(rho);
    let integrand = rho * u_r / (1.0 + f * u_r * u_r).sqrt();
    Ok(std::f64::consts::TAU * integrand)
}

/// Moments and center of a bottom-end defect w = u⁻_r − v⁻_r.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CenterInvariants {
    /// f₀ = ∫ w dθ (negative on membership-passing configurations).
    pub f0: f64,
    /// (f₁, f₂) = ∫ (cosθ, sinθ) w dθ.
    pub f1: f64,
    pub f2: f64,
    /// g₀ = f₀ − 1/f₀, the proper height coordinate of the extended data.
    pub g0: f64,
    /// (f₁/f₀, f₂/f₀); inside the unit disk whenever w < 0 pointwise.
    pub center: (f64, f64),
}

/// True iff the defect is strictly negative at every sample — the
/// computable membership condition for the extended boundary data.
#[must_use]
pub fn membership(defect: &[f64]) -> bool {
    !defect.is_empty() && defect.iter().all(|&w| w < 0.0)
}

/// Center map of a sampled bottom-end defect.
pub fn center_invariants(defect: &[f64]) -> Result<CenterInvariants> {
    if defect.len() < 8 {
        return Err(Error::domain("center map needs at least 8 angular samples"));
    }
    let n = defect.len();
    let f0 = periodic_integral(defect);
    if f0 == 0.0 {
        return Err(Error::domain("defect has zero mean: center undefined"));
    }
    let mut wc = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for (j, &w) in defect.iter().enumerate() {
        let theta = std::f64::consts::TAU * j as f64 / n as f64;
        wc.push(theta.cos() * w);
        ws.push(theta.sin() * w);
    }
    let f1 = periodic_integral(&wc);
    let f2 = periodic_integral(&ws);
    Ok(CenterInvariants {
        f0,
        f1,
        f2,
        g0: f0 - 1.0 / f0,
        center: (f1 / f0, f2 / f0),
    })
}

/// Bottom-end defect of the axis-translated rotationally invariant
/// annulus T_{z0}(C_h), sampled at `n` angles.
///
/// The translated bottom end is the graph u⁻(p) = −t̃(|T_{−z0}(p)|) with
/// t̃ the height table; its comparison disk for the constant bottom curve
/// is the horizontal disk, so v⁻_r ≡ 0 and the defect is u⁻_r itself. The
/// radial derivative is taken by a one-sided second-order stencil *through
/// the Möbius pullback*, not from the closed-form kernel, so this function
/// exercises the entire geometric pipeline. Closed form for reference:
/// u⁻_r(1,θ) = −(1/κ)·(1−|z0|²)/|e^{iθ}−z0|².
pub fn translated_catenoid_bottom_defect(
    cat: &Catenoid,
    z0: &DiskPoint,
    n: usize,
) -> Result<Vec<f64>> {
    if n < 8 {
        return Err(Error::domain("need at least 8 angular samples"));
    }
    if z0.abs() > 0.95 {
        return Err(Error::domain(
            "axis position too close to the ideal boundary for stable pullback",
        ));
    }
    let minus_z0 = DiskPoint::new(-z0.x, -z0.y).expect("interior point");
    let h = cat.half_height();
    let d = 1e-3;
    let mut defect = Vec::with_capacity(n);
    for j in 0..n {
        let theta = std::f64::consts::TAU * j as f64 / n as f64;
        // u(r_k, θ) at r ∈ {1, 1−d, 1−2d}; at r = 1 the pullback radius is
        // exactly 1 and the height is exactly −h
        let mut heights = [-h, 0.0, 0.0];
        for (k, slot) in heights.iter_mut().enumerate().skip(1) {
            let r = 1.0 - d * k as f64;
            let p = DiskPoint::from_polar(r, theta)?;
            let pulled = apply_dilation(&minus_z0, &p)?;
            *slot = -cat.height_of_radius(pulled.abs().min(1.0))?;
        }
        defect.push((3.0 * heights[0] - 4.0 * heights[1] + heights[2]) / (2.0 * d));
    }
    Ok(defect)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kappa_traces(kappa: f64, n: usize) -> (EndTrace, EndTrace) {
        let cat = Catenoid::from_kappa(kappa).unwrap();
        catenoid_end_traces(&cat, n)
    }

    #[test]
    fn catenoid_fluxes_match_closed_forms() {
        let kappa = 0.8;
        let (top, bottom) = kappa_traces(kappa, 64);
        let expected = std::f64::consts::TAU / kappa;
        assert!((flux_vertical(&top) - expected).abs() < 1e-12);
        assert!((flux_vertical(&bottom) - expected).abs() < 1e-12);
        assert!(flux_rotational(&top).abs() < 1e-14);
        assert!(flux_dilational(&bottom, 1.3).abs() < 1e-14);
    }

    #[test]
    fn conservation_vanishes_on_exact_traces_and_flags_corruption() {
        let (top, mut bottom) = kappa_traces(1.25, 128);
        let clean = conservation_residuals(&top, &bottom).unwrap();
        assert!(clean.max() < 1e-13, "clean residual {}", clean.max());

        for v in &mut bottom.u_r {
            *v *= 1.01;
        }
        let dirty = conservation_residuals(&top, &bottom).unwrap();
        let expected = 0.01 * std::f64::consts::TAU / 1.25;
        assert!(
            (dirty.vertical - expected).abs() < 1e-10,
            "corruption went undetected: {}",
            dirty.vertical
        );
    }

    #[test]
    fn finite_radius_flux_is_invariant() {
        let cat = Catenoid::from_kappa(0.6).unwrap();
        let expected = std::f64::consts::TAU / 0.6;
        let r_min = cat.neck_radius();
        for frac in [0.15, 0.35, 0.55, 0.75, 0.999999] {
            let rho = r_min + frac * (1.0 - r_min);
            let flux = finite_radius_vertical_flux(&cat, rho).unwrap();
            assert!(
                (flux - expected).abs() < 1e-6,
                "flux at ρ = {rho}: {flux} vs {expected}"
            );
        }
    }

    #[test]
    fn pullback_defect_matches_poisson_kernel() {
        let cat = Catenoid::from_kappa(1.0).unwrap();
        let z0 = DiskPoint::new(0.3, -0.2).unwrap();
        let n = 64;
        let defect = translated_catenoid_bottom_defect(&cat, &z0, n).unwrap();
        for (j, &w) in defect.iter().enumerate() {
            let theta = std::f64::consts::TAU * j as f64 / n as f64;
            let den = (theta.cos() - z0.x).powi(2) + (theta.sin() - z0.y).powi(2);
            let kernel = (1.0 - z0.abs() * z0.abs()) / den;
            let closed = -kernel / cat.kappa();
            assert!(
                (w - closed).abs() < 1e-5,
                "θ = {theta}: pullback {w} vs kernel {closed}"
            );
        }
        assert!(membership(&defect));
    }

    #[test]
    fn center_recovers_the_axis() {
        let cat = Catenoid::from_kappa(0.75).unwrap();
        for (x, y) in [(0.0, 0.0), (0.3, 0.0), (0.25, 0.4330127018922193)] {
            let z0 = DiskPoint::new(x, y).unwrap();
            let defect = translated_catenoid_bottom_defect(&cat, &z0, 128).unwrap();
            let inv = center_invariants(&defect).unwrap();
            assert!(inv.f0 < 0.0);
            let err = (inv.center.0 - x).hypot(inv.center.1 - y);
            assert!(err < 1e-4, "center of z0 = ({x}, {y}) off by {err}");
            assert!(inv.center.0.hypot(inv.center.1) < 1.0);
        }
    }

    #[test]
    fn center_is_rotation_equivariant() {
        // rotating the configuration rotates the center: compare the center
        // of z0 and of e^{iζ}z0 computed through the full pullback
        let cat = Catenoid::from_kappa(1.0).unwrap();
        let zeta = 0.7_f64;
        let z0 = DiskPoint::new(0.35, 0.1).unwrap();
        let rotated = DiskPoint::new(
            z0.x * zeta.cos() - z0.y * zeta.sin(),
            z0.x * zeta.sin() + z0.y * zeta.cos(),
        )
        .unwrap();
        let c1 = center_invariants(&translated_catenoid_bottom_defect(&cat, &z0, 256).unwrap())
            .unwrap()
            .center;
        let c2 =
            center_invariants(&translated_catenoid_bottom_defect(&cat, &rotated, 256).unwrap())
                .unwrap()
                .center;
        let expected = (
            c1.0 * zeta.cos() - c1.1 * zeta.sin(),
            c1.0 * zeta.sin() + c1.1 * zeta.cos(),
        );
        let err = (c2.0 - expected.0).hypot(c2.1 - expected.1);
        assert!(err < 1e-10, "equivariance defect {err}");
    }

    #[test]
    fn membership_rejects_touching_defects() {
        assert!(membership(&[-1.0, -0.5, -2.0, -0.1, -1.0, -1.0, -1.0, -1.0]));
        assert!(!membership(&[-1.0, 0.0, -2.0, -0.1, -1.0, -1.0, -1.0, -1.0]));
        assert!(!membership(&[]));
    }
}

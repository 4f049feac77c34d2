//! Computable nonexistence gates for boundary curve pairs.
//!
//! Whether a pair of height functions (γ⁺, γ⁻) on the two ideal boundary
//! circles bounds a properly embedded minimal annulus is undecidable by any
//! known finite procedure, but several obstructions are checkable:
//!
//! - **crossing** — if the gap γ⁺ − γ⁻ is not everywhere positive, the pair
//!   lies outside the configuration space entirely;
//! - **gap** — if the gap exceeds π at every angle, no properly embedded
//!   minimal annulus spans the pair (π is the supremum of achievable
//!   heights: catenoids exhaust (0, π), and the limiting objects of the
//!   family are vertical planes of height exactly π);
//! - **tilt** — if, after a rotation, γ⁺ is non-increasing on [0, π] and
//!   non-decreasing on [π, 2π] while γ⁻ does the opposite (the circles are
//!   tilted away from each other), and the pair is not a pair of constants,
//!   no embedded minimal annulus spans it; the same argument excludes
//!   Alexandrov-embedded solutions.
//!
//! None of the converses hold, so a pair that passes every gate earns only
//! `GatePassed`, not a fillability claim — except in two constructive cases
//! the report can certify: constant pairs with gap below π are spanned by a
//! catenoid, and pairs invariant under a rotation of order m ≥ 2 with gap
//! everywhere below π are known to be fillable.
//!
//! The report also classifies the pair by the winding number of its
//! derivative curve θ ↦ ((γ⁺)′(θ), (γ⁻)′(θ)) about the origin whenever that
//! curve avoids the origin; the winding class is a deformation invariant of
//! the boundary data that stratifies the configuration space.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curve::CurvePair;

/// Largest rotation order probed by [`symmetry_detect`] by default.
pub const DEFAULT_SYMMETRY_MAX: usize = 64;

/// Sampling tolerance for the non-strict monotonicity of the tilt gate.
const MONOTONE_TOL: f64 = 1e-10;

/// Minimum/maximum of the gap γ⁺ − γ⁻ over a sampling grid.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GapSummary {
    pub min: f64,
    pub max: f64,
    /// Angle attaining the minimum.
    pub theta_min: f64,
    /// Angle attaining the maximum.
    pub theta_max: f64,
}

impl GapSummary {
    /// True when the whole gap sits strictly below π (the regime where the
    /// constructive existence results live).
    pub fn below_pi(&self) -> bool {
        self.max < PI
    }

    /// True when min ≤ π ≤ max: no gate applies either way.
    pub fn straddles_pi(&self) -> bool {
        self.min <= PI && self.max >= PI
    }
}

/// Outcome of the gates, with the witness that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// The gap fails to be positive: the pair is outside the configuration
    /// space of disjoint graphical boundaries.
    CrossingPair { theta: f64, gap: f64 },
    /// gap > π everywhere: no properly embedded minimal annulus exists.
    NotFillableGap { theta: f64, min_gap: f64 },
    /// Monotone tilt away from each other after rotating by `shift`.
    NotFillableTilt { shift: f64 },
    /// No obstruction fires. For constant pairs with gap 2h < π the catenoid
    /// of half-height h spans the pair and is recorded as the witness.
    GatePassed { catenoid_half_height: Option<f64> },
}

/// Winding class of the derivative curve, with its distance to the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingClass {
    pub winding: i64,
    /// Minimum distance of the derivative curve to the origin; perturbations
    /// below this margin cannot change the class.
    pub margin: f64,
}

/// Largest detected rotational symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    /// Largest m ≤ `max_checked` with both curves invariant under θ ↦ θ+2π/m.
    pub order: usize,
    pub max_checked: usize,
}

/// Full gate evaluation: one verdict plus classification diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub verdict: Verdict,
    pub gap: GapSummary,
    pub winding: Option<WindingClass>,
    pub symmetry: SymmetryReport,
    /// Human-readable annotations (inconclusive bands, fillability notes).
    pub notes: Vec<String>,
}

/// Grid size used for sampling checks: enough to resolve every harmonic.
fn sample_count(pair: &CurvePair) -> usize {
    let k = pair.upper.max_k().max(pair.lower.max_k());
    (16 * (k + 1)).max(256).next_power_of_two()
}

/// Samples the gap on `n` equispaced angles.
pub fn gap_summary(pair: &CurvePair, n: usize) -> GapSummary {
    let up = pair.upper.sample(n);
    let lo = pair.lower.sample(n);
    let mut s = GapSummary {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        theta_min: 0.0,
        theta_max: 0.0,
    };
    for (j, (u, l)) in up.iter().zip(&lo).enumerate() {
        let g = u - l;
        let theta = 2.0 * PI * j as f64 / n as f64;
        if g < s.min {
            s.min = g;
            s.theta_min = theta;
        }
        if g > s.max {
            s.max = g;
            s.theta_max = theta;
        }
    }
    s
}

/// The crossing and gap-π gates. `None` means neither fires.
pub fn gap_check(pair: &CurvePair) -> Option<Verdict> {
    let s = gap_summary(pair, sample_count(pair));
    if s.min <= 0.0 {
        Some(Verdict::CrossingPair {
            theta: s.theta_min,
            gap: s.min,
        })
    } else if s.min > PI {
        Some(Verdict::NotFillableGap {
            theta: s.theta_min,
            min_gap: s.min,
        })
    } else {
        None
    }
}

/// True when `v` is non-increasing on the first half of the period and
/// non-decreasing on the second, both up to `MONOTONE_TOL`, reading the
/// samples cyclically from `shift`.
fn monotone_away(v: &[f64], shift: usize, flip: bool) -> bool {
    let n = v.len();
    let half = n / 2;
    let sgn = if flip { -1.0 } else { 1.0 };
    for j in 0..n {
        let a = sgn * v[(j + shift) % n];
        let b = sgn * v[(j + 1 + shift) % n];
        let ok = if j < half {
            b <= a + MONOTONE_TOL
        } else {
            b >= a - MONOTONE_TOL
        };
        if !ok {
            return false;
        }
    }
    true
}

/// The tilt gate: scans `phase_grid` rotations for the monotone-away
/// pattern. Constant pairs are exempt (they are spanned by catenoids).
pub fn tilt_monotonicity_check(pair: &CurvePair, phase_grid: usize) -> Option<Verdict> {
    if pair.upper.is_constant(MONOTONE_TOL) && pair.lower.is_constant(MONOTONE_TOL) {
        return None;
    }
    let n = phase_grid.max(8) & !1; // even
    let up = pair.upper.sample(n);
    let lo = pair.lower.sample(n);
    (0..n)
        .find(|&s| monotone_away(&up, s, false) && monotone_away(&lo, s, true))
        .map(|s| Verdict::NotFillableTilt {
            shift: 2.0 * PI * s as f64 / n as f64,
        })
}

/// Winding classification of the derivative curve θ ↦ ((γ⁺)′, (γ⁻)′).
///
/// Returns `None` when the curve meets (or sampling cannot separate it
/// from) the origin — constant pairs in particular. The winding number is
/// accumulated from wrapped turning increments, which is exact once the
/// grid resolves every harmonic.
pub fn admissibility(pair: &CurvePair) -> Option<WindingClass> {
    let n = sample_count(pair);
    let dx = pair.upper.derivative().sample(n);
    let dy = pair.lower.derivative().sample(n);
    let mut margin = f64::INFINITY;
    let mut scale = 0.0f64;
    for (x, y) in dx.iter().zip(&dy) {
        let r = x.hypot(*y);
        margin = margin.min(r);
        scale = scale.max(r);
    }
    if !(margin > 1e-8 * (1.0 + scale)) {
        return None;
    }
    let mut total = 0.0;
    for j in 0..n {
        let k = (j + 1) % n;
        let a0 = dy[j].atan2(dx[j]);
        let a1 = dy[k].atan2(dx[k]);
        let mut d = a1 - a0;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d <= -PI {
            d += 2.0 * PI;
        }
        total += d;
    }
    Some(WindingClass {
        winding: (total / (2.0 * PI)).round() as i64,
        margin,
    })
}

/// Largest m ≤ `max_order` with both curves invariant under θ ↦ θ + 2π/m,
/// i.e. with all Fourier coefficients off mℤ below `tol` in l² mass.
pub fn symmetry_detect(pair: &CurvePair, tol: f64, max_order: usize) -> SymmetryReport {
    for m in (2..=max_order.max(1)).rev() {
        if pair.upper.off_symmetry_mass(m) <= tol && pair.lower.off_symmetry_mass(m) <= tol {
            return SymmetryReport {
                order: m,
                max_checked: max_order,
            };
        }
    }
    SymmetryReport {
        order: 1,
        max_checked: max_order,
    }
}

/// Runs every gate in precedence order and assembles the report.
///
/// Precedence: crossing > gap > tilt > passed. The diagnostics (gap summary,
/// winding, symmetry) are attached regardless of the verdict.
pub fn evaluate(pair: &CurvePair) -> ObstructionReport {
    let n = sample_count(pair);
    let gap = gap_summary(pair, n);
    let winding = admissibility(pair);
    let symmetry = symmetry_detect(pair, 1e-10, DEFAULT_SYMMETRY_MAX);
    let mut notes = Vec::new();

    let verdict = if gap.min <= 0.0 {
        Verdict::CrossingPair {
            theta: gap.theta_min,
            gap: gap.min,
        }
    } else if gap.min > PI {
        Verdict::NotFillableGap {
            theta: gap.theta_min,
            min_gap: gap.min,
        }
    } else if let Some(v) = tilt_monotonicity_check(pair, n) {
        notes.push(
            "the tilt obstruction also excludes Alexandrov-embedded annuli".to_string(),
        );
        v
    } else {
        if gap.straddles_pi() {
            notes.push(
                "gap straddles π: no nonexistence gate applies and no existence result \
                 covers the pair"
                    .to_string(),
            );
        }
        let catenoid_half_height = if pair.upper.is_constant(1e-12)
            && pair.lower.is_constant(1e-12)
            && gap.max < PI
        {
            Some(0.5 * (pair.upper.mean() - pair.lower.mean()))
        } else {
            None
        };
        Verdict::GatePassed {
            catenoid_half_height,
        }
    };

    if symmetry.order >= 2
        && gap.min > 0.0
        && gap.below_pi()
        && matches!(verdict, Verdict::GatePassed { .. })
    {
        notes.push(format!(
            "invariant under rotation of order {} with gap below π: minimally fillable",
            symmetry.order
        ));
    }

    ObstructionReport {
        verdict,
        gap,
        winding,
        symmetry,
        notes,
    }
}

//! Boundary data: 2π-periodic height functions on the two ideal boundary
//! circles, stored as real trigonometric polynomials.
//!
//! External tools exchange curves as a list of Fourier terms
//! `{ "k": 2, "a_k": 0.1, "b_k": 0.0 }`; internally everything is a
//! [`TrigSeries`] so evaluation, differentiation and rotation stay exact on
//! the coefficient level.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::fourier::{self, TrigSeries};

/// One Fourier term a_k·cos(kθ) + b_k·sin(kθ) of a boundary curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub k: usize,
    #[serde(rename = "a_k", default)]
    pub a: f64,
    #[serde(rename = "b_k", default)]
    pub b: f64,
}

/// Height function on one ideal boundary circle.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    series: TrigSeries,
}

impl BoundaryCurve {
    #[must_use]
    pub fn constant(c: f64) -> Self {
        let mut series = TrigSeries::zero(0);
        series.a[0] = c;
        BoundaryCurve { series }
    }

    /// Builds from an explicit term list. Term order is free; `k` may not
    /// repeat; a `b_0` entry is rejected since sin(0·θ) ≡ 0.
    pub fn from_terms(terms: &[FourierTerm]) -> Result<Self> {
        let max_k = terms.iter().map(|t| t.k).max().unwrap_or(0);
        let mut series = TrigSeries::zero(max_k);
        let mut seen = vec![false; max_k + 1];
        for t in terms {
            if seen[t.k] {
                return Err(Error::Domain(format!("duplicate Fourier index k = {}", t.k)));
            }
            seen[t.k] = true;
            if t.k == 0 {
                if t.b != 0.0 {
                    return Err(Error::domain("b_0 is meaningless: sin(0) vanishes"));
                }
                series.a[0] = t.a;
            } else {
                series.a[t.k] = t.a;
                series.b[t.k] = t.b;
            }
        }
        Ok(BoundaryCurve { series })
    }

    /// Least-squares-exact interpolation of equispaced samples
    /// (θ_j = 2πj/N).
    #[must_use]
    pub fn from_samples(samples: &[f64]) -> Self {
        BoundaryCurve {
            series: fourier::analyze(samples),
        }
    }

    #[must_use]
    pub fn from_series(series: TrigSeries) -> Self {
        BoundaryCurve { series }
    }

    #[must_use]
    pub fn eval(&self, theta: f64) -> f64 {
        self.series.eval(theta)
    }

    /// dγ/dθ, again a trigonometric polynomial.
    #[must_use]
    pub fn derivative(&self) -> BoundaryCurve {
        BoundaryCurve {
            series: self.series.derivative(),
        }
    }

    /// γ(θ − ζ): the curve seen after rotating the surface by ζ.
    #[must_use]
    pub fn rotate(&self, zeta: f64) -> BoundaryCurve {
        BoundaryCurve {
            series: self.series.rotate(zeta),
        }
    }

    /// Equispaced samples γ(2πj/n), j = 0..n.
    #[must_use]
    pub fn sample(&self, n: usize) -> Vec<f64> {
        fourier::synthesize(&self.series, n)
    }

    #[must_use]
    pub fn series(&self) -> &TrigSeries {
        &self.series
    }

    #[must_use]
    pub fn max_k(&self) -> usize {
        self.series.max_k()
    }

    #[must_use]
    pub fn mean(&self) -> f64 {
        self.series.a[0]
    }

    /// Largest coefficient magnitude outside the harmonics divisible by `m`.
    #[must_use]
    pub fn off_symmetry_mass(&self, m: usize) -> f64 {
        self.series.off_symmetry_mass(m)
    }

    #[must_use]
    pub fn is_constant(&self, tol: f64) -> bool {
        self.series
            .a
            .iter()
            .skip(1)
            .chain(self.series.b.iter())
            .all(|c| c.abs() <= tol)
    }

    /// Term list, zero terms dropped (k = 0 kept if the mean is nonzero).
    #[must_use]
    pub fn terms(&self) -> Vec<FourierTerm> {
        let mut out = Vec::new();
        if self.series.a[0] != 0.0 {
            out.push(FourierTerm {
                k: 0,
                a: self.series.a[0],
                b: 0.0,
            });
        }
        for k in 1..=self.series.max_k() {
            let (a, b) = (self.series.a[k], self.series.b[k]);
            if a != 0.0 || b != 0.0 {
                out.push(FourierTerm { k, a, b });
            }
        }
        out
    }
}

/// Boundary data for an annulus: heights on the upper and lower ideal
/// circles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "CurvePairSpec", try_from = "CurvePairSpec")]
pub struct CurvePair {
    pub upper: BoundaryCurve,
    pub lower: BoundaryCurve,
}

impl CurvePair {
    #[must_use]
    pub fn new(upper: BoundaryCurve, lower: BoundaryCurve) -> Self {
        CurvePair { upper, lower }
    }

    /// Vertical gap γ⁺(θ) − γ⁻(θ).
    #[must_use]
    pub fn gap_at(&self, theta: f64) -> f64 {
        self.upper.eval(theta) - self.lower.eval(theta)
    }

    /// Affine modification of the upper curve: γ⁺ ← γ⁺ + a₀ + a₁cos θ + a₂sin θ.
    ///
    /// The lower curve is untouched; this parametrizes the tilt freedom of
    /// the upper boundary circle.
    #[must_use]
    pub fn apply_tilt(&self, a0: f64, a1: f64, a2: f64) -> CurvePair {
        let mut terms = self.upper.terms();
        let mut add = |k: usize, da: f64, db: f64| {
            if let Some(t) = terms.iter_mut().find(|t| t.k == k) {
                t.a += da;
                t.b += db;
            } else {
                terms.push(FourierTerm { k, a: da, b: db });
            }
        };
        add(0, a0, 0.0);
        add(1, a1, a2);
        CurvePair {
            upper: BoundaryCurve::from_terms(&terms).expect("terms stay valid"),
            lower: self.lower.clone(),
        }
    }

    /// (min, max) of the gap over `n` equispaced angles.
    #[must_use]
    pub fn gap_range(&self, n: usize) -> (f64, f64) {
        let up = self.upper.sample(n);
        let lo = self.lower.sample(n);
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for (u, l) in up.iter().zip(&lo) {
            let g = u - l;
            min = min.min(g);
            max = max.max(g);
        }
        (min, max)
    }
}

/// Wire format: both curves as explicit term lists.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct CurvePairSpec {
    upper: Vec<FourierTerm>,
    lower: Vec<FourierTerm>,
}

impl From<CurvePair> for CurvePairSpec {
    fn from(pair: CurvePair) -> Self {
        CurvePairSpec {
            upper: pair.upper.terms(),
            lower: pair.lower.terms(),
        }
    }
}

impl TryFrom<CurvePairSpec> for CurvePair {
    type Error = Error;

    fn try_from(spec: CurvePairSpec) -> Result<Self> {
        Ok(CurvePair {
            upper: BoundaryCurve::from_terms(&spec.upper)?,
            lower: BoundaryCurve::from_terms(&spec.lower)?,
        })
    }
}

//! Adaptive Gauss–Kronrod quadrature (G7–K15) with certified error estimates.
//!
//! The estimator is the standard QUADPACK construction: on each interval the
//! 15-point Kronrod value is compared against the embedded 7-point Gauss
//! value, and the difference is rescaled against the integrand's variation
//! (`resasc`) so that smooth integrands are not over-penalized. Intervals are
//! kept in a max-heap by error and the worst one is bisected until the global
//! estimate meets the tolerance or the interval budget runs out.
//!
//! Every result carries its error estimate; callers that need certification
//! (the tall-rectangle witness search) propagate these bounds.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Kronrod abscissae (positive half, descending), K15.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss weights for the embedded 7-point rule (nodes XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Value plus certified error estimate.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Estimated absolute error (QUADPACK-style, conservative for smooth f).
    pub error: f64,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One K15 application on [a, b]. Returns (kronrod, error, resabs).
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut fv1 = [0.0_f64; 8]; // f(center - half*x)
    let mut fv2 = [0.0_f64; 8]; // f(center + half*x)
    fv1[7] = f_center;
    fv2[7] = f_center;
    for i in 0..7 {
        let dx = half * XGK[i];
        fv1[i] = f(center - dx);
        fv2[i] = f(center + dx);
    }

    let mut result_kronrod = WGK[7] * f_center;
    let mut resabs = result_kronrod.abs();
    for i in 0..7 {
        result_kronrod += WGK[i] * (fv1[i] + fv2[i]);
        resabs += WGK[i] * (fv1[i].abs() + fv2[i].abs());
    }

    let mut result_gauss = WG[3] * f_center;
    for i in 0..3 {
        let j = 2 * i + 1; // odd Kronrod nodes are the Gauss nodes
        result_gauss += WG[i] * (fv1[j] + fv2[j]);
    }

    let mean = 0.5 * result_kronrod;
    let mut resasc = WGK[7] * (f_center - mean).abs();
    for i in 0..7 {
        resasc += WGK[i] * ((fv1[i] - mean).abs() + (fv2[i] - mean).abs());
    }

    let result_kronrod = result_kronrod * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();

    let mut err = (result_kronrod - result_gauss * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let round_off = 50.0 * f64::EPSILON * resabs;
    if round_off > f64::MIN_POSITIVE {
        err = err.max(round_off);
    }
    (result_kronrod, err, resabs)
}

/// Single non-adaptive K15 panel, for callers that split the interval
/// themselves (cumulative arc-length tables). Returns (value, error).
pub(crate) fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let (value, error, _) = qk15(f, a, b);
    (value, error)
}

/// Adaptive integration of `f` on [a, b] to `max(abs_tol, rel_tol·|I|)`.
///
/// Fails with [`Error::Numerics`] carrying the achieved error estimate if the
/// tolerance cannot be met within `max_panels` interval bisections.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    adaptive_with(f, a, b, abs_tol, rel_tol, 2000)
}

pub fn adaptive_with<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("quadrature endpoints must be finite"));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if a > b {
        let mut r = adaptive_with(f, b, a, abs_tol, rel_tol, max_panels)?;
        r.value = -r.value;
        return Ok(r);
    }

    let (value, error, _) = qk15(&f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value,
        error,
    });
    let mut total_value = value;
    let mut total_error = error;

    while total_error > abs_tol.max(rel_tol * total_value.abs()) {
        if heap.len() >= max_panels {
            return Err(Error::Numerics {
                context: format!("adaptive quadrature on [{a:.6}, {b:.6}] hit panel cap"),
                achieved: total_error,
                required: abs_tol.max(rel_tol * total_value.abs()),
            });
        }
        let worst = heap.pop().expect("heap non-empty while error positive");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; cannot split further.
            return Err(Error::Numerics {
                context: format!(
                    "adaptive quadrature stalled at machine resolution near {mid:.17}"
                ),
                achieved: total_error,
                required: abs_tol.max(rel_tol * total_value.abs()),
            });
        }
        let (v1, e1, _) = qk15(&f, worst.a, mid);
        let (v2, e2, _) = qk15(&f, mid, worst.b);
        evaluations += 30;
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }

    Ok(QuadResult {
        value: total_value,
        error: total_error,
        evaluations,
    })
}

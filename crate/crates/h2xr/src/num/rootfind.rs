//! Scalar root finding: Brent's method plus geometric bracket expansion.

use crate::error::{Error, Result};

/// Root of `f` in [a, b] by Brent's method; requires a sign change.
///
/// Converges to |interval| ≤ `tol` (absolute) or an exact zero.
pub fn brent<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> Result<f64> {
    let mut a = a;
    let mut b = b;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::domain(format!(
            "no sign change on bracket [{a:.6e}, {b:.6e}] (f: {fa:.3e}, {fb:.3e})"
        )));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Inverse quadratic / secant step.
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1 * xm.signum() };
        fb = f(b);
    }
    Err(Error::Numerics {
        context: "Brent iteration cap reached".into(),
        achieved: (b - c).abs(),
        required: tol,
    })
}

/// Grow [lo, hi] geometrically (factor `grow`) until f changes sign, capping
/// the upper endpoint at `hi_cap`. Returns the bracketing interval.
pub fn expand_bracket<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    grow: f64,
    hi_cap: f64,
    max_steps: usize,
) -> Result<(f64, f64)> {
    assert!(lo < hi && grow > 1.0);
    let flo = f(lo);
    let mut prev = hi;
    let mut fprev = f(hi);
    if flo.signum() != fprev.signum() || flo == 0.0 || fprev == 0.0 {
        return Ok((lo, hi));
    }
    let mut cur = hi;
    for _ in 0..max_steps {
        cur = (cur * grow).min(hi_cap);
        let fcur = f(cur);
        if fcur == 0.0 || fcur.signum() != flo.signum() {
            return Ok((prev, cur));
        }
        if cur >= hi_cap {
            break;
        }
        prev = cur;
        fprev = fcur;
    }
    let _ = fprev;
    Err(Error::domain(format!(
        "no sign change found while expanding bracket up to {hi_cap:.3e}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cosine_root_is_half_pi() {
        let r = brent(f64::cos, 1.0, 2.0, 1e-14, 100).unwrap();
        assert!((r - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn flat_then_steep_function_still_converges() {
        // f is extremely flat near the root: x^9 − 1e−9 near x ≈ 0.1.
        let f = |x: f64| x.powi(9) - 1e-9;
        let r = brent(f, 0.0, 1.0, 1e-15, 200).unwrap();
        assert!((r - 1e-1).abs() < 1e-9, "got {r}");
    }

    #[test]
    fn missing_sign_change_is_a_domain_error() {
        let err = brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 50).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn bracket_expansion_reaches_distant_roots() {
        let f = |x: f64| x - 1000.0;
        let (lo, hi) = expand_bracket(f, 1e-6, 1.0, 2.0, 1e9, 200).unwrap();
        assert!(f(lo).signum() != f(hi).signum());
        let r = brent(f, lo, hi, 1e-10, 100).unwrap();
        assert!((r - 1000.0).abs() < 1e-7);
    }
}

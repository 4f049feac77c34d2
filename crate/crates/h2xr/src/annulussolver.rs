//! Minimal annuli as normal perturbations of a catenoid chart.
//!
//! An annulus close to the catenoid of conformal height 2h is written as
//!
//! ```text
//!     X(t,θ) = X₀(t,θ) + (û(t) + u(t,θ)) · n(t,θ),
//! ```
//!
//! where `X₀(t,θ) = (r(t)cosθ, r(t)sinθ, t)` is the catenoid, `n` is a unit
//! transversal field, and `û` is a small base correction (below). The field
//! `n` equals the catenoid's unit normal for |t| ≤ h−δ and is turned into
//! the exact vertical ±E₃ for |t| ≥ h−δ/2 through a C² blend; near the ends
//! the perturbed surface is therefore a *vertical graph* over the chart
//! circles, so Dirichlet data for the end heights γ± translates exactly into
//! Dirichlet data for u:
//!
//! ```text
//!     u(+h, θ) =  γ⁺(θ) − h,        u(−h, θ) = −(γ⁻(θ) + h).
//! ```
//!
//! (The sign on the bottom row comes from n = −E₃ there.)
//!
//! # Discrete area
//!
//! The functional is the exact surface area of the bilinear-in-parameter
//! quadrilateral mesh: per cell, tangents X_t, X_θ by corner differences,
//! the conformal factor λ² = 4/(1−|M|²)² at the corner centroid M, and
//! `√(EG−F²)·ΔtΔθ` with the product metric λ²(dx²+dy²)+dτ². Residuals are
//! the *analytic* gradient of this sum and the Newton matrix its analytic
//! Hessian — both assembled from a hand-differentiated eight-variable cell
//! kernel, so the solver is exactly the discrete Euler–Lagrange system of
//! the discrete area. Rows are scaled by κ/(ΔtΔθ), which makes an interior
//! row agree with the undivided Jacobi operator −(∂t² + κ²∂θ² + q) applied
//! to u, up to O(Δ²).
//!
//! The catenoid itself is only an O(Δ²) critical point of the *discrete*
//! area. [`build_chart`] therefore pre-solves the rotationally invariant
//! problem for the ring-wise correction û, after which `u ≡ 0` is exactly
//! critical and "constant boundary data ⇒ trivial solution" holds to
//! round-off instead of to truncation error.
//!
//! # Symmetry folding and the degenerate directions
//!
//! For boundary data invariant under the rotation by 2π/m the solve folds
//! all unknowns onto one sector of Nθ/m columns; cells are assembled once
//! per sector and the area is m times the sector sum. Folding with m ≥ 2
//! also removes the two rotation/translation Jacobi fields, which otherwise
//! make the full linearization nearly singular: an unfolded solve first
//! measures the smallest Hessian eigenvalues and refuses with
//! [`Error::SingularLinearization`] when two of them vanish at discretization
//! scale, unless [`SolveOptions::damped_least_squares`] requests
//! Levenberg–Marquardt damping (σ proportional to the current residual, so
//! the damping switches itself off near the solution).

use crate::catenoid::Catenoid;
use crate::curve::CurvePair;
use crate::error::{Error, Result};
use crate::flux_center::{End, EndTrace};
use crate::geometry::metric_f;
use crate::num::band::{symmetric_smallest_eigenvalues, BandMatrix};
use crate::num::fourier::spectral_derivative;

/// Grid and blend parameters for [`build_chart`].
#[derive(Debug, Clone, Copy)]
pub struct ChartSpec {
    /// Number of intervals in t across [−h, h]; Nt+1 rings of nodes.
    pub t_intervals: usize,
    /// Number of angular nodes (full circle).
    pub sectors: usize,
    /// Blend width δ; the transversal field is the surface normal for
    /// |t| ≤ h−δ and vertical for |t| ≥ h−δ/2. Default h/8.
    pub blend_width: Option<f64>,
}

/// Discretized catenoid chart with its transversal field and base correction.
#[derive(Debug, Clone)]
pub struct AnnulusChart {
    pub kappa: f64,
    pub half_height: f64,
    pub delta: f64,
    pub sectors: usize,
    /// Ring heights t₀ = −h, …, t_Nt = h (uniform).
    pub t: Vec<f64>,
    /// Ring radii r(t_k).
    pub r: Vec<f64>,
    /// Horizontal coefficient of the transversal field:
    /// n = (a·cosθ, a·sinθ, b), g-unit on each ring.
    normal_a: Vec<f64>,
    /// Vertical coefficient of the transversal field; exactly ±1 in the
    /// vertical zones.
    normal_b: Vec<f64>,
    /// Ring-wise base correction û (zero on the boundary rings).
    pub u_base: Vec<f64>,
    dt: f64,
    dtheta: f64,
}

impl AnnulusChart {
    pub fn t_intervals(&self) -> usize {
        self.t.len() - 1
    }

    /// Interior unknown count for a fold of order m.
    pub fn interior_len(&self, m: usize) -> usize {
        (self.t_intervals() - 1) * (self.sectors / m)
    }

    fn reduced_index(&self, m: usize, k: usize, j: usize) -> usize {
        let ncol = self.sectors / m;
        (k - 1) * ncol + j % ncol
    }
}

/// Uniform factor that turns rows of the area gradient/Hessian into a
/// consistent discretization of the undivided Jacobi operator −(∂t² + κ²∂θ² + q).
pub fn hessian_row_scale(chart: &AnnulusChart) -> f64 {
    chart.kappa / (chart.dt * chart.dtheta)
}

/// Quintic C² step: 0 for x ≤ 0, 1 for x ≥ 1.
fn smoothstep5(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 - 1e-12 {
        1.0
    } else {
        x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
    }
}

/// Build the chart for a catenoid: grid, blended transversal field, and the
/// base correction û that makes u ≡ 0 exactly discrete-critical.
///
/// Validation: δ must satisfy 0 < δ < h/4 and δ/2 ≥ 2Δt, so that the two
/// rings next to each boundary are already in the vertical zone (the end
/// traces differentiate through them).
pub fn build_chart(cat: &Catenoid, spec: &ChartSpec) -> Result<AnnulusChart> {
    let nt = spec.t_intervals;
    let ntheta = spec.sectors;
    if nt < 8 || ntheta < 8 {
        return Err(Error::domain("annulus chart needs t_intervals ≥ 8 and sectors ≥ 8"));
    }
    let h = cat.half_height();
    let kappa = cat.kappa();
    let delta = spec.blend_width.unwrap_or(h / 8.0);
    if !(delta > 0.0 && delta < h / 4.0) {
        return Err(Error::domain("blend width must lie in (0, h/4)"));
    }
    let dt = 2.0 * h / nt as f64;
    if delta * (1.0 + 1e-12) < 4.0 * dt {
        return Err(Error::domain(
            "blend width must cover two grid intervals: need δ/2 ≥ 2Δt",
        ));
    }

    let profile = cat.profile(nt + 1)?;
    let mut normal_a = Vec::with_capacity(nt + 1);
    let mut normal_b = Vec::with_capacity(nt + 1);
    for k in 0..=nt {
        let t = profile.t[k];
        let r = profile.r[k];
        let rp = profile.r_prime[k];
        // g-unit surface normal: ν = (−(1−r²)²/(4κr)·e_r, r′/(κr)).
        let nu_a = -(1.0 - r * r).powi(2) / (4.0 * kappa * r);
        let nu_b = rp / (kappa * r);
        let w = smoothstep5((t.abs() - (h - delta)) / (delta / 2.0));
        let a_raw = (1.0 - w) * nu_a;
        let b_raw = (1.0 - w) * nu_b + w * if t >= 0.0 { 1.0 } else { -1.0 };
        // λ²·a² computed as a²/F; the vertical zone has a_raw exactly 0,
        // which must not meet the vanishing F at r = 1.
        let hor2 = if a_raw == 0.0 { 0.0 } else { a_raw * a_raw / metric_f(r) };
        let norm = (hor2 + b_raw * b_raw).sqrt();
        normal_a.push(a_raw / norm);
        normal_b.push(b_raw / norm);
    }

    let mut chart = AnnulusChart {
        kappa,
        half_height: h,
        delta,
        sectors: ntheta,
        t: profile.t,
        r: profile.r,
        normal_a,
        normal_b,
        u_base: vec![0.0; nt + 1],
        dt,
        dtheta: std::f64::consts::TAU / ntheta as f64,
    };

    // Base correction: the rotationally invariant critical point. Fold with
    // m = Nθ (one column); Newton from zero converges in a couple of steps
    // since the starting residual is already O(Δ²).
    let zero = [0.0];
    let (u_hat, _) = newton(
        &chart,
        ntheta,
        &zero,
        &zero,
        vec![0.0; nt - 1],
        &NewtonCfg { tol: 1e-11, max_iter: 16, damped: false },
    )?;
    for k in 1..nt {
        chart.u_base[k] = u_hat[k - 1];
    }
    Ok(chart)
}

// ---------------------------------------------------------------------------
// Cell kernel
// ---------------------------------------------------------------------------

/// Area density a(Y) = √(EG−F²) of one cell as a function of
/// Y = (X_t, X_θ, M_x, M_y), with analytic gradient and Hessian.
///
/// E = λ²(X_t·e_h)² + X_t,τ², etc., λ² = 4/(1−M_x²−M_y²)².
fn area_density(y: &[f64; 8]) -> Result<(f64, [f64; 8], [[f64; 8]; 8])> {
    let (u1, u2, u3) = (y[0], y[1], y[2]);
    let (v1, v2, v3) = (y[3], y[4], y[5]);
    let (mx, my) = (y[6], y[7]);
    let om = 1.0 - mx * mx - my * my;
    if om <= 0.0 {
        return Err(Error::Numerics {
            context: "annulus cell centroid left the disk".into(),
            achieved: om,
            required: f64::MIN_POSITIVE,
        });
    }
    let om2 = om * om;
    let om3 = om2 * om;
    let om4 = om2 * om2;
    let l = 4.0 / om2;
    let lx = 16.0 * mx / om3;
    let ly = 16.0 * my / om3;
    let lxx = 16.0 / om3 + 96.0 * mx * mx / om4;
    let lxy = 96.0 * mx * my / om4;
    let lyy = 16.0 / om3 + 96.0 * my * my / om4;

    let uh = u1 * u1 + u2 * u2;
    let vh = v1 * v1 + v2 * v2;
    let ph = u1 * v1 + u2 * v2;
    let e = l * uh + u3 * u3;
    let g = l * vh + v3 * v3;
    let f = l * ph + u3 * v3;
    let w = e * g - f * f;
    if w <= 0.0 {
        return Err(Error::Numerics {
            context: "annulus cell degenerated (EG − F² ≤ 0)".into(),
            achieved: w,
            required: f64::MIN_POSITIVE,
        });
    }
    let a = w.sqrt();

    let de = [2.0 * l * u1, 2.0 * l * u2, 2.0 * u3, 0.0, 0.0, 0.0, uh * lx, uh * ly];
    let dg = [0.0, 0.0, 0.0, 2.0 * l * v1, 2.0 * l * v2, 2.0 * v3, vh * lx, vh * ly];
    let df = [l * v1, l * v2, v3, l * u1, l * u2, u3, ph * lx, ph * ly];
    let mut dw = [0.0; 8];
    let mut da = [0.0; 8];
    for i in 0..8 {
        dw[i] = g * de[i] + e * dg[i] - 2.0 * f * df[i];
        da[i] = dw[i] / (2.0 * a);
    }

    // Second derivatives of E, G, F (upper triangles, then symmetrized
    // through the assembly formula below, which only reads i ≤ j).
    let mut d2e = [[0.0; 8]; 8];
    d2e[0][0] = 2.0 * l;
    d2e[1][1] = 2.0 * l;
    d2e[2][2] = 2.0;
    d2e[0][6] = 2.0 * u1 * lx;
    d2e[0][7] = 2.0 * u1 * ly;
    d2e[1][6] = 2.0 * u2 * lx;
    d2e[1][7] = 2.0 * u2 * ly;
    d2e[6][6] = uh * lxx;
    d2e[6][7] = uh * lxy;
    d2e[7][7] = uh * lyy;

    let mut d2g = [[0.0; 8]; 8];
    d2g[3][3] = 2.0 * l;
    d2g[4][4] = 2.0 * l;
    d2g[5][5] = 2.0;
    d2g[3][6] = 2.0 * v1 * lx;
    d2g[3][7] = 2.0 * v1 * ly;
    d2g[4][6] = 2.0 * v2 * lx;
    d2g[4][7] = 2.0 * v2 * ly;
    d2g[6][6] = vh * lxx;
    d2g[6][7] = vh * lxy;
    d2g[7][7] = vh * lyy;

    let mut d2f = [[0.0; 8]; 8];
    d2f[0][3] = l;
    d2f[1][4] = l;
    d2f[2][5] = 1.0;
    d2f[0][6] = v1 * lx;
    d2f[0][7] = v1 * ly;
    d2f[1][6] = v2 * lx;
    d2f[1][7] = v2 * ly;
    d2f[3][6] = u1 * lx;
    d2f[3][7] = u1 * ly;
    d2f[4][6] = u2 * lx;
    d2f[4][7] = u2 * ly;
    d2f[6][6] = ph * lxx;
    d2f[6][7] = ph * lxy;
    d2f[7][7] = ph * lyy;

    let mut d2a = [[0.0; 8]; 8];
    let inv2a = 1.0 / (2.0 * a);
    let inv4a3 = 1.0 / (4.0 * a * a * a);
    for i in 0..8 {
        for j in i..8 {
            let d2w = g * d2e[i][j] + e * d2g[i][j] - 2.0 * f * d2f[i][j]
                + de[i] * dg[j]
                + dg[i] * de[j]
                - 2.0 * df[i] * df[j];
            let v = d2w * inv2a - dw[i] * dw[j] * inv4a3;
            d2a[i][j] = v;
            d2a[j][i] = v;
        }
    }
    Ok((a, da, d2a))
}

/// Corner ordering within a cell: (Δk, Δj) and the signs with which the
/// corner enters the two tangent differences.
const CORNER_DK: [usize; 4] = [0, 1, 0, 1];
const CORNER_DJ: [usize; 4] = [0, 0, 1, 1];
const SIGN_T: [f64; 4] = [-1.0, 1.0, -1.0, 1.0];
const SIGN_TH: [f64; 4] = [-1.0, -1.0, 1.0, 1.0];

struct Assembled {
    area: f64,
    grad: Vec<f64>,
    hess: Option<BandMatrix>,
}

/// Assemble the discrete area, its gradient over the interior unknowns, and
/// (optionally) the interior Hessian, folded over an m-fold rotation.
///
/// `u` holds interior unknowns in reduced columns, `top`/`bottom` the fixed
/// boundary rows (already in u-coordinates, reduced). Both Hessian and
/// gradient are *unscaled*; see [`hessian_row_scale`].
fn assemble(
    chart: &AnnulusChart,
    m: usize,
    u: &[f64],
    top: &[f64],
    bottom: &[f64],
    want_hess: bool,
) -> Result<Assembled> {
    let nt = chart.t_intervals();
    let ncol = chart.sectors / m;
    debug_assert_eq!(u.len(), (nt - 1) * ncol);
    debug_assert_eq!(top.len(), ncol);
    debug_assert_eq!(bottom.len(), ncol);

    let n_int = (nt - 1) * ncol;
    let bw = if ncol == 1 { 1 } else { 2 * ncol - 1 };
    let mut grad = vec![0.0; n_int];
    let mut hess = if want_hess { Some(BandMatrix::zeros(n_int, bw, bw)) } else { None };
    let mut area = 0.0;

    let value_at = |k: usize, col: usize| -> f64 {
        chart.u_base[k]
            + if k == 0 {
                bottom[col]
            } else if k == nt {
                top[col]
            } else {
                u[(k - 1) * ncol + col]
            }
    };

    let half_dt = 0.5 / chart.dt;
    let half_dth = 0.5 / chart.dtheta;
    let cell_weight = chart.dt * chart.dtheta;

    for k in 0..nt {
        for j in 0..ncol {
            // Corner data: global ring, reduced column, genuine angle.
            let mut pos = [[0.0; 3]; 4];
            let mut nrm = [[0.0; 3]; 4];
            let mut col = [0usize; 4];
            let mut ring = [0usize; 4];
            for c in 0..4 {
                let kc = k + CORNER_DK[c];
                let jc = j + CORNER_DJ[c];
                let theta = jc as f64 * chart.dtheta;
                let (sin_t, cos_t) = theta.sin_cos();
                let jr = jc % ncol;
                let v = value_at(kc, jr);
                let (a, b) = (chart.normal_a[kc], chart.normal_b[kc]);
                let n = [a * cos_t, a * sin_t, b];
                let rad = chart.r[kc];
                pos[c] = [
                    rad * cos_t + v * n[0],
                    rad * sin_t + v * n[1],
                    chart.t[kc] + v * n[2],
                ];
                nrm[c] = n;
                col[c] = jr;
                ring[c] = kc;
            }

            let mut y = [0.0; 8];
            for c in 0..4 {
                for d in 0..3 {
                    y[d] += SIGN_T[c] * pos[c][d] * half_dt;
                    y[3 + d] += SIGN_TH[c] * pos[c][d] * half_dth;
                }
                y[6] += 0.25 * pos[c][0];
                y[7] += 0.25 * pos[c][1];
            }

            let (a_cell, da, d2a) = area_density(&y)?;
            area += a_cell * cell_weight;

            // ∂Y/∂v_c, one 8-vector per corner.
            let mut dvec = [[0.0; 8]; 4];
            for c in 0..4 {
                for d in 0..3 {
                    dvec[c][d] = SIGN_T[c] * nrm[c][d] * half_dt;
                    dvec[c][3 + d] = SIGN_TH[c] * nrm[c][d] * half_dth;
                }
                dvec[c][6] = 0.25 * nrm[c][0];
                dvec[c][7] = 0.25 * nrm[c][1];
            }

            let interior = |c: usize| ring[c] >= 1 && ring[c] <= nt - 1;
            for c in 0..4 {
                if !interior(c) {
                    continue;
                }
                let gi = (ring[c] - 1) * ncol + col[c];
                let mut s = 0.0;
                for i in 0..8 {
                    s += da[i] * dvec[c][i];
                }
                grad[gi] += s * cell_weight;
            }

            if let Some(hm) = hess.as_mut() {
                for c in 0..4 {
                    if !interior(c) {
                        continue;
                    }
                    let gi = (ring[c] - 1) * ncol + col[c];
                    for cp in c..4 {
                        if !interior(cp) {
                            continue;
                        }
                        let gj = (ring[cp] - 1) * ncol + col[cp];
                        // h = dvec_cᵀ · d2a · dvec_cp
                        let mut h = 0.0;
                        for i in 0..8 {
                            let mut row = 0.0;
                            for jj in 0..8 {
                                row += d2a[i][jj] * dvec[cp][jj];
                            }
                            h += dvec[c][i] * row;
                        }
                        let h = h * cell_weight;
                        if gi == gj {
                            // Same reduced unknown (diagonal, or a fold of
                            // width one where both θ-corners alias).
                            let factor = if c == cp { 1.0 } else { 2.0 };
                            hm.add(gi, gi, factor * h);
                        } else {
                            hm.add(gi, gj, h);
                            hm.add(gj, gi, h);
                        }
                    }
                }
            }
        }
    }

    Ok(Assembled { area: area * m as f64, grad, hess })
}

/// Total discrete area of the folded configuration.
pub fn discrete_area(
    chart: &AnnulusChart,
    m: usize,
    u: &[f64],
    top: &[f64],
    bottom: &[f64],
) -> Result<f64> {
    Ok(assemble(chart, m, u, top, bottom, false)?.area)
}

/// Gradient of the discrete area over the interior unknowns (one fold
/// sector; unscaled).
pub fn area_gradient(
    chart: &AnnulusChart,
    m: usize,
    u: &[f64],
    top: &[f64],
    bottom: &[f64],
) -> Result<Vec<f64>> {
    Ok(assemble(chart, m, u, top, bottom, false)?.grad)
}

/// Interior Hessian of the discrete area (symmetric banded; unscaled).
pub fn interior_hessian(
    chart: &AnnulusChart,
    m: usize,
    u: &[f64],
    top: &[f64],
    bottom: &[f64],
) -> Result<BandMatrix> {
    Ok(assemble(chart, m, u, top, bottom, true)?.hess.expect("requested"))
}

// ---------------------------------------------------------------------------
// Newton
// ---------------------------------------------------------------------------

struct NewtonCfg {
    tol: f64,
    max_iter: usize,
    damped: bool,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Damped Newton on the scaled gradient; returns the interior solution and
/// the history of scaled residual ∞-norms (one entry per assembled state,
/// ending with the accepted one).
fn newton(
    chart: &AnnulusChart,
    m: usize,
    top: &[f64],
    bottom: &[f64],
    mut u: Vec<f64>,
    cfg: &NewtonCfg,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let scale = hessian_row_scale(chart);
    let sigma_cap = 0.03 * chart.kappa.powi(2).max(1.0);
    let mut history = Vec::new();

    for _ in 0..cfg.max_iter {
        let asm = assemble(chart, m, &u, top, bottom, true)?;
        let res = scale * inf_norm(&asm.grad);
        history.push(res);
        if res < cfg.tol {
            return Ok((u, history));
        }

        let mut h = asm.hess.expect("requested");
        if cfg.damped {
            // Levenberg–Marquardt: damping tracks the residual so it
            // vanishes near the solution; expressed in unscaled units.
            let sigma = (10.0 * res).min(sigma_cap) / scale;
            h.shift_diagonal(sigma);
        }
        let lu = h.factor()?;
        let mut step: Vec<f64> = asm.grad.iter().map(|g| -g).collect();
        lu.solve_in_place(&mut step);

        // Armijo backtracking on ‖grad‖₂; an assembly failure along the way
        // (cell left the disk) counts as a rejected step.
        let base = l2_norm(&asm.grad);
        let mut alpha = 1.0;
        loop {
            let trial: Vec<f64> =
                u.iter().zip(&step).map(|(a, d)| a + alpha * d).collect();
            match assemble(chart, m, &trial, top, bottom, false) {
                Ok(t) if l2_norm(&t.grad) <= (1.0 - 1e-4 * alpha) * base => {
                    u = trial;
                    break;
                }
                _ => {
                    alpha *= 0.5;
                    if alpha < 1.0 / 4096.0 {
                        return Err(Error::NonConvergence { history });
                    }
                }
            }
        }
    }
    Err(Error::NonConvergence { history })
}

// ---------------------------------------------------------------------------
// Public solve
// ---------------------------------------------------------------------------

/// Options for [`solve`].
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Fold order m ≥ 1; the boundary pair must be invariant under the
    /// rotation by 2π/m and m must divide the chart's sector count.
    pub symmetry: usize,
    /// Convergence tolerance on the scaled residual ∞-norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Proceed through a nearly singular unfolded linearization with
    /// residual-proportional diagonal damping instead of refusing.
    pub damped_least_squares: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { symmetry: 1, tol: 1e-10, max_iter: 50, damped_least_squares: false }
    }
}

/// A solved annulus: chart, fold order, interior unknowns (reduced columns),
/// boundary rows, and the Newton residual history.
#[derive(Debug, Clone)]
pub struct AnnulusSolution {
    pub chart: AnnulusChart,
    pub symmetry: usize,
    pub u: Vec<f64>,
    top_data: Vec<f64>,
    bottom_data: Vec<f64>,
    top_curve: Vec<f64>,
    bottom_curve: Vec<f64>,
    pub newton_residuals: Vec<f64>,
}

/// Threshold below which a scaled Hessian eigenvalue counts as a
/// discretization-scale zero (relative to max(1, κ²), the distance of the
/// first non-degenerate mode from zero).
const NEAR_ZERO_FACTOR: f64 = 1e-2;

/// Solve the Dirichlet problem for a minimal annulus near the chart's
/// catenoid, with end heights prescribed by `pair`.
pub fn solve(chart: &AnnulusChart, pair: &CurvePair, opts: &SolveOptions) -> Result<AnnulusSolution> {
    let m = opts.symmetry;
    let ntheta = chart.sectors;
    if m == 0 || ntheta % m != 0 {
        return Err(Error::domain("fold order must divide the sector count"));
    }
    if m > 1 {
        let off = pair.upper.off_symmetry_mass(m) + pair.lower.off_symmetry_mass(m);
        if off > 1e-9 {
            return Err(Error::domain(
                "boundary pair is not invariant under the requested rotation",
            ));
        }
    }
    let nt = chart.t_intervals();
    let h = chart.half_height;
    let ncol = ntheta / m;
    let top: Vec<f64> = (0..ncol)
        .map(|j| pair.upper.eval(j as f64 * chart.dtheta) - h)
        .collect();
    let bottom: Vec<f64> = (0..ncol)
        .map(|j| -(pair.lower.eval(j as f64 * chart.dtheta) + h))
        .collect();

    // Linear-in-t initial guess, exact on both boundary rows.
    let mut u0 = vec![0.0; (nt - 1) * ncol];
    for k in 1..nt {
        let alpha = (chart.t[k] + h) / (2.0 * h);
        for j in 0..ncol {
            u0[(k - 1) * ncol + j] = alpha * top[j] + (1.0 - alpha) * bottom[j];
        }
    }

    if m == 1 && !opts.damped_least_squares {
        // The rotation and translation Jacobi fields survive an unfolded
        // linearization as two discretization-scale eigenvalues.
        let mut hess = interior_hessian(chart, 1, &u0, &top, &bottom)?;
        let scale = hessian_row_scale(chart);
        for i in 0..hess.n() {
            hess.scale_row(i, scale);
        }
        let values = symmetric_smallest_eigenvalues(&hess, 4, 400, 1e-6)?;
        let near_zero = NEAR_ZERO_FACTOR * chart.kappa.powi(2).max(1.0);
        if values.iter().filter(|v| v.abs() < near_zero).count() >= 2 {
            return Err(Error::SingularLinearization { values });
        }
    }

    let cfg = NewtonCfg {
        tol: opts.tol,
        max_iter: opts.max_iter,
        damped: opts.damped_least_squares,
    };
    let (u, history) = newton(chart, m, &top, &bottom, u0, &cfg)?;

    Ok(AnnulusSolution {
        chart: chart.clone(),
        symmetry: m,
        u,
        top_data: top,
        bottom_data: bottom,
        top_curve: pair.upper.sample(ntheta),
        bottom_curve: pair.lower.sample(ntheta),
        newton_residuals: history,
    })
}

impl AnnulusSolution {
    /// Deviation unknown u at ring k, sector j (full, unfolded indexing).
    pub fn deviation(&self, k: usize, j: usize) -> f64 {
        let nt = self.chart.t_intervals();
        let ncol = self.chart.sectors / self.symmetry;
        let col = j % ncol;
        if k == 0 {
            self.bottom_data[col]
        } else if k == nt {
            self.top_data[col]
        } else {
            self.u[self.chart.reduced_index(self.symmetry, k, j)]
        }
    }

    /// Total normal displacement û + u at a node.
    pub fn displacement(&self, k: usize, j: usize) -> f64 {
        self.chart.u_base[k] + self.deviation(k, j)
    }

    /// Embedded node position (x, y, τ).
    pub fn node_position(&self, k: usize, j: usize) -> [f64; 3] {
        let theta = j as f64 * self.chart.dtheta;
        let (sin_t, cos_t) = theta.sin_cos();
        let v = self.displacement(k, j);
        let (a, b) = (self.chart.normal_a[k], self.chart.normal_b[k]);
        [
            self.chart.r[k] * cos_t + v * a * cos_t,
            self.chart.r[k] * sin_t + v * a * sin_t,
            self.chart.t[k] + v * b,
        ]
    }

    /// Height of the end graph at a vertical-zone ring: the transversal
    /// field is ±E₃ there, so the node's τ-coordinate is the graph value
    /// over the circle of radius r(t_k).
    fn graph_height(&self, k: usize, j: usize) -> f64 {
        self.chart.t[k] + self.chart.normal_b[k] * self.displacement(k, j)
    }

    /// Boundary traces (u_r, u_θ) of both end graphs at the ideal boundary,
    /// using the three outermost rings (all inside the vertical zone by the
    /// chart validation) and a one-sided three-point derivative on the
    /// nonuniform radii r(t_k).
    pub fn end_traces(&self) -> Result<(EndTrace, EndTrace)> {
        let nt = self.chart.t_intervals();
        let ntheta = self.chart.sectors;

        let deriv = |rho: [f64; 3], v: [f64; 3]| -> f64 {
            let (x0, x1, x2) = (rho[0], rho[1], rho[2]);
            v[0] * (1.0 / (x0 - x1) + 1.0 / (x0 - x2))
                + v[1] * (x0 - x2) / ((x1 - x0) * (x1 - x2))
                + v[2] * (x0 - x1) / ((x2 - x0) * (x2 - x1))
        };

        let rho_top = [self.chart.r[nt], self.chart.r[nt - 1], self.chart.r[nt - 2]];
        let mut ur_top = Vec::with_capacity(ntheta);
        for j in 0..ntheta {
            let v = [
                self.top_curve[j],
                self.graph_height(nt - 1, j),
                self.graph_height(nt - 2, j),
            ];
            ur_top.push(deriv(rho_top, v));
        }
        let rho_bot = [self.chart.r[0], self.chart.r[1], self.chart.r[2]];
        let mut ur_bot = Vec::with_capacity(ntheta);
        for j in 0..ntheta {
            let v = [
                self.bottom_curve[j],
                self.graph_height(1, j),
                self.graph_height(2, j),
            ];
            ur_bot.push(deriv(rho_bot, v));
        }

        let top = EndTrace::new(End::Top, ur_top, spectral_derivative(&self.top_curve))?;
        let bottom = EndTrace::new(End::Bottom, ur_bot, spectral_derivative(&self.bottom_curve))?;
        Ok((top, bottom))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{BoundaryCurve, FourierTerm};
    use crate::flux_center::{conservation_residuals, flux_vertical};
    use crate::jacobi::{mode_operator, WeightForm};

    fn curve(mean: f64, k: usize, a: f64) -> BoundaryCurve {
        BoundaryCurve::from_terms(&[
            FourierTerm { k: 0, a: mean, b: 0.0 },
            FourierTerm { k, a, b: 0.0 },
        ])
        .unwrap()
    }

    fn chart_for(kappa: f64, nt: usize, ntheta: usize) -> AnnulusChart {
        let cat = Catenoid::from_kappa(kappa).unwrap();
        let h = cat.half_height();
        build_chart(
            &cat,
            &ChartSpec { t_intervals: nt, sectors: ntheta, blend_width: Some(h / 6.0) },
        )
        .unwrap()
    }

    fn constant_pair(h: f64) -> CurvePair {
        CurvePair {
            upper: BoundaryCurve::constant(h),
            lower: BoundaryCurve::constant(-h),
        }
    }

    #[test]
    fn chart_validations() {
        let cat = Catenoid::from_kappa(1.0).unwrap();
        let h = cat.half_height();
        let too_wide =
            build_chart(&cat, &ChartSpec { t_intervals: 64, sectors: 16, blend_width: Some(h / 3.0) });
        assert!(matches!(too_wide, Err(Error::Domain(_))));
        let too_narrow =
            build_chart(&cat, &ChartSpec { t_intervals: 16, sectors: 16, blend_width: Some(h / 6.0) });
        assert!(matches!(too_narrow, Err(Error::Domain(_))));
    }

    #[test]
    fn base_correction_makes_catenoid_critical() {
        // û is a truncation object, O(Δt² + Δθ²) — visible at a coarse grid
        // and shrinking by ≈ 4 when both spacings halve.
        let coarse = chart_for(1.0, 48, 16);
        let coarse_max = inf_norm(&coarse.u_base);
        assert!(coarse_max > 1e-3 && coarse_max < 0.15, "û = {coarse_max}");
        let fine = chart_for(1.0, 96, 32);
        assert!(inf_norm(&fine.u_base) < 0.3 * coarse_max);
        // After the correction the zero deviation is critical to round-off.
        let zero = vec![0.0; 16];
        let g =
            area_gradient(&coarse, 1, &vec![0.0; coarse.interior_len(1)], &zero, &zero).unwrap();
        assert!(hessian_row_scale(&coarse) * inf_norm(&g) < 1e-8);
    }

    #[test]
    fn gradient_matches_finite_differences_of_area() {
        let chart = chart_for(0.8, 48, 12);
        let nt = chart.t_intervals();
        let ncol = 12usize;
        let top: Vec<f64> = (0..ncol).map(|j| 0.03 * (j as f64 * chart.dtheta).cos()).collect();
        let bottom = vec![0.01; ncol];
        let mut u = vec![0.0; (nt - 1) * ncol];
        for (i, v) in u.iter_mut().enumerate() {
            *v = 0.02 * ((i as f64) * 0.7).sin();
        }
        let g = area_gradient(&chart, 1, &u, &top, &bottom).unwrap();
        let eps = 1e-6;
        for &i in &[0usize, 7, 133, 290, 411, u.len() - 1] {
            let mut up = u.clone();
            up[i] += eps;
            let mut dn = u.clone();
            dn[i] -= eps;
            let fd = (discrete_area(&chart, 1, &up, &top, &bottom).unwrap()
                - discrete_area(&chart, 1, &dn, &top, &bottom).unwrap())
                / (2.0 * eps);
            assert!(
                (fd - g[i]).abs() < 1e-5 * (1.0 + g[i].abs()),
                "entry {i}: fd {fd} vs analytic {}",
                g[i]
            );
        }
    }

    #[test]
    fn hessian_matches_gradient_differences_and_is_symmetric() {
        let chart = chart_for(1.0, 48, 8);
        let nt = chart.t_intervals();
        let ncol = 8usize;
        let top: Vec<f64> = (0..ncol).map(|j| 0.05 * (j as f64 * chart.dtheta).sin()).collect();
        let bottom = vec![-0.02; ncol];
        let mut u = vec![0.0; (nt - 1) * ncol];
        for (i, v) in u.iter_mut().enumerate() {
            *v = 0.015 * ((i as f64) * 1.3).cos();
        }
        let h = interior_hessian(&chart, 1, &u, &top, &bottom).unwrap();
        assert!(h.asymmetry() < 1e-14);
        let eps = 1e-5;
        for &col in &[0usize, 5, 101, 203, u.len() - 1] {
            let mut up = u.clone();
            up[col] += eps;
            let mut dn = u.clone();
            dn[col] -= eps;
            let gp = area_gradient(&chart, 1, &up, &top, &bottom).unwrap();
            let gn = area_gradient(&chart, 1, &dn, &top, &bottom).unwrap();
            for row in 0..u.len() {
                let fd = (gp[row] - gn[row]) / (2.0 * eps);
                let an = h.get(row, col);
                assert!(
                    (fd - an).abs() < 1e-4 * (1.0 + an.abs()),
                    "H[{row},{col}]: fd {fd} vs analytic {an}"
                );
            }
        }
    }

    #[test]
    fn constant_data_solves_to_zero() {
        let chart = chart_for(1.0, 48, 16);
        let pair = constant_pair(chart.half_height);
        let opts = SolveOptions { symmetry: 8, ..SolveOptions::default() };
        let sol = solve(&chart, &pair, &opts).unwrap();
        assert!(sol.newton_residuals.len() <= 2);
        assert!(inf_norm(&sol.u) < 1e-12);
    }

    #[test]
    fn unfolded_solve_detects_degenerate_directions() {
        let chart = chart_for(1.0, 48, 32);
        let pair = constant_pair(chart.half_height);
        let err = solve(&chart, &pair, &SolveOptions::default()).unwrap_err();
        match err {
            Error::SingularLinearization { values } => {
                let near = values.iter().filter(|v| v.abs() < 1e-2).count();
                assert!(near >= 2, "expected two discretization-scale zeros: {values:?}");
                // The next directions are genuinely away from zero (≈ κ²).
                assert!(values.iter().any(|v| v.abs() > 0.5));
            }
            other => panic!("expected SingularLinearization, got {other:?}"),
        }
        // Damping pushes through and still finds the trivial solution.
        let opts = SolveOptions { damped_least_squares: true, ..SolveOptions::default() };
        let sol = solve(&chart, &pair, &opts).unwrap();
        assert!(inf_norm(&sol.u) < 1e-10);
    }

    #[test]
    fn mode_two_solve_has_quadratic_tail_and_conserved_fluxes() {
        let chart = chart_for(1.0, 96, 48);
        let h = chart.half_height;
        let pair = CurvePair { upper: curve(h, 2, 0.05), lower: curve(-h, 2, 0.03) };
        let opts = SolveOptions { symmetry: 2, ..SolveOptions::default() };
        let sol = solve(&chart, &pair, &opts).unwrap();
        let res = &sol.newton_residuals;
        assert!(res.len() <= 12, "history {res:?}");
        // Quadratic tail: once the residual is small, one step squares it.
        let i = res.iter().position(|&r| r < 1e-2).expect("no small residual");
        assert!(
            i + 1 < res.len() && res[i + 1] < 100.0 * res[i] * res[i] + 1e-14,
            "history {res:?}"
        );
        // The outer ring reproduces the boundary heights identically.
        let nt = sol.chart.t_intervals();
        for j in 0..sol.chart.sectors {
            let theta = j as f64 * sol.chart.dtheta;
            assert!((sol.graph_height(nt, j) - pair.upper.eval(theta)).abs() < 1e-13);
            assert!((sol.graph_height(0, j) - pair.lower.eval(theta)).abs() < 1e-13);
        }
        let (top, bottom) = sol.end_traces().unwrap();
        let resid = conservation_residuals(&top, &bottom).unwrap();
        assert!(resid.max() < 1e-4, "{resid:?}");
    }

    #[test]
    fn mirror_pair_conservation_is_structural() {
        // γ⁻ = −γ⁺ makes the solution odd in t; the end traces then satisfy
        // u⁻_r = −u⁺_r including the extraction error, so the conservation
        // residuals cancel far below truncation level.
        let chart = chart_for(1.0, 48, 16);
        let h = chart.half_height;
        let pair = CurvePair { upper: curve(h, 2, 0.12), lower: curve(-h, 2, -0.12) };
        let opts = SolveOptions { symmetry: 2, ..SolveOptions::default() };
        let sol = solve(&chart, &pair, &opts).unwrap();
        let (top, bottom) = sol.end_traces().unwrap();
        let resid = conservation_residuals(&top, &bottom).unwrap();
        assert!(resid.max() < 1e-10, "{resid:?}");
    }

    #[test]
    fn solved_catenoid_traces_match_closed_form() {
        // Absolute flux agreement is truncation-limited and improves under
        // refinement; the conservation residual cancels structurally.
        let kappa = 1.0;
        let exact = std::f64::consts::TAU / kappa;
        let flux_err = |nt: usize, ns: usize| -> f64 {
            let chart = chart_for(kappa, nt, ns);
            let pair = constant_pair(chart.half_height);
            let opts = SolveOptions { symmetry: 4, ..SolveOptions::default() };
            let sol = solve(&chart, &pair, &opts).unwrap();
            let (top, bottom) = sol.end_traces().unwrap();
            let resid = conservation_residuals(&top, &bottom).unwrap();
            assert!(resid.max() < 1e-12, "{resid:?}");
            flux_vertical(&top) - exact
        };
        let coarse = flux_err(96, 64);
        assert!(coarse.abs() < 5e-2, "{coarse}");
        let fine = flux_err(192, 128);
        assert!(fine.abs() < coarse.abs());
    }

    #[test]
    fn hessian_action_matches_mode_one_jacobi_operator() {
        // Scaled Hessian rows at the catenoid approximate −(∂t² + q − κ²)
        // on a mode-1 perturbation; the agreement must improve as Δ².
        let kappa = 1.0;
        let cat = Catenoid::from_kappa(kappa).unwrap();
        let h = cat.half_height();
        let err_at = |nt: usize, ncol: usize| -> f64 {
            let chart = chart_for(kappa, nt, ncol);
            let zero = vec![0.0; ncol];
            let support = h - chart.delta - 2.0 * chart.dt;
            let w: Vec<f64> = (1..nt)
                .map(|k| {
                    let t = chart.t[k];
                    if t.abs() >= support {
                        0.0
                    } else {
                        let s = std::f64::consts::FRAC_PI_2 * t / support;
                        s.cos().powi(2)
                    }
                })
                .collect();
            let mut u = vec![0.0; (nt - 1) * ncol];
            for k in 1..nt {
                for j in 0..ncol {
                    u[(k - 1) * ncol + j] = w[k - 1] * (j as f64 * chart.dtheta).cos();
                }
            }
            let mut hess = interior_hessian(&chart, 1, &vec![0.0; chart.interior_len(1)], &zero, &zero)
                .unwrap();
            let scale = hessian_row_scale(&chart);
            for i in 0..hess.n() {
                hess.scale_row(i, scale);
            }
            let y = hess.matvec(&u);
            // Fold the action back onto the cosine mode.
            let folded: Vec<f64> = (1..nt)
                .map(|k| {
                    let mut s = 0.0;
                    for j in 0..ncol {
                        s += y[(k - 1) * ncol + j] * (j as f64 * chart.dtheta).cos();
                    }
                    2.0 * s / ncol as f64
                })
                .collect();
            let op = mode_operator(&cat, 1, nt - 1, WeightForm::Flat).unwrap();
            let expected: Vec<f64> = op.apply(&w).iter().map(|v| -v).collect();
            let scale_ref = inf_norm(&expected);
            folded
                .iter()
                .zip(&expected)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
                / scale_ref
        };
        let coarse = err_at(48, 24);
        let fine = err_at(96, 48);
        assert!(fine < 0.12, "fine-grid relative error {fine}");
        assert!(coarse / fine > 3.0, "no quadratic decay: {coarse} vs {fine}");
    }
}

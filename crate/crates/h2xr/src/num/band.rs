//! Banded LU with partial pivoting, plus shift–invert subspace iteration for
//! the smallest singular values of symmetric band matrices.
//!
//! Storage follows the LAPACK `dgbtrf` convention: column-major panels of
//! height `2·kl + ku + 1`, entry (i, j) at panel row `kl + ku + i − j`, with
//! the top `kl` panel rows reserved for pivoting fill-in. The polar-grid
//! Jacobians of both solvers fit this pattern with `kl = ku ≈ Nθ` (the
//! angular wrap-around sets the bandwidth), so a dense factorization is never
//! needed.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    #[must_use]
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        assert!(n > 0);
        let ldab = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            ldab,
            data: vec![0.0; ldab * n],
        }
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + (self.kl + self.ku + i - j)
    }

    #[inline]
    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && i + self.ku >= j && j + self.kl >= i
    }

    #[must_use]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            0.0
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "({i},{j}) outside band kl={} ku={}", self.kl, self.ku);
        let id = self.idx(i, j);
        self.data[id] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "({i},{j}) outside band kl={} ku={}", self.kl, self.ku);
        let id = self.idx(i, j);
        self.data[id] += v;
    }

    /// Replace row i by zeros with a one on the diagonal (Dirichlet rows).
    pub fn set_identity_row(&mut self, i: usize) {
        let j_lo = i.saturating_sub(self.kl);
        let j_hi = (i + self.ku).min(self.n - 1);
        for j in j_lo..=j_hi {
            let id = self.idx(i, j);
            self.data[id] = if i == j { 1.0 } else { 0.0 };
        }
    }

    pub fn scale_row(&mut self, i: usize, s: f64) {
        let j_lo = i.saturating_sub(self.kl);
        let j_hi = (i + self.ku).min(self.n - 1);
        for j in j_lo..=j_hi {
            let id = self.idx(i, j);
            self.data[id] *= s;
        }
    }

    pub fn shift_diagonal(&mut self, s: f64) {
        for i in 0..self.n {
            let id = self.idx(i, i);
            self.data[id] += s;
        }
    }

    #[must_use]
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for j in 0..self.n {
            let i_lo = j.saturating_sub(self.ku);
            let i_hi = (j + self.kl).min(self.n - 1);
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            for i in i_lo..=i_hi {
                y[i] += self.data[self.idx(i, j)] * xj;
            }
        }
        y
    }

    /// Max absolute row sum.
    #[must_use]
    pub fn inf_norm(&self) -> f64 {
        let mut sums = vec![0.0; self.n];
        for j in 0..self.n {
            let i_lo = j.saturating_sub(self.ku);
            let i_hi = (j + self.kl).min(self.n - 1);
            for i in i_lo..=i_hi {
                sums[i] += self.data[self.idx(i, j)].abs();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Max |A − Aᵀ| entry over the band (symmetry diagnostic).
    #[must_use]
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.n {
            let i_lo = j.saturating_sub(self.ku);
            for i in i_lo..=j {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// LU factorization with partial pivoting; consumes the matrix.
    pub fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        let mut ipiv = vec![0usize; n];
        let fill_ku = ku + kl; // upper bandwidth after pivoting fill-in

        for j in 0..n {
            // Pivot search in column j, rows j..=j+kl.
            let i_hi = (j + kl).min(n - 1);
            let mut p = j;
            let mut pmax = self.data[self.idx(j, j)].abs();
            for i in (j + 1)..=i_hi {
                let v = self.data[self.idx(i, j)].abs();
                if v > pmax {
                    pmax = v;
                    p = i;
                }
            }
            if pmax == 0.0 {
                return Err(Error::Numerics {
                    context: format!("banded LU hit an exactly zero pivot at column {j}"),
                    achieved: 0.0,
                    required: f64::MIN_POSITIVE,
                });
            }
            ipiv[j] = p;
            if p != j {
                let jj_hi = (j + fill_ku).min(n - 1);
                for jj in j..=jj_hi {
                    let a = self.idx(j, jj);
                    let b = self.idx(p, jj);
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.idx(j, j)];
            for i in (j + 1)..=i_hi {
                let id_ij = self.idx(i, j);
                let m = self.data[id_ij] / pivot;
                self.data[id_ij] = m;
                if m != 0.0 {
                    let jj_hi = (j + fill_ku).min(n - 1);
                    for jj in (j + 1)..=jj_hi {
                        let a_jjj = self.data[self.idx(j, jj)];
                        if a_jjj != 0.0 {
                            let id = self.idx(i, jj);
                            self.data[id] -= m * a_jjj;
                        }
                    }
                }
            }
        }

        Ok(BandLu {
            n,
            kl,
            ku,
            ldab: self.ldab,
            data: self.data,
            ipiv,
        })
    }
}

/// Factored form; solves share the storage, nothing is recomputed.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandLu {
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + (self.kl + self.ku + i - j)
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let fill_ku = self.ku + self.kl;
        // Forward: apply P and L.
        for k in 0..n {
            let p = self.ipiv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                let i_hi = (k + self.kl).min(n - 1);
                for i in (k + 1)..=i_hi {
                    b[i] -= self.data[self.idx(i, k)] * bk;
                }
            }
        }
        // Backward: U.
        for k in (0..n).rev() {
            let jj_hi = (k + fill_ku).min(n - 1);
            let mut s = b[k];
            for jj in (k + 1)..=jj_hi {
                s -= self.data[self.idx(k, jj)] * b[jj];
            }
            b[k] = s / self.data[self.idx(k, k)];
        }
    }

    #[must_use]
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Deterministic xorshift64* stream mapped to [−1, 1).
fn xorshift_unit(state: &mut u64) -> f64 {
    let mut x = *state;
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    *state = x;
    let mantissa = x.wrapping_mul(0x2545_F491_4F6C_DD1D) >> 11;
    2.0 * (mantissa as f64 / (1u64 << 53) as f64) - 1.0
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigenvalues of a small dense symmetric matrix by cyclic Jacobi rotations.
fn small_symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let k = a.len();
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..k {
            for q in (p + 1)..k {
                off += a[p][q] * a[p][q];
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..k {
            for q in (p + 1)..k {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..k {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for i in 0..k {
                    let api = a[p][i];
                    let aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
        }
    }
    (0..k).map(|i| a[i][i]).collect()
}

/// Smallest-magnitude eigenvalues of a symmetric band matrix via
/// shift–invert subspace iteration; for symmetric matrices these magnitudes
/// are the smallest singular values.
///
/// The factorization may be of A + σI for a tiny σ when A itself is
/// numerically singular (the interesting case); Rayleigh–Ritz values are
/// always computed against the original A, so the reported eigenvalues are
/// unshifted.
pub fn symmetric_smallest_eigenvalues(
    a: &BandMatrix,
    k: usize,
    max_iters: usize,
    rtol: f64,
) -> Result<Vec<f64>> {
    let n = a.n();
    assert!(k >= 1 && k <= n);
    let scale = a.inf_norm().max(f64::MIN_POSITIVE);

    let mut shift = 0.0;
    let lu = loop {
        let mut work = a.clone();
        if shift != 0.0 {
            work.shift_diagonal(shift);
        }
        match work.factor() {
            Ok(lu) => break lu,
            Err(_) if shift < 1e-8 * scale => {
                shift = if shift == 0.0 { 1e-14 * scale } else { shift * 100.0 };
            }
            Err(e) => return Err(e),
        }
    };

    let mut state = 0x9E37_79B9_7F4A_7C15u64;
    let mut basis: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..n).map(|_| xorshift_unit(&mut state)).collect())
        .collect();
    orthonormalize(&mut basis);

    let mut prev: Option<Vec<f64>> = None;
    for _ in 0..max_iters {
        for col in basis.iter_mut() {
            lu.solve_in_place(col);
        }
        orthonormalize(&mut basis);

        // Rayleigh–Ritz against the original matrix.
        let images: Vec<Vec<f64>> = basis.iter().map(|x| a.matvec(x)).collect();
        let mut t = vec![vec![0.0; k]; k];
        for p in 0..k {
            for q in 0..k {
                t[p][q] = dot(&basis[p], &images[q]);
            }
        }
        // Symmetrize round-off before the small eigensolve.
        for p in 0..k {
            for q in (p + 1)..k {
                let avg = 0.5 * (t[p][q] + t[q][p]);
                t[p][q] = avg;
                t[q][p] = avg;
            }
        }
        let mut theta = small_symmetric_eigenvalues(t);
        theta.sort_by(|x, y| x.abs().total_cmp(&y.abs()));

        if let Some(p) = &prev {
            let drift = theta
                .iter()
                .zip(p)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            if drift <= rtol * scale {
                return Ok(theta);
            }
        }
        prev = Some(theta);
    }
    prev.ok_or_else(|| Error::Numerics {
        context: "subspace iteration produced no estimate".into(),
        achieved: f64::INFINITY,
        required: rtol,
    })
}

fn orthonormalize(basis: &mut [Vec<f64>]) {
    for i in 0..basis.len() {
        for j in 0..i {
            let proj = dot(&basis[i], &basis[j]);
            let (head, tail) = basis.split_at_mut(i);
            for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                *x -= proj * y;
            }
        }
        let nrm = norm(&basis[i]);
        if nrm > 0.0 {
            for x in basis[i].iter_mut() {
                *x /= nrm;
            }
        }
    }
}

/// Largest-magnitude eigenvalue estimate by power iteration (symmetric A).
#[must_use]
pub fn symmetric_largest_eigenvalue(a: &BandMatrix, iters: usize) -> f64 {
    let n = a.n();
    let mut state = 0xDEAD_BEEF_CAFE_F00Du64;
    let mut v: Vec<f64> = (0..n).map(|_| xorshift_unit(&mut state)).collect();
    let nrm = norm(&v);
    for x in v.iter_mut() {
        *x /= nrm;
    }
    let mut lam = 0.0;
    for _ in 0..iters {
        let w = a.matvec(&v);
        lam = dot(&w, &v);
        let nrm = norm(&w);
        if nrm == 0.0 {
            return 0.0;
        }
        v = w.into_iter().map(|x| x / nrm).collect();
    }
    lam
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_solve_oracle(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        // Plain Gaussian elimination with partial pivoting, as a reference.
        let n = b.len();
        let mut m: Vec<Vec<f64>> = a.to_vec();
        let mut x = b.to_vec();
        for j in 0..n {
            let p = (j..n).max_by(|&r, &s| m[r][j].abs().total_cmp(&m[s][j].abs())).unwrap();
            m.swap(j, p);
            x.swap(j, p);
            for i in (j + 1)..n {
                let f = m[i][j] / m[j][j];
                for jj in j..n {
                    let v = m[j][jj];
                    m[i][jj] -= f * v;
                }
                x[i] -= f * x[j];
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for jj in (k + 1)..n {
                s -= m[k][jj] * x[jj];
            }
            x[k] = s / m[k][k];
        }
        x
    }

    fn random_band(n: usize, kl: usize, ku: usize, seed: u64) -> (BandMatrix, Vec<Vec<f64>>) {
        let mut state = seed;
        let mut band = BandMatrix::zeros(n, kl, ku);
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i + ku >= j && j + kl >= i {
                    let v = xorshift_unit(&mut state) + if i == j { 4.0 } else { 0.0 };
                    band.set(i, j, v);
                    dense[i][j] = v;
                }
            }
        }
        (band, dense)
    }

    #[test]
    fn band_solve_matches_dense_oracle() {
        for &(n, kl, ku, seed) in &[(12usize, 2usize, 3usize, 7u64), (30, 5, 5, 11), (17, 1, 4, 23)] {
            let (band, dense) = random_band(n, kl, ku, seed);
            let mut state = seed ^ 0xABCD;
            let b: Vec<f64> = (0..n).map(|_| xorshift_unit(&mut state)).collect();
            let x = band.clone().factor().unwrap().solve(&b);
            let x_ref = dense_solve_oracle(&dense, &b);
            for (got, want) in x.iter().zip(&x_ref) {
                assert!((got - want).abs() < 1e-10, "n={n} kl={kl} ku={ku}");
            }
        }
    }

    #[test]
    fn pivoting_handles_zero_leading_diagonal() {
        let mut band = BandMatrix::zeros(3, 1, 1);
        // [[0,1,0],[2,1,1],[0,1,3]] needs a row swap at column 0.
        band.set(0, 0, 0.0);
        band.set(0, 1, 1.0);
        band.set(1, 0, 2.0);
        band.set(1, 1, 1.0);
        band.set(1, 2, 1.0);
        band.set(2, 1, 1.0);
        band.set(2, 2, 3.0);
        let lu = band.clone().factor().unwrap();
        let b = vec![1.0, 2.0, 3.0];
        let x = lu.solve(&b);
        let back = band.matvec(&x);
        for (got, want) in back.iter().zip(&b) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn matvec_round_trip_on_wrapped_stencil_pattern() {
        // Bandwidth wide enough to host a periodic 5-point stencil row block.
        let ntheta = 8;
        let n = 4 * ntheta;
        let mut band = BandMatrix::zeros(n, ntheta, ntheta);
        for i in 0..n {
            band.add(i, i, -4.0);
            let ring = i / ntheta;
            let j = i % ntheta;
            let left = ring * ntheta + (j + ntheta - 1) % ntheta;
            let right = ring * ntheta + (j + 1) % ntheta;
            if (i as isize - left as isize).unsigned_abs() <= ntheta {
                band.add(i, left, 1.0);
            }
            if (right as isize - i as isize).unsigned_abs() <= ntheta {
                band.add(i, right, 1.0);
            }
            if ring > 0 {
                band.add(i, i - ntheta, 1.0);
            }
            if ring < 3 {
                band.add(i, i + ntheta, 1.0);
            }
        }
        let mut state = 99u64;
        let x: Vec<f64> = (0..n).map(|_| xorshift_unit(&mut state)).collect();
        let y = band.matvec(&x);
        let x_back = band.factor().unwrap().solve(&y);
        for (got, want) in x_back.iter().zip(&x) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn singular_matrix_reports_zero_pivot() {
        let mut band = BandMatrix::zeros(2, 1, 1);
        band.set(0, 0, 1.0);
        band.set(0, 1, 2.0);
        band.set(1, 0, 0.5);
        band.set(1, 1, 1.0); // second row = half the first: exactly singular
        let err = band.factor().unwrap_err();
        assert!(matches!(err, Error::Numerics { .. }));
    }

    #[test]
    fn subspace_iteration_finds_known_smallest_eigenvalues() {
        // 1D Dirichlet Laplacian as a band matrix: spectrum is known.
        let n = 60;
        let mut band = BandMatrix::zeros(n, 1, 1);
        for i in 0..n {
            band.add(i, i, 2.0);
            if i > 0 {
                band.add(i, i - 1, -1.0);
            }
            if i + 1 < n {
                band.add(i, i + 1, -1.0);
            }
        }
        let got = symmetric_smallest_eigenvalues(&band, 3, 200, 1e-12).unwrap();
        let lam = |k: usize| {
            4.0 * (k as f64 * std::f64::consts::PI / (2.0 * (n as f64 + 1.0)))
                .sin()
                .powi(2)
        };
        for (i, g) in got.iter().enumerate() {
            assert!(
                (g - lam(i + 1)).abs() < 1e-8,
                "eig {i}: got {g}, want {}",
                lam(i + 1)
            );
        }
    }

    #[test]
    fn power_iteration_bounds_the_spectrum_from_above() {
        let (band, _) = random_band(40, 3, 3, 5);
        // Symmetrize.
        let mut sym = BandMatrix::zeros(40, 3, 3);
        for i in 0..40 {
            for j in 0..40 {
                if sym.in_band(i, j) {
                    sym.set(i, j, 0.5 * (band.get(i, j) + band.get(j, i)));
                }
            }
        }
        let lam_max = symmetric_largest_eigenvalue(&sym, 300).abs();
        let small = symmetric_smallest_eigenvalues(&sym, 1, 200, 1e-12).unwrap();
        assert!(lam_max >= small[0].abs());
        assert!(lam_max <= sym.inf_norm() + 1e-9);
    }
}

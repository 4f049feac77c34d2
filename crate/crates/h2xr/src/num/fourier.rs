//! Real trigonometric analysis on uniform periodic grids θ_j = 2πj/N.
//!
//! Direct O(N²) sums: every grid in this project has N ≤ 1024, where the
//! transform is microseconds and exactness of conventions matters more than
//! asymptotics. Convention: f(θ) = a₀ + Σ_{k≥1} (a_k cos kθ + b_k sin kθ),
//! with the Nyquist cosine (k = N/2, even N) carrying weight 1/N and its sine
//! partner identically zero.

/// Trigonometric polynomial in the convention above; `a.len() == b.len()`,
/// index k is the frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSeries {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl TrigSeries {
    #[must_use]
    pub fn zero(max_k: usize) -> Self {
        TrigSeries {
            a: vec![0.0; max_k + 1],
            b: vec![0.0; max_k + 1],
        }
    }

    #[must_use]
    pub fn max_k(&self) -> usize {
        self.a.len() - 1
    }

    #[must_use]
    pub fn eval(&self, theta: f64) -> f64 {
        let mut s = self.a[0];
        for k in 1..self.a.len() {
            let kt = k as f64 * theta;
            s += self.a[k] * kt.cos() + self.b[k] * kt.sin();
        }
        s
    }

    /// Term-by-term derivative. The Nyquist cosine coefficient is dropped
    /// (its derivative is not representable on the same symmetric grid).
    #[must_use]
    pub fn derivative(&self) -> TrigSeries {
        let kmax = self.max_k();
        let mut d = TrigSeries::zero(kmax);
        for k in 1..=kmax {
            d.a[k] = k as f64 * self.b[k];
            d.b[k] = -(k as f64) * self.a[k];
        }
        d
    }

    /// Rotated curve θ ↦ θ − zeta (the graph of the rotated function).
    #[must_use]
    pub fn rotate(&self, zeta: f64) -> TrigSeries {
        let kmax = self.max_k();
        let mut r = TrigSeries::zero(kmax);
        r.a[0] = self.a[0];
        for k in 1..=kmax {
            let (s, c) = (k as f64 * zeta).sin_cos();
            // cos k(θ−ζ) = cos kθ cos kζ + sin kθ sin kζ, etc.
            r.a[k] = self.a[k] * c - self.b[k] * s;
            r.b[k] = self.b[k] * c + self.a[k] * s;
        }
        r
    }

    /// Largest |coefficient| with frequency not divisible by m (m ≥ 1).
    #[must_use]
    pub fn off_symmetry_mass(&self, m: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 1..=self.max_k() {
            if k % m != 0 {
                worst = worst.max(self.a[k].abs()).max(self.b[k].abs());
            }
        }
        worst
    }
}

/// Coefficients of the unique trig interpolant of `samples` (N ≥ 2).
#[must_use]
pub fn analyze(samples: &[f64]) -> TrigSeries {
    let n = samples.len();
    assert!(n >= 2, "need at least two samples");
    let kmax = n / 2;
    let mut series = TrigSeries::zero(kmax);
    let w = 2.0 * std::f64::consts::PI / n as f64;
    series.a[0] = samples.iter().sum::<f64>() / n as f64;
    for k in 1..=kmax {
        let mut ca = 0.0;
        let mut cb = 0.0;
        for (j, &f) in samples.iter().enumerate() {
            let (s, c) = (w * (k * j) as f64).sin_cos();
            ca += f * c;
            cb += f * s;
        }
        let nyquist = n % 2 == 0 && k == n / 2;
        let scale = if nyquist { 1.0 } else { 2.0 } / n as f64;
        series.a[k] = ca * scale;
        series.b[k] = if nyquist { 0.0 } else { cb * scale };
    }
    series
}

/// Samples of the series on the uniform N-grid.
#[must_use]
pub fn synthesize(series: &TrigSeries, n: usize) -> Vec<f64> {
    let w = 2.0 * std::f64::consts::PI / n as f64;
    (0..n).map(|j| series.eval(w * j as f64)).collect()
}

/// Spectral derivative of periodic samples (differentiate the interpolant).
#[must_use]
pub fn spectral_derivative(samples: &[f64]) -> Vec<f64> {
    synthesize(&analyze(samples).derivative(), samples.len())
}

/// Trapezoid rule on the uniform periodic grid — spectrally accurate for
/// smooth 2π-periodic integrands.
#[must_use]
pub fn periodic_integral(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() * 2.0 * std::f64::consts::PI / samples.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
    }

    #[test]
    fn analyze_recovers_a_trig_polynomial() {
        let n = 32;
        let samples: Vec<f64> = grid(n)
            .iter()
            .map(|t| 1.5 - 0.25 * (3.0 * t).cos() + 0.7 * (5.0 * t).sin())
            .collect();
        let s = analyze(&samples);
        assert!((s.a[0] - 1.5).abs() < 1e-13);
        assert!((s.a[3] + 0.25).abs() < 1e-13);
        assert!((s.b[5] - 0.7).abs() < 1e-13);
        let total: f64 = (0..=s.max_k())
            .map(|k| s.a[k].abs() + s.b[k].abs())
            .sum();
        assert!((total - (1.5 + 0.25 + 0.7)).abs() < 1e-12, "no spurious mass");
    }

    #[test]
    fn synthesis_round_trips_random_samples() {
        let n = 24;
        let mut x = 123u64;
        let samples: Vec<f64> = (0..n)
            .map(|_| {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                (x % 1000) as f64 / 500.0 - 1.0
            })
            .collect();
        let back = synthesize(&analyze(&samples), n);
        for (got, want) in back.iter().zip(&samples) {
            assert!((got - want).abs() < 1e-11);
        }
    }

    #[test]
    fn spectral_derivative_matches_closed_form() {
        let n = 48;
        let samples: Vec<f64> = grid(n).iter().map(|t| (3.0 * t).cos()).collect();
        let want: Vec<f64> = grid(n).iter().map(|t| -3.0 * (3.0 * t).sin()).collect();
        for (got, want) in spectral_derivative(&samples).iter().zip(&want) {
            assert!((got - want).abs() < 1e-11);
        }
    }

    #[test]
    fn rotation_shifts_the_graph() {
        let n = 40;
        let samples: Vec<f64> = grid(n).iter().map(|t| (2.0 * t).sin() + t.cos()).collect();
        let s = analyze(&samples);
        let zeta = 0.7;
        let rotated = s.rotate(zeta);
        for t in grid(n) {
            assert!((rotated.eval(t) - s.eval(t - zeta)).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_trapezoid_is_spectrally_exact() {
        let n = 16;
        let samples: Vec<f64> = grid(n).iter().map(|t| 2.0 + (4.0 * t).cos()).collect();
        assert!((periodic_integral(&samples) - 4.0 * PI).abs() < 1e-12);
    }
}

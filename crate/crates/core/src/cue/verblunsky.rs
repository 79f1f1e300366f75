//! CUE eigenvalues through the Killip-Nenciu Verblunsky coefficients.
//!
//! The characteristic polynomial of an `N x N` Haar unitary has the law of the degree-`N`
//! Szegő polynomial whose coefficients `alpha_0, ..., alpha_{N-2}` are independent and
//! rotation invariant with `|alpha_k|^2 ~ Beta(1, N - k - 1)`, and `alpha_{N-1}` uniform on the
//! unit circle. This gives the polynomial in `O(N^2)` and point values in `O(N)`, with no
//! eigensolve.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{EigenAngles, TraceVector};
use crate::error::{domain, Error, Result};
use crate::rng::CounterRng;

pub const MAX_VERBLUNSKY_N: usize = 1 << 16;

/// Verblunsky coefficients of one CUE draw.
#[derive(Clone, Debug, PartialEq)]
pub struct Verblunsky {
    pub seed: u64,
    pub alpha: Vec<Complex64>,
}

impl Verblunsky {
    /// Uniforms for `(|alpha_k|, arg alpha_k)` are read in order from stream `0` under `seed`.
    pub fn sample(n: usize, seed: u64) -> Result<Self> {
        if n < 1 {
            return domain("N must be at least 1");
        }
        if n > MAX_VERBLUNSKY_N {
            return Err(Error::Capacity(format!("Verblunsky sampler limited to N <= {MAX_VERBLUNSKY_N}")));
        }
        let mut rng = CounterRng::new(seed, 0);
        let alpha = (0..n)
            .map(|k| {
                let r = if k + 1 < n {
                    let u = rng.uniform_open0();
                    (1.0 - u.powf(1.0 / (n - k - 1) as f64)).sqrt()
                } else {
                    1.0
                };
                Complex64::from_polar(r, TAU * rng.uniform())
            })
            .collect();
        Ok(Self { seed, alpha })
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    /// Monic characteristic polynomial coefficients `c_0..=c_N` (`c_j` multiplies `z^j`), from
    /// `Phi_{k+1}(z) = z Phi_k(z) - conj(alpha_k) Phi_k^*(z)`.
    pub fn coefficients(&self) -> Vec<Complex64> {
        let n = self.n();
        let mut phi = vec![Complex64::new(0.0, 0.0); n + 1];
        let mut next = phi.clone();
        phi[0] = Complex64::new(1.0, 0.0);
        for (k, a) in self.alpha.iter().enumerate() {
            let ab = a.conj();
            for j in 0..=k + 1 {
                let shifted = if j > 0 { phi[j - 1] } else { Complex64::new(0.0, 0.0) };
                let star = if j <= k { phi[k - j].conj() } else { Complex64::new(0.0, 0.0) };
                next[j] = shifted - ab * star;
            }
            std::mem::swap(&mut phi, &mut next);
        }
        phi
    }

    /// `Tr U^k` for `k = 1..=k_max` from the coefficients by Newton's identities.
    pub fn traces(&self, k_max: usize) -> TraceVector {
        traces_from_coefficients(&self.coefficients(), k_max)
    }

    /// `log |Phi_N(e^{i theta})|` by the `O(N)` recursion on `b_k = z Phi_k / Phi_k^*`.
    pub fn log_abs_at(&self, theta: f64) -> f64 {
        let z = Complex64::from_polar(1.0, theta);
        let n = self.n();
        let mut b = z;
        let mut acc = 0.0;
        for a in &self.alpha[..n - 1] {
            let w = Complex64::new(1.0, 0.0) - a * b;
            acc += w.norm().ln();
            b = z * (b - a.conj()) / w;
            // Re-normalize: |b| = 1 exactly in exact arithmetic.
            b /= b.norm();
        }
        acc + (b - self.alpha[n - 1].conj()).norm().ln()
    }

    /// Prüfer phase `psi_{N-1}(theta)` (a continuous lift) and its derivative.
    fn pruefer(&self, theta: f64) -> (f64, f64) {
        let n = self.n();
        let (mut psi, mut dpsi) = (theta, 1.0);
        for a in &self.alpha[..n - 1] {
            let w = Complex64::new(1.0, 0.0) - a * Complex64::from_polar(1.0, psi);
            let rho2 = 1.0 - a.norm_sqr();
            dpsi = 1.0 + dpsi * rho2 / w.norm_sqr();
            psi = theta + psi - 2.0 * w.arg();
        }
        (psi, dpsi)
    }

    /// Eigenangles as the solutions of `psi_{N-1}(theta) = -arg alpha_{N-1} (mod 2 pi)`.
    ///
    /// `psi_{N-1}` increases by exactly `2 pi N` over one turn, so there are exactly `N`
    /// crossings; each is bracketed and polished by safeguarded Newton steps.
    pub fn eigenangles(&self) -> EigenAngles {
        let n = self.n();
        let target = -self.alpha[n - 1].arg();
        let psi0 = self.pruefer(0.0).0;
        // Crossing levels target + 2 pi m strictly inside (psi0, psi0 + 2 pi N].
        let m0 = ((psi0 - target) / TAU).floor() as i64 + 1;
        let mut angles = Vec::with_capacity(n);
        // psi is increasing with slope >= 1 - ... > 0; coarse grid to bracket each level.
        let grid = 8 * n;
        let pts: Vec<(f64, f64)> = (0..=grid)
            .map(|i| {
                let t = TAU * i as f64 / grid as f64;
                (t, if i == grid { psi0 + TAU * n as f64 } else { self.pruefer(t).0 })
            })
            .collect();
        let mut seg = 0;
        for m in 0..n as i64 {
            let level = target + TAU * (m0 + m) as f64;
            while seg < grid && pts[seg + 1].1 < level {
                seg += 1;
            }
            let (mut lo, mut hi) = (pts[seg].0, pts[seg + 1].0);
            let mut t = 0.5 * (lo + hi);
            for _ in 0..100 {
                let (p, dp) = self.pruefer(t);
                let f = p - level;
                if f > 0.0 {
                    hi = t;
                } else {
                    lo = t;
                }
                let newton = t - f / dp;
                let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
                if (next - t).abs() < 1e-15 || hi - lo < 1e-15 {
                    t = next;
                    break;
                }
                t = next;
            }
            angles.push(t.rem_euclid(TAU));
        }
        EigenAngles::from_unsorted(angles, self.seed)
    }
}

/// Power sums `p_k = sum_j lambda_j^k` of the roots of a monic polynomial.
pub fn traces_from_coefficients(c: &[Complex64], k_max: usize) -> TraceVector {
    let n = c.len() - 1;
    // a_i multiplies z^{N-i}.
    let a = |i: usize| c[n - i];
    let mut p = vec![Complex64::new(0.0, 0.0); k_max + 1];
    for k in 1..=k_max {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 1..k.min(n + 1) {
            s += a(i) * p[k - i];
        }
        if k <= n {
            s += a(k) * k as f64;
        }
        p[k] = -s;
    }
    p.remove(0);
    TraceVector { values: p }
}

/// Evaluates `log |Phi_N|` on a shifted grid `theta_m = 2 pi (m + 1/2) / M` by one FFT.
pub struct GridEvaluator {
    m: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl GridEvaluator {
    pub fn new(m: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_inverse(m);
        Self { m, fft }
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.m).map(|i| TAU * (i as f64 + 0.5) / self.m as f64).collect()
    }

    /// Requires `M > N`.
    pub fn log_abs(&self, coeffs: &[Complex64]) -> Result<Vec<f64>> {
        if coeffs.len() > self.m {
            return domain("grid must have more points than the polynomial degree");
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); self.m];
        for (j, c) in coeffs.iter().enumerate() {
            buf[j] = c * Complex64::from_polar(1.0, PI * j as f64 / self.m as f64);
        }
        self.fft.process(&mut buf);
        Ok(buf.iter().map(|v| v.norm().ln()).collect())
    }
}

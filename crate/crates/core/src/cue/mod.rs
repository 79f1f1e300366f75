//! Haar unitary matrices and the log-characteristic polynomial on the unit circle.
//!
//! Two routes to the same law: [`haar`] samples the matrix densely and diagonalizes it;
//! [`verblunsky`] samples the characteristic polynomial directly, which is what makes
//! `N` in the thousands affordable. Everything here is `f64`.

pub mod haar;
pub mod verblunsky;

use std::f64::consts::{LN_2, PI, TAU};

use num_complex::Complex64;

pub use haar::{
    haar_matrix, log_abs_det_shift, sample_haar, sample_haar_with_matrix, HaarSample, MAX_HAAR_N,
};
pub use verblunsky::{traces_from_coefficients, GridEvaluator, Verblunsky};

use crate::error::{domain, Error, Result};

/// Sorted eigenangles in `[0, 2 pi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenAngles {
    pub seed: u64,
    pub angles: Vec<f64>,
}

impl EigenAngles {
    pub fn from_unsorted(mut angles: Vec<f64>, seed: u64) -> Self {
        for a in &mut angles {
            *a = a.rem_euclid(TAU);
            if *a >= TAU {
                *a = 0.0;
            }
        }
        angles.sort_by(f64::total_cmp);
        Self { seed, angles }
    }

    pub fn n(&self) -> usize {
        self.angles.len()
    }

    /// Gaps between consecutive angles, including the wrap-around gap.
    pub fn gaps(&self) -> Vec<f64> {
        let n = self.angles.len();
        (0..n)
            .map(|i| {
                if i + 1 < n {
                    self.angles[i + 1] - self.angles[i]
                } else {
                    self.angles[0] + TAU - self.angles[i]
                }
            })
            .collect()
    }

    /// CSV with header `index,angle`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,angle\n");
        for (i, a) in self.angles.iter().enumerate() {
            s.push_str(&format!("{i},{a}\n"));
        }
        s
    }
}

/// `t_k = Tr U^k`, stored at `values[k - 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceVector {
    pub values: Vec<Complex64>,
}

impl TraceVector {
    pub fn k_max(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, k: usize) -> Complex64 {
        self.values[k - 1]
    }

    /// CSV with header `k,re,im`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,re,im\n");
        for (i, t) in self.values.iter().enumerate() {
            s.push_str(&format!("{},{},{}\n", i + 1, t.re, t.im));
        }
        s
    }
}

/// Exact power sums of the angles.
pub fn traces(angles: &EigenAngles, k_max: usize) -> TraceVector {
    let mut values = vec![Complex64::new(0.0, 0.0); k_max];
    for &a in &angles.angles {
        let z = Complex64::from_polar(1.0, a);
        let mut w = Complex64::new(1.0, 0.0);
        for (k, v) in values.iter_mut().enumerate() {
            // Recompute the power directly every 64 steps to keep rounding from accumulating.
            w = if (k + 1) % 64 == 0 {
                Complex64::from_polar(1.0, a * (k + 1) as f64)
            } else {
                w * z
            };
            *v += w;
        }
    }
    TraceVector { values }
}

pub const SINGULAR_GAP: f64 = 1e-13;

/// `sum_j log(2 |sin((theta - lambda_j)/2)|)`.
pub fn log_charpoly(angles: &EigenAngles, theta: f64) -> Result<f64> {
    let mut s = 0.0;
    for &a in &angles.angles {
        let d = periodic_distance(theta, a);
        if d < SINGULAR_GAP {
            return Err(Error::Singular(format!(
                "theta = {theta} lies within {SINGULAR_GAP} of the eigenangle {a}"
            )));
        }
        s += (2.0 * (0.5 * (theta - a)).sin().abs()).ln();
    }
    Ok(s)
}

/// Values of `log |P|` on a grid, with the maximum and its grid index.
#[derive(Clone, Debug, PartialEq)]
pub struct CueFieldSample {
    pub seed: u64,
    pub n: usize,
    pub theta: Vec<f64>,
    pub values: Vec<f64>,
    /// Grid indices dropped because they hit an eigenangle.
    pub excluded: Vec<usize>,
}

impl CueFieldSample {
    pub fn max(&self) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, &v) in self.values.iter().enumerate() {
            if v > best.0 {
                best = (v, i);
            }
        }
        best
    }

    /// CSV with header `theta,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("theta,value\n");
        for (t, v) in self.theta.iter().zip(&self.values) {
            s.push_str(&format!("{t},{v}\n"));
        }
        s
    }
}

/// `log |P|` on `theta_m = 2 pi (m + 1/2) / M` from the angles directly, `O(N M)`.
pub fn field_on_grid(angles: &EigenAngles, m: usize) -> Result<CueFieldSample> {
    if m < angles.n() {
        return domain(format!("grid size M = {m} must be at least N = {}", angles.n()));
    }
    let mut theta = Vec::with_capacity(m);
    let mut values = Vec::with_capacity(m);
    let mut excluded = Vec::new();
    for i in 0..m {
        let t = TAU * (i as f64 + 0.5) / m as f64;
        match log_charpoly(angles, t) {
            Ok(v) => {
                theta.push(t);
                values.push(v);
            }
            Err(Error::Singular(_)) => excluded.push(i),
            Err(e) => return Err(e),
        }
    }
    Ok(CueFieldSample {
        seed: angles.seed,
        n: angles.n(),
        theta,
        values,
        excluded,
    })
}

/// The same grid from a Verblunsky draw through one FFT, `O(N^2 + M log M)`.
pub fn field_on_grid_fast(v: &Verblunsky, eval: &GridEvaluator) -> Result<CueFieldSample> {
    let values = eval.log_abs(&v.coefficients())?;
    Ok(CueFieldSample {
        seed: v.seed,
        n: v.n(),
        theta: eval.thetas(),
        values,
        excluded: Vec::new(),
    })
}

/// `Y_theta(l) = sum_{2^{l-1} < k <= 2^l} -Re(e^{-ik theta} t_k) / k`.
pub fn increment(l: u32, theta: f64, t: &TraceVector) -> Result<f64> {
    if l == 0 {
        return domain("scales start at l = 1");
    }
    let hi = 1usize << l;
    if hi > t.k_max() {
        return Err(Error::Domain(format!(
            "scale {l} needs traces up to k = {hi}, only {} available",
            t.k_max()
        )));
    }
    let mut s = 0.0;
    for k in (hi / 2 + 1)..=hi {
        s -= (Complex64::from_polar(1.0, -(k as f64) * theta) * t.get(k)).re / k as f64;
    }
    Ok(s)
}

/// `||theta - theta'||`, the distance on the circle, in `[0, pi]`.
pub fn periodic_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// `theta ∧ theta' = -log_2 ||theta - theta'||`.
pub fn branching_scale(a: f64, b: f64) -> f64 {
    -periodic_distance(a, b).log2()
}

/// Leading-order increment variance `log 2 / 2`.
pub const INCREMENT_VARIANCE: f64 = LN_2 / 2.0;

/// Exact `E[Y_theta(l) Y_theta'(l)] = (1/2) sum_{block} min(k, N) cos(k d) / k^2`.
pub fn increment_covariance_exact(l: u32, d: f64, n: usize) -> f64 {
    let hi = 1usize << l;
    ((hi / 2 + 1)..=hi)
        .map(|k| 0.5 * k.min(n) as f64 * (k as f64 * d).cos() / (k * k) as f64)
        .sum()
}

/// Exact `Var log |P(theta)| = (1/2) sum_{k >= 1} min(k, N) / k^2`, summed in closed form past `N`.
pub fn log_abs_variance_exact(n: usize) -> f64 {
    let head: f64 = (1..=n).map(|k| 0.5 / k as f64).sum();
    // sum_{k > N} N / k^2 = N * trigamma(N + 1).
    let tail = 0.5 * n as f64 * trigamma(n as f64 + 1.0);
    head + tail
}

fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 20.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    acc + 1.0 / x + x2 / 2.0 + x2 / x * (1.0 / 6.0 - x2 * (1.0 / 30.0 - x2 / 42.0))
}

/// Half-step offset used by the grid evaluators, exposed for callers building their own grids.
pub fn grid_theta(i: usize, m: usize) -> f64 {
    2.0 * PI * (i as f64 + 0.5) / m as f64
}

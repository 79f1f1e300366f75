use crate::error::{domain, Result};
use crate::theory::gumbel_cdf;

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| x.is_nan()) {
        return domain("sample contains NaN");
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `xs` and `cdf`.
pub fn ks_distance(xs: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if xs.is_empty() {
        return domain("empty sample");
    }
    let v = sorted(xs)?;
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return domain("empty sample");
    }
    let (a, b) = (sorted(a)?, sorted(b)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Recentered replica maxima `(M - a_n) / b_n` with their empirical CDF and the KS distance
/// to `exp(-C e^{-c x})`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxDistribution {
    /// Sorted recentered maxima; the empirical CDF at `points[i]` is `(i + 1) / len`.
    pub points: Vec<f64>,
    pub ks: f64,
}

pub const MIN_MAX_REPLICAS: usize = 100;

pub fn max_distribution(
    maxima: &[f64],
    a_n: f64,
    b_n: f64,
    c: f64,
    big_c: f64,
) -> Result<MaxDistribution> {
    if maxima.len() < MIN_MAX_REPLICAS {
        return domain(format!(
            "need at least {MIN_MAX_REPLICAS} replica maxima, got {}",
            maxima.len()
        ));
    }
    if !(b_n > 0.0) {
        return domain("scale b_n must be positive");
    }
    if !(c > 0.0 && big_c > 0.0) {
        return domain("Gumbel parameters must be positive");
    }
    let centered: Vec<f64> = maxima.iter().map(|m| (m - a_n) / b_n).collect();
    let ks = ks_distance(&centered, |x| gumbel_cdf(x, c, big_c).expect("validated"))?;
    Ok(MaxDistribution {
        points: sorted(&centered)?,
        ks,
    })
}

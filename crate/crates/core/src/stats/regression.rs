use crate::error::{domain, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope from the residuals; zero for an exact fit or two points.
    pub slope_se: f64,
}

/// Ordinary least squares `y = slope x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return domain("x and y differ in length");
    }
    if x.len() < 2 {
        return domain("need at least two points");
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if !(sxx > 1e-300) {
        return domain("degenerate design: all x equal");
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_se = if x.len() > 2 {
        let rss: f64 = x
            .iter()
            .zip(y)
            .map(|(a, b)| (b - intercept - slope * a).powi(2))
            .sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        slope_se,
    })
}

/// Least-squares slope of `mean_max - c n` against `log n`.
pub fn subleading_fit(pairs: &[(u32, f64)], c: f64) -> Result<LinearFit> {
    let mut distinct: Vec<u32> = pairs.iter().map(|p| p.0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return domain("need at least three distinct values of n");
    }
    if distinct[0] == 0 {
        return domain("n must be positive");
    }
    let x: Vec<f64> = pairs.iter().map(|p| (p.0 as f64).ln()).collect();
    let y: Vec<f64> = pairs.iter().map(|p| p.1 - c * p.0 as f64).collect();
    linear_fit(&x, &y)
}

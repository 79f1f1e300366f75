//! Closed-form predictions for extremes of log-correlated fields.
//!
//! Everything here is a pure function of its arguments. Logarithms are natural; the
//! entropy of high points is measured in nats, so it starts at `log 2` for `E = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::Real;

/// Variance per scale and number of scales, with the constants derived from them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams<T> {
    sigma2: T,
    n: u32,
}

impl<T: Real> TheoryParams<T> {
    pub fn new(sigma2: T, n: u32) -> Result<Self> {
        check_sigma2(sigma2)?;
        if n == 0 {
            return domain("scale count n must be at least 1");
        }
        Ok(Self { sigma2, n })
    }

    pub fn sigma2(&self) -> T {
        self.sigma2
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Leading-order speed of the maximum, `c = sqrt(2 log 2 sigma2)`.
    pub fn velocity(&self) -> T {
        (T::cst(2.0) * T::ln2() * self.sigma2).sqrt()
    }

    /// Critical inverse temperature `beta_c = c / sigma2`.
    pub fn beta_c(&self) -> T {
        self.velocity() / self.sigma2
    }

    pub fn iid_centering(&self) -> IidCentering<T> {
        iid_centering(self.n, self.sigma2).expect("validated parameters")
    }

    pub fn logcor_centering(&self, eps: T) -> T {
        logcor_centering(self.n, self.sigma2, eps).expect("validated parameters")
    }
}

fn check_sigma2<T: Real>(sigma2: T) -> Result<()> {
    if !(sigma2 > T::zero()) || !sigma2.is_finite() {
        return domain(format!("variance per scale must be positive and finite, got {sigma2}"));
    }
    Ok(())
}

/// `c = sqrt(2 log 2 sigma2)`.
pub fn velocity<T: Real>(sigma2: T) -> Result<T> {
    check_sigma2(sigma2)?;
    Ok((T::cst(2.0) * T::ln2() * sigma2).sqrt())
}

/// `beta_c = c / sigma2`.
pub fn beta_c<T: Real>(sigma2: T) -> Result<T> {
    Ok(velocity(sigma2)? / sigma2)
}

/// Recentering, rescaling and Gumbel constant for the maximum of `2^n` IID `N(0, sigma2 n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IidCentering<T> {
    pub a_n: T,
    pub b_n: T,
    /// The `C` in `exp(-C e^{-c x})`.
    pub gumbel_c: T,
    pub velocity: T,
}

pub fn iid_centering<T: Real>(n: u32, sigma2: T) -> Result<IidCentering<T>> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    let c = velocity(sigma2)?;
    let nf = T::cst(n as f64);
    let a_n = c * nf - T::cst(0.5) * (sigma2 / c) * nf.ln();
    let gumbel_c = (sigma2.sqrt() / c) / (T::cst(2.0) * T::PI()).sqrt();
    Ok(IidCentering { a_n, b_n: T::one(), gumbel_c, velocity: c })
}

/// `m_n(eps) = c n - (3 sigma2 / (2c)) log n + eps log n`, the location of the maximum of a
/// log-correlated field with `2^n` sites.
pub fn logcor_centering<T: Real>(n: u32, sigma2: T, eps: T) -> Result<T> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    let c = velocity(sigma2)?;
    let nf = T::cst(n as f64);
    let logn = nf.ln();
    Ok(c * nf - T::cst(1.5) * (sigma2 / c) * logn + eps * logn)
}

/// Limiting entropy of high points: `log 2 - E^2 / (2 sigma2)` on `[0, c]`, zero beyond.
pub fn entropy_curve<T: Real>(e: T, sigma2: T) -> Result<T> {
    if e < T::zero() || e.is_nan() {
        return domain(format!("entropy level must be non-negative, got {e}"));
    }
    let c = velocity(sigma2)?;
    if e >= c {
        return Ok(T::zero());
    }
    Ok((T::ln2() - e * e / (T::cst(2.0) * sigma2)).max(T::zero()))
}

/// Limit of `(1/n) log Z_n(beta)`: `log 2 + beta^2 sigma2 / 2` below `beta_c`, `c beta` above.
pub fn free_energy_limit<T: Real>(beta: T, sigma2: T) -> Result<T> {
    if !(beta > T::zero()) {
        return domain(format!("inverse temperature must be positive, got {beta}"));
    }
    let c = velocity(sigma2)?;
    if beta < c / sigma2 {
        Ok(T::ln2() + beta * beta * sigma2 / T::cst(2.0))
    } else {
        Ok(c * beta)
    }
}

/// Asymptotic Gaussian tail `sqrt(var)/(a sqrt(2 pi)) exp(-a^2 / (2 var))`.
///
/// This overestimates `P(N(0, var) > a)`; the ratio to the exact tail tends to one as
/// `a / sqrt(var)` grows. Only defined for `a > sqrt(var)`.
pub fn gaussian_tail<T: Real>(a: T, var: T) -> Result<T> {
    if !(var > T::zero()) {
        return domain("variance must be positive");
    }
    let sd = var.sqrt();
    if !(a > sd) {
        return domain(format!("tail estimate needs a > sqrt(var); a = {a}, sqrt(var) = {sd}"));
    }
    Ok(sd / (a * (T::cst(2.0) * T::PI()).sqrt()) * (-(a * a) / (T::cst(2.0) * var)).exp())
}

/// Exact `P(N(0, var) > a)` through the complementary error function.
pub fn normal_tail_exact<T: Real>(a: T, var: T) -> Result<T> {
    if !(var > T::zero()) {
        return domain("variance must be positive");
    }
    let z = a.as_f64() / (2.0 * var.as_f64()).sqrt();
    Ok(T::cst(0.5 * statrs::function::erf::erfc(z)))
}

/// Natural log of the standard normal survival function, accurate far into the tail.
pub fn ln_normal_sf(z: f64) -> f64 {
    if z < 37.0 {
        (0.5 * statrs::function::erf::erfc(z / std::f64::consts::SQRT_2)).ln()
    } else {
        // erfc underflows past here; asymptotic series of the Mills ratio.
        let z2 = z * z;
        let series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
        -0.5 * z2 - z.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln() + series.ln()
    }
}

/// Double-exponential CDF `exp(-C exp(-c x))`.
pub fn gumbel_cdf<T: Real>(x: T, c: T, big_c: T) -> Result<T> {
    if !(c > T::zero()) || !(big_c > T::zero()) {
        return domain("Gumbel parameters c and C must be positive");
    }
    Ok((-(big_c * (-(c * x)).exp())).exp())
}

/// Quantile of [`gumbel_cdf`]: the `x` with `exp(-C e^{-c x}) = p`.
pub fn gumbel_quantile<T: Real>(p: T, c: T, big_c: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return domain("quantile level must lie in (0, 1)");
    }
    if !(c > T::zero()) || !(big_c > T::zero()) {
        return domain("Gumbel parameters c and C must be positive");
    }
    Ok((big_c / -p.ln()).ln() / c)
}

/// The two models with a Fyodorov-Hiary-Keating type prediction for the maximum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FhkTarget<T> {
    /// Random model of zeta on an interval of height `T`, given through `log T`.
    Zeta { log_t: T },
    /// CUE characteristic polynomial of size `N`.
    Cue { n: u64 },
}

/// `log log T - (3/4) log log log T` for zeta, `log N - (3/4) log log N` for CUE.
pub fn fhk_prediction<T: Real>(target: FhkTarget<T>) -> Result<T> {
    let three_quarters = T::cst(0.75);
    match target {
        FhkTarget::Zeta { log_t } => {
            if !(log_t > T::E()) {
                return domain("zeta prediction needs T > e^e so that log log log T > 0");
            }
            let ll = log_t.ln();
            Ok(ll - three_quarters * ll.ln())
        }
        FhkTarget::Cue { n } => {
            if n < 3 {
                return domain("CUE prediction needs N >= 3 so that log log N > 0");
            }
            let l = T::cst(n as f64).ln();
            Ok(l - three_quarters * l.ln())
        }
    }
}

/// Citation keys attached to reports; each names the closed-form statement it checks.
pub const CITATION_KEYS: &[&str] = &[
    "iid-gumbel-limit",
    "iid-landscape-scale",
    "logcor-leading-order",
    "logcor-subleading-order",
    "high-points-entropy",
    "free-energy-freezing",
    "multiscale-second-moment",
    "barrier-first-moment",
    "ballot-theorem",
    "gff-green-function",
    "gff-markov-covariance",
    "gff-multiscale-increments",
    "zeta-increment-covariance",
    "zeta-increment-variance",
    "cue-trace-moments",
    "cue-log-variance",
    "cue-maximum",
    "cue-increment-dichotomy",
];

//! The IID reference model: `2^n` independent `N(0, sigma2 n)` variables.

use crate::error::{capacity, domain, Result};
use crate::rng::{normal_pair, CounterRng};
use crate::Real;

pub const MAX_IID_DEPTH: u32 = 40;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IidConfig<T> {
    pub n: u32,
    pub sigma2: T,
    pub seed: u64,
}

impl<T: Real> IidConfig<T> {
    pub fn new(n: u32, sigma2: T, seed: u64) -> Result<Self> {
        if n == 0 {
            return domain("n must be at least 1");
        }
        if n > MAX_IID_DEPTH {
            return capacity(format!("2^{n} variables exceeds the 2^{MAX_IID_DEPTH} limit"));
        }
        if !(sigma2 > T::zero()) {
            return domain("sigma2 must be positive");
        }
        Ok(Self { n, sigma2, seed })
    }

    pub fn size(&self) -> u64 {
        1u64 << self.n
    }

    /// Standard deviation of each variable, `sqrt(sigma2 n)`.
    pub fn sd(&self) -> T {
        (self.sigma2 * T::cst(self.n as f64)).sqrt()
    }
}

/// Visits the variables in index order. Variables `2k` and `2k+1` share one counter address.
pub fn for_each_value<T: Real>(cfg: &IidConfig<T>, mut f: impl FnMut(u64, T)) {
    let sd = cfg.sd().as_f64();
    for k in 0..cfg.size() / 2 {
        let (a, b) = normal_pair(cfg.seed, k);
        f(2 * k, T::cst(sd * a));
        f(2 * k + 1, T::cst(sd * b));
    }
}

pub fn sample_field<T: Real>(cfg: &IidConfig<T>) -> Vec<T> {
    let mut out = Vec::with_capacity(cfg.size() as usize);
    for_each_value(cfg, |_, x| out.push(x));
    out
}

/// Maximum over the sampled field, with the smallest maximizing index.
pub fn sample_max<T: Real>(cfg: &IidConfig<T>) -> (T, u64) {
    let mut best = T::neg_infinity();
    let mut arg = 0;
    for_each_value(cfg, |v, x| {
        if x > best {
            best = x;
            arg = v;
        }
    });
    (best, arg)
}

/// Draws the maximum directly from its law `P(M <= x) = Phi(x / sd)^(2^n)` by inversion.
///
/// Uses a separate random address from [`sample_field`], so it is a different draw of the
/// same distribution, not the maximum of that field.
pub fn sample_max_exact<T: Real>(cfg: &IidConfig<T>) -> T {
    let mut rng = CounterRng::new(cfg.seed, u64::MAX);
    let u = rng.uniform_open0();
    let count = cfg.size() as f64;
    // Upper-tail probability q = 1 - U^(1/N) of each variable at the maximum.
    let q = -(u.ln() / count).exp_m1();
    let z = std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(2.0 * q);
    T::cst(cfg.sd().as_f64() * z)
}

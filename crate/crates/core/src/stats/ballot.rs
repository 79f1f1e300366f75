use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{domain, Result};
use crate::rng::CounterRng;

/// Random walk `S_k` with `N(0, sigma2)` steps from `S_0 = 0`, conditioned to stay at or below
/// `barrier` for `0 < k < n_steps` and to end in `(b, b + delta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallotParams {
    pub n_steps: u32,
    pub sigma2: f64,
    pub barrier: f64,
    pub b: f64,
    pub delta: f64,
}

impl BallotParams {
    fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return domain("the walk needs at least one step");
        }
        if !(self.sigma2 > 0.0) {
            return domain("sigma2 must be positive");
        }
        if !(self.barrier > 0.0) {
            return domain("barrier B must be positive");
        }
        if !(self.delta > 0.0) {
            return domain("window width delta must be positive");
        }
        if !(self.b <= self.barrier - self.delta) {
            return domain("need b <= B - delta");
        }
        Ok(())
    }

    fn hit(&self, rng: &mut CounterRng) -> bool {
        let sd = self.sigma2.sqrt();
        let mut s = 0.0;
        for _ in 1..self.n_steps {
            s += sd * rng.normal();
            if s > self.barrier {
                return false;
            }
        }
        s += sd * rng.normal();
        s > self.b && s < self.b + self.delta
    }
}

/// Monte Carlo estimate and standard error of the ballot probability. Replica `r` draws from
/// stream `r` under `seed`, so the estimate does not depend on the thread count.
pub fn ballot_mc(params: &BallotParams, replicas: u64, seed: u64) -> Result<(f64, f64)> {
    params.validate()?;
    if replicas == 0 {
        return domain("replicas must be at least 1");
    }
    let hits: u64 = (0..replicas)
        .into_par_iter()
        .map(|r| params.hit(&mut CounterRng::new(seed, r)) as u64)
        .sum();
    let p = hits as f64 / replicas as f64;
    Ok((p, (p * (1.0 - p) / replicas as f64).sqrt()))
}

/// Exact value for a single step, where the barrier constraint is vacuous.
pub fn ballot_exact_one_step(params: &BallotParams) -> Result<f64> {
    params.validate()?;
    let nd = Normal::new(0.0, params.sigma2.sqrt()).expect("positive sd");
    Ok(nd.cdf(params.b + params.delta) - nd.cdf(params.b))
}

use super::{Ctx, Outcome};
use crate::error::{domain, Result};
use crate::stats::{ballot_mc, BallotParams};

pub(super) fn ballot_scaling(ctx: &Ctx) -> Result<Outcome> {
    let sigma2 = ctx.f64("sigma2", 1.0)?;
    let barrier = ctx.f64("barrier", 1.0)?;
    let b = ctx.f64("b", 0.0)?;
    let delta = ctx.f64("delta", 1.0)?;
    let ns = ctx.n_list(&[64, 128, 256])?;
    let replicas = ctx.replicas(10_000_000);
    let params = |n: u32| BallotParams {
        n_steps: n,
        sigma2,
        barrier,
        b,
        delta,
    };
    for &n in &ns {
        // The closed-form one-step probability runs the parameter checks without sampling.
        if n == 0 {
            return domain("walk length must be at least 1");
        }
        crate::stats::ballot_exact_one_step(&params(n))?;
    }

    let mut out = Outcome::default();
    let mut scaled = Vec::with_capacity(ns.len());
    for &n in &ns {
        let (p, se) = ballot_mc(&params(n), replicas, ctx.sub_seed(n as u64))?;
        let f = (n as f64).powf(1.5);
        out.push(ctx.report("probability").at(n as f64).value(p, se).replicas(replicas));
        out.push(ctx.report("scaled_probability").at(n as f64).value(p * f, se * f).replicas(replicas));
        out.point("scaled_probability", n as f64, p * f, se * f, None);
        scaled.push((n, p * f, se * f));
    }
    // p(2n)(2n)^{3/2} / (p(n) n^{3/2}) for every doubling present in the sweep.
    for &(n, s, se) in &scaled {
        if let Some(&(_, s2, se2)) = scaled.iter().find(|t| t.0 == 2 * n) {
            let ratio = s2 / s;
            let rse = ratio * ((se / s).powi(2) + (se2 / s2).powi(2)).sqrt();
            out.push(
                ctx.report("doubling_ratio")
                    .at(n as f64)
                    .value(ratio, rse)
                    .replicas(replicas)
                    .target(1.0)
                    .band(0.7, 1.4),
            );
        }
    }
    // Empirical constant of the upper bound C (1 + B)(1 + B - b) / n^{3/2}.
    let shape = (1.0 + barrier) * (1.0 + barrier - b);
    let consts: Vec<f64> = scaled.iter().map(|t| t.1 / shape).collect();
    for (&(n, _, se), &k) in scaled.iter().zip(&consts) {
        out.push(ctx.report("upper_bound_constant").at(n as f64).value(k, se / shape).replicas(replicas));
    }
    if consts.len() >= 2 {
        let hi = consts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = consts.iter().cloned().fold(f64::INFINITY, f64::min);
        out.push(
            ctx.report("upper_bound_constant_spread")
                .value(hi / lo, 0.0)
                .replicas(replicas)
                .target(1.0)
                .band(1.0, 2.0),
        );
    }
    Ok(out)
}

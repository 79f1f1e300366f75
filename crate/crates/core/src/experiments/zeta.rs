//! Random Euler-product experiments.

use std::f64::consts::LN_2;

use super::{column, product_moment, replicate, Ctx, Outcome};
use crate::error::Result;
use crate::stats::Replicated;
use crate::zeta::{increment_covariance_pred, ZetaEvaluator, ZetaModel};

/// Furthest pair is at `h' = 2^{-MAX_SPLIT}`, branching scale `MAX_SPLIT`.
const MAX_SPLIT: u32 = 6;

/// Per replica, `Y_h(l)` at every shift, flattened as `[shift * n + (l - 1)]`.
fn increment_rows(model: &ZetaModel, shifts: &[f64], seed: u64, replicas: u64) -> Vec<Vec<f64>> {
    let eval = ZetaEvaluator::new(model, shifts);
    replicate(seed, replicas, |s| eval.increments(&model.sample_phases(s)).concat())
}

pub(super) fn zeta_covariance(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.n(4);
    let replicas = ctx.replicas(10_000);
    let model = ZetaModel::new(n)?;
    // h = 0 against h' = 2^{-j}, so that h ∧ h' = j.
    let mut shifts = vec![0.0];
    shifts.extend((0..=MAX_SPLIT).map(|j| 2f64.powi(-(j as i32))));
    let rows = increment_rows(&model, &shifts, ctx.sub_seed(n as u64), replicas);
    let nl = n as usize;

    let mut out = Outcome::default();
    for l in 1..=n {
        let y0 = column(&rows, l as usize - 1);
        let name = format!("increment_covariance_l{l}");
        for j in 0..=MAX_SPLIT {
            let h = shifts[j as usize + 1];
            let yh = column(&rows, (j as usize + 1) * nl + l as usize - 1);
            let (cv, se) = product_moment(&y0, &yh);
            let (pred, _) = increment_covariance_pred(l, 0.0, h);
            let exact = model.increment_covariance_exact(l, 0.0, h)?;
            let mut r = ctx.report(&name).at(j as f64).value(cv, se).replicas(replicas).target(pred);
            if (l as i64 - j as i64).abs() >= 2 {
                r = r.band(pred - 0.1, pred + 0.1);
            }
            out.push(r);
            out.point(&name, j as f64, cv, se, Some(exact));
        }
    }
    // Full field: covariance grows like (log 2 / 2)(h ∧ h') at model scale.
    let field = |s: usize| -> Vec<f64> { rows.iter().map(|r| r[s * nl..(s + 1) * nl].iter().sum()).collect() };
    let f0 = field(0);
    for j in 1..n {
        let (cv, se) = product_moment(&f0, &field(j as usize + 1));
        let t = 0.5 * LN_2 * j as f64;
        out.push(
            ctx.report("field_covariance")
                .at(j as f64)
                .value(cv, se)
                .replicas(replicas)
                .target(t)
                .band(t - 0.5, t + 0.5),
        );
        out.point("field_covariance", j as f64, cv, se, Some(t));
    }
    Ok(out)
}

pub(super) fn zeta_variance(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.n(4);
    let replicas = ctx.replicas(10_000);
    let model = ZetaModel::new(n)?;
    let shifts = [0.0, 0.5];
    let rows = increment_rows(&model, &shifts, ctx.sub_seed(100 + n as u64), replicas);
    let nl = n as usize;
    let half_log2 = 0.5 * LN_2;

    let mut out = Outcome::default();
    for l in 1..=n {
        let y = column(&rows, l as usize - 1);
        let (v, se) = product_moment(&y, &y);
        let exact = model.block_variance(l)?;
        let mut r = ctx.report("block_variance").at(l as f64).value(v, se).replicas(replicas).target(half_log2);
        if l >= 3 {
            r = r.band(half_log2 - 0.05, half_log2 + 0.05);
        }
        out.push(r);
        out.push(
            ctx.report("block_variance_vs_exact")
                .at(l as f64)
                .value(v, se)
                .replicas(replicas)
                .target(exact)
                .band(exact - 3.0 * se, exact + 3.0 * se),
        );
        let mut r = ctx.report("block_variance_exact").at(l as f64).value(exact, 0.0).target(half_log2);
        if l >= 3 {
            r = r.band(0.9 * half_log2, 1.1 * half_log2);
        }
        out.push(r);
        let m = Replicated::of(&y);
        out.push(
            ctx.report("increment_mean")
                .at(l as f64)
                .sample(&m)
                .target(0.0)
                .band(-4.0 * m.se, 4.0 * m.se),
        );
        out.point("block_variance", l as f64, v, se, Some(exact));
    }
    let exact = model.field_variance();
    for (s, &h) in shifts.iter().enumerate() {
        let f: Vec<f64> = rows.iter().map(|r| r[s * nl..(s + 1) * nl].iter().sum()).collect();
        let (v, se) = product_moment(&f, &f);
        out.push(
            ctx.report("field_variance")
                .at(h)
                .value(v, se)
                .replicas(replicas)
                .target(exact)
                .band(exact - 3.0 * se, exact + 3.0 * se),
        );
    }
    Ok(out)
}

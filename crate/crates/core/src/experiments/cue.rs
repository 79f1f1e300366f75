//! CUE characteristic polynomial experiments.

use std::f64::consts::LN_2;

use super::{column, product_moment, replicate, Ctx, Outcome};
use crate::cue::{
    increment, increment_covariance_exact, log_abs_variance_exact, sample_haar, traces,
    GridEvaluator, Verblunsky, INCREMENT_VARIANCE,
};
use crate::error::{domain, Result};
use crate::stats::Replicated;
use crate::theory::{fhk_prediction, FhkTarget};

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        return domain("N must be at least 2");
    }
    if n > crate::cue::verblunsky::MAX_VERBLUNSKY_N {
        return Err(crate::Error::Capacity(format!(
            "N = {n} exceeds the Verblunsky sampler limit {}",
            crate::cue::verblunsky::MAX_VERBLUNSKY_N
        )));
    }
    Ok(())
}

pub(super) fn cue_moments(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.n(50) as usize;
    let ks = ctx.usize_list("k", &[1, 5, 50, 70])?;
    let replicas = ctx.replicas(100_000);
    check_size(n)?;
    if n > crate::cue::MAX_HAAR_N {
        return Err(crate::Error::Capacity(format!(
            "the dense route is limited to N <= {}",
            crate::cue::MAX_HAAR_N
        )));
    }
    if ks.contains(&0) {
        return domain("trace powers start at k = 1");
    }
    let k_max = *ks.iter().max().expect("non-empty list");

    // Dense route: Haar matrix, eigensolve, power sums of the eigenvalues.
    let haar = replicate(ctx.sub_seed(n as u64), replicas, |s| {
        let t = traces(&sample_haar(n, s).expect("validated size"), k_max);
        ks.iter().map(|&k| t.get(k).norm_sqr()).collect::<Vec<f64>>()
    });
    // Verblunsky route: coefficients of the characteristic polynomial, Newton's identities.
    let verb = replicate(ctx.sub_seed(1000 + n as u64), replicas, |s| {
        let t = Verblunsky::sample(n, s).expect("validated size").traces(k_max);
        ks.iter().map(|&k| t.get(k).norm_sqr()).collect::<Vec<f64>>()
    });
    let mut out = Outcome::default();
    for (route, rows) in [("haar", &haar), ("verblunsky", &verb)] {
        let name = format!("trace_second_moment_{route}");
        for (j, &k) in ks.iter().enumerate() {
            let s = Replicated::of(&column(rows, j));
            let target = k.min(n) as f64;
            out.push(
                ctx.report(&name)
                    .at(k as f64)
                    .sample(&s)
                    .target(target)
                    .band(0.95 * target, 1.05 * target),
            );
            out.point(&name, k as f64, s.mean, s.se, Some(target));
        }
    }
    Ok(out)
}

pub(super) fn cue_variance(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.n(1024) as usize;
    let replicas = ctx.replicas(1000);
    let theta = ctx.f64("theta", 0.0)?;
    check_size(n)?;
    let vals = replicate(ctx.sub_seed(n as u64), replicas, |s| {
        Verblunsky::sample(n, s).expect("validated size").log_abs_at(theta)
    });
    let (v, se) = product_moment(&vals, &vals);
    let leading = 0.5 * (n as f64).ln();
    let exact = log_abs_variance_exact(n);
    let m = Replicated::of(&vals);
    let mut out = Outcome::default();
    out.push(
        ctx.report("log_abs_variance")
            .at(n as f64)
            .value(v, se)
            .replicas(replicas)
            .target(leading)
            .band(0.9 * leading, 1.1 * leading),
    );
    out.push(
        ctx.report("log_abs_variance_vs_exact")
            .at(n as f64)
            .value(v, se)
            .replicas(replicas)
            .target(exact)
            .band(exact - 3.0 * se, exact + 3.0 * se),
    );
    out.push(
        ctx.report("log_abs_mean")
            .at(n as f64)
            .sample(&m)
            .target(0.0)
            .band(-4.0 * m.se, 4.0 * m.se),
    );
    out.point("log_abs_variance", n as f64, v, se, Some(exact));
    Ok(out)
}

pub(super) fn cue_max(ctx: &Ctx) -> Result<Outcome> {
    let ns = ctx.size_list(&[1024, 4096])?;
    let over = ctx.usize("oversample", 16)?;
    let replicas = ctx.replicas(200);
    for &n in &ns {
        check_size(n)?;
        fhk_prediction::<f64>(FhkTarget::Cue { n: n as u64 })?;
    }
    if over < 2 {
        return domain("the grid must oversample N by at least 2");
    }
    let mut out = Outcome::default();
    for &n in &ns {
        let eval = GridEvaluator::new(over * n);
        let maxima = replicate(ctx.sub_seed(n as u64), replicas, |s| {
            let v = Verblunsky::sample(n, s).expect("validated size");
            let vals = eval.log_abs(&v.coefficients()).expect("grid larger than N");
            vals.into_iter().fold(f64::NEG_INFINITY, f64::max)
        });
        let logn = (n as f64).ln();
        let fhk = fhk_prediction(FhkTarget::Cue { n: n as u64 })?;
        let s = Replicated::of(&maxima);
        let mut r = ctx.report("mean_max").at(n as f64).sample(&s).target(fhk);
        if n == 1024 {
            r = r.band(5.0, 7.0);
        }
        out.push(r);
        let ratio: Vec<f64> = maxima.iter().map(|m| m / logn).collect();
        let mut r = ctx.report("max_over_log_n").at(n as f64).sample(&Replicated::of(&ratio)).target(fhk / logn);
        if n == 4096 {
            r = r.band(0.75, 0.95);
        }
        out.push(r);
        out.point("mean_max", n as f64, s.mean, s.se, Some(fhk));
    }
    Ok(out)
}

pub(super) fn cue_dichotomy(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.n(512) as usize;
    let replicas = ctx.replicas(10_000);
    check_size(n)?;
    // Scales l = 1..=L use traces up to 2^L <= N.
    let levels = n.ilog2();
    let k_max = 1usize << levels;
    // theta = 0 against theta' = 2^{-j}, whose branching scale is j.
    let mut shifts = vec![0.0];
    shifts.extend((0..=levels).map(|j| 2f64.powi(-(j as i32))));
    let rows = replicate(ctx.sub_seed(n as u64), replicas, |s| {
        let t = Verblunsky::sample(n, s).expect("validated size").traces(k_max);
        let mut row = Vec::with_capacity(shifts.len() * levels as usize);
        for &th in &shifts {
            for l in 1..=levels {
                row.push(increment(l, th, &t).expect("traces cover 2^L"));
            }
        }
        row
    });
    let nl = levels as usize;
    let mut out = Outcome::default();
    for l in 1..=levels {
        let y0 = column(&rows, l as usize - 1);
        let (v, se) = product_moment(&y0, &y0);
        out.push(
            ctx.report("increment_variance")
                .at(l as f64)
                .value(v, se)
                .replicas(replicas)
                .target(INCREMENT_VARIANCE),
        );
        let name = format!("increment_covariance_l{l}");
        for j in 0..=levels {
            let th = shifts[j as usize + 1];
            let (cv, se) = product_moment(&y0, &column(&rows, (j as usize + 1) * nl + l as usize - 1));
            let mut r = ctx.report(&name).at(j as f64).value(cv, se).replicas(replicas);
            if l + 2 <= j {
                r = r.target(0.5 * LN_2).band(0.5 * LN_2 - 0.1, 0.5 * LN_2 + 0.1);
            } else if l >= j + 2 {
                r = r.target(0.0).band(-0.1, 0.1);
            }
            out.push(r);
            out.point(&name, j as f64, cv, se, Some(increment_covariance_exact(l, th, n)));
        }
    }
    Ok(out)
}

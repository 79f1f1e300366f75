//! IID and branching random walk experiments.

use super::{replicate, Ctx, Outcome};
use crate::brw::{self, BrwConfig};
use crate::error::{domain, Result};
use crate::iid::{self, IidConfig};
use crate::stats::{
    entropy_estimate, exceedance_count, kistler_count, linear_fit, log_partition_density,
    max_distribution, subleading_fit, Replicated,
};
use crate::theory::{
    beta_c, entropy_curve, free_energy_limit, gumbel_cdf, iid_centering, logcor_centering,
    velocity,
};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Mean of `exp(-C e^{-c x})`: `(log C + gamma) / c`.
fn gumbel_mean(c: f64, big_c: f64) -> f64 {
    (big_c.ln() + EULER_GAMMA) / c
}

fn brw_cfg(n: u32, sigma2: f64) -> Result<BrwConfig<f64>> {
    BrwConfig::new(n, sigma2, 0)
}

fn brw_maxima(n: u32, sigma2: f64, seed: u64, replicas: u64) -> Result<Vec<f64>> {
    let base = brw_cfg(n, sigma2)?;
    Ok(replicate(seed, replicas, |s| brw::sample_max(&BrwConfig { seed: s, ..base }).0))
}

fn brw_leaves(cfg: &BrwConfig<f64>) -> Vec<f64> {
    brw::sample_field(cfg).collect()
}

pub(super) fn iid_gumbel(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.n(20);
    let sigma2 = ctx.f64("sigma2", 1.0)?;
    let replicas = ctx.replicas(2000);
    let fig_n = ctx.u32("fig_n", 10)?;
    let fig_replicas = ctx.u32("fig_replicas", 500)? as u64;
    let base = IidConfig::new(n, sigma2, 0)?;
    let fig_sigma2 = 0.5 * std::f64::consts::LN_2;
    let fig_base = IidConfig::new(fig_n, fig_sigma2, 0)?;
    if (replicas as usize) < crate::stats::MIN_MAX_REPLICAS {
        return domain(format!(
            "the KS test needs at least {} replicas",
            crate::stats::MIN_MAX_REPLICAS
        ));
    }
    let cent = iid_centering(n, sigma2)?;
    let (c, big_c) = (cent.velocity, cent.gumbel_c);

    let mut out = Outcome::default();
    let seed = ctx.sub_seed(1);
    let maxima = replicate(seed, replicas, |s| iid::sample_max(&IidConfig { seed: s, ..base }).0);
    let dist = max_distribution(&maxima, cent.a_n, cent.b_n, c, big_c)?;
    out.push(
        ctx.report("ks_gumbel")
            .at(n as f64)
            .value(dist.ks, 0.0)
            .replicas(replicas)
            .target(0.0)
            .band(0.0, 0.05),
    );
    out.push(
        ctx.report("mean_max")
            .at(n as f64)
            .sample(&Replicated::of(&maxima))
            .target(cent.a_n + gumbel_mean(c, big_c)),
    );
    let r = dist.points.len() as f64;
    for (i, &x) in dist.points.iter().enumerate() {
        let f = (i + 1) as f64 / r;
        out.point("ecdf", x, f, (f * (1.0 - f) / r).sqrt(), Some(gumbel_cdf(x, c, big_c)?));
    }

    // The landscape example: 2^10 variables of variance (1/2) log 2^10.
    let fig_cent = iid_centering(fig_n, fig_sigma2)?;
    let fig = replicate(ctx.sub_seed(2), fig_replicas, |s| {
        iid::sample_max(&IidConfig { seed: s, ..fig_base }).0
    });
    let mut r = ctx
        .report("landscape_mean_max")
        .at(fig_n as f64)
        .sample(&Replicated::of(&fig))
        .target(fig_cent.a_n + gumbel_mean(fig_cent.velocity, fig_cent.gumbel_c));
    r.citation = "iid-landscape-scale".into();
    out.push(r.band(5.5, 7.0));
    Ok(out)
}

pub(super) fn brw_leading(ctx: &Ctx) -> Result<Outcome> {
    let sigma2 = ctx.f64("sigma2", 1.0)?;
    let ns = ctx.n_list(&[16, 20, 24])?;
    let replicas = ctx.replicas(200);
    for &n in &ns {
        brw_cfg(n, sigma2)?;
    }
    let mut out = Outcome::default();
    for &n in &ns {
        let maxima = brw_maxima(n, sigma2, ctx.sub_seed(n as u64), replicas)?;
        let m_n = logcor_centering(n, sigma2, 0.0)?;
        let s = Replicated::of(&maxima);
        out.push(
            ctx.report("mean_max")
                .at(n as f64)
                .sample(&s)
                .target(m_n)
                .band(m_n - 2.0, m_n + 2.0),
        );
        out.point("mean_max", n as f64, s.mean, s.se, Some(m_n));
    }
    Ok(out)
}

pub(super) fn brw_subleading(ctx: &Ctx) -> Result<Outcome> {
    let sigma2 = ctx.f64("sigma2", 1.0)?;
    let ns = ctx.n_list(&[12, 16, 20, 24])?;
    let replicas = ctx.replicas(2000);
    for &n in &ns {
        brw_cfg(n, sigma2)?;
        IidConfig::new(n, sigma2, 0)?;
    }
    let mut distinct = ns.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return domain("the log n fit needs at least three distinct n");
    }
    let c = velocity(sigma2)?;
    let unit = sigma2 / c;

    let mut out = Outcome::default();
    let (mut brw_pairs, mut iid_pairs, mut logs, mut diffs) = (vec![], vec![], vec![], vec![]);
    for &n in &ns {
        let brw_max = brw_maxima(n, sigma2, ctx.sub_seed(n as u64), replicas)?;
        let iid_base = IidConfig::new(n, sigma2, 0)?;
        let iid_max = replicate(ctx.sub_seed(100 + n as u64), replicas, |s| {
            iid::sample_max_exact(&IidConfig { seed: s, ..iid_base })
        });
        let m_n = logcor_centering(n, sigma2, 0.0)?;
        let cent = iid_centering(n, sigma2)?;
        let b = Replicated::of(&brw_max);
        let i = Replicated::of(&iid_max);
        let d = b.mean - i.mean;
        let d_se = b.se.hypot(i.se);
        out.push(ctx.report("brw_mean_max").at(n as f64).sample(&b).target(m_n));
        out.push(
            ctx.report("iid_mean_max")
                .at(n as f64)
                .sample(&i)
                .target(cent.a_n + gumbel_mean(c, cent.gumbel_c)),
        );
        out.push(
            ctx.report("mean_max_difference")
                .at(n as f64)
                .value(d, d_se)
                .replicas(replicas)
                .target(m_n - cent.a_n),
        );
        out.point("difference", n as f64, d, d_se, Some(m_n - cent.a_n));
        brw_pairs.push((n, b.mean));
        iid_pairs.push((n, i.mean));
        logs.push((n as f64).ln());
        diffs.push(d);
    }
    let fit = linear_fit(&logs, &diffs)?;
    out.push(
        ctx.report("difference_slope")
            .value(fit.slope, fit.slope_se)
            .replicas(replicas)
            .target(-unit)
            .band(-1.8 * unit, -0.4 * unit),
    );
    let fb = subleading_fit(&brw_pairs, c)?;
    out.push(
        ctx.report("brw_slope")
            .value(fb.slope, fb.slope_se)
            .replicas(replicas)
            .target(-1.5 * unit)
            .band(-2.5 * unit, -0.75 * unit),
    );
    let fi = subleading_fit(&iid_pairs, c)?;
    out.push(
        ctx.report("iid_slope")
            .value(fi.slope, fi.slope_se)
            .replicas(replicas)
            .target(-0.5 * unit)
            .band(-1.0 * unit, -0.1 * unit),
    );
    Ok(out)
}

pub(super) fn brw_entropy(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.n(20);
    let sigma2 = ctx.f64("sigma2", 1.0)?;
    let replicas = ctx.replicas(1);
    let base = brw_cfg(n, sigma2)?;
    let c = velocity(sigma2)?;
    let es = ctx.f64_list("e", (0..8).map(|k| k as f64 * c / 8.0).collect())?;
    let targets: Vec<f64> = es.iter().map(|&e| entropy_curve(e, sigma2)).collect::<Result<_>>()?;

    let rows = replicate(ctx.sub_seed(n as u64), replicas, |s| {
        let values = brw_leaves(&BrwConfig { seed: s, ..base });
        es.iter()
            .map(|&e| entropy_estimate(&values, e, n).expect("n >= 1"))
            .collect::<Vec<_>>()
    });
    let mut out = Outcome::default();
    for (j, (&e, &target)) in es.iter().zip(&targets).enumerate() {
        let vals: Vec<f64> = rows.iter().filter(|r| !r[j].empty).map(|r| r[j].value).collect();
        let empty = rows.len() - vals.len();
        let s = if vals.is_empty() {
            Replicated { mean: f64::NAN, se: f64::NAN, median: f64::NAN, replicas: 0 }
        } else {
            Replicated::of(&vals)
        };
        let mut r = ctx.report("entropy").at(e).sample(&s).target(target);
        r.replicas = replicas;
        // Acceptance points E in {0, c/4, c/2, 3c/4}: 5% relative, absolute 0.035 at 3c/4.
        let quarter = 4.0 * e / c;
        if (quarter - quarter.round()).abs() < 1e-9 && quarter.round() <= 3.0 {
            let tol = if quarter.round() == 3.0 { 0.035 } else { 0.05 * target };
            r = r.band(target - tol, target + tol);
        }
        out.push(r);
        if empty > 0 {
            out.push(
                ctx.report("entropy_empty_fraction")
                    .at(e)
                    .value(empty as f64 / replicas as f64, 0.0)
                    .replicas(replicas),
            );
        }
        out.point("entropy", e, s.mean, s.se, Some(target));
    }
    Ok(out)
}

pub(super) fn brw_free_energy(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.n(20);
    let sigma2 = ctx.f64("sigma2", 1.0)?;
    let replicas = ctx.replicas(100);
    let base = brw_cfg(n, sigma2)?;
    let bc = beta_c(sigma2)?;
    let betas = ctx.f64_list("beta", [0.5, 1.0, 2.0, 4.0].iter().map(|m| m * bc).collect())?;
    let targets: Vec<f64> =
        betas.iter().map(|&b| free_energy_limit(b, sigma2)).collect::<Result<_>>()?;

    let rows = replicate(ctx.sub_seed(n as u64), replicas, |s| {
        let values = brw_leaves(&BrwConfig { seed: s, ..base });
        betas
            .iter()
            .map(|&b| log_partition_density(&values, b, n).expect("beta validated"))
            .collect::<Vec<f64>>()
    });
    let mut out = Outcome::default();
    let is = |b: f64, m: f64| (b / bc - m).abs() < 1e-9;
    for (j, (&b, &target)) in betas.iter().zip(&targets).enumerate() {
        let s = Replicated::of(&super::column(&rows, j));
        let mut r = ctx.report("log_partition_density").at(b).sample(&s).target(target);
        if is(b, 0.5) || is(b, 1.0) || is(b, 2.0) {
            r = r.band(target - 0.1, target + 0.1);
        }
        out.push(r);
        out.point("log_partition_density", b, s.mean, s.se, Some(target));
    }
    let j2 = betas.iter().position(|&b| is(b, 2.0));
    let j4 = betas.iter().position(|&b| is(b, 4.0));
    if let (Some(j2), Some(j4)) = (j2, j4) {
        let flat: Vec<f64> = rows
            .iter()
            .map(|r| r[j2] / betas[j2] - r[j4] / betas[j4])
            .collect();
        out.push(
            ctx.report("frozen_flatness")
                .sample(&Replicated::of(&flat))
                .target(0.0)
                .at_most(0.15),
        );
    }
    Ok(out)
}

pub(super) fn brw_kistler(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.n(20);
    let sigma2 = ctx.f64("sigma2", 1.0)?;
    let replicas = ctx.replicas(200);
    let k = ctx.u32("k", 4)?;
    let c = velocity(sigma2)?;
    let e = ctx.f64("e", c / 2.0)?;
    let eps = ctx.f64("eps", 0.05)?;
    let base = brw_cfg(n, sigma2)?;
    if k < 2 || n % k != 0 {
        return domain(format!("K = {k} must be at least 2 and divide n = {n}"));
    }
    if n > brw::MAX_DENSE_DEPTH {
        return Err(crate::Error::Capacity(format!(
            "Kistler counts need the dense decomposition, limited to n <= {}",
            brw::MAX_DENSE_DEPTH
        )));
    }
    let rows = replicate(ctx.sub_seed(n as u64), replicas, |s| {
        let d = brw::sample_decomposition(&BrwConfig { seed: s, ..base }).expect("validated");
        let kc = kistler_count(&d, k, e, eps).expect("validated");
        let plain = exceedance_count(&d.leaf_values(), e * n as f64, n).count;
        (kc, plain)
    });
    let kc: Vec<f64> = rows.iter().map(|r| r.0 as f64).collect();
    let plain: Vec<f64> = rows.iter().map(|r| r.1 as f64).collect();
    let positive = kc.iter().filter(|&&x| x > 0.0).count() as f64 / replicas as f64;
    let mut out = Outcome::default();
    out.push(
        ctx.report("positive_fraction")
            .at(e)
            .value(positive, (positive * (1.0 - positive) / replicas as f64).sqrt())
            .replicas(replicas)
            .target(1.0)
            .band(0.95, 1.0),
    );
    out.push(ctx.report("kistler_mean_count").at(e).sample(&Replicated::of(&kc)));
    out.push(ctx.report("exceedance_mean_count").at(e).sample(&Replicated::of(&plain)));
    out.point("kistler_mean_count", e, mean(&kc), 0.0, None);
    Ok(out)
}

fn mean(xs: &[f64]) -> f64 {
    crate::num::mean_se(xs).0
}

pub(super) fn brw_barrier(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.n(16);
    let sigma2 = ctx.f64("sigma2", 1.0)?;
    let replicas = ctx.replicas(10_000);
    let base = brw_cfg(n, sigma2)?;
    let c = velocity(sigma2)?;
    let logn = (n as f64).ln();
    let b = ctx.f64("b", logn * logn)?;
    let level = ctx.f64("level", logcor_centering(n, sigma2, 0.0)?)?;
    let rows = replicate(ctx.sub_seed(n as u64), replicas, |s| {
        let cfg = BrwConfig { seed: s, ..base };
        (
            brw::barrier_count_streaming(&cfg, c, b, level) as f64,
            brw::barrier_count_streaming(&cfg, c, f64::INFINITY, level) as f64,
        )
    });
    let barrier: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let plain: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let s = Replicated::of(&barrier);
    let mut out = Outcome::default();
    out.push(ctx.report("barrier_mean_count").at(b).sample(&s).band(0.01, 100.0));
    out.push(ctx.report("exceedance_mean_count").at(b).sample(&Replicated::of(&plain)));
    out.point("barrier_mean_count", n as f64, s.mean, s.se, None);
    Ok(out)
}

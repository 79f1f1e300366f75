//! Gaussian free field experiments.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;

use super::{column, product_moment, replicate, Ctx, Outcome};
use crate::error::{domain, Result};
use crate::gff::{branching_scale, green, spectral_green, BoxRegion, MultiscalePlan, SpectralSampler};
use crate::rng::replica_seed;

/// Scale count of a box: `2^n` is the nearest power of two to the site count.
fn scale_count(region: &BoxRegion) -> u32 {
    (region.sites() as f64).log2().round() as u32
}

pub(super) fn gff_green(ctx: &Ctx) -> Result<Outcome> {
    let side = ctx.usize("side", 63)?;
    let small = ctx.usize("small_side", 8)?;
    let region = BoxRegion::new(side, side)?;
    let small_region = BoxRegion::new(small, small)?;
    if side < 8 {
        return domain("the log-correlation check needs side >= 8");
    }
    let mut out = Outcome::default();

    let a = green(&small_region)?;
    let b = spectral_green(&small_region)?;
    let mut worst: f64 = 0.0;
    for i in 0..small_region.sites() {
        for j in 0..=i {
            worst = worst.max((a.get(i, j) - b.get(i, j)).abs());
        }
    }
    out.push(
        ctx.report("spectral_vs_dense_max_diff")
            .at(small as f64)
            .value(worst, 0.0)
            .target(0.0)
            .band(0.0, 1e-10),
    );

    let g = green(&region)?;
    let n = scale_count(&region);
    let log_sites = (region.sites() as f64).ln();
    let mid = side / 2;
    let centre = region.index(mid, mid);
    out.push(
        ctx.report("centre_diagonal_offset")
            .at(side as f64)
            .value(g.get(centre, centre) - log_sites / PI, 0.0)
            .band(-3.0, 3.0),
    );

    // Bulk pairs: first site in the central 16 x 16 block, separation 1 <= d <= side / 4.
    let reach = side as f64 / 4.0;
    let r = reach.floor() as i64;
    let lo_block = mid.saturating_sub(8);
    let hi_block = (mid + 8).min(side);
    let two_n = 2f64.powi(n as i32);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut pairs = 0u64;
    for y in lo_block..hi_block {
        for x in lo_block..hi_block {
            let i = region.index(x, y);
            for dy in -r..=r {
                for dx in -r..=r {
                    let d2 = (dx * dx + dy * dy) as f64;
                    if d2 == 0.0 || d2 > reach * reach {
                        continue;
                    }
                    let (xp, yp) = (x as i64 + dx, y as i64 + dy);
                    if !region.contains(xp, yp) {
                        continue;
                    }
                    let s = g.get(i, region.index(xp as usize, yp as usize)) + (d2 / two_n).ln() / PI;
                    lo = lo.min(s);
                    hi = hi.max(s);
                    pairs += 1;
                }
            }
        }
    }
    out.push(ctx.report("log_correlation_min").value(lo, 0.0).replicas(pairs).band(-3.0, 3.0));
    out.push(ctx.report("log_correlation_max").value(hi, 0.0).replicas(pairs).band(-3.0, 3.0));
    for d in 1..=r as usize {
        if mid + d >= side {
            break;
        }
        let v = g.get(centre, region.index(mid + d, mid));
        out.point("green_along_axis", d as f64, v, 0.0, Some((two_n / (d * d) as f64).ln() / PI));
    }
    Ok(out)
}

// Replicas are processed in fixed chunks so the accumulation order is independent of the
// thread count.
const CHUNK: u64 = 4096;

pub(super) fn gff_covariance(ctx: &Ctx) -> Result<Outcome> {
    let side = ctx.usize("side", 8)?;
    let replicas = ctx.replicas(1_000_000);
    let region = BoxRegion::new(side, side)?;
    let g = green(&region)?;
    let sampler = SpectralSampler::<f64>::new(&region)?;
    let m = region.sites();
    let tri = m * (m + 1) / 2;
    let seed = ctx.sub_seed(side as u64);

    let chunks: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = (0..replicas.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut sx = vec![0.0; m];
            let mut sxy = vec![0.0; tri];
            let mut sxy2 = vec![0.0; tri];
            for r in c * CHUNK..((c + 1) * CHUNK).min(replicas) {
                let f = sampler.sample(replica_seed(seed, r)).values;
                let mut k = 0;
                for i in 0..m {
                    sx[i] += f[i];
                    for j in 0..=i {
                        let p = f[i] * f[j];
                        sxy[k] += p;
                        sxy2[k] += p * p;
                        k += 1;
                    }
                }
            }
            (sx, sxy, sxy2)
        })
        .collect();
    let mut sx = vec![0.0; m];
    let mut sxy = vec![0.0; tri];
    let mut sxy2 = vec![0.0; tri];
    for (a, b, c) in &chunks {
        sx.iter_mut().zip(a).for_each(|(s, v)| *s += v);
        sxy.iter_mut().zip(b).for_each(|(s, v)| *s += v);
        sxy2.iter_mut().zip(c).for_each(|(s, v)| *s += v);
    }

    let rf = replicas as f64;
    let mut out = Outcome::default();
    let (mut worst_cov, mut worst_mean) = (0.0f64, 0.0f64);
    let mut k = 0;
    for i in 0..m {
        let second = sxy[tri_index(i, i)] / rf;
        let mean_se = (second / rf).sqrt();
        worst_mean = worst_mean.max((sx[i] / rf / mean_se).abs());
        for j in 0..=i {
            let emp = sxy[k] / rf;
            let se = ((sxy2[k] / rf - emp * emp) / rf).sqrt();
            let exact = g.get(i, j);
            worst_cov = worst_cov.max(((emp - exact) / se).abs());
            out.point("covariance", exact, emp, se, Some(exact));
            k += 1;
        }
    }
    out.push(
        ctx.report("covariance_max_abs_z")
            .at(side as f64)
            .value(worst_cov, 0.0)
            .replicas(replicas)
            .target(0.0)
            .band(0.0, 5.0),
    );
    out.push(
        ctx.report("mean_max_abs_z")
            .at(side as f64)
            .value(worst_mean, 0.0)
            .replicas(replicas)
            .target(0.0)
            .band(0.0, 4.0),
    );
    Ok(out)
}

fn tri_index(i: usize, j: usize) -> usize {
    i * (i + 1) / 2 + j
}

pub(super) fn gff_increments(ctx: &Ctx) -> Result<Outcome> {
    let side = ctx.usize("side", 64)?;
    let replicas = ctx.replicas(10_000);
    let region = BoxRegion::new(side, side)?;
    let n = scale_count(&region);
    let mid = (side / 2) as i64;
    let centre = MultiscalePlan::new(&region, (mid, mid), n)?;
    let dists: Vec<i64> = [2i64, 4, 8, 16].into_iter().filter(|d| d / 2 < mid).collect();
    let pairs: Vec<(i64, MultiscalePlan, MultiscalePlan)> = dists
        .iter()
        .map(|&d| {
            Ok((
                d,
                MultiscalePlan::new(&region, (mid - d / 2, mid), n)?,
                MultiscalePlan::new(&region, (mid + d / 2, mid), n)?,
            ))
        })
        .collect::<Result<_>>()?;
    let sampler = SpectralSampler::<f64>::new(&region)?;

    let rows = replicate(ctx.sub_seed(side as u64), replicas, |s| {
        let f = sampler.sample(s);
        let mut row = centre.increments(&f);
        for (_, a, b) in &pairs {
            row.extend(a.increments(&f));
            row.extend(b.increments(&f));
        }
        row
    });
    let nl = n as usize;
    let target = LN_2 / PI;
    let mut out = Outcome::default();
    for l in 1..=nl {
        let y = column(&rows, l - 1);
        let (v, se) = product_moment(&y, &y);
        let mut r = ctx.report("increment_variance").at(l as f64).value(v, se).replicas(replicas).target(target);
        if (2..=nl / 2).contains(&l) && !centre.clipped(l as u32) {
            r = r.band(0.15, 0.30);
        }
        out.push(r);
        out.point("increment_variance", l as f64, v, se, Some(target));
    }
    for (p, (d, a, b)) in pairs.iter().enumerate() {
        let bs = branching_scale(&region, a.site, b.site, n) as usize;
        let base = nl * (1 + 2 * p);
        let name = format!("pair_covariance_d{d}");
        let (mut coupled_min, mut decoupled_max) = (None::<(f64, f64)>, None::<(f64, f64)>);
        for l in 1..=nl {
            let (cv, se) = product_moment(&column(&rows, base + l - 1), &column(&rows, base + nl + l - 1));
            let mut r = ctx.report(&name).at(l as f64).value(cv, se).replicas(replicas);
            if l + 2 <= bs {
                r = r.target(target);
                if coupled_min.is_none_or(|m| cv < m.0) {
                    coupled_min = Some((cv, se));
                }
            } else if l >= bs + 2 {
                r = r.target(0.0);
                if decoupled_max.is_none_or(|m| cv > m.0) {
                    decoupled_max = Some((cv, se));
                }
            }
            out.push(r);
            out.point(&name, l as f64, cv, se, None);
        }
        if let (Some(c), Some(dm)) = (coupled_min, decoupled_max) {
            out.push(
                ctx.report("dichotomy_gap")
                    .at(*d as f64)
                    .value(c.0 - dm.0, c.1.hypot(dm.1))
                    .replicas(replicas)
                    .target(target)
                    .at_least(0.1),
            );
        }
    }
    Ok(out)
}

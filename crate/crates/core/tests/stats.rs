//! Extreme-value statistics against exact tails and closed forms.

use logcor::brw::{self, sample_decomposition, BrwConfig};
use logcor::iid::{self, IidConfig};
use logcor::rng::replica_seed;
use logcor::stats::{
    ballot_exact_one_step, ballot_mc, barrier_count, entropy_estimate, exceedance_count,
    free_energy, gibbs_weights, kistler_count, ks_distance, log_partition, max_distribution,
    BallotParams,
};
use logcor::theory::{gumbel_cdf, iid_centering, normal_tail_exact, velocity};
use proptest::prelude::*;

fn mean_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

#[test]
fn iid_exceedances_at_the_centering_match_the_exact_tail() {
    let n = 10;
    let a_n = iid_centering(n, 1.0).unwrap().a_n;
    let counts: Vec<f64> = (0..10_000u64)
        .map(|r| {
            let x = iid::sample_field(&IidConfig::new(n, 1.0, replica_seed(61, r)).unwrap());
            exceedance_count(&x, a_n, n).count as f64
        })
        .collect();
    let (m, se) = mean_se(&counts);
    let t = 1024.0 * normal_tail_exact(a_n, n as f64).unwrap();
    assert!((m - t).abs() <= 3.0 * se, "{m} vs {t} (se {se})");
}

#[test]
fn brw_maxima_are_not_iid_gumbel() {
    let n = 20;
    let cent = iid_centering(n, 1.0).unwrap();
    let maxima: Vec<f64> = (0..150u64)
        .map(|r| brw::sample_max(&BrwConfig::new(n, 1.0, replica_seed(62, r)).unwrap()).0)
        .collect();
    let d = max_distribution(&maxima, cent.a_n, cent.b_n, cent.velocity, cent.gumbel_c).unwrap();
    assert!(d.ks > 0.1, "KS {}", d.ks);
}

/// CDF of the maximum of `2^n` IID `N(0, n)` values, centred at `a_n`.
fn exact_max_cdf(n: u32, a_n: f64, x: f64) -> f64 {
    let tail = normal_tail_exact(a_n + x, n as f64).unwrap();
    ((1u64 << n) as f64 * (-tail).ln_1p()).exp()
}

#[test]
fn exact_iid_max_law_approaches_gumbel() {
    let mut prev = f64::INFINITY;
    for n in [10u32, 20, 40] {
        let cent = iid_centering(n, 1.0).unwrap();
        let sup = (-6000..10_000)
            .map(|i| {
                let x = i as f64 / 1000.0;
                let g = gumbel_cdf(x, cent.velocity, cent.gumbel_c).unwrap();
                (exact_max_cdf(n, cent.a_n, x) - g).abs()
            })
            .fold(0.0, f64::max);
        assert!(sup < prev, "n = {n}: {sup}");
        if n >= 20 {
            assert!(sup <= 0.05, "n = {n}: {sup}");
        }
        prev = sup;
    }
}

#[test]
fn iid_maxima_follow_the_exact_law() {
    let n = 20;
    let cent = iid_centering(n, 1.0).unwrap();
    let reps = 50_000u64;
    let maxima: Vec<f64> = (0..reps)
        .map(|r| iid::sample_max_exact(&IidConfig::new(n, 1.0, replica_seed(63, r)).unwrap()))
        .collect();
    let centered: Vec<f64> = maxima.iter().map(|m| m - cent.a_n).collect();
    let ks = ks_distance(&centered, |x| exact_max_cdf(n, cent.a_n, x)).unwrap();
    assert!(ks <= 1.628 / (reps as f64).sqrt(), "KS {ks}");
    assert!(max_distribution(&maxima[..99], cent.a_n, 1.0, cent.velocity, cent.gumbel_c).is_err());
}

#[test]
fn one_step_ballot_is_a_normal_window() {
    let p = BallotParams {
        n_steps: 1,
        sigma2: 2.0,
        barrier: 1.0,
        b: -0.5,
        delta: 1.0,
    };
    let exact = ballot_exact_one_step(&p).unwrap();
    let (est, se) = ballot_mc(&p, 1_000_000, 64).unwrap();
    assert!((est - exact).abs() <= 4.0 * se, "{est} vs {exact}");
}

#[test]
fn unbounded_barrier_leaves_the_endpoint_window() {
    let p = BallotParams {
        n_steps: 16,
        sigma2: 1.0,
        barrier: f64::INFINITY,
        b: 0.0,
        delta: 1.0,
    };
    // S_16 ~ N(0, 16), so P(0 < S < 1) is a difference of normal tails.
    let exact = normal_tail_exact(0.0, 16.0).unwrap() - normal_tail_exact(1.0, 16.0).unwrap();
    let (est, se) = ballot_mc(&p, 1_000_000, 65).unwrap();
    assert!((est - exact).abs() <= 4.0 * se, "{est} vs {exact}");
}

#[test]
fn ballot_rejects_bad_windows() {
    let mut p = BallotParams {
        n_steps: 8,
        sigma2: 1.0,
        barrier: 1.0,
        b: 0.5,
        delta: 1.0,
    };
    assert!(ballot_mc(&p, 10, 1).is_err());
    p.b = 0.0;
    assert!(ballot_mc(&p, 0, 1).is_err());
    p.barrier = -1.0;
    assert!(ballot_mc(&p, 10, 1).is_err());
}

#[test]
fn kistler_counts_are_mostly_positive_at_half_velocity() {
    let c = velocity(1.0).unwrap();
    let positive = (0..40u64)
        .filter(|&r| {
            let d = sample_decomposition(&BrwConfig::new(20, 1.0, replica_seed(66, r)).unwrap()).unwrap();
            kistler_count(&d, 4, c / 2.0, 0.05).unwrap() > 0
        })
        .count();
    assert!(positive >= 38, "{positive} of 40");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn counts_and_entropy_are_monotone(n in 2u32..10, seed in any::<u64>(), y in -5.0f64..5.0, dy in 0.0f64..3.0) {
        let x = brw::sample_decomposition(&BrwConfig::new(n, 1.0, seed).unwrap()).unwrap().leaf_values();
        let a = exceedance_count(&x, y, n);
        let b = exceedance_count(&x, y + dy, n);
        prop_assert!(b.count <= a.count && a.count <= a.total);
        let ea = entropy_estimate(&x, y / n as f64, n).unwrap();
        let eb = entropy_estimate(&x, (y + dy) / n as f64, n).unwrap();
        prop_assert!(eb.value <= ea.value);
        prop_assert!((entropy_estimate(&x, -1e6, n).unwrap().value - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn free_energy_sandwich_and_convexity(n in 2u32..12, seed in any::<u64>(), beta in 0.05f64..8.0) {
        let x = brw::sample_decomposition(&BrwConfig::new(n, 1.0, seed).unwrap()).unwrap().leaf_values();
        let mx = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let f = free_energy(&x, beta, n).unwrap();
        let nf = n as f64;
        prop_assert!(mx / nf <= f + 1e-12);
        prop_assert!(f <= std::f64::consts::LN_2 / beta + mx / nf + 1e-12);
        // log Z is convex in beta.
        let l = |b: f64| log_partition(&x, b).unwrap();
        let (b0, b1, b2) = (beta, beta * 1.5, beta * 2.0);
        prop_assert!(l(b1) <= 0.5 * (l(b0) + l(b2)) + 1e-9);
    }

    #[test]
    fn gibbs_weights_normalise_and_favour_the_max(n in 1u32..10, seed in any::<u64>(), beta in 1e-9f64..20.0) {
        let x = brw::sample_decomposition(&BrwConfig::new(n, 1.0, seed).unwrap()).unwrap().leaf_values();
        let w = gibbs_weights(&x, beta).unwrap();
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let arg = (0..x.len()).max_by(|&i, &j| x[i].total_cmp(&x[j])).unwrap();
        prop_assert!(w.iter().all(|&v| v <= w[arg]));
    }

    #[test]
    fn restricted_counts_are_dominated(n in 4u32..10, seed in any::<u64>(), e in -1.0f64..1.2, big_b in -3.0f64..6.0) {
        let n = n - n % 4;
        let d = brw::sample_decomposition(&BrwConfig::new(n, 1.0, seed).unwrap()).unwrap();
        let x = d.leaf_values();
        let c = velocity(1.0).unwrap();
        let level = e * n as f64;
        let plain = exceedance_count(&x, level, n).count;
        prop_assert!(barrier_count(&d, c, big_b, level) <= plain);
        prop_assert_eq!(barrier_count(&d, c, f64::INFINITY, level), plain);
        prop_assert_eq!(barrier_count(&d, c, -c * n as f64 - 1.0, 0.0), 0);
        let eps = 0.05;
        let k = kistler_count(&d, 4, e, eps).unwrap();
        let implied = (1.0 + eps) * 0.75 * e * n as f64;
        let upper = (0..x.len() as u64)
            .filter(|&v| d.x(v, n) - d.x(v, n / 4) > implied - 1e-9)
            .count() as u64;
        prop_assert!(k <= upper);
    }
}

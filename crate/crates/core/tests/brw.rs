//! Branching random walk against its covariance and self-similarity oracles.

use logcor::brw::{self, branching_scale, covariance, sample_decomposition, BrwConfig};
use logcor::rng::replica_seed;
use logcor::stats::ks_two_sample;
use proptest::prelude::*;

fn cfg(n: u32, seed: u64) -> BrwConfig<f64> {
    BrwConfig::new(n, 1.0, seed).unwrap()
}

/// Mean of `x` and its standard error.
fn mean_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

#[test]
fn leaf_covariance_is_sigma2_times_branching_scale() {
    let n = 3;
    let leaves = 1usize << n;
    let reps = 1_000_000u64;
    let mut prods = vec![Vec::with_capacity(reps as usize); leaves * leaves];
    for r in 0..reps {
        let x = sample_decomposition(&cfg(n, replica_seed(11, r))).unwrap().leaf_values();
        for u in 0..leaves {
            for v in u..leaves {
                prods[u * leaves + v].push(x[u] * x[v]);
            }
        }
    }
    for u in 0..leaves {
        for v in u..leaves {
            let (m, se) = mean_se(&prods[u * leaves + v]);
            let t = covariance(u as u64, v as u64, n, 1.0);
            assert!((m - t).abs() <= 5.0 * se, "({u},{v}): {m} vs {t} (se {se})");
        }
    }
}

#[test]
fn increments_couple_then_decouple() {
    // E[Y_l(u) Y_l(v)] is sigma2 up to the branching scale and 0 after it.
    let n = 4;
    let reps = 100_000u64;
    let (u, v) = (0u64, 3u64); // split at scale 2
    let mut prods = vec![Vec::with_capacity(reps as usize); n as usize];
    for r in 0..reps {
        let d = sample_decomposition(&cfg(n, replica_seed(12, r))).unwrap();
        for l in 1..=n {
            prods[l as usize - 1].push(d.y(u, l) * d.y(v, l));
        }
    }
    let b = branching_scale(u, v, n);
    assert_eq!(b, 2);
    for l in 1..=n {
        let (m, se) = mean_se(&prods[l as usize - 1]);
        let t = if l <= b { 1.0 } else { 0.0 };
        assert!((m - t).abs() <= 5.0 * se, "l = {l}: {m}");
    }
}

#[test]
fn per_scale_variance_at_n12() {
    let n = 12;
    let reps = 10_000u64;
    let mut ys = vec![Vec::with_capacity(reps as usize); n as usize];
    for r in 0..reps {
        let d = sample_decomposition(&cfg(n, replica_seed(13, r))).unwrap();
        for l in 1..=n {
            ys[l as usize - 1].push(d.y(1234, l));
        }
    }
    for (l, y) in ys.iter().enumerate() {
        let v = y.iter().map(|a| a * a).sum::<f64>() / reps as f64;
        assert!((v - 1.0).abs() < 0.05, "l = {}: {v}", l + 1);
    }
}

#[test]
fn prefix_field_is_a_shallower_walk() {
    // max over depth-8 prefixes of a depth-10 walk vs max of an independent depth-8 walk.
    let reps = 10_000u64;
    let deep: Vec<f64> = (0..reps)
        .map(|r| {
            let d = sample_decomposition(&cfg(10, replica_seed(14, r))).unwrap();
            d.level_values(8).into_iter().fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let shallow: Vec<f64> = (0..reps)
        .map(|r| brw::sample_max(&cfg(8, replica_seed(15, r))).0)
        .collect();
    let ks = ks_two_sample(&deep, &shallow).unwrap();
    assert!(ks < 0.05, "KS {ks}");
}

#[test]
fn leaf_mean_is_centred() {
    let reps = 100_000u64;
    let means: Vec<f64> = (0..reps)
        .map(|r| {
            let x = sample_decomposition(&cfg(5, replica_seed(16, r))).unwrap().leaf_values();
            x.iter().sum::<f64>() / x.len() as f64
        })
        .collect();
    let (m, se) = mean_se(&means);
    assert!(m.abs() <= 4.0 * se);
}

#[test]
fn depth_one_leaves_are_independent_unit_normals() {
    let reps = 200_000u64;
    let (mut a, mut b, mut ab) = (Vec::new(), Vec::new(), Vec::new());
    for r in 0..reps {
        let x = sample_decomposition(&cfg(1, replica_seed(17, r))).unwrap().leaf_values();
        a.push(x[0] * x[0]);
        b.push(x[1] * x[1]);
        ab.push(x[0] * x[1]);
    }
    for (s, t) in [(&a, 1.0), (&b, 1.0), (&ab, 0.0)] {
        let (m, se) = mean_se(s);
        assert!((m - t).abs() <= 5.0 * se);
    }
}

proptest! {
    #[test]
    fn branching_scale_is_common_prefix_length(n in 1u32..=20, u in any::<u64>(), v in any::<u64>()) {
        let mask = (1u64 << n) - 1;
        let (u, v) = (u & mask, v & mask);
        let b = branching_scale(u, v, n);
        prop_assert!(b <= n);
        prop_assert_eq!(b == n, u == v);
        prop_assert_eq!(b, branching_scale(v, u, n));
        // The top b bits agree and bit b + 1 differs.
        let mut k = 0;
        while k < n && (u >> (n - 1 - k)) == (v >> (n - 1 - k)) {
            k += 1;
        }
        prop_assert_eq!(b, k);
        prop_assert_eq!(covariance(u, v, n, 2.5), 2.5 * b as f64);
    }

    #[test]
    fn rows_sum_to_leaves_and_max_dominates(n in 1u32..=10, seed in any::<u64>()) {
        let c = cfg(n, seed);
        let d = sample_decomposition(&c).unwrap();
        let leaves = d.leaf_values();
        for (v, x) in leaves.iter().enumerate() {
            let mut s = 0.0;
            for y in d.row(v as u64) {
                s += y;
            }
            prop_assert_eq!(s.to_bits(), x.to_bits());
        }
        let (m, arg) = brw::sample_max(&c);
        prop_assert!(m >= leaves[0]);
        prop_assert_eq!(m.to_bits(), leaves[arg as usize].to_bits());
        prop_assert!(leaves[..arg as usize].iter().all(|&x| x < m));
    }

    #[test]
    fn shared_edges_below_the_branching_scale(n in 2u32..=10, seed in any::<u64>(), u in any::<u64>(), v in any::<u64>()) {
        let mask = (1u64 << n) - 1;
        let (u, v) = (u & mask, v & mask);
        let d = sample_decomposition(&cfg(n, seed)).unwrap();
        let b = branching_scale(u, v, n);
        for l in 1..=n {
            if l <= b {
                prop_assert_eq!(d.y(u, l).to_bits(), d.y(v, l).to_bits());
            } else {
                prop_assert!(d.y(u, l) != d.y(v, l));
            }
        }
    }
}

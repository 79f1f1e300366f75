use crate::error::{domain, Result};
use crate::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExceedanceReport<T> {
    pub level: T,
    pub count: u64,
    pub total: u64,
    pub n: u32,
}

/// Number of sites with `X_v > y`.
pub fn exceedance_count<T: Real>(values: &[T], y: T, n: u32) -> ExceedanceReport<T> {
    let count = values.iter().filter(|&&x| x > y).count() as u64;
    ExceedanceReport {
        level: y,
        count,
        total: values.len() as u64,
        n,
    }
}

/// `(1/n) log #{v : X_v > E n}`. An empty count yields `value = -inf` with `empty` set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyEstimate<T> {
    pub value: T,
    pub count: u64,
    pub empty: bool,
}

pub fn entropy_estimate<T: Real>(values: &[T], e: T, n: u32) -> Result<EntropyEstimate<T>> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    let nf = T::cst(n as f64);
    let count = exceedance_count(values, e * nf, n).count;
    Ok(if count == 0 {
        EntropyEstimate {
            value: T::neg_infinity(),
            count,
            empty: true,
        }
    } else {
        EntropyEstimate {
            value: T::cst((count as f64).ln()) / nf,
            count,
            empty: false,
        }
    })
}

/// Streaming log-sum-exp that rescales whenever a new maximum arrives.
#[derive(Clone, Copy, Debug)]
pub struct LogSumExp {
    max: f64,
    scaled: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }
}

impl LogSumExp {
    pub fn push(&mut self, a: f64) {
        if a > self.max {
            self.scaled = self.scaled * (self.max - a).exp() + 1.0;
            self.max = a;
        } else {
            self.scaled += (a - self.max).exp();
        }
    }

    pub fn value(&self) -> f64 {
        self.max + self.scaled.ln()
    }
}

fn check_beta<T: Real>(beta: T) -> Result<()> {
    if !(beta > T::zero()) {
        return domain("beta must be positive");
    }
    Ok(())
}

/// `log Z = log sum_v exp(beta X_v)`, max-shifted. Accumulated in `f64`.
pub fn log_partition<T: Real>(values: &[T], beta: T) -> Result<T> {
    check_beta(beta)?;
    if values.is_empty() {
        return domain("empty field");
    }
    let b = beta.as_f64();
    let max = values.iter().fold(f64::NEG_INFINITY, |m, x| m.max(x.as_f64()));
    let shifted: Vec<f64> = values.iter().map(|x| (b * (x.as_f64() - max)).exp()).collect();
    Ok(T::cst(b * max + crate::num::pairwise_sum(&shifted).ln()))
}

/// Free energy `(1/(beta n)) log Z`.
pub fn free_energy<T: Real>(values: &[T], beta: T, n: u32) -> Result<T> {
    let lz = log_partition(values, beta)?;
    Ok(lz / (beta * T::cst(n as f64)))
}

/// `(1/n) log Z`, the normalization under which the variational limit reads
/// `max_E (beta E + S(E))`.
pub fn log_partition_density<T: Real>(values: &[T], beta: T, n: u32) -> Result<T> {
    Ok(log_partition(values, beta)? / T::cst(n as f64))
}

/// Gibbs weights `exp(beta X_v) / Z`.
pub fn gibbs_weights<T: Real>(values: &[T], beta: T) -> Result<Vec<T>> {
    check_beta(beta)?;
    if values.is_empty() {
        return domain("empty field");
    }
    let b = beta.as_f64();
    let max = values.iter().fold(f64::NEG_INFINITY, |m, x| m.max(x.as_f64()));
    let w: Vec<f64> = values.iter().map(|x| (b * (x.as_f64() - max)).exp()).collect();
    let z = crate::num::pairwise_sum(&w);
    Ok(w.into_iter().map(|x| T::cst(x / z)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exceedance_is_strict() {
        let v = [1.0, 2.0, 2.0, 3.0];
        assert_eq!(exceedance_count(&v, 2.0, 2).count, 1);
        assert_eq!(exceedance_count(&v, 0.0, 2).count, 4);
        assert_eq!(exceedance_count(&v, 3.0, 2).count, 0);
    }

    #[test]
    fn entropy_edges() {
        let v: Vec<f64> = (0..1024).map(|i| i as f64 / 100.0).collect();
        let all = entropy_estimate(&v, -1.0, 10).unwrap();
        assert!((all.value - 2f64.ln()).abs() < 1e-15);
        let none = entropy_estimate(&v, 100.0, 10).unwrap();
        assert!(none.empty && none.value == f64::NEG_INFINITY);
    }

    #[test]
    fn degenerate_field_free_energy() {
        let v = vec![0.0f64; 1 << 10];
        for beta in [0.3, 1.0, 5.0] {
            let f = free_energy(&v, beta, 10).unwrap();
            assert!((f - 2f64.ln() / beta).abs() < 1e-14);
        }
    }

    #[test]
    fn no_overflow_at_large_exponents() {
        let v = [800.0f64, 799.0, 0.0];
        let lz = log_partition(&v, 1.0).unwrap();
        assert!((lz - (800.0 + (1.0 + (-1.0f64).exp() + (-800.0f64).exp()).ln())).abs() < 1e-12);
        let mut acc = LogSumExp::default();
        for x in v {
            acc.push(x);
        }
        assert!((acc.value() - lz).abs() < 1e-12);
    }

    #[test]
    fn gibbs_uniform_and_near_uniform() {
        let w = gibbs_weights(&[0.5f64; 8], 2.0).unwrap();
        assert!(w.iter().all(|&x| (x - 0.125).abs() < 1e-15));
        let v: Vec<f64> = (0..100).map(|i| (i as f64).sin() * 10.0).collect();
        let w = gibbs_weights(&v, 1e-9).unwrap();
        let tv: f64 = w.iter().map(|x| (x - 0.01).abs()).sum::<f64>() / 2.0;
        assert!(tv < 1e-6);
        assert!(gibbs_weights(&v, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn exceedance_non_increasing(v in prop::collection::vec(-10.0f64..10.0, 1..200), a in -10.0f64..10.0, d in 0.0f64..5.0) {
            prop_assert!(exceedance_count(&v, a + d, 1).count <= exceedance_count(&v, a, 1).count);
            let n = 3;
            let s1 = entropy_estimate(&v, a, n).unwrap().value;
            let s2 = entropy_estimate(&v, a + d, n).unwrap().value;
            prop_assert!(s2 <= s1);
        }

        #[test]
        fn sandwich_holds(v in prop::collection::vec(-10.0f64..10.0, 1..300), beta in 0.01f64..20.0, n in 1u32..30) {
            let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let nf = n as f64;
            let f = free_energy(&v, beta, n).unwrap();
            let tol = 1e-12 * (1.0 + f.abs());
            prop_assert!(m / nf <= f + tol);
            prop_assert!(f <= (v.len() as f64).ln() / (beta * nf) + m / nf + tol);
        }

        #[test]
        fn log_partition_convex_in_beta(v in prop::collection::vec(-5.0f64..5.0, 2..100), b in 0.1f64..5.0, h in 0.01f64..1.0) {
            let l0 = log_partition(&v, b).unwrap();
            let l1 = log_partition(&v, b + h).unwrap();
            let l2 = log_partition(&v, b + 2.0 * h).unwrap();
            prop_assert!(l0 + l2 - 2.0 * l1 >= -1e-10);
        }

        #[test]
        fn gibbs_sums_to_one_and_peaks_at_argmax(v in prop::collection::vec(-50.0f64..50.0, 1..200), beta in 0.01f64..10.0) {
            let w = gibbs_weights(&v, beta).unwrap();
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let arg = v.iter().enumerate().fold(0, |a, (i, &x)| if x > v[a] { i } else { a });
            prop_assert!(w.iter().all(|&x| x <= w[arg]));
        }
    }
}

//! Random Euler-product model: `sum_{p <= T} Re(U_p p^{-ih}) / sqrt(p)` with independent
//! uniform phases `U_p`, evaluated at shifts `h in [0, 1]`.
//!
//! With `T = exp(2^n)` the primes split into dyadic blocks `2^{l-1} < log p <= 2^l`,
//! `l = 1..=n`. The prime 2 (`log 2 < 1`) is put in block 1 so the blocks partition the table.
//! The field is defined as the sum of the block sums in increasing `l`, so concatenating the
//! increments reproduces it exactly.

mod sieve;

use std::f64::consts::{LN_2, TAU};
use std::ops::Range;

pub use sieve::{read_cache, sieve_primes, write_cache, PrimeTable, MAX_SIEVE};

use crate::error::{domain, Error, Result};
use crate::rng::CounterRng;

pub const MAX_LEVELS: u32 = 4;

/// Prime table for `T = floor(exp(2^n))` with its block boundaries and `log p`.
#[derive(Clone, Debug)]
pub struct ZetaModel {
    pub n: u32,
    pub table: PrimeTable,
    log_p: Vec<f64>,
    blocks: Vec<Range<usize>>,
}

/// `floor(exp(2^l))`, the largest integer with `log p <= 2^l`.
pub fn block_cutoff(l: u32) -> u64 {
    (2f64.powi(l as i32)).exp().floor() as u64
}

impl ZetaModel {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return domain("need at least one block");
        }
        if n > MAX_LEVELS {
            return Err(Error::Capacity(format!(
                "n = {n} needs all primes up to exp(2^{n}); the model is capped at n = {MAX_LEVELS} (T = e^16)"
            )));
        }
        let table = sieve_primes(block_cutoff(n))?;
        Ok(Self::from_table(n, table))
    }

    /// Uses a table that must cover at least `exp(2^n)`; extra primes are dropped.
    pub fn from_table(n: u32, mut table: PrimeTable) -> Self {
        let cutoff = block_cutoff(n);
        table.primes.retain(|&p| p as u64 <= cutoff);
        table.cutoff = cutoff;
        let log_p: Vec<f64> = table.primes.iter().map(|&p| (p as f64).ln()).collect();
        let mut blocks = Vec::with_capacity(n as usize);
        let mut start = 0;
        for l in 1..=n {
            let hi = block_cutoff(l);
            let end = start + table.primes[start..].partition_point(|&p| p as u64 <= hi);
            blocks.push(start..end);
            start = end;
        }
        Self {
            n,
            table,
            log_p,
            blocks,
        }
    }

    pub fn primes(&self) -> &[u32] {
        &self.table.primes
    }

    /// Index range of block `l` in the prime table.
    pub fn block(&self, l: u32) -> Result<Range<usize>> {
        if l == 0 || l > self.n {
            return domain(format!("block {l} outside 1..={}", self.n));
        }
        let r = self.blocks[l as usize - 1].clone();
        if r.is_empty() {
            return domain(format!("block {l} (2^{} < log p <= 2^{l}) holds no primes", l - 1));
        }
        Ok(r)
    }

    /// `(1/2) sum_{p in block l} 1/p`, the exact variance of `Y_h(l)`.
    pub fn block_variance(&self, l: u32) -> Result<f64> {
        Ok(self.block(l)?.map(|i| 0.5 / self.table.primes[i] as f64).sum())
    }

    /// `(1/2) sum_{p <= T} 1/p`, the exact variance of the field at a point.
    pub fn field_variance(&self) -> f64 {
        self.table.primes.iter().map(|&p| 0.5 / p as f64).sum()
    }

    /// Exact `E[Y_h(l) Y_h'(l)] = (1/2) sum_{p in block l} cos((h - h') log p) / p`.
    pub fn increment_covariance_exact(&self, l: u32, h: f64, hp: f64) -> Result<f64> {
        let d = h - hp;
        Ok(self
            .block(l)?
            .map(|i| 0.5 * (d * self.log_p[i]).cos() / self.table.primes[i] as f64)
            .sum())
    }

    pub fn sample_phases(&self, seed: u64) -> PhaseVector {
        PhaseVector::sample(self.table.primes.len(), seed)
    }

    /// `Y_h(l)`, summed over the block in increasing prime order.
    pub fn increment(&self, l: u32, h: f64, phases: &PhaseVector) -> Result<f64> {
        let r = self.block(l)?;
        Ok(self.partial_sum(r, h, phases))
    }

    fn partial_sum(&self, r: Range<usize>, h: f64, phases: &PhaseVector) -> f64 {
        let mut s = 0.0;
        for i in r {
            s += (phases.angles[i] - h * self.log_p[i]).cos() / (self.table.primes[i] as f64).sqrt();
        }
        s
    }

    /// Field value at `h`: the block sums added in increasing `l`.
    pub fn field_at(&self, h: f64, phases: &PhaseVector) -> f64 {
        let mut s = 0.0;
        for r in &self.blocks {
            s += self.partial_sum(r.clone(), h, phases);
        }
        s
    }

    /// Field on the grid `h_m = m / M`, `m = 0..M`.
    pub fn sample_field(&self, m: usize, seed: u64) -> Result<ZetaFieldSample> {
        if m < 2 {
            return domain("grid needs at least two points");
        }
        let phases = self.sample_phases(seed);
        let h: Vec<f64> = (0..m).map(|i| i as f64 / m as f64).collect();
        let values = h.iter().map(|&x| self.field_at(x, &phases)).collect();
        Ok(ZetaFieldSample { seed, h, values })
    }
}

/// Independent uniform phases, stored as angles in `[0, 2pi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseVector {
    pub seed: u64,
    pub angles: Vec<f64>,
}

impl PhaseVector {
    /// Angle `i` is the `i`-th uniform of stream `0` under `seed`.
    pub fn sample(count: usize, seed: u64) -> Self {
        let mut rng = CounterRng::new(seed, 0);
        Self {
            seed,
            angles: (0..count).map(|_| TAU * rng.uniform()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZetaFieldSample {
    pub seed: u64,
    pub h: Vec<f64>,
    pub values: Vec<f64>,
}

impl ZetaFieldSample {
    /// CSV with header `h,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("h,value\n");
        for (h, v) in self.h.iter().zip(&self.values) {
            s.push_str(&format!("{h},{v}\n"));
        }
        s
    }
}

/// Fast repeated evaluation of all block increments at a fixed set of shifts: the
/// `cos(h log p)/sqrt(p)` and `sin(h log p)/sqrt(p)` tables are built once, so each phase draw
/// costs one `sin_cos` per prime plus two multiply-adds per prime and shift.
#[derive(Clone, Debug)]
pub struct ZetaEvaluator<'a> {
    model: &'a ZetaModel,
    pub shifts: Vec<f64>,
    // Per shift, interleaved (cos, sin) weights per prime.
    tables: Vec<Vec<(f64, f64)>>,
}

impl<'a> ZetaEvaluator<'a> {
    pub fn new(model: &'a ZetaModel, shifts: &[f64]) -> Self {
        let tables = shifts
            .iter()
            .map(|&h| {
                model
                    .table
                    .primes
                    .iter()
                    .zip(&model.log_p)
                    .map(|(&p, &lp)| {
                        let (s, c) = (h * lp).sin_cos();
                        let r = 1.0 / (p as f64).sqrt();
                        (c * r, s * r)
                    })
                    .collect()
            })
            .collect();
        Self {
            model,
            shifts: shifts.to_vec(),
            tables,
        }
    }

    /// `Y_{h_s}(l)` for every shift `s` and scale `l`, as `out[s][l - 1]`.
    ///
    /// Uses `cos(theta - h log p) = cos theta cos(h log p) + sin theta sin(h log p)`, so values
    /// agree with [`ZetaModel::increment`] to rounding, not bit for bit.
    pub fn increments(&self, phases: &PhaseVector) -> Vec<Vec<f64>> {
        let cs: Vec<(f64, f64)> = phases.angles.iter().map(|a| a.sin_cos()).collect();
        self.tables
            .iter()
            .map(|tab| {
                self.model
                    .blocks
                    .iter()
                    .map(|r| {
                        let mut s = 0.0;
                        for i in r.clone() {
                            let (sn, c) = cs[i];
                            s += c * tab[i].0 + sn * tab[i].1;
                        }
                        s
                    })
                    .collect()
            })
            .collect()
    }
}

/// `h ∧ h' = log_2 (1 / |h - h'|)`; identical points give `+inf` with `identical` set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaBranching {
    pub scale: f64,
    pub identical: bool,
}

pub fn branching_scale(h: f64, hp: f64) -> ZetaBranching {
    let d = (h - hp).abs();
    if d == 0.0 {
        ZetaBranching {
            scale: f64::INFINITY,
            identical: true,
        }
    } else {
        ZetaBranching {
            scale: -d.log2(),
            identical: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Coupled,
    Decoupled,
}

/// Leading-order increment covariance: `log 2 / 2` up to the branching scale, `0` past it.
pub fn increment_covariance_pred(l: u32, h: f64, hp: f64) -> (f64, Regime) {
    if (l as f64) <= branching_scale(h, hp).scale {
        (LN_2 / 2.0, Regime::Coupled)
    } else {
        (0.0, Regime::Decoupled)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_layout() {
        let m = ZetaModel::new(3).unwrap();
        assert_eq!(m.table.cutoff, 2980);
        assert_eq!(&m.primes()[m.block(1).unwrap()], &[2, 3, 5, 7]);
        let b2 = m.block(2).unwrap();
        assert_eq!(m.primes()[b2.start], 11);
        assert_eq!(m.primes()[b2.end - 1], 53);
        assert_eq!(m.block(3).unwrap().end, m.primes().len());
        assert!(m.block(4).is_err());
        assert!(matches!(ZetaModel::new(5), Err(Error::Capacity(_))));
    }

    #[test]
    fn degenerate_phases_give_reciprocal_root_sum() {
        let m = ZetaModel::new(2).unwrap();
        let zero = PhaseVector {
            seed: 0,
            angles: vec![0.0; m.primes().len()],
        };
        let direct: f64 = m.primes().iter().map(|&p| 1.0 / (p as f64).sqrt()).sum();
        assert!((m.field_at(0.0, &zero) - direct).abs() < 1e-13);
    }

    #[test]
    fn blocks_concatenate_to_the_field() {
        let m = ZetaModel::new(3).unwrap();
        let ph = m.sample_phases(9);
        for h in [0.0, 0.3, 0.77] {
            let mut s = 0.0;
            for l in 1..=3 {
                s += m.increment(l, h, &ph).unwrap();
            }
            assert_eq!(s, m.field_at(h, &ph));
        }
    }

    #[test]
    fn evaluator_agrees_with_direct_sum() {
        let m = ZetaModel::new(3).unwrap();
        let ph = m.sample_phases(2);
        let ev = ZetaEvaluator::new(&m, &[0.1, 0.6]);
        let inc = ev.increments(&ph);
        for (s, &h) in ev.shifts.iter().enumerate() {
            for l in 1..=3 {
                assert!((inc[s][l - 1] - m.increment(l as u32, h, &ph).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn branching_examples() {
        assert_eq!(branching_scale(0.0, 0.25).scale, 2.0);
        assert_eq!(branching_scale(0.0, 1.0).scale, 0.0);
        assert!((branching_scale(0.1, 0.1 + 2f64.powf(-3.5)).scale - 3.5).abs() < 1e-12);
        assert!(branching_scale(0.4, 0.4).identical);
        assert_eq!(increment_covariance_pred(1, 0.0, 2f64.powi(-6)), (LN_2 / 2.0, Regime::Coupled));
        assert_eq!(increment_covariance_pred(6, 0.0, 0.5), (0.0, Regime::Decoupled));
        assert_eq!(increment_covariance_pred(40, 0.3, 0.3).1, Regime::Coupled);
    }

    #[test]
    fn phase_moments() {
        let ph = PhaseVector::sample(200_000, 17);
        let n = ph.angles.len() as f64;
        let (mut c, mut s, mut c2, mut s2) = (0.0, 0.0, 0.0, 0.0);
        for a in &ph.angles {
            assert!((0.0..TAU).contains(a));
            c += a.cos();
            s += a.sin();
            c2 += (2.0 * a).cos();
            s2 += (2.0 * a).sin();
        }
        // Each of Re/Im U_p and Re/Im U_p^2 has variance 1/2.
        let tol = 4.0 * (0.5 / n).sqrt();
        for v in [c, s, c2, s2] {
            assert!((v / n).abs() < tol);
        }
    }
}

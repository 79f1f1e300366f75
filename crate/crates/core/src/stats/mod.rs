//! Extreme-value statistics over sampled fields.
//!
//! Comparisons against a level are strict (`>`) throughout; a value equal to the level is
//! not an exceedance. Partition functions go through a max-shifted log-sum-exp.

mod ballot;
mod blocks;
mod exceed;
mod ks;
mod regression;
mod report;

pub use ballot::{ballot_exact_one_step, ballot_mc, BallotParams};
pub use blocks::{barrier_count, kistler_count, BarrierTracker};
pub use exceed::{
    entropy_estimate, exceedance_count, free_energy, gibbs_weights, log_partition,
    log_partition_density, EntropyEstimate, ExceedanceReport, LogSumExp,
};
pub use ks::{ks_distance, ks_two_sample, max_distribution, MaxDistribution, MIN_MAX_REPLICAS};
pub use regression::{linear_fit, subleading_fit, LinearFit};
pub use report::{write_csv, write_jsonl, ExperimentReport, Replicated, CSV_HEADER};

use crate::Real;

/// A field given as per-site increments over scales `1..=scales()`.
pub trait Multiscale<T: Real> {
    fn sites(&self) -> usize;
    fn scales(&self) -> u32;
    /// `Y_v(l)` for `1 <= l <= scales()`.
    fn increment(&self, site: usize, l: u32) -> T;

    /// `X_v(l)`, summed left to right from scale 1.
    fn prefix(&self, site: usize, l: u32) -> T {
        let mut s = T::zero();
        for k in 1..=l {
            s = s + self.increment(site, k);
        }
        s
    }
}

/// Dense sites-by-scales increment matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct IncrementMatrix<T> {
    pub sites: usize,
    pub scales: u32,
    pub data: Vec<T>,
}

impl<T: Real> IncrementMatrix<T> {
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let scales = rows.first().map_or(0, |r| r.len()) as u32;
        assert!(rows.iter().all(|r| r.len() == scales as usize), "ragged increment rows");
        Self {
            sites: rows.len(),
            scales,
            data: rows.concat(),
        }
    }
}

impl<T: Real> Multiscale<T> for IncrementMatrix<T> {
    fn sites(&self) -> usize {
        self.sites
    }

    fn scales(&self) -> u32 {
        self.scales
    }

    fn increment(&self, site: usize, l: u32) -> T {
        self.data[site * self.scales as usize + (l - 1) as usize]
    }
}

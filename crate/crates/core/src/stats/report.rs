use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::num::{mean_se, median};

/// One estimated statistic with its theoretical target and provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub statistic: String,
    /// Sweep coordinate (n, E, beta, scale, ...) when the statistic is one point of a curve.
    pub x: Option<f64>,
    pub estimate: f64,
    pub se: f64,
    pub median: Option<f64>,
    pub target: Option<f64>,
    /// Theory citation key from `theory::CITATION_KEYS`.
    pub citation: String,
    pub replicas: u64,
    pub seed: u64,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub pass: Option<bool>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, statistic: &str, citation: &str, seed: u64) -> Self {
        Self {
            experiment: experiment.into(),
            statistic: statistic.into(),
            x: None,
            estimate: f64::NAN,
            se: 0.0,
            median: None,
            target: None,
            citation: citation.into(),
            replicas: 1,
            seed,
            lo: None,
            hi: None,
            pass: None,
        }
    }

    pub fn at(mut self, x: f64) -> Self {
        self.x = Some(x);
        self
    }

    pub fn value(mut self, estimate: f64, se: f64) -> Self {
        self.estimate = estimate;
        self.se = se;
        self
    }

    pub fn sample(mut self, s: &Replicated) -> Self {
        self.estimate = s.mean;
        self.se = s.se;
        self.median = Some(s.median);
        self.replicas = s.replicas;
        self
    }

    pub fn replicas(mut self, r: u64) -> Self {
        self.replicas = r;
        self
    }

    pub fn target(mut self, t: f64) -> Self {
        self.target = Some(t);
        self
    }

    /// Sets the acceptance band `[lo, hi]` and records whether the estimate lies in it.
    pub fn band(mut self, lo: f64, hi: f64) -> Self {
        self.lo = Some(lo);
        self.hi = Some(hi);
        self.pass = Some(self.estimate >= lo && self.estimate <= hi);
        self
    }

    /// One-sided band `[lo, inf)`.
    pub fn at_least(mut self, lo: f64) -> Self {
        self.lo = Some(lo);
        self.pass = Some(self.estimate >= lo);
        self
    }

    /// One-sided band `(-inf, hi]`.
    pub fn at_most(mut self, hi: f64) -> Self {
        self.hi = Some(hi);
        self.pass = Some(self.estimate <= hi);
        self
    }
}

/// Mean, standard error and median of per-replica values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Replicated {
    pub mean: f64,
    pub se: f64,
    pub median: f64,
    pub replicas: u64,
}

impl Replicated {
    pub fn of(xs: &[f64]) -> Self {
        let (mean, se) = mean_se(xs);
        Self {
            mean,
            se,
            median: median(xs),
            replicas: xs.len() as u64,
        }
    }
}

pub fn write_jsonl<W: Write>(reports: &[ExperimentReport], mut w: W) -> Result<()> {
    for r in reports {
        serde_json::to_writer(&mut w, r).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub const CSV_HEADER: &str =
    "experiment,statistic,x,estimate,se,median,target,lo,hi,pass,replicas,seed,citation";

pub fn write_csv<W: Write>(reports: &[ExperimentReport], mut w: W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.experiment,
            r.statistic,
            opt(r.x),
            r.estimate,
            r.se,
            opt(r.median),
            opt(r.target),
            opt(r.lo),
            opt(r.hi),
            r.pass.map(|p| p.to_string()).unwrap_or_default(),
            r.replicas,
            r.seed,
            r.citation
        )?;
    }
    Ok(())
}

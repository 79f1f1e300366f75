//! Named, reproducible experiments: each binds a sampler, a statistic and its closed-form
//! target, and emits [`ExperimentReport`]s plus plot-ready rows.
//!
//! Seeding: experiment-level sub-streams come from [`derive_seed`] of the master seed with a
//! small tag (usually the size parameter), and replica `r` of a sub-stream uses
//! [`replica_seed`]`(sub, r)`. Replica results are collected in index order before any
//! reduction, so outputs do not depend on the thread count.

mod config;
mod cue;
mod field;
mod gff;
mod walk;
mod zeta;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use config::ExperimentConfig;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, replica_seed};
use crate::stats::{write_csv, write_jsonl, ExperimentReport};

pub const DEFAULT_SEED: u64 = 1;

/// One plot point; `series` separates curves that share an output file.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotRow {
    pub series: String,
    pub x: f64,
    pub estimate: f64,
    pub se: f64,
    pub theory: Option<f64>,
}

pub const PLOT_HEADER: &str = "series,x,estimate,se,theory";

/// Everything an experiment produces.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub reports: Vec<ExperimentReport>,
    pub plot: Vec<PlotRow>,
}

impl Outcome {
    /// `false` if any report carries a failed band.
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.pass != Some(false))
    }

    pub fn report(&self, statistic: &str, x: Option<f64>) -> Option<&ExperimentReport> {
        self.reports
            .iter()
            .find(|r| r.statistic == statistic && (x.is_none() || r.x == x))
    }

    fn push(&mut self, r: ExperimentReport) {
        self.reports.push(r);
    }

    fn point(&mut self, series: &str, x: f64, estimate: f64, se: f64, theory: Option<f64>) {
        self.plot.push(PlotRow {
            series: series.into(),
            x,
            estimate,
            se,
            theory,
        });
    }
}

/// Registry entry. `anchor` names the statement the experiment checks.
pub struct Experiment {
    pub name: &'static str,
    pub anchor: &'static str,
    pub citation: &'static str,
    /// Accepted `key = value` parameters beyond `n`, `replicas`, `seed`, `threads`, `out`.
    pub params: &'static [&'static str],
    run: fn(&Ctx) -> Result<Outcome>,
}

impl std::fmt::Debug for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Experiment")
            .field("name", &self.name)
            .field("anchor", &self.anchor)
            .field("citation", &self.citation)
            .finish()
    }
}

static REGISTRY: &[Experiment] = &[
    Experiment {
        name: "iid-gumbel",
        anchor: "Gumbel limit of the maximum of 2^n IID Gaussians",
        citation: "iid-gumbel-limit",
        params: &["sigma2", "fig_n", "fig_replicas"],
        run: field::iid_gumbel,
    },
    Experiment {
        name: "brw-leading",
        anchor: "BRW maximum at c n - (3/2)(sigma2/c) log n",
        citation: "logcor-leading-order",
        params: &["sigma2", "n_list"],
        run: field::brw_leading,
    },
    Experiment {
        name: "brw-subleading",
        anchor: "log n correction: 1/2 for IID against 3/2 for the BRW",
        citation: "logcor-subleading-order",
        params: &["sigma2", "n_list"],
        run: field::brw_subleading,
    },
    Experiment {
        name: "brw-entropy",
        anchor: "entropy of high points log 2 - E^2/(2 sigma2)",
        citation: "high-points-entropy",
        params: &["sigma2", "e"],
        run: field::brw_entropy,
    },
    Experiment {
        name: "brw-free-energy",
        anchor: "free energy limit and freezing above beta_c",
        citation: "free-energy-freezing",
        params: &["sigma2", "beta"],
        run: field::brw_free_energy,
    },
    Experiment {
        name: "brw-kistler",
        anchor: "multiscale modified exceedance count is positive",
        citation: "multiscale-second-moment",
        params: &["sigma2", "k", "e", "eps"],
        run: field::brw_kistler,
    },
    Experiment {
        name: "brw-barrier",
        anchor: "exceedances of m_n under a linear barrier have O(1) mean",
        citation: "barrier-first-moment",
        params: &["sigma2", "b", "level"],
        run: field::brw_barrier,
    },
    Experiment {
        name: "gff-green",
        anchor: "GFF covariance is the Green function, log-correlated in the bulk",
        citation: "gff-green-function",
        params: &["side", "small_side"],
        run: gff::gff_green,
    },
    Experiment {
        name: "gff-covariance",
        anchor: "spectral GFF sampler reproduces the Green function",
        citation: "gff-green-function",
        params: &["side"],
        run: gff::gff_covariance,
    },
    Experiment {
        name: "gff-increments",
        anchor: "GFF multiscale increments: variance log 2/pi and the dichotomy of scales",
        citation: "gff-multiscale-increments",
        params: &["side"],
        run: gff::gff_increments,
    },
    Experiment {
        name: "zeta-covariance",
        anchor: "prime-block increments couple below and decouple above h ∧ h'",
        citation: "zeta-increment-covariance",
        params: &[],
        run: zeta::zeta_covariance,
    },
    Experiment {
        name: "zeta-variance",
        anchor: "prime-block increment variance log 2 / 2",
        citation: "zeta-increment-variance",
        params: &[],
        run: zeta::zeta_variance,
    },
    Experiment {
        name: "cue-moments",
        anchor: "E[Tr U^j conj(Tr U^k)] = delta_jk min(k, N)",
        citation: "cue-trace-moments",
        params: &["k"],
        run: cue::cue_moments,
    },
    Experiment {
        name: "cue-variance",
        anchor: "Var log|P(theta)| ~ (1/2) log N",
        citation: "cue-log-variance",
        params: &["theta"],
        run: cue::cue_variance,
    },
    Experiment {
        name: "cue-max",
        anchor: "max of log|P| on the circle ~ log N - (3/4) log log N",
        citation: "cue-maximum",
        params: &["n_list", "oversample"],
        run: cue::cue_max,
    },
    Experiment {
        name: "cue-dichotomy",
        anchor: "CUE trace increments couple below and decouple above the branching scale",
        citation: "cue-increment-dichotomy",
        params: &[],
        run: cue::cue_dichotomy,
    },
    Experiment {
        name: "ballot-scaling",
        anchor: "ballot probability of a Gaussian walk decays like n^{-3/2}",
        citation: "ballot-theorem",
        params: &["sigma2", "barrier", "b", "delta", "n_list"],
        run: walk::ballot_scaling,
    },
];

pub fn registry() -> &'static [Experiment] {
    REGISTRY
}

pub fn find(name: &str) -> Result<&'static Experiment> {
    REGISTRY
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownExperiment {
            name: name.into(),
            known: REGISTRY.iter().map(|e| e.name).collect::<Vec<_>>().join(", "),
        })
}

/// Validated view of a config for one experiment.
pub(crate) struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    exp: &'static Experiment,
}

impl Ctx<'_> {
    pub fn seed(&self) -> u64 {
        self.cfg.seed.unwrap_or(DEFAULT_SEED)
    }

    /// Sub-stream master for one part of the experiment.
    pub fn sub_seed(&self, tag: u64) -> u64 {
        derive_seed(self.seed(), tag)
    }

    pub fn replicas(&self, default: u64) -> u64 {
        self.cfg.replicas.unwrap_or(default)
    }

    pub fn n(&self, default: u32) -> u32 {
        self.cfg.n.unwrap_or(default)
    }

    /// `--n` pins a single size; otherwise `n_list` or the default sweep.
    pub fn n_list(&self, default: &[u32]) -> Result<Vec<u32>> {
        if let Some(n) = self.cfg.n {
            return Ok(vec![n]);
        }
        match self.raw("n_list") {
            Some(v) => parse_list(v, "n_list"),
            None => Ok(default.to_vec()),
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.cfg.params.get(key).map(String::as_str)
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.raw(key) {
            Some(v) => parse_one(v, key),
            None => Ok(default),
        }
    }

    pub fn u32(&self, key: &str, default: u32) -> Result<u32> {
        match self.raw(key) {
            Some(v) => parse_one(v, key),
            None => Ok(default),
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.raw(key) {
            Some(v) => parse_one(v, key),
            None => Ok(default),
        }
    }

    pub fn f64_list(&self, key: &str, default: Vec<f64>) -> Result<Vec<f64>> {
        match self.raw(key) {
            Some(v) => parse_list(v, key),
            None => Ok(default),
        }
    }

    pub fn usize_list(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        match self.raw(key) {
            Some(v) => parse_list(v, key),
            None => Ok(default.to_vec()),
        }
    }

    /// `--n` pins a single size; otherwise `n_list` or the default sweep.
    pub fn size_list(&self, default: &[usize]) -> Result<Vec<usize>> {
        Ok(match self.cfg.n {
            Some(n) => vec![n as usize],
            None => self.usize_list("n_list", default)?,
        })
    }

    pub fn report(&self, statistic: &str) -> ExperimentReport {
        ExperimentReport::new(self.exp.name, statistic, self.exp.citation, self.seed())
    }
}

fn parse_one<T: std::str::FromStr>(v: &str, key: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse `{v}` for `{key}`")))
}

fn parse_list<T: std::str::FromStr>(v: &str, key: &str) -> Result<Vec<T>> {
    let items: Vec<T> = v
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_one(s, key))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::Config(format!("`{key}` is an empty list")));
    }
    Ok(items)
}

/// Runs one experiment. All validation happens before any sampling starts.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let exp = find(&cfg.experiment)?;
    if cfg.replicas == Some(0) {
        return Err(Error::Config("replicas must be at least 1".into()));
    }
    if cfg.threads == Some(0) {
        return Err(Error::Config("threads must be at least 1".into()));
    }
    if let Some(key) = cfg.params.keys().find(|k| !exp.params.contains(&k.as_str())) {
        return Err(Error::Config(format!(
            "`{key}` is not a parameter of {}; accepted: n, replicas, seed, threads, out{}",
            exp.name,
            exp.params.iter().map(|p| format!(", {p}")).collect::<String>()
        )));
    }
    let ctx = Ctx { cfg, exp };
    match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| (exp.run)(&ctx)),
        None => (exp.run)(&ctx),
    }
}

/// File names written by [`write_outputs`] for an experiment.
pub fn output_paths(dir: &Path, name: &str) -> [PathBuf; 3] {
    [
        dir.join(format!("{name}.jsonl")),
        dir.join(format!("{name}_summary.csv")),
        dir.join(format!("{name}_plot.csv")),
    ]
}

/// Writes the JSON-lines reports, the summary CSV and the plot CSV.
pub fn write_outputs(dir: &Path, name: &str, outcome: &Outcome) -> Result<[PathBuf; 3]> {
    fs::create_dir_all(dir)?;
    let paths = output_paths(dir, name);
    write_jsonl(&outcome.reports, BufWriter::new(fs::File::create(&paths[0])?))?;
    write_csv(&outcome.reports, BufWriter::new(fs::File::create(&paths[1])?))?;
    let mut w = BufWriter::new(fs::File::create(&paths[2])?);
    writeln!(w, "{PLOT_HEADER}")?;
    for p in &outcome.plot {
        let theory = p.theory.map(|t| t.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{},{},{theory}", p.series, p.x, p.estimate, p.se)?;
    }
    w.flush()?;
    Ok(paths)
}

/// `f(replica_seed(seed, r))` for `r = 0..replicas`, in replica order.
pub(crate) fn replicate<R, F>(seed: u64, replicas: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    (0..replicas)
        .into_par_iter()
        .map(|r| f(replica_seed(seed, r)))
        .collect()
}

/// Column `j` of per-replica rows.
pub(crate) fn column<T: Copy>(rows: &[Vec<T>], j: usize) -> Vec<T> {
    rows.iter().map(|r| r[j]).collect()
}

/// `E[xy]` with its standard error, for centered variables with known zero mean.
pub(crate) fn product_moment(x: &[f64], y: &[f64]) -> (f64, f64) {
    let p: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();
    crate::num::mean_se(&p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::CITATION_KEYS;

    #[test]
    fn registry_is_fixed_and_cited() {
        assert_eq!(registry().len(), 17);
        for e in registry() {
            assert!(CITATION_KEYS.contains(&e.citation), "{}", e.name);
            assert!(!e.anchor.is_empty());
        }
        let mut names: Vec<_> = registry().iter().map(|e| e.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 17);
    }

    #[test]
    fn unknown_name_lists_the_registry() {
        let err = find("brw-maximum").unwrap_err().to_string();
        assert!(err.contains("brw-maximum") && err.contains("cue-dichotomy"));
    }

    #[test]
    fn validation_precedes_sampling() {
        let mut cfg = ExperimentConfig::new("brw-leading");
        cfg.replicas = Some(0);
        assert!(matches!(run(&cfg), Err(Error::Config(_))));
        let mut cfg = ExperimentConfig::new("brw-leading");
        cfg.set("colour", "blue").unwrap();
        assert!(matches!(run(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn replica_order_is_fixed() {
        let a = replicate(5, 100, |s| s);
        let b: Vec<u64> = (0..100).map(|r| replica_seed(5, r)).collect();
        assert_eq!(a, b);
    }
}

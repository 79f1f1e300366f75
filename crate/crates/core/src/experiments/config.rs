use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Flat experiment configuration. Unset fields fall back to the experiment's defaults,
/// which are sized for its acceptance check.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub n: Option<u32>,
    pub replicas: Option<u64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    /// Model parameters, validated against the experiment's accepted keys.
    pub params: BTreeMap<String, String>,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse `{value}` for `{key}`")))
}

impl ExperimentConfig {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.into(),
            ..Self::default()
        }
    }

    /// Sets one key; later calls override earlier ones.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "experiment" => self.experiment = value.into(),
            "n" => self.n = Some(parse(key, value)?),
            "replicas" => self.replicas = Some(parse(key, value)?),
            "seed" => self.seed = Some(parse(key, value)?),
            "threads" => self.threads = Some(parse(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "" => return Err(Error::Config("empty key".into())),
            other => {
                self.params.insert(other.into(), value.into());
            }
        }
        Ok(())
    }

    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Round-trips through [`ExperimentConfig::parse`].
    pub fn to_text(&self) -> String {
        let mut s = format!("experiment = {}\n", self.experiment);
        if let Some(n) = self.n {
            s.push_str(&format!("n = {n}\n"));
        }
        if let Some(r) = self.replicas {
            s.push_str(&format!("replicas = {r}\n"));
        }
        if let Some(x) = self.seed {
            s.push_str(&format!("seed = {x}\n"));
        }
        if let Some(t) = self.threads {
            s.push_str(&format!("threads = {t}\n"));
        }
        if let Some(o) = &self.out {
            s.push_str(&format!("out = {}\n", o.display()));
        }
        for (k, v) in &self.params {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }
}

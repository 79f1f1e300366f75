use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use logcor::experiments::{self, ExperimentConfig};

/// Extreme values of log-correlated fields: run a named experiment or list the registry.
#[derive(Parser, Debug)]
#[command(name = "logcor", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one experiment and write its reports.
    Run(RunArgs),
    /// List the experiment registry.
    List,
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// Experiment name; may instead come from the config file.
    experiment: Option<String>,
    /// Flat `key = value` config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    replicas: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "LOGCOR_THREADS")]
    threads: Option<usize>,
    /// Output directory (default `logcor-out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Model parameter override, repeatable: `--set sigma2=0.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Exit with status 2 if any acceptance band fails.
    #[arg(long)]
    check: bool,
}

fn build_config(args: &RunArgs) -> Result<ExperimentConfig, String> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::from_file(p).map_err(|e| format!("{}: {e}", p.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(e) = &args.experiment {
        cfg.experiment = e.clone();
    }
    if cfg.experiment.is_empty() {
        return Err("no experiment given; see `logcor list`".into());
    }
    cfg.n = args.n.or(cfg.n);
    cfg.replicas = args.replicas.or(cfg.replicas);
    cfg.seed = args.seed.or(cfg.seed);
    cfg.threads = args.threads.or(cfg.threads);
    cfg.out = args.out.clone().or(cfg.out);
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| format!("--set expects KEY=VALUE, got `{kv}`"))?;
        cfg.set(k, v).map_err(|e| e.to_string())?;
    }
    Ok(cfg)
}

fn run(args: &RunArgs) -> ExitCode {
    let cfg = match build_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let outcome = match experiments::run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("logcor-out"));
    let paths = match experiments::write_outputs(&dir, &cfg.experiment, &outcome) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    for r in &outcome.reports {
        let x = r.x.map(|x| format!("[{x}]")).unwrap_or_default();
        let target = r.target.map(|t| format!("  target {t:.6}")).unwrap_or_default();
        let band = match (r.lo, r.hi, r.pass) {
            (lo, hi, Some(p)) => format!(
                "  band [{}, {}] {}",
                lo.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-inf".into()),
                hi.map(|v| format!("{v:.6}")).unwrap_or_else(|| "inf".into()),
                if p { "PASS" } else { "FAIL" }
            ),
            _ => String::new(),
        };
        println!("{}{x}  {:.6} ± {:.6}{target}{band}", r.statistic, r.estimate, r.se);
    }
    for p in &paths {
        println!("wrote {}", p.display());
    }
    if args.check && !outcome.passed() {
        eprintln!("check failed: at least one acceptance band missed");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::List => {
            for e in experiments::registry() {
                println!("{:<16} {:<26} {}", e.name, e.citation, e.anchor);
            }
            ExitCode::SUCCESS
        }
        Command::Run(args) => run(&args),
    }
}

//! End-to-end runs of the `logcor` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn logcor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logcor"))
        .args(args)
        .env_remove("LOGCOR_THREADS")
        .output()
        .expect("binary runs")
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = match fs::read_dir(dir) {
        Ok(rd) => rd.map(|e| e.unwrap().file_name().into_string().unwrap()).collect(),
        Err(_) => Vec::new(),
    };
    v.sort();
    v
}

#[test]
fn list_shows_the_registry() {
    let out = logcor(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(
        names,
        [
            "iid-gumbel", "brw-leading", "brw-subleading", "brw-entropy", "brw-free-energy",
            "brw-kistler", "brw-barrier", "gff-green", "gff-covariance", "gff-increments",
            "zeta-covariance", "zeta-variance", "cue-moments", "cue-variance", "cue-max",
            "cue-dichotomy", "ballot-scaling",
        ]
    );
    assert!(text.lines().all(|l| l.split_whitespace().count() >= 3), "every entry names an anchor");
}

#[test]
fn zero_replicas_is_a_config_error_without_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = logcor(&["run", "ballot-scaling", "--replicas", "0", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(files(&out_dir).is_empty());
}

#[test]
fn unknown_experiment_names_the_registry() {
    let dir = tempfile::tempdir().unwrap();
    let out = logcor(&["run", "no-such-thing", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("iid-gumbel") && err.contains("ballot-scaling"), "{err}");
    assert!(files(dir.path()).is_empty());
}

#[test]
fn unknown_parameter_and_bad_threads_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = logcor(&["run", "ballot-scaling", "--set", "nonsense=1", "--out", d]);
    assert_eq!(out.status.code(), Some(1));
    let out = logcor(&["run", "ballot-scaling", "--threads", "0", "--out", d]);
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_logcor"))
        .args(["run", "ballot-scaling", "--replicas", "10", "--out", d])
        .env("LOGCOR_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = logcor(&["run", "--out", d]);
    assert_eq!(out.status.code(), Some(1));
    assert!(files(dir.path()).is_empty());
}

#[test]
fn check_flag_maps_band_failures_to_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    // At N = 1024 the exact variance sits outside the 10% band around (1/2) log N.
    let args = ["run", "cue-variance", "--replicas", "200", "--out", d];
    assert_eq!(logcor(&args).status.code(), Some(0));
    let mut checked = args.to_vec();
    checked.push("--check");
    assert_eq!(logcor(&checked).status.code(), Some(2));
    let out = logcor(&["run", "gff-green", "--check", "--out", d]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn outputs_have_the_documented_shape() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = logcor(&["run", "brw-entropy", "--n", "12", "--out", d]);
    assert!(out.status.success());
    assert_eq!(
        files(dir.path()),
        ["brw-entropy.jsonl", "brw-entropy_plot.csv", "brw-entropy_summary.csv"]
    );
    let plot = fs::read_to_string(dir.path().join("brw-entropy_plot.csv")).unwrap();
    assert_eq!(plot.lines().next().unwrap(), "series,x,estimate,se,theory");
    assert!(plot.lines().filter(|l| l.starts_with("entropy,")).count() >= 8);
    let jsonl = fs::read_to_string(dir.path().join("brw-entropy.jsonl")).unwrap();
    let summary = fs::read_to_string(dir.path().join("brw-entropy_summary.csv")).unwrap();
    assert_eq!(jsonl.lines().count() + 1, summary.lines().count());
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out_dir = dir.path().join("from-file");
    fs::write(
        &cfg,
        format!(
            "# ballot run\nexperiment = ballot-scaling\nreplicas = 5000\nseed = 9\nout = {}\nn_list = 8,16\n",
            out_dir.display()
        ),
    )
    .unwrap();
    let out = logcor(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a = fs::read_to_string(out_dir.join("ballot-scaling.jsonl")).unwrap();
    assert!(a.contains("\"seed\":9"));
    let out = logcor(&["run", "--config", cfg.to_str().unwrap(), "--seed", "10"]);
    assert!(out.status.success());
    let b = fs::read_to_string(out_dir.join("ballot-scaling.jsonl")).unwrap();
    assert!(b.contains("\"seed\":10"));
    assert_ne!(a, b);
}

#[test]
fn outputs_do_not_depend_on_the_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, sub: &str| {
        let d = dir.path().join(sub);
        let out = logcor(&[
            "run", "cue-dichotomy", "--n", "64", "--replicas", "300", "--threads", threads, "--out",
            d.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        files(&d)
            .into_iter()
            .map(|f| fs::read(d.join(f)).unwrap())
            .collect::<Vec<_>>()
    };
    let one = run("1", "t1");
    assert_eq!(one.len(), 3);
    assert_eq!(one, run("3", "t3"));
    assert_eq!(one, run("1", "again"));
}

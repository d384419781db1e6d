//! Command-line front end wiring the consensus-lab library into named,
//! reproducible experiments.
//!
//! Subcommands: build | spectrum | gap-study | simulate | control-cost |
//! graph-limit | mean-field | subordination | preset <figN>.
//! Every run writes its CSV/SVG artifacts plus a `manifest.json` with
//! content hashes into the output directory. Exit codes: 0 success,
//! 2 validation, 3 numerical, 4 io.

mod config;
mod experiments;
mod manifest;
mod plot;
mod pool;
mod presets;

use config::{Config, Experiment};
use experiments::{run_experiment, RunError};
use manifest::Manifest;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const USAGE: &str = "usage: consensus-lab <subcommand> [--config FILE] [--key value ...] [--out DIR]

subcommands:
  build          emit a network Laplacian as CSV plus a JSON descriptor
  spectrum       eigenvalue and gap tables for a family (n or n-list)
  gap-study      (n, min_gap, cluster_min_gap, inverse_sum) across n-list
  simulate       integrate a model (kind = linear | alignment | second-order
                 | second-order-alignment) and emit the trajectory
  control-cost   cost-of-control scaling study (t-policy = fixed:<T> |
                 scaled:<c> | fixed-time | scaled-time)
  graph-limit    sup-t L2 distances to the limit equation across n-list
  mean-field     sup-t Wasserstein-1 distances to a fine reference
  subordination  weak-form residual tables (add second-order = true for the
                 kinetic form)
  preset <fig>   canned figure reproductions: fig4 fig5 fig7 fig8 fig9
                 fig10 fig11
  validate       print precondition violations for a config and exit

common keys: family, n, n-list, r, alpha, c-alpha, scaled, t, dt, seed,
profile (sin | linear | const:<v> | seeded:<lo>:<hi>), influence
(const:<v> | rational:<beta> | indicator:<R>), control (single:<i> |
strip:<a>:<b> | side), m-quad, n-ref, degrees, steps, out, plot.
CONSENSUS_LAB_THREADS bounds the worker pool.";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                RunError::Validation(_) => 2,
                RunError::Numerical(_) => 3,
                RunError::Io(_) => 4,
            };
            ExitCode::from(code)
        }
    }
}

fn dispatch(args: &[String]) -> Result<(), RunError> {
    let Some(sub) = args.first() else {
        eprintln!("{USAGE}");
        return Err(RunError::Validation("missing subcommand".into()));
    };
    if sub == "--help" || sub == "-h" || sub == "help" {
        println!("{USAGE}");
        return Ok(());
    }

    // `preset <name>` takes the preset name as a positional argument
    if sub == "preset" {
        let name = args
            .get(1)
            .ok_or_else(|| RunError::Validation("preset requires a name".into()))?;
        let mut config = Config::new(Experiment::Spectrum);
        config.set("preset", name);
        apply_flags(&mut config, &args[2..])?;
        let out = out_dir(&config)?;
        let started = Instant::now();
        let artifacts = presets::run_preset(name)?;
        return write_run(&config, out, artifacts, started);
    }

    // `validate` re-parses the remaining flags under the experiment given
    // by `experiment = ...` (default spectrum) and prints violations
    if sub == "validate" {
        let mut config = Config::new(Experiment::Spectrum);
        apply_flags(&mut config, &args[1..])?;
        if let Some(exp) = config.get("experiment") {
            let exp = Experiment::from_subcommand(exp)
                .ok_or_else(|| RunError::Validation(format!("unknown experiment: {exp}")))?;
            config.experiment = exp;
        }
        let violations = config.validate();
        if violations.is_empty() {
            println!("ok");
            return Ok(());
        }
        for v in &violations {
            println!("violation: {v}");
        }
        return Err(RunError::Validation(format!(
            "{} violation(s)",
            violations.len()
        )));
    }

    let Some(experiment) = Experiment::from_subcommand(sub) else {
        eprintln!("{USAGE}");
        return Err(RunError::Validation(format!("unknown subcommand: {sub}")));
    };
    let mut config = Config::new(experiment);
    apply_flags(&mut config, &args[1..])?;
    let out = out_dir(&config)?;
    let started = Instant::now();
    let artifacts = run_experiment(&config)?;
    write_run(&config, out, artifacts, started)
}

fn apply_flags(config: &mut Config, flags: &[String]) -> Result<(), RunError> {
    let mut i = 0;
    while i < flags.len() {
        let flag = &flags[i];
        let key = flag
            .strip_prefix("--")
            .ok_or_else(|| RunError::Validation(format!("expected --key, got {flag}")))?;
        let value = flags
            .get(i + 1)
            .ok_or_else(|| RunError::Validation(format!("--{key} needs a value")))?;
        if key == "config" {
            let content = std::fs::read_to_string(value)?;
            config.merge_file(&content).map_err(RunError::Validation)?;
        } else {
            config.set(key, value);
        }
        i += 2;
    }
    Ok(())
}

fn out_dir(config: &Config) -> Result<PathBuf, RunError> {
    let dir = PathBuf::from(config.get("out").unwrap_or("out"));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_run(
    config: &Config,
    out: PathBuf,
    artifacts: Vec<experiments::Artifact>,
    started: Instant,
) -> Result<(), RunError> {
    let compute_seconds = started.elapsed().as_secs_f64();
    let mut echo: BTreeMap<String, String> = config.echo();
    echo.insert("out".into(), out.display().to_string());
    let mut manifest = Manifest::new(echo);
    manifest.record_stage("compute", compute_seconds);
    let write_started = Instant::now();
    for artifact in &artifacts {
        let path = out.join(&artifact.name);
        std::fs::write(&path, artifact.content.as_bytes())?;
        manifest.record_output(&artifact.name, artifact.content.as_bytes());
        println!("wrote {}", path.display());
    }
    manifest.record_stage("write", write_started.elapsed().as_secs_f64());
    std::fs::write(out.join("manifest.json"), manifest.to_json())?;
    println!("wrote {}", out.join("manifest.json").display());
    Ok(())
}

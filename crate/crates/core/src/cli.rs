//! `cotap` command-line front end.
//!
//! Exit codes: 0 success, 2 configuration, validation or IO error, 3 runtime
//! failure (controller error or numerical divergence). Errors are reported on
//! stderr as one JSON object.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::kinematics::{h1_upper, load_chain, MODEL_FORMAT};
use crate::sim::scenario::{
    run_scenario, ScenarioConfig, SimOutput, SweepKey, SweepRow, BUILTIN_H1_UPPER, SCENARIO_FORMAT,
};

/// Environment variable holding the log filter (e.g. `info`, `cotap=debug`).
pub const LOG_ENV: &str = "COTAP_LOG";

#[derive(Debug, Parser)]
#[command(
    name = "cotap",
    version,
    about = "Compliance-modulated upper-body control simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model or scenario file (or `builtin:h1-upper`).
    Validate { path: String },
    /// Run one scenario and write trace.csv and metrics.json.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        opts: RunOptions,
    },
    /// Run one scenario per value of a controller parameter.
    Sweep {
        scenario: PathBuf,
        /// `key=v1,v2,...` with key one of k_ee.x, k_ee.y, k_ee.z, alpha, k_null, damping_ratio.
        #[arg(long)]
        vary: Option<String>,
        #[command(flatten)]
        opts: RunOptions,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunOptions {
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Replace the scenario seed.
    #[arg(long)]
    pub seed_override: Option<u64>,
    /// Replace the physics step [s].
    #[arg(long)]
    pub dt: Option<f64>,
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Controller { .. } | Error::NumericalDivergence { .. } => 3,
        _ => 2,
    }
}

/// Machine-readable error report.
pub fn error_json(e: &Error) -> serde_json::Value {
    let mut v = json!({ "error": e.kind(), "message": e.to_string() });
    match e {
        Error::Validation { field, rule } => {
            v["field"] = json!(field);
            v["rule"] = json!(rule);
        }
        Error::Config { field, .. } => v["field"] = json!(field),
        Error::Parse { location, .. } => v["location"] = json!(location),
        Error::Io { path, .. } => v["path"] = json!(path),
        Error::Controller { step, t, source } => {
            v["step"] = json!(step);
            v["t"] = json!(t);
            v["cause"] = json!(source.kind());
        }
        Error::NumericalDivergence { step, t, .. } => {
            v["step"] = json!(step);
            v["t"] = json!(t);
        }
        _ => {}
    }
    v
}

fn load_config(path: &Path, opts: &RunOptions) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(path)?;
    if let Some(seed) = opts.seed_override {
        cfg.seed = seed;
    }
    if let Some(dt) = opts.dt {
        cfg.dt = dt;
    }
    Ok(cfg)
}

fn validate(path: &str, out: &mut dyn Write) -> Result<()> {
    if path == BUILTIN_H1_UPPER {
        let chain = h1_upper();
        return report(
            out,
            format!("ok: model `{}`, {} DOF", chain.name(), chain.dof()),
        );
    }
    let p = Path::new(path);
    let text = std::fs::read_to_string(p).map_err(|source| Error::Io {
        path: path.to_string(),
        source,
    })?;
    let table: toml::Table =
        toml::from_str(&text).map_err(|e| crate::kinematics::toml_error(&text, e))?;
    match table.get("format").and_then(|f| f.as_str()) {
        Some(MODEL_FORMAT) => {
            let chain = load_chain(&text)?;
            report(
                out,
                format!(
                    "ok: model `{}`, {} DOF, {} end effectors",
                    chain.name(),
                    chain.dof(),
                    chain.end_effectors().len()
                ),
            )
        }
        Some(SCENARIO_FORMAT) => {
            let cfg = ScenarioConfig::from_toml(&text, p.parent())?;
            let chain = cfg.validate()?;
            report(
                out,
                format!(
                    "ok: scenario `{}`, controller {:?}, {} DOF",
                    cfg.name.as_deref().unwrap_or("unnamed"),
                    cfg.controller.kind,
                    chain.dof()
                ),
            )
        }
        _ => Err(Error::validation(
            "format",
            format!("expected \"{MODEL_FORMAT}\" or \"{SCENARIO_FORMAT}\""),
        )),
    }
}

fn report(out: &mut dyn Write, line: String) -> Result<()> {
    writeln!(out, "{line}").map_err(|source| Error::Io {
        path: "<stdout>".into(),
        source,
    })
}

fn run(path: &Path, opts: &RunOptions, out: &mut dyn Write) -> Result<()> {
    let cfg = load_config(path, opts)?;
    let output = run_scenario(&cfg)?;
    let (trace, metrics) = output.write(&cfg, &opts.out)?;
    log::info!("wrote {} and {}", trace.display(), metrics.display());
    let text = serde_json::to_string_pretty(&output.metrics).expect("metrics serialize");
    report(out, text)
}

/// Parses `key=v1,v2,...`. An empty value list is allowed.
pub fn parse_vary(spec: &str) -> Result<(SweepKey, Vec<f64>)> {
    let (key, values) = spec
        .split_once('=')
        .ok_or_else(|| Error::config("vary", format!("expected key=v1,v2,... but got `{spec}`")))?;
    let key: SweepKey = key.trim().parse()?;
    let mut vals = Vec::new();
    for v in values.split(',').map(str::trim).filter(|v| !v.is_empty()) {
        let x: f64 = v
            .parse()
            .map_err(|_| Error::config("vary", format!("`{v}` is not a number")))?;
        vals.push(x);
    }
    vals.sort_by(f64::total_cmp);
    vals.dedup();
    Ok((key, vals))
}

struct Variant {
    dir: String,
    value: Option<f64>,
    config: ScenarioConfig,
}

fn sweep(path: &Path, vary: Option<&str>, opts: &RunOptions, out: &mut dyn Write) -> Result<()> {
    let base = load_config(path, opts)?;
    let (key, values) = match vary {
        Some(spec) => {
            let (k, v) = parse_vary(spec)?;
            (Some(k), v)
        }
        None => (None, Vec::new()),
    };
    let mut variants = Vec::new();
    if values.is_empty() {
        variants.push(Variant {
            dir: "baseline".into(),
            value: None,
            config: base.clone(),
        });
    }
    for (i, v) in values.iter().enumerate() {
        let k = key.expect("values imply a key");
        let mut cfg = base.clone();
        k.apply(&mut cfg, *v)?;
        cfg.validate()?;
        variants.push(Variant {
            dir: format!("variant_{i:02}_{}={v}", k.name()),
            value: Some(*v),
            config: cfg,
        });
    }

    let results: Vec<Result<SimOutput>> = variants
        .par_iter()
        .map(|v| {
            let output = run_scenario(&v.config)?;
            output.write(&v.config, &opts.out.join(&v.dir))?;
            Ok(output)
        })
        .collect();

    let mut rows = Vec::with_capacity(variants.len());
    for (v, r) in variants.iter().zip(results) {
        rows.push(SweepRow::new(key, v.value, &r?.metrics));
    }
    let mut csv = String::from(SweepRow::CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.csv_line());
        csv.push('\n');
    }
    let io = |p: PathBuf| {
        let path = p.display().to_string();
        move |source| Error::Io { path, source }
    };
    let csv_path = opts.out.join("sweep.csv");
    let json_path = opts.out.join("sweep.json");
    std::fs::write(&csv_path, &csv).map_err(io(csv_path.clone()))?;
    let doc = json!({
        "schema": "cotap-sweep/1",
        "key": key.map(SweepKey::name),
        "rows": rows,
    });
    std::fs::write(
        &json_path,
        serde_json::to_string_pretty(&doc).expect("sweep serialize") + "\n",
    )
    .map_err(io(json_path.clone()))?;
    report(out, csv.trim_end().to_string())
}

/// Executes a parsed command line, writing normal output to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Validate { path } => validate(path, out),
        Command::Run { scenario, opts } => run(scenario, opts, out),
        Command::Sweep {
            scenario,
            vary,
            opts,
        } => sweep(scenario, vary.as_deref(), opts, out),
    }
}

/// Full entry point: parses `args`, runs, reports errors; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ =
        env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    match execute(&cli, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vary_parsing() {
        let (k, v) = parse_vary("k_ee.z=800, 100,500").unwrap();
        assert_eq!(k, SweepKey::KeeZ);
        assert_eq!(v, vec![100.0, 500.0, 800.0]);
        let (_, empty) = parse_vary("alpha=").unwrap();
        assert!(empty.is_empty());
        assert!(parse_vary("stiffness=1").is_err());
        assert!(parse_vary("alpha=abc").is_err());
        assert!(parse_vary("alpha").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::validation("a", "b")), 2);
        assert_eq!(
            exit_code(&Error::NumericalDivergence {
                step: 1,
                t: 0.0,
                speed: 1e4
            }),
            3
        );
        let wrapped = Error::Controller {
            step: 3,
            t: 0.06,
            source: Box::new(Error::ZeroMatrix),
        };
        assert_eq!(exit_code(&wrapped), 3);
        assert_eq!(error_json(&wrapped)["step"], 3);
    }

    #[test]
    fn validates_builtin_model() {
        let mut buf = Vec::new();
        validate(BUILTIN_H1_UPPER, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains("8 DOF"));
    }
}

//! Argument parsing, configuration validation and output emission for the
//! `statewalk` binary.
//!
//! A run is described by one flat JSON document: the top-level keys
//! `scenario`, `seed`, `out` and `threads`, plus the scenario's own
//! configuration keys. Flags override the document; the effective document
//! is written back as `config.json` and echoed inside `summary.json`.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use statewalk::measure::Outcome;
use statewalk::scenarios::{ScenarioConfig, ScenarioReport, Table};
use thiserror::Error;

pub const DEFAULT_OUT: &str = "statewalk-out";

#[derive(Debug, Parser)]
#[command(name = "statewalk", version, about = "Random walks on projective state space, desk scale")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full-basis measurement frequencies against |c_j|².
    Born(RunArgs),
    /// Slits, free flight, plate detection and which-slit detection.
    DoubleSlit(RunArgs),
    /// Distance of a freely spreading packet from its start.
    BoxEscape(RunArgs),
    /// Position- vs momentum-product geometry and a position measurement.
    Epr(RunArgs),
    /// Product persistence of a constrained device.
    Cat(RunArgs),
    /// Constrained packet dynamics against Newton's equations.
    Newton(RunArgs),
    /// Hit statistics with and without a drift toward the manifold.
    Drift(RunArgs),
    /// Fast property checks of the core primitives.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON run document.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (0 = automatic).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub dt: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gue_scale: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub drift_magnitude: Option<f64>,
    /// Any configuration key, as KEY=VALUE with a JSON value (bare words
    /// are taken as strings). Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Runtime(#[from] statewalk::Error),
}

impl CliError {
    /// 1 for anything detected before the run starts, 2 afterwards.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Invalid { .. } | Self::Read { .. } => 1,
            Self::Write { .. } | Self::Runtime(_) => 2,
        }
    }

    /// The configuration key at fault, for validation errors.
    pub fn key(&self) -> Option<&str> {
        match self {
            Self::Invalid { key, .. } => Some(key),
            _ => None,
        }
    }
}

fn invalid(key: impl Into<String>, reason: impl ToString) -> CliError {
    CliError::Invalid {
        key: key.into(),
        reason: reason.to_string(),
    }
}

/// A fully validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub seed: u64,
    pub out: PathBuf,
    pub threads: usize,
}

impl RunConfig {
    /// The flat document that reproduces this run.
    pub fn document(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("scenario".into(), json!(self.scenario.name()));
        doc.insert("seed".into(), json!(self.seed));
        doc.insert("out".into(), json!(self.out.to_string_lossy()));
        doc.insert("threads".into(), json!(self.threads));
        if let Value::Object(cfg) = self.scenario.to_value() {
            doc.extend(cfg);
        }
        Value::Object(doc)
    }
}

pub fn read_document(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn take_u64(map: &mut Map<String, Value>, key: &str) -> Result<Option<u64>, CliError> {
    match map.remove(key) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(Some)
            .ok_or_else(|| invalid(key, format!("expected a non-negative integer, got {v}"))),
    }
}

fn deserialize<T: serde::de::DeserializeOwned>(v: Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner().to_string();
        // Unknown keys surface at the root; pull the name from the message.
        let key = if path == "." || path.is_empty() {
            inner
                .split('`')
                .nth(1)
                .map(str::to_string)
                .unwrap_or_else(|| "config".to_string())
        } else {
            path
        };
        invalid(key, inner)
    })
}

fn typed_config(name: &str, v: Value) -> Result<ScenarioConfig, CliError> {
    Ok(match name {
        "born" => ScenarioConfig::Born(deserialize(v)?),
        "double-slit" => ScenarioConfig::DoubleSlit(deserialize(v)?),
        "box-escape" => ScenarioConfig::BoxEscape(deserialize(v)?),
        "epr" => ScenarioConfig::Epr(deserialize(v)?),
        "cat" => ScenarioConfig::Cat(deserialize(v)?),
        "newton" => ScenarioConfig::Newton(deserialize(v)?),
        "drift" => ScenarioConfig::Drift(deserialize(v)?),
        other => return Err(invalid("scenario", format!("unknown scenario `{other}`"))),
    })
}

/// Builds the effective run for `scenario` from an optional JSON document
/// and the flag overrides, and validates it completely.
pub fn parse_and_validate(scenario: &str, args: &RunArgs, document: Option<&str>) -> Result<RunConfig, CliError> {
    let mut map = match document {
        None => Map::new(),
        Some(text) => match serde_json::from_str::<Value>(text) {
            Ok(Value::Object(m)) => m,
            Ok(_) => return Err(invalid("config", "the run document must be a JSON object")),
            Err(e) => return Err(invalid("config", e)),
        },
    };

    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| invalid("set", format!("expected KEY=VALUE, got `{kv}`")))?;
        let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        map.insert(k.trim().to_string(), value);
    }
    let overrides = [
        ("trials", args.trials.map(|v| json!(v))),
        ("epsilon", args.epsilon.map(|v| json!(v))),
        ("dt", args.dt.map(|v| json!(v))),
        ("gue_scale", args.gue_scale.map(|v| json!(v))),
        ("max_steps", args.max_steps.map(|v| json!(v))),
        ("drift_magnitude", args.drift_magnitude.map(|v| json!(v))),
    ];
    for (k, v) in overrides {
        if let Some(v) = v {
            map.insert(k.to_string(), v);
        }
    }

    match map.remove("scenario") {
        None => {}
        Some(Value::String(s)) if s == scenario => {}
        Some(other) => {
            return Err(invalid("scenario", format!("document is for {other}, command is `{scenario}`")));
        }
    }
    let seed = args.seed.or(take_u64(&mut map, "seed")?).unwrap_or(0);
    let threads = match (args.threads, take_u64(&mut map, "threads")?) {
        (Some(t), _) => t,
        (None, Some(t)) => usize::try_from(t).map_err(|_| invalid("threads", "too large"))?,
        (None, None) => 0,
    };
    let doc_out = match map.remove("out") {
        None => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(other) => return Err(invalid("out", format!("expected a path string, got {other}"))),
    };
    let out = args.out.clone().or(doc_out).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));

    let config = typed_config(scenario, Value::Object(map))?;
    config.validate().map_err(|e| match &e {
        statewalk::Error::Parameter { name, .. } => invalid(*name, e),
        statewalk::Error::Budget { .. } => invalid("joint_budget", e),
        _ => invalid("config", e),
    })?;
    Ok(RunConfig {
        scenario: config,
        seed,
        out,
        threads,
    })
}

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn trials_csv(report: &ScenarioReport) -> String {
    let mut s = String::from("trial_id,outcome,steps,final_distance\n");
    if let Some(t) = &report.trials {
        for (i, o) in t.outcomes.iter().enumerate() {
            let outcome = match o.result {
                Outcome::Hit(k) => k.to_string(),
                Outcome::Censored => "censored".to_string(),
            };
            let _ = writeln!(s, "{i},{outcome},{},{}", o.steps, format_number(o.final_distance));
        }
    }
    s
}

pub fn table_csv(table: &Table) -> String {
    let mut s = table.headers.join(",");
    s.push('\n');
    for row in &table.rows {
        s.push_str(&row.iter().map(|&x| format_number(x)).collect::<Vec<_>>().join(","));
        s.push('\n');
    }
    s
}

pub fn summary(run: &RunConfig, report: &ScenarioReport) -> Value {
    json!({
        "config": run.document(),
        "scenario": report.scenario,
        "seed": report.seed,
        "passed": report.passed(),
        "checks": report.checks,
        "stats": report.stats,
        "trial_stats": report.trials.as_ref().map(|t| &t.stats),
        "tables": report.tables.iter().map(|t| format!("{}.csv", t.name)).collect::<Vec<_>>(),
    })
}

/// Writes `config.json`, `summary.json`, `trials.csv` and one CSV per
/// table into `run.out`; returns the written paths.
pub fn emit(run: &RunConfig, report: &ScenarioReport) -> Result<Vec<PathBuf>, CliError> {
    let dir = &run.out;
    fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.clone(),
        source,
    })?;
    let pretty = |v: &Value| serde_json::to_string_pretty(v).expect("json values serialize") + "\n";
    let mut files = vec![
        (dir.join("config.json"), pretty(&run.document())),
        (dir.join("summary.json"), pretty(&summary(run, report))),
        (dir.join("trials.csv"), trials_csv(report)),
    ];
    for t in &report.tables {
        files.push((dir.join(format!("{}.csv", t.name)), table_csv(t)));
    }
    for (path, contents) in &files {
        write_file(path, contents)?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}

fn configure_threads(threads: usize) {
    if threads > 0 {
        // A second initialization (only possible in tests) keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

/// Validates, runs and emits one scenario.
pub fn run_scenario(scenario: &str, args: &RunArgs) -> Result<(RunConfig, ScenarioReport), CliError> {
    let document = args.config.as_deref().map(read_document).transpose()?;
    let run = parse_and_validate(scenario, args, document.as_deref())?;
    configure_threads(run.threads);
    let report = run.scenario.run(run.seed)?;
    emit(&run, &report)?;
    Ok((run, report))
}

/// Entry point behind `main`; returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let (name, args) = match &cli.command {
        Command::Selftest(a) => return selftest(a.seed),
        Command::Born(a) => ("born", a),
        Command::DoubleSlit(a) => ("double-slit", a),
        Command::BoxEscape(a) => ("box-escape", a),
        Command::Epr(a) => ("epr", a),
        Command::Cat(a) => ("cat", a),
        Command::Newton(a) => ("newton", a),
        Command::Drift(a) => ("drift", a),
    };
    match run_scenario(name, args) {
        Ok((run, report)) => {
            for c in &report.checks {
                println!(
                    "{} {}: {:.6e} ({:?} {} = {:e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.comparison,
                    c.tolerance_key,
                    c.tolerance
                );
            }
            println!("wrote {}", run.out.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn selftest(seed: u64) -> i32 {
    match statewalk::selftest::run_selftest(seed) {
        Ok(checks) => {
            for c in &checks {
                println!(
                    "{} {}: {:.3e} (tolerance {:e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.tolerance
                );
            }
            if checks.iter().all(|c| c.passed) {
                0
            } else {
                2
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use nmdiscord_core::analysis::{detect_events, EventReport};
use nmdiscord_core::export::{
    format_sig12, read_csv, write_csv, write_events_json, write_json, SweepEntry, SweepManifest,
};
use nmdiscord_core::run::run;
use nmdiscord_core::validation::{run_all, ValidationHooks};
use nmdiscord_core::{Environment, Error, EventTolerances, RunSpec};
use rayon::prelude::*;
use serde::Serialize;

use crate::{Format, RunArgs, SweepParam, ToleranceArgs};

const EXIT_VALIDATION_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(EXIT_USAGE),
            CliError::Numerical(_) => ExitCode::from(EXIT_NUMERICAL),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) | Error::Io(_) | Error::Parse(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}

type CliResult<T> = Result<T, CliError>;

/// Echo of the effective configuration, stored in JSON outputs and manifests.
#[derive(Debug, Clone, Serialize)]
struct RunConfig {
    env: Environment,
    alpha2: f64,
    lambda_over_gamma0: f64,
    t_max_gamma0: f64,
    dt_gamma0: f64,
    record_every: usize,
    output_path: PathBuf,
    format: Format,
    events: bool,
    event_tolerances: EventTolerances,
}

fn required(value: Option<f64>, flag: &str) -> CliResult<f64> {
    value.ok_or_else(|| CliError::Usage(format!("missing required argument {flag}")))
}

impl RunConfig {
    fn new(args: &RunArgs, alpha2: f64, lambda_over_gamma0: f64, output_path: &Path, format: Format) -> Self {
        Self {
            env: args.env.into(),
            alpha2,
            lambda_over_gamma0,
            t_max_gamma0: args.t_max,
            dt_gamma0: args.dt,
            record_every: args.record_every,
            output_path: output_path.to_path_buf(),
            format,
            events: args.events,
            event_tolerances: tolerances(&args.tolerances),
        }
    }

    fn spec(&self) -> RunSpec {
        RunSpec {
            env: self.env,
            alpha2: self.alpha2,
            lambda_over_gamma0: self.lambda_over_gamma0,
            t_max: self.t_max_gamma0,
            dt: self.dt_gamma0,
            record_every: self.record_every,
        }
    }
}

fn tolerances(t: &ToleranceArgs) -> EventTolerances {
    EventTolerances { discord_zero: t.discord_tol, concurrence: t.concurrence_tol, birth_threshold: t.birth_threshold }
}

fn resolve_format(explicit: Option<Format>, path: &Path) -> Format {
    explicit.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
        _ => Format::Csv,
    })
}

fn events_sidecar(path: &Path) -> PathBuf {
    path.with_extension("events.json")
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| io_error(path, e))
}

/// Runs one configuration and writes its outputs; returns the record count.
fn simulate_config(cfg: &RunConfig) -> CliResult<usize> {
    let out = run(&cfg.spec())?;
    let events: Option<EventReport> =
        if cfg.events { Some(detect_events(&out.records, &cfg.event_tolerances)?) } else { None };
    let path = &cfg.output_path;
    match cfg.format {
        Format::Csv => {
            let mut w = create(path)?;
            write_csv(&mut w, &out.records)?;
            w.flush().map_err(|e| io_error(path, e))?;
            if let Some(ev) = &events {
                let sidecar = events_sidecar(path);
                let mut w = create(&sidecar)?;
                write_events_json(&mut w, ev)?;
                w.flush().map_err(|e| io_error(&sidecar, e))?;
            }
        }
        Format::Json => {
            let mut w = create(path)?;
            write_json(&mut w, cfg, &out.records, events.as_ref())?;
            w.flush().map_err(|e| io_error(path, e))?;
        }
    }
    Ok(out.records.len())
}

pub fn simulate(args: &RunArgs, out: &Path) -> CliResult<ExitCode> {
    let alpha2 = required(args.alpha2, "--alpha2")?;
    let lambda = required(args.lambda_over_gamma0, "--lambda")?;
    let cfg = RunConfig::new(args, alpha2, lambda, out, resolve_format(args.format, out));
    cfg.spec().validate()?;
    let n = simulate_config(&cfg)?;
    eprintln!("wrote {n} records to {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn parse_values(list: &str) -> CliResult<Vec<f64>> {
    if list.trim().is_empty() {
        return Ok(Vec::new());
    }
    let values = list
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| CliError::Usage(format!("bad sweep value {s:?}: {e}"))))
        .collect::<CliResult<Vec<_>>>()?;
    let mut seen = HashSet::new();
    for v in &values {
        if !seen.insert(v.to_bits()) {
            return Err(CliError::Usage(format!("duplicate sweep value {v}")));
        }
    }
    Ok(values)
}

pub fn sweep(
    args: &RunArgs,
    param: SweepParam,
    values: &str,
    out_dir: &Path,
    jobs: Option<usize>,
) -> CliResult<ExitCode> {
    let values = parse_values(values)?;
    if jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let format = args.format.unwrap_or(Format::Csv);
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let name = match param {
        SweepParam::Alpha2 => "alpha2",
        SweepParam::Lambda => "lambda",
    };
    // The swept parameter may be omitted; the base config then echoes NaN.
    let (alpha2, lambda) = match param {
        SweepParam::Alpha2 => (args.alpha2.unwrap_or(f64::NAN), required(args.lambda_over_gamma0, "--lambda")?),
        SweepParam::Lambda => (required(args.alpha2, "--alpha2")?, args.lambda_over_gamma0.unwrap_or(f64::NAN)),
    };
    let configs = values
        .iter()
        .map(|&v| {
            let (a, l) = match param {
                SweepParam::Alpha2 => (v, lambda),
                SweepParam::Lambda => (alpha2, v),
            };
            let file = format!("{name}_{}.{ext}", format_sig12(v));
            let cfg = RunConfig::new(args, a, l, &out_dir.join(&file), format);
            cfg.spec().validate().map_err(|e| CliError::Usage(format!("{name} = {v}: {e}")))?;
            Ok((v, file, cfg))
        })
        .collect::<CliResult<Vec<_>>>()?;

    std::fs::create_dir_all(out_dir).map_err(|e| io_error(out_dir, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let results: Vec<CliResult<usize>> =
        pool.install(|| configs.par_iter().map(|(_, _, cfg)| simulate_config(cfg)).collect());
    for ((v, _, _), r) in configs.iter().zip(&results) {
        if let Err(e) = r {
            return Err(match e {
                CliError::Usage(m) => CliError::Usage(format!("{name} = {v}: {m}")),
                CliError::Numerical(m) => CliError::Numerical(format!("{name} = {v}: {m}")),
            });
        }
    }

    let base = RunConfig::new(args, alpha2, lambda, out_dir, format);
    let manifest = SweepManifest {
        param: name.into(),
        base: serde_json::to_value(&base).map_err(|e| CliError::Usage(e.to_string()))?,
        entries: configs.iter().map(|(v, file, _)| SweepEntry { value: *v, file: file.clone() }).collect(),
    };
    let path = out_dir.join("manifest.json");
    let mut w = create(&path)?;
    manifest.write(&mut w)?;
    w.flush().map_err(|e| io_error(&path, e))?;
    eprintln!("wrote {} runs and {}", configs.len(), path.display());
    Ok(ExitCode::SUCCESS)
}

pub fn validate(seed: u64, perturb_omega: f64, flip_d2_sign: bool) -> CliResult<ExitCode> {
    let hooks = ValidationHooks { omega_scale: perturb_omega, flip_d2_sign };
    let suites = run_all(seed, &hooks)?;
    let mut all = true;
    for s in &suites {
        println!("{} {}: {}", if s.passed { "PASS" } else { "FAIL" }, s.name, s.detail);
        for note in &s.notes {
            println!("    note: {note}");
        }
        all &= s.passed;
    }
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(EXIT_VALIDATION_FAILED) })
}

pub fn events(input: &Path, out: Option<&Path>, tol: &ToleranceArgs) -> CliResult<ExitCode> {
    let file = File::open(input).map_err(|e| io_error(input, e))?;
    let records = read_csv(file).map_err(|e| CliError::Usage(format!("{}: {e}", input.display())))?;
    let report = detect_events(&records, &tolerances(tol)).map_err(|e| CliError::Usage(e.to_string()))?;
    match out {
        Some(path) => {
            let mut w = create(path)?;
            write_events_json(&mut w, &report)?;
            w.flush().map_err(|e| io_error(path, e))?;
        }
        None => write_events_json(std::io::stdout().lock(), &report)?,
    }
    Ok(ExitCode::SUCCESS)
}

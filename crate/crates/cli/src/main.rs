//! `fraclap`: reproducible experiments with fractional Laplacians and
//! half-harmonic maps.
//!
//! Exit codes: 0 when every enabled check passes, 1 when a check fails, 2 on a
//! configuration or runtime error (reported as JSON on stderr).

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use commands::{AnchoredCheck, Geometry, Outcome};
use config::RunConfig;

const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "fraclap", version, about = "Fractional Laplacian and half-harmonic map experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration file with one section per command.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set flow.n_points=256`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Seed for randomized inputs (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Preset of the selected command (overrides the config file).
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Worker threads; FRACLAP_THREADS takes precedence, default is all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Omit wall-clock time so that reports are byte-identical across runs.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Debug, Clone, Subcommand)]
enum Command {
    /// Poisson kernel of the half-plane and quarter-inverse kernel transforms.
    Kernel,
    /// L², L^{2,1} and L^{2,∞} norms of a preset or a field file.
    Norms,
    /// Compensated bilinear operators against the coefficient-space oracle.
    Commutators,
    /// Pohozaev identity on the line, the circle or the plane.
    Pohozaev {
        #[arg(value_enum)]
        geometry: Geometry,
    },
    /// Stereographic transfer identity for the half-Laplacian.
    Stereo,
    /// Projected gradient flow to a half-harmonic map.
    Flow,
    /// Bubbling experiment on Möbius compositions of the identity.
    Bubble,
    /// Decay rates, normalization and neck norms of the non-quantization example.
    Counterexample {
        #[arg(value_enum, default_value = "sweep")]
        action: CounterexampleAction,
    },
    /// Runs the acceptance criteria.
    Selftest,
    /// Runs one named verification.
    Verify {
        #[arg(value_enum)]
        target: Target,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CounterexampleAction {
    Sweep,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Target {
    Kernel,
    Norms,
    Commutators,
    PohozaevLine,
    PohozaevCircle,
    PohozaevPlane,
    Stereo,
    Flow,
    Bubble,
    Counterexample,
}

impl Command {
    fn resolve(self) -> Command {
        let Command::Verify { target } = self else { return self };
        match target {
            Target::Kernel => Command::Kernel,
            Target::Norms => Command::Norms,
            Target::Commutators => Command::Commutators,
            Target::PohozaevLine => Command::Pohozaev { geometry: Geometry::Line },
            Target::PohozaevCircle => Command::Pohozaev { geometry: Geometry::Circle },
            Target::PohozaevPlane => Command::Pohozaev { geometry: Geometry::Plane },
            Target::Stereo => Command::Stereo,
            Target::Flow => Command::Flow,
            Target::Bubble => Command::Bubble,
            Target::Counterexample => Command::Counterexample { action: CounterexampleAction::Sweep },
        }
    }

    fn name(&self) -> String {
        match self {
            Command::Kernel => "kernel".into(),
            Command::Norms => "norms".into(),
            Command::Commutators => "commutators".into(),
            Command::Pohozaev { geometry } => format!("pohozaev-{}", geometry.to_possible_value().unwrap().get_name()),
            Command::Stereo => "stereo".into(),
            Command::Flow => "flow".into(),
            Command::Bubble => "bubble".into(),
            Command::Counterexample { .. } => "counterexample-sweep".into(),
            Command::Selftest => "selftest".into(),
            Command::Verify { .. } => unreachable!("resolved before use"),
        }
    }

    /// Config section whose `preset` key `--preset` sets.
    fn preset_key(&self) -> Option<&'static str> {
        match self {
            Command::Norms => Some("norms.preset"),
            Command::Pohozaev { .. } => Some("pohozaev.preset"),
            _ => None,
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    schema_version: u32,
    command: String,
    version: &'static str,
    config_hash: String,
    seed: u64,
    threads: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_clock_seconds: Option<f64>,
    passed: bool,
    checks: &'a [AnchoredCheck],
    data: &'a Value,
}

fn fail(kind: &str, message: impl Into<String>) -> ExitCode {
    let message = message.into();
    eprintln!("{}", json!({ "error": kind, "message": message, "schema_version": SCHEMA_VERSION }));
    ExitCode::from(2)
}

fn thread_count(flag: Option<usize>) -> Result<usize, String> {
    match std::env::var("FRACLAP_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or(format!("FRACLAP_THREADS must be a positive integer, got `{v}`")),
        Err(_) => match flag {
            Some(0) => Err("--threads must be positive".into()),
            Some(n) => Ok(n),
            None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        },
    }
}

fn run(command: &Command, cfg: &RunConfig) -> Result<Outcome, String> {
    match command {
        Command::Kernel => commands::kernel(cfg),
        Command::Norms => commands::norms(cfg),
        Command::Commutators => commands::commutators(cfg),
        Command::Pohozaev { geometry } => commands::pohozaev(cfg, *geometry),
        Command::Stereo => commands::stereo(cfg),
        Command::Flow => commands::flow(cfg),
        Command::Bubble => commands::bubble(cfg),
        Command::Counterexample { .. } => commands::counterexample(cfg),
        Command::Selftest => commands::selftest(cfg),
        Command::Verify { .. } => unreachable!("resolved before use"),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string()),
    };
    let command = cli.command.clone().resolve();

    let mut overrides = Vec::new();
    if let Some(seed) = cli.seed {
        overrides.push(format!("seed={seed}"));
    }
    if let Some(preset) = &cli.preset {
        match command.preset_key() {
            Some(key) => overrides.push(format!("{key}=\"{preset}\"")),
            None => return fail("config", format!("command `{}` has no presets", command.name())),
        }
    }
    overrides.extend(cli.overrides.iter().cloned());
    let cfg = match config::load(cli.config.as_deref(), &overrides) {
        Ok(c) => c,
        Err(e) => return fail("config", e),
    };
    if let Some(out) = &cli.output {
        if let Some(parent) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            if !parent.is_dir() {
                return fail("config", format!("output directory {} does not exist", parent.display()));
            }
        }
    }
    let threads = match thread_count(cli.threads) {
        Ok(n) => n,
        Err(e) => return fail("config", e),
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        return fail("runtime", e.to_string());
    }

    let start = Instant::now();
    let outcome = match run(&command, &cfg) {
        Ok(o) => o,
        Err(e) => return fail("runtime", e),
    };
    let passed = outcome.passed();
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: command.name(),
        version: fraclap_core::VERSION,
        config_hash: cfg.hash(),
        seed: cfg.seed,
        threads,
        wall_clock_seconds: (!cli.no_timing).then(|| start.elapsed().as_secs_f64()),
        passed,
        checks: &outcome.checks,
        data: &outcome.data,
    };
    let mut json = match serde_json::to_string_pretty(&report) {
        Ok(j) => j,
        Err(e) => return fail("runtime", e.to_string()),
    };
    json.push('\n');
    for (path, contents) in &outcome.files {
        if let Err(e) = write_file(path, contents) {
            return fail("runtime", e);
        }
    }
    match &cli.output {
        Some(path) => {
            if let Err(e) = write_file(path, &json) {
                return fail("runtime", e);
            }
        }
        None => print!("{json}"),
    }
    for c in outcome.checks.iter().filter(|c| c.check.gating && !c.check.passed) {
        log::warn!("[{}] {} = {:e} (want {})", c.anchor, c.check.name, c.check.value, c.check.bound);
    }
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

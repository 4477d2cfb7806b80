//! `dspin <subcommand> --config <file> [--out <dir>]`
//!
//! Exit codes: 0 ok, 1 I/O, 2 config or invalid input, 3 geometry,
//! 4 numerical failure or a tolerance check that did not hold.

mod config;
mod output;
mod runs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dspin::conventions::{convention_report, REPORT_GRID};
use dspin::{Error, ErrorClass};
use serde_json::{json, Value};

use config::{Config, ConfigError, CouplingSpec, OrientationSpec, RunKind};
use output::{sha256_hex, to_json, write_atomic};
use runs::RunError;

#[derive(Parser)]
#[command(name = "dspin", version, about = "Spin transport along curves on surfaces")]
struct Cli {
    #[arg(value_enum)]
    run: RunKind,
    /// JSON scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Io(String),
    Config(ConfigError),
    Engine(Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::Engine(e) => match e.class() {
                ErrorClass::Input => 2,
                ErrorClass::Geometry => 3,
                ErrorClass::Numerical => 4,
            },
        }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(c) => Failure::Config(c),
            RunError::Engine(e) => Failure::Engine(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            match &f {
                Failure::Io(m) => eprintln!("dspin: i/o error: {m}"),
                Failure::Config(c) => eprintln!("dspin: {c}"),
                Failure::Engine(e) => eprintln!("dspin: {e}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("DSPIN_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(ConfigError::new("DSPIN_THREADS", format!("expected a positive integer, got {raw:?}"))))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Io(e.to_string()))
}

fn conventions_ledger(cfg: &Config, branch: Option<&str>) -> Value {
    json!({
        "units": "hbar = 1, 2m = 1",
        "normal": match cfg.surface.orientation { OrientationSpec::Outward => "outward", OrientationSpec::Inward => "inward" },
        "frame": "B = t x N",
        "darboux": "dt/ds = kappa_g B + kappa_n N; dN/ds = -kappa_n t - tau_g B; dB/ds = -kappa_g t + tau_g N",
        "tau_g_branch": branch,
        "gauge_field": "beta = (tau_g, kappa_g, -kappa_n) in the (t, N, B) basis; b_lab = frame applied to beta",
        "spin_law": "dm/ds = m x b_lab",
        "path_ordering": "later arclength to the left; midpoint sampling",
        "potentials": "V_g = -(M^2 - K), V_sg = -(kappa_g^2 + 2K)/4",
        "extra_field_coupling": match cfg.field.coupling { CouplingSpec::Connection => "connection", CouplingSpec::Zeeman => "zeeman" },
    })
}

fn execute(cli: &Cli) -> Result<u8, Failure> {
    let cfg = Config::load(&cli.config).map_err(Failure::Config)?;
    if let Some(r) = cfg.run {
        if r != cli.run {
            return Err(Failure::Config(ConfigError::new(
                "run",
                format!("config declares `{}` but the subcommand is `{}`", r.as_str(), cli.run.as_str()),
            )));
        }
    }
    init_threads()?;
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));

    let result = runs::run(cli.run, &cfg)?;
    let report = convention_report(REPORT_GRID).map_err(Failure::Engine)?;

    let emitted = result.files.write_all(&out_dir).map_err(|e| Failure::Io(format!("{}: {e}", out_dir.display())))?;
    let canonical = cfg.to_canonical_json();
    let config_value: Value = serde_json::from_str(&canonical).expect("canonical config is JSON");
    let manifest = json!({
        "engine": { "name": "dspin", "version": env!("CARGO_PKG_VERSION") },
        "run": cli.run.as_str(),
        "config_sha256": sha256_hex(canonical.as_bytes()),
        "config": config_value,
        "conventions": conventions_ledger(&cfg, report.selected_branch()),
        "discrepancy_flags": runs::flags_json(&report),
        "summary": result.summary,
        "warnings": result.warnings,
        "tolerance_failures": result.failures,
        "outputs": emitted,
    });
    let path = out_dir.join("manifest.json");
    write_atomic(&path, to_json(&manifest).as_bytes()).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;

    for w in &result.warnings {
        eprintln!("dspin: warning: {w}");
    }
    for f in &result.failures {
        eprintln!("dspin: tolerance: {f}");
    }
    Ok(if result.failures.is_empty() { 0 } else { 4 })
}

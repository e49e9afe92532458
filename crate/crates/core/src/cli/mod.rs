//! Command line front end: `run`, `validate`, `verify` and `version`.
//!
//! Exit codes are 0 on success, 2 for configuration and I/O errors and 3
//! for numerical failures. A failed run still writes its diagnostic
//! outputs and a manifest.

pub mod config;
pub mod manifest;
pub mod scenarios;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

pub use config::{validate, DataKind, SValue, Scenario, ScenarioConfig};
pub use manifest::{verify_manifest, Manifest};

use crate::error::ZkError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "zkcyl",
    about = "Zakharov-Kuznetsov cylinder solver and estimate probes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run {
        config: PathBuf,
        /// Worker threads for sweep points.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output directory (overrides `out`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override a config key.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Check a config file without running it.
    Validate {
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Recompute the checksums of a run directory against its manifest.
    Verify { dir: PathBuf },
    /// Print the version.
    Version,
}

/// Exit code for an error escaping a scenario.
pub fn exit_code(e: &ZkError) -> i32 {
    match e {
        ZkError::NonFinite { .. } | ZkError::NotConverged(_) => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

/// Result of [`run`].
#[derive(Debug)]
pub struct RunStatus {
    pub exit_code: i32,
    pub message: Option<String>,
    pub manifest: Option<Manifest>,
}

/// Validates `cfg`, runs it into `out` and writes the manifest.
pub fn run(cfg: &ScenarioConfig, out: &Path, jobs: usize) -> RunStatus {
    let diags = validate(cfg);
    if !diags.is_empty() {
        return RunStatus {
            exit_code: EXIT_CONFIG,
            message: Some(diags.join("; ")),
            manifest: None,
        };
    }
    if let Err(e) = std::fs::create_dir_all(out) {
        return RunStatus {
            exit_code: EXIT_CONFIG,
            message: Some(format!("cannot create {}: {e}", out.display())),
            manifest: None,
        };
    }
    let start = Instant::now();
    let result = scenarios::run_scenario(cfg, out, jobs);
    let wall = start.elapsed().as_secs_f64();
    let (files, summary, code, message) = match result {
        Ok(o) => {
            let (code, msg) = match o.failure {
                None => (EXIT_OK, None),
                Some(e) => (exit_code(&e), Some(e.to_string())),
            };
            (o.files, o.summary, code, msg)
        }
        Err(e) => (
            Vec::new(),
            serde_json::Value::Null,
            exit_code(&e),
            Some(e.to_string()),
        ),
    };
    let mut entries = Vec::with_capacity(files.len());
    for f in &files {
        match manifest::file_entry(out, f) {
            Ok(entry) => entries.push(entry),
            Err(e) => {
                return RunStatus {
                    exit_code: EXIT_CONFIG,
                    message: Some(format!("cannot checksum {f}: {e}")),
                    manifest: None,
                }
            }
        }
    }
    let m = Manifest {
        tool: "zkcyl".into(),
        version: VERSION.into(),
        scenario: cfg.scenario.map(|s| s.to_string()).unwrap_or_default(),
        config: cfg.to_toml(),
        jobs,
        exit_code: code,
        message: message.clone(),
        wall_clock_seconds: wall,
        summary,
        files: entries,
    };
    if let Err(e) = manifest::write_manifest(out, &m) {
        return RunStatus {
            exit_code: EXIT_CONFIG,
            message: Some(format!("cannot write manifest: {e}")),
            manifest: None,
        };
    }
    RunStatus {
        exit_code: code,
        message,
        manifest: Some(m),
    }
}

fn load(config: &Path, set: &[String]) -> Result<ScenarioConfig, i32> {
    ScenarioConfig::load_with_overrides(config, set).map_err(|e| {
        eprintln!("error: {}: {e}", config.display());
        EXIT_CONFIG
    })
}

/// Parses `args` (including the program name) and executes the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Version => {
            println!("zkcyl {VERSION}");
            EXIT_OK
        }
        Command::Validate { config, set } => {
            let cfg = match load(&config, &set) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let diags = validate(&cfg);
            for d in &diags {
                println!("{d}");
            }
            if diags.is_empty() {
                println!("ok");
                EXIT_OK
            } else {
                EXIT_CONFIG
            }
        }
        Command::Verify { dir } => match verify_manifest(&dir) {
            Ok(problems) if problems.is_empty() => {
                println!("ok");
                EXIT_OK
            }
            Ok(problems) => {
                for p in problems {
                    println!("{p}");
                }
                EXIT_CONFIG
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_CONFIG
            }
        },
        Command::Run {
            config,
            jobs,
            out,
            set,
        } => {
            let cfg = match load(&config, &set) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let dir = out.unwrap_or_else(|| PathBuf::from(&cfg.out));
            let status = run(&cfg, &dir, jobs.max(1));
            if let Some(m) = &status.message {
                eprintln!("error: {m}");
            }
            if let Some(m) = &status.manifest {
                println!(
                    "{}: {} files in {} ({:.2} s)",
                    m.scenario,
                    m.files.len(),
                    dir.display(),
                    m.wall_clock_seconds
                );
            }
            status.exit_code
        }
    }
}

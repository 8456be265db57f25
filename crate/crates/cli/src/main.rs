//! `rank1`: emit CSV/JSON data for product densities, Haar sampling checks,
//! mixing experiments and Plancherel sums.

mod config;
mod emit;
mod run;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use config::{Command, ExperimentConfig, Flags, UsageError};

#[derive(Debug, Parser)]
#[command(name = "rank1", version, about = "Products of spherical classes in rank-one symmetric pairs")]
struct Cli {
    /// Worker threads; outputs do not depend on this.
    #[arg(long, global = true, env = "RANK1_THREADS")]
    threads: Option<usize>,
    /// Load settings from a config file or any earlier output; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write PREFIX.csv and/or PREFIX.json instead of printing the primary output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// (u, pdf) grid of the product density, plus the density record.
    Density(Flags),
    /// Radial coordinates of sampled products.
    Sample(Flags),
    /// KS of one sample set against both modes' densities.
    Compare(Flags),
    /// KS of Haar radial coordinates against the radial density.
    HaarCheck(Flags),
    /// Distance to Haar of repeated class products on SU(n).
    Mixing(Flags),
    /// Mixing lengths and Plancherel sums on SU(n).
    Plancherel(Flags),
    /// Product-density mass near the large-n limit points.
    LimitScan(Flags),
}

impl Sub {
    fn split(self) -> (Command, Flags) {
        match self {
            Sub::Density(f) => (Command::Density, f),
            Sub::Sample(f) => (Command::Sample, f),
            Sub::Compare(f) => (Command::Compare, f),
            Sub::HaarCheck(f) => (Command::HaarCheck, f),
            Sub::Mixing(f) => (Command::Mixing, f),
            Sub::Plancherel(f) => (Command::Plancherel, f),
            Sub::LimitScan(f) => (Command::LimitScan, f),
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error(transparent)]
    Usage(#[from] UsageError),
    #[error(transparent)]
    Core(#[from] rank1_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Core(e) if e.is_numerical() => "numerical",
            Failure::Core(_) => "usage",
            Failure::Io { .. } => "io",
        }
    }

    fn code(&self) -> u8 {
        match self.kind() {
            "usage" => 2,
            "numerical" => 3,
            _ => 1,
        }
    }
}

fn report(kind: &str, message: &str, code: u8) -> ExitCode {
    let body = json!({ "error": kind, "message": message, "exit_code": code });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |source| Failure::Io { path: path.to_path_buf(), source }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let base = match &cli.config {
        Some(p) => Some(config::load(&std::fs::read_to_string(p).map_err(io(p))?)?),
        None => None,
    };
    let (command, flags) = cli.command.split();
    let cfg = ExperimentConfig::resolve(command, base, flags)?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(UsageError("--threads must be at least 1".into()).into());
        }
        pool = pool.num_threads(k);
    }
    let pool = pool
        .build()
        .map_err(|e| rank1_core::Error::Internal(format!("thread pool: {e}")))?;
    let artifacts = pool.install(|| run::run(&cfg))?;

    match &cli.out {
        Some(prefix) => {
            for a in &artifacts {
                let mut path = prefix.clone().into_os_string();
                path.push(".");
                path.push(a.ext);
                let path = PathBuf::from(path);
                std::fs::write(&path, &a.body).map_err(io(&path))?;
            }
        }
        None => {
            let stdout = Path::new("<stdout>");
            std::io::stdout()
                .lock()
                .write_all(artifacts[0].body.as_bytes())
                .map_err(io(stdout))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report("usage", e.to_string().trim_end(), 2),
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(f.kind(), &f.to_string(), f.code()),
    }
}

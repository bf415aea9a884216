//! `radmps`: scan, refine and export Dirichlet eigenpairs of `-Δ + V`.

mod commands;
mod config;
mod error;

use std::alloc::{GlobalAlloc, Layout, System};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use commands::Outputs;
use config::Run;
use error::CliError;

struct PeakAlloc;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for PeakAlloc {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let ptr = unsafe { System.alloc(layout) };
        if !ptr.is_null() {
            let now = CURRENT.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(now, Ordering::Relaxed);
        }
        ptr
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) };
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let new = unsafe { System.realloc(ptr, layout, new_size) };
        if !new.is_null() {
            if new_size >= layout.size() {
                let now = CURRENT.fetch_add(new_size - layout.size(), Ordering::Relaxed) + new_size - layout.size();
                PEAK.fetch_max(now, Ordering::Relaxed);
            } else {
                CURRENT.fetch_sub(layout.size() - new_size, Ordering::Relaxed);
            }
        }
        new
    }
}

#[global_allocator]
static GLOBAL: PeakAlloc = PeakAlloc;

#[derive(Parser)]
#[command(name = "radmps", version, about = "Dirichlet eigenpairs of -Δ + V by radial particular solutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the seed in the configuration.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads for the parallel λ grid (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate F(λ) on the coarse grid and list local minima.
    Scan,
    /// Refine candidates into eigenpairs and export their eigenfunctions.
    Refine {
        /// Candidate eigenvalue; repeatable. Defaults to `refine.candidates`,
        /// then to the minima of a fresh scan.
        #[arg(long = "lambda", value_name = "F64")]
        lambdas: Vec<f64>,
    },
    /// Resample eigenfunctions from an existing eigenpairs.json.
    Eigenfunction {
        /// Defaults to `<out>/eigenpairs.json`.
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
    },
    /// Reference spectrum of a disk from Bessel zeros or finite differences.
    Oracle,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Scan => "scan",
            Command::Refine { .. } => "refine",
            Command::Eigenfunction { .. } => "eigenfunction",
            Command::Oracle => "oracle",
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    config_path: String,
    config_sha256: String,
    config: &'a config::RunConfig,
    seed: u64,
    threads: usize,
    potential_shift: f64,
    wall_time_s: f64,
    peak_memory_mb: f64,
    outputs: &'a [String],
}

fn run(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let path = cli
        .config
        .ok_or_else(|| CliError::Usage("--config PATH is required".into()))?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let run = Run::load(&path, cli.seed, cli.out)?;
    let mut out = Outputs::new(&run.out)?;
    match &cli.command {
        Command::Scan => commands::cmd_scan(&run, &mut out).map(|_| ())?,
        Command::Refine { lambdas } => commands::cmd_refine(&run, lambdas, &mut out)?,
        Command::Eigenfunction { input } => {
            let input = input.clone().unwrap_or_else(|| run.out.join("eigenpairs.json"));
            commands::cmd_eigenfunction(&run, &input, &mut out)?
        }
        Command::Oracle => commands::cmd_oracle(&run, &mut out)?,
    }
    let digest = Sha256::digest(run.text.as_bytes());
    let files = out.files.clone();
    let manifest = Manifest {
        command: cli.command.name(),
        version: env!("CARGO_PKG_VERSION"),
        config_path: path.display().to_string(),
        config_sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        config: &run.config,
        seed: run.seed,
        threads: rayon::current_num_threads(),
        potential_shift: run.shift,
        wall_time_s: start.elapsed().as_secs_f64(),
        peak_memory_mb: PEAK.load(Ordering::Relaxed) as f64 / (1024.0 * 1024.0),
        outputs: &files,
    };
    out.write_json("manifest.json", &manifest)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = serde_json::to_string(&e.report()).expect("error report serialises");
            eprintln!("{report}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use minfit::synth::trial_rng;
use minfit::SolverKind;
use minfit_cli::bench::run_bench;
use minfit_cli::io::{read_points, write_points, PointFormat};
use minfit_cli::ransac::{ransac, RansacConfig};
use minfit_cli::report::FitReport;
use minfit_cli::stats::run_stats;

const EXIT_USAGE: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

#[derive(Parser)]
#[command(name = "minfit", version, about = "Cylinders and cones through minimal point sets")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Every primitive of the given kind through the points in a file.
    Fit {
        #[arg(long)]
        kind: SolverKind,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solution-count histogram over random unit-cube inputs.
    Stats {
        #[arg(long)]
        kind: SolverKind,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, env = "MINFIT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-call timings; all kinds when --kind is omitted.
    Bench {
        #[arg(long)]
        kind: Option<SolverKind>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, env = "MINFIT_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Greedy RANSAC detection of primitives in a point cloud.
    Ransac {
        #[arg(long)]
        kind: SolverKind,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 500)]
        iterations: u64,
        #[arg(long, default_value_t = 1e-3)]
        tol_pos: f64,
        /// Radians.
        #[arg(long, default_value_t = 0.05)]
        tol_normal: f64,
        #[arg(long, default_value_t = 20)]
        min_inliers: usize,
        #[arg(long, default_value_t = 4)]
        max_results: usize,
        #[arg(long, env = "MINFIT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes a minimal sample on a random primitive of the given kind.
    Sample {
        #[arg(long)]
        kind: SolverKind,
        #[arg(long, env = "MINFIT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

fn fail(code: u8, msg: impl ToString) -> Failure {
    Failure { code, msg: msg.to_string() }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Fit { kind, input, out } => {
            let pts = read_points(&input).map_err(|e| fail(EXIT_PARSE, e))?;
            kind.check_input(&pts)
                .map_err(|e| fail(EXIT_USAGE, format!("{e}; {kind} expects {}", kind.pattern_description())))?;
            let t = Instant::now();
            let set = kind.solve(&pts).map_err(|e| fail(EXIT_NUMERIC, e))?;
            let report = FitReport::new(kind, set, &pts, t.elapsed());
            emit(&json(&report), out.as_ref())
        }
        Cmd::Stats { kind, trials, seed, format, out } => {
            if trials == 0 {
                return Err(fail(EXIT_USAGE, "--trials must be at least 1"));
            }
            let stats = run_stats(kind, trials, seed);
            let text = match format {
                Format::Json => json(&stats),
                Format::Csv => stats.histogram_csv(),
            };
            emit(&text, out.as_ref())
        }
        Cmd::Bench { kind, trials, seed } => {
            if trials < 10 {
                return Err(fail(EXIT_USAGE, "--trials must be at least 10"));
            }
            let kinds = kind.map_or(SolverKind::ALL.to_vec(), |k| vec![k]);
            let reports: Vec<_> = kinds.into_iter().map(|k| run_bench(k, trials, seed)).collect();
            emit(&json(&reports), None)
        }
        Cmd::Ransac { kind, input, iterations, tol_pos, tol_normal, min_inliers, max_results, seed, out } => {
            let cloud = read_points(&input).map_err(|e| fail(EXIT_PARSE, e))?;
            let cfg = RansacConfig { kind, iterations, tol_pos, tol_normal, min_inliers, seed, max_results };
            let found = ransac(&cloud, &cfg).map_err(|e| fail(EXIT_USAGE, e))?;
            emit(&json(&found), out.as_ref())
        }
        Cmd::Sample { kind, seed, format, out } => {
            let (_, pts) = kind.planted(&mut trial_rng(seed, 0));
            let fmt = match format {
                Format::Json => PointFormat::Json,
                Format::Csv => PointFormat::Csv,
            };
            emit(&write_points(&pts, fmt), out.as_ref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("minfit: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

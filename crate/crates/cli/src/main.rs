//! `hyperlab`: single-point analysis, parameter scans and the verification
//! suites.

mod analyze;
mod config;
mod error;
mod scan;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use hyperlab::verify::{run_suite, CheckKind, SuiteReport, VerifyOptions};
use serde::Serialize;

use crate::config::{model_from_args, search_from_args, AnalysisConfig};
use crate::error::{CliError, CliResult};
use crate::scan::{parse_grid, ScanOptions};

#[derive(Parser)]
#[command(
    name = "hyperlab",
    version,
    about = "Stress-energy, DEC and hyperbolicity analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one jet described by a JSON config.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include per-stage wall-clock times in the report.
        #[arg(long)]
        timings: bool,
    },
    /// Classify adapted-frame jets over a lambda grid and write CSV.
    Scan {
        #[arg(long)]
        model: String,
        /// Model parameter `key=value`, repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
        /// e.g. `lambda0=0:2:0.1,lambda1=0.5,lambda2=1,lambda3=0`.
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 3)]
        target_dim: usize,
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        /// Search setting `key=value`, repeatable.
        #[arg(long = "search")]
        search: Vec<String>,
        #[arg(long, default_value_t = 256)]
        dec_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named verification suite.
    Verify {
        #[arg(long)]
        suite: String,
        /// Multiplies every deviation tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Apply `--tol` to this check only.
        #[arg(long)]
        tighten: Option<String>,
        /// Perturbation added to the inputs of the deviation checks.
        #[arg(long)]
        perturb: Option<f64>,
        /// Override the Skyrme threshold `c1/c2` used for predictions.
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "search")]
        search: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        timings: bool,
    },
}

enum Outcome {
    Ok,
    Failed,
}

fn emit(out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn pretty<T: Serialize>(v: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("HYPERLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::new(
            "invalid-environment",
            format!("HYPERLAB_THREADS must be a positive integer, got '{v}'"),
        )
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::new("invalid-environment", e.to_string()))
}

fn run_analyze(config: &PathBuf, out: Option<&PathBuf>, timings: bool) -> CliResult<Outcome> {
    let text = fs::read_to_string(config)?;
    let cfg: AnalysisConfig = serde_json::from_str(&text)?;
    let report = analyze::analyze(&cfg, timings)?;
    emit(out, &pretty(&report)?)?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    #[serde(flatten)]
    report: &'a SuiteReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
}

fn print_table(report: &SuiteReport) {
    let width = report
        .checks
        .iter()
        .map(|c| c.name.len())
        .max()
        .unwrap_or(0);
    let mut stdout = io::stdout().lock();
    for c in &report.checks {
        let status = match (c.kind, c.passed) {
            (CheckKind::Info, _) => "INFO",
            (_, true) => "PASS",
            (_, false) => "FAIL",
        };
        let _ = writeln!(
            stdout,
            "{status}  {:<width$}  value={:<12.4e} tol={:<10.1e} {}",
            c.name, c.value, c.tolerance, c.detail
        );
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(
        stdout,
        "{}: {} checks, {failed} failed",
        report.suite,
        report.checks.len()
    );
}

fn run_verify(
    opts: VerifyOptions,
    suite: &str,
    out: Option<&PathBuf>,
    timings: bool,
) -> CliResult<Outcome> {
    let start = Instant::now();
    let report = run_suite(suite, &opts)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    print_table(&report);
    if let Some(p) = out {
        let doc = VerifyOutput {
            report: &report,
            elapsed_ms: timings.then_some(elapsed),
        };
        fs::write(p, pretty(&doc)?)?;
    }
    Ok(if report.passed {
        Outcome::Ok
    } else {
        Outcome::Failed
    })
}

fn run(cli: Cli) -> CliResult<Outcome> {
    configure_threads()?;
    match cli.command {
        Command::Analyze {
            config,
            out,
            timings,
        } => run_analyze(&config, out.as_ref(), timings),
        Command::Scan {
            model,
            params,
            grid,
            target_dim,
            s,
            search,
            dec_samples,
            seed,
            out,
        } => {
            let spec = model_from_args(&model, &params)?;
            let search = search_from_args(&search)?;
            if dec_samples == 0 || target_dim == 0 {
                return Err(CliError::new(
                    "invalid-argument",
                    "dec-samples and target-dim must be positive",
                ));
            }
            let grid = parse_grid(&grid)?;
            let opts = ScanOptions {
                spec,
                target_dim,
                s,
                search,
                dec_samples,
                seed,
            };
            let mut buf = Vec::new();
            scan::scan(&grid, &opts, &mut buf)?;
            emit(
                out.as_ref(),
                &String::from_utf8(buf).expect("csv output is utf-8"),
            )?;
            Ok(Outcome::Ok)
        }
        Command::Verify {
            suite,
            tol,
            tighten,
            perturb,
            threshold,
            samples,
            seed,
            search,
            out,
            timings,
        } => {
            let defaults = VerifyOptions::default();
            let opts = VerifyOptions {
                tol_factor: tol.unwrap_or(defaults.tol_factor),
                tighten,
                perturb: perturb.unwrap_or(defaults.perturb),
                threshold,
                samples: samples.unwrap_or(defaults.samples),
                seed: seed.unwrap_or(defaults.seed),
                search: if search.is_empty() {
                    defaults.search
                } else {
                    search_from_args(&search)?
                },
            };
            run_verify(opts, &suite, out.as_ref(), timings)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let err = CliError::new("usage", e.to_string().trim());
            println!("{}", err.to_json());
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            println!("{}", e.to_json());
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

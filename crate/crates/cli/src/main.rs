mod args;
mod manifest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use serde_json::json;

use moelab::channel::StinespringChannel;
use moelab::entropy::{brute_force_min_entropy, min_output_entropy, MinEntOptions, ORACLE_MAX_INPUT_DIM};
use moelab::error::LabError;
use moelab::experiments::{
    counterexample_pipeline, verify_bounds, verify_fg, verify_geometric, verify_hayden, verify_hhl,
    verify_independence, verify_levy, verify_median_lemma, verify_prop5, write_csv, ExperimentReport, LevyStatistic,
    PipelineOptions, UnitarySource, DEFAULT_A, DEFAULT_C,
};
use moelab::linalg::CMatrix;
use moelab::parallel::with_threads;
use moelab::random::{haar_unitary, SeedSpec};

use args::{Cli, Command, MinentArgs, PipelineArgs, Suite, UnitaryChoice, VerifyArgs};
use manifest::RunManifest;

/// Largest disagreement tolerated between optimizer and oracle.
const ORACLE_TOLERANCE: f64 = 5e-4;

enum Failure {
    Usage(String),
    Internal(String),
    Guard(String),
    Checks(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Internal(_) | Failure::Checks(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Guard(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Internal(m) | Failure::Guard(m) | Failure::Checks(m) => m,
        }
    }
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        match e {
            LabError::ResourceGuard { .. } => Failure::Guard(e.to_string()),
            LabError::InvalidArgument(_) | LabError::DimensionMismatch { .. } => Failure::Usage(e.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Minent(a) => with_threads(a.common.threads, || cmd_minent(a)),
        Command::Verify(a) => with_threads(a.common.threads, || cmd_verify(a)),
        Command::Pipeline(a) => with_threads(a.common.threads, || cmd_pipeline(a)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("moelab: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn emit<T: Serialize>(doc: &T, out: Option<&Path>) -> Outcome {
    let text = serde_json::to_string_pretty(doc).map_err(|e| Failure::Internal(e.to_string()))?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Internal(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}

fn output_paths(out: Option<&Path>, extra: &[&Path]) -> Vec<String> {
    out.into_iter().chain(extra.iter().copied()).map(|p| p.display().to_string()).collect()
}

fn cmd_minent(args: &MinentArgs) -> Outcome {
    let mut manifest = RunManifest::start("minent", args, args.common.seed, args.common.threads);
    if args.oracle && args.dim_a > ORACLE_MAX_INPUT_DIM {
        return Err(Failure::Usage(format!("--oracle needs --dim-a ≤ {ORACLE_MAX_INPUT_DIM}")));
    }
    let guard = moelab::guard::MemoryGuard::from_env();
    guard.check_channel(args.dim_a, args.dim_b)?;
    let seed = SeedSpec::new(args.common.seed);
    let n = args.dim_a * args.dim_b;
    let u = match args.unitary {
        UnitaryChoice::Haar => haar_unitary(n, &mut seed.child(0).rng())?,
        UnitaryChoice::Identity => CMatrix::identity(n, n),
    };
    let map = StinespringChannel::new(u, args.dim_a, args.dim_b)?.kraus_map();
    let result = min_output_entropy(&map, args.starts, seed.child(1), &MinEntOptions::default())?;
    let oracle = if args.oracle { Some(brute_force_min_entropy(&map, args.grid, seed.child(2))?) } else { None };
    let difference = oracle.map(|o| (o - result.value).abs());
    let agrees = difference.is_none_or(|d| d <= ORACLE_TOLERANCE);
    manifest.finish(output_paths(args.common.out.as_deref(), &[]));
    let doc = json!({
        "kind": "minent",
        "manifest": manifest,
        "channel": { "dim_a": args.dim_a, "dim_b": args.dim_b, "unitary": args.unitary },
        "result": result,
        "oracle": oracle,
        "oracle_difference": difference,
        "oracle_tolerance": ORACLE_TOLERANCE,
        "passed": agrees,
    });
    emit(&doc, args.common.out.as_deref())?;
    if agrees {
        Ok(())
    } else {
        Err(Failure::Checks(format!("optimizer and oracle differ by {:.3e}", difference.unwrap_or(f64::NAN))))
    }
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let mut manifest = RunManifest::start("verify", args, args.common.seed, args.common.threads);
    let seed = SeedSpec::new(args.common.seed);
    let trials = |default: u64| args.trials.or(args.samples).unwrap_or(default);
    let dim_a = |default: usize| args.dim_a.unwrap_or(default);
    let dim_b = |default: usize| args.dim_b.unwrap_or(default);
    let reports: Vec<ExperimentReport> = match args.suite {
        Suite::Geometric => vec![verify_geometric(dim_a(4), trials(100_000), seed)?],
        Suite::Median => vec![verify_median_lemma(dim_a(16), dim_b(2), trials(10_000), seed)?],
        Suite::Prop5 => vec![verify_prop5(
            dim_a(64),
            dim_b(2),
            args.a_param.unwrap_or(DEFAULT_A),
            args.epsilon.unwrap_or(0.3),
            trials(10_000),
            seed,
        )?],
        Suite::Hhl => vec![verify_hhl(dim_a(32), dim_b(2), args.epsilon.unwrap_or(0.5), trials(10_000), seed)?],
        Suite::Levy => vec![verify_levy(
            dim_a(8),
            LevyStatistic::OverlapWithFixedVector,
            args.alpha.unwrap_or(0.3),
            trials(10_000),
            seed,
        )?],
        Suite::Fg => vec![verify_fg(
            dim_a(64),
            dim_b(2),
            args.c.unwrap_or(DEFAULT_C),
            args.tube_n,
            trials(1000),
            seed,
            args.csv.as_deref(),
        )?],
        Suite::Independence => vec![verify_independence(dim_a(8), trials(10_000), seed)?],
        Suite::Hayden => vec![verify_hayden(dim_a(8), dim_b(2), args.samples.or(args.trials).unwrap_or(100), seed)?],
        Suite::Bounds => {
            let dims = args.dim_b.map_or_else(|| vec![2, 3, 4, 8], |d| vec![d]);
            let samples = args.samples.or(args.trials).unwrap_or(1000);
            dims.into_iter()
                .map(|d| verify_bounds(d, samples, SeedSpec::with_stream(args.common.seed, d as u64)))
                .collect::<Result<_, _>>()?
        }
    };
    let passed = reports.iter().all(ExperimentReport::passed);
    let extra: Vec<&Path> = args.csv.iter().map(PathBuf::as_path).filter(|_| args.suite == Suite::Fg).collect();
    manifest.finish(output_paths(args.common.out.as_deref(), &extra));
    let doc =
        json!({ "kind": "verify", "manifest": manifest, "suite": args.suite, "passed": passed, "reports": reports });
    emit(&doc, args.common.out.as_deref())?;
    for r in &reports {
        for w in &r.warnings {
            eprintln!("warning [{}]: {w}", r.suite);
        }
    }
    if passed {
        Ok(())
    } else {
        let failed: Vec<String> = reports
            .iter()
            .flat_map(|r| r.failed_checks().map(move |c| format!("{} {}: {}", r.suite, c.name, c.detail)))
            .collect();
        Err(Failure::Checks(format!("checks failed: {}", failed.join("; "))))
    }
}

fn cmd_pipeline(args: &PipelineArgs) -> Outcome {
    let mut manifest = RunManifest::start("pipeline", args, args.common.seed, args.common.threads);
    let options = PipelineOptions {
        starts: args.starts,
        inputs: args.inputs,
        tube_n: args.tube_n,
        source: match args.unitary {
            UnitaryChoice::Haar => UnitarySource::Haar,
            UnitaryChoice::Identity => UnitarySource::Identity,
        },
        ..Default::default()
    };
    let report = counterexample_pipeline(
        args.dim_a,
        args.dim_b,
        args.c,
        args.a_param,
        args.samples,
        SeedSpec::new(args.common.seed),
        &options,
    )?;
    let csv = args.csv.clone().or_else(|| args.common.out.as_ref().map(|p| p.with_extension("csv")));
    if let Some(path) = &csv {
        write_csv(path, &report.rows)?;
    }
    manifest.finish(output_paths(args.common.out.as_deref(), &csv.iter().map(PathBuf::as_path).collect::<Vec<_>>()));
    let doc = json!({ "kind": "pipeline", "manifest": manifest, "report": report });
    emit(&doc, args.common.out.as_deref())
}

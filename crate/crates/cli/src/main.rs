//! Command-line front end: configuration ingestion, command dispatch and
//! report emission.
//!
//! Exit codes for `classify`: 0 strongly or strictly hyperbolic, 2 weakly
//! hyperbolic, 3 non-hyperbolic, 1 on any error. `selftest` exits 0 when
//! every built-in regression passes.

mod config;
mod report;
mod selftest;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;

use pencilhyp_core::classify::{classify_system, ScanConfig};
use pencilhyp_core::eigenstruct::{reality_check, spectrum};
use pencilhyp_core::factorize::factorize_pencil;
use pencilhyp_core::models::maxwell_case_classify;
use pencilhyp_core::pencil::build_quadratic;
use pencilhyp_core::sample_directions;

use config::{parse_config, RunConfig};

#[derive(Parser)]
#[command(
    name = "pencilhyp",
    version,
    about = "Hyperbolicity analysis of fully second-order PDE systems via quadratic matrix pencils"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the direction sphere and classify the system
    Classify(RunArgs),
    /// Eigenvalue table (with multiplicities) for one direction
    Spectrum(RunArgs),
    /// Diagonalization data V1, Q, D1, D2, A1, A2 for one direction
    Factorize(RunArgs),
    /// Null-cone coincidence labels for an electromagnetic configuration
    MaxwellCase(RunArgs),
    /// Run the built-in regression suite
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a per-direction CSV table here (classify only)
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Override the sampling count
    #[arg(long)]
    samples: Option<usize>,
    /// Single direction, comma separated (e.g. 0,1 or 0,0,1)
    #[arg(long, value_parser = parse_direction)]
    direction: Option<Direction>,
}

#[derive(Clone)]
struct Direction(Vec<f64>);

fn parse_direction(raw: &str) -> Result<Direction, String> {
    let parts: Result<Vec<f64>, _> = raw.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match parts {
        Ok(v) if !v.is_empty() => Ok(Direction(v)),
        Ok(_) => Err("direction must have at least one component".into()),
        Err(e) => Err(format!("bad direction component: {e}")),
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Classify(args) => run_classify(args),
        Command::Spectrum(args) => run_spectrum(args),
        Command::Factorize(args) => run_factorize(args),
        Command::MaxwellCase(args) => run_maxwell_case(args),
        Command::Selftest => selftest::run(),
    };
    match code {
        Ok(c) => ExitCode::from(c as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// PENCILHYP_THREADS caps the direction-scan parallelism.
fn configure_threads() {
    if let Ok(raw) = std::env::var("PENCILHYP_THREADS") {
        if let Ok(n) = raw.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn load_config(args: &RunArgs) -> anyhow::Result<RunConfig> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("cannot read config {}", args.config.display()))?;
    let mut config = parse_config(&text)?;
    if let Some(samples) = args.samples {
        anyhow::ensure!(samples > 0, "--samples must be positive");
        config.sampling.count = samples;
    }
    if let Some(Direction(d)) = &args.direction {
        config.sampling.directions = Some(vec![d.clone()]);
    }
    Ok(config)
}

fn emit<T: serde::Serialize>(doc: &T, out: &Option<PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            let file = fs::File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))?;
            report::write_json(doc, file)
        }
        None => report::write_json(doc, std::io::stdout().lock()),
    }
}

fn run_classify(args: RunArgs) -> anyhow::Result<i32> {
    let config = load_config(&args)?;
    let system = config.system.build()?;
    let scan = ScanConfig {
        samples: config.sampling.count,
        scheme: config.sampling.scheme(),
        explicit: config.sampling.directions.clone(),
        refine_check: config.sampling.refine_check,
        tol: config.tolerances.to_tolerances(),
    };
    let sphere = classify_system(&system, &scan)?;
    if config.output.verbosity >= 1 {
        eprintln!(
            "aggregate: {} over {} directions (worst norm {:.3e})",
            sphere.aggregate.label(),
            sphere.sample_count,
            sphere.worst_norms.max()
        );
        if config.output.verbosity >= 2 {
            for v in &sphere.verdicts {
                eprintln!("  khat {:?}: {}", v.khat, v.class.label());
            }
        }
    }
    if let Some(csv_path) = &args.csv {
        let file = fs::File::create(csv_path)
            .with_context(|| format!("cannot create {}", csv_path.display()))?;
        report::write_csv(&sphere, file)?;
    }
    let doc = report::report_document(&config, &sphere);
    emit(&doc, &args.out)?;
    if !sphere.failures.is_empty() {
        for (khat, err) in &sphere.failures {
            eprintln!("direction {khat:?} failed: {err}");
        }
        return Ok(1);
    }
    Ok(sphere.exit_code())
}

fn single_direction(
    config: &RunConfig,
    system: &pencilhyp_core::SecondOrderSystem,
) -> anyhow::Result<DVector<f64>> {
    let raw = match &config.sampling.directions {
        Some(dirs) if dirs.len() == 1 => dirs[0].clone(),
        Some(_) => anyhow::bail!("this command takes exactly one direction"),
        None => sample_directions(system.spatial_dim(), 2, config.sampling.scheme())
            .map(|v| v[0].iter().copied().collect())?,
    };
    let v = DVector::from_vec(raw);
    let norm = v.norm();
    anyhow::ensure!(norm.is_finite() && norm > 0.0, "direction must be nonzero");
    anyhow::ensure!(
        v.len() == system.spatial_dim(),
        "direction has {} components, system has {} spatial dimensions",
        v.len(),
        system.spatial_dim()
    );
    Ok(v / norm)
}

fn run_spectrum(args: RunArgs) -> anyhow::Result<i32> {
    let config = load_config(&args)?;
    let system = config.system.build()?;
    let tol = config.tolerances.to_tolerances();
    let khat = single_direction(&config, &system)?;
    let pencil = build_quadratic(&system, &khat, &tol)?;
    let sd = spectrum(&pencil, &tol)?;
    let reality = reality_check(&sd, &tol);
    if config.output.verbosity >= 1 {
        for (z, (q, s)) in sd
            .eigenvalues
            .iter()
            .zip(sd.alg_mult.iter().zip(&sd.geo_mult))
        {
            eprintln!("lambda = {:+.12e} {:+.12e}i  q = {q}  s = {s}", z.re, z.im);
        }
    }
    let khat_vec: Vec<f64> = khat.iter().copied().collect();
    let doc = report::spectrum_document(&config, &khat_vec, &sd, reality);
    emit(&doc, &args.out)?;
    Ok(0)
}

fn run_factorize(args: RunArgs) -> anyhow::Result<i32> {
    let config = load_config(&args)?;
    let system = config.system.build()?;
    let tol = config.tolerances.to_tolerances();
    let khat = single_direction(&config, &system)?;
    let pencil = build_quadratic(&system, &khat, &tol)?;
    let sd = spectrum(&pencil, &tol)?;
    let f = factorize_pencil(&pencil, &sd, &tol)?;
    if config.output.verbosity >= 1 {
        let d1: Vec<f64> = f.d1.iter().copied().collect();
        let d2: Vec<f64> = f.d2.iter().copied().collect();
        eprintln!("D1 = {d1:?}");
        eprintln!("D2 = {d2:?}");
        eprintln!("max residual = {:.3e}", f.max_residual());
    }
    let khat_vec: Vec<f64> = khat.iter().copied().collect();
    let doc = report::factorize_document(&config, &khat_vec, &f);
    emit(&doc, &args.out)?;
    Ok(0)
}

fn run_maxwell_case(args: RunArgs) -> anyhow::Result<i32> {
    let config = load_config(&args)?;
    let cfg = config.system.maxwell_config()?;
    let tol = config.tolerances.to_tolerances();
    let dirs = match &config.sampling.directions {
        Some(list) => list
            .iter()
            .map(|raw| {
                let v = DVector::from_vec(raw.clone());
                let n = v.norm();
                anyhow::ensure!(n > 0.0, "direction must be nonzero");
                Ok(v / n)
            })
            .collect::<anyhow::Result<Vec<_>>>()?,
        None => sample_directions(3, config.sampling.count, config.sampling.scheme())?,
    };
    let cases = maxwell_case_classify(&cfg, &dirs, &tol)?;
    if config.output.verbosity >= 1 {
        for row in &cases.rows {
            eprintln!(
                "khat {:?}: {} ({})",
                row.khat,
                row.case.label(),
                row.class.label()
            );
        }
    }
    let doc = report::MaxwellCaseDocument {
        tool: "pencilhyp",
        version: env!("CARGO_PKG_VERSION"),
        config: config.clone(),
        consistent: cases.consistent,
        rows: cases
            .rows
            .iter()
            .map(|r| report::MaxwellCaseRow {
                khat: r.khat.clone(),
                case: r.case.label().to_string(),
                class: r.class.label().to_string(),
            })
            .collect(),
    };
    emit(&doc, &args.out)?;
    Ok(0)
}

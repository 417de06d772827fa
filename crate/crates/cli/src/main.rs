//! `splitquat`: coefficient generation, pairings, projections and the
//! verification suites. Exit status 0 on success or a passing suite, 1 on a
//! failing suite or a domain error, 2 on usage, parse or config errors.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use splitquat::coefficients::{basis_element, CoeffIndex, ComponentLabel, Series};
use splitquat::kernels::KernelCase;
use splitquat::laurent::LaurentElement;
use splitquat::pairing::{pair_exact, pair_numeric, QuadratureSpec};
use splitquat::projectors::project_symbolic;
use splitquat::report::Report;
use splitquat::suites::{
    verify_decomposition, verify_kernels, verify_orthogonality, verify_projectors, verify_structure,
    DecompositionConfig, KernelSuiteConfig, OrthogonalityConfig, ProjectorSuiteConfig, StructureConfig,
};
use thiserror::Error;

use crate::config::Settings;

#[derive(Debug, Error)]
enum CliError {
    /// Bad flags, config or input files.
    #[error("{0}")]
    Usage(String),
    /// A well-formed request the mathematics refuses.
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "splitquat",
    version,
    about = "Split quaternionic analysis: coefficients, pairing, kernels, projectors"
)]
struct Cli {
    #[command(flatten)]
    common: CommonFlags,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every command. Unset flags fall back to the config file,
/// then to the suite defaults.
#[derive(Args, Debug, Default, Clone)]
struct CommonFlags {
    /// Lowest doubled l in the sweep.
    #[arg(long, global = true, allow_negative_numbers = true)]
    min_twol: Option<i32>,
    /// Largest |k| in the sweep.
    #[arg(long, global = true)]
    max_absk: Option<i32>,
    /// How far n and m extend past the band edge.
    #[arg(long, global = true)]
    mn_offset: Option<i32>,
    /// Pass tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Radial cutoff of the quadrature.
    #[arg(long = "T", global = true)]
    t_max: Option<f64>,
    /// Radial nodes.
    #[arg(long, global = true)]
    nt: Option<usize>,
    /// Angular nodes per angle.
    #[arg(long, global = true)]
    nang: Option<usize>,
    /// Cycle radius.
    #[arg(long = "R", global = true)]
    radius: Option<f64>,
    /// RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// key=value file supplying defaults for the flags above.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print every report row, not only failures.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a basis element τ^l_{n,m}·N^k.
    Coeff {
        #[arg(long)]
        series: String,
        #[arg(long, allow_negative_numbers = true)]
        twol: i32,
        #[arg(long, allow_negative_numbers = true)]
        twon: i32,
        #[arg(long, allow_negative_numbers = true)]
        twom: i32,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        k: i32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Pair two functions, exactly or by quadrature.
    Pair {
        #[arg(long)]
        f1: PathBuf,
        #[arg(long)]
        f2: PathBuf,
        #[arg(long)]
        numeric: bool,
    },
    /// Pairing calibration, orthogonality and invariance.
    VerifyOrthogonality,
    /// Invariance of each component under the Lie algebra action.
    VerifyDecomposition {
        /// Self-test: run with a deliberately wrong ladder prefactor.
        #[arg(long)]
        corrupt_fixture: bool,
    },
    /// Reproducing-kernel series against the closed forms.
    VerifyKernels {
        /// Restrict to these cases (repeatable), e.g. dh-less.
        #[arg(long)]
        case: Vec<String>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Symbolic and numeric projector identities.
    VerifyProjectors,
    /// Operator identities and the finite-difference group check.
    VerifyStructure,
    /// Symbolic projection of a function onto one component.
    Project {
        #[arg(long)]
        component: String,
        #[arg(long)]
        f: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let file = match &cli.common.config {
        Some(p) => config::read(p).map_err(|e| CliError::Usage(e.to_string()))?,
        None => Settings::default(),
    };
    let s = file.overlay(&cli.common);
    s.validate().map_err(CliError::Usage)?;
    if let Some(j) = s.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    }
    match cli.command {
        Command::Coeff { series, twol, twon, twom, k, format } => {
            let series = Series::parse(&series).ok_or_else(|| CliError::Usage(format!("unknown series {series:?}")))?;
            let idx = CoeffIndex::new(series, twol, twon, twom, k).map_err(|e| CliError::Usage(e.to_string()))?;
            let f = basis_element(&idx).map_err(|e| CliError::Usage(e.to_string()))?;
            print_function(&f, format);
            Ok(ExitCode::SUCCESS)
        }
        Command::Pair { f1, f2, numeric } => {
            let (f1, f2) = (load_function(&f1)?, load_function(&f2)?);
            if numeric {
                let spec = s.spec(QuadratureSpec::default());
                let out = pair_numeric(&f1, &f2, &spec).map_err(|e| CliError::Usage(e.to_string()))?;
                println!("{:.15e} {:+.15e}i", out.re, out.im);
                println!("quadrature_run={} t_doubling_change={:.3e}", out.quadrature_run, out.t_doubling_change);
                for w in &out.warnings {
                    eprintln!("warning: {w}");
                }
                if let Some(t) = s.tol {
                    if !out.converged(t) {
                        return Err(CliError::Domain(format!("T-doubling change exceeds --tol {t}")));
                    }
                }
            } else {
                let v = pair_exact(&f1, &f2).map_err(|e| CliError::Domain(e.to_string()))?;
                println!("{v}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyOrthogonality => {
            let d = OrthogonalityConfig::default();
            let cfg = OrthogonalityConfig {
                bounds: s.bounds(d.bounds),
                tol: s.tol.unwrap_or(d.tol),
                spec: s.spec(d.spec),
                seed: s.seed.unwrap_or(d.seed),
            };
            let report = verify_orthogonality(&cfg).map_err(|e| CliError::Usage(e.to_string()))?;
            finish(report, &s)
        }
        Command::VerifyDecomposition { corrupt_fixture } => {
            let d = DecompositionConfig::default();
            let cfg =
                DecompositionConfig { bounds: s.bounds(d.bounds), corrupt_fixture, seed: s.seed.unwrap_or(d.seed) };
            finish(verify_decomposition(&cfg), &s)
        }
        Command::VerifyKernels { case, samples } => {
            let d = KernelSuiteConfig::default();
            let cases = if case.is_empty() || case.iter().any(|c| c == "all") {
                d.cases.clone()
            } else {
                case.iter()
                    .map(|c| KernelCase::parse(c).ok_or_else(|| CliError::Usage(format!("unknown case {c:?}"))))
                    .collect::<Result<Vec<_>, _>>()?
            };
            let cfg = KernelSuiteConfig {
                cases,
                samples: samples.unwrap_or(d.samples),
                tol: s.tol.unwrap_or(d.tol),
                seed: s.seed.unwrap_or(d.seed),
                ..d
            };
            finish(verify_kernels(&cfg), &s)
        }
        Command::VerifyProjectors => {
            let d = ProjectorSuiteConfig::default();
            let radius = s.radius.unwrap_or(d.radius);
            let cfg = ProjectorSuiteConfig {
                radius,
                tol: s.tol.unwrap_or(d.tol),
                seed: s.seed.unwrap_or(d.seed),
                spec: s.spec(QuadratureSpec { radius, ..d.spec }),
                bounds: s.bounds(d.bounds),
                ..d
            };
            finish(verify_projectors(&cfg), &s)
        }
        Command::VerifyStructure => {
            let d = StructureConfig::default();
            let cfg = StructureConfig { seed: s.seed.unwrap_or(d.seed), fd_tol: s.tol.unwrap_or(d.fd_tol), ..d };
            finish(verify_structure(&cfg), &s)
        }
        Command::Project { component, f, format } => {
            let label = ComponentLabel::parse(&component)
                .ok_or_else(|| CliError::Usage(format!("unknown component {component:?}")))?;
            let f = load_function(&f)?;
            let p = project_symbolic(&f, label).map_err(|e| CliError::Domain(e.to_string()))?;
            print_function(&p, format);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn print_function(f: &LaurentElement, format: Format) {
    match format {
        Format::Json => println!("{}", f.to_json()),
        Format::Text => println!("{f}"),
    }
}

fn load_function(path: &Path) -> Result<LaurentElement, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    LaurentElement::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn finish(report: Report, s: &Settings) -> Result<ExitCode, CliError> {
    if let Some(p) = &s.json {
        std::fs::write(p, report.to_json() + "\n").map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
    }
    if s.verbose {
        print!("{}", report.to_text());
    } else {
        for r in report.failures() {
            println!("[FAIL] {} {} expected={} got={}", r.check_id, r.inputs, r.expected, r.got);
        }
        println!(
            "{}: {} rows, {} passed, {} failed => {}",
            report.suite,
            report.summary.total,
            report.summary.passed,
            report.summary.failed,
            if report.pass { "PASS" } else { "FAIL" }
        );
    }
    Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

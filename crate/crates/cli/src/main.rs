use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use flatpoint::bounds::{CurvatureReport, ReportOptions};
use flatpoint::hexagon::{build_hexagon, MeshFormat};
use flatpoint::rkc::{
    family_report_with, seeded_batch, BoundaryCorrespondence, CorrespondenceSpec,
};
use flatpoint::verify::{run_verify, VerifyConfig, VerifySummary};
use flatpoint::{Error, ErrorKind, WeierstrassData};

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_BOUND: u8 = 4;

/// Checks whose failure means a curvature bound was violated.
const BOUND_CHECKS: &[&str] = &[
    "bound_ordering",
    "hall_bound",
    "rkc_batch_violations",
    "rkc_concentration_family",
    "schwarz_equality",
    "schwarz_random",
];

#[derive(Parser)]
#[command(
    name = "flatpoint",
    version,
    about = "Curvature at zero-curvature centres of minimal graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Curvature report of the Scherk-type hexagon graph.
    HexagonReport {
        /// Skip the numerical limit.
        #[arg(long)]
        no_numeric: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Polar-grid mesh of the hexagon graph.
    HexagonMesh {
        #[arg(long, default_value_t = 32)]
        n_radial: usize,
        #[arg(long, default_value_t = 96)]
        n_angular: usize,
        #[arg(long, default_value_t = 0.95)]
        r_max: f64,
        /// obj or csv.
        #[arg(long, default_value = "obj")]
        format: MeshFormat,
        #[command(flatten)]
        output: Output,
    },
    /// Curvature report of Weierstrass data read from a JSON document.
    Kpp {
        data: PathBuf,
        /// Assert that the projection maps the disk onto the disk, so the
        /// bounds become premises and violations are errors.
        #[arg(long)]
        disk_onto_disk: bool,
        #[arg(long)]
        no_numeric: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Run the verification suite.
    Verify {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Tolerance override NAME=VALUE; may be repeated. Environment
        /// variables FLATPOINT_TOL_<NAME> are read as well.
        #[arg(long = "tol", value_name = "NAME=VALUE")]
        tolerances: Vec<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Reports for a boundary correspondence file or a seeded random batch.
    Rkc {
        #[arg(required_unless_present = "seed", conflicts_with = "seed")]
        correspondence: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Admissible instances in a seeded batch.
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long)]
        no_numeric: bool,
        #[command(flatten)]
        output: Output,
    },
}

enum Failure {
    Error(Error),
    Bound(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn emit(output: &Output, text: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Error::from(e).into()),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.write_all(b"\n"))
            {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::from(e).into()),
                _ => Ok(()),
            }
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Error::Parameter(format!("cannot read {}: {e}", path.display())).into())
}

fn check_report(report: &CurvatureReport) -> Result<(), Failure> {
    let v = report.violations();
    if v.is_empty() {
        Ok(())
    } else {
        Err(Failure::Bound(v.join("; ")))
    }
}

fn parse_tolerances(items: &[String], config: &mut VerifyConfig) -> Result<(), Failure> {
    for item in items {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Parameter(format!("--tol {item}: expected NAME=VALUE")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| Error::Parameter(format!("--tol {item}: {value} is not a number")))?;
        if !(value >= 0.0) {
            return Err(Error::Parameter(format!("--tol {item}: must be non-negative")).into());
        }
        if !flatpoint::verify::check_names().contains(&name) {
            return Err(Error::Parameter(format!("--tol {item}: no check named {name}")).into());
        }
        config.tolerances.insert(name.to_string(), value);
    }
    Ok(())
}

fn verify_outcome(summary: &VerifySummary) -> Result<(), Failure> {
    for check in &summary.checks {
        eprintln!(
            "{} {} measured {} tolerance {:e}",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            check
                .measured
                .map_or("n/a".to_string(), |m| format!("{m:e}")),
            check.tolerance
        );
    }
    let failed: Vec<&str> = summary
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else if failed.iter().any(|n| BOUND_CHECKS.contains(n)) {
        Err(Failure::Bound(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    } else {
        Err(Failure::Numeric(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::HexagonReport { no_numeric, output } => {
            let model = build_hexagon();
            let report = if no_numeric {
                let mut r = CurvatureReport::for_data(
                    model.data(),
                    ReportOptions {
                        numeric: false,
                        disk_onto_disk: false,
                    },
                )?;
                r.annotate(flatpoint::hexagon::EXTREMAL_ANNOTATION);
                r
            } else {
                model.kpp_report()?
            };
            emit(&output, &report.to_json()?)
        }
        Command::HexagonMesh {
            n_radial,
            n_angular,
            r_max,
            format,
            output,
        } => {
            let mesh = build_hexagon().export_mesh(n_radial, n_angular, r_max, format)?;
            match &output.out {
                Some(path) => Ok(mesh.write(path)?),
                None => emit(&output, mesh.render().trim_end()),
            }
        }
        Command::Kpp {
            data,
            disk_onto_disk,
            no_numeric,
            output,
        } => {
            let data = WeierstrassData::from_json(&read(&data)?)?;
            let report = CurvatureReport::for_data(
                &data,
                ReportOptions {
                    numeric: !no_numeric,
                    disk_onto_disk,
                },
            )?;
            emit(&output, &report.to_json()?)?;
            check_report(&report)
        }
        Command::Verify {
            seed,
            tolerances,
            output,
        } => {
            let mut config = VerifyConfig::new(seed).with_env_overrides()?;
            parse_tolerances(&tolerances, &mut config)?;
            let summary = run_verify(&config);
            emit(&output, &summary.to_json()?)?;
            verify_outcome(&summary)
        }
        Command::Rkc {
            correspondence,
            seed,
            count,
            no_numeric,
            output,
        } => {
            if let Some(path) = correspondence {
                let spec = CorrespondenceSpec::from_json(&read(&path)?)?;
                let bc = BoundaryCorrespondence::new(spec)?;
                let report = family_report_with(&bc, !no_numeric)?;
                emit(&output, &report.to_json()?)?;
                check_report(&report)
            } else {
                let seed = seed.expect("clap requires a file or a seed");
                let batch = seeded_batch(seed, count, !no_numeric);
                let text = serde_json::to_string_pretty(&batch)
                    .map_err(|e| Failure::Error(Error::from(e)))?;
                emit(&output, &text)?;
                if batch.violations.is_empty() {
                    Ok(())
                } else {
                    Err(Failure::Bound(batch.violations.join("; ")))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Input => EXIT_INPUT,
                ErrorKind::Numeric => EXIT_NUMERIC,
                ErrorKind::BoundViolation => EXIT_BOUND,
            })
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
        Err(Failure::Bound(msg)) => {
            eprintln!("bound violation: {msg}");
            ExitCode::from(EXIT_BOUND)
        }
    }
}

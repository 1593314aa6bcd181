//! Command-line verification harness: validate groupoid tables, build
//! quantum groupoid candidates from them, check serialized candidates, and
//! run the named demos.
//!
//! Exit codes: 0 success/verdict true, 1 verdict false or invalid groupoid,
//! 2 parse or schema error, 3 unsupported isotropy, 4 unknown demo.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qgl_core::error::Error;
use qgl_core::fixtures;
use qgl_core::groupoid::{validate_groupoid, FiniteGroupoid};
use qgl_core::models::{convolution_algebra_model, function_algebra_model};
use qgl_core::qgroupoid::verify_quantum_groupoid;
use qgl_core::report::VerificationReport;
use qgl_core::sepid::{check_sepid_properties, verify_separability};
use qgl_core::wire;
use qgl_core::RunSettings;

const EXIT_FAIL: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;
const EXIT_UNKNOWN_DEMO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "qgl",
    about = "Numerical verification harness for finite quantum groupoid candidates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Function,
    Convolution,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Check a groupoid composition table against the groupoid laws.
    ValidateGroupoid {
        path: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Build a quantum groupoid candidate from a groupoid file.
    Build {
        path: PathBuf,
        #[arg(long, value_enum)]
        model: Model,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Verify a serialized quantum groupoid candidate.
    Check {
        path: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Build and verify a named fixture.
    Demo {
        name: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn settings_with(tol: Option<f64>, seed: Option<u64>) -> Result<RunSettings, String> {
    let mut settings = RunSettings::default();
    if let Ok(env_tol) = std::env::var("QGL_TOL") {
        settings.tolerance = env_tol
            .parse::<f64>()
            .map_err(|e| format!("QGL_TOL is not a number: {e}"))?;
    }
    if let Some(t) = tol {
        settings.tolerance = t;
    }
    if settings.tolerance <= 0.0 {
        return Err("tolerance must be positive".into());
    }
    if let Some(s) = seed {
        settings.seed = s;
    }
    Ok(settings)
}

fn emit_report(
    report: &VerificationReport,
    out: &Option<PathBuf>,
    format: Format,
) -> Result<(), String> {
    let rendered = match format {
        Format::Json => report.to_json(),
        Format::Text => report.render_text(),
    };
    match out {
        Some(path) => std::fs::write(path, rendered).map_err(|e| format!("write report: {e}")),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn read_groupoid(path: &PathBuf) -> Result<FiniteGroupoid, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("read {path:?}: {e}"))?;
    FiniteGroupoid::from_json(&text).map_err(|e| e.to_string())
}

fn run() -> Result<u8, (u8, String)> {
    let cli = Cli::parse();
    match cli.command {
        Command::ValidateGroupoid {
            path,
            report,
            format,
        } => {
            let g = read_groupoid(&path).map_err(|e| (EXIT_PARSE, e))?;
            let rep = validate_groupoid(&g);
            emit_report(&rep, &report, format).map_err(|e| (EXIT_PARSE, e))?;
            Ok(if rep.verdict { 0 } else { EXIT_FAIL })
        }
        Command::Build {
            path,
            model,
            output,
        } => {
            let g = read_groupoid(&path).map_err(|e| (EXIT_PARSE, e))?;
            let built = match model {
                Model::Function => function_algebra_model(&g),
                Model::Convolution => convolution_algebra_model(&g),
            };
            let qg = built.map_err(|e| match e {
                Error::UnsupportedIsotropy(_) => (EXIT_UNSUPPORTED, e.to_string()),
                Error::InvalidGroupoid(_) => (EXIT_FAIL, e.to_string()),
                other => (EXIT_PARSE, other.to_string()),
            })?;
            std::fs::write(&output, wire::qgd_to_json(&qg))
                .map_err(|e| (EXIT_PARSE, format!("write {output:?}: {e}")))?;
            eprintln!("wrote {output:?}");
            Ok(0)
        }
        Command::Check {
            path,
            tol,
            seed,
            report,
            format,
        } => {
            let settings = settings_with(tol, seed).map_err(|e| (EXIT_PARSE, e))?;
            let text = std::fs::read_to_string(&path)
                .map_err(|e| (EXIT_PARSE, format!("read {path:?}: {e}")))?;
            let qg = wire::qgd_from_json(&text).map_err(|e| (EXIT_PARSE, e.to_string()))?;
            let rep = verify_quantum_groupoid(&qg, &settings);
            emit_report(&rep, &report, format).map_err(|e| (EXIT_PARSE, e))?;
            Ok(if rep.verdict { 0 } else { EXIT_FAIL })
        }
        Command::Demo {
            name,
            n,
            tol,
            seed,
            report,
            format,
        } => {
            let settings = settings_with(tol, seed).map_err(|e| (EXIT_PARSE, e))?;
            let rep = match name.as_str() {
                "pair-groupoid" => {
                    verify_quantum_groupoid(&fixtures::fx1_pair_function(n.max(1)), &settings)
                }
                "matrix-conv" => {
                    verify_quantum_groupoid(&fixtures::fx2_matrix_convolution(n.max(1)), &settings)
                }
                "cyclic-group" => {
                    verify_quantum_groupoid(&fixtures::fx3_cyclic_function(n.max(1)), &settings)
                }
                "disjoint-union" => {
                    verify_quantum_groupoid(&fixtures::disjoint_union_function(), &settings)
                }
                "matrix-base" => {
                    let (b, c, r, nu) = fixtures::fx4_base();
                    let outcome = verify_separability(&b, &c, &r, &nu, None, &settings);
                    let mut checks = outcome.checks;
                    if let Some(t) = outcome.triple.as_ref() {
                        checks.extend(check_sepid_properties(t, &settings));
                    }
                    VerificationReport::from_checks(checks)
                }
                "bad-weights" => {
                    let (b, c, r, nu) = fixtures::fx5_base();
                    let outcome = verify_separability(&b, &c, &r, &nu, None, &settings);
                    VerificationReport::from_checks(outcome.checks)
                }
                other => {
                    return Err((EXIT_UNKNOWN_DEMO, format!("unknown demo `{other}`")));
                }
            };
            emit_report(&rep, &report, format).map_err(|e| (EXIT_PARSE, e))?;
            if !rep.verdict {
                for c in rep.failing() {
                    if let Some(d) = &c.detail {
                        eprintln!("{}: {d}", c.id);
                    }
                }
            }
            Ok(if rep.verdict { 0 } else { EXIT_FAIL })
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use symcond_cli::format::{self, Format};
use symcond_cli::report::{TheoremStatus, TheoremsReport};
use symcond_cli::selftest::{seed_from_env, selftest};
use symcond_cli::{
    check_theorems, load_scenario, reproduce_fig1, run_scenario, sweep_phase, CliError, Experiment, Grid,
};

/// Conditional expectation values before and after measurement, and their
/// sensitivity to coherence under conservation laws.
#[derive(Parser, Debug)]
#[command(name = "symcond", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Tolerance for hypothesis and equality checks (overrides the scenario).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output format; sweeps default to csv, reports to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Suppress the status summary on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a scenario and report conditional values and theorem verdicts.
    Run {
        scenario: PathBuf,
        /// Override the phase of a coherent system state (radians, or e.g. `0.4pi`).
        #[arg(long, value_parser = parse_angle)]
        phase: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the phase of the system state.
    Sweep {
        scenario: PathBuf,
        #[arg(long, value_parser = parse_angle)]
        from: Option<f64>,
        #[arg(long, value_parser = parse_angle)]
        to: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the built-in 201-point qubit-qubit sweep.
    Fig1 {
        #[arg(long)]
        out: PathBuf,
    },
    /// Report hypothesis and equality residuals of both theorems.
    Theorems {
        scenario: PathBuf,
        /// Fail unless every hypothesis and equality of this theorem holds.
        #[arg(long, value_parser = ["theorem1", "theorem2"])]
        require: Option<String>,
        #[arg(long, value_parser = parse_angle)]
        phase: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized consistency checks; seed from SYMCOND_SEED (default 42).
    Selftest {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Radians as a plain number, or a multiple of π written `2pi`, `0.4pi`, `pi`.
fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.strip_suffix("pi") {
        Some("") => PI,
        Some("-") => -PI,
        Some(m) => m.parse::<f64>().map_err(|e| format!("{s:?}: {e}"))? * PI,
        None => s.parse::<f64>().map_err(|e| format!("{s:?}: {e}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

fn load(path: &Path, tol: Option<f64>, phase: Option<f64>) -> Result<Experiment, CliError> {
    let mut exp = load_scenario(path)?;
    if let Some(t) = tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Parse {
                path: "--tol".into(),
                message: format!("tolerance must be positive, got {t}"),
            });
        }
        exp.tolerance = t;
    }
    if let Some(p) = phase {
        exp = exp.with_phase(p)?;
    }
    Ok(exp)
}

fn theorem_summary(report: &TheoremsReport) -> String {
    report
        .theorems
        .iter()
        .map(|t| {
            format!(
                "{}: {} (max equality residual {:.3e}, tolerance {:.1e})",
                t.verdict.theorem,
                t.status.as_str(),
                t.verdict.max_equality_residual(),
                t.verdict.tolerance
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let say = |msg: &str| {
        if !cli.quiet {
            eprintln!("{msg}");
        }
    };
    match &cli.command {
        Command::Run { scenario, phase, out } => {
            let exp = load(scenario, cli.tol, *phase)?;
            let report = run_scenario(&exp)?;
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Json => format::json(&report),
                Format::Csv => format::run_csv(&report),
            };
            emit(&text, out.as_deref())?;
            let zero = report
                .outcomes
                .iter()
                .filter(|o| o.status != symcond_cli::report::OutcomeStatus::Ok)
                .count();
            say(&format!(
                "{} outcomes, probability sum {:.12}, {zero} below the probability floor",
                report.outcomes.len(),
                report.probability_sum
            ));
            for t in &report.theorems {
                say(&format!("{}: {}", t.verdict.theorem, t.status.as_str()));
            }
            Ok(())
        }
        Command::Sweep {
            scenario,
            from,
            to,
            steps,
            out,
        } => {
            let exp = load(scenario, cli.tol, None)?;
            let base = exp.sweep;
            let pick = |flag: Option<f64>, fallback: Option<f64>, name: &str| {
                flag.or(fallback).ok_or_else(|| CliError::Parse {
                    path: exp.source.clone(),
                    message: format!("no sweep.{name} in the scenario and no --{name} given"),
                })
            };
            let from = pick(*from, base.map(|g| g.from), "from")?;
            let to = pick(*to, base.map(|g| g.to), "to")?;
            let steps = steps.or(base.map(|g| g.steps)).ok_or_else(|| CliError::Parse {
                path: exp.source.clone(),
                message: "no sweep.steps in the scenario and no --steps given".into(),
            })?;
            let grid = Grid::new(from, to, steps).map_err(|m| CliError::Parse {
                path: "--steps".into(),
                message: m,
            })?;
            let report = sweep_phase(&exp, grid)?;
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => format::sweep_csv(&report),
                Format::Json => format::json(&report),
            };
            emit(&text, out.as_deref())?;
            say(&format!("{} records over {} phases", report.records.len(), grid.steps));
            Ok(())
        }
        Command::Fig1 { out } => {
            let report = reproduce_fig1()?;
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => format::sweep_csv(&report),
                Format::Json => format::json(&report),
            };
            emit(&text, Some(out))?;
            say(&format!("wrote {} records to {}", report.records.len(), out.display()));
            Ok(())
        }
        Command::Theorems {
            scenario,
            require,
            phase,
            out,
        } => {
            let exp = load(scenario, cli.tol, *phase)?;
            let report = check_theorems(&exp)?;
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Json => format::json(&report),
                Format::Csv => format::theorems_csv(&report),
            };
            emit(&text, out.as_deref())?;
            say(&theorem_summary(&report));
            if report.theorems.iter().all(|t| t.status != TheoremStatus::Held) && require.is_none() {
                say("no theorem has all of its hypotheses satisfied; its equalities are not asserted");
            }
            report.assess(require.as_deref())
        }
        Command::Selftest { out } => {
            let seed = seed_from_env().map_err(|message| CliError::Parse {
                path: "SYMCOND_SEED".into(),
                message,
            })?;
            let report = selftest(seed);
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Json => format::json(&report),
                Format::Csv => format::selftest_csv(&report),
            };
            emit(&text, out.as_deref())?;
            for c in &report.checks {
                say(&format!(
                    "{} {}: max residual {:.3e} over {} instances, tolerance {:.1e}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.max_residual,
                    c.instances,
                    c.tolerance
                ));
            }
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::Assertion(format!("selftest failed for seed {seed}")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles_accept_multiples_of_pi() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("0.4pi").unwrap(), 0.4 * PI);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("1.5").unwrap(), 1.5);
        assert!(parse_angle("x").is_err());
        assert!(parse_angle("inf").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

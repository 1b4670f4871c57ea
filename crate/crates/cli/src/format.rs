//! Bit-stable text output. Numbers in CSV use 17 significant digits in
//! scientific notation, `.` as decimal separator and `\n` line endings.

use std::fmt::Write as _;

use serde::Serialize;

use crate::report::{RunReport, SweepReport, TheoremsReport};
use crate::selftest::SelftestReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// `{:.16e}` with negative zero folded into zero; `NaN` for missing values.
pub fn number(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x == 0.0 {
        format!("{:.16e}", 0.0)
    } else {
        format!("{x:.16e}")
    }
}

fn optional(x: Option<f64>) -> String {
    number(x.unwrap_or(f64::NAN))
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn flag(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn sweep_csv(report: &SweepReport) -> String {
    let mut labels: Vec<&str> = report.records.iter().map(|r| r.outcome.as_str()).collect();
    labels.sort_unstable();
    labels.dedup();
    let mut out = String::new();
    let _ = writeln!(out, "# phase sweep of {}", report.source);
    let _ = writeln!(
        out,
        "# grid: {} points from {} to {} rad",
        report.grid.steps, report.grid.from, report.grid.to
    );
    let _ = writeln!(
        out,
        "# tolerance: {:e}; probability floor: {:e}",
        report.tolerance, report.probability_floor
    );
    out.push_str(
        "# columns: 1 phi [rad], 2 outcome, 3 probability, 4 delta_coherent, 5 delta_decohered, 6 difference\n",
    );
    out.push_str(
        "# difference = delta_coherent - delta_decohered; NaN marks outcomes with probability at or below the floor\n",
    );
    let _ = writeln!(
        out,
        "# gnuplot: set datafile separator ','; set key autotitle columnhead; \
         plot for [o in \"{}\"] 'FILE' using 1:(strcol(2) eq o ? $6 : NaN) with lines title o",
        labels.join(" ")
    );
    out.push_str("phi,outcome,probability,delta_coherent,delta_decohered,difference\n");
    for r in &report.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            number(r.phi),
            field(&r.outcome),
            number(r.probability),
            optional(r.delta_coherent),
            optional(r.delta_decohered),
            optional(r.difference)
        );
    }
    out
}

pub fn run_csv(report: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# conditional values for {}", report.source);
    let _ = writeln!(
        out,
        "# tolerance: {:e}; probability floor: {:e}; probability sum: {}",
        report.tolerance,
        report.probability_floor,
        number(report.probability_sum)
    );
    out.push_str("outcome,value,probability,before,after,delta,weak_value_imag,status\n");
    for o in &report.outcomes {
        let status = match o.status {
            crate::report::OutcomeStatus::Ok => "ok",
            crate::report::OutcomeStatus::ZeroProbability => "zero_probability",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            field(&o.outcome),
            optional(o.value),
            number(o.probability),
            optional(o.before),
            optional(o.after),
            optional(o.delta),
            optional(o.weak_value_imag),
            status
        );
    }
    out
}

pub fn theorems_csv(report: &TheoremsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# theorem verdicts for {}", report.source);
    out.push_str("theorem,status,kind,name,residual,tolerance,held,implied\n");
    for t in &report.theorems {
        let v = &t.verdict;
        for (name, c) in &v.hypotheses {
            let _ = writeln!(
                out,
                "{},{},hypothesis,{},{},{},{},",
                v.theorem,
                field(t.status.as_str()),
                name,
                number(c.residual),
                number(c.tolerance),
                flag(c.held)
            );
        }
        for (name, e) in &v.equalities {
            let _ = writeln!(
                out,
                "{},{},equality,{},{},{},{},{}",
                v.theorem,
                field(t.status.as_str()),
                name,
                number(e.check.residual),
                number(e.check.tolerance),
                flag(e.check.held),
                flag(e.implied)
            );
        }
    }
    out
}

pub fn selftest_csv(report: &SelftestReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# selftest, seed {}", report.seed);
    out.push_str("check,instances,max_residual,tolerance,passed\n");
    for c in &report.checks {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            c.name,
            c.instances,
            number(c.max_residual),
            number(c.tolerance),
            flag(c.passed)
        );
    }
    out
}

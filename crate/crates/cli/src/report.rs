//! Commands that evaluate an [`Experiment`] and the reports they produce.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use symcond::engine::{conditional_change, outcome_probabilities, P_FLOOR};
use symcond::symmetry::{
    check_commutes_with_system_part, check_conservation, check_yanase, verify_theorem1, verify_theorem2, Check,
    OBSERVABLE_COMMUTES, STATE_COMMUTES,
};
use symcond::{DensityState, TheoremVerdict};

use crate::error::{from_core, CliError};
use crate::scenario::{Experiment, Grid, SystemState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeStatus {
    Ok,
    ZeroProbability,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeEntry {
    pub outcome: String,
    pub value: Option<f64>,
    pub probability: f64,
    pub before: Option<f64>,
    pub after: Option<f64>,
    pub delta: Option<f64>,
    pub weak_value_imag: Option<f64>,
    pub status: OutcomeStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TheoremStatus {
    /// Every hypothesis and every equality held.
    #[serde(rename = "held")]
    Held,
    /// Some hypothesis failed and no implied equality failed.
    #[serde(rename = "hypothesis not satisfied")]
    HypothesisNotSatisfied,
    /// An equality implied by satisfied hypotheses failed.
    #[serde(rename = "violated")]
    Violated,
}

impl TheoremStatus {
    pub fn of(verdict: &TheoremVerdict) -> Self {
        if !verdict.implied_equalities_hold() {
            TheoremStatus::Violated
        } else if verdict.hypotheses_held() && verdict.equalities_held() {
            TheoremStatus::Held
        } else {
            TheoremStatus::HypothesisNotSatisfied
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremStatus::Held => "held",
            TheoremStatus::HypothesisNotSatisfied => "hypothesis not satisfied",
            TheoremStatus::Violated => "violated",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremSummary {
    pub status: TheoremStatus,
    #[serde(flatten)]
    pub verdict: TheoremVerdict,
}

impl TheoremSummary {
    fn new(verdict: TheoremVerdict) -> Self {
        Self {
            status: TheoremStatus::of(&verdict),
            verdict,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Dims {
    pub system: usize,
    pub apparatus: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub source: String,
    pub tolerance: f64,
    pub probability_floor: f64,
    pub dims: Dims,
    pub system_phase: Option<f64>,
    pub checks: BTreeMap<&'static str, Check>,
    pub outcomes: Vec<OutcomeEntry>,
    pub probability_sum: f64,
    pub theorems: Vec<TheoremSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremsReport {
    pub source: String,
    pub tolerance: f64,
    pub theorems: Vec<TheoremSummary>,
}

impl TheoremsReport {
    /// Exit status for `theorems`: fails when an implied equality fails, or
    /// when the theorem named in `require` is not fully held.
    pub fn assess(&self, require: Option<&str>) -> Result<(), CliError> {
        if let Some(t) = self.theorems.iter().find(|t| t.status == TheoremStatus::Violated) {
            return Err(CliError::Assertion(format!(
                "{}: an equality implied by the satisfied hypotheses fails (max residual {:.3e}, tolerance {:.1e})",
                t.verdict.theorem,
                t.verdict.max_equality_residual(),
                t.verdict.tolerance
            )));
        }
        if let Some(name) = require {
            let t = self
                .theorems
                .iter()
                .find(|t| t.verdict.theorem == name)
                .ok_or_else(|| CliError::Assertion(format!("unknown theorem {name:?}")))?;
            if t.status != TheoremStatus::Held {
                let broken: Vec<&str> = t
                    .verdict
                    .hypotheses
                    .iter()
                    .filter(|(_, c)| !c.held)
                    .map(|(n, _)| *n)
                    .collect();
                return Err(CliError::Assertion(format!(
                    "{name} required but {}; broken hypotheses: [{}]",
                    t.status.as_str(),
                    broken.join(", ")
                )));
            }
        }
        Ok(())
    }
}

/// One row of a phase sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub phi: f64,
    pub outcome: String,
    pub probability: f64,
    pub delta_coherent: Option<f64>,
    pub delta_decohered: Option<f64>,
    pub difference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub source: String,
    pub tolerance: f64,
    pub probability_floor: f64,
    pub grid: GridSummary,
    pub records: Vec<SweepRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSummary {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

fn theorems(exp: &Experiment, rho: &DensityState) -> Result<Vec<TheoremSummary>, CliError> {
    let core = |e| from_core(&exp.source, e);
    let t1 = verify_theorem1(&exp.model, rho, &exp.observable, &exp.conserved, exp.tolerance).map_err(core)?;
    let t2 = verify_theorem2(&exp.model, rho, &exp.observable, &exp.conserved, exp.tolerance).map_err(core)?;
    Ok(vec![TheoremSummary::new(t1), TheoremSummary::new(t2)])
}

fn outcome_entries(exp: &Experiment, rho: &DensityState) -> Result<Vec<OutcomeEntry>, CliError> {
    let probabilities = outcome_probabilities(&exp.model, rho).map_err(|e| from_core(&exp.source, e))?;
    exp.model
        .outcomes()
        .iter()
        .zip(probabilities)
        .map(
            |(o, probability)| match conditional_change(&exp.model, rho, &exp.observable, &o.label) {
                Ok(r) => Ok(OutcomeEntry {
                    outcome: o.label.clone(),
                    value: o.value,
                    probability,
                    before: Some(r.before),
                    after: Some(r.after),
                    delta: Some(r.delta),
                    weak_value_imag: Some(r.weak_value_imag),
                    status: OutcomeStatus::Ok,
                }),
                Err(symcond::Error::ZeroProbabilityOutcome { .. }) => Ok(OutcomeEntry {
                    outcome: o.label.clone(),
                    value: o.value,
                    probability,
                    before: None,
                    after: None,
                    delta: None,
                    weak_value_imag: None,
                    status: OutcomeStatus::ZeroProbability,
                }),
                Err(e) => Err(from_core(&exp.source, e)),
            },
        )
        .collect()
}

/// Everything applicable to one scenario: structural checks, per-outcome
/// conditional values and both theorem verdicts.
pub fn run_scenario(exp: &Experiment) -> Result<RunReport, CliError> {
    let rho = exp.state()?;
    let core = |e| from_core(&exp.source, e);
    let tol = exp.tolerance;
    let mut checks = BTreeMap::new();
    checks.insert(
        "conservation",
        check_conservation(&exp.model, &exp.conserved, tol).map_err(core)?,
    );
    checks.insert("yanase", check_yanase(&exp.model, &exp.conserved, tol).map_err(core)?);
    checks.insert(
        OBSERVABLE_COMMUTES,
        check_commutes_with_system_part(exp.observable.matrix(), &exp.conserved, tol).map_err(core)?,
    );
    checks.insert(
        STATE_COMMUTES,
        check_commutes_with_system_part(rho.matrix(), &exp.conserved, tol).map_err(core)?,
    );

    let outcomes = outcome_entries(exp, &rho)?;
    let probability_sum = outcomes.iter().map(|o| o.probability).sum();
    Ok(RunReport {
        source: exp.source.clone(),
        tolerance: tol,
        probability_floor: P_FLOOR,
        dims: Dims {
            system: exp.model.dim_system(),
            apparatus: exp.model.dim_apparatus(),
        },
        system_phase: match exp.system {
            SystemState::Coherent { phase, .. } => Some(phase),
            SystemState::Fixed(_) => None,
        },
        checks,
        outcomes,
        probability_sum,
        theorems: theorems(exp, &rho)?,
    })
}

pub fn check_theorems(exp: &Experiment) -> Result<TheoremsReport, CliError> {
    let rho = exp.state()?;
    Ok(TheoremsReport {
        source: exp.source.clone(),
        tolerance: exp.tolerance,
        theorems: theorems(exp, &rho)?,
    })
}

fn sweep_point(exp: &Experiment, phi: f64, order: &[usize]) -> Result<Vec<SweepRecord>, CliError> {
    let rho = exp.state_at_phase(phi)?;
    let rho_dec = exp
        .conserved
        .decohere_system_state(&rho)
        .map_err(|e| from_core(&exp.source, e))?;
    let probabilities = outcome_probabilities(&exp.model, &rho).map_err(|e| from_core(&exp.source, e))?;
    Ok(order
        .iter()
        .map(|&k| {
            let label = &exp.model.outcomes()[k].label;
            let coherent = conditional_change(&exp.model, &rho, &exp.observable, label);
            let decohered = conditional_change(&exp.model, &rho_dec, &exp.observable, label);
            let (delta_coherent, delta_decohered, error) = match (coherent, decohered) {
                (Ok(c), Ok(d)) => (Some(c.delta), Some(d.delta), None),
                (c, d) => {
                    let msg = [c.err(), d.err()]
                        .into_iter()
                        .flatten()
                        .map(|e| e.to_string())
                        .collect::<Vec<_>>();
                    (None, None, Some(msg.join("; ")))
                }
            };
            SweepRecord {
                phi,
                outcome: label.clone(),
                probability: probabilities[k],
                delta_coherent,
                delta_decohered,
                difference: delta_coherent.zip(delta_decohered).map(|(c, d)| c - d),
                error,
            }
        })
        .collect())
}

/// `ΔO` for `ρ(φ)` and for `Φ_{L_S}(ρ(φ))` on every grid point, ordered by
/// phase index and then outcome label. Points are evaluated in parallel.
/// Engine failures at a point are recorded on that point's rows.
pub fn sweep_phase(exp: &Experiment, grid: Grid) -> Result<SweepReport, CliError> {
    if !exp.is_sweepable() {
        return Err(CliError::Parse {
            path: exp.source.clone(),
            message: "system_state has no sweepable phase; use a coherent state".into(),
        });
    }
    let mut order: Vec<usize> = (0..exp.model.outcomes().len()).collect();
    order.sort_by(|&a, &b| exp.model.outcomes()[a].label.cmp(&exp.model.outcomes()[b].label));

    let rows: Vec<Vec<SweepRecord>> = grid
        .points()
        .par_iter()
        .map(|&phi| sweep_point(exp, phi, &order))
        .collect::<Result<_, _>>()?;
    Ok(SweepReport {
        source: exp.source.clone(),
        tolerance: exp.tolerance,
        probability_floor: P_FLOOR,
        grid: GridSummary {
            from: grid.from,
            to: grid.to,
            steps: grid.steps,
        },
        records: rows.into_iter().flatten().collect(),
    })
}

/// The built-in qubit-qubit sweep, `φ ∈ [0, 2π]` on 201 points.
pub fn reproduce_fig1() -> Result<SweepReport, CliError> {
    let exp = Experiment::fig1();
    let grid = exp.sweep.expect("built-in grid");
    sweep_phase(&exp, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn fig1_zero_at_real_phases() {
        let exp = Experiment::fig1();
        let report = sweep_phase(&exp, Grid::new(0.0, PI, 3).unwrap()).unwrap();
        assert_eq!(report.records.len(), 6);
        let labels: Vec<&str> = report.records.iter().map(|r| r.outcome.as_str()).collect();
        assert_eq!(labels, ["+", "-", "+", "-", "+", "-"]);
        for r in &report.records {
            let d = r.difference.unwrap();
            if r.phi == 0.0 || r.phi == PI {
                assert!(d.abs() < 1e-9, "{r:?}");
            }
        }
        assert!(report.records[2..4].iter().any(|r| r.difference.unwrap().abs() > 1e-3));
    }

    #[test]
    fn run_report_probabilities_sum_to_one() {
        let report = run_scenario(&Experiment::fig1()).unwrap();
        assert_eq!(report.outcomes.len(), 2);
        assert!((report.probability_sum - 1.0).abs() < 1e-10);
        for name in ["conservation", "yanase", OBSERVABLE_COMMUTES] {
            assert!(report.checks[name].held, "{name}");
        }
        assert!(!report.checks[STATE_COMMUTES].held);
        let t2 = &report.theorems[1];
        assert_eq!(t2.verdict.theorem, "theorem2");
        assert_eq!(t2.status, TheoremStatus::Held);
    }

    #[test]
    fn coherent_phase_leaves_hypotheses_unsatisfied() {
        let exp = Experiment::fig1().with_phase(0.4 * PI).unwrap();
        let report = check_theorems(&exp).unwrap();
        for t in &report.theorems {
            assert_eq!(t.status, TheoremStatus::HypothesisNotSatisfied, "{}", t.verdict.theorem);
        }
        assert!(report.assess(None).is_ok());
        assert_eq!(report.assess(Some("theorem2")).unwrap_err().exit_code(), 5);
    }
}

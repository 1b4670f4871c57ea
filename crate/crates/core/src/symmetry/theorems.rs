//! Measured hypotheses and conclusions of the two decoherence-insensitivity
//! results.
//!
//! Hypotheses are never assumed. Each verdict records every hypothesis
//! residual, every equality residual, and which hypotheses an equality depends
//! on, so a broken hypothesis paired with a broken equality is reported as
//! such rather than raised as an error.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{
    check_commutes_with_system_part, check_conservation, check_cross_elements_imaginary, check_symmetric_product_state,
    check_yanase, Check, ConservedQuantity, OutcomeResidual,
};
use crate::engine::{conditional_after, conditional_before};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::quantum::{induced_povm, DensityState, EffectSet, MeasurementModel, ObservableOp};

pub const CONSERVATION: &str = "conservation";
pub const YANASE: &str = "yanase";
pub const OBSERVABLE_COMMUTES: &str = "observable_commutes";
pub const STATE_COMMUTES: &str = "state_commutes";
pub const SYMMETRIC_STATE: &str = "symmetric_state";
pub const CROSS_ELEMENTS_IMAGINARY: &str = "cross_elements_imaginary";
pub const CROSS_ELEMENTS_IMAGINARY_IDENTITY: &str = "cross_elements_imaginary_identity";

/// An equality between conditional values, evaluated on every outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EqualityCheck {
    #[serde(flatten)]
    pub check: Check,
    /// Hypotheses that together imply this equality.
    pub requires: Vec<&'static str>,
    /// Whether every hypothesis in `requires` held.
    pub implied: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremVerdict {
    pub theorem: &'static str,
    pub tolerance: f64,
    pub hypotheses: BTreeMap<&'static str, Check>,
    pub equalities: BTreeMap<&'static str, EqualityCheck>,
}

impl TheoremVerdict {
    fn new(theorem: &'static str, tolerance: f64) -> Self {
        Self {
            theorem,
            tolerance,
            hypotheses: BTreeMap::new(),
            equalities: BTreeMap::new(),
        }
    }

    fn add_equality(&mut self, name: &'static str, check: Check, requires: Vec<&'static str>) {
        let implied = requires.iter().all(|h| self.hypotheses.get(h).is_some_and(|c| c.held));
        self.equalities.insert(
            name,
            EqualityCheck {
                check,
                requires,
                implied,
            },
        );
    }

    pub fn hypotheses_held(&self) -> bool {
        self.hypotheses.values().all(|c| c.held)
    }

    pub fn equalities_held(&self) -> bool {
        self.equalities.values().all(|e| e.check.held)
    }

    /// No implied equality fails. Vacuously true when no hypothesis set holds.
    pub fn implied_equalities_hold(&self) -> bool {
        self.equalities.values().all(|e| !e.implied || e.check.held)
    }

    pub fn hypothesis(&self, name: &str) -> Option<&Check> {
        self.hypotheses.get(name)
    }

    pub fn equality(&self, name: &str) -> Option<&EqualityCheck> {
        self.equalities.get(name)
    }

    /// Largest residual among the equalities.
    pub fn max_equality_residual(&self) -> f64 {
        self.equalities.values().map(|e| e.check.residual).fold(0.0, f64::max)
    }
}

/// A measurement model and its POVM, which the before values are read from.
struct Setting<'a> {
    model: &'a MeasurementModel,
    povm: EffectSet,
}

impl<'a> Setting<'a> {
    fn new(model: &'a MeasurementModel) -> Result<Self> {
        Ok(Self {
            model,
            povm: induced_povm(model)?,
        })
    }
}

#[derive(Clone, Copy)]
enum Value {
    Before,
    After,
}

fn evaluate(
    value: Value,
    setting: &Setting,
    state: &DensityState,
    obs: &ObservableOp,
    label: &str,
) -> Result<Option<f64>> {
    let r = match value {
        Value::Before => conditional_before(&setting.povm, state, obs, label),
        Value::After => conditional_after(setting.model, state, obs, label),
    };
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::ZeroProbabilityOutcome { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Spread `max − min` of one conditional value across `(setting, state)`
/// combinations, per outcome. Outcomes that are below the probability floor
/// in any combination are skipped.
fn chain(value: Value, members: &[(&Setting, &DensityState)], observable: &ObservableOp, tol: f64) -> Result<Check> {
    let outcomes = members[0].0.model.outcomes();
    let mut per_outcome = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        let mut values = Vec::with_capacity(members.len());
        for (setting, state) in members {
            values.push(evaluate(value, setting, state, observable, &outcome.label)?);
        }
        let residual = values.iter().copied().collect::<Option<Vec<f64>>>().map(|vs| {
            let max = vs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = vs.iter().copied().fold(f64::INFINITY, f64::min);
            max - min
        });
        per_outcome.push(OutcomeResidual {
            outcome: outcome.label.clone(),
            residual,
        });
    }
    Ok(Check::from_outcomes(per_outcome, tol))
}

fn common_hypotheses(
    verdict: &mut TheoremVerdict,
    model: &MeasurementModel,
    observable: &ObservableOp,
    q: &ConservedQuantity,
    tol: f64,
) -> Result<()> {
    verdict
        .hypotheses
        .insert(CONSERVATION, check_conservation(model, q, tol)?);
    verdict.hypotheses.insert(YANASE, check_yanase(model, q, tol)?);
    verdict.hypotheses.insert(
        OBSERVABLE_COMMUTES,
        check_commutes_with_system_part(observable.matrix(), q, tol)?,
    );
    Ok(())
}

/// Coherence of the apparatus state (given a commuting system state), and
/// coherence of the system state (given a decohered apparatus state).
///
/// With `ϱ₂ = Φ_{L_A}(ϱ₁)`:
/// * `system_commutes.*`: values for `(ρ, ϱ₁)` and `(ρ, ϱ₂)` agree;
///   requires `[ρ, L_S] = 0` in addition to the common hypotheses.
/// * `ancilla_commutes.*`: values for `(ρ, ϱ₂)` and `(Φ_{L_S}(ρ), ϱ₂)` agree.
pub fn verify_theorem1(
    model: &MeasurementModel,
    state: &DensityState,
    observable: &ObservableOp,
    q: &ConservedQuantity,
    tol: f64,
) -> Result<TheoremVerdict> {
    let mut verdict = TheoremVerdict::new("theorem1", tol);
    common_hypotheses(&mut verdict, model, observable, q, tol)?;
    verdict
        .hypotheses
        .insert(STATE_COMMUTES, check_commutes_with_system_part(state.matrix(), q, tol)?);

    let decohered_model = model.with_apparatus_state(q.decohere_apparatus_state(model.apparatus_state())?)?;
    let decohered_state = q.decohere_system_state(state)?;
    let m1 = Setting::new(model)?;
    let m2 = Setting::new(&decohered_model)?;

    let apparatus_members = [(&m1, state), (&m2, state)];
    let system_members = [(&m2, state), (&m2, &decohered_state)];
    let base = vec![CONSERVATION, YANASE, OBSERVABLE_COMMUTES];
    let mut with_state = base.clone();
    with_state.push(STATE_COMMUTES);

    verdict.add_equality(
        "system_commutes.before",
        chain(Value::Before, &apparatus_members, observable, tol)?,
        with_state.clone(),
    );
    verdict.add_equality(
        "system_commutes.after",
        chain(Value::After, &apparatus_members, observable, tol)?,
        with_state,
    );
    verdict.add_equality(
        "ancilla_commutes.before",
        chain(Value::Before, &system_members, observable, tol)?,
        base.clone(),
    );
    verdict.add_equality(
        "ancilla_commutes.after",
        chain(Value::After, &system_members, observable, tol)?,
        base,
    );
    Ok(verdict)
}

/// Joint insensitivity to coherence of both states when `ρ⊗ϱᵢ` is symmetric
/// in the conserved eigenbasis and the relevant cross matrix elements are
/// purely imaginary.
///
/// Each chain compares the four combinations `{ρ, Φ_{L_S}(ρ)} × {ϱ₁, ϱ₂}`.
/// The cross-element condition is checked for `O_S` and for `1_S`; the
/// latter carries the outcome probabilities.
pub fn verify_theorem2(
    model: &MeasurementModel,
    state: &DensityState,
    observable: &ObservableOp,
    q: &ConservedQuantity,
    tol: f64,
) -> Result<TheoremVerdict> {
    let mut verdict = TheoremVerdict::new("theorem2", tol);
    common_hypotheses(&mut verdict, model, observable, q, tol)?;

    let apparatus_decohered = q.decohere_apparatus_state(model.apparatus_state())?;
    let sym1 = check_symmetric_product_state(state, model.apparatus_state(), q, tol)?;
    let sym2 = check_symmetric_product_state(state, &apparatus_decohered, q, tol)?;
    verdict
        .hypotheses
        .insert(SYMMETRIC_STATE, Check::new(sym1.residual.max(sym2.residual), tol));
    verdict.hypotheses.insert(
        CROSS_ELEMENTS_IMAGINARY,
        check_cross_elements_imaginary(model, observable.matrix(), q, tol)?,
    );
    verdict.hypotheses.insert(
        CROSS_ELEMENTS_IMAGINARY_IDENTITY,
        check_cross_elements_imaginary(model, &ComplexMatrix::identity(model.dim_system()), q, tol)?,
    );

    let decohered_model = model.with_apparatus_state(apparatus_decohered)?;
    let decohered_state = q.decohere_system_state(state)?;
    let m1 = Setting::new(model)?;
    let m2 = Setting::new(&decohered_model)?;
    let members = [
        (&m1, state),
        (&m2, state),
        (&m1, &decohered_state),
        (&m2, &decohered_state),
    ];
    let requires = vec![
        CONSERVATION,
        YANASE,
        OBSERVABLE_COMMUTES,
        SYMMETRIC_STATE,
        CROSS_ELEMENTS_IMAGINARY,
        CROSS_ELEMENTS_IMAGINARY_IDENTITY,
    ];
    verdict.add_equality(
        "symmetric.before",
        chain(Value::Before, &members, observable, tol)?,
        requires.clone(),
    );
    verdict.add_equality(
        "symmetric.after",
        chain(Value::After, &members, observable, tol)?,
        requires,
    );
    Ok(verdict)
}

//! Instruments and outcome-conditioned expectation values.
//!
//! For a model `(ϱ, U, Z_A)` and outcome `x`:
//!
//! ```text
//! I_x(A)        = tr_A[(1⊗P^x) U (A⊗ϱ) U†]
//! p(x)          = tr[I_x(ρ)]
//! ⟨O⟩_after(x)  = tr[O I_x(ρ)] / p(x)
//! ⟨O⟩_before(x) = Re tr[M(x) O ρ] / p(x)
//! ΔO(x)         = ⟨O⟩_after(x) − ⟨O⟩_before(x)
//! ```
//!
//! Conditional values are undefined for outcomes with `p(x) ≤ P_FLOOR`; those
//! return [`Error::ZeroProbabilityOutcome`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{kron, partial_trace, ComplexMatrix, Subsystem, C64};
use crate::quantum::{born_probability, DensityState, EffectSet, MeasurementModel, ObservableOp};

pub const P_FLOOR: f64 = 1e-12;

/// Conditional before/after values of one outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionalReport {
    pub outcome: String,
    pub probability: f64,
    pub before: f64,
    pub after: f64,
    pub delta: f64,
    /// `Im tr[M(x) O ρ] / p(x)`; diagnostic only, never part of `delta`.
    pub weak_value_imag: f64,
}

fn outcome_index(model: &MeasurementModel, outcome: &str) -> Result<usize> {
    model
        .pointer()
        .index_of(outcome)
        .ok_or_else(|| Error::UnknownOutcome(outcome.to_string()))
}

fn check_system_operand(model: &MeasurementModel, operand: &ComplexMatrix) -> Result<()> {
    let ds = model.dim_system();
    if operand.shape() != (ds, ds) {
        return Err(crate::linalg::LinalgError::DimensionMismatch {
            expected: format!("{ds}x{ds} system operator"),
            found: format!("{}x{}", operand.rows(), operand.cols()),
        }
        .into());
    }
    Ok(())
}

fn instrument_at(model: &MeasurementModel, operand: &ComplexMatrix, index: usize) -> Result<ComplexMatrix> {
    check_system_operand(model, operand)?;
    let joint = model
        .unitary()
        .matmul(&kron(operand, model.apparatus_state().matrix()))
        .matmul(model.unitary_adjoint());
    let projected = model.lifted_projector(index).matmul(&joint);
    Ok(partial_trace(
        &projected,
        model.dim_system(),
        model.dim_apparatus(),
        Subsystem::Apparatus,
    )?)
}

/// `I_x(A) = tr_A[(1⊗P^x) U (A⊗ϱ) U†]`, linear in `A`. `A` need not be Hermitian.
pub fn apply_instrument(model: &MeasurementModel, operand: &ComplexMatrix, outcome: &str) -> Result<ComplexMatrix> {
    instrument_at(model, operand, outcome_index(model, outcome)?)
}

fn probability_at(model: &MeasurementModel, state: &DensityState, index: usize) -> Result<f64> {
    Ok(instrument_at(model, state.matrix(), index)?.trace().re.clamp(0.0, 1.0))
}

/// `p(x) = tr[I_x(ρ)]`, clamped to `[0, 1]`.
pub fn outcome_probability(model: &MeasurementModel, state: &DensityState, outcome: &str) -> Result<f64> {
    probability_at(model, state, outcome_index(model, outcome)?)
}

/// Probabilities of every outcome, in pointer order.
pub fn outcome_probabilities(model: &MeasurementModel, state: &DensityState) -> Result<Vec<f64>> {
    (0..model.pointer().len())
        .map(|k| probability_at(model, state, k))
        .collect()
}

fn require_support(outcome: &str, probability: f64) -> Result<()> {
    if probability <= P_FLOOR {
        Err(Error::ZeroProbabilityOutcome {
            outcome: outcome.to_string(),
            probability,
            floor: P_FLOOR,
        })
    } else {
        Ok(())
    }
}

/// `⟨O⟩_after = tr[O ρ(x)]` with `ρ(x) = I_x(ρ)/p(x)`.
pub fn conditional_after(
    model: &MeasurementModel,
    state: &DensityState,
    observable: &ObservableOp,
    outcome: &str,
) -> Result<f64> {
    let post = apply_instrument(model, state.matrix(), outcome)?;
    let p = post.trace().re.clamp(0.0, 1.0);
    require_support(outcome, p)?;
    Ok(observable.matrix().trace_product(&post).re / p)
}

/// Generalised weak value `tr[M(x) O ρ] / p(x)` from the POVM.
pub fn generalized_weak_value(
    effects: &EffectSet,
    state: &DensityState,
    observable: &ObservableOp,
    outcome: &str,
) -> Result<C64> {
    let effect = effects
        .effect(outcome)
        .ok_or_else(|| Error::UnknownOutcome(outcome.to_string()))?;
    let p = born_probability(state, effect);
    require_support(outcome, p)?;
    let o_rho = observable.matrix().matmul(state.matrix());
    Ok(effect.trace_product(&o_rho) / p)
}

/// `⟨O⟩_before = Re tr[M(x) O ρ] / p(x)`, evaluated on the POVM.
pub fn conditional_before(
    effects: &EffectSet,
    state: &DensityState,
    observable: &ObservableOp,
    outcome: &str,
) -> Result<f64> {
    Ok(generalized_weak_value(effects, state, observable, outcome)?.re)
}

/// `⟨O⟩_before = tr[(1⊗P^x) U ((Oρ + ρO)/2 ⊗ ϱ) U†] / p(x)`, evaluated on the model.
pub fn conditional_before_model(
    model: &MeasurementModel,
    state: &DensityState,
    observable: &ObservableOp,
    outcome: &str,
) -> Result<f64> {
    let index = outcome_index(model, outcome)?;
    let p = probability_at(model, state, index)?;
    require_support(outcome, p)?;
    let o = observable.matrix();
    let rho = state.matrix();
    let sym = (&o.matmul(rho) + &rho.matmul(o)).scale_real(0.5);
    Ok(instrument_at(model, &sym, index)?.trace().re / p)
}

/// Before/after values and their difference for one outcome.
pub fn conditional_change(
    model: &MeasurementModel,
    state: &DensityState,
    observable: &ObservableOp,
    outcome: &str,
) -> Result<ConditionalReport> {
    let index = outcome_index(model, outcome)?;
    let post = instrument_at(model, state.matrix(), index)?;
    let probability = post.trace().re.clamp(0.0, 1.0);
    require_support(outcome, probability)?;
    let after = observable.matrix().trace_product(&post).re / probability;
    let before = conditional_before_model(model, state, observable, outcome)?;
    let weak = instrument_at(model, &observable.matrix().matmul(state.matrix()), index)?.trace() / probability;
    Ok(ConditionalReport {
        outcome: outcome.to_string(),
        probability,
        before,
        after,
        delta: after - before,
        weak_value_imag: weak.im,
    })
}

/// One entry per outcome, in pointer order; zero-probability outcomes are
/// reported as errors without stopping the others.
pub fn conditional_reports(
    model: &MeasurementModel,
    state: &DensityState,
    observable: &ObservableOp,
) -> Vec<Result<ConditionalReport>> {
    model
        .outcomes()
        .iter()
        .map(|o| conditional_change(model, state, observable, &o.label))
        .collect()
}

/// `Σ_x p(x) ⟨O⟩_before(x)`; outcomes below the floor contribute nothing.
pub fn average_before(model: &MeasurementModel, state: &DensityState, observable: &ObservableOp) -> Result<f64> {
    let mut total = 0.0;
    for outcome in model.outcomes() {
        let p = outcome_probability(model, state, &outcome.label)?;
        if p > P_FLOOR {
            total += p * conditional_before_model(model, state, observable, &outcome.label)?;
        }
    }
    Ok(total)
}

/// `Σ_x p(x) ⟨O⟩_after(x)`; outcomes below the floor contribute nothing.
pub fn average_after(model: &MeasurementModel, state: &DensityState, observable: &ObservableOp) -> Result<f64> {
    let mut total = 0.0;
    for outcome in model.outcomes() {
        let p = outcome_probability(model, state, &outcome.label)?;
        if p > P_FLOOR {
            total += p * conditional_after(model, state, observable, &outcome.label)?;
        }
    }
    Ok(total)
}

/// `tr[(O⊗1) U (ρ⊗ϱ) U†]`
pub fn heisenberg_expectation(model: &MeasurementModel, state: &DensityState, observable: &ObservableOp) -> f64 {
    let joint = model
        .unitary()
        .matmul(&kron(state.matrix(), model.apparatus_state().matrix()))
        .matmul(model.unitary_adjoint());
    let lifted = kron(observable.matrix(), &ComplexMatrix::identity(model.dim_apparatus()));
    lifted.trace_product(&joint).re
}

//! Validated states, observables, pointer measurements, effects and
//! measurement models.
//!
//! Every type is checked once at construction; a [`Violation`] names the first
//! invariant that fails together with its measured residual. Values are
//! immutable afterwards.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::error::Result;
use crate::linalg::{self, kron, partial_trace, ComplexMatrix, Subsystem, C64};

/// Tolerance used by the plain constructors.
pub const VALIDATION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Invariant {
    Shape,
    Hermiticity,
    Trace,
    Positivity,
    Idempotence,
    Orthogonality,
    Completeness,
    Unitarity,
    Labels,
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Invariant::Shape => "shape",
            Invariant::Hermiticity => "hermiticity",
            Invariant::Trace => "trace",
            Invariant::Positivity => "positivity",
            Invariant::Idempotence => "idempotence",
            Invariant::Orthogonality => "orthogonality",
            Invariant::Completeness => "completeness",
            Invariant::Unitarity => "unitarity",
            Invariant::Labels => "labels",
        };
        f.write_str(name)
    }
}

/// First failed invariant of a candidate object.
#[derive(Clone, Debug, PartialEq, Error, Serialize)]
#[error("{object}: {invariant} violated (residual {residual:.3e}, tolerance {tolerance:.1e}){}", detail_suffix(.detail))]
pub struct Violation {
    pub object: &'static str,
    pub invariant: Invariant,
    pub residual: f64,
    pub tolerance: f64,
    pub detail: Option<String>,
}

fn detail_suffix(detail: &Option<String>) -> String {
    detail.as_ref().map(|d| format!(": {d}")).unwrap_or_default()
}

impl Violation {
    fn new(object: &'static str, invariant: Invariant, residual: f64, tolerance: f64) -> Self {
        Self {
            object,
            invariant,
            residual,
            tolerance,
            detail: None,
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

fn check_square(object: &'static str, m: &ComplexMatrix, dim: Option<usize>) -> Result<(), Violation> {
    let ok = m.is_square() && dim.is_none_or(|d| m.rows() == d);
    if ok {
        Ok(())
    } else {
        let expected = dim.map_or("square".to_string(), |d| format!("{d}x{d}"));
        Err(
            Violation::new(object, Invariant::Shape, f64::INFINITY, 0.0).with_detail(format!(
                "expected {expected}, found {}x{}",
                m.rows(),
                m.cols()
            )),
        )
    }
}

fn check_hermitian(object: &'static str, m: &ComplexMatrix, tol: f64) -> Result<(), Violation> {
    let residual = m.hermiticity_residual();
    if residual < tol {
        Ok(())
    } else {
        Err(Violation::new(object, Invariant::Hermiticity, residual, tol))
    }
}

fn check_psd(object: &'static str, m: &ComplexMatrix, tol: f64) -> Result<(), Violation> {
    let min = linalg::eigh(&m.hermitian_part())
        .map(|e| e.values.first().copied().unwrap_or(0.0))
        .unwrap_or(f64::NEG_INFINITY);
    if min >= -tol {
        Ok(())
    } else {
        Err(Violation::new(object, Invariant::Positivity, -min, tol))
    }
}

/// Density operator: Hermitian, positive, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    matrix: ComplexMatrix,
}

impl DensityState {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, Violation> {
        Self::with_tolerance(matrix, VALIDATION_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self, Violation> {
        Self::validate(&matrix, tol)?;
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    pub fn validate(matrix: &ComplexMatrix, tol: f64) -> Result<(), Violation> {
        const NAME: &str = "density state";
        check_square(NAME, matrix, None)?;
        check_hermitian(NAME, matrix, tol)?;
        let trace_residual = (matrix.trace().re - 1.0).abs();
        if trace_residual >= tol {
            return Err(Violation::new(NAME, Invariant::Trace, trace_residual, tol)
                .with_detail(format!("trace is {:.12}", matrix.trace().re)));
        }
        check_psd(NAME, matrix, tol)
    }

    /// `|ψ⟩⟨ψ|` for a vector normalised here.
    pub fn pure(amplitudes: &[C64]) -> Result<Self, Violation> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Violation::new("pure state", Invariant::Trace, 1.0, VALIDATION_TOL)
                .with_detail("state vector has zero or non-finite norm"));
        }
        let v: Vec<C64> = amplitudes.iter().map(|a| a / norm).collect();
        Self::new(ComplexMatrix::outer(&v, &v))
    }

    /// `1/d` on a `d`-dimensional space.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// Self-adjoint operator.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableOp {
    matrix: ComplexMatrix,
}

impl ObservableOp {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, Violation> {
        Self::with_tolerance(matrix, VALIDATION_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self, Violation> {
        Self::validate(&matrix, tol)?;
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    pub fn validate(matrix: &ComplexMatrix, tol: f64) -> Result<(), Violation> {
        check_square("observable", matrix, None)?;
        check_hermitian("observable", matrix, tol)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self {
            matrix: ComplexMatrix::from_diagonal(values),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `tr[O ρ]`
    pub fn expectation(&self, state: &DensityState) -> f64 {
        self.matrix.trace_product(state.matrix()).re
    }
}

/// Outcome label `x` with an optional numerical value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub label: String,
    pub value: Option<f64>,
}

impl Outcome {
    pub fn new(label: impl Into<String>, value: Option<f64>) -> Self {
        Self {
            label: label.into(),
            value,
        }
    }

    pub fn valued(label: impl Into<String>, value: f64) -> Self {
        Self::new(label, Some(value))
    }
}

fn check_labels(object: &'static str, outcomes: &[Outcome], count: usize) -> Result<(), Violation> {
    if outcomes.is_empty() || outcomes.len() != count {
        return Err(Violation::new(object, Invariant::Labels, f64::INFINITY, 0.0)
            .with_detail(format!("{} labels for {count} operators", outcomes.len())));
    }
    for (i, o) in outcomes.iter().enumerate() {
        if outcomes[..i].iter().any(|p| p.label == o.label) {
            return Err(Violation::new(object, Invariant::Labels, f64::INFINITY, 0.0)
                .with_detail(format!("duplicate label {:?}", o.label)));
        }
    }
    Ok(())
}

fn completeness_residual(ops: &[ComplexMatrix], dim: usize) -> f64 {
    let mut total = ComplexMatrix::zeros(dim, dim);
    for op in ops {
        total += op;
    }
    total.distance(&ComplexMatrix::identity(dim))
}

/// Projection valued pointer observable `Z_A = Σ_x x P_A^x`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointerObservable {
    outcomes: Vec<Outcome>,
    projectors: Vec<ComplexMatrix>,
}

impl PointerObservable {
    pub fn new(outcomes: Vec<Outcome>, projectors: Vec<ComplexMatrix>) -> Result<Self, Violation> {
        Self::with_tolerance(outcomes, projectors, VALIDATION_TOL)
    }

    pub fn with_tolerance(outcomes: Vec<Outcome>, projectors: Vec<ComplexMatrix>, tol: f64) -> Result<Self, Violation> {
        Self::validate(&outcomes, &projectors, tol)?;
        Ok(Self {
            outcomes,
            projectors: projectors.iter().map(ComplexMatrix::hermitian_part).collect(),
        })
    }

    pub fn validate(outcomes: &[Outcome], projectors: &[ComplexMatrix], tol: f64) -> Result<(), Violation> {
        const NAME: &str = "pointer observable";
        check_labels(NAME, outcomes, projectors.len())?;
        let dim = projectors[0].rows();
        for p in projectors {
            check_square(NAME, p, Some(dim))?;
            check_hermitian(NAME, p, tol)?;
            let r = p.idempotence_residual();
            if r >= tol {
                return Err(Violation::new(NAME, Invariant::Idempotence, r, tol));
            }
        }
        for (i, p) in projectors.iter().enumerate() {
            for q in &projectors[i + 1..] {
                let r = p.matmul(q).frobenius_norm();
                if r >= tol {
                    return Err(Violation::new(NAME, Invariant::Orthogonality, r, tol));
                }
            }
        }
        let r = completeness_residual(projectors, dim);
        if r >= tol {
            return Err(Violation::new(NAME, Invariant::Completeness, r, tol));
        }
        Ok(())
    }

    /// One rank-one projector per computational basis vector, labelled by index.
    pub fn computational(dim: usize) -> Self {
        Self {
            outcomes: (0..dim).map(|k| Outcome::valued(k.to_string(), k as f64)).collect(),
            projectors: (0..dim).map(|k| ComplexMatrix::basis_projector(dim, k)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].rows()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.outcomes.iter().position(|o| o.label == label)
    }

    pub fn projector(&self, label: &str) -> Option<&ComplexMatrix> {
        self.index_of(label).map(|k| &self.projectors[k])
    }

    /// `Σ_x x P^x`, available when every outcome carries a value.
    pub fn z_operator(&self) -> Option<ComplexMatrix> {
        let mut z = ComplexMatrix::zeros(self.dim(), self.dim());
        for (o, p) in self.outcomes.iter().zip(&self.projectors) {
            z += &p.scale_real(o.value?);
        }
        Some(z)
    }
}

/// POVM: positive effects summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectSet {
    outcomes: Vec<Outcome>,
    effects: Vec<ComplexMatrix>,
}

impl EffectSet {
    pub fn new(outcomes: Vec<Outcome>, effects: Vec<ComplexMatrix>) -> Result<Self, Violation> {
        Self::with_tolerance(outcomes, effects, VALIDATION_TOL)
    }

    pub fn with_tolerance(outcomes: Vec<Outcome>, effects: Vec<ComplexMatrix>, tol: f64) -> Result<Self, Violation> {
        Self::validate(&outcomes, &effects, tol)?;
        Ok(Self {
            outcomes,
            effects: effects.iter().map(ComplexMatrix::hermitian_part).collect(),
        })
    }

    pub fn validate(outcomes: &[Outcome], effects: &[ComplexMatrix], tol: f64) -> Result<(), Violation> {
        const NAME: &str = "effect set";
        check_labels(NAME, outcomes, effects.len())?;
        let dim = effects[0].rows();
        for e in effects {
            check_square(NAME, e, Some(dim))?;
            check_hermitian(NAME, e, tol)?;
            check_psd(NAME, e, tol)?;
        }
        let r = completeness_residual(effects, dim);
        if r >= tol {
            return Err(Violation::new(NAME, Invariant::Completeness, r, tol));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.effects[0].rows()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn effect(&self, label: &str) -> Option<&ComplexMatrix> {
        self.outcomes
            .iter()
            .position(|o| o.label == label)
            .map(|k| &self.effects[k])
    }
}

/// Born rule `tr[M(x) ρ]`, clamped to `[0, 1]`.
pub fn born_probability(state: &DensityState, effect: &ComplexMatrix) -> f64 {
    effect.trace_product(state.matrix()).re.clamp(0.0, 1.0)
}

/// Measurement model `(H_A, ϱ, U, Z_A)` on `S⊗A`, with `S` the left factor.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementModel {
    dim_system: usize,
    apparatus_state: DensityState,
    unitary: ComplexMatrix,
    unitary_adjoint: ComplexMatrix,
    pointer: PointerObservable,
}

impl MeasurementModel {
    pub fn new(
        dim_system: usize,
        apparatus_state: DensityState,
        unitary: ComplexMatrix,
        pointer: PointerObservable,
    ) -> Result<Self, Violation> {
        Self::with_tolerance(dim_system, apparatus_state, unitary, pointer, VALIDATION_TOL)
    }

    pub fn with_tolerance(
        dim_system: usize,
        apparatus_state: DensityState,
        unitary: ComplexMatrix,
        pointer: PointerObservable,
        tol: f64,
    ) -> Result<Self, Violation> {
        const NAME: &str = "measurement model";
        let dim_apparatus = apparatus_state.dim();
        if pointer.dim() != dim_apparatus {
            return Err(
                Violation::new(NAME, Invariant::Shape, f64::INFINITY, 0.0).with_detail(format!(
                    "pointer acts on dimension {}, apparatus state on {dim_apparatus}",
                    pointer.dim()
                )),
            );
        }
        check_square(NAME, &unitary, Some(dim_system * dim_apparatus))?;
        let r = unitary.unitarity_residual();
        if r >= tol {
            return Err(Violation::new(NAME, Invariant::Unitarity, r, tol));
        }
        Ok(Self {
            dim_system,
            unitary_adjoint: unitary.adjoint(),
            apparatus_state,
            unitary,
            pointer,
        })
    }

    /// Same unitary and pointer with a different apparatus state.
    pub fn with_apparatus_state(&self, apparatus_state: DensityState) -> Result<Self, Violation> {
        if apparatus_state.dim() != self.dim_apparatus() {
            return Err(
                Violation::new("measurement model", Invariant::Shape, f64::INFINITY, 0.0)
                    .with_detail("replacement apparatus state has the wrong dimension"),
            );
        }
        Ok(Self {
            apparatus_state,
            ..self.clone()
        })
    }

    pub fn dim_system(&self) -> usize {
        self.dim_system
    }

    pub fn dim_apparatus(&self) -> usize {
        self.apparatus_state.dim()
    }

    pub fn dim_total(&self) -> usize {
        self.dim_system * self.dim_apparatus()
    }

    pub fn apparatus_state(&self) -> &DensityState {
        &self.apparatus_state
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn unitary_adjoint(&self) -> &ComplexMatrix {
        &self.unitary_adjoint
    }

    pub fn pointer(&self) -> &PointerObservable {
        &self.pointer
    }

    pub fn outcomes(&self) -> &[Outcome] {
        self.pointer.outcomes()
    }

    /// `1_S ⊗ P_A^x`
    pub fn lifted_projector(&self, index: usize) -> ComplexMatrix {
        kron(
            &ComplexMatrix::identity(self.dim_system),
            &self.pointer.projectors()[index],
        )
    }

    /// Heisenberg-picture pointer effect `U†(A ⊗ P_A^x)U` for a system operator `A`.
    pub fn heisenberg_pointer(&self, system_op: &ComplexMatrix, index: usize) -> ComplexMatrix {
        let lifted = kron(system_op, &self.pointer.projectors()[index]);
        self.unitary_adjoint.matmul(&lifted).matmul(&self.unitary)
    }
}

/// POVM induced by a measurement model:
/// `M(x) = tr_A[(1⊗ϱ^{1/2}) U†(1⊗P^x)U (1⊗ϱ^{1/2})]`.
pub fn induced_povm(model: &MeasurementModel) -> Result<EffectSet> {
    let ds = model.dim_system();
    let da = model.dim_apparatus();
    let sqrt_state = kron(
        &ComplexMatrix::identity(ds),
        &linalg::psd_sqrt(model.apparatus_state().matrix())?,
    );
    let effects = (0..model.pointer().len())
        .map(|k| {
            let heis = model.heisenberg_pointer(&ComplexMatrix::identity(ds), k);
            let sandwiched = sqrt_state.matmul(&heis).matmul(&sqrt_state);
            Ok(partial_trace(&sandwiched, ds, da, Subsystem::Apparatus)?.hermitian_part())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EffectSet::new(model.outcomes().to_vec(), effects)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};

    fn ket(k: usize, n: usize) -> Vec<C64> {
        (0..n).map(|i| if i == k { ONE } else { ZERO }).collect()
    }

    #[test]
    fn born_rule_basics() {
        let zero = DensityState::pure(&ket(0, 2)).unwrap();
        assert_eq!(born_probability(&zero, &ComplexMatrix::identity(2)), 1.0);
        assert_eq!(born_probability(&zero, &ComplexMatrix::basis_projector(2, 1)), 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DensityState::pure(&[C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap();
        assert!((born_probability(&plus, &ComplexMatrix::basis_projector(2, 0)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn density_state_violations() {
        let half = ComplexMatrix::from_diagonal(&[0.25, 0.25]);
        let v = DensityState::new(half).unwrap_err();
        assert_eq!(v.invariant, Invariant::Trace);
        assert!((v.residual - 0.5).abs() < 1e-15);

        let negative = ComplexMatrix::from_diagonal(&[1.5, -0.5]);
        assert_eq!(
            DensityState::new(negative).unwrap_err().invariant,
            Invariant::Positivity
        );

        let mut skew = ComplexMatrix::from_diagonal(&[0.5, 0.5]);
        skew[(0, 1)] = C64::new(0.1, 0.0);
        assert_eq!(DensityState::new(skew).unwrap_err().invariant, Invariant::Hermiticity);

        let rect = ComplexMatrix::zeros(2, 3);
        assert_eq!(DensityState::new(rect).unwrap_err().invariant, Invariant::Shape);
    }

    #[test]
    fn observable_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let v = ObservableOp::new(m).unwrap_err();
        assert_eq!(v.invariant, Invariant::Hermiticity);
        assert!(v.to_string().contains("hermiticity"));
    }

    #[test]
    fn pointer_violations() {
        let p0 = ComplexMatrix::basis_projector(2, 0);
        let p1 = ComplexMatrix::basis_projector(2, 1);
        let labels = vec![Outcome::valued("a", 1.0), Outcome::valued("b", -1.0)];
        assert!(PointerObservable::new(labels.clone(), vec![p0.clone(), p1.clone()]).is_ok());

        let v = PointerObservable::new(labels.clone(), vec![p0.clone(), p0.clone()]).unwrap_err();
        assert_eq!(v.invariant, Invariant::Orthogonality);

        let v = PointerObservable::new(vec![Outcome::valued("a", 1.0)], vec![p0.clone()]).unwrap_err();
        assert_eq!(v.invariant, Invariant::Completeness);

        let v = PointerObservable::new(labels.clone(), vec![p0.scale_real(0.5), p1.clone()]).unwrap_err();
        assert_eq!(v.invariant, Invariant::Idempotence);

        let dup = vec![Outcome::valued("a", 1.0), Outcome::valued("a", -1.0)];
        assert_eq!(
            PointerObservable::new(dup, vec![p0, p1]).unwrap_err().invariant,
            Invariant::Labels
        );
    }

    #[test]
    fn z_operator_requires_values() {
        let p = PointerObservable::computational(3);
        assert_eq!(p.z_operator().unwrap(), ComplexMatrix::from_diagonal(&[0.0, 1.0, 2.0]));
        let unlabeled = PointerObservable::new(
            vec![Outcome::new("a", None), Outcome::new("b", None)],
            vec![
                ComplexMatrix::basis_projector(2, 0),
                ComplexMatrix::basis_projector(2, 1),
            ],
        )
        .unwrap();
        assert!(unlabeled.z_operator().is_none());
    }

    #[test]
    fn trivial_premeasurement_gives_scalar_effects() {
        let apparatus = DensityState::new(ComplexMatrix::from_diagonal(&[0.3, 0.7])).unwrap();
        let model = MeasurementModel::new(
            2,
            apparatus,
            ComplexMatrix::identity(4),
            PointerObservable::computational(2),
        )
        .unwrap();
        let povm = induced_povm(&model).unwrap();
        for (k, w) in [0.3, 0.7].into_iter().enumerate() {
            assert!(povm.effects()[k].distance(&ComplexMatrix::identity(2).scale_real(w)) < 1e-14);
        }
    }

    #[test]
    fn model_checks_unitarity_and_dimensions() {
        let apparatus = DensityState::maximally_mixed(2);
        let v = MeasurementModel::new(
            2,
            apparatus.clone(),
            ComplexMatrix::identity(4).scale_real(2.0),
            PointerObservable::computational(2),
        )
        .unwrap_err();
        assert_eq!(v.invariant, Invariant::Unitarity);
        let v = MeasurementModel::new(
            2,
            apparatus,
            ComplexMatrix::identity(4),
            PointerObservable::computational(3),
        )
        .unwrap_err();
        assert_eq!(v.invariant, Invariant::Shape);
    }
}

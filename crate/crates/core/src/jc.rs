//! Jaynes-Cummings measurement models.
//!
//! The system `S` (dimension `d_S`) couples to the apparatus `A` (dimension
//! `d_A`) through `H_I = σ_S^+ ⊗ σ_A^− + σ_S^− ⊗ σ_A^+` for a dimensionless
//! time `θ`, so `U = e^{−iθH_I}`. Basis vectors are `|s, a⟩` with index
//! `s·d_A + a`; `|k⟩` is the state with `k` excitations.
//!
//! Ladder operators are truncated at `k ≤ d − 2`, so `σ^+` maps the top
//! level to zero.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{self, kron, ComplexMatrix, C64};
use crate::quantum::{DensityState, MeasurementModel, ObservableOp, Outcome, PointerObservable};
use crate::symmetry::ConservedQuantity;

fn require_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidSpec(format!(
            "ladder dimension must be at least 2, got {dim}"
        )));
    }
    Ok(())
}

/// `σ^+ = Σ_{k=0}^{d−2} √(k+1) |k+1⟩⟨k|`
pub fn ladder_raise(dim: usize) -> Result<ComplexMatrix> {
    require_dim(dim)?;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for k in 0..dim - 1 {
        m[(k + 1, k)] = C64::new(((k + 1) as f64).sqrt(), 0.0);
    }
    Ok(m)
}

/// `σ^− = (σ^+)†`
pub fn ladder_lower(dim: usize) -> Result<ComplexMatrix> {
    Ok(ladder_raise(dim)?.adjoint())
}

/// `N = Σ_k k |k⟩⟨k|`
pub fn number_operator(dim: usize) -> ObservableOp {
    ObservableOp::diagonal(&(0..dim).map(|k| k as f64).collect::<Vec<_>>())
}

/// `N_S ⊗ 1 + 1 ⊗ N_A`
pub fn number_conservation(dim_system: usize, dim_apparatus: usize) -> Result<ConservedQuantity> {
    ConservedQuantity::new(number_operator(dim_system), number_operator(dim_apparatus))
}

/// `H_I = σ_S^+ ⊗ σ_A^− + σ_S^− ⊗ σ_A^+`
pub fn jc_hamiltonian(dim_system: usize, dim_apparatus: usize) -> Result<ObservableOp> {
    let sp = ladder_raise(dim_system)?;
    let ap = ladder_raise(dim_apparatus)?;
    let h = &kron(&sp, &ap.adjoint()) + &kron(&sp.adjoint(), &ap);
    Ok(ObservableOp::new(h)?)
}

/// A labelled group of apparatus number states forming one pointer projector.
#[derive(Clone, Debug, PartialEq)]
pub struct PointerCell {
    pub outcome: Outcome,
    pub levels: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JcModelSpec {
    pub dim_system: usize,
    pub dim_apparatus: usize,
    pub theta: f64,
    pub pointer: Vec<PointerCell>,
}

impl JcModelSpec {
    /// One pointer outcome per apparatus number state, labelled by the number.
    pub fn new(dim_system: usize, dim_apparatus: usize, theta: f64) -> Self {
        let pointer = (0..dim_apparatus)
            .map(|k| PointerCell {
                outcome: Outcome::valued(k.to_string(), k as f64),
                levels: vec![k],
            })
            .collect();
        Self {
            dim_system,
            dim_apparatus,
            theta,
            pointer,
        }
    }

    pub fn with_pointer(mut self, pointer: Vec<PointerCell>) -> Self {
        self.pointer = pointer;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim_system < 2 || self.dim_apparatus < 2 {
            return Err(Error::InvalidSpec(format!(
                "Jaynes-Cummings dimensions must be at least 2, got {}x{}",
                self.dim_system, self.dim_apparatus
            )));
        }
        if !self.theta.is_finite() {
            return Err(Error::InvalidSpec(format!("theta must be finite, got {}", self.theta)));
        }
        if let Some(bad) = self
            .pointer
            .iter()
            .flat_map(|c| &c.levels)
            .find(|&&l| l >= self.dim_apparatus)
        {
            return Err(Error::InvalidSpec(format!(
                "pointer level {bad} outside the {}-dimensional apparatus",
                self.dim_apparatus
            )));
        }
        Ok(())
    }

    /// Number-diagonal pointer observable. Overlapping or missing levels are
    /// reported by the pointer validation.
    pub fn pointer_observable(&self) -> Result<PointerObservable> {
        self.validate()?;
        let projectors = self
            .pointer
            .iter()
            .map(|cell| {
                let mut p = ComplexMatrix::zeros(self.dim_apparatus, self.dim_apparatus);
                for &l in &cell.levels {
                    p[(l, l)] += C64::new(1.0, 0.0);
                }
                p
            })
            .collect();
        let outcomes = self.pointer.iter().map(|c| c.outcome.clone()).collect();
        Ok(PointerObservable::new(outcomes, projectors)?)
    }

    /// `e^{−iθH_I}` by spectral exponentiation; any `d_S ≥ 2`.
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        self.validate()?;
        let h = jc_hamiltonian(self.dim_system, self.dim_apparatus)?;
        Ok(linalg::unitary_from_generator(h.matrix(), self.theta)?)
    }

    pub fn build(&self, apparatus_state: DensityState) -> Result<MeasurementModel> {
        if apparatus_state.dim() != self.dim_apparatus {
            return Err(Error::InvalidSpec(format!(
                "apparatus state has dimension {}, model needs {}",
                apparatus_state.dim(),
                self.dim_apparatus
            )));
        }
        Ok(MeasurementModel::new(
            self.dim_system,
            apparatus_state,
            self.unitary()?,
            self.pointer_observable()?,
        )?)
    }
}

/// Closed-form unitary for a qubit system.
///
/// On each span `{|0, l⟩, |1, l−1⟩}`, `1 ≤ l ≤ d_A − 1`, the block is
/// `cos(θ√l)·1 − i·sin(θ√l)·σ_x`; `|0, 0⟩` and `|1, d_A−1⟩` are left fixed.
pub fn jc_unitary_closed_form(spec: &JcModelSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    if spec.dim_system != 2 {
        return Err(Error::InvalidSpec(format!(
            "closed-form unitary needs a qubit system, got dimension {}",
            spec.dim_system
        )));
    }
    let da = spec.dim_apparatus;
    let idx = |s: usize, a: usize| s * da + a;
    let mut u = ComplexMatrix::zeros(2 * da, 2 * da);
    u[(idx(0, 0), idx(0, 0))] = C64::new(1.0, 0.0);
    u[(idx(1, da - 1), idx(1, da - 1))] = C64::new(1.0, 0.0);
    for l in 1..da {
        let angle = spec.theta * (l as f64).sqrt();
        let diag = C64::new(angle.cos(), 0.0);
        let off = C64::new(0.0, -angle.sin());
        let (a, b) = (idx(0, l), idx(1, l - 1));
        u[(a, a)] = diag;
        u[(b, b)] = diag;
        u[(a, b)] = off;
        u[(b, a)] = off;
    }
    Ok(u)
}

/// Qubit state `cos(θ/2)|1⟩ + e^{iφ} sin(θ/2)|0⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitCoherentState {
    pub polar: f64,
    pub phase: f64,
}

impl QubitCoherentState {
    pub fn amplitudes(&self) -> [C64; 2] {
        let half = self.polar / 2.0;
        [C64::from_polar(half.sin(), self.phase), C64::new(half.cos(), 0.0)]
    }
}

pub fn qubit_coherent_state(s: QubitCoherentState) -> Result<DensityState> {
    if !(s.polar.is_finite() && s.phase.is_finite()) {
        return Err(Error::InvalidSpec("coherent state angles must be finite".into()));
    }
    Ok(DensityState::pure(&s.amplitudes())?)
}

/// `|1⟩⟨1| − |0⟩⟨0|` on a qubit.
pub fn excitation_sign() -> ObservableOp {
    ObservableOp::diagonal(&[-1.0, 1.0])
}

/// Qubit-qubit sweep setup: `θ = π/3`, apparatus in `cos(π/6)|1⟩ + sin(π/6)|0⟩`,
/// system in `cos(π/8)|1⟩ + e^{iφ} sin(π/8)|0⟩`, pointer and observable
/// `|1⟩⟨1| − |0⟩⟨0|` with outcomes `+` and `−` (written `-`), conserved
/// quantity the total excitation number.
#[derive(Clone, Debug)]
pub struct Fig1Setup {
    pub model: MeasurementModel,
    pub observable: ObservableOp,
    pub conserved: ConservedQuantity,
    pub system_polar: f64,
}

impl Fig1Setup {
    pub const THETA: f64 = PI / 3.0;
    pub const APPARATUS_POLAR: f64 = PI / 3.0;
    pub const SYSTEM_POLAR: f64 = PI / 4.0;

    pub fn spec() -> JcModelSpec {
        JcModelSpec::new(2, 2, Self::THETA).with_pointer(vec![
            PointerCell {
                outcome: Outcome::valued("+", 1.0),
                levels: vec![1],
            },
            PointerCell {
                outcome: Outcome::valued("-", -1.0),
                levels: vec![0],
            },
        ])
    }

    pub fn system_state(&self, phase: f64) -> Result<DensityState> {
        qubit_coherent_state(QubitCoherentState {
            polar: self.system_polar,
            phase,
        })
    }
}

pub fn build_fig1_model() -> Result<Fig1Setup> {
    let apparatus = qubit_coherent_state(QubitCoherentState {
        polar: Fig1Setup::APPARATUS_POLAR,
        phase: 0.0,
    })?;
    Ok(Fig1Setup {
        model: Fig1Setup::spec().build(apparatus)?,
        observable: excitation_sign(),
        conserved: number_conservation(2, 2)?,
        system_polar: Fig1Setup::SYSTEM_POLAR,
    })
}

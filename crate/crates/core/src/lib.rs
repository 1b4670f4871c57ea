//! Finite-dimensional measurement models and the conditional expectation
//! values they assign to system observables.
//!
//! * [`linalg`]: dense complex matrices, partial traces, Jacobi
//!   eigendecomposition and spectral matrix functions.
//! * [`quantum`]: validated states, observables, pointer PVMs, POVMs and
//!   measurement models `(ϱ, U, Z_A)`.
//! * [`engine`]: instruments, outcome probabilities, before/after
//!   conditional values and their averages.
//! * [`symmetry`]: decoherence maps, conservation-law predicates, theorem
//!   verdicts and the block-decomposed evaluation path.
//! * [`jc`]: Jaynes-Cummings models and the qubit-qubit sweep setup.
//! * [`random`]: seeded instance generators.

pub mod engine;
pub mod error;
pub mod jc;
pub mod linalg;
pub mod quantum;
pub mod random;
pub mod symmetry;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, SpectralDecomposition, C64};
pub use quantum::{DensityState, EffectSet, MeasurementModel, ObservableOp, Outcome, PointerObservable, Violation};
pub use symmetry::{ConservedQuantity, TheoremVerdict};

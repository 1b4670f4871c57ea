//! Seeded random instances: states, unitaries, measurement models, and
//! models that satisfy a conservation law by construction.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::{self, ComplexMatrix, C64};
use crate::quantum::{DensityState, MeasurementModel, ObservableOp, Outcome, PointerObservable};
use crate::symmetry::{decohere_spectral, ConservedQuantity};

pub type InstanceRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    gaussian_matrix(n, n, rng).hermitian_part()
}

pub fn unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let h = hermitian(n, rng);
    linalg::unitary_from_generator(&h, 1.0).expect("Hermitian generator")
}

/// Full-rank mixed state `G G† / tr[G G†]`.
pub fn density(n: usize, rng: &mut impl Rng) -> DensityState {
    let g = gaussian_matrix(n, n, rng);
    let m = g.matmul(&g.adjoint());
    let t = m.trace().re;
    DensityState::new(m.scale_real(1.0 / t)).expect("Gram matrix is a state")
}

pub fn pure_state(n: usize, rng: &mut impl Rng) -> DensityState {
    let v = gaussian_matrix(n, 1, rng);
    DensityState::pure(v.as_slice()).expect("nonzero vector")
}

/// Pure or mixed with equal odds.
pub fn state(n: usize, rng: &mut impl Rng) -> DensityState {
    if rng.gen_bool(0.5) {
        pure_state(n, rng)
    } else {
        density(n, rng)
    }
}

pub fn observable(n: usize, rng: &mut impl Rng) -> ObservableOp {
    ObservableOp::new(hermitian(n, rng)).expect("Hermitian")
}

/// PVM built from the columns of `basis`, split into `outcomes` nonempty groups.
pub fn pointer_in_basis(basis: &ComplexMatrix, outcomes: usize, rng: &mut impl Rng) -> PointerObservable {
    let n = basis.cols();
    assert!((1..=n).contains(&outcomes), "need between 1 and {n} outcomes");
    let mut columns: Vec<usize> = (0..n).collect();
    columns.shuffle(rng);
    let mut groups: Vec<Vec<usize>> = columns[..outcomes].iter().map(|&c| vec![c]).collect();
    for &c in &columns[outcomes..] {
        let g = rng.gen_range(0..outcomes);
        groups[g].push(c);
    }
    let projectors = groups
        .iter()
        .map(|g| {
            let mut p = ComplexMatrix::zeros(n, n);
            for &c in g {
                let v = basis.column(c);
                p += &ComplexMatrix::outer(&v, &v);
            }
            p
        })
        .collect();
    let labels = (0..outcomes)
        .map(|k| Outcome::valued(format!("x{k}"), k as f64))
        .collect();
    PointerObservable::new(labels, projectors).expect("orthonormal basis partition")
}

/// Unconstrained model: random apparatus state, unitary and pointer.
pub fn model(dim_system: usize, dim_apparatus: usize, rng: &mut impl Rng) -> MeasurementModel {
    let apparatus = state(dim_apparatus, rng);
    let u = unitary(dim_system * dim_apparatus, rng);
    let outcomes = rng.gen_range(2..=dim_apparatus.max(2)).min(dim_apparatus);
    let basis = unitary(dim_apparatus, rng);
    let pointer = pointer_in_basis(&basis, outcomes, rng);
    MeasurementModel::new(dim_system, apparatus, u, pointer).expect("random model is valid")
}

/// Self-adjoint operator with a small integer spectrum in a random basis.
/// Integer eigenvalues in `0..levels` make degeneracies and coinciding
/// totals common.
pub fn integer_spectrum_operator(n: usize, levels: u32, rotate: bool, rng: &mut impl Rng) -> ObservableOp {
    let spectrum: Vec<f64> = (0..n).map(|_| rng.gen_range(0..levels) as f64).collect();
    let d = ComplexMatrix::from_diagonal(&spectrum);
    if rotate {
        let v = unitary(n, rng);
        ObservableOp::new(v.matmul(&d).matmul(&v.adjoint())).expect("rotated diagonal is Hermitian")
    } else {
        ObservableOp::new(d).expect("diagonal")
    }
}

/// Random model with `[U, L] = 0` and `[Z_A, L_A] = 0`.
///
/// The generator is a random Hermitian matrix pinched onto the eigenspaces
/// of `L`, so conservation holds up to round-off. The pointer is built from
/// the eigenvectors of `L_A`.
#[derive(Clone, Debug)]
pub struct ConservingInstance {
    pub model: MeasurementModel,
    pub conserved: ConservedQuantity,
}

pub fn conserving_instance(
    dim_system: usize,
    dim_apparatus: usize,
    rotate: bool,
    rng: &mut impl Rng,
) -> Result<ConservingInstance> {
    let l_s = integer_spectrum_operator(dim_system, 3, rotate, rng);
    let l_a = integer_spectrum_operator(dim_apparatus, 3, rotate, rng);
    let conserved = ConservedQuantity::new(l_s, l_a)?;
    let total = linalg::hermitian_eig(&conserved.total(), linalg::HERMITICITY_TOL)?;
    let generator = decohere_spectral(&hermitian(dim_system * dim_apparatus, rng), &total);
    let u = linalg::unitary_from_generator(&generator, rng.gen_range(0.3..2.5))?;
    let outcomes = rng.gen_range(2..=dim_apparatus);
    let pointer = pointer_in_basis(conserved.apparatus_spectrum().basis(), outcomes, rng);
    let apparatus = state(dim_apparatus, rng);
    let model = MeasurementModel::new(dim_system, apparatus, u, pointer)?;
    Ok(ConservingInstance { model, conserved })
}

/// Random observable commuting with the system part of `q`.
pub fn commuting_observable(q: &ConservedQuantity, rng: &mut impl Rng) -> ObservableOp {
    let n = q.system().dim();
    ObservableOp::new(decohere_spectral(&hermitian(n, rng), q.system_spectrum())).expect("pinching keeps hermiticity")
}

/// Random system state commuting with the system part of `q`.
pub fn commuting_state(q: &ConservedQuantity, rng: &mut impl Rng) -> DensityState {
    let rho = state(q.system().dim(), rng);
    DensityState::new(decohere_spectral(rho.matrix(), q.system_spectrum())).expect("pinching keeps states")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::commutator;

    #[test]
    fn generators_produce_valid_objects() {
        let mut rng = seeded(7);
        for n in 1..6 {
            assert!(unitary(n, &mut rng).is_unitary(1e-10));
            let rho = density(n, &mut rng);
            assert!(rho.matrix().is_psd(1e-12));
        }
        let m = model(3, 4, &mut rng);
        assert_eq!(m.dim_total(), 12);
    }

    #[test]
    fn conserving_instances_conserve() {
        let mut rng = seeded(11);
        for rotate in [false, true] {
            for _ in 0..10 {
                let inst = conserving_instance(3, 3, rotate, &mut rng).unwrap();
                let l = inst.conserved.total();
                assert!(commutator(inst.model.unitary(), &l).frobenius_norm() < 1e-10);
                for p in inst.model.pointer().projectors() {
                    assert!(commutator(p, inst.conserved.apparatus().matrix()).frobenius_norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let a = model(2, 3, &mut seeded(5));
        let b = model(2, 3, &mut seeded(5));
        assert_eq!(a, b);
    }
}

//! Conditional values assembled block by block from the spectral projections
//! of `L_S` and `L_A`.
//!
//! When `[U, L] = 0`, `[Z_A, L_A] = 0` and `[O_S, L_S] = 0`, only terms
//! `Q_S^m (·) Q_S^n ⊗ Q_A^μ ϱ Q_A^ν` with `m + μ = n + ν` survive. This module
//! sums exactly those terms. It shares no code with the direct formulas in
//! [`crate::engine`] beyond matrix arithmetic, so agreement between the two is
//! a meaningful cross-check.

use serde::Serialize;

use super::{
    check_commutes_with_system_part, check_conservation, check_yanase, Check, ConservedQuantity, CONSERVATION,
    OBSERVABLE_COMMUTES, YANASE,
};
use crate::engine::P_FLOOR;
use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, C64, CLUSTER_REL_TOL};
use crate::quantum::{DensityState, MeasurementModel, ObservableOp};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlockwiseValues {
    pub probability: f64,
    pub before: f64,
    pub after: f64,
}

fn require(name: &str, check: Check) -> Result<()> {
    if check.held {
        Ok(())
    } else {
        Err(Error::HypothesisViolated {
            name: name.to_string(),
            residual: check.residual,
            tol: check.tolerance,
        })
    }
}

/// Pairs `(m, μ)` of system/apparatus clusters grouped by total eigenvalue.
fn total_blocks(q: &ConservedQuantity) -> Vec<Vec<(usize, usize)>> {
    let s = &q.system_spectrum().eigenvalues;
    let a = &q.apparatus_spectrum().eigenvalues;
    let mut pairs: Vec<(f64, usize, usize)> = s
        .iter()
        .enumerate()
        .flat_map(|(m, &lm)| a.iter().enumerate().map(move |(mu, &lmu)| (lm + lmu, m, mu)))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let scale = pairs.iter().map(|p| p.0.abs()).fold(1.0, f64::max);
    let tol = CLUSTER_REL_TOL * scale;

    let mut blocks: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for (total, m, mu) in pairs {
        match blocks.last_mut() {
            Some(block) if total - last <= tol => block.push((m, mu)),
            _ => blocks.push(vec![(m, mu)]),
        }
        last = total;
    }
    blocks
}

/// Probability and before/after conditional values of one outcome, summed
/// over conserved blocks. Fails with [`Error::HypothesisViolated`] when a
/// precondition residual is at or above `tol`.
pub fn blockwise_conditional_values(
    model: &MeasurementModel,
    state: &DensityState,
    observable: &ObservableOp,
    q: &ConservedQuantity,
    outcome: &str,
    tol: f64,
) -> Result<BlockwiseValues> {
    require(CONSERVATION, check_conservation(model, q, tol)?)?;
    require(YANASE, check_yanase(model, q, tol)?)?;
    require(
        OBSERVABLE_COMMUTES,
        check_commutes_with_system_part(observable.matrix(), q, tol)?,
    )?;
    let index = model
        .pointer()
        .index_of(outcome)
        .ok_or_else(|| Error::UnknownOutcome(outcome.to_string()))?;

    let ds = model.dim_system();
    let heis_identity = model.heisenberg_pointer(&ComplexMatrix::identity(ds), index);
    let heis_observable = model.heisenberg_pointer(observable.matrix(), index);

    let qs = &q.system_spectrum().projectors;
    let qa = &q.apparatus_spectrum().projectors;
    let rho = state.matrix();
    let o = observable.matrix();
    let anti = &o.matmul(rho) + &rho.matmul(o);
    let varrho = model.apparatus_state().matrix();

    let mut p_sum = C64::new(0.0, 0.0);
    let mut after_sum = C64::new(0.0, 0.0);
    let mut before_sum = C64::new(0.0, 0.0);
    for block in total_blocks(q) {
        for &(m, mu) in &block {
            for &(n, nu) in &block {
                let apparatus_piece = qa[mu].matmul(varrho).matmul(&qa[nu]);
                let state_piece = kron(&qs[m].matmul(rho).matmul(&qs[n]), &apparatus_piece);
                let anti_piece = kron(&qs[m].matmul(&anti).matmul(&qs[n]), &apparatus_piece);
                p_sum += heis_identity.trace_product(&state_piece);
                after_sum += heis_observable.trace_product(&state_piece);
                before_sum += heis_identity.trace_product(&anti_piece);
            }
        }
    }

    let probability = p_sum.re.clamp(0.0, 1.0);
    if probability <= P_FLOOR {
        return Err(Error::ZeroProbabilityOutcome {
            outcome: outcome.to_string(),
            probability,
            floor: P_FLOOR,
        });
    }
    Ok(BlockwiseValues {
        probability,
        before: before_sum.re / (2.0 * probability),
        after: after_sum.re / probability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{conditional_after, conditional_before_model, outcome_probability};
    use crate::quantum::PointerObservable;

    #[test]
    fn blocks_of_two_number_operators() {
        let n2 = ObservableOp::diagonal(&[0.0, 1.0]);
        let n3 = ObservableOp::diagonal(&[0.0, 1.0, 2.0]);
        let q = ConservedQuantity::new(n2, n3).unwrap();
        let blocks = total_blocks(&q);
        assert_eq!(
            blocks,
            vec![vec![(0, 0)], vec![(0, 1), (1, 0)], vec![(0, 2), (1, 1)], vec![(1, 2)]]
        );
    }

    #[test]
    fn identity_unitary_matches_direct_path() {
        let q = ConservedQuantity::new(
            ObservableOp::diagonal(&[0.0, 2.0]),
            ObservableOp::diagonal(&[1.0, 0.5, 1.0]),
        )
        .unwrap();
        let apparatus = DensityState::new(ComplexMatrix::from_diagonal(&[0.2, 0.3, 0.5])).unwrap();
        let model = MeasurementModel::new(
            2,
            apparatus,
            ComplexMatrix::identity(6),
            PointerObservable::computational(3),
        )
        .unwrap();
        let state = DensityState::pure(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let obs = ObservableOp::diagonal(&[1.0, -3.0]);
        for o in ["0", "1", "2"] {
            let b = blockwise_conditional_values(&model, &state, &obs, &q, o, 1e-9).unwrap();
            assert!((b.probability - outcome_probability(&model, &state, o).unwrap()).abs() < 1e-12);
            assert!((b.after - conditional_after(&model, &state, &obs, o).unwrap()).abs() < 1e-12);
            assert!((b.before - conditional_before_model(&model, &state, &obs, o).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn refuses_non_commuting_observable() {
        let q =
            ConservedQuantity::new(ObservableOp::diagonal(&[0.0, 1.0]), ObservableOp::diagonal(&[0.0, 1.0])).unwrap();
        let model = MeasurementModel::new(
            2,
            DensityState::maximally_mixed(2),
            ComplexMatrix::identity(4),
            PointerObservable::computational(2),
        )
        .unwrap();
        let sx = ObservableOp::new(ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()).unwrap();
        let err =
            blockwise_conditional_values(&model, &DensityState::maximally_mixed(2), &sx, &q, "0", 1e-9).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolated { ref name, .. } if name == "observable_commutes"));
    }
}

//! Enumeration of probe-reading branches of a post-interaction state.

use super::probes::{probe_value, PROBE_DIM};
use crate::linalg::{digits_of, Operator, StateVector};

/// Branches below this probability are numerical residue of exact
/// cancellations and are dropped.
pub(crate) const BRANCH_FLOOR: f64 = 1e-26;

pub(crate) struct RawBranch {
    pub omegas: Vec<i8>,
    pub probability: f64,
    /// Unnormalized system amplitudes for this reading.
    pub system: StateVector,
}

/// All probe readings of `probe_slots` with nonzero weight in `state`.
pub(crate) fn enumerate(state: &StateVector, probe_slots: &[usize]) -> crate::Result<Vec<RawBranch>> {
    let local = vec![PROBE_DIM; probe_slots.len()];
    let count = PROBE_DIM.pow(probe_slots.len() as u32);
    let total = state.norm_sqr();
    let mut out = Vec::new();
    for k in 0..count {
        let digits = digits_of(k, &local);
        let system = state.slice(probe_slots, &digits)?;
        let probability = system.norm_sqr() / total;
        if probability > BRANCH_FLOOR {
            out.push(RawBranch { omegas: digits.into_iter().map(probe_value).collect(), probability, system });
        }
    }
    Ok(out)
}

/// `‖(A − a)ψ‖` relative to `‖ψ‖`, with an absolute floor for residue
/// branches.
pub(crate) fn eigen_residual_ok(op: &Operator, eigenvalue: f64, psi: &StateVector) -> crate::Result<bool> {
    let applied = op.apply(psi)?;
    let resid = applied.try_add(&psi.scaled(crate::linalg::r(-eigenvalue)))?.norm();
    Ok(resid <= 1e-10 * psi.norm() + 1e-13)
}

/// Whether `psi` lies along `target` (normalized), relative to `‖ψ‖`.
pub(crate) fn along(target: &StateVector, psi: &StateVector) -> bool {
    let overlap = target.inner(psi);
    let perp = psi.try_add(&target.scaled(-overlap)).map(|v| v.norm()).unwrap_or(f64::INFINITY);
    perp <= 1e-10 * psi.norm() + 1e-13
}

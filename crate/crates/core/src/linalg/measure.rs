//! Projective measurement with Born-rule sampling.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Operator, StateVector, STRUCT_TOL};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub outcome_index: usize,
    /// Eigenvalue attached to the selected projector, when the family was
    /// labeled.
    pub eigenvalue: Option<f64>,
    pub probability: f64,
    /// Normalized projection of the pre-measurement state.
    pub post_state: StateVector,
}

/// A validated complete family of orthogonal projectors.
#[derive(Debug, Clone)]
pub struct ProjectiveMeasurement {
    projectors: Vec<Operator>,
    eigenvalues: Vec<Option<f64>>,
}

impl ProjectiveMeasurement {
    /// Checks hermiticity, idempotency, mutual orthogonality and
    /// completeness, all at `STRUCT_TOL`.
    pub fn new(projectors: Vec<Operator>) -> Result<Self> {
        let n = projectors.len();
        Self::labeled(projectors, vec![None; n])
    }

    pub fn labeled(projectors: Vec<Operator>, eigenvalues: Vec<Option<f64>>) -> Result<Self> {
        if projectors.is_empty() {
            return Err(Error::InvalidProjectors("empty family".into()));
        }
        if eigenvalues.len() != projectors.len() {
            return Err(Error::InvalidProjectors("one label per projector required".into()));
        }
        let dim = projectors[0].dim();
        if let Some(p) = projectors.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
        }
        let dims = projectors[0].factor_dims().to_vec();
        let mut sum = Operator::zeros(&dims);
        for (k, p) in projectors.iter().enumerate() {
            if !p.is_projector(STRUCT_TOL) {
                return Err(Error::InvalidProjectors(format!("element {k} is not an orthogonal projector")));
            }
            for (l, q) in projectors.iter().enumerate().skip(k + 1) {
                let overlap = p.matmul(q)?.max_abs();
                if overlap > STRUCT_TOL {
                    return Err(Error::InvalidProjectors(format!(
                        "elements {k} and {l} are not orthogonal (|P_k P_l| = {overlap:e})"
                    )));
                }
            }
            sum = sum.try_add(p)?;
        }
        let defect = sum.max_abs_diff(&Operator::identity(&dims));
        if defect > STRUCT_TOL {
            return Err(Error::InvalidProjectors(format!("family does not resolve the identity (defect {defect:e})")));
        }
        Ok(Self { projectors, eigenvalues })
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projectors(&self) -> &[Operator] {
        &self.projectors
    }

    /// `‖P_k ψ‖²` for every element.
    pub fn probabilities(&self, state: &StateVector) -> Result<Vec<f64>> {
        self.projectors.iter().map(|p| Ok(p.apply(state)?.norm_sqr())).collect()
    }

    pub fn measure<R: Rng + ?Sized>(&self, state: &StateVector, rng: &mut R) -> Result<MeasurementOutcome> {
        if !state.is_normalized() {
            return Err(Error::InvalidParameter(format!("measured state has norm² {}", state.norm_sqr())));
        }
        let probs = self.probabilities(state)?;
        let k = sample_index(&probs, rng);
        let projected = self.projectors[k].apply(state)?;
        Ok(MeasurementOutcome {
            outcome_index: k,
            eigenvalue: self.eigenvalues[k],
            probability: probs[k],
            post_state: projected.normalized()?,
        })
    }
}

/// Measure `state` against a complete orthogonal projector family.
pub fn measure_projective<R: Rng + ?Sized>(
    state: &StateVector,
    projectors: &[Operator],
    rng: &mut R,
) -> Result<MeasurementOutcome> {
    ProjectiveMeasurement::new(projectors.to_vec())?.measure(state, rng)
}

/// Result of measuring one tensor factor in its computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotOutcome {
    pub value: usize,
    pub probability: f64,
    pub post_state: StateVector,
}

/// Computational-basis measurement of factor `slot`; equivalent to
/// [`measure_projective`] with the family `{1 ⊗ |k><k| ⊗ 1}` but linear in
/// the state dimension.
pub fn measure_slot<R: Rng + ?Sized>(state: &StateVector, slot: usize, rng: &mut R) -> Result<SlotOutcome> {
    let probs = state.slot_marginal(slot)?;
    let value = sample_index(&probs, rng);
    let post_state = state.project_slot(slot, value)?.normalized()?;
    Ok(SlotOutcome { value, probability: probs[value], post_state })
}

/// Inverse-CDF draw from a discrete distribution. Consumes exactly one `f64`.
pub(crate) fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_nonzero = k;
            acc += p;
            if u < acc {
                return k;
            }
        }
    }
    last_nonzero
}

/// Repeated sampling from a fixed outcome distribution.
#[derive(Debug, Clone)]
pub struct BornSampler {
    probabilities: Vec<f64>,
    index: WeightedIndex<f64>,
}

impl BornSampler {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        let index = WeightedIndex::new(&probabilities)
            .map_err(|e| Error::InvalidParameter(format!("invalid outcome distribution: {e}")))?;
        Ok(Self { probabilities, index })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.index.sample(rng)
    }
}

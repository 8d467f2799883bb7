//! Local measurement of the total `T²` with three probe pairs.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use super::branches::{along, enumerate};
use super::classify::{classify_t2, T2Classification};
use super::probes::{ProbeAssembly, ProbePair};
use super::system::validate_system;
use super::unitary::{slot, u_total_circuit};
use crate::linalg::{kron, BornSampler, StateVector};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct T2Result {
    /// Readings ordered `(ω₃, ω₆, ω₂*, ω₄*, ω₃*, ω₆*)`.
    pub omegas: [i8; 6],
    pub classification: T2Classification,
    pub reduced_system: StateVector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct T2Branch {
    pub omegas: [i8; 6],
    pub probability: f64,
    pub classification: T2Classification,
}

/// `|Φ>_{3,6} ⊗ |Φ>_{2*,4*} ⊗ |Φ>_{3*,6*}` in slot order.
pub fn t2_probe_state() -> StateVector {
    ProbeAssembly::new(&ProbePair::ALL).expect("three distinct pairs").initial_state().clone()
}

/// `U (|system> ⊗ |Φ>)` over the full 2916-dimensional space.
pub fn t2_post_interaction(system: &StateVector) -> Result<StateVector> {
    let system = validate_system(system)?;
    u_total_circuit().apply(&kron(&system, &t2_probe_state()))
}

/// The joint distribution of the six readings for one input.
///
/// Construction checks every reachable reading against [`classify_t2`]:
/// the conditional system state must lie along the classified state.
#[derive(Debug, Clone)]
pub struct PreparedT2 {
    branches: Vec<T2Branch>,
    sampler: BornSampler,
}

impl PreparedT2 {
    pub fn new(system: &StateVector) -> Result<Self> {
        Self::from_post_interaction(&t2_post_interaction(system)?)
    }

    pub fn from_post_interaction(post: &StateVector) -> Result<Self> {
        let mut branches = Vec::new();
        for raw in enumerate(post, &slot::PROBES)? {
            let omegas: [i8; 6] = raw.omegas.try_into().expect("six probes");
            let classification = classify_t2(omegas)?;
            if !along(&classification.state(), &raw.system) {
                return Err(Error::Unclassifiable(format!(
                    "readings {omegas:?} classified {} but the system is elsewhere",
                    classification.label()
                )));
            }
            branches.push(T2Branch { omegas, probability: raw.probability, classification });
        }
        let sampler = BornSampler::new(branches.iter().map(|b| b.probability).collect())?;
        Ok(Self { branches, sampler })
    }

    pub fn branches(&self) -> &[T2Branch] {
        &self.branches
    }

    pub fn classification_probabilities(&self) -> BTreeMap<T2Classification, f64> {
        let mut out: BTreeMap<T2Classification, f64> = T2Classification::ALL.iter().map(|&c| (c, 0.0)).collect();
        for b in &self.branches {
            *out.get_mut(&b.classification).expect("all keys present") += b.probability;
        }
        out
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T2Result {
        let b = &self.branches[self.sampler.sample(rng)];
        T2Result { omegas: b.omegas, classification: b.classification, reduced_system: b.classification.state() }
    }
}

/// Couple the system to all three probe pairs, read the six probes and
/// reduce.
pub fn run_t2_protocol<R: Rng + ?Sized>(system: &StateVector, rng: &mut R) -> Result<T2Result> {
    Ok(PreparedT2::new(system)?.sample(rng))
}

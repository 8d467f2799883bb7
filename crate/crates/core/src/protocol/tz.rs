//! Local measurement of the total `T_z` with one probe pair.

use rand::Rng;
use serde::Serialize;

use super::branches::{eigen_residual_ok, enumerate};
use super::classify::classify_tz;
use super::probes::{phi, ProbePair};
use super::system::{tz_operator, validate_system, Axis};
use super::unitary::{slot, u_z_circuit, TZ_DIMS};
use crate::linalg::{kron, BornSampler, LocalCircuit, StateVector};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TzResult {
    pub omega3: i8,
    pub omega6: i8,
    pub omega_sum: i8,
    pub inferred_tz: i8,
    /// Normalized system state after reduction.
    pub reduced_system: StateVector,
}

/// One joint reading `(ω₃, ω₆)` of the probes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TzBranch {
    pub omega3: i8,
    pub omega6: i8,
    pub probability: f64,
    pub inferred_tz: i8,
    pub reduced_system: StateVector,
}

/// `U_z` on the layout (particle 1, particle 2, probe 3, probe 6).
pub fn tz_circuit() -> LocalCircuit {
    u_z_circuit(Axis::Z, [slot::PARTICLE_1, slot::PARTICLE_2], [slot::P3, slot::P6], &TZ_DIMS)
        .expect("fixed layout is valid")
}

/// `U_z (|system> ⊗ |Φ>_{3,6})`.
pub fn tz_post_interaction(system: &StateVector) -> Result<StateVector> {
    let system = validate_system(system)?;
    tz_circuit().apply(&kron(&system, &phi()))
}

/// The reading distribution for one input, ready for repeated sampling.
#[derive(Debug, Clone)]
pub struct PreparedTz {
    branches: Vec<TzBranch>,
    sampler: BornSampler,
}

impl PreparedTz {
    pub fn new(system: &StateVector) -> Result<Self> {
        debug_assert_eq!(ProbePair::ThreeSix.probe_names(), ["3", "6"]);
        let post = tz_post_interaction(system)?;
        let tz = tz_operator();
        let mut branches = Vec::new();
        for raw in enumerate(&post, &[slot::P3, slot::P6])? {
            let (omega3, omega6) = (raw.omegas[0], raw.omegas[1]);
            let inferred_tz = classify_tz(i32::from(omega3 + omega6))?;
            if !eigen_residual_ok(&tz, f64::from(inferred_tz), &raw.system)? {
                return Err(Error::Unclassifiable(format!(
                    "reading ({omega3}, {omega6}) left a state outside the T_z = {inferred_tz} eigenspace"
                )));
            }
            branches.push(TzBranch {
                omega3,
                omega6,
                probability: raw.probability,
                inferred_tz,
                reduced_system: raw.system.normalized()?,
            });
        }
        let sampler = BornSampler::new(branches.iter().map(|b| b.probability).collect())?;
        Ok(Self { branches, sampler })
    }

    pub fn branches(&self) -> &[TzBranch] {
        &self.branches
    }

    /// Probability of each inferred value, indexed `[−1, 0, +1]`.
    pub fn tz_distribution(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for b in &self.branches {
            out[(b.inferred_tz + 1) as usize] += b.probability;
        }
        out
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TzResult {
        let b = &self.branches[self.sampler.sample(rng)];
        TzResult {
            omega3: b.omega3,
            omega6: b.omega6,
            omega_sum: b.omega3 + b.omega6,
            inferred_tz: b.inferred_tz,
            reduced_system: b.reduced_system.clone(),
        }
    }
}

/// Couple the system to probes 3 and 6, read both probes and reduce.
pub fn run_tz_protocol<R: Rng + ?Sized>(system: &StateVector, rng: &mut R) -> Result<TzResult> {
    Ok(PreparedTz::new(system)?.sample(rng))
}

//! Can a local flip of particle 1 be seen in the statistics of particle 2?
//!
//! Both particles start in `|↑↑>`. Particle 1 is optionally flipped, one of
//! the nonlocal measurements optionally runs, and then `T_2z` is read on
//! particle 2.

use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::system::{product_z, up_up, Spin};
use super::t2::PreparedT2;
use super::tz::PreparedTz;
use crate::linalg::{sample_index, BornSampler, StateVector};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NonlocalMeasurement {
    Tz,
    T2,
    None,
}

impl FromStr for NonlocalMeasurement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tz" => Ok(Self::Tz),
            "t2" => Ok(Self::T2),
            "none" => Ok(Self::None),
            other => Err(Error::InvalidParameter(format!("unknown nonlocal measurement {other:?}"))),
        }
    }
}

/// Prepared branch structure of one configuration of the experiment.
#[derive(Debug, Clone)]
pub struct SignalingExperiment {
    flip: bool,
    mode: NonlocalMeasurement,
    /// System state after the nonlocal step, per branch.
    states: Vec<StateVector>,
    sampler: BornSampler,
}

impl SignalingExperiment {
    pub fn new(flip: bool, mode: NonlocalMeasurement) -> Result<Self> {
        let start = if flip { product_z(Spin::Down, Spin::Up) } else { up_up() };
        let (probs, states): (Vec<f64>, Vec<StateVector>) = match mode {
            NonlocalMeasurement::None => (vec![1.0], vec![start]),
            NonlocalMeasurement::Tz => {
                PreparedTz::new(&start)?.branches().iter().map(|b| (b.probability, b.reduced_system.clone())).unzip()
            }
            NonlocalMeasurement::T2 => {
                PreparedT2::new(&start)?.branches().iter().map(|b| (b.probability, b.classification.state())).unzip()
            }
        };
        Ok(Self { flip, mode, states, sampler: BornSampler::new(probs)? })
    }

    pub fn flip(&self) -> bool {
        self.flip
    }

    pub fn mode(&self) -> NonlocalMeasurement {
        self.mode
    }

    /// Exact `P(T_2z = +1)`.
    pub fn prob_plus(&self) -> f64 {
        self.sampler
            .probabilities()
            .iter()
            .zip(&self.states)
            .map(|(p, s)| p * s.slot_marginal(1).expect("two factors")[Spin::Up.index()])
            .sum()
    }

    /// One run; returns the `T_2z` reading as `±1`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i8 {
        let state = &self.states[self.sampler.sample(rng)];
        let marginal = state.slot_marginal(1).expect("two factors");
        if sample_index(&marginal, rng) == Spin::Up.index() {
            1
        } else {
            -1
        }
    }
}

pub fn signaling_scenario<R: Rng + ?Sized>(flip: bool, mode: NonlocalMeasurement, rng: &mut R) -> Result<i8> {
    Ok(SignalingExperiment::new(flip, mode)?.sample(rng))
}

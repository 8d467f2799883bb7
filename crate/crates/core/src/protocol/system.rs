//! Two isospin-1/2 particles: basis states, axis projectors and the total
//! isospin observables.
//!
//! Single-particle basis index 0 is `↑_z`, index 1 is `↓_z`. The y
//! eigenstates are `|±y> = (|↑z> ± i|↓z>)/√2`; with this phase choice the
//! T² probe circuit reproduces the published branch expansions with unit
//! global phase.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::linalg::{c, kron, r, Complex64, Operator, OperatorKind, StateVector, STRUCT_TOL, ZERO};
use crate::{Error, Result};

pub const SYSTEM_DIMS: [usize; 2] = [2, 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Z,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    /// `+1` for up, `-1` for down.
    pub fn sign(self) -> i8 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }
}

fn particle_labels() -> Vec<String> {
    vec!["up".into(), "down".into()]
}

/// Single-particle eigenstate of the given axis, `Up` meaning eigenvalue `+1`.
pub fn spin_state(axis: Axis, spin: Spin) -> StateVector {
    let amps = match (axis, spin) {
        (Axis::Z, Spin::Up) => vec![r(1.0), ZERO],
        (Axis::Z, Spin::Down) => vec![ZERO, r(1.0)],
        (Axis::Y, Spin::Up) => vec![r(FRAC_1_SQRT_2), c(0.0, FRAC_1_SQRT_2)],
        (Axis::Y, Spin::Down) => vec![r(FRAC_1_SQRT_2), c(0.0, -FRAC_1_SQRT_2)],
    };
    StateVector::from_amplitudes(amps)
        .expect("two amplitudes")
        .with_labels(vec![particle_labels()])
        .expect("one factor")
}

/// `P_{axis,±}` on one particle.
pub fn spin_projector(axis: Axis, spin: Spin) -> Operator {
    Operator::projector_onto(&spin_state(axis, spin)).expect("normalized eigenstate")
}

/// `|s1, s2>` in the z basis.
pub fn product_z(s1: Spin, s2: Spin) -> StateVector {
    kron(&spin_state(Axis::Z, s1), &spin_state(Axis::Z, s2))
}

pub fn up_up() -> StateVector {
    product_z(Spin::Up, Spin::Up)
}

pub fn down_down() -> StateVector {
    product_z(Spin::Down, Spin::Down)
}

/// `(|↑↓> − |↓↑>)/√2`.
pub fn singlet() -> StateVector {
    two_particle(&[ZERO, r(FRAC_1_SQRT_2), r(-FRAC_1_SQRT_2), ZERO])
}

/// `(|↑↓> + |↓↑>)/√2`.
pub fn triplet_z() -> StateVector {
    two_particle(&[ZERO, r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2), ZERO])
}

/// `α|↑↑> + β|↑↓> + γ|↓↑> + δ|↓↓>`, not normalized.
pub fn two_particle(coefficients: &[Complex64; 4]) -> StateVector {
    StateVector::new(coefficients.to_vec(), SYSTEM_DIMS.to_vec())
        .expect("four amplitudes")
        .with_labels(vec![particle_labels(), particle_labels()])
        .expect("two factors")
}

/// Singlet amplitude of `α|↑↑> + β|↑↓> + γ|↓↑> + δ|↓↓>`.
pub fn singlet_amplitude(coefficients: &[Complex64; 4]) -> Complex64 {
    (coefficients[1] - coefficients[2]) * FRAC_1_SQRT_2
}

/// Total `T_z` in units where a single particle carries `±1/2`.
pub fn tz_operator() -> Operator {
    Operator::real_diagonal(&SYSTEM_DIMS, &[1.0, 0.0, 0.0, -1.0]).expect("diagonal")
}

/// Total `T²`: `0` on the singlet, `2` on the triplet manifold.
pub fn t2_operator() -> Operator {
    let s = Operator::projector_onto(&singlet()).expect("normalized");
    (&Operator::identity(&SYSTEM_DIMS) - &s)
        .scaled(r(2.0))
        .with_kind(OperatorKind::Hermitian)
        .expect("hermitian by construction")
}

/// Check that `state` is a normalized two-particle state and return it with
/// factor dimensions `[2, 2]`.
pub fn validate_system(state: &StateVector) -> Result<StateVector> {
    if state.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: state.dim() });
    }
    if (state.norm_sqr() - 1.0).abs() > STRUCT_TOL {
        return Err(Error::InvalidParameter(format!("system state has norm² {}", state.norm_sqr())));
    }
    if state.factor_dims() == SYSTEM_DIMS {
        Ok(state.clone())
    } else {
        Ok(StateVector::new(state.amplitudes().to_vec(), SYSTEM_DIMS.to_vec())?)
    }
}

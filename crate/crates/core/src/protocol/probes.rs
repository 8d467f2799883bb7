//! Three-level probe particles and their entangled pair states.
//!
//! Probe basis order is `(|+1>, |0>, |−1>)`: index 0 carries eigenvalue +1.
//! This is the order under which the cyclic shift `P_L` has the matrix
//! with ones at `(1,0)`, `(2,1)`, `(0,2)` and acts as
//! `P_L|+1> = |0>`, `P_L|0> = |−1>`, `P_L|−1> = |+1>`. `P_R` is its inverse
//! (and transpose).

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::linalg::{kron, kron_all, Operator, OperatorKind, StateVector};
use crate::{Error, Result};

pub const PROBE_DIM: usize = 3;

/// Eigenvalue of `Ω` attached to probe basis index `index`.
pub fn probe_value(index: usize) -> i8 {
    match index {
        0 => 1,
        1 => 0,
        2 => -1,
        _ => panic!("probe index {index} out of range"),
    }
}

pub fn probe_index(value: i8) -> Result<usize> {
    match value {
        1 => Ok(0),
        0 => Ok(1),
        -1 => Ok(2),
        v => Err(Error::InvalidParameter(format!("probe value {v} not in {{-1, 0, 1}}"))),
    }
}

fn probe_labels() -> Vec<String> {
    vec!["+1".into(), "0".into(), "-1".into()]
}

pub fn probe_ket(value: i8) -> Result<StateVector> {
    StateVector::basis(&[PROBE_DIM], &[probe_index(value)?])?.with_labels(vec![probe_labels()])
}

/// Left cyclic shift on one probe.
pub fn p_left() -> Operator {
    Operator::from_real_rows(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]])
        .and_then(|o| o.with_kind(OperatorKind::Unitary))
        .expect("permutation matrix")
}

/// Right cyclic shift, the inverse of [`p_left`].
pub fn p_right() -> Operator {
    p_left().adjoint()
}

fn pair_state(terms: [(i8, i8); 3]) -> StateVector {
    let mut acc = StateVector::zeros(&[PROBE_DIM, PROBE_DIM]);
    for (a, b) in terms {
        let ket = kron(&probe_ket(a).expect("valid"), &probe_ket(b).expect("valid"));
        acc = acc.try_add(&ket).expect("same dims");
    }
    acc.scaled(crate::linalg::r(1.0 / 3f64.sqrt()))
        .with_labels(vec![probe_labels(), probe_labels()])
        .expect("two factors")
}

/// `|Φ> = (|0,0> + |+1,−1> + |−1,+1>)/√3`; every term has `ω_a + ω_b = 0`.
pub fn phi() -> StateVector {
    pair_state([(0, 0), (1, -1), (-1, 1)])
}

/// `|Π(1,−2)> = (P_L ⊗ P_L)|Φ>`; pair sums are `1` or `−2`.
pub fn pi_1_m2() -> StateVector {
    pair_state([(-1, -1), (0, 1), (1, 0)])
}

/// `|Π(2,−1)> = (P_R ⊗ P_R)|Φ>`; pair sums are `2` or `−1`.
pub fn pi_2_m1() -> StateVector {
    pair_state([(1, 1), (0, -1), (-1, 0)])
}

/// The three probe pairs of the T² protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProbePair {
    /// Probes 3 and 6, coupled to the z spins first.
    ThreeSix,
    /// Probes 2* and 4*, coupled to the y spins.
    TwoFourStar,
    /// Probes 3* and 6*, coupled to the z spins last.
    ThreeSixStar,
}

impl ProbePair {
    pub const ALL: [ProbePair; 3] = [ProbePair::ThreeSix, ProbePair::TwoFourStar, ProbePair::ThreeSixStar];

    pub fn label(self) -> &'static str {
        match self {
            ProbePair::ThreeSix => "3,6",
            ProbePair::TwoFourStar => "2*,4*",
            ProbePair::ThreeSixStar => "3*,6*",
        }
    }

    /// Probe names of the (particle-1 side, particle-2 side) members.
    pub fn probe_names(self) -> [&'static str; 2] {
        match self {
            ProbePair::ThreeSix => ["3", "6"],
            ProbePair::TwoFourStar => ["2*", "4*"],
            ProbePair::ThreeSixStar => ["3*", "6*"],
        }
    }
}

impl FromStr for ProbePair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| !c.is_whitespace() && *c != '(' && *c != ')').collect();
        ProbePair::ALL
            .into_iter()
            .find(|p| p.label() == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown probe pair {s:?}")))
    }
}

/// `|Φ>` for one pair; the state does not depend on which pair it is.
pub fn probe_pair_state(_pair: ProbePair) -> StateVector {
    phi()
}

/// A set of probe pairs, each prepared in `|Φ>`.
#[derive(Debug, Clone)]
pub struct ProbeAssembly {
    pair_ids: Vec<ProbePair>,
    initial_state: StateVector,
}

impl ProbeAssembly {
    pub fn new(pair_ids: &[ProbePair]) -> Result<Self> {
        for (k, p) in pair_ids.iter().enumerate() {
            if pair_ids[..k].contains(p) {
                return Err(Error::InvalidParameter(format!("probe pair {} listed twice", p.label())));
            }
        }
        let states: Vec<StateVector> = pair_ids.iter().map(|&p| probe_pair_state(p)).collect();
        let initial_state = kron_all(&states)
            .ok_or_else(|| Error::InvalidParameter("probe assembly needs at least one pair".into()))?;
        Ok(Self { pair_ids: pair_ids.to_vec(), initial_state })
    }

    pub fn pair_ids(&self) -> &[ProbePair] {
        &self.pair_ids
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.initial_state
    }
}

//! Outcome classification rules for the probe readings.

use serde::{Deserialize, Serialize};

use super::system::{down_down, singlet, triplet_z, up_up};
use crate::linalg::StateVector;
use crate::{Error, Result};

/// `T_z` eigenvalue implied by `ω₃ + ω₆`.
///
/// A sum of 0 means no net shift; `+1` spin shifts the pair by `(−1,−1)`
/// modulo 3, which reads as a sum of `1` or `−2`; `−1` spin reads as `2`
/// or `−1`.
pub fn classify_tz(omega_sum: i32) -> Result<i8> {
    match omega_sum {
        0 => Ok(0),
        1 | -2 => Ok(1),
        2 | -1 => Ok(-1),
        s => Err(Error::OutcomeSumOutOfRange(s)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum T2Classification {
    Singlet,
    UpUp,
    DownDown,
    TripletZ,
}

impl T2Classification {
    pub const ALL: [T2Classification; 4] =
        [T2Classification::Singlet, T2Classification::UpUp, T2Classification::DownDown, T2Classification::TripletZ];

    pub fn state(self) -> StateVector {
        match self {
            T2Classification::Singlet => singlet(),
            T2Classification::UpUp => up_up(),
            T2Classification::DownDown => down_down(),
            T2Classification::TripletZ => triplet_z(),
        }
    }

    pub fn t2(self) -> i8 {
        match self {
            T2Classification::Singlet => 0,
            _ => 2,
        }
    }

    pub fn tz(self) -> i8 {
        match self {
            T2Classification::UpUp => 1,
            T2Classification::DownDown => -1,
            _ => 0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            T2Classification::Singlet => "singlet",
            T2Classification::UpUp => "up-up",
            T2Classification::DownDown => "down-down",
            T2Classification::TripletZ => "triplet-z",
        }
    }
}

/// Classify six readings ordered `(ω₃, ω₆, ω₂*, ω₄*, ω₃*, ω₆*)`.
///
/// All three pair sums zero selects the singlet. Otherwise the last pair
/// decides: its sum read through [`classify_tz`] gives the `T_z` of the
/// reduced triplet state, except that a zero last sum needs a nonzero
/// `(2*,4*)` sum. Readings with only the first pair shifted cannot occur
/// and are rejected.
pub fn classify_t2(omegas: [i8; 6]) -> Result<T2Classification> {
    if let Some(w) = omegas.iter().find(|w| !(-1..=1).contains(*w)) {
        return Err(Error::InvalidParameter(format!("probe reading {w} not in {{-1, 0, 1}}")));
    }
    let sums = [omegas[0] + omegas[1], omegas[2] + omegas[3], omegas[4] + omegas[5]].map(i32::from);
    if sums == [0, 0, 0] {
        return Ok(T2Classification::Singlet);
    }
    match classify_tz(sums[2])? {
        1 => Ok(T2Classification::UpUp),
        -1 => Ok(T2Classification::DownDown),
        _ if sums[1] != 0 => Ok(T2Classification::TripletZ),
        _ => Err(Error::Unclassifiable(format!("readings {omegas:?} shift only the first probe pair"))),
    }
}

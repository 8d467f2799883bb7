//! Probe-coupling unitaries.
//!
//! Each particle couples to one probe through
//! `P_{+} ⊗ P_L + P_{−} ⊗ P_R`, where `P_±` are the spin projectors of the
//! chosen axis. The two-particle operator `U_z` is the tensor product of the
//! two single-particle couplings.

use std::sync::OnceLock;

use super::probes::{p_left, p_right, ProbePair, PROBE_DIM};
use super::system::{spin_projector, Axis, Spin};
use crate::linalg::{check_slots, kron, LocalCircuit, Operator, OperatorKind};
use crate::{Error, Result};

/// Factor dimensions of the T_z protocol: particles 1, 2, probes 3, 6.
pub const TZ_DIMS: [usize; 4] = [2, 2, 3, 3];

/// Factor dimensions of the T² protocol: particles 1, 2, then probes
/// 3, 6, 2*, 4*, 3*, 6*.
pub const T2_DIMS: [usize; 8] = [2, 2, 3, 3, 3, 3, 3, 3];

/// Slot indices in the [`T2_DIMS`] layout. The first four coincide with the
/// [`TZ_DIMS`] layout.
pub mod slot {
    pub const PARTICLE_1: usize = 0;
    pub const PARTICLE_2: usize = 1;
    pub const P3: usize = 2;
    pub const P6: usize = 3;
    pub const P2S: usize = 4;
    pub const P4S: usize = 5;
    pub const P3S: usize = 6;
    pub const P6S: usize = 7;
    pub const PROBES: [usize; 6] = [P3, P6, P2S, P4S, P3S, P6S];
}

/// Which shift accompanies the `+` spin projector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Orientation {
    /// `P_+ ⊗ P_L + P_− ⊗ P_R`.
    Standard,
    /// `P_+ ⊗ P_R + P_− ⊗ P_L`.
    Swapped,
}

/// Six-dimensional coupling on (particle, probe).
pub fn controlled_shift(axis: Axis, orientation: Orientation) -> Operator {
    let (on_up, on_down) = match orientation {
        Orientation::Standard => (p_left(), p_right()),
        Orientation::Swapped => (p_right(), p_left()),
    };
    let a = kron(&spin_projector(axis, Spin::Up), &on_up);
    let b = kron(&spin_projector(axis, Spin::Down), &on_down);
    (&a + &b).with_kind(OperatorKind::Unitary).expect("controlled permutation is unitary")
}

/// Axis and slots of one T² probe pair.
pub fn pair_layout(pair: ProbePair) -> (Axis, [usize; 2]) {
    match pair {
        ProbePair::ThreeSix => (Axis::Z, [slot::P3, slot::P6]),
        ProbePair::TwoFourStar => (Axis::Y, [slot::P2S, slot::P4S]),
        ProbePair::ThreeSixStar => (Axis::Z, [slot::P3S, slot::P6S]),
    }
}

/// `U_axis` as a two-gate circuit over `dims`: particle `system[k]`
/// couples to probe `probes[k]`.
pub fn u_z_circuit(axis: Axis, system: [usize; 2], probes: [usize; 2], dims: &[usize]) -> Result<LocalCircuit> {
    check_slots(&[system[0], system[1], probes[0], probes[1]], dims.len())?;
    for &s in &system {
        if dims[s] != 2 {
            return Err(Error::InvalidParameter(format!("slot {s} is not a spin-1/2 factor")));
        }
    }
    for &s in &probes {
        if dims[s] != PROBE_DIM {
            return Err(Error::InvalidParameter(format!("slot {s} is not a three-level probe")));
        }
    }
    let gate = controlled_shift(axis, Orientation::Standard);
    let mut circuit = LocalCircuit::new(dims);
    circuit.push(gate.clone(), &[system[0], probes[0]])?;
    circuit.push(gate, &[system[1], probes[1]])?;
    Ok(circuit)
}

/// Dense `U_axis` embedded in a space with factor dimensions `dims`.
pub fn build_u_z(axis: Axis, system: [usize; 2], probes: [usize; 2], dims: &[usize]) -> Result<Operator> {
    u_z_circuit(axis, system, probes, dims)?.to_operator()
}

/// Circuit for one T² probe pair in the [`T2_DIMS`] layout.
pub fn pair_circuit(pair: ProbePair) -> LocalCircuit {
    let (axis, probes) = pair_layout(pair);
    u_z_circuit(axis, [slot::PARTICLE_1, slot::PARTICLE_2], probes, &T2_DIMS).expect("fixed layout is valid")
}

/// `Ũ_z U_y U_z` as a circuit: pair (3,6) first, then (2*,4*), then (3*,6*).
pub fn u_total_circuit() -> &'static LocalCircuit {
    static CIRCUIT: OnceLock<LocalCircuit> = OnceLock::new();
    CIRCUIT.get_or_init(|| {
        ProbePair::ALL
            .into_iter()
            .map(pair_circuit)
            .reduce(|acc, next| acc.then(&next).expect("same layout"))
            .expect("three pairs")
    })
}

/// Dense 2916-dimensional `U = Ũ_z U_y U_z`, built once per process.
pub fn build_u_total() -> &'static Operator {
    static DENSE: OnceLock<Operator> = OnceLock::new();
    DENSE.get_or_init(|| u_total_circuit().to_operator().expect("fixed layout is valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::STRUCT_TOL;

    #[test]
    fn couplings_are_unitary() {
        for axis in [Axis::Z, Axis::Y] {
            for o in [Orientation::Standard, Orientation::Swapped] {
                assert!(controlled_shift(axis, o).unitarity_defect() < 1e-15);
            }
        }
        let u = build_u_z(Axis::Z, [0, 1], [2, 3], &TZ_DIMS).unwrap();
        assert_eq!(u.kind(), OperatorKind::Unitary);
        assert!(u.is_unitary(STRUCT_TOL));
    }

    #[test]
    fn slot_collision_rejected() {
        assert!(matches!(build_u_z(Axis::Z, [0, 1], [2, 1], &TZ_DIMS), Err(Error::SlotCollision(_))));
        assert!(build_u_z(Axis::Z, [0, 2], [1, 3], &TZ_DIMS).is_err());
    }
}

//! Local measurement of nonlocal two-particle observables.
//!
//! Two isospin-1/2 particles interact locally with three-level probes
//! prepared in entangled pairs. Reading the probes reveals the sum of the
//! two spins (`T_z`, one pair) or the total isospin (`T²`, three pairs)
//! without revealing either spin separately. The `T²` version is not
//! "moral": starting from `|↑↑>` it can end in `|↓↓>`, which is what keeps
//! it from being usable for signaling.

mod branches;
pub mod classify;
pub mod probes;
pub mod signaling;
pub mod system;
pub mod t2;
pub mod tz;
pub mod unitary;

pub use classify::{classify_t2, classify_tz, T2Classification};
pub use probes::{phi, pi_1_m2, pi_2_m1, probe_pair_state, ProbeAssembly, ProbePair};
pub use signaling::{signaling_scenario, NonlocalMeasurement, SignalingExperiment};
pub use system::Axis;
pub use t2::{run_t2_protocol, PreparedT2, T2Branch, T2Result};
pub use tz::{run_tz_protocol, PreparedTz, TzBranch, TzResult};
pub use unitary::{build_u_total, build_u_z, Orientation, T2_DIMS, TZ_DIMS};

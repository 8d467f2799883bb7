//! Nonrelativistic stochastic reduction: GRW hits and discrete CSL.

pub mod csl;
pub mod grw;
pub mod lattice;
pub mod units;

pub use csl::{
    csl_run, csl_step, CslEnsembleMember, CslModel, CslRun, CslRunConfig, CslSampling, CslSnapshot, DriftConvention,
    MemberRecord,
};
pub use grw::{grw_evolve, grw_hit, grw_schedule, GridWavefunction, GrwHit, GrwParams};
pub use lattice::{mass_density_ops, Species};

//! Collapse on space-like surfaces in 1+1 Minkowski space (`c = 1`).
//!
//! States are assigned to piecewise-linear surfaces, reductions happen when
//! a surface crosses a switched-on apparatus, and a property of a particle
//! at `P` is objective iff the state on the past light cone of `P` is an
//! eigenstate of it. Only this past-light-cone criterion is implemented.

mod counterfactual;
mod geometry;
mod stats;
mod toy;

pub use counterfactual::{
    counterfactual_classify, hv_counterfactual_demo, ClaimTarget, CounterfactualClaim, HiddenVariableModel,
    HvDisagreement, HvReport, Legitimacy,
};
pub use geometry::{boost_velocity, in_volume, past_cone_surface, past_cone_union, SpacelikeSurface, SpacetimePoint};
pub use stats::{stats_parameter_independence, ParameterIndependence, PiEntry, Side};
pub use toy::{
    apparatus_reading, crossed, property_at, singlet, state_on_surface, Apparatus, Event, EventLog, PropertyVerdict,
    Reading, ScenarioConfig, WorldLine,
};

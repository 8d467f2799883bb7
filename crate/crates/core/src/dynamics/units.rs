//! Physical reference values and rate conversions.
//!
//! Simulations run in natural units (`ħ = 1`, γt as the clock). The
//! constants below only enter through these helpers.

/// Localization rate per nucleon, s⁻¹.
pub const GRW_LAMBDA: f64 = 1e-16;

/// Localization parameter α, cm⁻² (so `1/√α = 1e-5 cm`).
pub const GRW_ALPHA: f64 = 1e10;

/// Julian year in seconds.
pub const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;

/// Probability of at least one event of a Poisson process of `rate` in
/// `duration`.
pub fn hit_probability(rate: f64, duration: f64) -> f64 {
    -(-rate * duration).exp_m1()
}

/// Mean waiting time before the first of `constituents` independent
/// localizations.
pub fn suppression_time(constituents: f64, lambda: f64) -> f64 {
    1.0 / (constituents * lambda)
}

/// CSL coupling equivalent to GRW parameters: `γ = λ (4π/α)^{3/2}`.
pub fn csl_gamma_from_grw(lambda: f64, alpha: f64) -> f64 {
    lambda * (4.0 * std::f64::consts::PI / alpha).powf(1.5)
}

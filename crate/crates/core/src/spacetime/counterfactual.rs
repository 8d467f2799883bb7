//! Counterfactual claims under the past-light-cone criterion and a
//! deterministic hidden-variable completion of the two-particle model.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::geometry::{in_volume, past_cone_surface, SpacetimePoint};
use super::toy::{state_on_surface, EventLog, ScenarioConfig};
use crate::{Error, Result};

/// What a claim is about.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClaimTarget {
    /// An apparatus that is switched on in the actual world.
    Actual { apparatus: String },
    /// An apparatus that would be switched on at `at` on the world line of
    /// `particle`, where none is on in the actual world.
    Hypothetical { particle: usize, at: SpacetimePoint },
}

/// "Knowing the outcome of `fact`, the apparatus named by `target` would
/// register `asserted_outcome`", asserted by an observer at `vantage`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterfactualClaim {
    pub vantage: SpacetimePoint,
    pub fact: String,
    pub target: ClaimTarget,
    pub asserted_outcome: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Legitimacy {
    Legitimate,
    Illegitimate,
}

/// Claims about the actual configuration are not counterfactual and always
/// legitimate. A hypothetical apparatus at `W` is legitimate iff the fact
/// the reasoning rests on lies in `V(σ(W), σ₀)`, i.e. is already fixed
/// when the hypothetical measurement happens; a fact space-like to `W`
/// makes the claim illegitimate.
pub fn counterfactual_classify<R: Rng + ?Sized>(
    claim: &CounterfactualClaim,
    cfg: &ScenarioConfig,
    log: &mut EventLog,
    rng: &mut R,
) -> Result<Legitimacy> {
    if claim.asserted_outcome.abs() != 1 {
        return Err(Error::MalformedClaim(format!("outcome {} is not ±1", claim.asserted_outcome)));
    }
    let fact =
        cfg.apparatus(&claim.fact).ok_or_else(|| Error::MalformedClaim(format!("no apparatus {:?}", claim.fact)))?;
    if !fact.on {
        return Err(Error::MalformedClaim(format!("apparatus {:?} is switched off and registers nothing", fact.id)));
    }
    let seen = past_cone_surface(&claim.vantage, cfg.sigma0())?;
    if !in_volume(&fact.location, &seen, cfg.sigma0()) {
        return Err(Error::MalformedClaim(format!("the outcome at {:?} is not in the observer's past", fact.id)));
    }
    state_on_surface(cfg, &seen, log, rng)?;
    match &claim.target {
        ClaimTarget::Actual { apparatus } => {
            let a =
                cfg.apparatus(apparatus).ok_or_else(|| Error::MalformedClaim(format!("no apparatus {apparatus:?}")))?;
            if !a.on {
                return Err(Error::MalformedClaim(format!(
                    "apparatus {apparatus:?} is off in the actual world; use a hypothetical target"
                )));
            }
            Ok(Legitimacy::Legitimate)
        }
        ClaimTarget::Hypothetical { particle, at } => {
            let line = cfg
                .particles()
                .get(*particle)
                .ok_or_else(|| Error::MalformedClaim(format!("no particle {particle}")))?;
            if !line.contains(at) {
                return Err(Error::MalformedClaim("hypothetical apparatus is not on the particle's world line".into()));
            }
            if cfg.apparatuses().iter().any(|a| a.on && a.particle == *particle && a.location == *at) {
                return Err(Error::MalformedClaim("an apparatus is already on at the hypothetical point".into()));
            }
            let cone = past_cone_surface(at, cfg.sigma0())?;
            Ok(if in_volume(&fact.location, &cone, cfg.sigma0()) {
                Legitimacy::Legitimate
            } else {
                Legitimacy::Illegitimate
            })
        }
    }
}

/// Deterministic completion of the singlet model over a finite `Λ`.
///
/// `only_a[λ]` is the outcome at `A` when only `A` is on; `both_on[λ]` is
/// the outcome pair `(A, B)` when both are on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenVariableModel {
    names: Vec<String>,
    only_a: Vec<i8>,
    both_on: Vec<(i8, i8)>,
}

impl HiddenVariableModel {
    /// Requires ±1 outcomes, perfect anticorrelation with both on, and a
    /// nonempty `Λ₁₋₂`.
    pub fn new(names: Vec<String>, only_a: Vec<i8>, both_on: Vec<(i8, i8)>) -> Result<Self> {
        if names.is_empty() || names.len() != only_a.len() || names.len() != both_on.len() {
            return Err(Error::InvalidParameter("one name and two outcome maps entries per λ".into()));
        }
        let pm = |v: i8| v == 1 || v == -1;
        if !only_a.iter().copied().all(pm) || !both_on.iter().all(|&(a, b)| pm(a) && pm(b)) {
            return Err(Error::InvalidParameter("outcomes must be ±1".into()));
        }
        if both_on.iter().any(|&(a, b)| a == b) {
            return Err(Error::InvalidParameter("both-on outcomes must be anticorrelated".into()));
        }
        let model = Self { names, only_a, both_on };
        if model.lambda_1_2().is_empty() {
            return Err(Error::LocalModel("Λ₁₋₂ is empty: switching on B never changes the outcome at A".into()));
        }
        Ok(model)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// `Λ₁(2, sign)`: indices whose only-A outcome is `sign`.
    pub fn lambda_1(&self, sign: i8) -> Vec<usize> {
        (0..self.names.len()).filter(|&k| self.only_a[k] == sign).collect()
    }

    /// `λ ∈ Λ₁(2,+)` with both-on outcomes `(A: −1, B: +1)`.
    pub fn lambda_1_2(&self) -> Vec<usize> {
        (0..self.names.len()).filter(|&k| self.only_a[k] == 1 && self.both_on[k] == (-1, 1)).collect()
    }

    pub fn both_on(&self, k: usize) -> (i8, i8) {
        self.both_on[k]
    }
}

/// Both accessibility criteria applied to one `λ ∈ Λ₁₋₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HvDisagreement {
    pub lambda: String,
    /// Both-on outcomes `(A, B)` in the world with the same `λ`.
    pub same_lambda: (i8, i8),
    /// Outcome at `B` in both-on worlds where `A` still registers `+1`.
    pub same_outcome_b: i8,
    /// Those worlds, restricted to `Λ₁(2,−)`.
    pub same_outcome_worlds: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HvReport {
    pub flagged: Vec<HvDisagreement>,
}

impl HvReport {
    pub fn criteria_disagree(&self) -> bool {
        self.flagged.iter().any(|d| d.same_lambda.1 != d.same_outcome_b)
    }
}

/// Actual world: only `A` on and registering `+1`, with `λ ∈ Λ₁₋₂`. Asks
/// what `B` would register were it also on.
pub fn hv_counterfactual_demo(model: &HiddenVariableModel) -> Result<HvReport> {
    let minus = model.lambda_1(-1);
    let flagged: Vec<HvDisagreement> = model
        .lambda_1_2()
        .into_iter()
        .map(|k| HvDisagreement {
            lambda: model.names[k].clone(),
            same_lambda: model.both_on[k],
            same_outcome_b: -1,
            same_outcome_worlds: minus
                .iter()
                .filter(|&&j| model.both_on[j].0 == 1)
                .map(|&j| model.names[j].clone())
                .collect(),
        })
        .collect();
    let report = HvReport { flagged };
    if !report.criteria_disagree() {
        return Err(Error::LocalModel("accessibility criteria agree on every λ".into()));
    }
    Ok(report)
}

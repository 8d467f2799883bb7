//! Frequency estimates for the two-particle singlet scenario.

use serde::{Deserialize, Serialize};

use super::geometry::{past_cone_union, SpacetimePoint};
use super::toy::{state_on_surface, EventLog, ScenarioConfig};
use crate::exec::map_trials;
use crate::stats::binomial_sigma;
use crate::{Error, Result};

/// `L` is apparatus `"B"` on particle 1, `R` is apparatus `"A"` on
/// particle 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn apparatus(self) -> &'static str {
        match self {
            Side::L => "B",
            Side::R => "A",
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }
}

/// `P_S(outcome | g_{S*} = other_on)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiEntry {
    pub side: Side,
    pub outcome: i8,
    pub other_on: bool,
    pub probability: f64,
    pub sigma: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterIndependence {
    pub entries: Vec<PiEntry>,
    /// Trials with both apparatuses on in which they agreed.
    pub both_on_same_outcome: usize,
    pub both_on_trials: usize,
}

impl ParameterIndependence {
    pub fn entry(&self, side: Side, outcome: i8, other_on: bool) -> Option<&PiEntry> {
        self.entries.iter().find(|e| e.side == side && e.outcome == outcome && e.other_on == other_on)
    }
}

/// Runs `n_trials` per switch setting with the measured side on and the
/// other side on or off, reading outcomes on a surface above every
/// apparatus. `template` must contain apparatuses `"A"` and `"B"`.
pub fn stats_parameter_independence(
    template: &ScenarioConfig,
    n_trials: usize,
    seed: u64,
) -> Result<ParameterIndependence> {
    if n_trials == 0 {
        return Err(Error::InvalidParameter("n_trials must be positive".into()));
    }
    for id in ["A", "B"] {
        if template.apparatus(id).is_none() {
            return Err(Error::InvalidScenario(format!("template lacks apparatus {id:?}")));
        }
    }
    let lifted: Vec<SpacetimePoint> =
        template.apparatuses().iter().map(|a| SpacetimePoint::new(a.location.x, a.location.t + 1.0)).collect();
    let above = past_cone_union(&lifted, template.sigma0())?;
    let mut entries = Vec::new();
    let mut both = (0, 0);
    for (block, side) in [Side::L, Side::R].into_iter().enumerate() {
        for other_on in [false, true] {
            let cfg = template.with_switch(side.apparatus(), true)?.with_switch(side.other().apparatus(), other_on)?;
            let block_seed = seed.wrapping_add(2 * block as u64 + other_on as u64);
            let outcomes = map_trials(n_trials, block_seed, |_, rng| -> Result<(i8, Option<i8>)> {
                let mut log = EventLog::new();
                state_on_surface(&cfg, &above, &mut log, rng)?;
                let mine = log.get(side.apparatus()).map(|e| e.outcome);
                let theirs = log.get(side.other().apparatus()).map(|e| e.outcome);
                Ok((mine.ok_or_else(|| Error::InvalidScenario("measured apparatus not crossed".into()))?, theirs))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let plus = outcomes.iter().filter(|o| o.0 == 1).count();
            for (outcome, count) in [(1, plus), (-1, n_trials - plus)] {
                let p = count as f64 / n_trials as f64;
                entries.push(PiEntry {
                    side,
                    outcome,
                    other_on,
                    probability: p,
                    sigma: binomial_sigma(0.5, n_trials),
                    trials: n_trials,
                });
            }
            if other_on {
                both.0 += outcomes.iter().filter(|(a, b)| Some(*a) == *b).count();
                both.1 += n_trials;
            }
        }
    }
    Ok(ParameterIndependence { entries, both_on_same_outcome: both.0, both_on_trials: both.1 })
}

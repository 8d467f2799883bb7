//! Hypersurface-indexed collapse for particles on classical world lines.
//!
//! Each particle carries a two-level observable `Θ` with eigenvalues ±1
//! (basis index 0 is `+`, 1 is `−`). An apparatus sits at a point of one
//! world line and, when switched on, fixes `Θ` of that particle once any
//! surface crosses it. Outcomes are memoized in an [`EventLog`], so the
//! state on a surface depends only on which apparatus points the surface
//! has crossed, not on the order in which surfaces are visited.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::geometry::{boost_velocity, in_volume, past_cone_surface, SpacelikeSurface, SpacetimePoint};
use crate::linalg::{sample_index, StateVector};
use crate::{Error, Result};

const ON_WORLD_LINE_TOL: f64 = 1e-9;
const EIGEN_TOL: f64 = 1e-10;

/// `x(t) = origin.x + velocity · (t − origin.t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorldLine {
    pub origin: SpacetimePoint,
    pub velocity: f64,
}

impl WorldLine {
    pub fn at_rest(x: f64) -> Self {
        Self { origin: SpacetimePoint::new(x, 0.0), velocity: 0.0 }
    }

    pub fn at_time(&self, t: f64) -> SpacetimePoint {
        SpacetimePoint::new(self.origin.x + self.velocity * (t - self.origin.t), t)
    }

    pub fn contains(&self, p: &SpacetimePoint) -> bool {
        (self.at_time(p.t).x - p.x).abs() <= ON_WORLD_LINE_TOL
    }

    pub fn boosted(&self, v: f64) -> Self {
        Self { origin: self.origin.boosted(v), velocity: boost_velocity(self.velocity, v) }
    }
}

/// An apparatus measuring `Θ` of `particle` at `location`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Apparatus {
    pub id: String,
    pub particle: usize,
    pub location: SpacetimePoint,
    pub on: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    particles: Vec<WorldLine>,
    apparatuses: Vec<Apparatus>,
    initial_state: StateVector,
    sigma0: SpacelikeSurface,
}

impl ScenarioConfig {
    pub fn new(
        particles: Vec<WorldLine>,
        apparatuses: Vec<Apparatus>,
        initial_state: StateVector,
        sigma0: SpacelikeSurface,
    ) -> Result<Self> {
        let n = particles.len();
        if n == 0 {
            return Err(Error::InvalidScenario("at least one particle required".into()));
        }
        if particles.iter().any(|w| w.velocity.abs() >= 1.0) {
            return Err(Error::InvalidScenario("world-line velocities must satisfy |v| < 1".into()));
        }
        if initial_state.factor_dims() != vec![2; n].as_slice() {
            return Err(Error::InvalidScenario(format!(
                "initial state has factors {:?}, expected one qubit per particle",
                initial_state.factor_dims()
            )));
        }
        if !initial_state.is_normalized() {
            return Err(Error::InvalidScenario("initial state is not normalized".into()));
        }
        let mut ids = std::collections::BTreeSet::new();
        for a in &apparatuses {
            if !ids.insert(a.id.as_str()) {
                return Err(Error::InvalidScenario(format!("duplicate apparatus id {:?}", a.id)));
            }
            let line = particles.get(a.particle).ok_or_else(|| {
                Error::InvalidScenario(format!("apparatus {:?} targets missing particle {}", a.id, a.particle))
            })?;
            if !line.contains(&a.location) {
                return Err(Error::InvalidScenario(format!(
                    "apparatus {:?} is not on the world line of particle {}",
                    a.id, a.particle
                )));
            }
            if a.location.t < sigma0.eval(a.location.x) {
                return Err(Error::BelowInitialSurface { x: a.location.x, t: a.location.t });
            }
        }
        Ok(Self { particles, apparatuses, initial_state, sigma0 })
    }

    /// One particle at rest at `r.x` in `α|+> + β|−>`, apparatus `"A"` at
    /// `r`, initial surface `t = 0`.
    pub fn one_particle(alpha: Complex64, beta: Complex64, r: SpacetimePoint, on: bool) -> Result<Self> {
        let state = StateVector::from_amplitudes(vec![alpha, beta])?;
        let a = Apparatus { id: "A".into(), particle: 0, location: r, on };
        Self::new(vec![WorldLine::at_rest(r.x)], vec![a], state, SpacelikeSurface::flat(0.0))
    }

    /// Two particles at rest in the singlet, particle 1 through `l` with
    /// apparatus `"B"`, particle 2 through `r` with apparatus `"A"`.
    pub fn singlet_pair(r: SpacetimePoint, l: SpacetimePoint, g_a: bool, g_b: bool) -> Result<Self> {
        let apparatuses = vec![
            Apparatus { id: "A".into(), particle: 1, location: r, on: g_a },
            Apparatus { id: "B".into(), particle: 0, location: l, on: g_b },
        ];
        let lines = vec![WorldLine::at_rest(l.x), WorldLine::at_rest(r.x)];
        Self::new(lines, apparatuses, singlet(), SpacelikeSurface::flat(0.0))
    }

    pub fn particles(&self) -> &[WorldLine] {
        &self.particles
    }

    pub fn apparatuses(&self) -> &[Apparatus] {
        &self.apparatuses
    }

    pub fn apparatus(&self, id: &str) -> Option<&Apparatus> {
        self.apparatuses.iter().find(|a| a.id == id)
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.initial_state
    }

    pub fn sigma0(&self) -> &SpacelikeSurface {
        &self.sigma0
    }

    /// Copy with apparatus `id` switched on or off.
    pub fn with_switch(&self, id: &str, on: bool) -> Result<Self> {
        let mut out = self.clone();
        let a = out
            .apparatuses
            .iter_mut()
            .find(|a| a.id == id)
            .ok_or_else(|| Error::InvalidScenario(format!("no apparatus {id:?}")))?;
        a.on = on;
        Ok(out)
    }

    /// The whole scenario seen from a frame moving with velocity `v`.
    pub fn boosted(&self, v: f64) -> Self {
        Self {
            particles: self.particles.iter().map(|w| w.boosted(v)).collect(),
            apparatuses: self
                .apparatuses
                .iter()
                .map(|a| Apparatus { location: a.location.boosted(v), ..a.clone() })
                .collect(),
            initial_state: self.initial_state.clone(),
            sigma0: self.sigma0.boosted(v),
        }
    }
}

/// `(|1+,2−> − |1−,2+>)/√2`.
pub fn singlet() -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::new(
        vec![Complex64::new(0.0, 0.0), Complex64::new(s, 0.0), Complex64::new(-s, 0.0), Complex64::new(0.0, 0.0)],
        vec![2, 2],
    )
    .expect("four amplitudes on two qubits")
}

fn value_of(index: usize) -> i8 {
    if index == 0 {
        1
    } else {
        -1
    }
}

fn index_of(value: i8) -> usize {
    if value > 0 {
        0
    } else {
        1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub outcome: i8,
    pub point: SpacetimePoint,
}

/// Outcomes fixed so far in one run.
///
/// The first time a surface crosses any switched-on apparatus, one joint
/// Born draw fixes `Θ` of every particle that a switched-on apparatus
/// measures. Crossed apparatuses then write their event once and keep it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    events: BTreeMap<String, Event>,
    joint: Option<Vec<Option<i8>>>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn events(&self) -> &BTreeMap<String, Event> {
        &self.events
    }

    pub fn get(&self, id: &str) -> Option<&Event> {
        self.events.get(id)
    }

    fn joint_values<R: Rng + ?Sized>(&mut self, cfg: &ScenarioConfig, rng: &mut R) -> Result<&[Option<i8>]> {
        if self.joint.is_none() {
            let mut measured: Vec<usize> = cfg.apparatuses.iter().filter(|a| a.on).map(|a| a.particle).collect();
            measured.sort_unstable();
            measured.dedup();
            let probs = cfg.initial_state.joint_marginal(&measured)?;
            let mut k = sample_index(&probs, rng);
            let mut values = vec![None; cfg.particles.len()];
            for &p in measured.iter().rev() {
                values[p] = Some(value_of(k % 2));
                k /= 2;
            }
            self.joint = Some(values);
        }
        Ok(self.joint.as_deref().expect("just set"))
    }
}

/// Switched-on apparatuses whose point lies in `V(σ, σ₀)`.
pub fn crossed<'a>(cfg: &'a ScenarioConfig, sigma: &SpacelikeSurface) -> Vec<&'a Apparatus> {
    cfg.apparatuses.iter().filter(|a| a.on && in_volume(&a.location, sigma, &cfg.sigma0)).collect()
}

/// `|Ψ(σ)>`: the initial state if no switched-on apparatus lies in
/// `V(σ, σ₀)`, otherwise the normalized projection onto the outcomes of
/// the crossed apparatuses.
pub fn state_on_surface<R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    sigma: &SpacelikeSurface,
    log: &mut EventLog,
    rng: &mut R,
) -> Result<StateVector> {
    if !sigma.dominates(&cfg.sigma0) {
        return Err(Error::InvalidParameter("surface dips below the initial surface".into()));
    }
    let hit = crossed(cfg, sigma);
    if hit.is_empty() {
        return Ok(cfg.initial_state.clone());
    }
    let values = log.joint_values(cfg, rng)?.to_vec();
    let mut slots = Vec::new();
    let mut digits = Vec::new();
    for a in hit {
        let outcome = values[a.particle].expect("switched-on apparatus particles are drawn");
        log.events.entry(a.id.clone()).or_insert(Event { outcome, point: a.location });
        if !slots.contains(&a.particle) {
            slots.push(a.particle);
            digits.push(index_of(outcome));
        }
    }
    cfg.initial_state.project_slots(&slots, &digits)?.normalized()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropertyVerdict {
    Indefinite,
    Definite(i8),
}

/// `Θ` of `particle` at `p` is objective iff `|Ψ(σ(P))>` is one of its
/// eigenstates.
pub fn property_at<R: Rng + ?Sized>(
    p: &SpacetimePoint,
    particle: usize,
    cfg: &ScenarioConfig,
    log: &mut EventLog,
    rng: &mut R,
) -> Result<PropertyVerdict> {
    if particle >= cfg.particles.len() {
        return Err(Error::InvalidParameter(format!("no particle {particle}")));
    }
    let sigma = past_cone_surface(p, &cfg.sigma0)?;
    let state = state_on_surface(cfg, &sigma, log, rng)?;
    let marginal = state.slot_marginal(particle)?;
    Ok(if marginal[0] >= 1.0 - EIGEN_TOL {
        PropertyVerdict::Definite(1)
    } else if marginal[1] >= 1.0 - EIGEN_TOL {
        PropertyVerdict::Definite(-1)
    } else {
        PropertyVerdict::Indefinite
    })
}

/// Internal state of an apparatus pointer: ready, or showing `±`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reading {
    Ready,
    Plus,
    Minus,
}

/// Pointer state of apparatus `id` at time `t` on its own (rest) world
/// line. Always definite: `Ready` before the interaction or when switched
/// off, the registered outcome afterwards.
pub fn apparatus_reading<R: Rng + ?Sized>(
    id: &str,
    t: f64,
    cfg: &ScenarioConfig,
    log: &mut EventLog,
    rng: &mut R,
) -> Result<Reading> {
    let a = cfg.apparatus(id).ok_or_else(|| Error::InvalidParameter(format!("no apparatus {id:?}")))?;
    if !a.on || t <= a.location.t {
        return Ok(Reading::Ready);
    }
    let here = SpacetimePoint::new(a.location.x, t);
    let sigma = past_cone_surface(&here, &cfg.sigma0)?;
    state_on_surface(cfg, &sigma, log, rng)?;
    let event = log.get(id).expect("apparatus lies in the past cone of its own later points");
    Ok(if event.outcome > 0 { Reading::Plus } else { Reading::Minus })
}

//! The `T²` protocol run surface by surface.
//!
//! `U = U^(1) ⊗ U^(2)` splits into the couplings of particle 1 with probes
//! 3, 2*, 3* and of particle 2 with probes 6, 4*, 6*. The right wing
//! interacts first (`σ₁`), its detectors `Ω^[6]`, `Ω^[4*]`, `Ω^[6*]`
//! reduce the state (`σ₂`), then the left wing interacts and its probes end
//! in a definite product state (`σ_final`).

use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{digits_of, index_of, kron, sample_index, LocalCircuit, Operator, StateVector};
use crate::protocol::classify_t2;
use crate::protocol::probes::{probe_index, probe_value};
use crate::protocol::system::{singlet, Axis};
use crate::protocol::t2::t2_probe_state;
use crate::protocol::unitary::{controlled_shift, slot, Orientation, T2_DIMS};
use crate::spacetime::{in_volume, past_cone_union, SpacelikeSurface, SpacetimePoint};
use crate::trace::{RunTrace, TraceRecord};
use crate::{Error, Result};

/// Smallest branch probability accepted for a forced outcome triple.
pub const FORCED_FLOOR: f64 = 1e-20;
const SINGLET_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Particle 1 with probes 3, 2*, 3*.
    Left,
    /// Particle 2 with probes 6, 4*, 6*.
    Right,
}

impl Side {
    pub fn particle(self) -> usize {
        match self {
            Side::Left => slot::PARTICLE_1,
            Side::Right => slot::PARTICLE_2,
        }
    }

    /// Probe slots in coupling order: z pair, y pair, second z pair.
    pub fn probes(self) -> [usize; 3] {
        match self {
            Side::Left => [slot::P3, slot::P2S, slot::P3S],
            Side::Right => [slot::P6, slot::P4S, slot::P6S],
        }
    }
}

/// Which reading of the one-wing factor to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// The restriction of `Ũ_z U_y U_z` to one wing: z coupling first, then
    /// y, then the second z coupling, all in the standard orientation.
    Resolved,
    /// Reversed order with the second z pair's shifts exchanged: that pair
    /// acts first, then y, then the first z pair.
    ReversedSwapped,
}

/// One-wing factor as a three-gate circuit over [`T2_DIMS`].
pub fn u_factor_circuit(side: Side, variant: Variant) -> LocalCircuit {
    let p = side.particle();
    let [z1, y, z2] = side.probes();
    let first = controlled_shift(Axis::Z, Orientation::Standard);
    let middle = controlled_shift(Axis::Y, Orientation::Standard);
    let mut c = LocalCircuit::new(&T2_DIMS);
    let gates = match variant {
        Variant::Resolved => [(first.clone(), z1), (middle, y), (first, z2)],
        Variant::ReversedSwapped => [(controlled_shift(Axis::Z, Orientation::Swapped), z2), (middle, y), (first, z1)],
    };
    for (g, probe) in gates {
        c.push(g, &[p, probe]).expect("fixed layout is valid");
    }
    c
}

/// Dense 2916-dimensional `U^(1)` or `U^(2)`.
pub fn u_factor(side: Side, variant: Variant) -> Operator {
    u_factor_circuit(side, variant).to_operator().expect("fixed layout is valid")
}

/// `|system> ⊗ |φ>_{3,6} ⊗ |φ>_{2*,4*} ⊗ |φ>_{3*,6*}`.
pub fn initial_state(system: &StateVector) -> Result<StateVector> {
    let system = crate::protocol::system::validate_system(system)?;
    Ok(kron(&system, &t2_probe_state()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceTag {
    Sigma0,
    Sigma1,
    Sigma2,
    Final,
}

impl SurfaceTag {
    pub fn label(self) -> &'static str {
        match self {
            SurfaceTag::Sigma0 => "sigma0",
            SurfaceTag::Sigma1 => "sigma1",
            SurfaceTag::Sigma2 => "sigma2",
            SurfaceTag::Final => "final",
        }
    }
}

/// State of particles and probes on one surface of the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StagedState {
    pub tag: SurfaceTag,
    pub state: StateVector,
    pub variant: Variant,
    /// `(Ω^[6], Ω^[4*], Ω^[6*])`, once the right detectors have fired.
    pub right_outcomes: Option<[i8; 3]>,
    /// Whether `right_outcomes` were imposed rather than sampled.
    pub forced: bool,
    /// Values of probes 3, 2*, 3* at the end of the run.
    pub left_outcomes: Option<[i8; 3]>,
}

fn expect_tag(staged: &StagedState, tag: SurfaceTag) -> Result<()> {
    if staged.tag != tag {
        return Err(Error::InvalidParameter(format!(
            "expected a state on {}, got {}",
            tag.label(),
            staged.tag.label()
        )));
    }
    Ok(())
}

pub fn stage0(system: &StateVector, variant: Variant) -> Result<StagedState> {
    Ok(StagedState {
        tag: SurfaceTag::Sigma0,
        state: initial_state(system)?,
        variant,
        right_outcomes: None,
        forced: false,
        left_outcomes: None,
    })
}

/// `|Ψ(σ₁)> = U^(2) |Ψ(σ₀)>` for a full particles-and-probes state.
pub fn evolve_sigma1(initial: &StateVector) -> Result<StagedState> {
    evolve_sigma1_variant(initial, Variant::Resolved)
}

pub fn evolve_sigma1_variant(initial: &StateVector, variant: Variant) -> Result<StagedState> {
    if !initial.is_normalized() {
        return Err(Error::InvalidParameter(format!("initial state has norm² {}", initial.norm_sqr())));
    }
    let state = u_factor_circuit(Side::Right, variant).apply(initial)?;
    Ok(StagedState {
        tag: SurfaceTag::Sigma1,
        state,
        variant,
        right_outcomes: None,
        forced: false,
        left_outcomes: None,
    })
}

/// Joint distribution of `(Ω^[6], Ω^[4*], Ω^[6*])`, indexed by
/// [`triple_index`].
pub fn right_outcome_probabilities(staged: &StagedState) -> Result<Vec<f64>> {
    expect_tag(staged, SurfaceTag::Sigma1)?;
    staged.state.joint_marginal(&Side::Right.probes())
}

/// Index of an outcome triple in the 27-entry distributions, first entry
/// most significant, probe basis order `+1, 0, −1`.
pub fn triple_index(triple: [i8; 3]) -> Result<usize> {
    let digits = triple.iter().map(|&v| probe_index(v)).collect::<Result<Vec<_>>>()?;
    Ok(index_of(&digits, &[3, 3, 3]))
}

pub fn triple_of(index: usize) -> [i8; 3] {
    let d = digits_of(index, &[3, 3, 3]);
    [probe_value(d[0]), probe_value(d[1]), probe_value(d[2])]
}

/// All 27 triples in [`triple_index`] order.
pub fn all_triples() -> Vec<[i8; 3]> {
    (0..27).map(triple_of).collect()
}

/// Right-wing detector reduction. A forced triple bypasses sampling but
/// must have nonzero probability.
pub fn reduce_right<R: Rng + ?Sized>(
    staged: &StagedState,
    forced: Option<[i8; 3]>,
    rng: &mut R,
) -> Result<StagedState> {
    let probs = right_outcome_probabilities(staged)?;
    let k = match forced {
        Some(t) => {
            let k = triple_index(t)?;
            if probs[k] < FORCED_FLOOR {
                return Err(Error::ZeroProbability(format!("right-wing outcomes {t:?}")));
            }
            k
        }
        None => sample_index(&probs, rng),
    };
    let triple = triple_of(k);
    let digits = digits_of(k, &[3, 3, 3]);
    let state = staged.state.project_slots(&Side::Right.probes(), &digits)?.normalized()?;
    Ok(StagedState {
        tag: SurfaceTag::Sigma2,
        state,
        variant: staged.variant,
        right_outcomes: Some(triple),
        forced: forced.is_some(),
        left_outcomes: None,
    })
}

/// Applies `U^(1)` and reads the left probes, which must then sit in a
/// definite product basis state.
pub fn evolve_final(staged: &StagedState) -> Result<StagedState> {
    expect_tag(staged, SurfaceTag::Sigma2)?;
    let state = u_factor_circuit(Side::Left, staged.variant).apply(&staged.state)?;
    let (digits, _) = state.split_basis_factor(&slot::PROBES, SINGLET_TOL)?;
    let value = |s: usize| probe_value(digits[slot::PROBES.iter().position(|&p| p == s).expect("probe slot")]);
    let left = Side::Left.probes().map(value);
    Ok(StagedState { tag: SurfaceTag::Final, state, left_outcomes: Some(left), ..staged.clone() })
}

/// Applies `U^(1)` and lets the left detectors reduce the probes. For the
/// singlet the left probes are already definite and this agrees with
/// [`evolve_final`]; other inputs leave them in superposition.
pub fn evolve_final_reducing<R: Rng + ?Sized>(staged: &StagedState, rng: &mut R) -> Result<StagedState> {
    expect_tag(staged, SurfaceTag::Sigma2)?;
    let coupled = u_factor_circuit(Side::Left, staged.variant).apply(&staged.state)?;
    let slots = Side::Left.probes();
    let probs = coupled.joint_marginal(&slots)?;
    let k = sample_index(&probs, rng);
    let digits = digits_of(k, &[3, 3, 3]);
    let state = coupled.project_slots(&slots, &digits)?.normalized()?;
    let left = [probe_value(digits[0]), probe_value(digits[1]), probe_value(digits[2])];
    Ok(StagedState { tag: SurfaceTag::Final, state, left_outcomes: Some(left), ..staged.clone() })
}

/// Values of all six probes and the system factor, for a state that is a
/// probe basis product.
pub fn split_final(staged: &StagedState) -> Result<([i8; 6], StateVector)> {
    let (digits, system) = staged.state.split_basis_factor(&slot::PROBES, SINGLET_TOL)?;
    let mut omegas = [0i8; 6];
    for (o, d) in omegas.iter_mut().zip(digits) {
        *o = probe_value(d);
    }
    Ok((omegas, system))
}

/// `‖(|S><S| ⊗ 1) ψ‖² / ‖ψ‖²`.
pub fn singlet_weight(state: &StateVector) -> Result<f64> {
    let proj = Operator::projector_onto(&singlet())?;
    Ok(proj.apply_on(&[slot::PARTICLE_1, slot::PARTICLE_2], state)?.norm_sqr() / state.norm_sqr())
}

/// Pair sums `ω3+ω6`, `ω2*+ω4*`, `ω3*+ω6*` from six probe values in slot
/// order.
pub fn pair_sums(omegas: [i8; 6]) -> [i8; 3] {
    [omegas[0] + omegas[1], omegas[2] + omegas[3], omegas[4] + omegas[5]]
}

fn record(staged: &StagedState, description: &str, amplitudes: bool) -> TraceRecord {
    let mut r = TraceRecord::new(staged.tag.label(), description).with_state(&staged.state, amplitudes);
    if let Some(t) = staged.right_outcomes {
        for (name, v) in ["omega6", "omega4*", "omega6*"].into_iter().zip(t) {
            r = r.outcome(name, v as i64);
        }
    }
    if let Some(t) = staged.left_outcomes {
        for (name, v) in ["omega3", "omega2*", "omega3*"].into_iter().zip(t) {
            r = r.outcome(name, v as i64);
        }
    }
    r
}

/// Options for [`run_full`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub variant: Variant,
    /// Dump full amplitude lists into the trace.
    pub amplitudes: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { variant: Variant::Resolved, amplitudes: false }
    }
}

/// `σ₀ → σ₁ → σ₂ → σ_final` for the singlet, checking the zero-sum and
/// singlet-conservation invariants into the trace.
pub fn run_full<R: Rng + ?Sized>(forced: Option<[i8; 3]>, rng: &mut R) -> Result<(RunTrace, StagedState)> {
    run_full_from(&singlet(), forced, RunOptions::default(), None, rng)
}

pub fn run_full_from<R: Rng + ?Sized>(
    system: &StateVector,
    forced: Option<[i8; 3]>,
    options: RunOptions,
    seed: Option<u64>,
    rng: &mut R,
) -> Result<(RunTrace, StagedState)> {
    let mut trace = RunTrace::new("relativistic-t2", seed);
    let s0 = stage0(system, options.variant)?;
    trace.push(record(&s0, "system with probes in |φ> on the initial surface", options.amplitudes));
    let s1 = evolve_sigma1_variant(&s0.state, options.variant)?;
    let w1 = singlet_weight(&s1.state)?;
    trace.push(
        record(&s1, "right-wing probes coupled to particle 2", options.amplitudes).probability("singlet_weight", w1),
    );
    let probs = right_outcome_probabilities(&s1)?;
    let s2 = reduce_right(&s1, forced, rng)?;
    let k = triple_index(s2.right_outcomes.expect("set by reduce_right"))?;
    trace.push(
        record(&s2, "right-wing detectors registered", options.amplitudes)
            .probability("right_outcome_probability", probs[k]),
    );
    let singlet_input = singlet_weight(&s0.state)? >= 1.0 - SINGLET_TOL;
    let fin = if singlet_input { evolve_final(&s2)? } else { evolve_final_reducing(&s2, rng)? };
    let (omegas, final_system) = split_final(&fin)?;
    let w = singlet_weight(&fin.state)?;
    trace.push(
        record(&fin, "left-wing probes coupled to particle 1 and read", options.amplitudes)
            .probability("singlet_weight", w),
    );
    let sums = pair_sums(omegas);
    let class = classify_t2(omegas)?;
    let matches = final_system.approx_eq_up_to_phase(&class.state(), SINGLET_TOL);
    trace.check(
        "final system matches probe classification",
        matches,
        format!("omegas {omegas:?} classified {} [invariant]", class.label()),
    );
    if singlet_input {
        trace.check("pair sums zero", sums == [0, 0, 0], format!("{sums:?} [analytic]"));
        trace.check("final system is the singlet", w >= 1.0 - SINGLET_TOL, format!("singlet weight {w} [analytic]"));
    }
    trace.check(
        "final state normalized",
        fin.state.is_normalized(),
        format!("norm² {} [invariant]", fin.state.norm_sqr()),
    );
    Ok((trace, fin))
}

/// Dense `U^(1) U^(2)` of the resolved variant, built once per process.
pub fn u_product() -> &'static Operator {
    static DENSE: OnceLock<Operator> = OnceLock::new();
    DENSE.get_or_init(|| {
        u_factor_circuit(Side::Right, Variant::Resolved)
            .then(&u_factor_circuit(Side::Left, Variant::Resolved))
            .expect("same layout")
            .to_operator()
            .expect("fixed layout is valid")
    })
}

/// Where the interactions and right detectors sit in spacetime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativisticGeometry {
    pub sigma0: SpacelikeSurface,
    pub left_interaction: SpacetimePoint,
    pub right_interaction: SpacetimePoint,
    pub right_detectors: SpacetimePoint,
}

impl Default for RelativisticGeometry {
    fn default() -> Self {
        Self {
            sigma0: SpacelikeSurface::flat(0.0),
            left_interaction: SpacetimePoint::new(-5.0, 2.0),
            right_interaction: SpacetimePoint::new(5.0, 1.0),
            right_detectors: SpacetimePoint::new(5.0, 1.5),
        }
    }
}

/// `T²` of the pair as judged on a surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum T2Verdict {
    Indefinite,
    Definite(u8),
}

impl RelativisticGeometry {
    pub fn validate(&self) -> Result<()> {
        if !self.right_interaction.causally_precedes(&self.right_detectors)
            || self.right_interaction == self.right_detectors
        {
            return Err(Error::InvalidScenario("right detectors must follow the right interaction region".into()));
        }
        for p in [self.left_interaction, self.right_interaction] {
            if p.t < self.sigma0.eval(p.x) {
                return Err(Error::BelowInitialSurface { x: p.x, t: p.t });
            }
        }
        Ok(())
    }

    /// State on `sigma` for a run whose right detectors give `outcomes`.
    pub fn state_on(&self, sigma: &SpacelikeSurface, system: &StateVector, outcomes: [i8; 3]) -> Result<StateVector> {
        self.validate()?;
        let crossed = |p: &SpacetimePoint| in_volume(p, sigma, &self.sigma0);
        let mut state = initial_state(system)?;
        if crossed(&self.right_interaction) {
            state = u_factor_circuit(Side::Right, Variant::Resolved).apply(&state)?;
        }
        if crossed(&self.right_detectors) {
            let digits = outcomes.iter().map(|&v| probe_index(v)).collect::<Result<Vec<_>>>()?;
            state = state.project_slots(&Side::Right.probes(), &digits)?;
            if state.norm_sqr() < FORCED_FLOOR {
                return Err(Error::ZeroProbability(format!("right-wing outcomes {outcomes:?}")));
            }
            state = state.normalized()?;
        }
        if crossed(&self.left_interaction) {
            state = u_factor_circuit(Side::Left, Variant::Resolved).apply(&state)?;
        }
        Ok(state)
    }

    /// Verdict on the boundary of the past light cones of `points`.
    pub fn t2_verdict(&self, points: &[SpacetimePoint], system: &StateVector, outcomes: [i8; 3]) -> Result<T2Verdict> {
        let sigma = past_cone_union(points, &self.sigma0)?;
        let w = singlet_weight(&self.state_on(&sigma, system, outcomes)?)?;
        Ok(if w >= 1.0 - SINGLET_TOL {
            T2Verdict::Definite(0)
        } else if w <= SINGLET_TOL {
            T2Verdict::Definite(2)
        } else {
            T2Verdict::Indefinite
        })
    }
}

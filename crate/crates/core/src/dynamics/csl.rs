//! Discrete-channel continuous spontaneous localization.
//!
//! The linear stochastic equation `dΨ = [−iH dt + Σ A_i dW_i − κγ Σ A_i² dt] Ψ`
//! is integrated with Euler–Maruyama, `dW_i` centered Gaussian of variance
//! `γ dt` under the raw measure. With the Stratonovich reading of the
//! equation the Itô drift coefficient is `κ = 1/2`, which makes
//! `E_raw[‖Ψ‖²]` a martingale; the literal Itô reading (`κ = 1`) makes it
//! decay like `exp(−γ⟨ΣA²⟩t)` and is kept only for comparison.
//!
//! Physical ensembles use the cooked measure, `raw density × ‖Ψ‖²`. Three
//! ways of sampling it are offered:
//!
//! * [`CslSampling::Raw`]: raw noise, cooked weight `‖Ψ‖²`.
//! * [`CslSampling::Resampled`]: raw noise with weight-proportional
//!   branching whenever the effective sample size drops.
//! * [`CslSampling::Guided`]: noise drawn with the cooked drift
//!   `2γ⟨A_i⟩dt`; `raw_weight` carries the raw/proposal density ratio, so
//!   cooked weights stay close to one even at large γt.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::exec::for_each_mut;
use crate::linalg::{Complex64, Operator, StateVector, I, STRUCT_TOL};
use crate::rng::{trial_rng, SimRng};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DriftConvention {
    /// Itô drift `−(γ/2) Σ A_i²`.
    #[default]
    Stratonovich,
    /// Itô drift `−γ Σ A_i²`.
    Ito,
}

impl DriftConvention {
    fn coefficient(self) -> f64 {
        match self {
            DriftConvention::Stratonovich => 0.5,
            DriftConvention::Ito => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum CslSampling {
    Raw,
    /// Branch when `ESS/N` falls below `ess_fraction` at a record point.
    Resampled {
        ess_fraction: f64,
    },
    Guided,
}

/// Joint eigenspace of all channels.
#[derive(Debug, Clone)]
pub struct Eigenmanifold {
    pub eigenvalues: Vec<f64>,
    pub projector: Operator,
}

/// Validated operator set.
#[derive(Debug, Clone)]
pub struct CslModel {
    dims: Vec<usize>,
    hamiltonian: Option<Operator>,
    channels: Vec<Operator>,
    channel_sq_sum: Operator,
    gamma: f64,
    convention: DriftConvention,
    manifolds: Vec<Eigenmanifold>,
}

impl CslModel {
    /// Checks hermiticity and pairwise commutation (`‖[A_i, A_j]‖ ≤ 1e−10`)
    /// once, and computes the joint eigenmanifolds.
    pub fn new(hamiltonian: Option<Operator>, channels: Vec<Operator>, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) {
            return Err(Error::InvalidParameter("gamma must be non-negative".into()));
        }
        let dims = match (&hamiltonian, channels.first()) {
            (Some(h), _) => h.factor_dims().to_vec(),
            (None, Some(a)) => a.factor_dims().to_vec(),
            (None, None) => return Err(Error::InvalidParameter("model needs a Hamiltonian or a channel".into())),
        };
        let dim: usize = dims.iter().product();
        for op in hamiltonian.iter().chain(&channels) {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: op.dim() });
            }
            let d = op.hermiticity_defect();
            if d > STRUCT_TOL {
                return Err(Error::KindViolation { kind: "hermitian", deviation: d });
            }
        }
        for i in 0..channels.len() {
            for j in i + 1..channels.len() {
                let norm = channels[i].commutator(&channels[j])?.max_abs();
                if norm > STRUCT_TOL {
                    return Err(Error::NonCommuting { i, j, norm });
                }
            }
        }
        let mut channel_sq_sum = Operator::zeros(&dims);
        for a in &channels {
            channel_sq_sum = channel_sq_sum.try_add(&a.matmul(a)?)?;
        }
        let manifolds = joint_eigenmanifolds(&channels, &dims)?;
        Ok(Self {
            dims,
            hamiltonian,
            channels,
            channel_sq_sum,
            gamma,
            convention: DriftConvention::default(),
            manifolds,
        })
    }

    pub fn with_convention(mut self, convention: DriftConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn channels(&self) -> &[Operator] {
        &self.channels
    }

    pub fn manifolds(&self) -> &[Eigenmanifold] {
        &self.manifolds
    }

    /// Largest step with `γ ‖Σ A_i²‖ dt ≤ 0.01`.
    pub fn max_dt(&self) -> f64 {
        let top = self.manifolds.iter().map(|m| m.eigenvalues.iter().map(|a| a * a).sum::<f64>()).fold(0.0, f64::max);
        if top == 0.0 || self.gamma == 0.0 {
            f64::INFINITY
        } else {
            0.01 / (self.gamma * top)
        }
    }

    /// Normalized `⟨P_σ⟩` for each manifold.
    pub fn manifold_weights(&self, state: &StateVector) -> Result<Vec<f64>> {
        self.manifolds.iter().map(|m| m.projector.expectation(state)).collect()
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.dim() != self.dims.iter().product::<usize>() {
            return Err(Error::DimensionMismatch { expected: self.dims.iter().product(), found: state.dim() });
        }
        Ok(())
    }

    /// One Euler–Maruyama step.
    pub fn step<R: Rng + ?Sized>(
        &self,
        member: &mut CslEnsembleMember,
        dt: f64,
        guided: bool,
        rng: &mut R,
    ) -> Result<()> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter("dt must be positive".into()));
        }
        self.check_state(&member.state)?;
        let psi = &member.state;
        let n2 = psi.norm_sqr();
        let sd = (self.gamma * dt).sqrt();
        let mut next = psi.clone();
        let mut increments = Vec::with_capacity(self.channels.len());
        let mut log_ratio = 0.0;
        for a in &self.channels {
            let a_psi = a.apply(psi)?;
            let mut dw = sd * rng.sample::<f64, _>(StandardNormal);
            if guided && n2 > 0.0 {
                let mean = psi.inner(&a_psi).re / n2;
                dw += 2.0 * self.gamma * mean * dt;
                log_ratio += -2.0 * mean * dw + 2.0 * self.gamma * mean * mean * dt;
            }
            next = next.try_add(&a_psi.scaled(Complex64::new(dw, 0.0)))?;
            increments.push(dw);
        }
        let drift = -self.convention.coefficient() * self.gamma * dt;
        if drift != 0.0 {
            next = next.try_add(&self.channel_sq_sum.apply(psi)?.scaled(Complex64::new(drift, 0.0)))?;
        }
        if let Some(h) = &self.hamiltonian {
            next = next.try_add(&h.apply(psi)?.scaled(-I * dt))?;
        }
        member.state = next;
        member.raw_weight *= log_ratio.exp();
        if member.record_noise {
            member.noise_history.push(increments);
        }
        Ok(())
    }
}

/// Joint eigenmanifolds of commuting hermitian channels, found from the
/// spectrum of a generic real combination.
fn joint_eigenmanifolds(channels: &[Operator], dims: &[usize]) -> Result<Vec<Eigenmanifold>> {
    let dim: usize = dims.iter().product();
    if channels.is_empty() {
        return Ok(vec![Eigenmanifold { eigenvalues: Vec::new(), projector: Operator::identity(dims) }]);
    }
    let vectors: Vec<Vec<Complex64>> = if channels.iter().all(|a| a.is_diagonal(0.0)) {
        (0..dim)
            .map(|k| {
                let mut v = vec![Complex64::new(0.0, 0.0); dim];
                v[k] = Complex64::new(1.0, 0.0);
                v
            })
            .collect()
    } else {
        let mut b = DMatrix::<Complex64>::zeros(dim, dim);
        for (i, a) in channels.iter().enumerate() {
            let w = 1.0 / (i as f64 + std::f64::consts::SQRT_2);
            for r in 0..dim {
                for c in 0..dim {
                    b[(r, c)] += a.entry(r, c) * w;
                }
            }
        }
        let eig = SymmetricEigen::new(b);
        (0..dim).map(|k| eig.eigenvectors.column(k).iter().copied().collect()).collect()
    };
    let mut manifolds: Vec<(Vec<f64>, Vec<StateVector>)> = Vec::new();
    for v in vectors {
        let v = StateVector::new(v, dims.to_vec())?;
        let mut values = Vec::with_capacity(channels.len());
        for a in channels {
            let av = a.apply(&v)?;
            let value = v.inner(&av).re;
            let resid = av.try_add(&v.scaled(Complex64::new(-value, 0.0)))?.norm();
            if resid > 1e-8 {
                return Err(Error::InvalidParameter("channels have no common eigenbasis".into()));
            }
            values.push(value);
        }
        match manifolds.iter_mut().find(|(vals, _)| vals.iter().zip(&values).all(|(a, b)| (a - b).abs() < 1e-8)) {
            Some((_, vs)) => vs.push(v),
            None => manifolds.push((values, vec![v])),
        }
    }
    manifolds.sort_by(|a, b| {
        b.0.iter().zip(&a.0).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    manifolds
        .into_iter()
        .map(|(eigenvalues, vs)| {
            let mut p = Operator::zeros(dims);
            for v in &vs {
                p = p.try_add(&Operator::outer(v, v))?;
            }
            Ok(Eigenmanifold { eigenvalues, projector: p })
        })
        .collect()
}

/// One trajectory of the ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CslEnsembleMember {
    /// Unnormalized state.
    pub state: StateVector,
    /// Ratio of the raw noise density to the density the noise was drawn
    /// from, accumulated over the trajectory (1 under raw sampling).
    pub raw_weight: f64,
    pub noise_history: Vec<Vec<f64>>,
    pub record_noise: bool,
}

impl CslEnsembleMember {
    pub fn new(state: StateVector) -> Self {
        Self { state, raw_weight: 1.0, noise_history: Vec::new(), record_noise: false }
    }

    pub fn recording(mut self) -> Self {
        self.record_noise = true;
        self
    }

    pub fn cooked_weight(&self) -> f64 {
        self.raw_weight * self.state.norm_sqr()
    }
}

/// One raw-measure step.
pub fn csl_step<R: Rng + ?Sized>(
    member: &CslEnsembleMember,
    model: &CslModel,
    dt: f64,
    rng: &mut R,
) -> Result<CslEnsembleMember> {
    let mut next = member.clone();
    model.step(&mut next, dt, false, rng)?;
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CslRunConfig {
    pub total_time: f64,
    pub dt: f64,
    pub members: usize,
    /// Steps between snapshots (and resampling checks).
    pub record_every: usize,
    pub sampling: CslSampling,
    pub record_members: bool,
}

/// Ensemble statistics at one recorded time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CslSnapshot {
    pub t: f64,
    /// Estimate of `E_raw[‖Ψ‖²]` and its standard error.
    pub raw_norm_mean: f64,
    pub raw_norm_sem: f64,
    /// Cooked-weighted `⟨P_σ⟩` per manifold.
    pub manifold_probabilities: Vec<f64>,
    pub ess_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberRecord {
    pub t: f64,
    pub member_id: usize,
    pub norm2: f64,
    pub raw_weight: f64,
    pub manifold_weights: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct CslRun {
    pub snapshots: Vec<CslSnapshot>,
    pub members: Vec<CslEnsembleMember>,
    pub member_records: Vec<MemberRecord>,
    pub resamplings: usize,
    manifold_weights: Vec<Vec<f64>>,
    /// Initial ancestor of each final member.
    lineages: Vec<usize>,
}

/// Frequency of one reduction outcome with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionFrequency {
    pub frequency: f64,
    pub sigma: f64,
}

impl CslRun {
    /// Cooked-weighted fraction of members with `⟨P_σ⟩ > threshold`, per
    /// manifold.
    ///
    /// The error groups members by initial ancestor before summing squared
    /// weighted deviations (Chan–Lai). Without resampling every member is its
    /// own lineage and this is the usual weighted-sample error; after
    /// resampling it accounts for clones sharing a history.
    pub fn reduction_frequencies(&self, threshold: f64) -> Vec<ReductionFrequency> {
        let w: Vec<f64> = self.members.iter().map(|m| m.cooked_weight()).collect();
        let total: f64 = w.iter().sum();
        let k = self.manifold_weights.first().map_or(0, |v| v.len());
        let lineage_count = self.lineages.iter().max().map_or(0, |m| m + 1);
        (0..k)
            .map(|s| {
                let hit = |i: usize| if self.manifold_weights[i][s] > threshold { 1.0 } else { 0.0 };
                let f = (0..w.len()).map(|i| w[i] * hit(i)).sum::<f64>() / total;
                let mut per_lineage = vec![0.0; lineage_count];
                for i in 0..w.len() {
                    per_lineage[self.lineages[i]] += w[i] * (hit(i) - f);
                }
                let var = per_lineage.iter().map(|x| x * x).sum::<f64>() / (total * total);
                ReductionFrequency { frequency: f, sigma: var.sqrt() }
            })
            .collect()
    }

    /// Cooked-weighted fraction of members that reduced to some manifold.
    pub fn reduced_fraction(&self, threshold: f64) -> f64 {
        self.reduction_frequencies(threshold).iter().map(|f| f.frequency).sum()
    }
}

fn effective_fraction(w: &[f64]) -> f64 {
    let total: f64 = w.iter().sum();
    let sq: f64 = w.iter().map(|x| x * x).sum();
    if sq == 0.0 {
        0.0
    } else {
        total * total / sq / w.len() as f64
    }
}

/// Evolve `config.members` trajectories from `initial` and record
/// ensemble statistics every `record_every` steps.
pub fn csl_run(initial: &StateVector, model: &CslModel, config: &CslRunConfig, seed: u64) -> Result<CslRun> {
    model.check_state(initial)?;
    if config.members == 0 || config.record_every == 0 {
        return Err(Error::InvalidParameter("need at least one member and record_every ≥ 1".into()));
    }
    if !(config.dt > 0.0) || !(config.total_time >= 0.0) {
        return Err(Error::InvalidParameter("dt must be positive and total_time non-negative".into()));
    }
    if config.dt > model.max_dt() * (1.0 + 1e-9) {
        return Err(Error::InvalidParameter(format!(
            "dt = {} exceeds the stability bound {} (γ‖ΣA²‖dt ≤ 0.01)",
            config.dt,
            model.max_dt()
        )));
    }
    if let CslSampling::Resampled { ess_fraction } = config.sampling {
        if !(0.0..=1.0).contains(&ess_fraction) {
            return Err(Error::InvalidParameter("ess_fraction must lie in [0, 1]".into()));
        }
    }
    let guided = config.sampling == CslSampling::Guided;
    let steps = (config.total_time / config.dt).round() as usize;
    let mut ensemble: Vec<(CslEnsembleMember, SimRng)> =
        (0..config.members).map(|i| (CslEnsembleMember::new(initial.clone()), trial_rng(seed, i as u64))).collect();
    let mut lineages: Vec<usize> = (0..config.members).collect();
    let mut resample_rng = trial_rng(seed, u64::MAX);
    let mut next_stream = config.members as u64;
    let mut scale = 1.0;
    let mut run = CslRun {
        snapshots: Vec::new(),
        members: Vec::new(),
        member_records: Vec::new(),
        resamplings: 0,
        manifold_weights: Vec::new(),
        lineages: Vec::new(),
    };

    let mut done = 0;
    loop {
        let t = done as f64 * config.dt;
        let weights: Vec<Vec<f64>> =
            ensemble.iter().map(|(m, _)| model.manifold_weights(&m.state)).collect::<Result<_>>()?;
        let raw: Vec<f64> = ensemble.iter().map(|(m, _)| m.cooked_weight()).collect();
        let n = raw.len() as f64;
        let mean = raw.iter().sum::<f64>() / n;
        let var = raw.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        let total: f64 = raw.iter().sum();
        let probs = (0..model.manifolds.len())
            .map(|s| raw.iter().zip(&weights).map(|(w, mw)| w * mw[s]).sum::<f64>() / total)
            .collect();
        run.snapshots.push(CslSnapshot {
            t,
            raw_norm_mean: scale * mean,
            raw_norm_sem: scale * (var / n).sqrt(),
            manifold_probabilities: probs,
            ess_fraction: effective_fraction(&raw),
        });
        if config.record_members {
            for (id, ((m, _), mw)) in ensemble.iter().zip(&weights).enumerate() {
                run.member_records.push(MemberRecord {
                    t,
                    member_id: id,
                    norm2: m.state.norm_sqr(),
                    raw_weight: m.raw_weight * scale,
                    manifold_weights: mw.clone(),
                });
            }
        }
        if done >= steps {
            run.manifold_weights = weights;
            break;
        }
        if let CslSampling::Resampled { ess_fraction } = config.sampling {
            if effective_fraction(&raw) < ess_fraction {
                scale *= mean;
                let picks = systematic_resample(&raw, &mut resample_rng);
                let mut used = vec![false; ensemble.len()];
                let mut next = Vec::with_capacity(ensemble.len());
                lineages = picks.iter().map(|&k| lineages[k]).collect();
                for k in picks {
                    let (m, rng) = &ensemble[k];
                    let mut copy = m.clone();
                    copy.state = copy.state.normalized()?;
                    copy.raw_weight = 1.0;
                    let rng = if used[k] {
                        next_stream += 1;
                        trial_rng(seed, next_stream)
                    } else {
                        used[k] = true;
                        rng.clone()
                    };
                    next.push((copy, rng));
                }
                ensemble = next;
                run.resamplings += 1;
            }
        }
        let segment = config.record_every.min(steps - done);
        let failures = std::sync::Mutex::new(None);
        for_each_mut(&mut ensemble, |_, (m, rng)| {
            for _ in 0..segment {
                if let Err(e) = model.step(m, config.dt, guided, rng) {
                    *failures.lock().expect("poisoned") = Some(e);
                    return;
                }
            }
        });
        if let Some(e) = failures.into_inner().expect("poisoned") {
            return Err(e);
        }
        done += segment;
    }
    run.members = ensemble.into_iter().map(|(m, _)| m).collect();
    run.lineages = lineages;
    Ok(run)
}

/// Systematic resampling: indices drawn proportionally to `weights`.
fn systematic_resample<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Vec<usize> {
    let n = weights.len();
    let total: f64 = weights.iter().sum();
    let step = total / n as f64;
    let mut u = rng.random::<f64>() * step;
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    let mut k = 0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        while u < acc && k < n {
            out.push(i);
            u += step;
            k += 1;
        }
    }
    while out.len() < n {
        out.push(n - 1);
    }
    out
}

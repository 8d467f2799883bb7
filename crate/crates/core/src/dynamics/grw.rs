//! Spontaneous localization hits on gridded one-dimensional wavefunctions.
//!
//! A hit on particle `i` at center `x` multiplies the wavefunction by
//! `(α/π)^{1/4} exp(−α/2 (r_i − x)²)` and renormalizes. The center density
//! `‖Φ_x‖²` is the particle's position density convolved with a normal of
//! variance `1/(2α)`, so it is sampled exactly by drawing a grid point from
//! the marginal and adding Gaussian noise.

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::linalg::{sample_index, Complex64};
use crate::{Error, Result};

/// Amplitudes on a product grid, `points` sites per particle, particle 0
/// most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridWavefunction {
    amplitudes: Vec<Complex64>,
    particles: usize,
    points: usize,
    spacing: f64,
    origin: Vec<f64>,
}

impl GridWavefunction {
    /// Sample `f` at every grid configuration and normalize.
    pub fn from_fn(
        particles: usize,
        points: usize,
        spacing: f64,
        origin: Vec<f64>,
        f: impl Fn(&[f64]) -> Complex64,
    ) -> Result<Self> {
        if particles == 0 || points == 0 || origin.len() != particles || !(spacing > 0.0) {
            return Err(Error::InvalidParameter(
                "grid needs particles, points, one origin each and spacing > 0".into(),
            ));
        }
        let n = points.checked_pow(particles as u32).ok_or_else(|| Error::InvalidParameter("grid too large".into()))?;
        let mut x = vec![0.0; particles];
        let mut amplitudes = Vec::with_capacity(n);
        for idx in 0..n {
            let mut rem = idx;
            for p in (0..particles).rev() {
                x[p] = origin[p] + (rem % points) as f64 * spacing;
                rem /= points;
            }
            amplitudes.push(f(&x));
        }
        Self { amplitudes, particles, points, spacing, origin }.normalized()
    }

    /// One particle on `points` sites starting at `origin`.
    pub fn single(points: usize, spacing: f64, origin: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::from_fn(1, points, spacing, vec![origin], |x| f(x[0]))
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn coordinate(&self, particle: usize, index: usize) -> f64 {
        self.origin[particle] + index as f64 * self.spacing
    }

    /// `Σ |ψ|² · spacing^N`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.spacing.powi(self.particles as i32)
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / n.sqrt();
        self.amplitudes.iter_mut().for_each(|a| *a *= s);
        Ok(self)
    }

    fn stride(&self, particle: usize) -> usize {
        self.points.pow((self.particles - 1 - particle) as u32)
    }

    /// Position density of one particle on its grid (sums to `1/spacing`
    /// for a normalized state).
    pub fn marginal(&self, particle: usize) -> Vec<f64> {
        let stride = self.stride(particle);
        let cell = self.spacing.powi(self.particles as i32 - 1);
        let mut out = vec![0.0; self.points];
        for (i, a) in self.amplitudes.iter().enumerate() {
            out[(i / stride) % self.points] += a.norm_sqr() * cell;
        }
        out
    }

    /// `⟨ψ|φ⟩` with the grid measure.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        let cell = self.spacing.powi(self.particles as i32);
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum::<Complex64>() * cell
    }

    /// Probability that `particle` lies in `[lo, hi)`.
    pub fn probability_in(&self, particle: usize, lo: f64, hi: f64) -> f64 {
        self.marginal(particle)
            .iter()
            .enumerate()
            .filter(|(j, _)| (lo..hi).contains(&self.coordinate(particle, *j)))
            .map(|(_, p)| p * self.spacing)
            .sum()
    }

    /// `Φ_x`: multiply by the localization Gaussian, no renormalization.
    pub fn localized(&self, particle: usize, center: f64, alpha: f64) -> Self {
        let stride = self.stride(particle);
        let pre = (alpha / std::f64::consts::PI).powf(0.25);
        let factors: Vec<f64> = (0..self.points)
            .map(|j| pre * (-0.5 * alpha * (self.coordinate(particle, j) - center).powi(2)).exp())
            .collect();
        let mut out = self.clone();
        for (i, a) in out.amplitudes.iter_mut().enumerate() {
            *a *= factors[(i / stride) % self.points];
        }
        out
    }

    /// Exact center density `‖Φ_x‖²` (grid quadrature of the convolution).
    pub fn center_density(&self, particle: usize, x: f64, alpha: f64) -> f64 {
        let pre = (alpha / std::f64::consts::PI).sqrt();
        self.marginal(particle)
            .iter()
            .enumerate()
            .map(|(j, rho)| rho * self.spacing * pre * (-alpha * (self.coordinate(particle, j) - x).powi(2)).exp())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrwParams {
    /// Rate per nucleon mass, in inverse simulation time units.
    pub lambda: f64,
    /// Inverse squared localization width, in inverse squared grid units.
    pub alpha: f64,
    /// Particle masses in nucleon units.
    pub masses: Vec<f64>,
}

impl GrwParams {
    pub fn new(lambda: f64, alpha: f64, masses: Vec<f64>) -> Result<Self> {
        let p = Self { lambda, alpha, masses };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !(self.alpha > 0.0) {
            return Err(Error::InvalidParameter("GRW needs lambda > 0 and alpha > 0".into()));
        }
        if self.masses.iter().any(|m| !(*m >= 0.0)) {
            return Err(Error::InvalidParameter("masses must be non-negative".into()));
        }
        Ok(())
    }

    pub fn rate(&self, particle: usize) -> f64 {
        self.lambda * self.masses[particle]
    }

    pub fn total_rate(&self) -> f64 {
        self.masses.iter().map(|m| self.lambda * m).sum()
    }
}

const MAX_CENTER_DRAWS: usize = 1000;

/// Localize `particle` at a center drawn from `‖Φ_x‖²`.
pub fn grw_hit<R: Rng + ?Sized>(
    psi: &GridWavefunction,
    particle: usize,
    params: &GrwParams,
    rng: &mut R,
) -> Result<(f64, GridWavefunction)> {
    params.validate()?;
    if particle >= psi.particles {
        return Err(Error::SlotOutOfRange { slot: particle, factors: psi.particles });
    }
    if (psi.norm_sqr() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidParameter(format!("grid state has norm² {}", psi.norm_sqr())));
    }
    let marginal = psi.marginal(particle);
    let jitter = Normal::new(0.0, (0.5 / params.alpha).sqrt()).expect("positive width");
    for _ in 0..MAX_CENTER_DRAWS {
        let j = sample_index(&marginal, rng);
        let center = psi.coordinate(particle, j) + jitter.sample(rng);
        if let Ok(next) = psi.localized(particle, center, params.alpha).normalized() {
            return Ok((center, next));
        }
    }
    Err(Error::ZeroNorm)
}

/// One localization event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrwHit {
    pub time: f64,
    pub particle: usize,
    pub center: f64,
}

/// Hit times over `[0, duration)` for independent per-particle Poisson
/// processes with rates `λ·m_i`, merged in time order.
pub fn grw_schedule<R: Rng + ?Sized>(params: &GrwParams, duration: f64, rng: &mut R) -> Result<Vec<(f64, usize)>> {
    params.validate()?;
    if !(duration >= 0.0) {
        return Err(Error::InvalidParameter("duration must be non-negative".into()));
    }
    let total = params.total_rate();
    if total == 0.0 {
        return Ok(Vec::new());
    }
    let rates: Vec<f64> = (0..params.masses.len()).map(|i| params.rate(i)).collect();
    let wait = Exp::new(total).expect("positive rate");
    let mut out = Vec::new();
    let mut t = wait.sample(rng);
    while t < duration {
        out.push((t, sample_index(&rates, rng)));
        t += wait.sample(rng);
    }
    Ok(out)
}

/// Apply hits in time order over `duration`; no Hamiltonian evolution in
/// between.
pub fn grw_evolve<R: Rng + ?Sized>(
    psi: &GridWavefunction,
    duration: f64,
    params: &GrwParams,
    rng: &mut R,
) -> Result<(Vec<GrwHit>, GridWavefunction)> {
    if params.masses.len() != psi.particles {
        return Err(Error::DimensionMismatch { expected: psi.particles, found: params.masses.len() });
    }
    let mut state = psi.clone();
    let mut hits = Vec::new();
    for (time, particle) in grw_schedule(params, duration, rng)? {
        let (center, next) = grw_hit(&state, particle, params, rng)?;
        state = next;
        hits.push(GrwHit { time, particle, center });
    }
    Ok((hits, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::r;
    use crate::rng::seeded;

    fn lump(x0: f64, s: f64) -> impl Fn(f64) -> Complex64 {
        move |x| r((-(x - x0).powi(2) / (4.0 * s * s)).exp())
    }

    #[test]
    fn center_density_integrates_to_one() {
        let psi = GridWavefunction::single(801, 0.05, -20.0, lump(3.0, 0.7)).unwrap();
        let total: f64 = (0..4001).map(|k| psi.center_density(0, -40.0 + 0.02 * k as f64, 1.0) * 0.02).sum();
        assert!((total - 1.0).abs() < 1e-6);
    }

    #[test]
    fn hit_output_is_normalized() {
        let psi = GridWavefunction::single(401, 0.05, -10.0, lump(0.0, 1.0)).unwrap();
        let p = GrwParams::new(1.0, 2.0, vec![1.0]).unwrap();
        let (_, out) = grw_hit(&psi, 0, &p, &mut seeded(4)).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(GrwParams::new(0.0, 1.0, vec![1.0]).is_err());
        assert!(GrwParams::new(1.0, -1.0, vec![1.0]).is_err());
        assert!(GrwParams::new(1.0, 1.0, vec![-1.0]).is_err());
    }
}

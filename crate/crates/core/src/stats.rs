//! Goodness-of-fit statistics used by Monte Carlo checks and run summaries.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl TestResult {
    /// True when the null hypothesis survives at significance `alpha`.
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }
}

fn chi2_sf(x: f64, dof: usize) -> f64 {
    if dof == 0 {
        return if x > 0.0 { 0.0 } else { 1.0 };
    }
    ChiSquared::new(dof as f64).map(|d| d.sf(x)).unwrap_or(f64::NAN)
}

/// Pearson χ² goodness of fit of `observed` counts against `expected`
/// probabilities. Bins with zero expectation must be empty, otherwise the
/// test fails outright.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> TestResult {
    assert_eq!(observed.len(), expected.len());
    let n: u64 = observed.iter().sum();
    let total_p: f64 = expected.iter().sum();
    let mut stat = 0.0;
    let mut bins = 0usize;
    for (&o, &p) in observed.iter().zip(expected) {
        let e = n as f64 * p / total_p;
        if e <= 0.0 {
            if o > 0 {
                return TestResult { statistic: f64::INFINITY, dof: 0, p_value: 0.0 };
            }
            continue;
        }
        bins += 1;
        stat += (o as f64 - e).powi(2) / e;
    }
    let dof = bins.saturating_sub(1);
    TestResult { statistic: stat, dof, p_value: chi2_sf(stat, dof) }
}

/// χ² test that two count vectors over the same bins share one distribution.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> TestResult {
    assert_eq!(a.len(), b.len());
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let n = na + nb;
    let mut stat = 0.0;
    let mut bins = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        let col = (x + y) as f64;
        if col == 0.0 {
            continue;
        }
        bins += 1;
        let (ex, ey) = (na * col / n, nb * col / n);
        stat += (x as f64 - ex).powi(2) / ex + (y as f64 - ey).powi(2) / ey;
    }
    let dof = bins.saturating_sub(1);
    TestResult { statistic: stat, dof, p_value: chi2_sf(stat, dof) }
}

/// Asymptotic Kolmogorov survival function `Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}`.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov–Smirnov test of `samples` against `cdf`.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> TestResult {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let sn = n.sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    TestResult { statistic: d, dof: xs.len(), p_value: kolmogorov_sf(lambda) }
}

pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Counts of each value in `0..bins`.
pub fn histogram(values: impl IntoIterator<Item = usize>, bins: usize) -> Vec<u64> {
    let mut h = vec![0u64; bins];
    for v in values {
        h[v] += 1;
    }
    h
}

/// Mean and standard error of the mean.
pub fn mean_and_sem(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

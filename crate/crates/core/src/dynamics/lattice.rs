//! Smeared mass-density operators on a one-dimensional lattice.
//!
//! First-quantized representation: `K` distinguishable particles, each
//! sitting on one of `L` sites, so the space has factor dimensions `[L; K]`.
//! `N^(k)(r) = Σ_q exp(−α/2 (q − r)²) |q><q|_k` and
//! `M(r) = Σ_k m_k N^(k)(r)`. The kernel is peak-normalized: the
//! `(α/2π)^{1/2}` density prefactor is a constant that can be absorbed into
//! the coupling γ.

use serde::{Deserialize, Serialize};

use crate::linalg::{Operator, OperatorKind};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub name: String,
    /// Mass in nucleon units.
    pub mass: f64,
}

impl Species {
    pub fn new(name: &str, mass: f64) -> Self {
        Self { name: name.into(), mass }
    }
}

/// Factor dimensions of the lattice space.
pub fn lattice_dims(sites: usize, particles: usize) -> Vec<usize> {
    vec![sites; particles]
}

/// `M(r)` for every lattice site `r`, in site order.
pub fn mass_density_ops(lattice: &[f64], particles: &[Species], alpha: f64) -> Result<Vec<Operator>> {
    if lattice.is_empty() || particles.is_empty() {
        return Err(Error::InvalidParameter("lattice and particle list must be non-empty".into()));
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter("alpha must be positive".into()));
    }
    let l = lattice.len();
    let dims = lattice_dims(l, particles.len());
    let dim: usize = dims.iter().product();
    lattice
        .iter()
        .map(|&r| {
            let kernel: Vec<f64> = lattice.iter().map(|&q| (-0.5 * alpha * (q - r).powi(2)).exp()).collect();
            let diag: Vec<f64> = (0..dim)
                .map(|idx| {
                    let mut rem = idx;
                    let mut total = 0.0;
                    for sp in particles.iter().rev() {
                        total += sp.mass * kernel[rem % l];
                        rem /= l;
                    }
                    total
                })
                .collect();
            Operator::real_diagonal(&dims, &diag)?.with_kind(OperatorKind::Hermitian)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::StateVector;

    #[test]
    fn separated_sites_give_mass_times_projector() {
        let ops = mass_density_ops(&[0.0, 100.0], &[Species::new("nucleon", 1.0)], 1.0).unwrap();
        let p0 = Operator::projector_onto(&StateVector::basis(&[2], &[0]).unwrap()).unwrap();
        assert!(ops[0].max_abs_diff(&p0) < 1e-12);
    }

    #[test]
    fn two_species_add_masses() {
        let ops = mass_density_ops(&[0.0, 50.0], &[Species::new("a", 2.0), Species::new("b", 3.0)], 1.0).unwrap();
        // Both particles on site 0 carry mass 5 there.
        assert!((ops[0].entry(0, 0).re - 5.0).abs() < 1e-12);
        assert!((ops[0].entry(1, 1).re - 2.0).abs() < 1e-12);
        for a in &ops {
            for b in &ops {
                assert!(a.commutator(b).unwrap().max_abs() < 1e-10);
            }
        }
    }
}
